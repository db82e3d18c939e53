//! Syntax tree for `.sm` source files.
//!
//! Every node remembers where it was parsed. Equality on these types is
//! structural: spans are ignored, so a model parsed from a reformatted file
//! compares equal to the original.

use std::fmt;

/// A 1-based line/column position in a source file. Columns count chars.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Span {
    pub line: u32,
    pub column: u32,
}

impl Span {
    pub fn new(line: u32, column: u32) -> Self {
        Self { line, column }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

/// Root of a parsed `.sm` file.
#[derive(Debug, Clone)]
pub struct SmModel {
    pub app_name: String,
    pub app_name_span: Span,
    pub resources_folder: String,
    pub resources_folder_span: Span,
    pub resources: Vec<ResourceDecl>,
    pub hierarchy: Vec<SubjectDecl>,
}

impl PartialEq for SmModel {
    fn eq(&self, other: &Self) -> bool {
        self.app_name == other.app_name
            && self.resources_folder == other.resources_folder
            && self.resources == other.resources
            && self.hierarchy == other.hierarchy
    }
}

impl Eq for SmModel {}

impl SmModel {
    /// Depth-first, pre-order walk over every subject in the forest.
    pub fn subjects(&self) -> SubjectIter<'_> {
        SubjectIter {
            stack: self.hierarchy.iter().rev().collect(),
        }
    }

    /// Declared language codes in declaration order.
    pub fn languages(&self) -> impl Iterator<Item = &LanguageCode> {
        self.resources.iter().map(|r| &r.language)
    }
}

/// Pre-order iterator over a subject forest.
pub struct SubjectIter<'a> {
    stack: Vec<&'a SubjectDecl>,
}

impl<'a> Iterator for SubjectIter<'a> {
    type Item = &'a SubjectDecl;

    fn next(&mut self) -> Option<Self::Item> {
        let next = self.stack.pop()?;
        self.stack.extend(next.sons.iter().rev());
        Some(next)
    }
}

/// A `{ language : xx filename : "..." }` block.
#[derive(Debug, Clone)]
pub struct ResourceDecl {
    pub language: LanguageCode,
    pub filename: String,
    pub span: Span,
}

impl PartialEq for ResourceDecl {
    fn eq(&self, other: &Self) -> bool {
        self.language == other.language && self.filename == other.filename
    }
}

impl Eq for ResourceDecl {}

/// Two-letter language code as written in the source. Whether the code is
/// acceptable is decided by validation, not by the parser.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LanguageCode(String);

impl LanguageCode {
    /// The codes the grammar accepts in strict mode.
    pub const STRICT: [&'static str; 2] = ["en", "fr"];

    pub fn new(code: impl Into<String>) -> Self {
        Self(code.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_strict(&self) -> bool {
        Self::STRICT.contains(&self.0.as_str())
    }

    /// Any lowercase two-letter ASCII code.
    pub fn is_well_formed(&self) -> bool {
        self.0.len() == 2 && self.0.bytes().all(|b| b.is_ascii_lowercase())
    }
}

impl fmt::Display for LanguageCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// One subject (topic) declaration and its sub-subjects.
#[derive(Debug, Clone)]
pub struct SubjectDecl {
    pub code: String,
    pub name: TextValue,
    pub description: TextValue,
    /// Empty when the source had no `sons` clause.
    pub sons: Vec<SubjectDecl>,
    /// Position of the `id` value.
    pub span: Span,
}

impl PartialEq for SubjectDecl {
    fn eq(&self, other: &Self) -> bool {
        self.code == other.code
            && self.name == other.name
            && self.description == other.description
            && self.sons == other.sons
    }
}

impl Eq for SubjectDecl {}

impl SubjectDecl {
    pub fn leaf(code: impl Into<String>, name: TextValue, description: TextValue) -> Self {
        Self {
            code: code.into(),
            name,
            description,
            sons: Vec::new(),
            span: Span::default(),
        }
    }
}

/// A name or description: either a literal string or a `{{ "key" }}`
/// reference into the language files.
#[derive(Debug, Clone)]
pub struct TextValue {
    pub raw: String,
    pub is_key: bool,
    pub span: Span,
}

impl PartialEq for TextValue {
    fn eq(&self, other: &Self) -> bool {
        self.raw == other.raw && self.is_key == other.is_key
    }
}

impl Eq for TextValue {}

impl TextValue {
    pub fn literal(raw: impl Into<String>) -> Self {
        Self {
            raw: raw.into(),
            is_key: false,
            span: Span::default(),
        }
    }

    pub fn key(raw: impl Into<String>) -> Self {
        Self {
            raw: raw.into(),
            is_key: true,
            span: Span::default(),
        }
    }
}

impl fmt::Display for TextValue {
    /// Keys render in their `{{key}}` form, literals verbatim.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_key {
            write!(f, "{{{{{}}}}}", self.raw)
        } else {
            f.write_str(&self.raw)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        })
    }
}

/// A positioned message produced by the lexer, parser or validator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
    pub span: Span,
}

impl Diagnostic {
    pub fn error(span: Span, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Error,
            message: message.into(),
            span,
        }
    }

    pub fn warning(span: Span, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Warning,
            message: message.into(),
            span,
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    /// `severity line:col message`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.severity, self.span, self.message)
    }
}
