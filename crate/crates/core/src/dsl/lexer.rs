//! Tokenizer for `.sm` source files.
//!
//! Keywords are reserved words of the grammar. Identifiers are an ASCII
//! letter followed by letters, digits or underscores. String literals are
//! double-quoted, single-line, and understand only the `\"` and `\\`
//! escapes. `//` starts a comment that runs to the end of the line.

use std::fmt;

use thiserror::Error;

use super::ast::Span;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Keyword {
    Begin,
    End,
    SMANet,
    Application,
    Resources,
    ResourcesFolder,
    Hierarchy,
    Language,
    Filename,
    Id,
    Name,
    Desc,
    Sons,
}

impl Keyword {
    pub const ALL: [Keyword; 13] = [
        Keyword::Begin,
        Keyword::End,
        Keyword::SMANet,
        Keyword::Application,
        Keyword::Resources,
        Keyword::ResourcesFolder,
        Keyword::Hierarchy,
        Keyword::Language,
        Keyword::Filename,
        Keyword::Id,
        Keyword::Name,
        Keyword::Desc,
        Keyword::Sons,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Keyword::Begin => "Begin",
            Keyword::End => "End",
            Keyword::SMANet => "SMANet",
            Keyword::Application => "Application",
            Keyword::Resources => "Resources",
            Keyword::ResourcesFolder => "resources-folder",
            Keyword::Hierarchy => "Hierarchy",
            Keyword::Language => "language",
            Keyword::Filename => "filename",
            Keyword::Id => "id",
            Keyword::Name => "name",
            Keyword::Desc => "desc",
            Keyword::Sons => "sons",
        }
    }

    pub fn from_word(word: &str) -> Option<Keyword> {
        Keyword::ALL.into_iter().find(|k| k.as_str() == word)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Punct {
    Colon,
    Comma,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    /// `{{`
    OpenKey,
    /// `}}`
    CloseKey,
}

impl Punct {
    pub fn as_str(self) -> &'static str {
        match self {
            Punct::Colon => ":",
            Punct::Comma => ",",
            Punct::LBrace => "{",
            Punct::RBrace => "}",
            Punct::LBracket => "[",
            Punct::RBracket => "]",
            Punct::OpenKey => "{{",
            Punct::CloseKey => "}}",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Keyword(Keyword),
    Ident(String),
    /// Decoded contents of a string literal (quotes and escapes removed).
    Str(String),
    Punct(Punct),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
}

impl Token {
    /// Source form of the token. For strings this re-quotes and re-escapes
    /// the decoded value, which is the canonical spelling.
    pub fn lexeme(&self) -> String {
        match &self.kind {
            TokenKind::Keyword(k) => k.as_str().to_string(),
            TokenKind::Ident(s) => s.clone(),
            TokenKind::Str(s) => quote(s),
            TokenKind::Punct(p) => p.as_str().to_string(),
        }
    }
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Keyword(k) => write!(f, "'{}'", k.as_str()),
            TokenKind::Ident(s) => write!(f, "identifier '{s}'"),
            TokenKind::Str(s) => write!(f, "string {}", quote(s)),
            TokenKind::Punct(p) => write!(f, "'{}'", p.as_str()),
        }
    }
}

/// Renders `value` as a string literal.
pub fn quote(value: &str) -> String {
    let mut out = String::with_capacity(value.len() + 2);
    out.push('"');
    for c in value.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LexError {
    #[error("unterminated string literal")]
    UnterminatedString { span: Span },
    #[error("invalid escape '\\{found}' in string literal (only \\\" and \\\\ are allowed)")]
    InvalidEscape { found: char, span: Span },
    #[error("illegal character '{found}'")]
    IllegalChar { found: char, span: Span },
}

impl LexError {
    pub fn span(&self) -> Span {
        match self {
            LexError::UnterminatedString { span }
            | LexError::InvalidEscape { span, .. }
            | LexError::IllegalChar { span, .. } => *span,
        }
    }
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    rest: &'a str,
    line: u32,
    column: u32,
}

impl<'a> Cursor<'a> {
    fn new(source: &'a str) -> Self {
        Self {
            chars: source.chars().peekable(),
            rest: source,
            line: 1,
            column: 1,
        }
    }

    fn span(&self) -> Span {
        Span::new(self.line, self.column)
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        self.rest = &self.rest[c.len_utf8()..];
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Splits `source` into tokens, discarding whitespace and comments.
pub fn tokenize(source: &str) -> Result<Vec<Token>, LexError> {
    let mut cur = Cursor::new(source);
    let mut tokens = Vec::new();

    while let Some(c) = cur.peek() {
        let span = cur.span();
        match c {
            c if c.is_whitespace() => {
                cur.bump();
            }
            '/' if cur.rest.starts_with("//") => {
                while let Some(c) = cur.peek() {
                    if c == '\n' {
                        break;
                    }
                    cur.bump();
                }
            }
            '"' => {
                let value = lex_string(&mut cur, span)?;
                tokens.push(Token {
                    kind: TokenKind::Str(value),
                    span,
                });
            }
            ':' | ',' | '[' | ']' => {
                cur.bump();
                let p = match c {
                    ':' => Punct::Colon,
                    ',' => Punct::Comma,
                    '[' => Punct::LBracket,
                    _ => Punct::RBracket,
                };
                tokens.push(Token {
                    kind: TokenKind::Punct(p),
                    span,
                });
            }
            '{' | '}' => {
                let doubled = if c == '{' { "{{" } else { "}}" };
                let p = if cur.rest.starts_with(doubled) {
                    cur.bump();
                    cur.bump();
                    if c == '{' {
                        Punct::OpenKey
                    } else {
                        Punct::CloseKey
                    }
                } else {
                    cur.bump();
                    if c == '{' {
                        Punct::LBrace
                    } else {
                        Punct::RBrace
                    }
                };
                tokens.push(Token {
                    kind: TokenKind::Punct(p),
                    span,
                });
            }
            c if c.is_ascii_alphabetic() => {
                let mut word = String::new();
                while let Some(c) = cur.peek() {
                    if !is_ident_continue(c) {
                        break;
                    }
                    word.push(c);
                    cur.bump();
                }
                // `resources-folder` is the only keyword containing a hyphen.
                if word == "resources" && cur.rest.starts_with("-folder") {
                    let after = cur.rest["-folder".len()..].chars().next();
                    if !after.is_some_and(is_ident_continue) {
                        for _ in 0.."-folder".len() {
                            cur.bump();
                        }
                        word.push_str("-folder");
                    }
                }
                let kind = match Keyword::from_word(&word) {
                    Some(k) => TokenKind::Keyword(k),
                    None => TokenKind::Ident(word),
                };
                tokens.push(Token { kind, span });
            }
            other => return Err(LexError::IllegalChar { found: other, span }),
        }
    }
    Ok(tokens)
}

fn lex_string(cur: &mut Cursor<'_>, start: Span) -> Result<String, LexError> {
    cur.bump();
    let mut value = String::new();
    loop {
        match cur.peek() {
            None | Some('\n') | Some('\r') => {
                return Err(LexError::UnterminatedString { span: start })
            }
            Some('"') => {
                cur.bump();
                return Ok(value);
            }
            Some('\\') => {
                let esc_span = cur.span();
                cur.bump();
                match cur.peek() {
                    Some(c @ ('"' | '\\')) => {
                        cur.bump();
                        value.push(c);
                    }
                    None | Some('\n') | Some('\r') => {
                        return Err(LexError::UnterminatedString { span: start })
                    }
                    Some(found) => {
                        return Err(LexError::InvalidEscape {
                            found,
                            span: esc_span,
                        })
                    }
                }
            }
            Some(c) => {
                cur.bump();
                value.push(c);
            }
        }
    }
}

/// Joins token lexemes with single spaces. Tokenizing the result yields the
/// same kinds and lexemes.
pub fn detokenize(tokens: &[Token]) -> String {
    tokens
        .iter()
        .map(Token::lexeme)
        .collect::<Vec<_>>()
        .join(" ")
}
