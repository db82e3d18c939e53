//! Recursive-descent parser for `.sm` files.
//!
//! ```text
//! Model     := 'Begin' 'SMANet' 'Application' ID
//!              'Begin' 'Resources'
//!                  'resources-folder' ':' STRING
//!                  Resource (',' Resource)*
//!              'End'
//!              Hierarchy
//!              'End'
//! Resource  := '{' 'language' ':' ID 'filename' ':' STRING '}'
//! Hierarchy := 'Begin' 'Hierarchy' Subject (',' Subject)* 'End'
//! Subject   := '{' 'id' ':' ID
//!                  'name' ':' Text
//!                  'desc' ':' Text
//!                  ('sons' ':' '[' Subject (',' Subject)* ']')?
//!              '}'
//! Text      := STRING | '{{' STRING '}}'
//! ```
//!
//! On a syntax error the parser records a diagnostic, skips ahead to the
//! next `}` or `End`, and keeps going so that one pass reports as many
//! errors as it can.

use super::ast::{Diagnostic, LanguageCode, ResourceDecl, SmModel, Span, SubjectDecl, TextValue};
use super::lexer::{tokenize, Keyword, Punct, Token, TokenKind};

/// Marker for "a diagnostic was already recorded".
struct Failed;

type PResult<T> = Result<T, Failed>;

#[derive(Debug, Clone, Copy)]
enum Expected {
    Kw(Keyword),
    P(Punct),
    Ident,
    Str,
    Text,
}

impl Expected {
    fn describe(self) -> String {
        match self {
            Expected::Kw(k) => format!("'{}'", k.as_str()),
            Expected::P(p) => format!("'{}'", p.as_str()),
            Expected::Ident => "identifier".into(),
            Expected::Str => "string".into(),
            Expected::Text => "string or '{{'".into(),
        }
    }
}

/// Deepest `sons` nesting accepted before giving up on a subject.
pub const MAX_DEPTH: usize = 256;

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    depth: usize,
    eof_span: Span,
    diags: Vec<Diagnostic>,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_span(&self) -> Span {
        self.peek().map_or(self.eof_span, |t| t.span)
    }

    fn at_kw(&self, kw: Keyword) -> bool {
        matches!(self.peek(), Some(Token { kind: TokenKind::Keyword(k), .. }) if *k == kw)
    }

    fn at_punct(&self, p: Punct) -> bool {
        matches!(self.peek(), Some(Token { kind: TokenKind::Punct(q), .. }) if *q == p)
    }

    fn fail<T>(&mut self, expected: Expected) -> PResult<T> {
        let found = match self.peek() {
            Some(t) => t.kind.to_string(),
            None => "end of input".to_string(),
        };
        let span = self.peek_span();
        self.diags.push(Diagnostic::error(
            span,
            format!("expected {}, found {}", expected.describe(), found),
        ));
        Err(Failed)
    }

    fn keyword(&mut self, kw: Keyword) -> PResult<Span> {
        if self.at_kw(kw) {
            let span = self.peek_span();
            self.pos += 1;
            Ok(span)
        } else {
            self.fail(Expected::Kw(kw))
        }
    }

    fn punct(&mut self, p: Punct) -> PResult<Span> {
        if self.at_punct(p) {
            let span = self.peek_span();
            self.pos += 1;
            Ok(span)
        } else {
            self.fail(Expected::P(p))
        }
    }

    fn ident(&mut self) -> PResult<(String, Span)> {
        match self.peek() {
            Some(Token {
                kind: TokenKind::Ident(s),
                span,
            }) => {
                let out = (s.clone(), *span);
                self.pos += 1;
                Ok(out)
            }
            _ => self.fail(Expected::Ident),
        }
    }

    fn string(&mut self) -> PResult<(String, Span)> {
        match self.peek() {
            Some(Token {
                kind: TokenKind::Str(s),
                span,
            }) => {
                let out = (s.clone(), *span);
                self.pos += 1;
                Ok(out)
            }
            _ => self.fail(Expected::Str),
        }
    }

    /// `field ':'`
    fn field(&mut self, kw: Keyword) -> PResult<()> {
        self.keyword(kw)?;
        self.punct(Punct::Colon)?;
        Ok(())
    }

    /// Skips to the next `}` (consumed) or `End` (left in place).
    fn recover(&mut self) {
        while let Some(tok) = self.peek() {
            match tok.kind {
                TokenKind::Punct(Punct::RBrace) => {
                    self.pos += 1;
                    return;
                }
                TokenKind::Keyword(Keyword::End) => return,
                _ => self.pos += 1,
            }
        }
    }

    /// Skips past the next `End`.
    fn recover_section(&mut self) {
        while let Some(tok) = self.peek() {
            let is_end = tok.kind == TokenKind::Keyword(Keyword::End);
            self.pos += 1;
            if is_end {
                return;
            }
        }
    }

    fn model(&mut self) -> SmModel {
        let (app_name, app_name_span) = self.header().unwrap_or_else(|_| {
            // Resynchronize on the resources section.
            while self.peek().is_some() && !self.at_kw(Keyword::Begin) {
                self.pos += 1;
            }
            (String::new(), Span::default())
        });

        let (resources_folder, resources_folder_span, resources) =
            self.resources_section().unwrap_or_else(|_| {
                self.recover_section();
                (String::new(), Span::default(), Vec::new())
            });

        let hierarchy = self.hierarchy().unwrap_or_else(|_| {
            self.recover_section();
            Vec::new()
        });

        if self.keyword(Keyword::End).is_ok() && self.peek().is_some() {
            let span = self.peek_span();
            let found = self.peek().map(|t| t.kind.to_string()).unwrap_or_default();
            self.diags.push(Diagnostic::error(
                span,
                format!("expected end of input, found {found}"),
            ));
        }

        SmModel {
            app_name,
            app_name_span,
            resources_folder,
            resources_folder_span,
            resources,
            hierarchy,
        }
    }

    fn header(&mut self) -> PResult<(String, Span)> {
        self.keyword(Keyword::Begin)?;
        self.keyword(Keyword::SMANet)?;
        self.keyword(Keyword::Application)?;
        self.ident()
    }

    fn resources_section(&mut self) -> PResult<(String, Span, Vec<ResourceDecl>)> {
        self.keyword(Keyword::Begin)?;
        self.keyword(Keyword::Resources)?;
        self.field(Keyword::ResourcesFolder)?;
        let (folder, folder_span) = self.string()?;
        let resources = self.comma_list(Self::resource);
        self.keyword(Keyword::End)?;
        Ok((folder, folder_span, resources))
    }

    fn hierarchy(&mut self) -> PResult<Vec<SubjectDecl>> {
        self.keyword(Keyword::Begin)?;
        self.keyword(Keyword::Hierarchy)?;
        let subjects = self.comma_list(Self::subject);
        self.keyword(Keyword::End)?;
        Ok(subjects)
    }

    /// `Item (',' Item)*`, recovering inside each item. Items that failed
    /// to parse are left out of the result.
    fn comma_list<T>(&mut self, mut item: impl FnMut(&mut Self) -> PResult<T>) -> Vec<T> {
        let mut items = Vec::new();
        loop {
            match item(self) {
                Ok(v) => items.push(v),
                Err(Failed) => self.recover(),
            }
            if self.at_punct(Punct::Comma) {
                self.pos += 1;
            } else {
                return items;
            }
        }
    }

    fn resource(&mut self) -> PResult<ResourceDecl> {
        let span = self.punct(Punct::LBrace)?;
        self.field(Keyword::Language)?;
        let (lang, _) = self.ident()?;
        self.field(Keyword::Filename)?;
        let (filename, _) = self.string()?;
        self.punct(Punct::RBrace)?;
        Ok(ResourceDecl {
            language: LanguageCode::new(lang),
            filename,
            span,
        })
    }

    fn subject(&mut self) -> PResult<SubjectDecl> {
        self.punct(Punct::LBrace)?;
        self.field(Keyword::Id)?;
        let (code, span) = self.ident()?;
        self.field(Keyword::Name)?;
        let name = self.text()?;
        self.field(Keyword::Desc)?;
        let description = self.text()?;
        let mut sons = Vec::new();
        if self.at_kw(Keyword::Sons) {
            self.field(Keyword::Sons)?;
            let open = self.punct(Punct::LBracket)?;
            if self.depth >= MAX_DEPTH {
                self.diags.push(Diagnostic::error(
                    open,
                    format!("subjects nested deeper than {MAX_DEPTH} levels"),
                ));
                return Err(Failed);
            }
            self.depth += 1;
            sons = self.comma_list(Self::subject);
            self.depth -= 1;
            self.punct(Punct::RBracket)?;
        }
        self.punct(Punct::RBrace)?;
        Ok(SubjectDecl {
            code,
            name,
            description,
            sons,
            span,
        })
    }

    fn text(&mut self) -> PResult<TextValue> {
        if self.at_punct(Punct::OpenKey) {
            let span = self.peek_span();
            self.pos += 1;
            let (raw, _) = self.string()?;
            self.punct(Punct::CloseKey)?;
            Ok(TextValue {
                raw,
                is_key: true,
                span,
            })
        } else if matches!(self.peek(), Some(Token { kind: TokenKind::Str(_), .. })) {
            let (raw, span) = self.string()?;
            Ok(TextValue {
                raw,
                is_key: false,
                span,
            })
        } else {
            self.fail(Expected::Text)
        }
    }
}

fn end_span(source: &str) -> Span {
    let line = source.matches('\n').count() as u32 + 1;
    let last = source.rsplit('\n').next().unwrap_or("");
    Span::new(line, last.chars().count() as u32 + 1)
}

/// Parses a complete `.sm` source. On failure returns every syntax error
/// found (at least one).
pub fn parse(source: &str) -> Result<SmModel, Vec<Diagnostic>> {
    let tokens = tokenize(source).map_err(|e| vec![Diagnostic::error(e.span(), e.to_string())])?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        depth: 0,
        eof_span: end_span(source),
        diags: Vec::new(),
    };
    let model = parser.model();
    if parser.diags.is_empty() {
        Ok(model)
    } else {
        Err(parser.diags)
    }
}
