//! The `.sm` specification language: tokenizer, parser, semantic
//! validation and canonical printer.

mod ast;
mod lexer;
mod parser;
mod printer;
mod validate;

pub use ast::{
    Diagnostic, LanguageCode, ResourceDecl, Severity, SmModel, Span, SubjectDecl, SubjectIter,
    TextValue,
};
pub use lexer::{detokenize, quote, tokenize, Keyword, LexError, Punct, Token, TokenKind};
pub use parser::{parse, MAX_DEPTH};
pub use printer::pretty_print;
pub use validate::{has_errors, validate, Mode};
