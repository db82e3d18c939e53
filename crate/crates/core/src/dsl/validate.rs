//! Semantic checks the grammar cannot express.

use std::collections::BTreeMap;

use super::ast::{Diagnostic, SmModel, Span, TextValue};

/// Which language codes are acceptable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    /// Only the grammar's own codes (`en`, `fr`).
    #[default]
    Strict,
    /// Any lowercase two-letter code.
    Permissive,
}

/// Returns every semantic problem in `model`. An empty result, or one
/// holding only warnings, means the model is usable for generation.
pub fn validate(model: &SmModel, mode: Mode) -> Vec<Diagnostic> {
    let mut diags = Vec::new();

    let mut languages: BTreeMap<&str, Vec<Span>> = BTreeMap::new();
    for res in &model.resources {
        let code = res.language.as_str();
        languages.entry(code).or_default().push(res.span);
        let accepted = match mode {
            Mode::Strict => res.language.is_strict(),
            Mode::Permissive => res.language.is_well_formed(),
        };
        if !accepted {
            let why = match mode {
                Mode::Strict => "not in grammar",
                Mode::Permissive => "is not a two-letter lowercase code",
            };
            diags.push(Diagnostic::error(
                res.span,
                format!("language '{code}' {why}"),
            ));
        }
    }
    for (code, spans) in &languages {
        if spans.len() > 1 {
            diags.push(duplicate(spans, format!("duplicate language '{code}'")));
        }
    }

    let mut codes: BTreeMap<&str, Vec<Span>> = BTreeMap::new();
    for subject in model.subjects() {
        codes.entry(subject.code.as_str()).or_default().push(subject.span);
        check_text(&subject.name, "name", &subject.code, &mut diags);
        check_text(&subject.description, "description", &subject.code, &mut diags);
        if !subject.description.is_key && subject.description.raw.is_empty() {
            diags.push(Diagnostic::warning(
                subject.description.span,
                format!("subject '{}' has an empty description", subject.code),
            ));
        }
    }
    for (code, spans) in &codes {
        if spans.len() > 1 {
            diags.push(duplicate(spans, format!("duplicate subject code '{code}'")));
        }
    }

    diags.sort_by_key(|d| d.span);
    diags
}

/// One diagnostic per duplicated name, positioned at the second
/// occurrence and citing every location.
fn duplicate(spans: &[Span], what: String) -> Diagnostic {
    let all: Vec<String> = spans.iter().map(Span::to_string).collect();
    Diagnostic::error(spans[1], format!("{what} (declared at {})", all.join(", ")))
}

fn check_text(text: &TextValue, field: &str, code: &str, diags: &mut Vec<Diagnostic>) {
    if !text.is_key {
        return;
    }
    if text.raw.is_empty() {
        diags.push(Diagnostic::error(
            text.span,
            format!("subject '{code}' has an empty {field} key"),
        ));
    } else if text.raw.contains("{{") || text.raw.contains("}}") {
        diags.push(Diagnostic::error(
            text.span,
            format!("subject '{code}' {field} key must not contain '{{{{' or '}}}}'"),
        ));
    }
}

/// True when `diags` holds at least one error.
pub fn has_errors(diags: &[Diagnostic]) -> bool {
    diags.iter().any(Diagnostic::is_error)
}
