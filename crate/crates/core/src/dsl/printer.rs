//! Canonical formatter for `.sm` models.

use std::fmt::Write;

use super::ast::{SmModel, SubjectDecl, TextValue};
use super::lexer::quote;

const INDENT: &str = "    ";

/// Renders `model` in canonical form: one field per line, four spaces per
/// nesting level, keys written as `{{ "key" }}`.
pub fn pretty_print(model: &SmModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "Begin SMANet Application {}", model.app_name);
    out.push_str("Begin Resources\n");
    let _ = writeln!(
        out,
        "{INDENT}resources-folder : {}",
        quote(&model.resources_folder)
    );
    for (i, res) in model.resources.iter().enumerate() {
        let sep = if i + 1 < model.resources.len() { "," } else { "" };
        let _ = writeln!(out, "{INDENT}{{");
        let _ = writeln!(out, "{INDENT}{INDENT}language : {}", res.language);
        let _ = writeln!(out, "{INDENT}{INDENT}filename : {}", quote(&res.filename));
        let _ = writeln!(out, "{INDENT}}}{sep}");
    }
    out.push_str("End\n");
    out.push_str("Begin Hierarchy\n");
    write_subjects(&mut out, &model.hierarchy, 1);
    out.push_str("End\n");
    out.push_str("End\n");
    out
}

fn write_subjects(out: &mut String, subjects: &[SubjectDecl], level: usize) {
    for (i, subject) in subjects.iter().enumerate() {
        let sep = if i + 1 < subjects.len() { "," } else { "" };
        write_subject(out, subject, level, sep);
    }
}

fn write_subject(out: &mut String, subject: &SubjectDecl, level: usize, sep: &str) {
    let pad = INDENT.repeat(level);
    let _ = writeln!(out, "{pad}{{");
    let _ = writeln!(out, "{pad}{INDENT}id : {}", subject.code);
    let _ = writeln!(out, "{pad}{INDENT}name : {}", text(&subject.name));
    let _ = writeln!(out, "{pad}{INDENT}desc : {}", text(&subject.description));
    if !subject.sons.is_empty() {
        let _ = writeln!(out, "{pad}{INDENT}sons : [");
        write_subjects(out, &subject.sons, level + 2);
        let _ = writeln!(out, "{pad}{INDENT}]");
    }
    let _ = writeln!(out, "{pad}}}{sep}");
}

fn text(value: &TextValue) -> String {
    if value.is_key {
        format!("{{{{ {} }}}}", quote(&value.raw))
    } else {
        quote(&value.raw)
    }
}
