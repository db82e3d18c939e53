//! Resource generation: subject XML files, per-language value files and the
//! compiler configuration, with `{{key}}` substitution from language files.
//!
//! Output layout under the chosen directory:
//!
//! ```text
//! raw/subjects.xml            keys left as {{key}}
//! raw/subjects_<xx>.xml       one per language, keys substituted
//! values-<xx>/strings.xml     one per language
//! compiler/conf.properties
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::dsl::{LanguageCode, SmModel, TextValue};
use crate::topic::{NodeHandle, TopicError, TopicHierarchy};

#[derive(Debug, Error)]
pub enum CodegenError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Format {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("cannot read language file {path}: {source}")]
    LanguageFileUnreadable {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("key '{key}' is not defined for language '{language}'")]
    MissingKey { key: String, language: String },
    #[error(transparent)]
    Topic(#[from] TopicError),
}

impl CodegenError {
    fn io(path: &Path, source: io::Error) -> Self {
        CodegenError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// Whether the failure comes from the inputs (bad files, missing keys)
    /// rather than from the filesystem.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, CodegenError::Io { .. })
    }
}

/// Translations for one language.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LanguageFile {
    pub language: LanguageCode,
    pub entries: BTreeMap<String, String>,
}

impl LanguageFile {
    pub fn empty(language: LanguageCode) -> Self {
        Self {
            language,
            entries: BTreeMap::new(),
        }
    }

    /// Parses `key=value` lines. Blank lines and lines starting with `#`
    /// are ignored. Keys are trimmed and must be non-empty without inner
    /// whitespace; values are taken verbatim.
    pub fn parse(language: LanguageCode, path: &Path, text: &str) -> Result<Self, CodegenError> {
        let mut entries = BTreeMap::new();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let trimmed = line.trim_start();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let format_err = |message: String| CodegenError::Format {
                path: path.to_path_buf(),
                line: line_no,
                message,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format_err("expected 'key=value'".into()))?;
            let key = key.trim();
            if key.is_empty() {
                return Err(format_err("empty key".into()));
            }
            if key.chars().any(char::is_whitespace) {
                return Err(format_err(format!("key '{key}' contains whitespace")));
            }
            if entries.insert(key.to_string(), value.to_string()).is_some() {
                return Err(format_err(format!("duplicate key '{key}'")));
            }
        }
        Ok(Self { language, entries })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }
}

pub fn load_language_file(path: &Path, language: LanguageCode) -> Result<LanguageFile, CodegenError> {
    let text = fs::read_to_string(path).map_err(|e| CodegenError::io(path, e))?;
    LanguageFile::parse(language, path, &text)
}

/// Resolves a name or description against a language file.
pub fn substitute(text: &TextValue, lf: &LanguageFile) -> Result<String, CodegenError> {
    if !text.is_key {
        return Ok(text.raw.clone());
    }
    lf.get(&text.raw)
        .map(str::to_string)
        .ok_or_else(|| CodegenError::MissingKey {
            key: text.raw.clone(),
            language: lf.language.to_string(),
        })
}

fn escape_into(out: &mut String, value: &str) {
    for c in value.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            c => out.push(c),
        }
    }
}

fn escape(value: &str) -> String {
    let mut out = String::with_capacity(value.len());
    escape_into(&mut out, value);
    out
}

/// Renders the hierarchy as nested `<subject>` elements under `<subjects>`.
/// Without a language file keyed values stay in `{{key}}` form.
pub fn emit_subjects_xml(h: &TopicHierarchy, lf: Option<&LanguageFile>) -> Result<String, CodegenError> {
    let resolve = |t: &TextValue| match lf {
        Some(lf) => substitute(t, lf),
        None => Ok(t.to_string()),
    };

    enum Visit {
        Open(NodeHandle),
        Close,
    }

    let mut out = String::from("<subjects>");
    let mut stack: Vec<Visit> = h.roots().iter().rev().map(|r| Visit::Open(*r)).collect();
    while let Some(visit) = stack.pop() {
        let handle = match visit {
            Visit::Close => {
                out.push_str("</subject>");
                continue;
            }
            Visit::Open(handle) => handle,
        };
        let node = h.node(handle);
        out.push_str("<subject code=\"");
        escape_into(&mut out, &node.code);
        out.push_str("\" name=\"");
        escape_into(&mut out, &resolve(&node.name)?);
        out.push_str("\" desc=\"");
        escape_into(&mut out, &resolve(&node.description)?);
        if node.children.is_empty() {
            out.push_str("\"/>");
        } else {
            out.push_str("\">");
            stack.push(Visit::Close);
            stack.extend(node.children.iter().rev().map(|c| Visit::Open(*c)));
        }
    }
    out.push_str("</subjects>");
    Ok(out)
}

/// Label keys every generated application expects in its values file.
pub const LABELS: [&str; 4] = [
    "app_name",
    "publish_action",
    "subscribe_action",
    "notification_title",
];

fn default_label(model: &SmModel, key: &str) -> String {
    match key {
        "app_name" => model.app_name.clone(),
        "publish_action" => "Publish".into(),
        "subscribe_action" => "Subscribe".into(),
        "notification_title" => "New publication".into(),
        _ => String::new(),
    }
}

/// A rendered values file plus the labels that fell back to defaults.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValuesDocument {
    pub xml: String,
    pub defaulted: Vec<&'static str>,
}

pub fn emit_values(model: &SmModel, lf: &LanguageFile) -> ValuesDocument {
    let mut xml = String::from("<?xml version=\"1.0\" encoding=\"utf-8\"?>\n<resources>\n");
    let mut defaulted = Vec::new();
    for key in LABELS {
        let value = match lf.get(key) {
            Some(v) => v.to_string(),
            None => {
                defaulted.push(key);
                default_label(model, key)
            }
        };
        let _ = writeln!(xml, "    <string name=\"{key}\">{}</string>", escape(&value));
    }
    xml.push_str("</resources>\n");
    ValuesDocument { xml, defaulted }
}

/// `appName`, `languages` and `resourcesFolder`, LF-terminated.
pub fn emit_conf_properties(model: &SmModel) -> String {
    let languages: Vec<&str> = model.languages().map(LanguageCode::as_str).collect();
    format!(
        "appName={}\nlanguages={}\nresourcesFolder={}\n",
        model.app_name,
        languages.join(","),
        model.resources_folder
    )
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    /// Relative to the output root, `/`-separated.
    pub path: String,
    pub len: u64,
    /// Lowercase hex SHA-256 of the contents.
    pub sha256: String,
}

/// Labels that fell back to defaults, per language.
pub type DefaultedLabels = Vec<(LanguageCode, Vec<&'static str>)>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenerationManifest {
    pub output_root: PathBuf,
    pub files: Vec<ManifestEntry>,
    /// Per-language labels that fell back to built-in defaults.
    pub defaulted_labels: DefaultedLabels,
}

/// Computes every output file in memory. Nothing touches the disk except
/// reading the language files.
pub fn render(
    model: &SmModel,
    resources_dir: &Path,
) -> Result<(Vec<(String, String)>, DefaultedLabels), CodegenError> {
    let h = TopicHierarchy::from_model(model)?;
    let mut languages = Vec::new();
    for res in &model.resources {
        let path = resources_dir.join(&res.filename);
        let lf = load_language_file(&path, res.language.clone()).map_err(|e| match e {
            CodegenError::Io { path, source } => CodegenError::LanguageFileUnreadable { path, source },
            other => other,
        })?;
        languages.push(lf);
    }

    let mut files = vec![("raw/subjects.xml".to_string(), emit_subjects_xml(&h, None)?)];
    for lf in &languages {
        files.push((
            format!("raw/subjects_{}.xml", lf.language),
            emit_subjects_xml(&h, Some(lf))?,
        ));
    }
    let mut defaulted = Vec::new();
    for lf in &languages {
        let doc = emit_values(model, lf);
        files.push((format!("values-{}/strings.xml", lf.language), doc.xml));
        if !doc.defaulted.is_empty() {
            defaulted.push((lf.language.clone(), doc.defaulted));
        }
    }
    files.push(("compiler/conf.properties".into(), emit_conf_properties(model)));
    Ok((files, defaulted))
}

/// Generates all resources for `model` into `out_dir`.
///
/// All content is rendered before anything is written. Files are then
/// written to a staging directory inside `out_dir` (or to a fresh
/// `out_dir`) and moved into place, so on error `out_dir` is left as it
/// was.
pub fn generate(model: &SmModel, resources_dir: &Path, out_dir: &Path) -> Result<GenerationManifest, CodegenError> {
    let (files, defaulted_labels) = render(model, resources_dir)?;

    let entries = files
        .iter()
        .map(|(path, content)| ManifestEntry {
            path: path.clone(),
            len: content.len() as u64,
            sha256: hex::encode(Sha256::digest(content.as_bytes())),
        })
        .collect();

    if out_dir.exists() {
        let staging = out_dir.join(STAGING_DIR);
        let result = write_all(&files, &staging).and_then(|()| move_into(&files, &staging, out_dir));
        let _ = fs::remove_dir_all(&staging);
        result?;
    } else if let Err(e) = write_all(&files, out_dir) {
        let _ = fs::remove_dir_all(out_dir);
        return Err(e);
    }

    Ok(GenerationManifest {
        output_root: out_dir.to_path_buf(),
        files: entries,
        defaulted_labels,
    })
}

const STAGING_DIR: &str = ".smgen-staging";

fn write_all(files: &[(String, String)], root: &Path) -> Result<(), CodegenError> {
    for (rel, content) in files {
        let path = root.join(rel);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).map_err(|e| CodegenError::io(dir, e))?;
        }
        fs::write(&path, content).map_err(|e| CodegenError::io(&path, e))?;
    }
    Ok(())
}

fn move_into(files: &[(String, String)], staging: &Path, out_dir: &Path) -> Result<(), CodegenError> {
    for (rel, _) in files {
        let to = out_dir.join(rel);
        if let Some(dir) = to.parent() {
            fs::create_dir_all(dir).map_err(|e| CodegenError::io(dir, e))?;
        }
        fs::rename(staging.join(rel), &to).map_err(|e| CodegenError::io(&to, e))?;
    }
    Ok(())
}
