//! `smgen` command-line front end.
//!
//! Diagnostics and errors go to stderr; manifests and summaries go to
//! stdout. Exit codes: 0 success, 1 invalid input, 2 I/O or internal
//! failure.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::codegen::{self, CodegenError};
use crate::dsl::{self, Mode, SmModel};
use crate::protocol::{store_path, NodeId};
use crate::simnet::{self, LoadError, MetricsReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    Invalid = 1,
    Failure = 2,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Parser)]
#[command(name = "smgen", version, about = "SocialMANET specification toolchain")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a .sm file and print its diagnostics.
    Validate {
        file: PathBuf,
        /// Accept any two-letter language code.
        #[arg(long)]
        permissive: bool,
    },
    /// Generate subject XML, values files and conf.properties.
    Generate {
        file: PathBuf,
        #[arg(long)]
        resources: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        permissive: bool,
    },
    /// Run a scenario and write its delivery metrics.
    Simulate {
        file: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Run a scenario and dump one node's final store as files.
    ExportStore {
        file: PathBuf,
        #[arg(long)]
        node: u32,
        #[arg(long)]
        out: PathBuf,
    },
}

fn mode(permissive: bool) -> Mode {
    if permissive {
        Mode::Permissive
    } else {
        Mode::Strict
    }
}

/// Executes one parsed command line.
pub fn execute(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> ExitStatus {
    match cli.command {
        Command::Validate { file, permissive } => cmd_validate(&file, mode(permissive), stderr),
        Command::Generate {
            file,
            resources,
            out,
            permissive,
        } => cmd_generate(&file, &resources, &out, mode(permissive), stdout, stderr),
        Command::Simulate { file, out, csv } => cmd_simulate(&file, &out, csv.as_deref(), stdout, stderr),
        Command::ExportStore { file, node, out } => cmd_export_store(&file, node, &out, stderr),
    }
}

/// Reads, parses and validates a `.sm` file, printing diagnostics.
fn load_model(path: &Path, mode: Mode, stderr: &mut dyn Write) -> Result<SmModel, ExitStatus> {
    let source = match fs::read_to_string(path) {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}: {e}", path.display());
            return Err(ExitStatus::Failure);
        }
    };
    let model = match dsl::parse(&source) {
        Ok(m) => m,
        Err(diags) => {
            for d in diags {
                let _ = writeln!(stderr, "{d}");
            }
            return Err(ExitStatus::Invalid);
        }
    };
    let diags = dsl::validate(&model, mode);
    for d in &diags {
        let _ = writeln!(stderr, "{d}");
    }
    if dsl::has_errors(&diags) {
        Err(ExitStatus::Invalid)
    } else {
        Ok(model)
    }
}

pub fn cmd_validate(path: &Path, mode: Mode, stderr: &mut dyn Write) -> ExitStatus {
    match load_model(path, mode, stderr) {
        Ok(_) => ExitStatus::Success,
        Err(status) => status,
    }
}

pub fn cmd_generate(
    path: &Path,
    resources: &Path,
    out: &Path,
    mode: Mode,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> ExitStatus {
    let model = match load_model(path, mode, stderr) {
        Ok(m) => m,
        Err(status) => return status,
    };
    match codegen::generate(&model, resources, out) {
        Ok(manifest) => {
            for (lang, keys) in &manifest.defaulted_labels {
                let _ = writeln!(stderr, "warning: {lang}: defaulted labels {}", keys.join(", "));
            }
            for entry in &manifest.files {
                let _ = writeln!(stdout, "{}", entry.path);
            }
            ExitStatus::Success
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            codegen_status(&e)
        }
    }
}

fn codegen_status(e: &CodegenError) -> ExitStatus {
    if e.is_input_error() {
        ExitStatus::Invalid
    } else {
        ExitStatus::Failure
    }
}

fn load_error(e: LoadError, stderr: &mut dyn Write) -> ExitStatus {
    let _ = writeln!(stderr, "error: {e}");
    match e {
        LoadError::Io { .. } => ExitStatus::Failure,
        LoadError::Config(_) => ExitStatus::Invalid,
    }
}

pub fn cmd_simulate(
    path: &Path,
    out_json: &Path,
    out_csv: Option<&Path>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> ExitStatus {
    let (config, h) = match simnet::load_scenario(path) {
        Ok(loaded) => loaded,
        Err(e) => return load_error(e, stderr),
    };
    let report = match simnet::run(&config, &h) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return ExitStatus::Invalid;
        }
    };
    if let Err(e) = write_report(&report, out_json, out_csv) {
        let _ = writeln!(stderr, "error: {e}");
        return ExitStatus::Failure;
    }
    let _ = writeln!(stdout, "{}", report.summary_line());
    ExitStatus::Success
}

fn write_report(report: &MetricsReport, out_json: &Path, out_csv: Option<&Path>) -> Result<(), String> {
    fs::write(out_json, report.to_json()).map_err(|e| format!("{}: {e}", out_json.display()))?;
    if let Some(csv_path) = out_csv {
        let file = fs::File::create(csv_path).map_err(|e| format!("{}: {e}", csv_path.display()))?;
        report
            .write_csv(file)
            .map_err(|e| format!("{}: {e}", csv_path.display()))?;
    }
    Ok(())
}

pub fn cmd_export_store(path: &Path, node: u32, out: &Path, stderr: &mut dyn Write) -> ExitStatus {
    let (config, h) = match simnet::load_scenario(path) {
        Ok(loaded) => loaded,
        Err(e) => return load_error(e, stderr),
    };
    let id = NodeId(node);
    if !config.nodes.iter().any(|n| n.id == node) {
        let _ = writeln!(stderr, "error: unknown node {id}");
        return ExitStatus::Invalid;
    }
    let world = match simnet::simulate(&config, &h) {
        Ok(w) => w,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return ExitStatus::Invalid;
        }
    };
    let store = &world.nodes[&id].state.store;

    let write = || -> std::io::Result<()> {
        fs::create_dir_all(out)?;
        for publication in store.values() {
            let rel = store_path(&h, publication).map_err(std::io::Error::other)?;
            let target = out.join(rel);
            if let Some(dir) = target.parent() {
                fs::create_dir_all(dir)?;
            }
            fs::write(target, &publication.payload)?;
        }
        Ok(())
    };
    match write() {
        Ok(()) => ExitStatus::Success,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}: {e}", out.display());
            ExitStatus::Failure
        }
    }
}
