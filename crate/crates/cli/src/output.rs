//! Structured errors and atomic artifact writing.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use serde::Serialize;

use crate::OutputArgs;

#[derive(Debug, Clone, Serialize)]
pub struct CliError {
    pub kind: String,
    pub module: String,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError {
            kind: "ConfigError".into(),
            module: "cli".into(),
            message: message.into(),
        }
    }
}

impl From<mcshane::Error> for CliError {
    fn from(e: mcshane::Error) -> Self {
        CliError {
            kind: e.kind().into(),
            module: e.module().into(),
            message: e.to_string(),
        }
    }
}

/// What a command produced, held in memory until everything succeeded.
pub struct Outcome {
    pub report: Option<serde_json::Value>,
    pub csv: Option<String>,
    pub passed: bool,
}

pub fn emit_error(e: &CliError) -> ExitCode {
    let doc = serde_json::json!({ "schema": 1, "error": e });
    eprintln!("{}", serde_json::to_string(&doc).unwrap_or_else(|_| e.message.clone()));
    ExitCode::from(2)
}

/// Writes through a sibling temporary file and renames it into place.
fn write_atomic(path: &Path, data: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| CliError::config(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(".{}.partial", name.to_string_lossy()));
    let io = |e: std::io::Error| CliError::from(mcshane::Error::from(e));
    fs::write(&tmp, data).map_err(io)?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        io(e)
    })
}

pub fn write_outcome(o: &Outcome, args: &OutputArgs) -> Result<(), CliError> {
    let report = match &o.report {
        Some(r) => {
            let mut text = serde_json::to_string_pretty(r).map_err(|e| CliError::from(mcshane::Error::from(e)))?;
            text.push('\n');
            Some(text)
        }
        None => None,
    };
    let mut stdout = std::io::stdout().lock();
    let io = |e: std::io::Error| CliError::from(mcshane::Error::from(e));
    match (&o.csv, &args.csv) {
        (Some(csv), Some(path)) => write_atomic(path, csv.as_bytes())?,
        // CSV-only commands fall back to --out, then stdout
        (Some(csv), None) if report.is_none() => match &args.out {
            Some(path) => write_atomic(path, csv.as_bytes())?,
            None => stdout.write_all(csv.as_bytes()).map_err(io)?,
        },
        _ => {}
    }
    if let Some(text) = report {
        match &args.out {
            Some(path) => write_atomic(path, text.as_bytes())?,
            None => stdout.write_all(text.as_bytes()).map_err(io)?,
        }
    }
    Ok(())
}
