//! Output destinations and number formatting.

use std::io::Write;
use std::path::{Path, PathBuf};

use vlab_core::format::{fmt_sig, json_number};

use crate::args::{Common, Format};
use crate::error::CliError;
use crate::settings::Settings;

/// Significant digits of CSV and JSON numbers.
pub const DIGITS: usize = 12;

pub fn num(x: f64) -> serde_json::Value {
    json_number(x)
}

pub fn csv(x: f64) -> String {
    fmt_sig(x, DIGITS)
}

/// Resolved output file (or standard output) and format.
#[derive(Debug, Clone)]
pub struct Output {
    pub path: Option<PathBuf>,
    pub format: Format,
}

fn format_of(path: &Path) -> Option<Format> {
    match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
        "csv" => Some(Format::Csv),
        "json" => Some(Format::Json),
        "svg" => Some(Format::Svg),
        _ => None,
    }
}

/// Fails unless the directory that will receive `path` exists.
pub fn check_writable(path: &Path) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    if !dir.is_dir() {
        return Err(CliError::validation(format!("output directory {} does not exist", dir.display())));
    }
    if path.is_dir() {
        return Err(CliError::validation(format!("output path {} is a directory", path.display())));
    }
    Ok(())
}

impl Output {
    pub fn resolve(settings: &Settings, common: &Common, default: Format, allowed: &[Format]) -> Result<Self, CliError> {
        let path: Option<PathBuf> = settings.value("out", common.out.clone())?;
        let format = match settings.value("format", common.format)? {
            Some(f) => f,
            None => path.as_deref().and_then(format_of).unwrap_or(default),
        };
        if !allowed.contains(&format) {
            return Err(CliError::validation(format!("format {format:?} is not supported by this subcommand")));
        }
        if let Some(p) = &path {
            check_writable(p)?;
        }
        Ok(Self { path, format })
    }

    pub fn write(&self, text: &str) -> Result<(), CliError> {
        match &self.path {
            Some(p) => write_file(p, text),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes())
                    .and_then(|_| out.flush())
                    .map_err(|e| CliError::validation(format!("cannot write to standard output: {e}")))
            }
        }
    }

    pub fn write_json(&self, doc: &serde_json::Value) -> Result<(), CliError> {
        self.write(&json_text(doc))
    }
}

pub fn json_text(doc: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("JSON values always serialize");
    s.push('\n');
    s
}

pub fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::validation(format!("cannot write {}: {e}", path.display())))
}
