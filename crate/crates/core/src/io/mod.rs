//! File formats: run configs, dataset manifests, candidate and trace records,
//! checkpoints, and report output.
//!
//! Every input is JSON carrying `format_version` (currently 1). Unknown fields
//! are ignored. Reports are written as JSON or CSV with floats fixed at six
//! significant digits so identical runs produce identical bytes.

mod config;
mod image;
mod manifest;
mod records;
mod report;
mod validate;

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use thiserror::Error;

pub use self::image::decode_image;
pub use config::RunConfig;
pub use manifest::{load_items, load_manifest, Manifest, ManifestEntry, ManifestItem};
pub use records::{load_candidates, load_traces, CandidateRecord};
pub use report::{
    fmt_sig6, read_json_report, to_csv_bytes, to_json_bytes, write_report, Cell, ReportFormat, ReportRow,
};
pub use validate::{detect_kind, validate_path, DocumentKind};

use crate::metalearn::Checkpoint;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{}: parse error: {message}", path.display())]
    Parse { path: PathBuf, message: String },
    #[error("{}: schema violation at `{field}`: {message}", path.display())]
    SchemaViolation { path: PathBuf, field: String, message: String },
    #[error("missing file: {}", .0.display())]
    MissingFile(PathBuf),
    #[error("{}: unsupported image format", .0.display())]
    UnsupportedFormat(PathBuf),
    #[error("{}: corrupt image: {message}", path.display())]
    CorruptImage { path: PathBuf, message: String },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

impl IoError {
    pub(crate) fn schema(path: &Path, field: impl Into<String>, message: impl ToString) -> Self {
        IoError::SchemaViolation { path: path.to_path_buf(), field: field.into(), message: message.to_string() }
    }

    /// Whether the error describes bad input rather than an environment fault.
    pub fn is_validation(&self) -> bool {
        matches!(self, IoError::Parse { .. } | IoError::SchemaViolation { .. })
    }
}

pub(crate) fn read_text(path: &Path) -> Result<String, IoError> {
    match fs::read_to_string(path) {
        Ok(s) => Ok(s),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Err(IoError::MissingFile(path.to_path_buf())),
        Err(source) => Err(IoError::Io { path: path.to_path_buf(), source }),
    }
}

/// Deserialize with the JSON path of the first failing field in the error.
pub(crate) fn parse_json<T: DeserializeOwned>(path: &Path, text: &str) -> Result<T, IoError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|err| {
        let field = err.path().to_string();
        let inner = err.into_inner();
        if inner.is_data() {
            IoError::schema(path, field, inner)
        } else {
            IoError::Parse { path: path.to_path_buf(), message: inner.to_string() }
        }
    })
}

/// A file holding either one `T` or an array of them; the flag reports which.
pub(crate) fn read_one_or_many<T: DeserializeOwned>(path: &Path) -> Result<(Vec<T>, bool), IoError> {
    let text = read_text(path)?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| IoError::Parse { path: path.to_path_buf(), message: e.to_string() })?;
    let is_array = value.is_array();
    let data_error = |err: serde_path_to_error::Error<serde_json::Error>| {
        IoError::schema(path, err.path().to_string(), err.into_inner())
    };
    if is_array {
        serde_path_to_error::deserialize(&value).map(|v| (v, true)).map_err(data_error)
    } else {
        serde_path_to_error::deserialize(&value).map(|t| (vec![t], false)).map_err(data_error)
    }
}

pub(crate) fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, IoError> {
    parse_json(path, &read_text(path)?)
}

pub(crate) fn check_version(path: &Path, field: &str, version: Option<u32>) -> Result<(), IoError> {
    match version {
        None | Some(crate::FORMAT_VERSION) => Ok(()),
        Some(v) => Err(IoError::schema(path, field, format!("unsupported format_version {v}"))),
    }
}

pub(crate) fn write_bytes(path: &Path, bytes: &[u8]) -> Result<(), IoError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|source| IoError::Io { path: parent.to_path_buf(), source })?;
    }
    fs::write(path, bytes).map_err(|source| IoError::Io { path: path.to_path_buf(), source })
}

pub fn load_checkpoint(path: &Path) -> Result<Checkpoint, IoError> {
    let cp: Checkpoint = read_json(path)?;
    check_version(path, "format_version", Some(cp.format_version))?;
    for (i, e) in cp.entries.iter().enumerate() {
        if !(e.blended.is_finite() && e.blended >= 0.0) {
            return Err(IoError::schema(path, format!("entries[{i}].blended"), "must be a nonnegative number"));
        }
    }
    crate::metalearn::CumulativeParams::new(cp.alpha, cp.beta).map_err(|e| IoError::schema(path, "alpha", e))?;
    Ok(cp)
}

/// Pretty JSON with a trailing newline.
pub fn save_checkpoint(path: &Path, cp: &Checkpoint) -> Result<(), IoError> {
    let mut text = serde_json::to_string_pretty(cp).expect("checkpoint serializes");
    text.push('\n');
    write_bytes(path, text.as_bytes())
}
