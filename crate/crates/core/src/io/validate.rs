use std::fmt;
use std::path::Path;

use serde_json::{Map, Value};

use super::{load_candidates, load_checkpoint, load_items, load_manifest, load_traces, read_text, IoError, RunConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DocumentKind {
    Manifest,
    Trace,
    Candidate,
    Checkpoint,
    Config,
}

impl fmt::Display for DocumentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DocumentKind::Manifest => "manifest",
            DocumentKind::Trace => "trace",
            DocumentKind::Candidate => "candidate",
            DocumentKind::Checkpoint => "checkpoint",
            DocumentKind::Config => "config",
        })
    }
}

const CONFIG_KEYS: [&str; 9] =
    ["channel", "budget", "eosl", "cumulative", "similarity_metric", "bleu", "ssim_window", "round_sizes", "seed"];

fn kind_of_object(obj: &Map<String, Value>) -> Option<DocumentKind> {
    if obj.contains_key("items") {
        Some(DocumentKind::Manifest)
    } else if obj.contains_key("entries") {
        Some(DocumentKind::Checkpoint)
    } else if obj.contains_key("samples") {
        Some(DocumentKind::Trace)
    } else if obj.contains_key("caption") {
        Some(DocumentKind::Candidate)
    } else if obj.keys().all(|k| k == "format_version" || k == "manifest")
        || CONFIG_KEYS.iter().any(|k| obj.contains_key(*k))
    {
        Some(DocumentKind::Config)
    } else {
        None
    }
}

/// Guess what a JSON document is from its top-level keys. Arrays are judged
/// by their first element.
pub fn detect_kind(value: &Value) -> Option<DocumentKind> {
    match value {
        Value::Object(obj) => kind_of_object(obj),
        Value::Array(items) => match items.first()? {
            Value::Object(obj) => {
                kind_of_object(obj).filter(|k| matches!(k, DocumentKind::Trace | DocumentKind::Candidate))
            }
            _ => None,
        },
        _ => None,
    }
}

/// Fully validate any input file, returning its kind. Manifests are checked
/// together with every file they reference.
pub fn validate_path(path: &Path) -> Result<DocumentKind, IoError> {
    let text = read_text(path)?;
    let value: Value =
        serde_json::from_str(&text).map_err(|e| IoError::Parse { path: path.to_path_buf(), message: e.to_string() })?;
    let kind = detect_kind(&value)
        .ok_or_else(|| IoError::schema(path, "", "not a manifest, trace, candidate, checkpoint or config document"))?;
    match kind {
        DocumentKind::Manifest => {
            load_items(&load_manifest(path)?)?;
        }
        DocumentKind::Trace => {
            load_traces(path)?;
        }
        DocumentKind::Candidate => {
            load_candidates(path)?;
        }
        DocumentKind::Checkpoint => {
            load_checkpoint(path)?;
        }
        DocumentKind::Config => {
            RunConfig::load(path)?;
        }
    }
    Ok(kind)
}
