use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{check_version, read_one_or_many, IoError};
use crate::energy::{EnergyError, EnergyTrace};
use crate::metrics::EmbeddingVector;

/// A model's output for one item: the perceived meaning.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format_version: Option<u32>,
    pub model_id: String,
    pub item_id: String,
    pub caption: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub embedding: Option<EmbeddingVector>,
    /// Decoded output image, relative to the record's file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image_path: Option<PathBuf>,
}

impl CandidateRecord {
    pub fn new(model_id: impl Into<String>, item_id: impl Into<String>, caption: impl Into<String>) -> Self {
        Self {
            format_version: None,
            model_id: model_id.into(),
            item_id: item_id.into(),
            caption: caption.into(),
            embedding: None,
            image_path: None,
        }
    }
}

fn prefix(is_array: bool, i: usize) -> String {
    if is_array {
        format!("[{i}].")
    } else {
        String::new()
    }
}

pub(crate) fn validate_candidate(path: &Path, at: &str, rec: &CandidateRecord) -> Result<(), IoError> {
    check_version(path, &format!("{at}format_version"), rec.format_version)?;
    if rec.model_id.trim().is_empty() {
        return Err(IoError::schema(path, format!("{at}model_id"), "must be nonempty"));
    }
    if rec.item_id.trim().is_empty() {
        return Err(IoError::schema(path, format!("{at}item_id"), "must be nonempty"));
    }
    if rec.caption.trim().is_empty() {
        return Err(IoError::schema(path, format!("{at}caption"), "must be nonempty"));
    }
    Ok(())
}

/// Candidate records from a file holding one record or an array of them.
pub fn load_candidates(path: &Path) -> Result<Vec<CandidateRecord>, IoError> {
    let (records, is_array) = read_one_or_many::<CandidateRecord>(path)?;
    for (i, rec) in records.iter().enumerate() {
        validate_candidate(path, &prefix(is_array, i), rec)?;
    }
    let dims: Vec<usize> = records.iter().filter_map(|r| r.embedding.as_ref().map(EmbeddingVector::dim)).collect();
    if let Some(i) = dims.iter().position(|d| *d != dims[0]) {
        return Err(IoError::schema(path, "embedding", format!("dimension {} differs from {}", dims[i], dims[0])));
    }
    Ok(records)
}

#[derive(Deserialize)]
struct TraceFile {
    #[serde(default)]
    format_version: Option<u32>,
    #[serde(flatten)]
    trace: EnergyTrace,
}

pub(crate) fn trace_error(path: &Path, at: &str, err: EnergyError) -> IoError {
    let field = match &err {
        EnergyError::InvalidSample { index, field, .. } => format!("{at}samples[{index}].{field}"),
        EnergyError::NonMonotonicTimestamps { index, .. } => format!("{at}samples[{index}].t"),
        EnergyError::EmptyTrace(_) => format!("{at}samples"),
        EnergyError::InvalidInterval(_) => format!("{at}sample_interval_s"),
        _ => at.trim_end_matches('.').to_string(),
    };
    IoError::schema(path, field, err)
}

/// Power traces from a file holding one trace or an array of them.
pub fn load_traces(path: &Path) -> Result<Vec<EnergyTrace>, IoError> {
    let (files, is_array) = read_one_or_many::<TraceFile>(path)?;
    files
        .into_iter()
        .enumerate()
        .map(|(i, f)| {
            let at = prefix(is_array, i);
            check_version(path, &format!("{at}format_version"), f.format_version)?;
            f.trace.validate().map_err(|e| trace_error(path, &at, e))?;
            Ok(f.trace)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
        let p = dir.join(name);
        fs::write(&p, body).unwrap();
        p
    }

    #[test]
    fn single_and_array_candidates() {
        let dir = tempfile::tempdir().unwrap();
        let one = write(dir.path(), "one.json", r#"{"model_id":"m","item_id":"i","caption":"a dog","extra":1}"#);
        assert_eq!(load_candidates(&one).unwrap().len(), 1);
        let many = write(
            dir.path(),
            "many.json",
            r#"[{"model_id":"m","item_id":"1","caption":"x","embedding":[1,0]},
                {"model_id":"m","item_id":"2","caption":"y","embedding":[0,1]}]"#,
        );
        assert_eq!(load_candidates(&many).unwrap()[1].item_id, "2");
    }

    #[test]
    fn candidate_violations_name_the_field() {
        let dir = tempfile::tempdir().unwrap();
        let blank = write(dir.path(), "b.json", r#"[{"model_id":"m","item_id":"i","caption":"  "}]"#);
        match load_candidates(&blank) {
            Err(IoError::SchemaViolation { field, .. }) => assert_eq!(field, "[0].caption"),
            other => panic!("{other:?}"),
        }
        let dims = write(
            dir.path(),
            "d.json",
            r#"[{"model_id":"m","item_id":"1","caption":"x","embedding":[1,0]},
                {"model_id":"m","item_id":"2","caption":"y","embedding":[1,0,0]}]"#,
        );
        assert!(matches!(load_candidates(&dims), Err(IoError::SchemaViolation { .. })));
        let version = write(dir.path(), "v.json", r#"{"format_version":2,"model_id":"m","item_id":"i","caption":"x"}"#);
        assert!(matches!(load_candidates(&version), Err(IoError::SchemaViolation { .. })));
        assert!(matches!(load_candidates(&dir.path().join("absent.json")), Err(IoError::MissingFile(_))));
        let broken = write(dir.path(), "x.json", "{not json");
        assert!(matches!(load_candidates(&broken), Err(IoError::Parse { .. })));
    }

    #[test]
    fn trace_violations_name_the_sample() {
        let dir = tempfile::tempdir().unwrap();
        let neg = write(
            dir.path(),
            "t.json",
            r#"{"format_version":1,"model_id":"m","item_id":"i","sample_interval_s":1,
                "samples":[{"t":0,"cpu_w":1,"gpu_w":0},{"t":1,"cpu_w":-2,"gpu_w":0}]}"#,
        );
        match load_traces(&neg) {
            Err(IoError::SchemaViolation { field, .. }) => assert_eq!(field, "samples[1].cpu_w"),
            other => panic!("{other:?}"),
        }
        let ok = write(
            dir.path(),
            "ok.json",
            r#"[{"model_id":"m","item_id":"i","samples":[{"t":0,"cpu_w":1,"gpu_w":0,"cpu_util_pct":40}]}]"#,
        );
        let traces = load_traces(&ok).unwrap();
        assert_eq!(traces[0].sample_interval, 1.0);
    }
}
