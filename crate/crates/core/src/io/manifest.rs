use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::records::trace_error;
use super::{check_version, decode_image, load_candidates, load_traces, read_json, CandidateRecord, IoError};
use crate::energy::{aggregate_trace, EnergyTrace};
use crate::metrics::EmbeddingVector;
use crate::selection::{Candidate, EvaluationItem};

/// Where one model's answer to one item lives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub model_id: String,
    /// Candidate file; may hold records for several items.
    pub candidate: PathBuf,
    /// Trace file; may hold traces for several items.
    pub trace: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestItem {
    pub item_id: String,
    pub reference_text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_embedding: Option<EmbeddingVector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_image: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub context: Option<String>,
    pub candidates: Vec<ManifestEntry>,
}

/// A validated dataset manifest. Relative paths are already resolved
/// against the manifest's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    #[serde(default)]
    pub format_version: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub items: Vec<ManifestItem>,
}

impl Manifest {
    /// Model ids in the fleet, sorted.
    pub fn models(&self) -> Vec<String> {
        self.items
            .first()
            .map(|i| i.candidates.iter().map(|c| c.model_id.clone()).collect::<BTreeSet<_>>().into_iter().collect())
            .unwrap_or_default()
    }
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn require_file(p: &Path) -> Result<(), IoError> {
    if p.is_file() {
        Ok(())
    } else {
        Err(IoError::MissingFile(p.to_path_buf()))
    }
}

pub fn load_manifest(path: &Path) -> Result<Manifest, IoError> {
    let mut manifest: Manifest = read_json(path)?;
    check_version(path, "format_version", manifest.format_version)?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));

    if manifest.items.is_empty() {
        return Err(IoError::schema(path, "items", "manifest lists no items"));
    }
    let mut seen_items = BTreeSet::new();
    let mut fleet: Option<BTreeSet<String>> = None;
    let mut embedding_dim = None;
    for (i, item) in manifest.items.iter_mut().enumerate() {
        let at = |f: &str| format!("items[{i}].{f}");
        if item.item_id.trim().is_empty() {
            return Err(IoError::schema(path, at("item_id"), "must be nonempty"));
        }
        if !seen_items.insert(item.item_id.clone()) {
            return Err(IoError::schema(path, at("item_id"), format!("duplicate item `{}`", item.item_id)));
        }
        if item.reference_text.trim().is_empty() {
            return Err(IoError::schema(path, at("reference_text"), "must be nonempty"));
        }
        if let Some(e) = &item.reference_embedding {
            match embedding_dim {
                None => embedding_dim = Some(e.dim()),
                Some(d) if d != e.dim() => {
                    return Err(IoError::schema(
                        path,
                        at("reference_embedding"),
                        format!("dimension {} differs from {d}", e.dim()),
                    ))
                }
                _ => {}
            }
        }
        if item.candidates.is_empty() {
            return Err(IoError::schema(path, at("candidates"), "item has no candidates"));
        }
        let mut models = BTreeSet::new();
        for (j, entry) in item.candidates.iter_mut().enumerate() {
            if entry.model_id.trim().is_empty() {
                return Err(IoError::schema(path, at(&format!("candidates[{j}].model_id")), "must be nonempty"));
            }
            if !models.insert(entry.model_id.clone()) {
                return Err(IoError::schema(
                    path,
                    at(&format!("candidates[{j}].model_id")),
                    format!("model `{}` listed twice", entry.model_id),
                ));
            }
            entry.candidate = resolve(base, &entry.candidate);
            entry.trace = resolve(base, &entry.trace);
            require_file(&entry.candidate)?;
            require_file(&entry.trace)?;
        }
        match &fleet {
            None => fleet = Some(models),
            Some(f) if *f != models => {
                return Err(IoError::schema(path, at("candidates"), "model set differs from the first item's fleet"));
            }
            _ => {}
        }
        if let Some(img) = &mut item.reference_image {
            *img = resolve(base, img);
            require_file(img)?;
        }
    }
    Ok(manifest)
}

/// Read every candidate and trace the manifest references and assemble
/// evaluation items in manifest order.
pub fn load_items(manifest: &Manifest) -> Result<Vec<EvaluationItem>, IoError> {
    let mut candidate_files: HashMap<PathBuf, Vec<CandidateRecord>> = HashMap::new();
    let mut trace_files: HashMap<PathBuf, Vec<EnergyTrace>> = HashMap::new();

    let mut items = Vec::with_capacity(manifest.items.len());
    for m in &manifest.items {
        let mut item = EvaluationItem::new(&m.item_id, &m.reference_text);
        item.reference_embedding = m.reference_embedding.clone();
        item.context = m.context.clone();
        if let Some(p) = &m.reference_image {
            item.reference_image = Some(decode_image(p)?);
        }
        let mut candidates = BTreeMap::new();
        let mut energies = BTreeMap::new();
        for entry in &m.candidates {
            if !candidate_files.contains_key(&entry.candidate) {
                candidate_files.insert(entry.candidate.clone(), load_candidates(&entry.candidate)?);
            }
            if !trace_files.contains_key(&entry.trace) {
                trace_files.insert(entry.trace.clone(), load_traces(&entry.trace)?);
            }
            let matches = |model: &str, item_id: &str| model == entry.model_id && item_id == m.item_id;
            let record = candidate_files[&entry.candidate]
                .iter()
                .find(|r| matches(&r.model_id, &r.item_id))
                .cloned()
                .ok_or_else(|| {
                IoError::schema(&entry.candidate, "item_id", format!("no record for {}/{}", entry.model_id, m.item_id))
            })?;
            let trace =
                trace_files[&entry.trace].iter().find(|t| matches(&t.model_id, &t.item_id)).ok_or_else(|| {
                    IoError::schema(&entry.trace, "item_id", format!("no trace for {}/{}", entry.model_id, m.item_id))
                })?;
            let summary = aggregate_trace(trace).map_err(|e| trace_error(&entry.trace, "", e))?;
            let image = match &record.image_path {
                Some(p) => {
                    let base = entry.candidate.parent().unwrap_or_else(|| Path::new("."));
                    Some(decode_image(&resolve(base, p))?)
                }
                None => None,
            };
            candidates.insert(entry.model_id.clone(), Candidate { record, image });
            energies.insert(entry.model_id.clone(), summary);
        }
        item.candidates = candidates;
        item.energies = energies;
        items.push(item);
    }
    Ok(items)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn setup(manifest: &str) -> (tempfile::TempDir, PathBuf) {
        let dir = tempfile::tempdir().unwrap();
        fs::write(
            dir.path().join("cand.json"),
            r#"[{"model_id":"m","item_id":"a","caption":"a red rose"},
            {"model_id":"m","item_id":"b","caption":"a dog"}]"#,
        )
        .unwrap();
        fs::write(
            dir.path().join("trace.json"),
            r#"[{"model_id":"m","item_id":"a","samples":[{"t":0,"cpu_w":2,"gpu_w":0},{"t":1,"cpu_w":3,"gpu_w":0}]},
                {"model_id":"m","item_id":"b","samples":[{"t":0,"cpu_w":1,"gpu_w":1}]}]"#,
        )
        .unwrap();
        let path = dir.path().join("manifest.json");
        fs::write(&path, manifest).unwrap();
        (dir, path)
    }

    const ENTRY: &str = r#"[{"model_id":"m","candidate":"cand.json","trace":"trace.json"}]"#;

    #[test]
    fn minimal_manifest_loads_in_order() {
        let body = format!(
            r#"{{"format_version":1,"items":[
                {{"item_id":"b","reference_text":"a dog","candidates":{ENTRY}}},
                {{"item_id":"a","reference_text":"a red rose","candidates":{ENTRY}}}]}}"#
        );
        let (_dir, path) = setup(&body);
        let manifest = load_manifest(&path).unwrap();
        let items = load_items(&manifest).unwrap();
        assert_eq!(items.iter().map(|i| i.item_id.as_str()).collect::<Vec<_>>(), vec!["b", "a"]);
        assert_eq!(items[1].energies["m"].total_energy, 5.0);
        assert_eq!(items[0].energies["m"].gpu_energy, 1.0);
        assert_eq!(manifest.models(), vec!["m".to_string()]);
    }

    #[test]
    fn missing_trace_is_named() {
        let body = r#"{"items":[{"item_id":"a","reference_text":"x",
            "candidates":[{"model_id":"m","candidate":"cand.json","trace":"nope.json"}]}]}"#;
        let (_dir, path) = setup(body);
        match load_manifest(&path) {
            Err(IoError::MissingFile(p)) => assert!(p.ends_with("nope.json")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn structural_violations() {
        let (_d, empty) = setup(r#"{"items":[]}"#);
        assert!(matches!(load_manifest(&empty), Err(IoError::SchemaViolation { field, .. }) if field == "items"));

        let dup = format!(
            r#"{{"items":[{{"item_id":"a","reference_text":"x","candidates":{ENTRY}}},
                          {{"item_id":"a","reference_text":"x","candidates":{ENTRY}}}]}}"#
        );
        let (_d, dup) = setup(&dup);
        assert!(
            matches!(load_manifest(&dup), Err(IoError::SchemaViolation { field, .. }) if field == "items[1].item_id")
        );

        let (_d, typed) = setup(r#"{"items":[{"item_id":3}]}"#);
        match load_manifest(&typed) {
            Err(IoError::SchemaViolation { field, .. }) => assert_eq!(field, "items[0].item_id"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn record_absent_from_shared_file() {
        let body = format!(r#"{{"items":[{{"item_id":"zzz","reference_text":"x","candidates":{ENTRY}}}]}}"#);
        let (_dir, path) = setup(&body);
        let manifest = load_manifest(&path).unwrap();
        assert!(matches!(load_items(&manifest), Err(IoError::SchemaViolation { .. })));
    }
}
