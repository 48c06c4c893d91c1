//! Run manifests: content hashing of scenarios and provenance records for
//! every output file.

use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

/// Canonical content hash of a scenario value. `serde_json` objects use
/// sorted keys, so the hash is stable under key reordering in the file.
pub fn scenario_hash(raw: &serde_json::Value) -> String {
    let canonical = serde_json::to_string(raw).expect("value serializes");
    let digest = Sha256::digest(canonical.as_bytes());
    let mut out = String::with_capacity(16);
    for byte in digest.iter().take(8) {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub scenario_kind: String,
    pub scenario_hash: String,
    pub created_utc: String,
    pub seeds: Vec<u64>,
    pub outputs: Vec<PathBuf>,
    /// Resolved scenario (defaults filled) for audit.
    pub scenario: serde_json::Value,
    /// Unit conversions applied, when any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conversions: Option<serde_json::Value>,
}

impl RunManifest {
    pub fn new(kind: &str, hash: &str, scenario: serde_json::Value) -> Self {
        RunManifest {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            scenario_kind: kind.to_string(),
            scenario_hash: hash.to_string(),
            created_utc: chrono::Utc::now().to_rfc3339(),
            seeds: Vec::new(),
            outputs: Vec::new(),
            scenario,
            conversions: None,
        }
    }

    pub fn write(&self, out_dir: &Path) -> std::io::Result<PathBuf> {
        let path = out_dir.join("manifest.json");
        let body = serde_json::to_string_pretty(self).expect("manifest serializes");
        std::fs::write(&path, body)?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_stable_under_key_reordering() {
        let a: serde_json::Value =
            serde_json::from_str(r#"{"kind":"gamma","center_nm":790,"filter_fwhm_nm":5}"#).unwrap();
        let b: serde_json::Value =
            serde_json::from_str(r#"{"filter_fwhm_nm":5,"kind":"gamma","center_nm":790}"#).unwrap();
        assert_eq!(scenario_hash(&a), scenario_hash(&b));
        let c: serde_json::Value =
            serde_json::from_str(r#"{"filter_fwhm_nm":6,"kind":"gamma","center_nm":790}"#).unwrap();
        assert_ne!(scenario_hash(&a), scenario_hash(&c));
    }
}
