//! Stabilization results on disk, keyed by a hash of the input file and the search bound.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use solenoid::building_blocks::{passage_system, stabilization_power, PassageSystem, StabilizeError, StabilizeOptions};
use solenoid::presolenoid::WrappingRule;

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub struct StabilizeCache {
    dir: PathBuf,
}

impl StabilizeCache {
    pub fn new(out: &Path) -> Self {
        StabilizeCache { dir: out.join("cache") }
    }

    fn path(&self, source: &str, opts: &StabilizeOptions) -> PathBuf {
        let mut key = source.as_bytes().to_vec();
        key.extend_from_slice(format!("\0power_bound={}", opts.power_bound).as_bytes());
        self.dir.join(format!("stabilize-{}.json", sha256_hex(&key)))
    }

    fn cached_power(&self, path: &Path) -> Option<u32> {
        let v: Value = serde_json::from_str(&fs::read_to_string(path).ok()?).ok()?;
        v.get("stabilization_power")?.as_u64()?.try_into().ok()
    }

    /// The passage system of `rule`; the stabilization power comes from the cache when an
    /// entry for the same file contents exists. Cache write failures are ignored.
    pub fn stabilize(&self, source: &str, rule: &WrappingRule, opts: &StabilizeOptions) -> Result<PassageSystem, StabilizeError> {
        let path = self.path(source, opts);
        if let Some(m) = self.cached_power(&path) {
            return passage_system(rule, m, opts.letter_budget);
        }
        let m = stabilization_power(rule, opts.power_bound)?;
        let ps = passage_system(rule, m, opts.letter_budget)?;
        let entry = json!({
            "schema": crate::SCHEMA,
            "stabilization_power": m,
            "passages": ps.passage_labels(),
        });
        if fs::create_dir_all(&self.dir).is_ok() {
            let _ = fs::write(&path, serde_json::to_string_pretty(&entry).unwrap_or_default());
        }
        Ok(ps)
    }
}
