use std::fs;
use std::io::Write;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::report::Outcome;

pub const CACHE_ENV: &str = "FRAISSE_CACHE_DIR";

#[derive(Serialize, Deserialize)]
struct Entry {
    version: String,
    key: String,
    outcome: Outcome,
}

/// On-disk result cache, active only when `FRAISSE_CACHE_DIR` is set.
pub struct Cache {
    dir: Option<PathBuf>,
}

impl Cache {
    pub fn from_env(disabled: bool) -> Self {
        let dir = if disabled {
            None
        } else {
            std::env::var_os(CACHE_ENV).filter(|d| !d.is_empty()).map(PathBuf::from)
        };
        Cache { dir }
    }

    pub fn key(parts: &[String]) -> String {
        let mut h = Sha256::new();
        h.update(env!("CARGO_PKG_VERSION").as_bytes());
        for p in parts {
            h.update((p.len() as u64).to_le_bytes());
            h.update(p.as_bytes());
        }
        hex::encode(h.finalize())
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{key}.json")))
    }

    pub fn get(&self, key: &str) -> Option<Outcome> {
        let text = fs::read_to_string(self.path(key)?).ok()?;
        let entry: Entry = serde_json::from_str(&text).ok()?;
        (entry.version == env!("CARGO_PKG_VERSION") && entry.key == key).then_some(entry.outcome)
    }

    /// Best effort: a failed write leaves the cache unchanged.
    pub fn put(&self, key: &str, outcome: &Outcome) {
        let (Some(dir), Some(path)) = (&self.dir, self.path(key)) else {
            return;
        };
        let entry = Entry {
            version: env!("CARGO_PKG_VERSION").to_string(),
            key: key.to_string(),
            outcome: outcome.clone(),
        };
        let Ok(text) = serde_json::to_string(&entry) else {
            return;
        };
        if fs::create_dir_all(dir).is_err() {
            return;
        }
        let tmp = dir.join(format!(".{key}.{}.tmp", std::process::id()));
        let written = fs::File::create(&tmp).and_then(|mut f| {
            f.write_all(text.as_bytes())?;
            f.sync_all()
        });
        if written.is_err() || fs::rename(&tmp, &path).is_err() {
            let _ = fs::remove_file(&tmp);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache {
            dir: Some(dir.path().to_path_buf()),
        };
        let key = Cache::key(&["arrow".into(), "k=2".into()]);
        assert!(cache.get(&key).is_none());
        let outcome = Outcome {
            exit: 1,
            machine: "{}\n".into(),
            human: "x\n".into(),
            certificate: None,
            artifacts: vec![],
        };
        cache.put(&key, &outcome);
        assert_eq!(cache.get(&key), Some(outcome));
    }

    #[test]
    fn keys_separate_parts() {
        assert_ne!(
            Cache::key(&["ab".into(), "c".into()]),
            Cache::key(&["a".into(), "bc".into()])
        );
    }
}
