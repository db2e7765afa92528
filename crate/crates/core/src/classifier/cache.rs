//! Memoised predictions keyed by (model fingerprint, exact input text).

use std::collections::HashMap;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Logits;

#[derive(Debug, Default)]
pub struct PredictionCache {
    // fingerprint -> text -> logits
    map: Mutex<HashMap<String, HashMap<String, Logits>>>,
    hits: AtomicU64,
    misses: AtomicU64,
}

/// One line of the on-disk cache. Logits are stored as raw IEEE-754 bits
/// so a reloaded entry is bit-identical to the backend's answer.
#[derive(Serialize, Deserialize)]
struct Entry {
    model: String,
    text: String,
    bits: Vec<u64>,
}

impl PredictionCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, fingerprint: &str, text: &str) -> Option<Logits> {
        let found = self
            .map
            .lock()
            .expect("cache lock")
            .get(fingerprint)
            .and_then(|m| m.get(text))
            .cloned();
        match found {
            Some(v) => {
                self.hits.fetch_add(1, Ordering::Relaxed);
                Some(v)
            }
            None => {
                self.misses.fetch_add(1, Ordering::Relaxed);
                None
            }
        }
    }

    pub fn insert(&self, fingerprint: &str, text: &str, logits: Logits) {
        self.map
            .lock()
            .expect("cache lock")
            .entry(fingerprint.to_string())
            .or_default()
            .insert(text.to_string(), logits);
    }

    pub fn hits(&self) -> u64 {
        self.hits.load(Ordering::Relaxed)
    }

    pub fn misses(&self) -> u64 {
        self.misses.load(Ordering::Relaxed)
    }

    pub fn len(&self) -> usize {
        self.map.lock().expect("cache lock").values().map(HashMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Loads a JSONL cache file; a missing file yields an empty cache.
    pub fn load(path: &Path) -> Result<Self> {
        let cache = Self::new();
        let file = match std::fs::File::open(path) {
            Ok(f) => f,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(cache),
            Err(e) => return Err(Error::io(path, e)),
        };
        {
            let mut map = cache.map.lock().expect("cache lock");
            for (i, line) in BufReader::new(file).lines().enumerate() {
                let line = line.map_err(|e| Error::io(path, e))?;
                if line.trim().is_empty() {
                    continue;
                }
                let entry: Entry = serde_json::from_str(&line)
                    .map_err(|e| Error::parse("cache", format!("{}:{}", path.display(), i + 1), e))?;
                let logits = Logits::new(entry.bits.into_iter().map(f64::from_bits).collect())?;
                map.entry(entry.model).or_default().insert(entry.text, logits);
            }
        }
        Ok(cache)
    }

    /// Writes every entry, sorted by key so the file is reproducible.
    pub fn save(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        let map = self.map.lock().expect("cache lock");
        let mut keys: Vec<(&String, &String)> = map
            .iter()
            .flat_map(|(f, m)| m.keys().map(move |t| (f, t)))
            .collect();
        keys.sort();
        let tmp = path.with_extension("tmp");
        let file = std::fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
        let mut w = BufWriter::new(file);
        for (model, text) in keys {
            let entry = Entry {
                model: model.clone(),
                text: text.clone(),
                bits: map[model][text].values().iter().map(|v| v.to_bits()).collect(),
            };
            serde_json::to_writer(&mut w, &entry)?;
            w.write_all(b"\n").map_err(|e| Error::io(&tmp, e))?;
        }
        w.flush().map_err(|e| Error::io(&tmp, e))?;
        drop(w);
        std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.jsonl");
        let c = PredictionCache::new();
        let v = Logits::new(vec![0.1 + 0.2, -1.0 / 3.0, 1e-300]).unwrap();
        c.insert("m", "héllo\n\"x\"", v.clone());
        c.save(&path).unwrap();
        let back = PredictionCache::load(&path).unwrap();
        assert_eq!(back.get("m", "héllo\n\"x\"").unwrap(), v);
        assert!(back.get("other", "héllo\n\"x\"").is_none());
        assert_eq!((back.hits(), back.misses()), (1, 1));
    }

    #[test]
    fn missing_file_is_empty() {
        let dir = tempfile::tempdir().unwrap();
        assert!(PredictionCache::load(&dir.path().join("none.jsonl")).unwrap().is_empty());
    }
}
