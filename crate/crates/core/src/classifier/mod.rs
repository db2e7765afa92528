//! The black-box classifier `f : text -> R^C` and the machinery around it.

pub mod builtin;
pub mod cache;
pub mod subprocess;

use std::collections::{BTreeMap, HashMap};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::Logits;

pub use builtin::{BuiltinModel, LinearModel, TrainConfig, TrainReport};
pub use cache::PredictionCache;
pub use subprocess::SubprocessClassifier;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Builtin,
    Subprocess,
    Custom,
}

/// Anything that maps a batch of texts to one logit vector each.
pub trait Classifier: Send + Sync {
    fn num_classes(&self) -> usize;

    /// Stable identity of the model; used to key cached predictions.
    fn fingerprint(&self) -> String;

    fn predict_batch(&self, texts: &[String]) -> Result<Vec<Logits>>;

    fn backend(&self) -> Backend {
        Backend::Custom
    }

    fn metadata(&self) -> BTreeMap<String, String> {
        BTreeMap::new()
    }
}

pub const DEFAULT_BATCH_SIZE: usize = 256;

/// A classifier plus an optional prediction cache.
///
/// All prediction in the pipeline goes through a handle so that repeated
/// texts (most importantly the unaugmented originals) reach the backend once.
pub struct ClassifierHandle {
    backend: Arc<dyn Classifier>,
    fingerprint: String,
    cache: Option<Arc<PredictionCache>>,
    batch_size: usize,
    backend_calls: AtomicU64,
    backend_texts: AtomicU64,
}

impl std::fmt::Debug for ClassifierHandle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ClassifierHandle")
            .field("fingerprint", &self.fingerprint)
            .field("num_classes", &self.num_classes())
            .field("cached", &self.cache.is_some())
            .finish()
    }
}

impl ClassifierHandle {
    pub fn new(backend: Arc<dyn Classifier>) -> Result<Self> {
        let c = backend.num_classes();
        if c < 2 {
            return Err(Error::Config(format!("classifier reports {c} classes; need at least 2")));
        }
        Ok(ClassifierHandle {
            fingerprint: backend.fingerprint(),
            backend,
            cache: None,
            batch_size: DEFAULT_BATCH_SIZE,
            backend_calls: AtomicU64::new(0),
            backend_texts: AtomicU64::new(0),
        })
    }

    pub fn with_cache(mut self, cache: Arc<PredictionCache>) -> Self {
        self.cache = Some(cache);
        self
    }

    /// Attaches a fresh in-memory cache.
    pub fn cached(self) -> Self {
        self.with_cache(Arc::new(PredictionCache::new()))
    }

    pub fn with_batch_size(mut self, n: usize) -> Self {
        self.batch_size = n.max(1);
        self
    }

    pub fn num_classes(&self) -> usize {
        self.backend.num_classes()
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn backend_kind(&self) -> Backend {
        self.backend.backend()
    }

    pub fn metadata(&self) -> BTreeMap<String, String> {
        self.backend.metadata()
    }

    pub fn cache(&self) -> Option<&Arc<PredictionCache>> {
        self.cache.as_ref()
    }

    /// Number of batches sent to the backend so far.
    pub fn backend_calls(&self) -> u64 {
        self.backend_calls.load(Ordering::Relaxed)
    }

    /// Number of texts the backend has scored so far.
    pub fn backend_texts(&self) -> u64 {
        self.backend_texts.load(Ordering::Relaxed)
    }

    /// One logit vector per input, in order.
    pub fn predict_logits(&self, texts: &[String]) -> Result<Vec<Logits>> {
        if texts.is_empty() {
            return Ok(Vec::new());
        }
        let Some(cache) = &self.cache else {
            return self.run_backend(texts);
        };
        let mut out: Vec<Option<Logits>> = texts.iter().map(|t| cache.get(&self.fingerprint, t)).collect();
        let mut pending: Vec<String> = Vec::new();
        let mut slot: HashMap<&str, usize> = HashMap::new();
        for (t, o) in texts.iter().zip(&out) {
            if o.is_none() && !slot.contains_key(t.as_str()) {
                slot.insert(t.as_str(), pending.len());
                pending.push(t.clone());
            }
        }
        if !pending.is_empty() {
            let fresh = self.run_backend(&pending)?;
            for (t, l) in pending.iter().zip(&fresh) {
                cache.insert(&self.fingerprint, t, l.clone());
            }
            for (t, o) in texts.iter().zip(out.iter_mut()) {
                if o.is_none() {
                    *o = Some(fresh[slot[t.as_str()]].clone());
                }
            }
        }
        Ok(out.into_iter().map(|o| o.expect("filled")).collect())
    }

    fn run_backend(&self, texts: &[String]) -> Result<Vec<Logits>> {
        let c = self.num_classes();
        let mut out = Vec::with_capacity(texts.len());
        for chunk in texts.chunks(self.batch_size) {
            self.backend_calls.fetch_add(1, Ordering::Relaxed);
            let got = self.backend.predict_batch(chunk).map_err(|e| match e {
                Error::BackendUnavailable { completed, reason, .. } => Error::BackendUnavailable {
                    completed: out.len() + completed,
                    requested: texts.len(),
                    reason,
                },
                other => other,
            })?;
            if got.len() != chunk.len() {
                return Err(Error::Protocol(format!(
                    "backend returned {} predictions for {} texts",
                    got.len(),
                    chunk.len()
                )));
            }
            if let Some(bad) = got.iter().find(|l| l.len() != c) {
                return Err(Error::Shape {
                    expected: c,
                    found: bad.len(),
                });
            }
            self.backend_texts.fetch_add(chunk.len() as u64, Ordering::Relaxed);
            out.extend(got);
        }
        Ok(out)
    }
}
