//! Augmentation policies and test-time-augmented prediction.

use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::classifier::ClassifierHandle;
use crate::error::{Error, Result};
use crate::logits::{Aggregation, Prediction};
use crate::transforms::resources::{EmbeddingTable, DEFAULT_NEIGHBOR_COUNT};
use crate::transforms::{bundled, sample_range, Lexicon, Resource, TransformKind, TransformSpec};
use crate::types::{Document, Seed};

pub const DEFAULT_SAMPLES: usize = 4;

#[derive(Clone, Debug, PartialEq)]
pub struct PolicyEntry {
    pub spec: TransformSpec,
    pub n_samples: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Policy {
    pub name: String,
    pub include_original: bool,
    pub entries: Vec<PolicyEntry>,
    pub aggregation: Aggregation,
}

impl Policy {
    pub fn new(name: impl Into<String>, entries: Vec<PolicyEntry>) -> Result<Self> {
        let p = Policy {
            name: name.into(),
            include_original: true,
            entries,
            aggregation: Aggregation::Logits,
        };
        p.validate()?;
        Ok(p)
    }

    /// The identity policy: only the unaugmented input.
    pub fn original_only() -> Self {
        Policy {
            name: "original".into(),
            include_original: true,
            entries: Vec::new(),
            aggregation: Aggregation::Logits,
        }
    }

    pub fn single(spec: TransformSpec, n_samples: usize) -> Result<Self> {
        let name = format!("{}x{}", spec.name, n_samples);
        Self::new(name, vec![PolicyEntry { spec, n_samples }])
    }

    pub fn without_original(mut self) -> Self {
        self.include_original = false;
        self
    }

    pub fn with_aggregation(mut self, aggregation: Aggregation) -> Self {
        self.aggregation = aggregation;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.entries.is_empty() && !self.include_original {
            return Err(Error::Config(format!("policy {:?} produces no variants", self.name)));
        }
        for e in &self.entries {
            if e.n_samples == 0 {
                return Err(Error::Config(format!("{}: n_samples must be >= 1", e.spec.name)));
            }
            e.spec.validate()?;
        }
        if let Some(first) = self.entries.first() {
            if self.entries.iter().any(|e| e.spec.class() != first.spec.class()) {
                return Err(Error::Config(format!(
                    "policy {:?} mixes character and word transforms",
                    self.name
                )));
            }
        }
        Ok(())
    }

    /// Augmented variants, excluding the original.
    pub fn augmented_count(&self) -> usize {
        self.entries.iter().map(|e| e.n_samples).sum()
    }

    /// Total inputs scored per document.
    pub fn variant_count(&self) -> usize {
        usize::from(self.include_original) + self.augmented_count()
    }

    /// The original (if included) followed by each entry's samples in
    /// entry order.
    ///
    /// Sample `k` of a transform named `t` on document `d` always uses the
    /// substream `seed / d / t / k`, where `k` counts across all entries that
    /// share the name. Reordering entries therefore only reorders variants.
    pub fn expand(&self, doc: &Document, seed: Seed) -> Result<Vec<String>> {
        let mut out = Vec::with_capacity(self.variant_count());
        if self.include_original {
            out.push(doc.text.clone());
        }
        let doc_seed = seed.derive_str(&doc.id);
        let mut offsets: HashMap<&str, usize> = HashMap::new();
        for e in &self.entries {
            let start = offsets.entry(e.spec.name.as_str()).or_default();
            let range = *start..*start + e.n_samples;
            *start += e.n_samples;
            out.extend(sample_range(&e.spec, &doc.text, range, doc_seed.derive_str(&e.spec.name))?);
        }
        Ok(out)
    }

    pub fn tta_predict(&self, handle: &ClassifierHandle, doc: &Document, seed: Seed) -> Result<Prediction<f64>> {
        let variants = self.expand(doc, seed)?;
        let logits = handle.predict_logits(&variants)?;
        Prediction::aggregate(logits, self.aggregation)
    }

    pub fn describe(&self) -> PolicyDescription {
        PolicyDescription {
            name: self.name.clone(),
            include_original: self.include_original,
            aggregation: self.aggregation,
            variants: self.variant_count(),
            entries: self
                .entries
                .iter()
                .map(|e| EntryDescription {
                    name: e.spec.name.clone(),
                    kind: e.spec.kind,
                    n_samples: e.n_samples,
                })
                .collect(),
        }
    }

    /// Parses a policy file. Relative resource paths resolve against `base_dir`.
    pub fn from_json(source: &str, base_dir: &Path) -> Result<Self> {
        let file: PolicyFile = serde_json::from_str(source)?;
        file.resolve(base_dir)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text, path.parent().unwrap_or(Path::new(".")))
    }
}

/// Free function form of [`Policy::tta_predict`].
pub fn tta_predict(handle: &ClassifierHandle, policy: &Policy, doc: &Document, seed: Seed) -> Result<Prediction<f64>> {
    policy.tta_predict(handle, doc, seed)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolicyDescription {
    pub name: String,
    pub include_original: bool,
    pub aggregation: Aggregation,
    pub variants: usize,
    pub entries: Vec<EntryDescription>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntryDescription {
    pub name: String,
    pub kind: TransformKind,
    pub n_samples: usize,
}

/// The four (samples per transform, distinct transforms) configurations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Preset {
    #[serde(rename = "1s1a")]
    OneSampleOneAug,
    #[serde(rename = "1s4a")]
    OneSampleFourAugs,
    #[serde(rename = "4s1a")]
    FourSamplesOneAug,
    #[serde(rename = "4s4a")]
    FourSamplesFourAugs,
}

impl Preset {
    pub const ALL: [Preset; 4] = [
        Preset::OneSampleOneAug,
        Preset::OneSampleFourAugs,
        Preset::FourSamplesOneAug,
        Preset::FourSamplesFourAugs,
    ];

    pub fn samples(self) -> usize {
        match self {
            Preset::OneSampleOneAug | Preset::OneSampleFourAugs => 1,
            Preset::FourSamplesOneAug | Preset::FourSamplesFourAugs => DEFAULT_SAMPLES,
        }
    }

    pub fn transforms(self) -> usize {
        match self {
            Preset::OneSampleOneAug | Preset::FourSamplesOneAug => 1,
            Preset::OneSampleFourAugs | Preset::FourSamplesFourAugs => 4,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Preset::OneSampleOneAug => "1s1a",
            Preset::OneSampleFourAugs => "1s4a",
            Preset::FourSamplesOneAug => "4s1a",
            Preset::FourSamplesFourAugs => "4s4a",
        }
    }

    /// Builds the preset over `specs`, which must hold exactly
    /// [`Preset::transforms`] distinct transforms of one class.
    pub fn build(self, specs: &[TransformSpec]) -> Result<Policy> {
        if specs.len() != self.transforms() {
            return Err(Error::Config(format!(
                "{} needs {} transform(s), got {}",
                self.as_str(),
                self.transforms(),
                specs.len()
            )));
        }
        let mut names: Vec<&str> = specs.iter().map(|s| s.name.as_str()).collect();
        names.sort_unstable();
        names.dedup();
        if names.len() != specs.len() {
            return Err(Error::Config(format!("{} needs distinct transforms", self.as_str())));
        }
        let name = format!(
            "{}:{}",
            self.as_str(),
            specs.iter().map(|s| s.name.as_str()).collect::<Vec<_>>().join("+")
        );
        Policy::new(
            name,
            specs
                .iter()
                .map(|s| PolicyEntry {
                    spec: s.clone(),
                    n_samples: self.samples(),
                })
                .collect(),
        )
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Config(format!("unknown preset {s:?}; expected 1s1a, 1s4a, 4s1a or 4s4a")))
    }
}

/// On-disk policy description.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyFile {
    pub name: String,
    #[serde(default = "yes")]
    pub include_original: bool,
    #[serde(default)]
    pub aggregation: Aggregation,
    #[serde(default)]
    pub entries: Vec<EntryFile>,
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryFile {
    #[serde(flatten)]
    pub transform: TransformConfig,
    #[serde(default = "default_samples")]
    pub n_samples: usize,
}

fn default_samples() -> usize {
    DEFAULT_SAMPLES
}

/// A transform as written in configuration files.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TransformConfig {
    pub kind: TransformKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default)]
    pub params: TransformParams,
    #[serde(default)]
    pub resources: ResourceRef,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransformParams {
    pub word_fraction: Option<f64>,
    pub min_word_len: Option<usize>,
    pub words_to_modify: Option<usize>,
    pub neighbor_count: Option<usize>,
}

/// Where a transform's table comes from: a bundled name or a file path.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResourceRef {
    pub bundled: Option<String>,
    pub lexicon: Option<PathBuf>,
    pub table: Option<PathBuf>,
    pub embeddings: Option<PathBuf>,
}

impl TransformConfig {
    pub fn new(kind: TransformKind) -> Self {
        TransformConfig {
            kind,
            name: None,
            params: TransformParams::default(),
            resources: ResourceRef::default(),
        }
    }

    pub fn resolve(&self, base_dir: &Path) -> Result<TransformSpec> {
        let mut spec = TransformSpec::new(self.kind);
        if let Some(n) = &self.name {
            spec = spec.named(n.clone());
        }
        if let Some(f) = self.params.word_fraction {
            spec = spec.with_word_fraction(f);
        }
        if let Some(n) = self.params.min_word_len {
            spec = spec.with_min_word_len(n);
        }
        if let Some(n) = self.params.words_to_modify {
            spec = spec.with_words_to_modify(n);
        }
        let k = self.params.neighbor_count.unwrap_or(DEFAULT_NEIGHBOR_COUNT);
        let at = |p: &PathBuf| if p.is_absolute() { p.clone() } else { base_dir.join(p) };
        let r = &self.resources;
        let resource = if let Some(p) = r.embeddings.as_ref() {
            Some(Resource::Embeddings(EmbeddingTable::load(&at(p), k)?))
        } else if let Some(p) = r.lexicon.as_ref().or(r.table.as_ref()) {
            Some(Resource::Lexicon(Lexicon::load(&at(p))?))
        } else if let Some(b) = r.bundled.as_deref().or(self.kind.default_resource()) {
            Some(bundled::load(b)?)
        } else {
            None
        };
        if let Some(mut res) = resource {
            if let Resource::Embeddings(t) = &mut res {
                t.neighbor_count = k;
            }
            spec = spec.with_resource(res);
        }
        spec.validate()?;
        Ok(spec)
    }
}

impl PolicyFile {
    pub fn resolve(&self, base_dir: &Path) -> Result<Policy> {
        let entries = self
            .entries
            .iter()
            .map(|e| {
                Ok(PolicyEntry {
                    spec: e.transform.resolve(base_dir)?,
                    n_samples: e.n_samples,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let p = Policy {
            name: self.name.clone(),
            include_original: self.include_original,
            entries,
            aggregation: self.aggregation,
        };
        p.validate()?;
        Ok(p)
    }
}
