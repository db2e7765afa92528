//! Stochastic character- and word-level augmentation transforms.

mod edits;
pub mod registry;
pub mod resources;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tokenize::tokenize;
use crate::types::Seed;

pub use registry::Registry;
pub use resources::{bundled, cosine, nearest_neighbors, EmbeddingTable, Lexicon, Resource, DEFAULT_NEIGHBOR_COUNT};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TransformKind {
    CharInsert,
    CharDelete,
    CharSubstitute,
    CharSwap,
    KeyboardTypo,
    WordDelete,
    WordSwap,
    WordSplit,
    SpellingError,
    SynonymLexicon,
    ParaphraseLexicon,
    EmbeddingSubstitute,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransformClass {
    Char,
    Word,
}

impl TransformKind {
    pub const ALL: [TransformKind; 12] = [
        TransformKind::CharInsert,
        TransformKind::CharDelete,
        TransformKind::CharSubstitute,
        TransformKind::CharSwap,
        TransformKind::KeyboardTypo,
        TransformKind::WordDelete,
        TransformKind::WordSwap,
        TransformKind::WordSplit,
        TransformKind::SpellingError,
        TransformKind::SynonymLexicon,
        TransformKind::ParaphraseLexicon,
        TransformKind::EmbeddingSubstitute,
    ];

    pub fn class(self) -> TransformClass {
        use TransformKind::*;
        match self {
            CharInsert | CharDelete | CharSubstitute | CharSwap | KeyboardTypo => TransformClass::Char,
            _ => TransformClass::Word,
        }
    }

    pub fn requires_resource(self) -> bool {
        use TransformKind::*;
        matches!(
            self,
            SynonymLexicon | ParaphraseLexicon | EmbeddingSubstitute | SpellingError | KeyboardTypo
        )
    }

    /// Bundled table used when none is supplied.
    pub fn default_resource(self) -> Option<&'static str> {
        use TransformKind::*;
        match self {
            SynonymLexicon => Some("thesaurus"),
            ParaphraseLexicon => Some("paraphrase"),
            EmbeddingSubstitute => Some("embeddings"),
            SpellingError => Some("misspellings"),
            KeyboardTypo => Some("qwerty"),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        use TransformKind::*;
        match self {
            CharInsert => "CHAR_INSERT",
            CharDelete => "CHAR_DELETE",
            CharSubstitute => "CHAR_SUBSTITUTE",
            CharSwap => "CHAR_SWAP",
            KeyboardTypo => "KEYBOARD_TYPO",
            WordDelete => "WORD_DELETE",
            WordSwap => "WORD_SWAP",
            WordSplit => "WORD_SPLIT",
            SpellingError => "SPELLING_ERROR",
            SynonymLexicon => "SYNONYM_LEXICON",
            ParaphraseLexicon => "PARAPHRASE_LEXICON",
            EmbeddingSubstitute => "EMBEDDING_SUBSTITUTE",
        }
    }
}

impl fmt::Display for TransformKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TransformKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let upper = s.trim().to_ascii_uppercase().replace('-', "_");
        TransformKind::ALL
            .into_iter()
            .find(|k| k.as_str() == upper)
            .ok_or_else(|| Error::Config(format!("unknown transform kind {s:?}")))
    }
}

pub const DEFAULT_WORD_FRACTION: f64 = 0.10;
pub const DEFAULT_MIN_WORD_LEN: usize = 4;
pub const DEFAULT_WORDS_TO_MODIFY: usize = 1;

/// One configured transform.
///
/// `name` identifies the transform within a registry and keys its random
/// substreams, so two specs with the same kind but different resources
/// draw independently.
#[derive(Clone, Debug)]
pub struct TransformSpec {
    pub name: String,
    pub kind: TransformKind,
    pub word_fraction: f64,
    pub min_word_len: usize,
    pub words_to_modify: usize,
    pub resource: Option<Arc<Resource>>,
}

impl PartialEq for TransformSpec {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.kind == other.kind
            && self.word_fraction == other.word_fraction
            && self.min_word_len == other.min_word_len
            && self.words_to_modify == other.words_to_modify
            && match (&self.resource, &other.resource) {
                (None, None) => true,
                (Some(a), Some(b)) => Arc::ptr_eq(a, b) || a == b,
                _ => false,
            }
    }
}

impl TransformSpec {
    /// Spec with default parameters and no resource attached.
    pub fn new(kind: TransformKind) -> Self {
        TransformSpec {
            name: kind.as_str().to_ascii_lowercase(),
            kind,
            word_fraction: DEFAULT_WORD_FRACTION,
            min_word_len: DEFAULT_MIN_WORD_LEN,
            words_to_modify: DEFAULT_WORDS_TO_MODIFY,
            resource: None,
        }
    }

    /// Spec with default parameters and the kind's bundled resource.
    pub fn bundled(kind: TransformKind) -> Result<Self> {
        let spec = Self::new(kind);
        match kind.default_resource() {
            Some(name) => Ok(spec.with_resource(bundled::load(name)?)),
            None => Ok(spec),
        }
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_resource(mut self, resource: Resource) -> Self {
        self.resource = Some(Arc::new(resource));
        self
    }

    pub fn with_word_fraction(mut self, f: f64) -> Self {
        self.word_fraction = f;
        self
    }

    pub fn with_min_word_len(mut self, n: usize) -> Self {
        self.min_word_len = n;
        self
    }

    pub fn with_words_to_modify(mut self, n: usize) -> Self {
        self.words_to_modify = n;
        self
    }

    pub fn class(&self) -> TransformClass {
        self.kind.class()
    }

    pub fn validate(&self) -> Result<()> {
        match self.class() {
            TransformClass::Char => {
                if !(self.word_fraction > 0.0 && self.word_fraction <= 1.0) {
                    return Err(Error::Config(format!(
                        "{}: word_fraction must lie in (0, 1], got {}",
                        self.name, self.word_fraction
                    )));
                }
            }
            TransformClass::Word => {
                if self.words_to_modify == 0 {
                    return Err(Error::Config(format!("{}: words_to_modify must be >= 1", self.name)));
                }
            }
        }
        if self.kind.requires_resource() {
            let ok = match (self.kind, self.resource.as_deref()) {
                (TransformKind::EmbeddingSubstitute, Some(Resource::Embeddings(_))) => true,
                (TransformKind::EmbeddingSubstitute, _) => false,
                (_, Some(Resource::Lexicon(_))) => true,
                _ => false,
            };
            if !ok {
                return Err(Error::MissingResource(self.name.clone()));
            }
        }
        Ok(())
    }

    pub(crate) fn lexicon(&self) -> Result<&Lexicon> {
        match self.resource.as_deref() {
            Some(Resource::Lexicon(l)) => Ok(l),
            _ => Err(Error::MissingResource(self.name.clone())),
        }
    }

    pub(crate) fn embeddings(&self) -> Result<&EmbeddingTable<f64>> {
        match self.resource.as_deref() {
            Some(Resource::Embeddings(e)) => Ok(e),
            _ => Err(Error::MissingResource(self.name.clone())),
        }
    }
}

/// Number of words a character transform edits out of `eligible` candidates:
/// `max(1, round_half_up(fraction * eligible))`, capped at `eligible`.
pub fn char_selection_count(word_fraction: f64, eligible: usize) -> usize {
    if eligible == 0 {
        return 0;
    }
    let raw = (word_fraction * eligible as f64 + 0.5).floor() as usize;
    raw.clamp(1, eligible)
}

/// Applies one draw of `spec` to `text`.
pub fn apply<R: Rng + ?Sized>(spec: &TransformSpec, text: &str, rng: &mut R) -> Result<String> {
    spec.validate()?;
    let mut tt = tokenize(text);
    if tt.word_count() == 0 {
        return Err(Error::EmptyInput);
    }
    match spec.class() {
        TransformClass::Char => edits::apply_char(spec, &mut tt, rng)?,
        TransformClass::Word => edits::apply_word(spec, &mut tt, rng)?,
    }
    Ok(tt.to_text())
}

/// `n` independent draws; draw `k` uses substream `seed.derive(k)`.
pub fn sample_n(spec: &TransformSpec, text: &str, n: usize, seed: Seed) -> Result<Vec<String>> {
    sample_range(spec, text, 0..n, seed)
}

/// Draws for sample indices in `range`, each on its own substream.
pub fn sample_range(spec: &TransformSpec, text: &str, range: std::ops::Range<usize>, seed: Seed) -> Result<Vec<String>> {
    range
        .map(|k| apply(spec, text, &mut seed.derive(k as u64).rng()))
        .collect()
}

/// Uniform integer in `[0, n)` drawn through a `u64` so that results do not
/// depend on the platform's pointer width.
pub(crate) fn below<R: Rng + ?Sized>(rng: &mut R, n: usize) -> usize {
    debug_assert!(n > 0);
    rng.gen_range(0..n as u64) as usize
}

/// `k` distinct items chosen uniformly from `items`, returned in their
/// original order.
pub(crate) fn choose_k<R: Rng + ?Sized>(rng: &mut R, items: &[usize], k: usize) -> Vec<usize> {
    let mut pool = items.to_vec();
    let k = k.min(pool.len());
    for i in 0..k {
        let j = i + below(rng, pool.len() - i);
        pool.swap(i, j);
    }
    pool.truncate(k);
    pool.sort_unstable();
    pool
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kind_round_trip() {
        for k in TransformKind::ALL {
            assert_eq!(k.as_str().parse::<TransformKind>().unwrap(), k);
            let json = serde_json::to_string(&k).unwrap();
            assert_eq!(json, format!("\"{}\"", k.as_str()));
        }
        assert!("NOPE".parse::<TransformKind>().is_err());
        assert_eq!("word-delete".parse::<TransformKind>().unwrap(), TransformKind::WordDelete);
    }

    #[test]
    fn classes() {
        let chars = TransformKind::ALL.iter().filter(|k| k.class() == TransformClass::Char).count();
        assert_eq!(chars, 5);
    }

    #[test]
    fn selection_count_rounding() {
        assert_eq!(char_selection_count(0.1, 0), 0);
        assert_eq!(char_selection_count(0.1, 1), 1);
        assert_eq!(char_selection_count(0.1, 4), 1);
        assert_eq!(char_selection_count(0.1, 10), 1);
        assert_eq!(char_selection_count(0.1, 14), 1);
        assert_eq!(char_selection_count(0.1, 15), 2);
        assert_eq!(char_selection_count(0.1, 25), 3);
        assert_eq!(char_selection_count(1.0, 7), 7);
    }

    #[test]
    fn missing_resource_is_an_error() {
        let spec = TransformSpec::new(TransformKind::SynonymLexicon);
        let err = apply(&spec, "I am happy", &mut Seed(1).rng()).unwrap_err();
        assert!(matches!(err, Error::MissingResource(_)));
        let wrong = TransformSpec::new(TransformKind::EmbeddingSubstitute)
            .with_resource(Resource::Lexicon(Lexicon::default()));
        assert!(matches!(wrong.validate(), Err(Error::MissingResource(_))));
    }

    #[test]
    fn untokenizable_input_is_an_error() {
        let spec = TransformSpec::new(TransformKind::WordDelete);
        assert!(matches!(apply(&spec, " ... ", &mut Seed(1).rng()), Err(Error::EmptyInput)));
    }

    #[test]
    fn choose_k_is_distinct_and_sorted() {
        let mut rng = Seed(5).rng();
        let items: Vec<usize> = (10..30).collect();
        for k in 0..25 {
            let pick = choose_k(&mut rng, &items, k);
            assert_eq!(pick.len(), k.min(20));
            assert!(pick.windows(2).all(|w| w[0] < w[1]));
            assert!(pick.iter().all(|p| items.contains(p)));
        }
    }
}
