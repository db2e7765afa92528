//! Lookup tables backing the resource-driven transforms.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Word → replacement table. Also used for keyboard adjacency and
/// misspelling tables, which share the same file shape.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Lexicon {
    entries: BTreeMap<String, Vec<String>>,
}

impl Lexicon {
    /// Parses `word<TAB>r1|r2|...` lines. Blank lines and `#` comments are
    /// skipped. Self-mappings are dropped, as are entries left empty.
    pub fn parse(source: &str) -> Result<Self> {
        let mut entries: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for (lineno, raw) in source.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let (word, rest) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse("lexicon", format!("line {}", lineno + 1), "missing TAB"))?;
            let key = word.trim().to_lowercase();
            if key.is_empty() {
                return Err(Error::parse("lexicon", format!("line {}", lineno + 1), "empty key"));
            }
            let slot = entries.entry(key.clone()).or_default();
            for r in rest.split('|').map(str::trim).filter(|r| !r.is_empty()) {
                if r.to_lowercase() != key && !slot.iter().any(|s| s == r) {
                    slot.push(r.to_string());
                }
            }
        }
        entries.retain(|_, v| !v.is_empty());
        Ok(Lexicon { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn from_pairs<I, K, V>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (K, Vec<V>)>,
        K: Into<String>,
        V: Into<String>,
    {
        let mut entries = BTreeMap::new();
        for (k, vs) in pairs {
            let key: String = k.into().to_lowercase();
            let vs: Vec<String> = vs
                .into_iter()
                .map(Into::into)
                .filter(|v: &String| v.to_lowercase() != key)
                .collect();
            if !vs.is_empty() {
                entries.insert(key, vs);
            }
        }
        Lexicon { entries }
    }

    /// Case-insensitive lookup.
    pub fn get(&self, word: &str) -> Option<&[String]> {
        self.entries.get(&word.to_lowercase()).map(Vec::as_slice)
    }

    pub fn contains(&self, word: &str) -> bool {
        self.get(word).is_some()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Word vectors for nearest-neighbour substitution.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingTable<T> {
    vocab: Vec<String>,
    index: HashMap<String, usize>,
    vectors: Vec<Vec<T>>,
    dim: usize,
    pub neighbor_count: usize,
}

pub const DEFAULT_NEIGHBOR_COUNT: usize = 5;

impl<T: Scalar> EmbeddingTable<T> {
    pub fn new(rows: Vec<(String, Vec<T>)>, neighbor_count: usize) -> Result<Self> {
        let dim = rows.first().map(|(_, v)| v.len()).unwrap_or(0);
        if dim == 0 {
            return Err(Error::parse("embeddings", "row 1", "no vectors"));
        }
        let mut vocab = Vec::with_capacity(rows.len());
        let mut vectors = Vec::with_capacity(rows.len());
        let mut index = HashMap::with_capacity(rows.len());
        for (i, (word, vec)) in rows.into_iter().enumerate() {
            if vec.len() != dim {
                return Err(Error::parse(
                    "embeddings",
                    format!("row {}", i + 1),
                    format!("dimension {} != {dim}", vec.len()),
                ));
            }
            if vec.iter().any(|x| !x.is_finite()) {
                return Err(Error::parse("embeddings", format!("row {}", i + 1), "non-finite value"));
            }
            let key = word.to_lowercase();
            if index.contains_key(&key) {
                continue;
            }
            index.insert(key.clone(), vocab.len());
            vocab.push(key);
            vectors.push(vec);
        }
        Ok(EmbeddingTable {
            vocab,
            index,
            vectors,
            dim,
            neighbor_count,
        })
    }

    /// `word v1 v2 ... vd` per line; the first line fixes d.
    pub fn parse(source: &str, neighbor_count: usize) -> Result<Self> {
        let mut rows = Vec::new();
        for (lineno, line) in source.lines().enumerate() {
            let mut fields = line.split_whitespace();
            let Some(word) = fields.next() else { continue };
            let vec = fields
                .map(|f| {
                    f.parse::<f64>()
                        .ok()
                        .and_then(T::from_f64)
                        .ok_or_else(|| Error::parse("embeddings", format!("line {}", lineno + 1), format!("bad number {f:?}")))
                })
                .collect::<Result<Vec<T>>>()?;
            rows.push((word.to_string(), vec));
        }
        Self::new(rows, neighbor_count)
    }

    pub fn load(path: &Path, neighbor_count: usize) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, neighbor_count)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vocab(&self) -> &[String] {
        &self.vocab
    }

    pub fn contains(&self, word: &str) -> bool {
        self.index.contains_key(&word.to_lowercase())
    }

    pub fn vector(&self, word: &str) -> Option<&[T]> {
        self.index.get(&word.to_lowercase()).map(|&i| self.vectors[i].as_slice())
    }
}

pub fn cosine<T: Scalar>(a: &[T], b: &[T]) -> T {
    let dot: T = a.iter().zip(b).map(|(&x, &y)| x * y).sum();
    let na: T = a.iter().map(|&x| x * x).sum::<T>().sqrt();
    let nb: T = b.iter().map(|&x| x * x).sum::<T>().sqrt();
    if na == T::zero() || nb == T::zero() {
        T::zero()
    } else {
        dot / (na * nb)
    }
}

/// The `k` vocabulary words most cosine-similar to `word`, excluding the
/// word itself. Ties keep vocabulary order. `None` if `word` is out of
/// vocabulary.
pub fn nearest_neighbors<'a, T: Scalar>(table: &'a EmbeddingTable<T>, word: &str, k: usize) -> Option<Vec<&'a str>> {
    let &query = table.index.get(&word.to_lowercase())?;
    let q = &table.vectors[query];
    let mut scored: Vec<(usize, T)> = table
        .vectors
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != query)
        .map(|(i, v)| (i, cosine(q, v)))
        .collect();
    // Stable sort keeps vocabulary order among equal scores.
    scored.sort_by(|a, b| b.1.partial_cmp(&a.1).expect("finite cosine"));
    Some(scored.into_iter().take(k).map(|(i, _)| table.vocab[i].as_str()).collect())
}

/// A loaded resource attached to a transform.
#[derive(Clone, Debug, PartialEq)]
pub enum Resource {
    Lexicon(Lexicon),
    Embeddings(EmbeddingTable<f64>),
}

/// Names of the tables compiled into the crate.
pub mod bundled {
    use super::*;

    pub const THESAURUS: &str = include_str!("../../data/lexicons/thesaurus.tsv");
    pub const INFORMAL: &str = include_str!("../../data/lexicons/informal.tsv");
    pub const PARAPHRASE: &str = include_str!("../../data/lexicons/paraphrase.tsv");
    pub const FORMAL: &str = include_str!("../../data/lexicons/formal.tsv");
    pub const QWERTY: &str = include_str!("../../data/tables/qwerty.tsv");
    pub const MISSPELLINGS: &str = include_str!("../../data/tables/misspellings.tsv");
    pub const EMBEDDINGS: &str = include_str!("../../data/embeddings/toy.vec");

    pub const NAMES: &[&str] = &["thesaurus", "informal", "paraphrase", "formal", "qwerty", "misspellings", "embeddings"];

    pub fn load(name: &str) -> Result<Resource> {
        let lex = |s: &str| Lexicon::parse(s).map(Resource::Lexicon);
        match name {
            "thesaurus" => lex(THESAURUS),
            "informal" => lex(INFORMAL),
            "paraphrase" => lex(PARAPHRASE),
            "formal" => lex(FORMAL),
            "qwerty" => lex(QWERTY),
            "misspellings" => lex(MISSPELLINGS),
            "embeddings" => EmbeddingTable::parse(EMBEDDINGS, DEFAULT_NEIGHBOR_COUNT).map(Resource::Embeddings),
            other => Err(Error::Config(format!("unknown bundled resource {other:?}"))),
        }
    }
}
