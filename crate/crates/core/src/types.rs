//! Domain types shared across the pipeline.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A raw text input with a dataset-unique identifier.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub text: String,
}

impl Document {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Result<Self> {
        let (id, text) = (id.into(), text.into());
        if text.trim().is_empty() {
            return Err(Error::InvalidDocument(format!("document {id:?} has blank text")));
        }
        Ok(Document { id, text })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ClassIndex(pub usize);

impl ClassIndex {
    pub fn value(self) -> usize {
        self.0
    }
}

impl fmt::Display for ClassIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledExample {
    pub doc: Document,
    pub label: ClassIndex,
}

/// Root of all randomness in a run.
///
/// Substreams are derived by hashing, never by advancing a shared generator,
/// so a given (document, transform, sample) triple always sees the same
/// stream regardless of evaluation order or worker count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Seed(pub u64);

impl Seed {
    pub fn value(self) -> u64 {
        self.0
    }

    pub fn derive(self, stream: u64) -> Seed {
        Seed(splitmix64(self.0 ^ splitmix64(stream.wrapping_add(0x9e37_79b9_7f4a_7c15))))
    }

    pub fn derive_str(self, label: &str) -> Seed {
        self.derive(fnv1a64(label.as_bytes()))
    }

    /// ChaCha8 is specified bit-for-bit, so streams are portable.
    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

impl fmt::Display for Seed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub(crate) fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub(crate) fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    #[test]
    fn blank_document_rejected() {
        assert!(Document::new("a", "  \n\t").is_err());
        assert!(Document::new("a", " x ").is_ok());
    }

    #[test]
    fn derived_streams_are_stable_and_distinct() {
        let s = Seed(42);
        assert_eq!(s.derive(3), s.derive(3));
        assert_ne!(s.derive(3), s.derive(4));
        assert_ne!(s.derive_str("doc-1"), s.derive_str("doc-2"));
        // Frozen so that a change to the derivation is caught.
        assert_eq!(fnv1a64(b"a"), 0xaf63_dc4c_8601_ec8c);
        let mut a = s.derive(7).rng();
        let mut b = s.derive(7).rng();
        assert_eq!(a.next_u64(), b.next_u64());
    }
}
