//! Named collections of configured transforms.

use super::{bundled, TransformClass, TransformKind, TransformSpec};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Registry {
    specs: Vec<TransformSpec>,
}

impl Registry {
    pub fn new(specs: Vec<TransformSpec>) -> Result<Self> {
        let mut names = std::collections::HashSet::new();
        for s in &specs {
            s.validate()?;
            if !names.insert(s.name.as_str()) {
                return Err(Error::Config(format!("duplicate transform name {:?}", s.name)));
            }
        }
        Ok(Registry { specs })
    }

    /// The nine word-level transforms shipped with the crate. Two kinds
    /// appear twice, each time backed by a different bundled lexicon.
    pub fn default_word() -> Self {
        let with = |kind, name: &str, res: &str| -> TransformSpec {
            TransformSpec::new(kind)
                .named(name)
                .with_resource(bundled::load(res).expect("bundled resource"))
        };
        use TransformKind::*;
        Registry {
            specs: vec![
                TransformSpec::new(WordDelete).named("word_delete"),
                TransformSpec::new(WordSwap).named("word_swap"),
                TransformSpec::new(WordSplit).named("word_split"),
                with(SpellingError, "spelling", "misspellings"),
                with(SynonymLexicon, "synonym", "thesaurus"),
                with(SynonymLexicon, "synonym_informal", "informal"),
                with(ParaphraseLexicon, "paraphrase", "paraphrase"),
                with(ParaphraseLexicon, "paraphrase_formal", "formal"),
                with(EmbeddingSubstitute, "embedding", "embeddings"),
            ],
        }
    }

    pub fn default_char() -> Self {
        use TransformKind::*;
        Registry {
            specs: vec![
                TransformSpec::new(CharInsert).named("char_insert"),
                TransformSpec::new(CharDelete).named("char_delete"),
                TransformSpec::new(CharSubstitute).named("char_substitute"),
                TransformSpec::new(CharSwap).named("char_swap"),
                TransformSpec::bundled(KeyboardTypo).expect("bundled resource").named("keyboard_typo"),
            ],
        }
    }

    /// Word transforms followed by character transforms.
    pub fn default_all() -> Self {
        let mut specs = Self::default_word().specs;
        specs.extend(Self::default_char().specs);
        Registry { specs }
    }

    pub fn specs(&self) -> &[TransformSpec] {
        &self.specs
    }

    pub fn len(&self) -> usize {
        self.specs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.specs.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&TransformSpec> {
        self.specs.iter().find(|s| s.name == name)
    }

    pub fn select(&self, names: &[impl AsRef<str>]) -> Result<Vec<TransformSpec>> {
        names
            .iter()
            .map(|n| {
                self.get(n.as_ref())
                    .cloned()
                    .ok_or_else(|| Error::Config(format!("no transform named {:?}", n.as_ref())))
            })
            .collect()
    }

    pub fn of_class(&self, class: TransformClass) -> Registry {
        Registry {
            specs: self.specs.iter().filter(|s| s.class() == class).cloned().collect(),
        }
    }

    pub fn truncated(&self, n: usize) -> Registry {
        Registry {
            specs: self.specs.iter().take(n).cloned().collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_registry_shape() {
        let w = Registry::default_word();
        assert_eq!(w.len(), 9);
        assert!(w.specs().iter().all(|s| s.class() == TransformClass::Word));
        assert_eq!(Registry::default_char().len(), 5);
        let all = Registry::default_all();
        Registry::new(all.specs().to_vec()).unwrap();
        assert_eq!(all.of_class(TransformClass::Char).len(), 5);
    }

    #[test]
    fn duplicate_names_rejected() {
        let s = TransformSpec::new(TransformKind::WordDelete);
        assert!(Registry::new(vec![s.clone(), s]).is_err());
    }

    #[test]
    fn select_by_name() {
        let w = Registry::default_word();
        let got = w.select(&["synonym", "word_swap"]).unwrap();
        assert_eq!(got[0].kind, TransformKind::SynonymLexicon);
        assert!(w.select(&["missing"]).is_err());
    }
}
