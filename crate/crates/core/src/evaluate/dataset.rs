//! Labelled corpora read from CSV (`id,text,label`) or JSONL.

use std::collections::HashSet;
use std::io::BufRead;
use std::path::Path;

use serde::Deserialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::types::{ClassIndex, Document, LabeledExample};

#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub num_classes: usize,
    pub examples: Vec<LabeledExample>,
}

#[derive(Deserialize)]
struct CsvRow {
    id: String,
    text: String,
    label: usize,
}

impl Dataset {
    /// Validates ids and labels. `num_classes` defaults to `max(label) + 1`
    /// (at least 2).
    pub fn new(name: impl Into<String>, examples: Vec<LabeledExample>, num_classes: Option<usize>) -> Result<Self> {
        let name = name.into();
        let observed = examples.iter().map(|e| e.label.0 + 1).max().unwrap_or(0).max(2);
        let num_classes = num_classes.unwrap_or(observed);
        let mut ids = HashSet::new();
        for e in &examples {
            if !ids.insert(e.doc.id.as_str()) {
                return Err(Error::InvalidDocument(format!("duplicate id {:?} in {name}", e.doc.id)));
            }
            if e.label.0 >= num_classes {
                return Err(Error::InvalidDocument(format!(
                    "label {} of {:?} outside [0, {num_classes})",
                    e.label, e.doc.id
                )));
            }
        }
        Ok(Dataset {
            name,
            num_classes,
            examples,
        })
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn documents(&self) -> impl Iterator<Item = &Document> {
        self.examples.iter().map(|e| &e.doc)
    }

    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            name: self.name.clone(),
            num_classes: self.num_classes,
            examples: indices.iter().map(|&i| self.examples[i].clone()).collect(),
        }
    }

    /// Picks the format from the extension: `.jsonl`/`.json` or CSV otherwise.
    pub fn load(path: &Path) -> Result<Self> {
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "dataset".into());
        let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("").to_ascii_lowercase();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let examples = if ext == "jsonl" || ext == "json" {
            read_jsonl(std::io::BufReader::new(file), &path.display().to_string())?
        } else {
            read_csv(file, &path.display().to_string())?
        };
        Self::new(name, examples, None)
    }

    /// Bundled 500-example training split of the two-class toy corpus
    /// (0 = civil, 1 = toxic).
    pub fn toy_train() -> Self {
        Self::bundled("toy-train", include_str!("../../data/toy/train.csv"))
    }

    /// Bundled 200-example test split of the toy corpus.
    pub fn toy_test() -> Self {
        Self::bundled("toy-test", include_str!("../../data/toy/test.csv"))
    }

    /// `toy-train` or `toy-test`.
    pub fn bundled_by_name(name: &str) -> Option<Self> {
        match name {
            "toy-train" => Some(Self::toy_train()),
            "toy-test" => Some(Self::toy_test()),
            _ => None,
        }
    }

    fn bundled(name: &str, src: &str) -> Self {
        let examples = read_csv(src.as_bytes(), name).expect("bundled corpus parses");
        Self::new(name, examples, Some(2)).expect("bundled corpus is valid")
    }
}

pub fn read_csv<R: std::io::Read>(reader: R, origin: &str) -> Result<Vec<LabeledExample>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let mut out = Vec::new();
    for (i, row) in rdr.deserialize::<CsvRow>().enumerate() {
        let row = row.map_err(|e| Error::parse("dataset", format!("{origin} record {}", i + 1), e))?;
        out.push(LabeledExample {
            doc: Document::new(row.id, row.text)?,
            label: ClassIndex(row.label),
        });
    }
    Ok(out)
}

pub fn read_jsonl<R: BufRead>(reader: R, origin: &str) -> Result<Vec<LabeledExample>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let at = || format!("{origin}:{}", i + 1);
        let line = line.map_err(|e| Error::parse("dataset", at(), e))?;
        if line.trim().is_empty() {
            continue;
        }
        let v: Value = serde_json::from_str(&line).map_err(|e| Error::parse("dataset", at(), e))?;
        let id = match v.get("id") {
            Some(Value::String(s)) => s.clone(),
            Some(Value::Number(n)) => n.to_string(),
            _ => return Err(Error::parse("dataset", at(), "missing id")),
        };
        let text = v
            .get("text")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::parse("dataset", at(), "missing text"))?;
        let label = v
            .get("label")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::parse("dataset", at(), "label must be a non-negative integer"))?;
        out.push(LabeledExample {
            doc: Document::new(id, text)?,
            label: ClassIndex(label as usize),
        });
    }
    Ok(out)
}
