//! Regenerates the bundled toy corpus under `data/toy/`.
//!
//! Two classes of short comments: 0 = civil, 1 = toxic. Training text draws
//! mostly from a core vocabulary; test text draws evenly from core and rare
//! synonyms, so some test words are unseen at training time. Negation, mixed
//! sentences and 5% label noise keep the classifier imperfect.
//!
//! ```text
//! cargo run -p tta-core --example make_toy_corpus
//! ```

use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_221;
const TRAIN: usize = 500;
const TEST: usize = 200;
const LABEL_NOISE: f64 = 0.05;

struct Pool {
    core: &'static [&'static str],
    rare: &'static [&'static str],
}

const CIVIL_ADJ: Pool = Pool {
    core: &["good", "great", "nice", "helpful", "smart", "fair", "honest", "interesting", "reasonable", "thoughtful"],
    rare: &["decent", "excellent", "pleasant", "useful", "clever", "balanced", "sincere", "engaging", "sensible", "considerate", "brilliant", "wise"],
};

const TOXIC_ADJ: Pool = Pool {
    core: &["stupid", "idiotic", "dumb", "pathetic", "awful", "terrible", "disgusting", "ridiculous", "worthless", "clueless"],
    rare: &["foolish", "moronic", "dense", "pitiful", "dreadful", "horrible", "revolting", "absurd", "useless", "ignorant", "nasty", "lame"],
};

const TOXIC_NOUN: Pool = Pool {
    core: &["idiot", "moron", "liar", "loser", "clown"],
    rare: &["fool", "imbecile", "fraud", "dolt", "dummy"],
};

const TOPIC: &[&str] = &[
    "comment", "article", "idea", "policy", "plan", "writer", "argument", "opinion", "story", "report", "proposal", "mayor",
    "government", "law", "vote", "point", "school", "city",
];

const OPENER: &[&str] = &[
    "I think", "I believe", "Honestly", "Clearly", "Actually", "In my opinion", "I really think", "Frankly", "It seems",
    "Definitely",
];

const INTENSIFIER: &[&str] = &["really", "very", "truly", "completely", "absolutely", "quite", "so"];

const CLOSER: &[&str] = &[
    "thanks for sharing",
    "read it again",
    "people should know about this",
    "just my two cents",
    "see you at the next meeting",
    "that is all",
    "we will see tomorrow",
    "nothing more to say",
];

fn pick<'a>(rng: &mut ChaCha8Rng, xs: &[&'a str]) -> &'a str {
    xs.choose(rng).expect("non-empty word list")
}

fn word(rng: &mut ChaCha8Rng, pool: &Pool, rare_rate: f64) -> &'static str {
    if rng.gen_bool(rare_rate) {
        pick(rng, pool.rare)
    } else {
        pick(rng, pool.core)
    }
}

fn article(w: &str) -> &'static str {
    if w.starts_with(['a', 'e', 'i', 'o', 'u']) {
        "an"
    } else {
        "a"
    }
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

/// One comment and its clean label.
fn comment(rng: &mut ChaCha8Rng, rare_rate: f64) -> (String, u8) {
    let topic = pick(rng, TOPIC);
    let topic2 = pick(rng, TOPIC);
    let opener = pick(rng, OPENER);
    let intens = pick(rng, INTENSIFIER);
    let closer = pick(rng, CLOSER);
    let civil = word(rng, &CIVIL_ADJ, rare_rate);
    let toxic = word(rng, &TOXIC_ADJ, rare_rate);
    let insult = word(rng, &TOXIC_NOUN, rare_rate);
    match rng.gen_range(0..10) {
        0 | 1 => (format!("{opener} this {topic} is {intens} {civil}, {closer}."), 0),
        2 | 3 => (format!("{opener} this {topic} is {intens} {toxic}, {closer}."), 1),
        4 => (format!("What a {civil} {topic}. The {topic2} is {intens} {civil} too."), 0),
        5 => (format!("Only {} {insult} would write this {topic}, {closer}.", article(insult)), 1),
        6 => (format!("{opener} the {topic} is not {toxic}, it is {civil}."), 0),
        7 => (format!("The {topic} is {civil} but the {topic2} is {intens} {toxic}."), 1),
        8 => (format!("{} {topic}, not {civil} at all, {closer}.", capitalize(toxic)), 1),
        _ => (format!("You are not {} {insult}, the {topic} was {civil} and {closer}.", article(insult)), 0),
    }
}

fn write(path: &Path, prefix: &str, n: usize, rare_rate: f64, rng: &mut ChaCha8Rng) -> csv::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["id", "text", "label"])?;
    for i in 0..n {
        let (text, clean) = comment(rng, rare_rate);
        let label = if rng.gen_bool(LABEL_NOISE) { 1 - clean } else { clean };
        w.write_record([format!("{prefix}-{i:04}"), text, label.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

fn main() -> csv::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/toy");
    std::fs::create_dir_all(&dir)?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    write(&dir.join("train.csv"), "train", TRAIN, 0.1, &mut rng)?;
    write(&dir.join("test.csv"), "test", TEST, 0.5, &mut rng)?;
    println!("wrote {TRAIN} train and {TEST} test examples to {}", dir.display());
    Ok(())
}
