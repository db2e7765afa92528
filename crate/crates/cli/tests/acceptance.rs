//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, Output};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use anyhow::{ensure, Context, Result};
use rand::seq::SliceRandom;
use rand::Rng;
use tta_core::classifier::{Classifier, TrainConfig};
use tta_core::evaluate::report::{self, ReportOptions, REPORT_SCHEMA};
use tta_core::evaluate::{jaccard, paired_t_test, sweep, Evaluator, OutcomeRecord, OutcomeTable, OverlapMatrix};
use tta_core::tokenize::{tokenize, TokenKind};
use tta_core::transforms::{sample_n, TransformClass};
use tta_core::{
    BuiltinModel, ClassIndex, ClassifierHandle, Dataset, Document, Logits, Policy, Preset, Registry, Seed, TransformKind,
};

const TTA: &str = env!("CARGO_BIN_EXE_tta");
const E2E_TRANSFORMS: [&str; 4] = ["word_delete", "word_swap", "synonym", "paraphrase"];

fn toy_model() -> BuiltinModel {
    BuiltinModel::train(&Dataset::toy_train().examples, 2, TrainConfig::default())
        .expect("toy corpus trains")
        .0
}

fn tta(args: &[&str]) -> Output {
    Command::new(TTA).args(args).output().expect("tta runs")
}

fn word_texts(text: &str) -> Vec<String> {
    tokenize(text)
        .tokens
        .into_iter()
        .filter(|t| t.kind == TokenKind::Word)
        .map(|t| t.text)
        .collect()
}

fn validate_report(json: &str) -> Result<()> {
    let schema: serde_json::Value = serde_json::from_str(REPORT_SCHEMA)?;
    let instance: serde_json::Value = serde_json::from_str(json)?;
    let validator = jsonschema::validator_for(&schema).map_err(|e| anyhow::anyhow!("schema: {e}"))?;
    let errors: Vec<String> = validator.iter_errors(&instance).map(|e| e.to_string()).collect();
    ensure!(errors.is_empty(), "report violates schema: {errors:?}");
    Ok(())
}

/// Counts how often each distinct text reaches the backend.
struct Counting<C> {
    inner: C,
    calls: Mutex<HashMap<String, usize>>,
}

impl<C: Classifier> Classifier for Counting<C> {
    fn num_classes(&self) -> usize {
        self.inner.num_classes()
    }
    fn fingerprint(&self) -> String {
        self.inner.fingerprint()
    }
    fn predict_batch(&self, texts: &[String]) -> tta_core::Result<Vec<Logits>> {
        let mut calls = self.calls.lock().unwrap();
        for t in texts {
            *calls.entry(t.clone()).or_default() += 1;
        }
        drop(calls);
        self.inner.predict_batch(texts)
    }
}

/// Logit 0 is a pseudo-random function of the exact text; logit 1 is zero.
struct NoisyHash;

impl Classifier for NoisyHash {
    fn num_classes(&self) -> usize {
        2
    }
    fn fingerprint(&self) -> String {
        "noisy-hash".into()
    }
    fn predict_batch(&self, texts: &[String]) -> tta_core::Result<Vec<Logits>> {
        texts
            .iter()
            .map(|t| {
                let h = Seed(0).derive_str(t).value();
                Logits::new(vec![(h >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0, 0.0])
            })
            .collect()
    }
}

fn preset_policies(registry: &Registry, names: &[&str]) -> Result<Vec<Policy>> {
    let specs = registry.select(names)?;
    let mut out = Vec::new();
    for p in Preset::ALL {
        if p.transforms() == 1 {
            for s in &specs {
                out.push(p.build(std::slice::from_ref(s))?);
            }
        } else {
            out.push(p.build(&specs)?);
        }
    }
    Ok(out)
}

fn accounting_identity() -> Result<String> {
    let start = Instant::now();
    let handle = ClassifierHandle::new(Arc::new(toy_model()))?.cached();
    let full = Dataset::toy_test();
    let registry = Registry::default_all();
    let word = registry.of_class(TransformClass::Word);
    let chars = registry.of_class(TransformClass::Char);
    let mut rng = Seed(0xacc0).rng();
    let mut nonzero = 0;
    for trial in 0..50 {
        let n = rng.gen_range(20..=full.len());
        let mut idx: Vec<usize> = (0..full.len()).collect();
        idx.shuffle(&mut rng);
        idx.truncate(n);
        let ds = full.subset(&idx);
        let preset = *Preset::ALL.choose(&mut rng).unwrap();
        let pool = if rng.gen_bool(0.5) { &word } else { &chars };
        let mut specs = pool.specs().to_vec();
        specs.shuffle(&mut rng);
        specs.truncate(preset.transforms());
        let policy = preset.build(&specs)?;
        let seed = Seed(rng.gen());
        let eval = Evaluator::new(&handle, seed, 1)?.evaluate_policy(&policy, &ds)?;
        let recs = &eval.outcomes.records;
        let base = recs.iter().filter(|r| r.baseline == r.label).count() as i64;
        let aug = recs.iter().filter(|r| r.tta == r.label).count() as i64;
        let corr = eval.outcomes.corrections().len() as i64;
        let corrupt = eval.outcomes.corruptions().len() as i64;
        let scaled = |acc: f64| {
            let x = acc * n as f64;
            ensure!((x - x.round()).abs() < 1e-9, "accuracy {acc} is not k/{n}");
            Ok(x.round() as i64)
        };
        let (acc_tta, acc_base) = (scaled(eval.accuracy)?, scaled(eval.baseline_accuracy)?);
        ensure!(acc_tta == aug && acc_base == base, "trial {trial}: accuracies disagree with records");
        ensure!(
            acc_tta - acc_base == corr - corrupt,
            "trial {trial} ({}): {acc_tta} - {acc_base} != {corr} - {corrupt}",
            policy.name
        );
        nonzero += usize::from(corr + corrupt > 0);
    }
    let secs = start.elapsed().as_secs_f64();
    ensure!(secs < 60.0, "took {secs:.1}s");
    Ok(format!("50 triples exact, {nonzero} with label changes, {secs:.1}s"))
}

fn configuration_cardinality() -> Result<String> {
    let specs = Registry::default_word().select(&E2E_TRANSFORMS)?;
    let ds = Dataset::toy_test();
    let mut seen = Vec::new();
    for (preset, expected) in [
        (Preset::OneSampleOneAug, 2),
        (Preset::OneSampleFourAugs, 5),
        (Preset::FourSamplesOneAug, 5),
        (Preset::FourSamplesFourAugs, 17),
    ] {
        let policy = preset.build(&specs[..preset.transforms()])?;
        ensure!(policy.variant_count() == expected, "{preset}: {}", policy.variant_count());
        for doc in ds.documents() {
            let v = policy.expand(doc, Seed(1))?;
            ensure!(v.len() == expected, "{preset} on {}: {} variants", doc.id, v.len());
            ensure!(v[0] == doc.text, "{preset}: original is not first");
        }
        seen.push(format!("{preset}={expected}"));
    }
    Ok(seen.join(" "))
}

fn zero_augmentation_identity() -> Result<String> {
    let handle = ClassifierHandle::new(Arc::new(toy_model()))?;
    let ds = Dataset::toy_test();
    ensure!(ds.len() == 200);
    let policy = Policy::original_only();
    for doc in ds.documents() {
        let base = handle.predict_logits(std::slice::from_ref(&doc.text))?.remove(0);
        let pred = policy.tta_predict(&handle, doc, Seed(3))?;
        let bits = |l: &Logits| l.values().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        ensure!(bits(&pred.logits) == bits(&base), "{}: logits differ", doc.id);
        ensure!(pred.label == base.argmax(), "{}: label differs", doc.id);
    }
    Ok("200/200 bit-identical".into())
}

fn variance_reduction() -> Result<String> {
    let handle = ClassifierHandle::new(Arc::new(NoisyHash))?;
    let doc = Document::new(
        "noisy",
        "Honestly the article about the school policy was thoughtful and the writer made several \
         reasonable points about people and government spending",
    )?;
    let spec = Registry::default_char().get("char_substitute").cloned().context("registered")?;
    let std_at = |n: usize| -> Result<f64> {
        let policy = Policy::single(spec.clone(), n)?.without_original();
        let xs: Vec<f64> = (0..1000u64)
            .map(|s| Ok(policy.tta_predict(&handle, &doc, Seed(s))?.logits.values()[0]))
            .collect::<Result<_>>()?;
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        Ok((xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt())
    };
    let (one, four) = (std_at(1)?, std_at(4)?);
    let ratio = four / one;
    ensure!(ratio <= 0.7, "std ratio {ratio:.3} (1 sample {one:.4}, 4 samples {four:.4})");
    Ok(format!("std ratio {ratio:.3} over 1000 seeds"))
}

fn transform_invariants() -> Result<String> {
    let texts = [
        "Honestly, this article is really thoughtful and the writer makes a good point.",
        "I think the mayor's plan is stupid; people deserve a better school policy!",
        "a an the of to it is",
        "Clearly",
    ];
    let registry = Registry::default_all();
    for spec in registry.specs() {
        for text in texts {
            let before = tokenize(text).tokens;
            let wb = word_texts(text);
            for s in 0..1000u64 {
                let seed = Seed(s).derive_str(&spec.name);
                let out = &sample_n(spec, text, 1, seed)?[0];
                let after = tokenize(out).tokens;
                let wa = word_texts(out);
                let ctx = || format!("{} seed {s} on {text:?} -> {out:?}", spec.name);
                match spec.kind.class() {
                    TransformClass::Char => {
                        ensure!(wa.len() == wb.len(), "word count changed: {}", ctx());
                        ensure!(after.len() == before.len(), "token count changed: {}", ctx());
                        for (b, a) in before.iter().zip(&after) {
                            if b.text != a.text {
                                ensure!(b.kind == TokenKind::Word, "non-word token edited: {}", ctx());
                                ensure!(b.text.chars().count() >= spec.min_word_len, "short word edited: {}", ctx());
                            }
                        }
                    }
                    TransformClass::Word => match spec.kind {
                        TransformKind::WordDelete => {
                            if wb.len() > 1 {
                                ensure!(wa.len() + 1 == wb.len(), "not exactly one word removed: {}", ctx());
                                let gap = (0..wb.len()).find(|&i| i == wa.len() || wb[i] != wa[i]).unwrap();
                                ensure!(wb[..gap] == wa[..gap] && wb[gap + 1..] == wa[gap..], "{}", ctx());
                            }
                        }
                        TransformKind::WordSplit => {
                            ensure!(wa.len() == wb.len() + 1, "{}", ctx());
                        }
                        _ => {
                            ensure!(after.len() == before.len(), "token count changed: {}", ctx());
                            let changed: Vec<_> =
                                before.iter().zip(&after).filter(|(b, a)| b.text != a.text).collect();
                            ensure!(changed.iter().all(|(b, _)| b.kind == TokenKind::Word), "{}", ctx());
                            let limit = if spec.kind == TransformKind::WordSwap { 2 } else { 1 };
                            ensure!(changed.len() <= limit, "too many tokens changed: {}", ctx());
                        }
                    },
                }
            }
        }
    }

    // The same seed reproduces across separate processes, and matches the
    // in-process result.
    let text = "Honestly, this article is really thoughtful and the writer makes a good point.";
    for kind in TransformKind::ALL {
        let args = ["--seed", "424242", "augment", "--kind", kind.as_str(), "-n", "4", text];
        let (a, b) = (tta(&args), tta(&args));
        ensure!(a.status.success(), "{kind}: {}", String::from_utf8_lossy(&a.stderr));
        ensure!(a.stdout == b.stdout, "{kind}: two invocations differ");
        let printed: Vec<String> = String::from_utf8(a.stdout)?.lines().skip(1).map(String::from).collect();
        let spec = tta_core::TransformSpec::bundled(kind)?;
        let doc = Document::new("input", text)?;
        let local = Policy::single(spec, 4)?.without_original().expand(&doc, Seed(424242))?;
        ensure!(printed == local, "{kind}: process output differs from library");
    }
    Ok(format!(
        "{} transforms x {} texts x 1000 seeds; 12 kinds reproducible across processes",
        registry.len(),
        texts.len()
    ))
}

/// Two-sided p for Student's t with odd `df`, from the closed-form series
/// A(t|df) = (2/pi) [theta + sin(theta) (cos(theta) + (2/3) cos^3(theta) + ...)].
fn textbook_t_p_odd_df(t: f64, df: usize) -> f64 {
    assert!(df % 2 == 1);
    let theta = (t.abs() / (df as f64).sqrt()).atan();
    let (s, c) = theta.sin_cos();
    let mut sum = 0.0;
    if df > 1 {
        let mut term = c;
        sum = term;
        let mut k = 3;
        while k < df {
            term *= (k - 1) as f64 / k as f64 * c * c;
            sum += term;
            k += 2;
        }
    }
    let a = 2.0 / PI * (theta + s * sum);
    1.0 - a
}

fn textbook_paired_t(before: &[f64], after: &[f64]) -> (f64, f64) {
    let n = before.len() as f64;
    let d: Vec<f64> = after.iter().zip(before).map(|(a, b)| a - b).collect();
    let mean = d.iter().sum::<f64>() / n;
    let var = d.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    let t = mean / (var.sqrt() / n.sqrt());
    (t, textbook_t_p_odd_df(t, before.len() - 1))
}

fn t_test_oracle() -> Result<String> {
    // Sanity of the oracle itself: df = 1 is the Cauchy distribution.
    ensure!((textbook_t_p_odd_df(1.0, 1) - 0.5).abs() < 1e-15);
    let mut rng = Seed(0x7e57).rng();
    let mut worst: f64 = 0.0;
    for table in 0..100 {
        let before: Vec<f64> = (0..10).map(|_| rng.gen_range(0.70..0.95)).collect();
        let shift = rng.gen_range(-0.02..0.02);
        let after: Vec<f64> = before.iter().map(|b| b + shift + rng.gen_range(-0.01..0.01)).collect();
        let got = paired_t_test(&before, &after)?;
        let (t, p) = textbook_paired_t(&before, &after);
        let gt = got.t.context("finite t")?;
        ensure!(got.df == 9);
        ensure!((gt - t).abs() <= 1e-9, "table {table}: t {gt} vs {t}");
        ensure!((got.p_value - p).abs() <= 1e-9, "table {table}: p {} vs {p}", got.p_value);
        worst = worst.max((gt - t).abs()).max((got.p_value - p).abs());
    }
    Ok(format!("100 tables, max abs error {worst:.1e}"))
}

fn jaccard_properties() -> Result<String> {
    let a: BTreeSet<u32> = [1, 2, 3].into();
    let b: BTreeSet<u32> = [2, 3, 4].into();
    ensure!(jaccard::<f64, _>(&a, &b) == Some(0.5), "{{1,2,3}} vs {{2,3,4}}");
    ensure!(jaccard::<f64, u32>(&BTreeSet::new(), &BTreeSet::new()).is_none());

    let mut rng = Seed(0x1ac).rng();
    let mut checked = 0;
    for _ in 0..200 {
        let n = rng.gen_range(1..60);
        let k = rng.gen_range(2..7);
        let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..2)).collect();
        let baseline: Vec<usize> = (0..n).map(|_| rng.gen_range(0..2)).collect();
        let tables: Vec<OutcomeTable> = (0..k)
            .map(|_| {
                OutcomeTable::new(
                    (0..n)
                        .map(|i| OutcomeRecord {
                            id: format!("ex{i}"),
                            label: ClassIndex(labels[i]),
                            baseline: ClassIndex(baseline[i]),
                            tta: ClassIndex(rng.gen_range(0..2)),
                        })
                        .collect(),
                )
            })
            .collect();
        let m = OverlapMatrix::from_tables(&tables);
        for (matrix, want_baseline_right) in [(&m.corrections, false), (&m.corruptions, true)] {
            let sets: Vec<HashSet<usize>> = tables
                .iter()
                .map(|t| {
                    (0..n)
                        .filter(|&i| {
                            let r = &t.records[i];
                            (r.baseline == r.label) == want_baseline_right && (r.tta == r.label) != want_baseline_right
                        })
                        .collect()
                })
                .collect();
            for i in 0..k {
                for j in 0..k {
                    let v = matrix[i][j];
                    ensure!(v == matrix[j][i], "asymmetric at {i},{j}");
                    let union = sets[i].union(&sets[j]).count();
                    let inter = sets[i].intersection(&sets[j]).count();
                    let oracle = (union > 0).then(|| inter as f64 / union as f64);
                    ensure!(v == oracle, "entry {i},{j}: {v:?} vs {oracle:?}");
                    if let Some(x) = v {
                        ensure!((0.0..=1.0).contains(&x));
                    }
                    if i == j {
                        ensure!(v == if sets[i].is_empty() { None } else { Some(1.0) }, "diagonal {i}");
                    }
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("exact example plus {checked} randomized entries"))
}

fn sweep_enumeration() -> Result<String> {
    let policies = sweep::enumerate(&Registry::default_word(), Preset::FourSamplesFourAugs)?;
    ensure!(policies.len() == 126, "{} policies", policies.len());
    let names: HashSet<&str> = policies.iter().map(|p| p.name.as_str()).collect();
    ensure!(names.len() == 126, "duplicate policies");

    let dir = tempfile::tempdir()?;
    let data = dir.path().join("test.csv");
    let full = Dataset::toy_test();
    let mut csv = String::from("id,text,label\n");
    for ex in full.examples.iter().take(40) {
        csv.push_str(&format!("{},\"{}\",{}\n", ex.doc.id, ex.doc.text.replace('"', "\"\""), ex.label.0));
    }
    std::fs::write(&data, csv)?;
    let model = dir.path().join("model.bin");
    let trained = tta(&["train-builtin", "--train", "toy-train", "-o", model.to_str().unwrap()]);
    ensure!(trained.status.success(), "{}", String::from_utf8_lossy(&trained.stderr));

    let run = |out: &Path, extra: &[&str]| {
        let mut args = vec![
            "--seed",
            "5",
            "sweep",
            "--mode",
            "4s4a",
            "--dataset",
            data.to_str().unwrap(),
            "--model",
            model.to_str().unwrap(),
            "-o",
            out.to_str().unwrap(),
        ];
        args.extend_from_slice(extra);
        tta(&args)
    };
    let (whole, parts) = (dir.path().join("whole"), dir.path().join("parts"));
    let straight = run(&whole, &[]);
    ensure!(straight.status.success(), "{}", String::from_utf8_lossy(&straight.stderr));
    let cut = run(&parts, &["--stop-after", "50"]);
    ensure!(cut.status.code() == Some(1), "interrupted sweep exit {:?}", cut.status.code());
    let resumed = run(&parts, &["--resume"]);
    ensure!(resumed.status.success(), "{}", String::from_utf8_lossy(&resumed.stderr));
    for file in ["sweep.csv", "sweep.json"] {
        let (a, b) = (std::fs::read(whole.join(file))?, std::fs::read(parts.join(file))?);
        ensure!(a == b, "{file} differs after resume");
    }
    let rows = std::fs::read_to_string(whole.join("sweep.csv"))?.lines().count() - 1;
    ensure!(rows == 126, "{rows} rows");
    Ok("126 policies; resumed output byte-identical".into())
}

struct EndToEnd {
    summary: String,
    originals: Vec<String>,
    calls: HashMap<String, usize>,
}

fn end_to_end() -> Result<EndToEnd> {
    let start = Instant::now();
    let backend = Arc::new(Counting {
        inner: toy_model(),
        calls: Mutex::new(HashMap::new()),
    });
    let handle = ClassifierHandle::new(backend.clone())?.cached();
    let test = Dataset::toy_test();
    ensure!(Dataset::toy_train().len() == 500 && test.len() == 200);
    let policies = preset_policies(&Registry::default_word(), &E2E_TRANSFORMS)?;
    let evaluator = Evaluator::new(&handle, Seed(0), 0)?;
    let rep = report::build(&evaluator, &policies, &test, &ReportOptions::default())?;
    let secs = start.elapsed().as_secs_f64();
    ensure!(secs < 60.0, "took {secs:.1}s");
    validate_report(&rep.to_json()?)?;
    let changed: Vec<&str> = rep
        .policies
        .iter()
        .filter(|p| p.policy.entries.iter().any(|e| e.n_samples > 1))
        .filter(|p| !p.corrections.is_empty() || !p.corruptions.is_empty())
        .map(|p| p.policy.name.as_str())
        .collect();
    ensure!(!changed.is_empty(), "no multi-sample policy changed a prediction");

    // The CLI writes the same kind of report to disk.
    let dir = tempfile::tempdir()?;
    let out = tta(&["evaluate", "--dataset", "toy-test", "--model", "toy", "--preset", "all", "-o", dir.path().to_str().unwrap()]);
    ensure!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    validate_report(&std::fs::read_to_string(dir.path().join("report.json"))?)?;
    ensure!(dir.path().join("summary.csv").exists());

    let calls = backend.calls.lock().unwrap().clone();
    Ok(EndToEnd {
        summary: format!(
            "{} policies in {secs:.2}s, schema-valid, {} multi-sample policies changed predictions",
            rep.policies.len(),
            changed.len()
        ),
        originals: test.documents().map(|d| d.text.clone()).collect(),
        calls,
    })
}

fn cache_effectiveness(run: &EndToEnd) -> Result<String> {
    for text in &run.originals {
        let n = run.calls.get(text).copied().unwrap_or(0);
        ensure!(n == 1, "original {text:?} reached the backend {n} times");
    }
    let repeats = run.calls.values().filter(|&&n| n > 1).count();
    ensure!(repeats == 0, "{repeats} texts scored more than once");
    Ok(format!(
        "{} originals scored once each; {} distinct texts total",
        run.originals.len(),
        run.calls.len()
    ))
}

fn report_line(id: usize, name: &str, outcome: std::thread::Result<Result<String>>, elapsed: Duration) -> bool {
    let (ok, detail) = match outcome {
        Ok(Ok(d)) => (true, d),
        Ok(Err(e)) => (false, format!("{e:#}")),
        Err(panic) => (
            false,
            panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()),
        ),
    };
    println!(
        "criterion {id:>2} {} {name}: {detail} ({:.1}s)",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    ok
}

fn main() {
    type Check = fn() -> Result<String>;
    let checks: [(usize, &str, Check); 8] = [
        (1, "accounting identity", accounting_identity),
        (2, "configuration cardinality", configuration_cardinality),
        (3, "zero-augmentation identity", zero_augmentation_identity),
        (4, "variance reduction", variance_reduction),
        (5, "transform invariants", transform_invariants),
        (6, "paired t-test oracle", t_test_oracle),
        (7, "jaccard overlap properties", jaccard_properties),
        (8, "sweep enumeration and resume", sweep_enumeration),
    ];
    let mut all = true;
    for (id, name, check) in checks {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check));
        all &= report_line(id, name, outcome, start.elapsed());
    }

    let start = Instant::now();
    let e2e = catch_unwind(end_to_end);
    let elapsed = start.elapsed();
    let (nine, ten) = match e2e {
        Ok(Ok(run)) => {
            let ten = cache_effectiveness(&run);
            (Ok(Ok(run.summary)), Ok(ten))
        }
        Ok(Err(e)) => {
            let msg = format!("{e:#}");
            (Ok(Err(e)), Ok(Err(anyhow::anyhow!("end-to-end run failed: {msg}"))))
        }
        Err(p) => (Err(p), Ok(Err(anyhow::anyhow!("end-to-end run panicked")))),
    };
    all &= report_line(9, "end-to-end toy run", nine, elapsed);
    all &= report_line(10, "baseline cache effectiveness", ten, Duration::ZERO);

    if !all {
        eprintln!("acceptance: at least one criterion failed");
        std::process::exit(1);
    }
    println!("acceptance: all criteria passed");
}

