use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use tta_core::classifier::{SubprocessClassifier, TrainConfig};
use tta_core::evaluate::report::{self, ReportOptions, SUMMARY_FILE};
use tta_core::evaluate::sweep::{self, SweepOptions};
use tta_core::evaluate::Evaluator;
use tta_core::transforms::{EmbeddingTable, Lexicon, Resource, DEFAULT_NEIGHBOR_COUNT};
use tta_core::{
    BuiltinModel, ClassifierHandle, Dataset, Document, EvaluationReport, Policy, PredictionCache, Preset, Registry, Seed,
    TransformSpec,
};

use crate::config::{pick, pick_list, RunConfig};
use crate::{AugmentArgs, Cli, EvaluateArgs, ModelArgs, PolicyArgs, PredictArgs, ReportArgs, SweepArgs, TrainArgs, UsageError};

pub const DEFAULT_TRANSFORMS: [&str; 4] = ["word_delete", "word_swap", "synonym", "paraphrase"];
pub const DEFAULT_OUTPUT: &str = "tta-out";
pub const CACHE_FILE: &str = "predictions.jsonl";
pub const CHECKPOINT_FILE: &str = "sweep.checkpoint.jsonl";
pub const SWEEP_CSV: &str = "sweep.csv";
pub const SWEEP_JSON: &str = "sweep.json";

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

struct Common {
    cfg: RunConfig,
    seed: Seed,
    workers: usize,
}

impl Common {
    fn new(cli: &Cli) -> Result<Self> {
        let cfg = RunConfig::load_or_default(cli.config.as_deref())?;
        Ok(Common {
            seed: Seed(pick(cli.seed, &cfg.seed).unwrap_or(0)),
            workers: pick(cli.workers, &cfg.workers).unwrap_or(0),
            cfg,
        })
    }

    fn output(&self, flag: &Option<PathBuf>) -> PathBuf {
        pick(flag.clone(), &self.cfg.output).unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT))
    }
}

fn load_dataset(spec: Option<String>) -> Result<Dataset> {
    let spec = spec.ok_or_else(|| usage("no dataset given (--dataset or \"dataset\" in --config)"))?;
    if let Some(ds) = Dataset::bundled_by_name(&spec) {
        return Ok(ds);
    }
    let path = Path::new(&spec);
    if !path.exists() {
        return Err(usage(format!("dataset {spec} does not exist")));
    }
    Ok(Dataset::load(path)?)
}

/// A classifier handle plus where its cache persists, if anywhere.
struct Backend {
    handle: ClassifierHandle,
    cache_file: Option<PathBuf>,
}

impl Backend {
    fn open(args: &ModelArgs, common: &Common, output: Option<&Path>) -> Result<Self> {
        let cfg = &common.cfg;
        let model = pick(args.model.clone(), &cfg.model);
        let command = match &args.subprocess {
            Some(s) => Some(s.split_whitespace().map(str::to_string).collect::<Vec<_>>()),
            None if args.model.is_none() => cfg.subprocess.clone(),
            None => None,
        };
        let handle = match (model, command) {
            (_, Some(cmd)) => {
                let secs = pick(args.timeout, &cfg.timeout_secs);
                let timeout = secs.map_or(tta_core::classifier::subprocess::DEFAULT_TIMEOUT, Duration::from_secs_f64);
                ClassifierHandle::new(Arc::new(SubprocessClassifier::spawn(&cmd, timeout)?))?
            }
            (Some(m), None) if m == "toy" => {
                let (model, _) = BuiltinModel::train(&Dataset::toy_train().examples, 2, TrainConfig::default())?;
                ClassifierHandle::new(Arc::new(model))?
            }
            (Some(m), None) => {
                let path = Path::new(&m);
                if !path.exists() {
                    return Err(usage(format!("model file {m} does not exist")));
                }
                ClassifierHandle::new(Arc::new(BuiltinModel::load(path)?))?
            }
            (None, None) => return Err(usage("no classifier given (--model or --subprocess)")),
        };
        let enabled = !args.no_cache && cfg.cache.unwrap_or(true);
        if !enabled {
            return Ok(Backend {
                handle,
                cache_file: None,
            });
        }
        let dir = std::env::var_os("TTA_CACHE_DIR")
            .map(PathBuf::from)
            .or_else(|| output.map(|o| o.join("cache")));
        let cache_file = dir.map(|d| d.join(CACHE_FILE));
        let cache = match &cache_file {
            Some(f) => PredictionCache::load(f)?,
            None => PredictionCache::new(),
        };
        Ok(Backend {
            handle: handle.with_cache(Arc::new(cache)),
            cache_file,
        })
    }

    fn save(&self) -> Result<()> {
        if let (Some(file), Some(cache)) = (&self.cache_file, self.handle.cache()) {
            cache.save(file)?;
        }
        Ok(())
    }

    /// Persists the cache whatever the outcome of `result`, and points at it
    /// on failure so the run can be repeated without recomputation.
    fn finish<T>(&self, result: tta_core::Result<T>) -> Result<T> {
        let saved = self.save();
        match result {
            Ok(v) => {
                saved?;
                Ok(v)
            }
            Err(e) => {
                let err = anyhow::Error::new(e);
                Err(match (&self.cache_file, saved) {
                    (Some(f), Ok(())) => err.context(format!("predictions so far are cached in {}", f.display())),
                    _ => err,
                })
            }
        }
    }
}

fn resolve_policies(args: &PolicyArgs, cfg: &RunConfig, registry: &Registry) -> Result<Vec<Policy>> {
    let mut policies = Vec::new();
    if let Some(path) = pick(args.policy.clone(), &cfg.policy) {
        if !path.exists() {
            return Err(usage(format!("policy file {} does not exist", path.display())));
        }
        policies.push(Policy::load(&path)?);
    }
    let mut names = pick_list(&args.transforms, &cfg.transforms);
    if names.is_empty() {
        names = DEFAULT_TRANSFORMS.iter().map(|s| s.to_string()).collect();
    }
    for preset in pick_list(&args.preset, &cfg.presets) {
        let presets: Vec<Preset> = match preset.trim() {
            "original" => {
                policies.push(Policy::original_only());
                continue;
            }
            "all" => Preset::ALL.to_vec(),
            p => vec![p.parse::<Preset>()?],
        };
        let specs = registry.select(&names)?;
        for p in presets {
            if p.transforms() == 1 {
                for s in &specs {
                    policies.push(p.build(std::slice::from_ref(s))?);
                }
            } else {
                policies.push(p.build(&specs)?);
            }
        }
    }
    Ok(policies)
}

pub fn augment(cli: &Cli, args: &AugmentArgs) -> Result<()> {
    let common = Common::new(cli)?;
    if args.n == 0 {
        return Err(usage("-n must be at least 1"));
    }
    let mut spec = match (&args.transform, args.kind) {
        (Some(name), _) => Registry::default_all()
            .get(name)
            .cloned()
            .ok_or_else(|| usage(format!("no transform named {name:?}")))?,
        (None, Some(kind)) => TransformSpec::new(kind),
        (None, None) => return Err(usage("--kind or --transform is required")),
    };
    if let Some(p) = &args.lexicon {
        spec = spec.with_resource(Resource::Lexicon(Lexicon::load(p)?));
    } else if let Some(p) = &args.embeddings {
        spec = spec.with_resource(Resource::Embeddings(EmbeddingTable::load(p, DEFAULT_NEIGHBOR_COUNT)?));
    } else if args.transform.is_none() && spec.kind.requires_resource() {
        spec = TransformSpec::bundled(spec.kind)?;
    }
    let doc = Document::new(&args.id, &args.text)?;
    let variants = Policy::single(spec.clone(), args.n)?.without_original().expand(&doc, common.seed)?;
    println!("# seed {} transform {} id {}", common.seed.value(), spec.name, doc.id);
    for v in variants {
        println!("{v}");
    }
    Ok(())
}

#[derive(Serialize)]
struct PredictLine<'a> {
    text: &'a str,
    label: usize,
    logits: &'a [f64],
    variants: usize,
}

pub fn predict(cli: &Cli, args: &PredictArgs) -> Result<()> {
    let common = Common::new(cli)?;
    let texts: Vec<String> = match &args.input {
        Some(path) => std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(str::to_string)
            .collect(),
        None => args.texts.clone(),
    };
    if texts.is_empty() {
        return Err(usage("no input texts"));
    }
    let mut policies = resolve_policies(&args.policy, &common.cfg, &Registry::default_all())?;
    let policy = match policies.len() {
        0 => Policy::original_only(),
        1 => policies.remove(0),
        n => return Err(usage(format!("predict takes one policy, got {n}"))),
    };
    let backend = Backend::open(&args.model, &common, None)?;
    let mut out = String::new();
    for (i, text) in texts.iter().enumerate() {
        let doc = Document::new(format!("input-{i}"), text.as_str())?;
        let pred = backend.finish(policy.tta_predict(&backend.handle, &doc, common.seed))?;
        let line = PredictLine {
            text,
            label: pred.label.0,
            logits: pred.logits.values(),
            variants: pred.per_variant_logits.len(),
        };
        writeln!(out, "{}", serde_json::to_string(&line)?)?;
    }
    print!("{out}");
    Ok(())
}

pub fn evaluate(cli: &Cli, args: &EvaluateArgs) -> Result<()> {
    let common = Common::new(cli)?;
    let ds = load_dataset(pick(args.dataset.clone(), &common.cfg.dataset))?;
    let policies = resolve_policies(&args.policy, &common.cfg, &Registry::default_all())?;
    if policies.is_empty() {
        return Err(usage("no policy given (--policy or --preset)"));
    }
    let output = common.output(&args.output);
    let backend = Backend::open(&args.model, &common, Some(&output))?;
    let evaluator = Evaluator::new(&backend.handle, common.seed, common.workers)?;
    let options = ReportOptions {
        alpha: pick(args.alpha, &common.cfg.alpha).unwrap_or(ReportOptions::default().alpha),
        significance: ds.len() >= tta_core::evaluate::significance::DEFAULT_SUBSAMPLES,
        overlap: true,
    };
    let report = backend.finish(report::build(&evaluator, &policies, &ds, &options))?;
    report.write(&output)?;
    println!("dataset {} ({} examples), seed {}", ds.name, ds.len(), common.seed.value());
    println!("baseline accuracy {:.4}", report.baseline_accuracy);
    for p in &report.policies {
        let pv = p
            .significance
            .as_ref()
            .map_or_else(|| "n/a".to_string(), |s| format!("{:.4e}", s.p_value));
        println!(
            "{}: accuracy {:.4}, delta {:+.1} pp, corrections {}, corruptions {}, p {}",
            p.policy.name,
            p.accuracy,
            p.delta_pp,
            p.corrections.len(),
            p.corruptions.len(),
            pv
        );
    }
    println!("wrote {} and {}", output.join(report::REPORT_FILE).display(), output.join(SUMMARY_FILE).display());
    Ok(())
}

pub fn sweep(cli: &Cli, args: &SweepArgs) -> Result<()> {
    let common = Common::new(cli)?;
    let ds = load_dataset(pick(args.dataset.clone(), &common.cfg.dataset))?;
    let mode: Preset = pick(args.mode.clone(), &common.cfg.mode)
        .unwrap_or_else(|| "4s4a".into())
        .parse()?;
    let names = pick_list(&args.transforms, &common.cfg.transforms);
    let registry = if names.is_empty() {
        Registry::default_word()
    } else {
        Registry::new(Registry::default_all().select(&names)?)?
    };
    let output = common.output(&args.output);
    std::fs::create_dir_all(&output).with_context(|| format!("creating {}", output.display()))?;
    let checkpoint = output.join(CHECKPOINT_FILE);
    if !args.resume && checkpoint.exists() {
        std::fs::remove_file(&checkpoint)?;
    }
    let backend = Backend::open(&args.model, &common, Some(&output))?;
    let evaluator = Evaluator::new(&backend.handle, common.seed, common.workers)?;
    let options = SweepOptions {
        checkpoint: Some(checkpoint.clone()),
        resume: args.resume,
        stop_after: args.stop_after,
        alpha: pick(args.alpha, &common.cfg.alpha).unwrap_or(SweepOptions::new().alpha),
    };
    let result = sweep::run(&evaluator, &registry, &ds, mode, &options);
    if let Err(tta_core::Error::Interrupted { completed, total }) = &result {
        backend.save()?;
        bail!(
            "sweep stopped after {completed} of {total} policies; rerun with --resume to continue from {}",
            checkpoint.display()
        );
    }
    let report = backend.finish(result)?;
    let csv = report.to_csv();
    std::fs::write(output.join(SWEEP_CSV), &csv)?;
    let mut json = serde_json::to_string_pretty(&report)?;
    json.push('\n');
    std::fs::write(output.join(SWEEP_JSON), json)?;
    println!(
        "{} policies ({mode}) on {} ({} examples), baseline accuracy {:.4}",
        report.rows.len(),
        ds.name,
        ds.len(),
        report.baseline_accuracy
    );
    for (i, r) in report.rows.iter().take(5).enumerate() {
        println!("{:>3}. {} accuracy {:.4} ({:+.1} pp)", i + 1, r.policy, r.accuracy, r.delta_pp);
    }
    println!("wrote {} and {}", output.join(SWEEP_CSV).display(), output.join(SWEEP_JSON).display());
    Ok(())
}

pub fn train_builtin(cli: &Cli, args: &TrainArgs) -> Result<()> {
    let common = Common::new(cli)?;
    let ds = load_dataset(Some(args.train.clone()))?;
    let defaults = TrainConfig::default();
    let config = TrainConfig {
        learning_rate: args.learning_rate.unwrap_or(defaults.learning_rate),
        epochs: args.epochs.unwrap_or(defaults.epochs),
        l2: args.l2.unwrap_or(defaults.l2),
        seed: common.seed.value(),
        min_count: args.min_count.unwrap_or(defaults.min_count),
    };
    let (model, report) = BuiltinModel::train(&ds.examples, ds.num_classes, config)?;
    model.save(&args.output)?;
    println!("trained on {} examples, {} classes, {} features", ds.len(), ds.num_classes, model.vocabulary().len());
    println!(
        "loss {:.6} -> {:.6} over {} epochs",
        report.losses[0],
        report.losses[report.losses.len() - 1],
        report.losses.len() - 1
    );
    println!("train accuracy {}", report.train_accuracy);
    println!("wrote {}", args.output.display());
    Ok(())
}

pub fn report(args: &ReportArgs) -> Result<()> {
    let report = EvaluationReport::load(&args.input)?;
    let dir = &args.output;
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;

    let mut subsamples = String::from("policy,subsample,baseline,tta\n");
    let mut overlap = String::from("policy,transform,outcome,i,j,jaccard\n");
    let mut outcomes = String::from("policy,id,outcome\n");
    for p in &report.policies {
        let name = report::csv_field(&p.policy.name);
        if let Some(s) = &p.significance {
            for (i, pair) in s.pairs.iter().enumerate() {
                writeln!(subsamples, "{name},{i},{},{}", pair.baseline, pair.tta)?;
            }
        }
        if let Some(o) = &p.overlap {
            for (kind, m) in [("correction", &o.corrections), ("corruption", &o.corruptions)] {
                for (i, row) in m.iter().enumerate() {
                    for (j, v) in row.iter().enumerate() {
                        let v = v.map(|v| v.to_string()).unwrap_or_default();
                        writeln!(overlap, "{name},{},{kind},{i},{j},{v}", report::csv_field(&o.transform))?;
                    }
                }
            }
        }
        for (label, ids) in [("correction", &p.corrections), ("corruption", &p.corruptions)] {
            for id in ids {
                writeln!(outcomes, "{name},{},{label}", report::csv_field(id))?;
            }
        }
    }
    let files = [
        (SUMMARY_FILE, report.summary_csv()),
        ("subsamples.csv", subsamples),
        ("overlap.csv", overlap),
        ("outcomes.csv", outcomes),
    ];
    for (file, contents) in &files {
        let path = dir.join(file);
        std::fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
