//! Run configuration: a JSON file merged with command-line flags.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use crate::UsageError;

/// Every field is optional so that a file can set any subset; flags win.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub dataset: Option<String>,
    pub model: Option<String>,
    pub subprocess: Option<Vec<String>>,
    pub timeout_secs: Option<f64>,
    pub policy: Option<PathBuf>,
    pub presets: Option<Vec<String>>,
    pub transforms: Option<Vec<String>>,
    pub mode: Option<String>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub output: Option<PathBuf>,
    pub cache: Option<bool>,
    pub alpha: Option<f64>,
}

impl RunConfig {
    /// Reads `path`; relative paths inside resolve against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let src = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let mut cfg: RunConfig =
            serde_json::from_str(&src).map_err(|e| UsageError(format!("config {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let rebase = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(d) = cfg.dataset.as_mut().filter(|d| tta_core::Dataset::bundled_by_name(d).is_none()) {
            let mut p = PathBuf::from(&*d);
            rebase(&mut p);
            *d = p.to_string_lossy().into_owned();
        }
        if let Some(m) = cfg.model.as_mut().filter(|m| m.as_str() != "toy") {
            let mut p = PathBuf::from(&*m);
            rebase(&mut p);
            *m = p.to_string_lossy().into_owned();
        }
        cfg.policy.as_mut().map(rebase);
        cfg.output.as_mut().map(rebase);
        Ok(cfg)
    }

    pub fn load_or_default(path: Option<&Path>) -> Result<Self> {
        path.map_or_else(|| Ok(Self::default()), Self::load)
    }
}

/// `flag` if given, else the configured value.
pub fn pick<T>(flag: Option<T>, configured: &Option<T>) -> Option<T>
where
    T: Clone,
{
    flag.or_else(|| configured.clone())
}

pub fn pick_list(flag: &[String], configured: &Option<Vec<String>>) -> Vec<String> {
    if flag.is_empty() {
        configured.clone().unwrap_or_default()
    } else {
        flag.to_vec()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relative_paths_follow_the_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.json");
        std::fs::write(
            &path,
            r#"{"dataset":"data/test.csv","model":"toy","output":"out","seed":3}"#,
        )
        .unwrap();
        let cfg = RunConfig::load(&path).unwrap();
        assert_eq!(cfg.dataset.unwrap(), dir.path().join("data/test.csv").to_string_lossy());
        assert_eq!(cfg.model.as_deref(), Some("toy"));
        assert_eq!(cfg.output.unwrap(), dir.path().join("out"));
        assert_eq!(cfg.seed, Some(3));
    }

    #[test]
    fn bundled_dataset_names_are_kept() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.json");
        std::fs::write(&path, r#"{"dataset":"toy-test"}"#).unwrap();
        assert_eq!(RunConfig::load(&path).unwrap().dataset.as_deref(), Some("toy-test"));
    }

    #[test]
    fn unknown_fields_are_usage_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.json");
        std::fs::write(&path, r#"{"datset":"x"}"#).unwrap();
        let err = RunConfig::load(&path).unwrap_err();
        assert!(err.downcast_ref::<UsageError>().is_some());
    }

    #[test]
    fn flags_win() {
        assert_eq!(pick(Some(1), &Some(2)), Some(1));
        assert_eq!(pick(None, &Some(2)), Some(2));
        assert_eq!(pick_list(&[], &Some(vec!["a".into()])), vec!["a".to_string()]);
        assert_eq!(pick_list(&["b".into()], &Some(vec!["a".into()])), vec!["b".to_string()]);
    }
}
