//! Run configuration: an optional TOML file overlaid with command-line flags.

use std::path::{Path, PathBuf};

use art_core::{ArtConfig, LassoRule, LearnerSpec, Loss, PriorWeights, Task, WeightMode};
use serde::Deserialize;

use crate::CliError;

/// Fields accepted in a `--config` file. Every field is optional; flags win.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub primary: Option<PathBuf>,
    #[serde(default)]
    pub auxiliary: Vec<PathBuf>,
    pub response: Option<String>,
    pub task: Option<Task>,
    /// Learner specs in the `name:key=value,...` form used by `--learner`.
    #[serde(default)]
    pub learners: Vec<String>,
    pub loss: Option<Loss>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub lambda: Option<f64>,
    pub splits: Option<usize>,
    pub weight_mode: Option<WeightMode>,
    pub priors: Option<Vec<f64>>,
    pub split_ratio: Option<f64>,
    pub converge_tol: Option<f64>,
    pub refit: Option<art_core::RefitPolicy>,
    pub profile: Option<String>,
}

pub fn load_file(path: Option<&Path>) -> Result<FileConfig, CliError> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))
}

/// Parses `--priors 0.2,0.3,0.5`.
pub fn parse_priors(text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Config(format!("priors: `{t}` is not a number")))
        })
        .collect()
}

fn number<T: std::str::FromStr>(learner: &str, key: &str, value: &str) -> Result<T, CliError> {
    value.parse().map_err(|_| {
        CliError::Config(format!(
            "learner `{learner}`: bad value `{value}` for `{key}`"
        ))
    })
}

/// Parses a learner spec such as `ols`, `ridge:penalty=0.5` or
/// `cv_lasso:folds=5,grid=50,rule=one_se`.
pub fn parse_learner(text: &str, seed: u64) -> Result<LearnerSpec, CliError> {
    let (name, params) = match text.split_once(':') {
        Some((n, p)) => (n.trim(), p),
        None => (text.trim(), ""),
    };
    let mut pairs = Vec::new();
    for item in params.split(',').filter(|s| !s.trim().is_empty()) {
        let (k, v) = item.split_once('=').ok_or_else(|| {
            CliError::Config(format!(
                "learner `{name}`: expected key=value, got `{item}`"
            ))
        })?;
        pairs.push((k.trim().to_string(), v.trim().to_string()));
    }
    let mut spec = match name {
        "ols" | "ls" => LearnerSpec::Ols,
        "ridge" => LearnerSpec::Ridge { penalty: 1.0 },
        "logistic" | "logit" => LearnerSpec::logistic(),
        "lasso" => LearnerSpec::Lasso { lambda: 0.1 },
        "cv_lasso" => LearnerSpec::cv_lasso(seed),
        "knn" => LearnerSpec::Knn { k: 5 },
        "stump_boost" | "boost" => LearnerSpec::stump_boost(),
        "constant" => LearnerSpec::Constant { value: 0.0 },
        other => {
            return Err(CliError::Config(format!(
                "unknown learner `{other}` (expected ols, ridge, logistic, lasso, cv_lasso, knn, stump_boost or constant)"
            )))
        }
    };
    for (key, value) in &pairs {
        let known = match (&mut spec, key.as_str()) {
            (LearnerSpec::Ridge { penalty }, "penalty") => {
                *penalty = number(name, key, value)?;
                true
            }
            (LearnerSpec::Logistic { max_iter, .. }, "max_iter") => {
                *max_iter = number(name, key, value)?;
                true
            }
            (LearnerSpec::Logistic { tol, .. }, "tol") => {
                *tol = number(name, key, value)?;
                true
            }
            (LearnerSpec::Logistic { l2, .. }, "l2") => {
                *l2 = number(name, key, value)?;
                true
            }
            (LearnerSpec::Lasso { lambda }, "lambda") => {
                *lambda = number(name, key, value)?;
                true
            }
            (LearnerSpec::CvLasso { n_folds, .. }, "folds") => {
                *n_folds = number(name, key, value)?;
                true
            }
            (LearnerSpec::CvLasso { grid_size, .. }, "grid") => {
                *grid_size = number(name, key, value)?;
                true
            }
            (LearnerSpec::CvLasso { rule, .. }, "rule") => {
                *rule = match value.as_str() {
                    "min" | "min_cv" => LassoRule::MinCv,
                    "one_se" | "1se" => LassoRule::OneSe,
                    other => {
                        return Err(CliError::Config(format!(
                            "learner `{name}`: unknown rule `{other}` (expected min_cv or one_se)"
                        )))
                    }
                };
                true
            }
            (LearnerSpec::Knn { k }, "k") => {
                *k = number(name, key, value)?;
                true
            }
            (LearnerSpec::StumpBoost { n_rounds, .. }, "rounds") => {
                *n_rounds = number(name, key, value)?;
                true
            }
            (LearnerSpec::StumpBoost { learning_rate, .. }, "rate") => {
                *learning_rate = number(name, key, value)?;
                true
            }
            (LearnerSpec::Constant { value: v }, "value") => {
                *v = number(name, key, value)?;
                true
            }
            _ => false,
        };
        if !known {
            return Err(CliError::Config(format!(
                "learner `{name}` has no parameter `{key}`"
            )));
        }
    }
    Ok(spec)
}

/// Shared transfer settings after overlaying flags on the file.
#[derive(Debug, Clone, Default)]
pub struct ArtOverrides {
    pub seed: Option<u64>,
    pub lambda: Option<f64>,
    pub splits: Option<usize>,
    pub weight_mode: Option<WeightMode>,
    pub priors: Option<Vec<f64>>,
}

pub fn art_config(file: &FileConfig, flags: &ArtOverrides) -> Result<ArtConfig, CliError> {
    let mut cfg = ArtConfig::default();
    cfg.seed = flags.seed.or(file.seed).unwrap_or(cfg.seed);
    cfg.lambda = flags.lambda.or(file.lambda);
    cfg.n_splits = flags.splits.or(file.splits).unwrap_or(cfg.n_splits);
    cfg.weight_mode = flags
        .weight_mode
        .or(file.weight_mode)
        .unwrap_or(cfg.weight_mode);
    cfg.split_ratio = file.split_ratio.unwrap_or(cfg.split_ratio);
    cfg.converge_tol = file.converge_tol.unwrap_or(cfg.converge_tol);
    cfg.refit = file.refit.unwrap_or(cfg.refit);
    if let Some(p) = flags.priors.clone().or_else(|| file.priors.clone()) {
        cfg.priors =
            Some(PriorWeights::new(p).map_err(|e| CliError::Config(format!("priors: {e}")))?);
    }
    cfg.validate().map_err(CliError::from)?;
    Ok(cfg)
}
