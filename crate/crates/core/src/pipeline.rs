//! The transfer pipeline: candidate pools built from the primary training part
//! stacked with each auxiliary dataset, exponential weights learned on the
//! held-out primary rows, and the aggregated predictor they define.

use std::collections::HashMap;
use std::hash::{DefaultHasher, Hash, Hasher};
use std::sync::Mutex;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{split_primary, stack, Dataset, SplitIndices, Task};
use crate::error::{ArtError, Result};
use crate::learners::{FittedModel, LearnerSpec};
use crate::loss::Loss;
use crate::seed::derive_seed;
use crate::weighting::{
    default_lambda, sequential_weights, simplified_weights, PriorWeights, WeightTrace,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightMode {
    /// Per-position weights averaged over the held-out rows.
    #[default]
    Sequential,
    /// One-shot weights from total held-out loss.
    Simplified,
}

impl std::str::FromStr for WeightMode {
    type Err = ArtError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sequential" => Ok(WeightMode::Sequential),
            "simplified" => Ok(WeightMode::Simplified),
            other => Err(ArtError::config(format!(
                "unknown weight mode `{other}` (expected sequential or simplified)"
            ))),
        }
    }
}

/// Which fitted candidates the returned model carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RefitPolicy {
    /// Candidates refit on the whole primary dataset (stacked with each
    /// auxiliary set), weighted by the split-averaged weights.
    #[default]
    FullPrimary,
    /// The candidates of the last executed split, as fitted there.
    LastSplit,
}

impl std::str::FromStr for RefitPolicy {
    type Err = ArtError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full_primary" | "full-primary" => Ok(RefitPolicy::FullPrimary),
            "last_split" | "last-split" => Ok(RefitPolicy::LastSplit),
            other => Err(ArtError::config(format!(
                "unknown refit policy `{other}` (expected full_primary or last_split)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ArtConfig {
    /// Exponential-weight temperature; `None` applies [`default_lambda`].
    pub lambda: Option<f64>,
    /// Candidate priors; `None` means uniform.
    pub priors: Option<PriorWeights>,
    pub split_ratio: f64,
    pub n_splits: usize,
    pub weight_mode: WeightMode,
    /// Stop splitting once the running weight average moves less than this.
    pub converge_tol: f64,
    pub refit: RefitPolicy,
    pub seed: u64,
}

impl Default for ArtConfig {
    fn default() -> Self {
        ArtConfig {
            lambda: None,
            priors: None,
            split_ratio: 0.5,
            n_splits: 10,
            weight_mode: WeightMode::Sequential,
            converge_tol: 1e-3,
            refit: RefitPolicy::FullPrimary,
            seed: 0,
        }
    }
}

impl ArtConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.split_ratio > 0.0 && self.split_ratio < 1.0) {
            return Err(ArtError::config(format!(
                "split_ratio must lie in (0, 1), got {}",
                self.split_ratio
            )));
        }
        if let Some(l) = self.lambda {
            if !(l > 0.0 && l.is_finite()) {
                return Err(ArtError::config(format!(
                    "lambda must be positive, got {l}"
                )));
            }
        }
        if self.n_splits == 0 {
            return Err(ArtError::config("n_splits must be at least 1"));
        }
        if !(self.converge_tol >= 0.0) {
            return Err(ArtError::config("converge_tol must be nonnegative"));
        }
        Ok(())
    }
}

/// Diagnostics of one random split.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitRecord {
    pub split: SplitIndices,
    /// candidates × held-out rows, in the held-out order.
    pub test_losses: DMatrix<f64>,
    pub weights: Vec<f64>,
    /// Present in sequential mode.
    pub trace: Option<WeightTrace>,
}

/// The aggregated predictor: a convex combination of candidate models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArtModel {
    pub task: Task,
    pub n_features: usize,
    pub learners: Vec<LearnerSpec>,
    /// Dataset-major: candidate `m * R + r` used dataset `m` (0 = primary
    /// alone) and learner `r`.
    pub candidates: Vec<FittedModel>,
    pub final_weights: Vec<f64>,
    pub lambda: f64,
    pub config_used: ArtConfig,
    #[serde(skip)]
    pub splits: Vec<SplitRecord>,
}

impl ArtModel {
    pub fn n_datasets(&self) -> usize {
        self.candidates.len() / self.learners.len().max(1)
    }

    /// Aggregated prediction `Σ w_m g_m(x)`.
    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n_features {
            return Err(ArtError::invalid(format!(
                "expected {} features, got {}",
                self.n_features,
                x.len()
            )));
        }
        Ok(self
            .candidates
            .iter()
            .zip(&self.final_weights)
            .map(|(c, w)| if *w == 0.0 { 0.0 } else { w * c.predict(x) })
            .sum())
    }

    /// Class label `1{p > 0.5}` for classification models.
    pub fn classify(&self, x: &[f64]) -> Result<u8> {
        if self.task != Task::Classification {
            return Err(ArtError::invalid("classify called on a regression model"));
        }
        Ok(u8::from(self.predict(x)? > 0.5))
    }

    pub fn predict_all(&self, data: &Dataset) -> Result<Vec<f64>> {
        (0..data.n_rows())
            .map(|i| self.predict(&data.row(i)))
            .collect()
    }
}

pub fn art_predict(model: &ArtModel, x: &[f64]) -> Result<f64> {
    model.predict(x)
}

pub fn classify(model: &ArtModel, x: &[f64]) -> Result<u8> {
    model.classify(x)
}

/// Per-feature importance: weighted share of candidates selecting the feature.
#[derive(Debug, Clone, PartialEq)]
pub struct VariableImportance {
    pub vi: Vec<f64>,
}

impl VariableImportance {
    /// Feature indices by descending importance, ties by index.
    pub fn ranking(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.vi.len()).collect();
        idx.sort_by(|&a, &b| self.vi[b].total_cmp(&self.vi[a]).then(a.cmp(&b)));
        idx
    }
}

pub fn variable_importance(model: &ArtModel) -> Result<VariableImportance> {
    let mut vi = vec![0.0; model.n_features];
    for (c, &w) in model.candidates.iter().zip(&model.final_weights) {
        let Some(selected) = &c.selected_vars else {
            return Err(ArtError::UnsupportedLearner(format!(
                "candidate `{}` does not select variables, so variable importance is not well-defined",
                c.label
            )));
        };
        for &j in selected {
            if j >= vi.len() {
                return Err(ArtError::invalid(format!(
                    "candidate `{}` selects column {j} of {}",
                    c.label,
                    vi.len()
                )));
            }
            vi[j] += w;
        }
    }
    for v in &mut vi {
        *v = v.clamp(0.0, 1.0);
    }
    Ok(VariableImportance { vi })
}

fn check_inputs(
    primary: &Dataset,
    auxiliaries: &[Dataset],
    learners: &[LearnerSpec],
) -> Result<()> {
    if learners.is_empty() {
        return Err(ArtError::config("at least one learner is required"));
    }
    for (m, aux) in auxiliaries.iter().enumerate() {
        if aux.n_features() != primary.n_features() {
            return Err(ArtError::invalid(format!(
                "auxiliary dataset {} has {} features, primary has {}",
                m + 1,
                aux.n_features(),
                primary.n_features()
            )));
        }
        if aux.task() != primary.task() {
            return Err(ArtError::invalid(format!(
                "auxiliary dataset {} is {} data, primary is {}",
                m + 1,
                aux.task(),
                primary.task()
            )));
        }
    }
    for l in learners {
        if !l.supports_task(primary.task()) {
            return Err(ArtError::config(format!(
                "learner `{}` cannot fit {} data",
                l.name(),
                primary.task()
            )));
        }
    }
    Ok(())
}

/// Fitted models keyed by the exact training data and learner (including its
/// seed). Sharing one cache between fits that reuse datasets, such as a sweep
/// over growing auxiliary lists, skips refitting without changing results.
#[derive(Debug, Default)]
pub struct CandidateCache {
    store: Mutex<HashMap<(u64, String), FittedModel>>,
}

impl CandidateCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.store.lock().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Fits `learner` on `data`, or returns the stored fit for identical inputs.
    pub fn fit(&self, learner: &LearnerSpec, data: &Dataset) -> Result<FittedModel> {
        let key = (fingerprint(data), format!("{learner:?}"));
        if let Some(hit) = self.store.lock().expect("cache lock").get(&key) {
            return Ok(hit.clone());
        }
        let fitted = learner.fit(data)?;
        self.store
            .lock()
            .expect("cache lock")
            .insert(key, fitted.clone());
        Ok(fitted)
    }
}

fn fingerprint(data: &Dataset) -> u64 {
    let mut h = DefaultHasher::new();
    data.task().hash(&mut h);
    data.features().shape().hash(&mut h);
    for v in data.features().iter().chain(data.response().iter()) {
        v.to_bits().hash(&mut h);
    }
    h.finish()
}

/// Fits the (M+1) × R pool on `base` and `base` stacked with each auxiliary set.
///
/// Learner seeds derive from `(seed, stage, r)`, so the pool does not depend
/// on the order in which auxiliary sets are supplied.
fn fit_pool(
    base: &Dataset,
    auxiliaries: &[Dataset],
    learners: &[LearnerSpec],
    seed: u64,
    stage: u64,
    cache: Option<&CandidateCache>,
) -> Result<Vec<FittedModel>> {
    let r_count = learners.len();
    let n_datasets = auxiliaries.len() + 1;
    let stacked: Vec<Dataset> = auxiliaries
        .iter()
        .map(|a| stack(base, a))
        .collect::<Result<_>>()?;
    (0..n_datasets * r_count)
        .into_par_iter()
        .map(|idx| {
            let (m, r) = (idx / r_count, idx % r_count);
            let data = if m == 0 { base } else { &stacked[m - 1] };
            let learner = learners[r].reseeded(derive_seed(seed, &[stage, r as u64]));
            let fitted = match cache {
                Some(c) => c.fit(&learner, data),
                None => learner.fit(data),
            };
            fitted.map(|f| f.with_label(format!("{}:m{m}", learner.name())))
        })
        .collect()
}

fn loss_matrix(candidates: &[FittedModel], test: &Dataset, loss: &Loss) -> Result<DMatrix<f64>> {
    let rows: Vec<Vec<f64>> = candidates
        .par_iter()
        .map(|c| {
            c.predict_all(test)
                .iter()
                .zip(test.response().iter())
                .map(|(&pred, &y)| loss.evaluate(y, pred))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    Ok(DMatrix::from_fn(candidates.len(), test.n_rows(), |m, i| {
        rows[m][i]
    }))
}

/// ART with a single learner.
pub fn art_fit(
    primary: &Dataset,
    auxiliaries: &[Dataset],
    learner: &LearnerSpec,
    loss: &Loss,
    config: &ArtConfig,
) -> Result<ArtModel> {
    art_iam_fit(
        primary,
        auxiliaries,
        std::slice::from_ref(learner),
        loss,
        config,
    )
}

/// ART over the cross product of datasets and learners.
pub fn art_iam_fit(
    primary: &Dataset,
    auxiliaries: &[Dataset],
    learners: &[LearnerSpec],
    loss: &Loss,
    config: &ArtConfig,
) -> Result<ArtModel> {
    art_iam_fit_cached(primary, auxiliaries, learners, loss, config, None)
}

/// [`art_iam_fit`] drawing candidate fits from `cache` when given.
pub fn art_iam_fit_cached(
    primary: &Dataset,
    auxiliaries: &[Dataset],
    learners: &[LearnerSpec],
    loss: &Loss,
    config: &ArtConfig,
    cache: Option<&CandidateCache>,
) -> Result<ArtModel> {
    config.validate()?;
    loss.validate()?;
    check_inputs(primary, auxiliaries, learners)?;
    if matches!(loss, Loss::CrossEntropy { .. }) != (primary.task() == Task::Classification) {
        return Err(ArtError::config(format!(
            "loss {loss:?} does not match {} data",
            primary.task()
        )));
    }

    let n_candidates = (auxiliaries.len() + 1) * learners.len();
    let priors = match &config.priors {
        Some(p) if p.len() != n_candidates => {
            return Err(ArtError::config(format!(
                "{} priors supplied for {n_candidates} candidates",
                p.len()
            )))
        }
        Some(p) => p.clone(),
        None => PriorWeights::uniform(n_candidates)?,
    };

    let mut records = Vec::new();
    let mut weight_sum = vec![0.0; n_candidates];
    let mut running: Option<Vec<f64>> = None;
    let mut last_candidates = Vec::new();
    let mut lambda_used = 1.0;

    for s in 0..config.n_splits {
        let split = split_primary(
            primary,
            config.split_ratio,
            derive_seed(config.seed, &[s as u64]),
        )?;
        let train = primary.select_rows(&split.train_idx);
        let test = primary.select_rows(&split.test_idx);
        if config.weight_mode == WeightMode::Sequential && test.is_empty() {
            return Err(ArtError::EmptyTest);
        }
        let lambda = config.lambda.unwrap_or_else(|| {
            let sizes: Vec<usize> = auxiliaries.iter().map(Dataset::n_rows).collect();
            default_lambda(train.n_rows(), &sizes, test.n_rows())
        });
        lambda_used = lambda;

        let candidates = fit_pool(&train, auxiliaries, learners, config.seed, s as u64, cache)?;
        let test_losses = loss_matrix(&candidates, &test, loss)?;
        let (weights, trace) = match config.weight_mode {
            WeightMode::Sequential => {
                let t = sequential_weights(&priors, &test_losses, lambda)?;
                (t.final_weights.clone(), Some(t))
            }
            WeightMode::Simplified => {
                let totals: Vec<f64> = test_losses.row_iter().map(|r| r.sum()).collect();
                (simplified_weights(&priors, &totals, lambda)?, None)
            }
        };
        for (acc, w) in weight_sum.iter_mut().zip(&weights) {
            *acc += w;
        }
        let average: Vec<f64> = weight_sum.iter().map(|v| v / (s + 1) as f64).collect();
        records.push(SplitRecord {
            split,
            test_losses,
            weights,
            trace,
        });
        last_candidates = candidates;

        let converged = running.as_ref().is_some_and(|prev| {
            prev.iter()
                .zip(&average)
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
                < config.converge_tol
        });
        running = Some(average);
        if converged {
            break;
        }
    }

    let final_weights = running.expect("at least one split runs");
    let candidates = match config.refit {
        RefitPolicy::LastSplit => last_candidates,
        RefitPolicy::FullPrimary => fit_pool(
            primary,
            auxiliaries,
            learners,
            config.seed,
            records.len() as u64,
            cache,
        )?,
    };

    Ok(ArtModel {
        task: primary.task(),
        n_features: primary.n_features(),
        learners: learners.to_vec(),
        candidates,
        final_weights,
        lambda: lambda_used,
        config_used: config.clone(),
        splits: records,
    })
}
