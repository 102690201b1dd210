//! Replicated comparisons of primary-only, pooled and transfer fits.

use std::io::Write;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::generators::{generate, Generated, GeneratorSpec};
use crate::data::{stack_all, Dataset, Task};
use crate::error::{ArtError, Result};
use crate::learners::{FittedModel, LearnerSpec};
use crate::loss::Loss;
use crate::pipeline::{
    art_iam_fit_cached, variable_importance, ArtConfig, ArtModel, CandidateCache,
};
use crate::seed::derive_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    PrimaryOnly,
    /// Primary, auxiliary and adversarial rows stacked and fit once.
    Pooled,
    Art,
    /// One transfer fit over every learner of the experiment.
    ArtIam,
}

/// A learner plus the short name used in result tables (`LS`, `logit`, ...).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedLearner {
    pub label: String,
    pub spec: LearnerSpec,
}

impl NamedLearner {
    pub fn new(label: impl Into<String>, spec: LearnerSpec) -> Self {
        NamedLearner {
            label: label.into(),
            spec,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// `generator.seed` is the master seed of the experiment.
    pub generator: GeneratorSpec,
    pub methods: Vec<Method>,
    pub learners: Vec<NamedLearner>,
    pub replications: usize,
    pub art: ArtConfig,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.generator.validate()?;
        self.art.validate()?;
        if self.replications == 0 {
            return Err(ArtError::config("replications must be at least 1"));
        }
        if self.methods.is_empty() || self.learners.is_empty() {
            return Err(ArtError::config("an experiment needs methods and learners"));
        }
        let task = self.generator.kind.task();
        for l in &self.learners {
            if !l.spec.supports_task(task) {
                return Err(ArtError::config(format!(
                    "learner `{}` cannot fit {task} data",
                    l.label
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub method: String,
    #[serde(rename = "M")]
    pub m: usize,
    pub xi: f64,
    pub replication: usize,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExperimentResult {
    pub rows: Vec<ResultRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub method: String,
    #[serde(rename = "M")]
    pub m: usize,
    pub xi: f64,
    pub mean: f64,
    /// Sample standard deviation; undefined for a single replication.
    pub sd: Option<f64>,
    pub se: Option<f64>,
    pub n_reps: usize,
}

pub fn method_label(method: Method, learner: &str) -> String {
    match method {
        Method::PrimaryOnly => learner.to_string(),
        Method::Pooled => format!("pool-{learner}"),
        Method::Art => format!("ART-{learner}"),
        Method::ArtIam => "ART-I-AM".to_string(),
    }
}

/// Default loss for the task: squared error or cross-entropy.
pub fn task_loss(task: Task) -> Loss {
    match task {
        Task::Regression => Loss::Squared,
        Task::Classification => Loss::cross_entropy(),
    }
}

/// Mean squared error, or the misclassification rate of `1{p > 0.5}`.
pub fn test_error(predictions: &[f64], data: &Dataset) -> f64 {
    let y = data.response();
    let n = predictions.len() as f64;
    match data.task() {
        Task::Regression => {
            predictions
                .iter()
                .zip(y.iter())
                .map(|(p, t)| (p - t).powi(2))
                .sum::<f64>()
                / n
        }
        Task::Classification => {
            predictions
                .iter()
                .zip(y.iter())
                .filter(|(p, t)| (**p > 0.5) != (**t == 1.0))
                .count() as f64
                / n
        }
    }
}

fn model_error(model: &FittedModel, test: &Dataset) -> f64 {
    test_error(&model.predict_all(test), test)
}

fn art_error(model: &ArtModel, test: &Dataset) -> Result<f64> {
    Ok(test_error(&model.predict_all(test)?, test))
}

/// Fits every requested method on one draw and returns `(label, error)` pairs.
fn evaluate_methods(
    cfg: &ExperimentConfig,
    primary: &Dataset,
    external: &[Dataset],
    test: &Dataset,
    art_seed: u64,
    cache: &CandidateCache,
) -> Result<Vec<(String, f64)>> {
    let loss = task_loss(primary.task());
    let art = ArtConfig {
        seed: art_seed,
        ..cfg.art.clone()
    };
    let mut out = Vec::new();
    for &method in &cfg.methods {
        match method {
            Method::PrimaryOnly => {
                for l in &cfg.learners {
                    let fit = cache.fit(&l.spec.reseeded(derive_seed(art_seed, &[0])), primary)?;
                    out.push((method_label(method, &l.label), model_error(&fit, test)));
                }
            }
            Method::Pooled => {
                let pooled = stack_all(primary, external)?;
                for l in &cfg.learners {
                    let fit = cache.fit(&l.spec.reseeded(derive_seed(art_seed, &[1])), &pooled)?;
                    out.push((method_label(method, &l.label), model_error(&fit, test)));
                }
            }
            Method::Art => {
                for l in &cfg.learners {
                    let model = art_iam_fit_cached(
                        primary,
                        external,
                        std::slice::from_ref(&l.spec),
                        &loss,
                        &art,
                        Some(cache),
                    )?;
                    out.push((method_label(method, &l.label), art_error(&model, test)?));
                }
            }
            Method::ArtIam => {
                let specs: Vec<LearnerSpec> = cfg.learners.iter().map(|l| l.spec.clone()).collect();
                let model =
                    art_iam_fit_cached(primary, external, &specs, &loss, &art, Some(cache))?;
                out.push((method_label(method, ""), art_error(&model, test)?));
            }
        }
    }
    Ok(out)
}

/// Auxiliary sets followed by adversarial sets.
pub fn external_sets(g: &Generated) -> Vec<Dataset> {
    g.auxiliaries
        .iter()
        .chain(&g.adversarials)
        .cloned()
        .collect()
}

/// Generator spec of replication `r`.
pub fn replication_spec(spec: &GeneratorSpec, r: usize) -> GeneratorSpec {
    GeneratorSpec {
        seed: derive_seed(spec.seed, &[r as u64, 0]),
        ..spec.clone()
    }
}

/// Seed handed to the transfer fits of replication `r`.
pub fn replication_art_seed(spec: &GeneratorSpec, r: usize) -> u64 {
    derive_seed(spec.seed, &[r as u64, 1])
}

fn sort_rows(rows: &mut [ResultRow]) {
    rows.sort_by(|a, b| {
        a.method
            .cmp(&b.method)
            .then(a.m.cmp(&b.m))
            .then(a.xi.total_cmp(&b.xi))
            .then(a.replication.cmp(&b.replication))
    });
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    run_sweep(std::slice::from_ref(cfg))
}

/// Runs each configuration and returns all rows in sorted order.
///
/// Replication `r` of every configuration is processed by one task that
/// shares a [`CandidateCache`], so configurations drawing the same datasets
/// (an M sweep over one master seed) fit each candidate once. Results are
/// identical to running the configurations separately.
pub fn run_sweep(configs: &[ExperimentConfig]) -> Result<ExperimentResult> {
    for cfg in configs {
        cfg.validate()?;
    }
    let max_reps = configs.iter().map(|c| c.replications).max().unwrap_or(0);
    let per_rep: Vec<Vec<ResultRow>> = (0..max_reps)
        .into_par_iter()
        .map(|r| {
            let cache = CandidateCache::new();
            let mut rows = Vec::new();
            for cfg in configs.iter().filter(|c| r < c.replications) {
                let g = generate(&replication_spec(&cfg.generator, r))?;
                let external = external_sets(&g);
                let art_seed = replication_art_seed(&cfg.generator, r);
                let errors =
                    evaluate_methods(cfg, &g.primary, &external, &g.test, art_seed, &cache)?;
                rows.extend(errors.into_iter().map(|(method, error)| ResultRow {
                    method,
                    m: cfg.generator.m,
                    xi: cfg.generator.xi,
                    replication: r,
                    error,
                }));
            }
            Ok(rows)
        })
        .collect::<Result<_>>()?;
    let mut rows: Vec<ResultRow> = per_rep.into_iter().flatten().collect();
    sort_rows(&mut rows);
    Ok(ExperimentResult { rows })
}

/// Holdout protocol on one fixed draw: each split trains on `n_train`
/// random primary rows (plus every external set) and scores the remaining
/// primary rows. The `replication` column holds the split index.
pub fn run_split_protocol(
    cfg: &ExperimentConfig,
    n_train: usize,
    n_splits: usize,
) -> Result<ExperimentResult> {
    cfg.validate()?;
    let n = cfg.generator.n_primary;
    if n_train < 2 || n_train >= n {
        return Err(ArtError::config(format!(
            "n_train must lie in [2, {}), got {n_train}",
            n
        )));
    }
    if n_splits == 0 {
        return Err(ArtError::config("n_splits must be at least 1"));
    }
    let g = generate(&cfg.generator)?;
    let external = external_sets(&g);
    let per_split: Vec<Vec<ResultRow>> = (0..n_splits)
        .into_par_iter()
        .map(|s| {
            let mut rng =
                ChaCha8Rng::seed_from_u64(derive_seed(cfg.generator.seed, &[s as u64, 2]));
            let mut idx: Vec<usize> = (0..n).collect();
            idx.shuffle(&mut rng);
            let train = g.primary.select_rows(&idx[..n_train]);
            let eval = g.primary.select_rows(&idx[n_train..]);
            if train.task() == Task::Classification && !train.has_both_classes() {
                return Err(ArtError::InsufficientData(format!(
                    "split {s} left one class in the training rows"
                )));
            }
            let art_seed = derive_seed(cfg.generator.seed, &[s as u64, 3]);
            let errors = evaluate_methods(
                cfg,
                &train,
                &external,
                &eval,
                art_seed,
                &CandidateCache::new(),
            )?;
            Ok(errors
                .into_iter()
                .map(|(method, error)| ResultRow {
                    method,
                    m: cfg.generator.m,
                    xi: cfg.generator.xi,
                    replication: s,
                    error,
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    let mut rows: Vec<ResultRow> = per_split.into_iter().flatten().collect();
    sort_rows(&mut rows);
    Ok(ExperimentResult { rows })
}

/// Mean, sample SD and standard error per (method, M, ξ).
pub fn summarize(result: &ExperimentResult) -> Vec<SummaryRow> {
    let mut rows = result.rows.clone();
    sort_rows(&mut rows);
    let mut out = Vec::new();
    for group in
        rows.chunk_by(|a, b| a.method == b.method && a.m == b.m && a.xi.total_cmp(&b.xi).is_eq())
    {
        let errors: Vec<f64> = group.iter().map(|r| r.error).collect();
        let (mean, sd) = mean_sd(&errors);
        let n = errors.len();
        out.push(SummaryRow {
            method: group[0].method.clone(),
            m: group[0].m,
            xi: group[0].xi,
            mean,
            sd,
            se: sd.map(|s| s / (n as f64).sqrt()),
            n_reps: n,
        });
    }
    out
}

/// Mean and sample standard deviation (`None` below two values).
pub fn mean_sd(values: &[f64]) -> (f64, Option<f64>) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, None);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, Some(var.sqrt()))
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// `method,M,xi,replication,error`
pub fn write_rows_csv<W: Write>(out: W, result: &ExperimentResult) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["method", "M", "xi", "replication", "error"])?;
    for r in &result.rows {
        w.write_record([
            r.method.clone(),
            r.m.to_string(),
            r.xi.to_string(),
            r.replication.to_string(),
            r.error.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `method,M,xi,mean,sd,se,n_reps`; undefined SD and SE are empty fields.
pub fn write_summary_csv<W: Write>(out: W, summary: &[SummaryRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["method", "M", "xi", "mean", "sd", "se", "n_reps"])?;
    for s in summary {
        w.write_record([
            s.method.clone(),
            s.m.to_string(),
            s.xi.to_string(),
            s.mean.to_string(),
            fmt_opt(s.sd),
            fmt_opt(s.se),
            s.n_reps.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Mean ART variable importance per feature at one noise level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceRow {
    pub xi: f64,
    pub feature: usize,
    pub importance: f64,
}

/// Averages the importance vector of a selecting learner over replications.
pub fn run_importance(
    generator: &GeneratorSpec,
    learner: &LearnerSpec,
    art: &ArtConfig,
    replications: usize,
) -> Result<Vec<ImportanceRow>> {
    if replications == 0 {
        return Err(ArtError::config("replications must be at least 1"));
    }
    if !learner.supports_selection() {
        return Err(ArtError::UnsupportedLearner(format!(
            "learner `{}` does not select variables, so variable importance is not well-defined",
            learner.name()
        )));
    }
    let loss = task_loss(generator.kind.task());
    let per_rep: Vec<Vec<f64>> = (0..replications)
        .into_par_iter()
        .map(|r| {
            let g = generate(&replication_spec(generator, r))?;
            let cfg = ArtConfig {
                seed: replication_art_seed(generator, r),
                ..art.clone()
            };
            let model = art_iam_fit_cached(
                &g.primary,
                &external_sets(&g),
                std::slice::from_ref(learner),
                &loss,
                &cfg,
                None,
            )?;
            Ok(variable_importance(&model)?.vi)
        })
        .collect::<Result<_>>()?;
    let p = generator.p;
    Ok((0..p)
        .map(|j| ImportanceRow {
            xi: generator.xi,
            feature: j,
            importance: per_rep.iter().map(|v| v[j]).sum::<f64>() / replications as f64,
        })
        .collect())
}

/// `xi,feature,importance`
pub fn write_importance_csv<W: Write>(out: W, rows: &[ImportanceRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["xi", "feature", "importance"])?;
    for r in rows {
        w.write_record([
            r.xi.to_string(),
            r.feature.to_string(),
            r.importance.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simbench::generators::GeneratorKind;

    fn row(method: &str, rep: usize, error: f64) -> ResultRow {
        ResultRow {
            method: method.into(),
            m: 1,
            xi: 0.5,
            replication: rep,
            error,
        }
    }

    #[test]
    fn summary_of_single_row_has_no_se() {
        let s = summarize(&ExperimentResult {
            rows: vec![row("LS", 0, 2.0)],
        });
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].mean, 2.0);
        assert_eq!(s[0].se, None);
        let mut buf = Vec::new();
        write_summary_csv(&mut buf, &s).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "method,M,xi,mean,sd,se,n_reps\nLS,1,0.5,2,,,1\n"
        );
    }

    #[test]
    fn summary_arithmetic() {
        let s = summarize(&ExperimentResult {
            rows: vec![row("LS", 0, 1.0), row("LS", 1, 3.0)],
        });
        assert_eq!(s[0].mean, 2.0);
        assert!((s[0].sd.unwrap() - 2f64.sqrt()).abs() < 1e-12);
        assert!((s[0].se.unwrap() - 1.0).abs() < 1e-12);

        let same: Vec<ResultRow> = (0..50).map(|r| row("LS", r, 0.75)).collect();
        let s = summarize(&ExperimentResult { rows: same });
        assert_eq!((s[0].mean, s[0].se, s[0].n_reps), (0.75, Some(0.0), 50));
    }

    #[test]
    fn summary_groups_by_method() {
        let s = summarize(&ExperimentResult {
            rows: vec![row("b", 0, 1.0), row("a", 0, 5.0), row("b", 1, 2.0)],
        });
        assert_eq!(
            s.iter().map(|r| r.method.as_str()).collect::<Vec<_>>(),
            ["a", "b"]
        );
        assert_eq!(s[1].n_reps, 2);
    }

    fn small_config() -> ExperimentConfig {
        let mut generator = GeneratorSpec::defaults(GeneratorKind::LinearRegression);
        generator.m = 2;
        generator.n_test = 200;
        generator.seed = 9;
        ExperimentConfig {
            generator,
            methods: vec![Method::PrimaryOnly, Method::Pooled, Method::Art],
            learners: vec![NamedLearner::new("LS", LearnerSpec::Ols)],
            replications: 3,
            art: ArtConfig::default(),
        }
    }

    #[test]
    fn rows_are_sorted_and_labelled() {
        let res = run_experiment(&small_config()).unwrap();
        assert_eq!(res.rows.len(), 9);
        let methods: Vec<&str> = res.rows.iter().map(|r| r.method.as_str()).collect();
        assert_eq!(&methods[..4], ["ART-LS", "ART-LS", "ART-LS", "LS"]);
        assert!(res.rows.iter().all(|r| r.error >= 0.0));
        let mut buf = Vec::new();
        write_rows_csv(&mut buf, &res).unwrap();
        assert!(String::from_utf8(buf)
            .unwrap()
            .starts_with("method,M,xi,replication,error\nART-LS,2,0.5,0,"));
    }

    #[test]
    fn single_replication_is_deterministic() {
        let mut cfg = small_config();
        cfg.replications = 1;
        assert_eq!(run_experiment(&cfg).unwrap(), run_experiment(&cfg).unwrap());
    }

    #[test]
    fn incompatible_learner_is_a_config_error() {
        let mut cfg = small_config();
        cfg.learners = vec![NamedLearner::new("logit", LearnerSpec::logistic())];
        assert!(matches!(run_experiment(&cfg), Err(ArtError::Config(_))));
    }

    #[test]
    fn classification_error_is_misclassification_rate() {
        let d = Dataset::from_rows(
            &[vec![0.0], vec![0.0], vec![0.0], vec![0.0]],
            vec![1.0, 0.0, 1.0, 0.0],
            Task::Classification,
        )
        .unwrap();
        assert_eq!(test_error(&[0.9, 0.2, 0.5, 0.6], &d), 0.5);
    }

    #[test]
    fn importance_needs_selection() {
        let spec = GeneratorSpec::defaults(GeneratorKind::SparseLinear);
        let err = run_importance(&spec, &LearnerSpec::Ols, &ArtConfig::default(), 1).unwrap_err();
        assert!(err
            .to_string()
            .contains("variable importance is not well-defined"));
    }
}
