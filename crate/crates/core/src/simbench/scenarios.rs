//! Named simulation sweeps.

use rayon::prelude::*;
use serde::Serialize;

use super::experiment::{
    run_importance, run_split_protocol, run_sweep, ExperimentConfig, ExperimentResult,
    ImportanceRow, Method, NamedLearner,
};
use super::generators::{GeneratorKind, GeneratorSpec};
use crate::error::{ArtError, Result};
use crate::learners::{LassoRule, LearnerSpec};
use crate::pipeline::ArtConfig;

pub const SCENARIO_NAMES: [&str; 7] = [
    "ex411",
    "ex412",
    "ex421",
    "ex422",
    "ex431",
    "vi_spectrum",
    "icu_style",
];

/// Values of M swept by the error-curve scenarios.
pub const M_SWEEP: std::ops::RangeInclusive<usize> = 1..=10;
pub const VI_XIS: [f64; 4] = [0.1, 0.4, 0.7, 1.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    /// 50 replications, 5,000 test rows.
    Full,
    /// 10 replications, 1,000 test rows.
    Fast,
}

impl Profile {
    pub fn replications(self) -> usize {
        match self {
            Profile::Full => 50,
            Profile::Fast => 10,
        }
    }

    pub fn n_test(self) -> usize {
        match self {
            Profile::Full => 5000,
            Profile::Fast => 1000,
        }
    }
}

impl std::str::FromStr for Profile {
    type Err = ArtError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Profile::Full),
            "fast" => Ok(Profile::Fast),
            other => Err(ArtError::Config(format!(
                "unknown profile `{other}` (expected full or fast)"
            ))),
        }
    }
}

/// Cross-validated lasso used by the sparse designs.
pub fn sim_lasso() -> LearnerSpec {
    LearnerSpec::CvLasso {
        n_folds: 5,
        grid_size: 50,
        rule: LassoRule::OneSe,
        seed: 0,
    }
}

pub fn knn_learner() -> LearnerSpec {
    LearnerSpec::Knn { k: 5 }
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scenario {
    /// Error curves: one experiment per configuration.
    Sweep { configs: Vec<ExperimentConfig> },
    /// Mean variable importance per noise level.
    Importance {
        generators: Vec<GeneratorSpec>,
        learner: LearnerSpec,
        art: ArtConfig,
        replications: usize,
    },
    /// Repeated holdout splits of one primary draw.
    SplitProtocol {
        config: ExperimentConfig,
        n_train: usize,
        n_splits: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioOutput {
    Errors(ExperimentResult),
    Importance(Vec<ImportanceRow>),
}

fn m_sweep(
    base: &GeneratorSpec,
    methods: &[Method],
    learners: &[NamedLearner],
    replications: usize,
) -> Vec<ExperimentConfig> {
    M_SWEEP
        .map(|m| ExperimentConfig {
            generator: GeneratorSpec { m, ..base.clone() },
            methods: methods.to_vec(),
            learners: learners.to_vec(),
            replications,
            art: ArtConfig::default(),
        })
        .collect()
}

const BASIC: [Method; 3] = [Method::PrimaryOnly, Method::Pooled, Method::Art];

impl Scenario {
    pub fn build(name: &str, profile: Profile, seed: u64) -> Result<Scenario> {
        let reps = profile.replications();
        let base = |kind| GeneratorSpec {
            n_test: profile.n_test(),
            seed,
            ..GeneratorSpec::defaults(kind)
        };
        let ls = [NamedLearner::new("LS", LearnerSpec::Ols)];
        let logit = [NamedLearner::new("logit", LearnerSpec::logistic())];
        let machines = [
            NamedLearner::new("logit", LearnerSpec::logistic()),
            NamedLearner::new("knn", knn_learner()),
            NamedLearner::new("boost", LearnerSpec::stump_boost()),
        ];
        let scenario = match name {
            "ex411" => Scenario::Sweep {
                configs: m_sweep(&base(GeneratorKind::LinearRegression), &BASIC, &ls, reps),
            },
            "ex412" => Scenario::Sweep {
                configs: m_sweep(
                    &GeneratorSpec {
                        n_adversarial: 10,
                        ..base(GeneratorKind::LinearRegression)
                    },
                    &BASIC,
                    &ls,
                    reps,
                ),
            },
            "ex421" => Scenario::Sweep {
                configs: m_sweep(
                    &GeneratorSpec {
                        n_adversarial: 10,
                        ..base(GeneratorKind::LogisticClassification)
                    },
                    &BASIC,
                    &logit,
                    reps,
                ),
            },
            "ex422" => Scenario::Sweep {
                configs: m_sweep(
                    &GeneratorSpec {
                        n_adversarial: 10,
                        ..base(GeneratorKind::GaussianMixture)
                    },
                    &[
                        Method::PrimaryOnly,
                        Method::Pooled,
                        Method::Art,
                        Method::ArtIam,
                    ],
                    &machines[1..],
                    reps,
                ),
            },
            "ex431" => Scenario::Sweep {
                configs: m_sweep(
                    &base(GeneratorKind::SparseLinear),
                    &[Method::PrimaryOnly, Method::Art],
                    &[NamedLearner::new("lasso", sim_lasso())],
                    reps,
                ),
            },
            "vi_spectrum" => Scenario::Importance {
                generators: VI_XIS
                    .iter()
                    .map(|&xi| GeneratorSpec {
                        m: 5,
                        xi,
                        // Importance does not use the test rows.
                        n_test: 1,
                        ..base(GeneratorKind::SparseLinear)
                    })
                    .collect(),
                learner: sim_lasso(),
                art: ArtConfig::default(),
                replications: reps,
            },
            "icu_style" => Scenario::SplitProtocol {
                config: ExperimentConfig {
                    generator: GeneratorSpec {
                        n_primary: 80,
                        n_aux: 150,
                        m: 3,
                        n_test: 1,
                        ..base(GeneratorKind::GaussianMixture)
                    },
                    methods: vec![Method::PrimaryOnly, Method::Art, Method::ArtIam],
                    learners: machines.to_vec(),
                    replications: 1,
                    art: ArtConfig::default(),
                },
                n_train: 50,
                n_splits: reps,
            },
            other => {
                return Err(ArtError::Config(format!(
                    "unknown scenario `{other}`; valid names: {}",
                    SCENARIO_NAMES.join(", ")
                )))
            }
        };
        Ok(scenario)
    }

    pub fn run(&self) -> Result<ScenarioOutput> {
        match self {
            Scenario::Sweep { configs } => run_sweep(configs).map(ScenarioOutput::Errors),
            Scenario::Importance {
                generators,
                learner,
                art,
                replications,
            } => {
                let per_xi: Vec<Vec<ImportanceRow>> = generators
                    .par_iter()
                    .map(|g| run_importance(g, learner, art, *replications))
                    .collect::<Result<_>>()?;
                Ok(ScenarioOutput::Importance(
                    per_xi.into_iter().flatten().collect(),
                ))
            }
            Scenario::SplitProtocol {
                config,
                n_train,
                n_splits,
            } => run_split_protocol(config, *n_train, *n_splits).map(ScenarioOutput::Errors),
        }
    }
}
