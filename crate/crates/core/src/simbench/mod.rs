//! Simulation designs and replicated experiment runners.

pub mod experiment;
pub mod generators;
pub mod scenarios;

pub use experiment::{
    mean_sd, method_label, run_experiment, run_importance, run_split_protocol, run_sweep,
    summarize, task_loss, test_error, write_importance_csv, write_rows_csv, write_summary_csv,
    ExperimentConfig, ExperimentResult, ImportanceRow, Method, NamedLearner, ResultRow, SummaryRow,
};
pub use generators::{
    ar1_covariance, generate, CorrelatedNormal, Generated, GeneratorKind, GeneratorSpec,
};
pub use scenarios::{Profile, Scenario, ScenarioOutput, SCENARIO_NAMES};
