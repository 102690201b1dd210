//! Adaptive and robust transfer learning.
//!
//! Candidate models are fitted on the primary training rows alone and on the
//! primary rows stacked with each auxiliary dataset. Their losses on held-out
//! primary rows drive exponential weights, and the weighted combination is the
//! final predictor. Weights also yield a variable-importance score for
//! selecting learners such as the lasso.

pub mod data;
pub mod error;
pub mod learners;
pub mod loss;
pub mod pipeline;
pub mod seed;
pub mod simbench;
pub mod table;
pub mod weighting;

pub use data::{split_primary, stack, stack_all, Dataset, SplitIndices, Task};
pub use error::{ArtError, Result};
pub use learners::{FittedModel, LassoRule, LearnerSpec, Model};
pub use loss::{Loss, DEFAULT_CLIP};
pub use pipeline::{
    art_fit, art_iam_fit, art_iam_fit_cached, art_predict, classify, variable_importance,
    ArtConfig, ArtModel, CandidateCache, RefitPolicy, SplitRecord, VariableImportance, WeightMode,
};
pub use table::{read_table, read_table_path, Table};
pub use weighting::{
    default_lambda, sequential_weights, simplified_weights, PriorWeights, WeightTrace,
};
