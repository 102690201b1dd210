//! Built-in learning algorithms and the fitted models they produce.
//!
//! Every learner is a plain value ([`LearnerSpec`]) that can be fitted on a
//! [`Dataset`]. Fitting is deterministic: learners that shuffle data carry
//! their own seed.

mod boost;
mod knn;
mod lasso;
mod linear;

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Task};
use crate::error::{ArtError, Result};
use crate::loss::{clip_probability, DEFAULT_CLIP};

pub use boost::{fit_adaboost_stumps, Stump, StumpEnsemble};
pub use knn::{fit_knn, KnnModel};
pub use lasso::{cv_lasso, fit_lasso, lambda_max, CvLassoReport, LassoModel, LassoRule};
pub(crate) use linear::sigmoid;
pub use linear::{fit_logistic, fit_ols, fit_ridge, LinearModel, Link};

/// A learning algorithm with its hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum LearnerSpec {
    Ols,
    Ridge {
        penalty: f64,
    },
    Logistic {
        max_iter: usize,
        tol: f64,
        l2: f64,
    },
    Lasso {
        lambda: f64,
    },
    CvLasso {
        n_folds: usize,
        grid_size: usize,
        rule: LassoRule,
        seed: u64,
    },
    Knn {
        k: usize,
    },
    StumpBoost {
        n_rounds: usize,
        learning_rate: f64,
    },
    /// Ignores the features and predicts a fixed value (clipped for classification).
    Constant {
        value: f64,
    },
}

impl LearnerSpec {
    pub fn logistic() -> Self {
        LearnerSpec::Logistic {
            max_iter: 100,
            tol: 1e-8,
            l2: 1e-8,
        }
    }

    pub fn cv_lasso(seed: u64) -> Self {
        LearnerSpec::CvLasso {
            n_folds: 5,
            grid_size: 50,
            rule: LassoRule::default(),
            seed,
        }
    }

    pub fn stump_boost() -> Self {
        LearnerSpec::StumpBoost {
            n_rounds: 100,
            learning_rate: 0.1,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            LearnerSpec::Ols => "ols",
            LearnerSpec::Ridge { .. } => "ridge",
            LearnerSpec::Logistic { .. } => "logistic",
            LearnerSpec::Lasso { .. } => "lasso",
            LearnerSpec::CvLasso { .. } => "cv_lasso",
            LearnerSpec::Knn { .. } => "knn",
            LearnerSpec::StumpBoost { .. } => "stump_boost",
            LearnerSpec::Constant { .. } => "constant",
        }
    }

    /// Whether fitted models report a selected-variable set.
    pub fn supports_selection(&self) -> bool {
        matches!(
            self,
            LearnerSpec::Lasso { .. } | LearnerSpec::CvLasso { .. }
        )
    }

    /// Task kinds the learner can fit.
    pub fn supports_task(&self, task: Task) -> bool {
        match self {
            LearnerSpec::Ols
            | LearnerSpec::Ridge { .. }
            | LearnerSpec::Lasso { .. }
            | LearnerSpec::CvLasso { .. } => task == Task::Regression,
            LearnerSpec::Logistic { .. }
            | LearnerSpec::Knn { .. }
            | LearnerSpec::StumpBoost { .. } => task == Task::Classification,
            LearnerSpec::Constant { .. } => true,
        }
    }

    /// Same learner with its internal seed replaced; learners without
    /// randomness are returned unchanged.
    pub fn reseeded(&self, new_seed: u64) -> Self {
        match self {
            LearnerSpec::CvLasso {
                n_folds,
                grid_size,
                rule,
                ..
            } => LearnerSpec::CvLasso {
                n_folds: *n_folds,
                grid_size: *grid_size,
                rule: *rule,
                seed: new_seed,
            },
            other => other.clone(),
        }
    }

    pub fn fit(&self, data: &Dataset) -> Result<FittedModel> {
        if !self.supports_task(data.task()) {
            return Err(ArtError::config(format!(
                "learner `{}` cannot fit {} data",
                self.name(),
                data.task()
            )));
        }
        match *self {
            LearnerSpec::Ols => fit_ols(data),
            LearnerSpec::Ridge { penalty } => fit_ridge(data, penalty),
            LearnerSpec::Logistic { max_iter, tol, l2 } => fit_logistic(data, max_iter, tol, l2),
            LearnerSpec::Lasso { lambda } => fit_lasso(data, lambda),
            LearnerSpec::CvLasso {
                n_folds,
                grid_size,
                rule,
                seed,
            } => cv_lasso(data, n_folds, grid_size, rule, seed).map(|(m, _)| m),
            LearnerSpec::Knn { k } => fit_knn(data, k),
            LearnerSpec::StumpBoost {
                n_rounds,
                learning_rate,
            } => fit_adaboost_stumps(data, n_rounds, learning_rate),
            LearnerSpec::Constant { value } => fit_constant(data, value),
        }
    }
}

fn fit_constant(data: &Dataset, value: f64) -> Result<FittedModel> {
    if !value.is_finite() {
        return Err(ArtError::config("constant learner needs a finite value"));
    }
    let value = match data.task() {
        Task::Regression => value,
        Task::Classification => clip_probability(value, DEFAULT_CLIP),
    };
    Ok(FittedModel::new("constant", Model::Constant { value }))
}

/// The trained artifact of one learner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Model {
    Linear(LinearModel),
    Lasso(LassoModel),
    Knn(KnnModel),
    Stumps(StumpEnsemble),
    Constant { value: f64 },
}

impl Model {
    pub fn predict(&self, x: &[f64]) -> f64 {
        match self {
            Model::Linear(m) => m.predict(x),
            Model::Lasso(m) => m.linear.predict(x),
            Model::Knn(m) => m.predict(x),
            Model::Stumps(m) => m.predict(x),
            Model::Constant { value } => *value,
        }
    }

    /// Number of features the model expects, when it is fixed by the model.
    pub fn n_features(&self) -> Option<usize> {
        match self {
            Model::Linear(m) => Some(m.coefficients.len()),
            Model::Lasso(m) => Some(m.linear.coefficients.len()),
            Model::Knn(m) => m.rows.first().map(Vec::len),
            Model::Stumps(_) | Model::Constant { .. } => None,
        }
    }
}

/// A fitted model plus its label and (for selecting learners) the selected columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedModel {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub selected_vars: Option<Vec<usize>>,
    pub model: Model,
}

impl FittedModel {
    pub fn new(label: impl Into<String>, model: Model) -> Self {
        let selected_vars = match &model {
            Model::Lasso(m) => Some(m.active_set.clone()),
            _ => None,
        };
        FittedModel {
            label: label.into(),
            selected_vars,
            model,
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        self.model.predict(x)
    }

    /// Predictions for every row of `data`.
    pub fn predict_all(&self, data: &Dataset) -> Vec<f64> {
        let mut row = vec![0.0; data.n_features()];
        (0..data.n_rows())
            .map(|i| {
                for (j, v) in row.iter_mut().enumerate() {
                    *v = data.features()[(i, j)];
                }
                self.predict(&row)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Task;

    #[test]
    fn task_compatibility_is_enforced() {
        let reg =
            Dataset::from_rows(&[vec![0.0], vec![1.0]], vec![0.0, 1.0], Task::Regression).unwrap();
        let clf = Dataset::from_rows(
            &[vec![0.0], vec![1.0]],
            vec![0.0, 1.0],
            Task::Classification,
        )
        .unwrap();
        assert!(matches!(
            LearnerSpec::logistic().fit(&reg),
            Err(ArtError::Config(_))
        ));
        assert!(matches!(
            LearnerSpec::Ols.fit(&clf),
            Err(ArtError::Config(_))
        ));
        assert!(LearnerSpec::Constant { value: 0.5 }.fit(&clf).is_ok());
    }

    #[test]
    fn constant_learner_clips_probabilities() {
        let clf = Dataset::from_rows(
            &[vec![0.0], vec![1.0]],
            vec![0.0, 1.0],
            Task::Classification,
        )
        .unwrap();
        let m = LearnerSpec::Constant { value: 1.0 }.fit(&clf).unwrap();
        assert_eq!(m.predict(&[3.0]), 1.0 - DEFAULT_CLIP);
    }

    #[test]
    fn only_lasso_learners_select() {
        assert!(LearnerSpec::Lasso { lambda: 0.1 }.supports_selection());
        assert!(LearnerSpec::cv_lasso(0).supports_selection());
        assert!(!LearnerSpec::Ols.supports_selection());
        assert!(!LearnerSpec::stump_boost().supports_selection());
    }
}
