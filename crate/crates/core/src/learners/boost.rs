//! Gradient boosting of depth-one trees on the logistic deviance.

use serde::{Deserialize, Serialize};

use super::linear::sigmoid;
use super::{FittedModel, Model};
use crate::data::{Dataset, Task};
use crate::error::{ArtError, Result};
use crate::loss::{clip_probability, DEFAULT_CLIP};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stump {
    pub feature: usize,
    pub threshold: f64,
    /// Score added when `x[feature] <= threshold`; already scaled by the learning rate.
    pub left: f64,
    pub right: f64,
}

impl Stump {
    fn score(&self, x: &[f64]) -> f64 {
        if x[self.feature] <= self.threshold {
            self.left
        } else {
            self.right
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StumpEnsemble {
    /// Initial log-odds (class rate of the training data).
    pub base_score: f64,
    pub stumps: Vec<Stump>,
    pub learning_rate: f64,
    pub n_rounds: usize,
}

impl StumpEnsemble {
    pub fn log_odds(&self, x: &[f64]) -> f64 {
        self.base_score + self.stumps.iter().map(|s| s.score(x)).sum::<f64>()
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        clip_probability(sigmoid(self.log_odds(x)), DEFAULT_CLIP)
    }
}

/// Best least-squares stump for `residual`, scanning midpoints between
/// consecutive distinct values of every feature.
fn best_stump(data: &Dataset, order: &[Vec<usize>], residual: &[f64]) -> (usize, f64, f64, f64) {
    let n = residual.len();
    let total: f64 = residual.iter().sum();
    let x = data.features();
    let mut best: Option<(f64, usize, f64, f64, f64)> = None;
    for (j, idx) in order.iter().enumerate() {
        let mut left_sum = 0.0;
        for pos in 0..n - 1 {
            let i = idx[pos];
            left_sum += residual[i];
            let here = x[(i, j)];
            let next = x[(idx[pos + 1], j)];
            if next <= here {
                continue;
            }
            let n_left = (pos + 1) as f64;
            let n_right = (n - pos - 1) as f64;
            let right_sum = total - left_sum;
            let gain = left_sum * left_sum / n_left + right_sum * right_sum / n_right;
            if best.is_none_or(|b| gain > b.0) {
                let threshold = here + 0.5 * (next - here);
                best = Some((gain, j, threshold, left_sum / n_left, right_sum / n_right));
            }
        }
    }
    match best {
        Some((_, j, t, l, r)) => (j, t, l, r),
        // Every feature is constant: a single leaf holding the mean residual.
        None => {
            let mean = total / n as f64;
            (0, x[(0, 0)], mean, mean)
        }
    }
}

/// Boosted stumps for binary classification.
///
/// Each round fits the least-squares stump to the negative gradient of the
/// logistic deviance (`y - p`), with leaf values equal to the mean residual,
/// and adds it scaled by `learning_rate`.
pub fn fit_adaboost_stumps(
    data: &Dataset,
    n_rounds: usize,
    learning_rate: f64,
) -> Result<FittedModel> {
    if data.task() != Task::Classification {
        return Err(ArtError::invalid(
            "stump boosting needs classification data",
        ));
    }
    if !data.has_both_classes() {
        return Err(ArtError::invalid(
            "stump boosting needs both classes present",
        ));
    }
    if !(learning_rate > 0.0 && learning_rate.is_finite()) {
        return Err(ArtError::config(format!(
            "learning rate must be positive, got {learning_rate}"
        )));
    }
    let n = data.n_rows();
    let y = data.response();
    let x = data.features();
    let rate = clip_probability(y.mean(), DEFAULT_CLIP);
    let base_score = (rate / (1.0 - rate)).ln();

    let order: Vec<Vec<usize>> = (0..data.n_features())
        .map(|j| {
            let mut idx: Vec<usize> = (0..n).collect();
            idx.sort_by(|&a, &b| x[(a, j)].total_cmp(&x[(b, j)]).then(a.cmp(&b)));
            idx
        })
        .collect();

    let mut scores = vec![base_score; n];
    let mut residual = vec![0.0; n];
    let mut stumps = Vec::with_capacity(n_rounds);
    for _ in 0..n_rounds {
        for i in 0..n {
            residual[i] = y[i] - sigmoid(scores[i]);
        }
        let (feature, threshold, left, right) = best_stump(data, &order, &residual);
        let stump = Stump {
            feature,
            threshold,
            left: learning_rate * left,
            right: learning_rate * right,
        };
        for (i, s) in scores.iter_mut().enumerate() {
            *s += if x[(i, feature)] <= threshold {
                stump.left
            } else {
                stump.right
            };
        }
        stumps.push(stump);
    }

    Ok(FittedModel::new(
        "stump_boost",
        Model::Stumps(StumpEnsemble {
            base_score,
            stumps,
            learning_rate,
            n_rounds,
        }),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn deviance(m: &FittedModel, d: &Dataset) -> f64 {
        (0..d.n_rows())
            .map(|i| {
                let Model::Stumps(e) = &m.model else {
                    unreachable!()
                };
                let p = sigmoid(e.log_odds(&d.row(i)));
                let y = d.response()[i];
                -(y * p.ln() + (1.0 - y) * (1.0 - p).ln())
            })
            .sum()
    }

    #[test]
    fn separable_line_reaches_zero_training_error() {
        let rows: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64 * 0.37 - 2.0]).collect();
        let y: Vec<f64> = (0..20).map(|i| if i >= 9 { 1.0 } else { 0.0 }).collect();
        let d = Dataset::from_rows(&rows, y.clone(), Task::Classification).unwrap();
        let m = fit_adaboost_stumps(&d, 100, 0.1).unwrap();
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(m.predict(row) > 0.5, y[i] == 1.0);
        }
    }

    #[test]
    fn zero_rounds_is_class_rate() {
        let rows: Vec<Vec<f64>> = (0..8).map(|i| vec![i as f64]).collect();
        let d = Dataset::from_rows(
            &rows,
            vec![1., 0., 0., 1., 0., 0., 0., 0.],
            Task::Classification,
        )
        .unwrap();
        let m = fit_adaboost_stumps(&d, 0, 0.1).unwrap();
        assert!((m.predict(&[100.0]) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn deviance_never_increases() {
        for seed in 0..5 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rows: Vec<Vec<f64>> = (0..60)
                .map(|_| (0..3).map(|_| rng.random::<f64>() * 4.0 - 2.0).collect())
                .collect();
            let y: Vec<f64> = rows
                .iter()
                .map(|r| {
                    if r[0] * r[1] + 0.3 * rng.random::<f64>() > 0.0 {
                        1.0
                    } else {
                        0.0
                    }
                })
                .collect();
            let d = Dataset::from_rows(&rows, y, Task::Classification).unwrap();
            let mut last = f64::INFINITY;
            for rounds in 0..40 {
                let dev = deviance(&fit_adaboost_stumps(&d, rounds, 0.1).unwrap(), &d);
                assert!(
                    dev <= last + 1e-12,
                    "seed {seed} round {rounds}: {dev} > {last}"
                );
                last = dev;
            }
        }
    }

    #[test]
    fn single_class_rejected() {
        let d = Dataset::from_rows(
            &[vec![0.0], vec![1.0]],
            vec![0.0, 0.0],
            Task::Classification,
        )
        .unwrap();
        assert!(matches!(
            fit_adaboost_stumps(&d, 10, 0.1),
            Err(ArtError::InvalidInput(_))
        ));
    }
}
