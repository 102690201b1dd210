//! Exponential weighting of candidate models.
//!
//! Every weight vector here is a softmax of `ln(prior) - lambda * cumulative_loss`
//! evaluated in the log domain, so large losses or large `lambda` never
//! overflow. Candidates with a zero prior get weight zero.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{ArtError, Result};

/// Prior mass over candidates, nonnegative and summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PriorWeights(Vec<f64>);

impl PriorWeights {
    pub fn uniform(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(ArtError::config("priors need at least one candidate"));
        }
        Ok(PriorWeights(vec![1.0 / k as f64; k]))
    }

    /// Normalizes arbitrary nonnegative masses.
    pub fn new(masses: Vec<f64>) -> Result<Self> {
        if masses.is_empty() {
            return Err(ArtError::config("priors need at least one candidate"));
        }
        if masses.iter().any(|&v| !v.is_finite() || v < 0.0) {
            return Err(ArtError::config("priors must be finite and nonnegative"));
        }
        let total: f64 = masses.iter().sum();
        if total <= 0.0 {
            return Err(ArtError::config("priors must have positive total mass"));
        }
        Ok(PriorWeights(
            masses.into_iter().map(|v| v / total).collect(),
        ))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Sequential weights for every test position together with their average.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightTrace {
    /// candidates × test positions; column `i` is the weight vector used at position `i`.
    pub sequential: DMatrix<f64>,
    /// Row means of `sequential`.
    pub final_weights: Vec<f64>,
    pub lambda: f64,
    /// candidates × test positions; entry `(m, i)` sums losses over positions `0..=i`.
    pub cumulative_losses: DMatrix<f64>,
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda > 0.0 {
        Ok(())
    } else {
        Err(ArtError::config(format!(
            "lambda must be positive and finite, got {lambda}"
        )))
    }
}

/// Softmax of `ln(prior_m) - lambda * loss_m`, written into `out`.
fn softmax_into(priors: &[f64], losses: impl Iterator<Item = f64>, lambda: f64, out: &mut [f64]) {
    let mut max = f64::NEG_INFINITY;
    for ((o, &pi), l) in out.iter_mut().zip(priors).zip(losses) {
        *o = if pi > 0.0 {
            pi.ln() - lambda * l
        } else {
            f64::NEG_INFINITY
        };
        max = max.max(*o);
    }
    let mut total = 0.0;
    for o in out.iter_mut() {
        *o = if o.is_finite() { (*o - max).exp() } else { 0.0 };
        total += *o;
    }
    for o in out.iter_mut() {
        *o /= total;
    }
}

/// Sequential exponential weights over the held-out positions.
///
/// `test_losses` is candidates × positions. The weight column at position `i`
/// uses losses from positions strictly before `i`, so the first column equals
/// the priors.
pub fn sequential_weights(
    priors: &PriorWeights,
    test_losses: &DMatrix<f64>,
    lambda: f64,
) -> Result<WeightTrace> {
    check_lambda(lambda)?;
    let (k, n_test) = test_losses.shape();
    if k != priors.len() {
        return Err(ArtError::invalid(format!(
            "{} priors for {k} candidates",
            priors.len()
        )));
    }
    if n_test == 0 {
        return Err(ArtError::EmptyTest);
    }
    if test_losses.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(ArtError::invalid(
            "candidate losses must be finite and nonnegative",
        ));
    }

    let mut sequential = DMatrix::zeros(k, n_test);
    let mut cumulative_losses = DMatrix::zeros(k, n_test);
    let mut running = vec![0.0; k];
    let mut column = vec![0.0; k];
    for i in 0..n_test {
        softmax_into(
            priors.as_slice(),
            running.iter().copied(),
            lambda,
            &mut column,
        );
        for m in 0..k {
            sequential[(m, i)] = column[m];
            running[m] += test_losses[(m, i)];
            cumulative_losses[(m, i)] = running[m];
        }
    }
    let final_weights = (0..k)
        .map(|m| sequential.row(m).iter().sum::<f64>() / n_test as f64)
        .collect();
    Ok(WeightTrace {
        sequential,
        final_weights,
        lambda,
        cumulative_losses,
    })
}

/// One-shot weights from each candidate's total held-out loss.
pub fn simplified_weights(
    priors: &PriorWeights,
    total_losses: &[f64],
    lambda: f64,
) -> Result<Vec<f64>> {
    check_lambda(lambda)?;
    if total_losses.len() != priors.len() {
        return Err(ArtError::invalid(format!(
            "{} priors for {} candidates",
            priors.len(),
            total_losses.len()
        )));
    }
    if total_losses.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(ArtError::invalid(
            "candidate losses must be finite and nonnegative",
        ));
    }
    let mut out = vec![0.0; priors.len()];
    softmax_into(
        priors.as_slice(),
        total_losses.iter().copied(),
        lambda,
        &mut out,
    );
    Ok(out)
}

/// Temperature rule: 1 unless some auxiliary set exceeds ten times the
/// primary size, in which case `(n_train + max_aux) / n_test`.
pub fn default_lambda(n_train: usize, aux_sizes: &[usize], n_test: usize) -> f64 {
    let n_primary = n_train + n_test;
    match aux_sizes.iter().copied().max() {
        Some(largest) if n_test > 0 && largest > 10 * n_primary => {
            (n_train + largest) as f64 / n_test as f64
        }
        _ => 1.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn two_uniform() -> PriorWeights {
        PriorWeights::uniform(2).unwrap()
    }

    #[test]
    fn equal_losses_keep_priors() {
        let losses = DMatrix::from_element(2, 5, 0.7);
        let t = sequential_weights(&two_uniform(), &losses, 1.0).unwrap();
        for v in t.sequential.iter() {
            assert_abs_diff_eq!(*v, 0.5, epsilon = 1e-15);
        }
        assert_eq!(t.final_weights, vec![0.5, 0.5]);
    }

    #[test]
    fn hand_computed_two_position_case() {
        let ln2 = 2f64.ln();
        let losses = DMatrix::from_row_slice(2, 2, &[0.0, 5.0, ln2, 5.0]);
        let t = sequential_weights(&two_uniform(), &losses, 1.0).unwrap();
        assert_abs_diff_eq!(t.sequential[(0, 0)], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(t.sequential[(0, 1)], 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(t.sequential[(1, 1)], 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(t.final_weights[0], 7.0 / 12.0, epsilon = 1e-15);
        assert_abs_diff_eq!(t.final_weights[1], 5.0 / 12.0, epsilon = 1e-15);
        assert_eq!(t.cumulative_losses[(0, 1)], 5.0);
    }

    #[test]
    fn simplified_hand_value() {
        let w = simplified_weights(&two_uniform(), &[0.0, 2f64.ln()], 1.0).unwrap();
        assert_abs_diff_eq!(w[0], 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(w[1], 1.0 / 3.0, epsilon = 1e-15);
        let priors = PriorWeights::new(vec![1.0, 3.0]).unwrap();
        let w = simplified_weights(&priors, &[4.0, 4.0], 2.5).unwrap();
        assert_abs_diff_eq!(w[0], 0.25, epsilon = 1e-15);
    }

    #[test]
    fn tiny_lambda_returns_priors() {
        let priors = PriorWeights::new(vec![0.2, 0.3, 0.5]).unwrap();
        let losses = DMatrix::from_fn(3, 6, |m, i| (m * 7 + i * 3) as f64 % 5.0);
        let t = sequential_weights(&priors, &losses, 1e-300).unwrap();
        for i in 0..6 {
            for m in 0..3 {
                assert_abs_diff_eq!(t.sequential[(m, i)], priors.as_slice()[m], epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn zero_prior_gets_zero_weight() {
        let priors = PriorWeights::new(vec![0.0, 1.0]).unwrap();
        let losses = DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 9.0, 9.0]);
        let t = sequential_weights(&priors, &losses, 1.0).unwrap();
        assert_eq!(t.final_weights, vec![0.0, 1.0]);
    }

    #[test]
    fn large_losses_stay_finite() {
        let losses = DMatrix::from_fn(3, 10, |m, _| 1e3 * (m as f64 + 1.0));
        let t = sequential_weights(&PriorWeights::uniform(3).unwrap(), &losses, 1e3).unwrap();
        assert!(t.sequential.iter().all(|v| v.is_finite()));
        assert_abs_diff_eq!(t.final_weights.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn error_paths() {
        let priors = two_uniform();
        assert!(matches!(
            sequential_weights(&priors, &DMatrix::zeros(2, 0), 1.0),
            Err(ArtError::EmptyTest)
        ));
        let mut bad = DMatrix::zeros(2, 3);
        bad[(1, 2)] = f64::NAN;
        assert!(sequential_weights(&priors, &bad, 1.0).is_err());
        assert!(sequential_weights(&priors, &DMatrix::zeros(2, 3), 0.0).is_err());
        assert!(sequential_weights(&priors, &DMatrix::zeros(3, 3), 1.0).is_err());
        assert!(simplified_weights(&priors, &[1.0, f64::INFINITY], 1.0).is_err());
        assert!(PriorWeights::new(vec![-0.1, 1.0]).is_err());
        assert!(PriorWeights::new(vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn lambda_rule() {
        assert_eq!(default_lambda(25, &[50, 50], 25), 1.0);
        assert_eq!(default_lambda(25, &[5000], 25), 201.0);
        assert_eq!(default_lambda(25, &[], 25), 1.0);
        assert_eq!(default_lambda(25, &[500], 25), 1.0);
    }
}
