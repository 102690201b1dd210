//! Least squares, ridge and logistic regression.
//!
//! All three fit an unpenalized intercept by centering; ridge and logistic
//! penalize only the slope coefficients.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{FittedModel, Model};
use crate::data::{Dataset, Task};
use crate::error::{ArtError, Result};
use crate::loss::{clip_probability, DEFAULT_CLIP};

/// Penalty used when the least-squares Gram matrix is singular.
const OLS_FALLBACK_PENALTY: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Link {
    Identity,
    Logit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub intercept: f64,
    pub coefficients: Vec<f64>,
    pub link: Link,
}

impl LinearModel {
    pub fn linear_predictor(&self, x: &[f64]) -> f64 {
        self.intercept
            + self
                .coefficients
                .iter()
                .zip(x)
                .map(|(b, v)| b * v)
                .sum::<f64>()
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        let eta = self.linear_predictor(x);
        match self.link {
            Link::Identity => eta,
            Link::Logit => clip_probability(sigmoid(eta), DEFAULT_CLIP),
        }
    }
}

pub(crate) fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

pub(crate) fn column_means(x: &DMatrix<f64>) -> DVector<f64> {
    let n = x.nrows() as f64;
    DVector::from_iterator(x.ncols(), x.column_iter().map(|c| c.sum() / n))
}

pub(crate) fn centered(x: &DMatrix<f64>, means: &DVector<f64>) -> DMatrix<f64> {
    let mut xc = x.clone();
    for (j, mut col) in xc.column_iter_mut().enumerate() {
        col.add_scalar_mut(-means[j]);
    }
    xc
}

fn require_regression(data: &Dataset, min_rows: usize) -> Result<()> {
    if data.task() != Task::Regression {
        return Err(ArtError::invalid("least squares needs regression data"));
    }
    if data.n_rows() < min_rows {
        return Err(ArtError::InsufficientData(format!(
            "need at least {min_rows} rows, got {}",
            data.n_rows()
        )));
    }
    Ok(())
}

/// Solves `(XcᵀXc + penalty·I) β = Xcᵀyc` by Cholesky, returning `None`
/// when the system is not numerically positive definite.
fn solve_centered(xc: &DMatrix<f64>, yc: &DVector<f64>, penalty: f64) -> Option<DVector<f64>> {
    let mut gram = xc.tr_mul(xc);
    for j in 0..gram.ncols() {
        gram[(j, j)] += penalty;
    }
    let rhs = xc.tr_mul(yc);
    let chol = gram.clone().cholesky()?;
    let diag_max = gram.diagonal().max();
    let l = chol.l_dirty();
    let min_pivot = (0..l.ncols())
        .map(|j| l[(j, j)])
        .fold(f64::INFINITY, f64::min);
    if diag_max > 0.0 && min_pivot * min_pivot < 1e-12 * diag_max {
        return None;
    }
    Some(chol.solve(&rhs))
}

fn linear_from_centered(data: &Dataset, penalty: f64, allow_fallback: bool) -> Result<LinearModel> {
    let x = data.features();
    let y = data.response();
    let means = column_means(x);
    let y_mean = y.mean();
    let xc = centered(x, &means);
    let yc = y.add_scalar(-y_mean);

    let beta = match solve_centered(&xc, &yc, penalty) {
        Some(b) => b,
        None if allow_fallback => solve_centered(&xc, &yc, penalty.max(OLS_FALLBACK_PENALTY))
            .or_else(|| {
                // Fully degenerate design: scale the fallback to the Gram diagonal.
                let scale = xc.iter().map(|v| v * v).sum::<f64>().max(1.0);
                solve_centered(&xc, &yc, OLS_FALLBACK_PENALTY * scale)
            })
            .ok_or_else(|| ArtError::Numerical("least-squares system is singular".into()))?,
        None => {
            return Err(ArtError::Numerical(
                "ridge system is not positive definite".into(),
            ))
        }
    };
    let intercept = y_mean - beta.dot(&means);
    Ok(LinearModel {
        intercept,
        coefficients: beta.iter().copied().collect(),
        link: Link::Identity,
    })
}

/// Ordinary least squares with intercept.
///
/// A singular Gram matrix falls back to ridge with penalty `1e-8`.
pub fn fit_ols(data: &Dataset) -> Result<FittedModel> {
    require_regression(data, 2)?;
    let model = linear_from_centered(data, 0.0, true)?;
    Ok(FittedModel::new("ols", Model::Linear(model)))
}

/// Minimizes `RSS + penalty * |β|²` with an unpenalized intercept.
pub fn fit_ridge(data: &Dataset, penalty: f64) -> Result<FittedModel> {
    if !(penalty >= 0.0 && penalty.is_finite()) {
        return Err(ArtError::config(format!(
            "ridge penalty must be nonnegative, got {penalty}"
        )));
    }
    require_regression(data, 2)?;
    let model = linear_from_centered(data, penalty, true)?;
    Ok(FittedModel::new("ridge", Model::Linear(model)))
}

/// Negative penalized log-likelihood: `-ℓ(b0, β) + (l2 / 2)|β|²`.
fn logistic_objective(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    b0: f64,
    beta: &DVector<f64>,
    l2: f64,
) -> f64 {
    let eta = x * beta;
    let nll: f64 = eta
        .iter()
        .zip(y.iter())
        .map(|(&e, &yi)| {
            let t = e + b0;
            // log(1 + exp(t)) - y t, computed stably
            let softplus = if t > 0.0 {
                t + (-t).exp().ln_1p()
            } else {
                t.exp().ln_1p()
            };
            softplus - yi * t
        })
        .sum();
    nll + 0.5 * l2 * beta.norm_squared()
}

/// Logistic regression by iteratively reweighted least squares.
///
/// Maximizes the log-likelihood minus `(l2 / 2)|β|²` (intercept unpenalized).
/// Each Newton step is damped by step halving so the objective never
/// increases; iteration stops once the largest coefficient change falls below
/// `tol` or after `max_iter` steps.
pub fn fit_logistic(data: &Dataset, max_iter: usize, tol: f64, l2: f64) -> Result<FittedModel> {
    if data.task() != Task::Classification {
        return Err(ArtError::invalid(
            "logistic regression needs classification data",
        ));
    }
    if !data.has_both_classes() {
        return Err(ArtError::invalid(
            "logistic regression needs both classes present",
        ));
    }
    if !(l2 >= 0.0 && tol > 0.0) {
        return Err(ArtError::config("logistic needs l2 >= 0 and tol > 0"));
    }
    let x = data.features();
    let y = data.response();
    let (n, p) = x.shape();

    let rate = y.mean();
    let mut b0 = (rate / (1.0 - rate)).ln();
    let mut beta = DVector::zeros(p);
    let mut objective = logistic_objective(x, y, b0, &beta, l2);

    for _ in 0..max_iter {
        let eta = x * &beta;
        // Gradient and Hessian of the objective in (b0, β).
        let mut grad = DVector::zeros(p + 1);
        let mut hess = DMatrix::zeros(p + 1, p + 1);
        let mut design_row = DVector::zeros(p + 1);
        for i in 0..n {
            let mu = sigmoid(eta[i] + b0);
            let w = (mu * (1.0 - mu)).max(1e-12);
            design_row[0] = 1.0;
            for j in 0..p {
                design_row[j + 1] = x[(i, j)];
            }
            grad.axpy(mu - y[i], &design_row, 1.0);
            hess.ger(w, &design_row, &design_row, 1.0);
        }
        for j in 0..p {
            grad[j + 1] += l2 * beta[j];
            hess[(j + 1, j + 1)] += l2;
        }
        // Keep the Newton system solvable on degenerate designs.
        let ridge = 1e-10 * (1.0 + hess.diagonal().max());
        for j in 0..=p {
            hess[(j, j)] += ridge;
        }
        let step = match hess.cholesky() {
            Some(c) => c.solve(&grad),
            None => return Err(ArtError::Numerical("IRLS Hessian is singular".into())),
        };

        let mut scale = 1.0;
        let mut accepted = None;
        for _ in 0..30 {
            let cand_b0 = b0 - scale * step[0];
            let cand_beta = &beta - step.rows(1, p) * scale;
            let cand_obj = logistic_objective(x, y, cand_b0, &cand_beta, l2);
            if cand_obj.is_finite() && cand_obj <= objective {
                accepted = Some((cand_b0, cand_beta, cand_obj));
                break;
            }
            scale *= 0.5;
        }
        let Some((new_b0, new_beta, new_obj)) = accepted else {
            break;
        };
        let change = (new_b0 - b0).abs().max((&new_beta - &beta).amax());
        b0 = new_b0;
        beta = new_beta;
        objective = new_obj;
        if change < tol {
            break;
        }
    }

    Ok(FittedModel::new(
        "logistic",
        Model::Linear(LinearModel {
            intercept: b0,
            coefficients: beta.iter().copied().collect(),
            link: Link::Logit,
        }),
    ))
}
