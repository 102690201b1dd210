//! Lasso by cyclic coordinate descent, with K-fold cross-validated tuning.
//!
//! Columns are centered and scaled to unit (population) variance before
//! fitting, and the objective on that scale is
//! `(1/2n)·RSS + lambda·Σ|β_j|`. Coordinate updates run on the Gram matrix of
//! the standardized design, keeping `grad_j = (1/n)·x_jᵀr` current after
//! every move so each update costs O(p).

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::linear::{column_means, LinearModel, Link};
use super::{FittedModel, Model};
use crate::data::{Dataset, Task};
use crate::error::{ArtError, Result};

const CONVERGENCE_TOL: f64 = 1e-7;
/// Coefficient tolerance for cross-validation paths, relative to sd(y).
const CV_RELATIVE_TOL: f64 = 1e-4;
const ACTIVE_THRESHOLD: f64 = 1e-12;
const MAX_PASSES: usize = 100_000;
/// Iterates per Anderson extrapolation in the active-set passes.
const ANDERSON_DEPTH: usize = 5;
/// Smallest grid value as a fraction of `lambda_max` (n >= p, and n < p).
const GRID_FLOOR: f64 = 1e-3;
const GRID_FLOOR_WIDE: f64 = 1e-2;

fn grid_floor(n: usize, p: usize) -> f64 {
    if n < p {
        GRID_FLOOR_WIDE
    } else {
        GRID_FLOOR
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LassoModel {
    pub linear: LinearModel,
    pub lambda_reg: f64,
    /// Columns with a nonzero coefficient.
    pub active_set: Vec<usize>,
}

/// How the cross-validated penalty is picked from the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LassoRule {
    /// The grid value with the lowest mean held-out error.
    #[default]
    MinCv,
    /// The largest grid value whose mean error is within one standard error
    /// of the minimum.
    OneSe,
}

/// Cross-validation curve of a [`cv_lasso`] run.
#[derive(Debug, Clone, PartialEq)]
pub struct CvLassoReport {
    pub lambdas: Vec<f64>,
    pub cv_mse: Vec<f64>,
    pub cv_se: Vec<f64>,
    pub chosen: usize,
}

impl CvLassoReport {
    pub fn chosen_lambda(&self) -> f64 {
        self.lambdas[self.chosen]
    }
}

/// Standardized view of a regression dataset.
struct Standardized {
    means: Vec<f64>,
    scales: Vec<f64>,
    usable: Vec<bool>,
    y_mean: f64,
    /// `(1/n) X̃ᵀX̃`
    gram: DMatrix<f64>,
    /// `(1/n) X̃ᵀ(y - ȳ)`
    xty: Vec<f64>,
    /// `(1/2n) |y - ȳ|²`
    null_loss: f64,
}

impl Standardized {
    fn new(data: &Dataset) -> Self {
        let x = data.features();
        let y = data.response();
        let (n, p) = x.shape();
        let nf = n as f64;
        let means: Vec<f64> = column_means(x).iter().copied().collect();
        let mut xs = DMatrix::zeros(n, p);
        let mut scales = vec![1.0; p];
        let mut usable = vec![false; p];
        for j in 0..p {
            let col = x.column(j);
            let var = col.iter().map(|v| (v - means[j]).powi(2)).sum::<f64>() / nf;
            let sd = var.sqrt();
            if sd > 1e-12 * (1.0 + means[j].abs()) {
                scales[j] = sd;
                usable[j] = true;
                for i in 0..n {
                    xs[(i, j)] = (x[(i, j)] - means[j]) / sd;
                }
            }
        }
        let y_mean = y.mean();
        let yc = y.add_scalar(-y_mean);
        let gram = xs.tr_mul(&xs) / nf;
        let xty: Vec<f64> = (xs.tr_mul(&yc) / nf).iter().copied().collect();
        Standardized {
            means,
            scales,
            usable,
            y_mean,
            gram,
            xty,
            null_loss: yc.norm_squared() / (2.0 * nf),
        }
    }

    fn lambda_max(&self) -> f64 {
        self.xty
            .iter()
            .zip(&self.usable)
            .filter(|(_, &u)| u)
            .fold(0.0f64, |m, (v, _)| m.max(v.abs()))
    }

    fn to_linear(&self, beta: &[f64]) -> LinearModel {
        let coefficients: Vec<f64> = beta.iter().zip(&self.scales).map(|(b, s)| b / s).collect();
        let intercept = self.y_mean
            - coefficients
                .iter()
                .zip(&self.means)
                .map(|(b, m)| b * m)
                .sum::<f64>();
        LinearModel {
            intercept,
            coefficients,
            link: Link::Identity,
        }
    }
}

fn soft_threshold(z: f64, gamma: f64) -> f64 {
    if z > gamma {
        z - gamma
    } else if z < -gamma {
        z + gamma
    } else {
        0.0
    }
}

/// Coordinate-descent state on the standardized scale.
struct Solver<'a> {
    s: &'a Standardized,
    beta: Vec<f64>,
    grad: Vec<f64>,
    tol: f64,
}

impl<'a> Solver<'a> {
    fn new(s: &'a Standardized, tol: f64) -> Self {
        let p = s.xty.len();
        Solver {
            s,
            beta: vec![0.0; p],
            grad: s.xty.clone(),
            tol,
        }
    }

    /// Coordinate step for `j` with a full gradient update.
    fn update(&mut self, j: usize, lambda: f64) -> f64 {
        let old = self.beta[j];
        let new = soft_threshold(self.grad[j] + old, lambda);
        let delta = new - old;
        if delta != 0.0 {
            self.beta[j] = new;
            for (g, c) in self.grad.iter_mut().zip(self.s.gram.column(j).iter()) {
                *g -= delta * c;
            }
        }
        delta.abs()
    }

    /// Recomputes `grad = xty - Gβ` from the nonzero coefficients.
    fn refresh_grad(&mut self) {
        self.grad.copy_from_slice(&self.s.xty);
        for (k, &b) in self.beta.iter().enumerate() {
            if b != 0.0 {
                for (g, c) in self.grad.iter_mut().zip(self.s.gram.column(k).iter()) {
                    *g -= b * c;
                }
            }
        }
    }

    /// Full passes alternate with passes over the current nonzero set until
    /// a full pass moves no coefficient by more than the tolerance. Inner
    /// passes work on a contiguous copy of the active block of the Gram
    /// matrix and keep the gradient current on the active set only. Every
    /// few inner passes an Anderson extrapolation of the recent iterates
    /// replaces the current one when it lowers the objective.
    fn solve(&mut self, lambda: f64) {
        let p = self.beta.len();
        let mut passes = 0;
        let mut block = Vec::new();
        loop {
            let mut max_change = 0.0f64;
            for j in 0..p {
                if self.s.usable[j] {
                    max_change = max_change.max(self.update(j, lambda));
                }
            }
            passes += 1;
            if max_change < self.tol || passes >= MAX_PASSES {
                return;
            }
            let active: Vec<usize> = (0..p).filter(|&j| self.beta[j] != 0.0).collect();
            let a = active.len();
            block.clear();
            for &c in &active {
                let col = self.s.gram.column(c);
                block.extend(active.iter().map(|&r| col[r]));
            }
            let mut beta: Vec<f64> = active.iter().map(|&j| self.beta[j]).collect();
            let mut grad: Vec<f64> = active.iter().map(|&j| self.grad[j]).collect();
            let xty: Vec<f64> = active.iter().map(|&j| self.s.xty[j]).collect();
            let mut history = vec![beta.clone()];
            loop {
                let mut inner_change = 0.0f64;
                for k in 0..a {
                    let old = beta[k];
                    let new = soft_threshold(grad[k] + old, lambda);
                    let delta = new - old;
                    if delta != 0.0 {
                        beta[k] = new;
                        for (g, c) in grad.iter_mut().zip(&block[k * a..(k + 1) * a]) {
                            *g -= delta * c;
                        }
                        inner_change = inner_change.max(delta.abs());
                    }
                }
                passes += 1;
                if inner_change < self.tol || passes >= MAX_PASSES {
                    break;
                }
                history.push(beta.clone());
                if history.len() > ANDERSON_DEPTH {
                    if let Some(next) = extrapolate(&history) {
                        let next_grad = block_gradient(&block, &xty, &next);
                        if objective(&next, &next_grad, &xty, lambda)
                            < objective(&beta, &grad, &xty, lambda)
                        {
                            beta = next;
                            grad = next_grad;
                        }
                    }
                    history.clear();
                    history.push(beta.clone());
                }
            }
            for (&j, &b) in active.iter().zip(&beta) {
                self.beta[j] = b;
            }
            self.refresh_grad();
        }
    }

    /// `(1/2n)·RSS` of the current fit, from the Gram representation.
    fn half_mse(&self) -> f64 {
        // (1/2n)|r|² = null - βᵀxty + ½ βᵀGβ, and Gβ = xty - grad.
        let bx: f64 = self.beta.iter().zip(&self.s.xty).map(|(b, v)| b * v).sum();
        let bg: f64 = self.beta.iter().zip(&self.grad).map(|(b, g)| b * g).sum();
        self.s.null_loss - bx + 0.5 * (bx - bg)
    }
}

/// `xty - Gβ` on an active block stored column by column.
fn block_gradient(block: &[f64], xty: &[f64], beta: &[f64]) -> Vec<f64> {
    let mut grad = xty.to_vec();
    for (col, &b) in block.chunks_exact(xty.len()).zip(beta) {
        if b != 0.0 {
            for (g, c) in grad.iter_mut().zip(col) {
                *g -= b * c;
            }
        }
    }
    grad
}

/// Active-block objective `½βᵀGβ - βᵀxty + lambda·|β|₁`, with `Gβ = xty - grad`.
fn objective(beta: &[f64], grad: &[f64], xty: &[f64], lambda: f64) -> f64 {
    beta.iter()
        .zip(grad)
        .zip(xty)
        .map(|((b, g), v)| -0.5 * b * (v + g) + lambda * b.abs())
        .sum()
}

/// Anderson extrapolation from successive iterates: the affine combination
/// of the later iterates whose differences have the smallest norm.
fn extrapolate(history: &[Vec<f64>]) -> Option<Vec<f64>> {
    let k = history.len() - 1;
    let diffs: Vec<Vec<f64>> = history
        .windows(2)
        .map(|w| w[1].iter().zip(&w[0]).map(|(a, b)| a - b).collect())
        .collect();
    let mut gram = DMatrix::from_fn(k, k, |r, c| {
        diffs[r]
            .iter()
            .zip(&diffs[c])
            .map(|(a, b)| a * b)
            .sum::<f64>()
    });
    let ridge = 1e-10 * gram.trace().max(f64::MIN_POSITIVE);
    for i in 0..k {
        gram[(i, i)] += ridge;
    }
    let z = gram.cholesky()?.solve(&DVector::from_element(k, 1.0));
    let total = z.sum();
    if !(total.is_finite() && total != 0.0) {
        return None;
    }
    let mut out = vec![0.0; history[0].len()];
    for (c, iterate) in z.iter().zip(&history[1..]) {
        for (o, v) in out.iter_mut().zip(iterate) {
            *o += c / total * v;
        }
    }
    Some(out)
}

fn lasso_model(s: &Standardized, beta: &[f64], lambda_reg: f64) -> LassoModel {
    let linear = s.to_linear(beta);
    let active_set = linear
        .coefficients
        .iter()
        .enumerate()
        .filter(|(_, b)| b.abs() > ACTIVE_THRESHOLD)
        .map(|(j, _)| j)
        .collect();
    LassoModel {
        linear,
        lambda_reg,
        active_set,
    }
}

fn require_regression(data: &Dataset) -> Result<()> {
    if data.task() != Task::Regression {
        return Err(ArtError::invalid("lasso needs regression data"));
    }
    Ok(())
}

/// Smallest penalty at which every coefficient is zero, on the standardized scale.
pub fn lambda_max(data: &Dataset) -> f64 {
    Standardized::new(data).lambda_max()
}

/// Lasso at a fixed penalty level.
pub fn fit_lasso(data: &Dataset, lambda_reg: f64) -> Result<FittedModel> {
    require_regression(data)?;
    if !(lambda_reg >= 0.0 && lambda_reg.is_finite()) {
        return Err(ArtError::config(format!(
            "lasso penalty must be nonnegative, got {lambda_reg}"
        )));
    }
    let s = Standardized::new(data);
    let mut solver = Solver::new(&s, CONVERGENCE_TOL);
    // Warm-start down a short path; large penalties converge in one pass.
    let lmax = s.lambda_max();
    if lambda_reg < lmax {
        for k in 1..=5 {
            let step = lmax * (lambda_reg.max(lmax * GRID_FLOOR) / lmax).powf(k as f64 / 5.0);
            if step > lambda_reg {
                solver.solve(step);
            }
        }
    }
    solver.solve(lambda_reg);
    Ok(FittedModel::new(
        "lasso",
        Model::Lasso(lasso_model(&s, &solver.beta, lambda_reg)),
    ))
}

fn log_grid(lmax: f64, size: usize, floor: f64) -> Vec<f64> {
    if size == 1 {
        return vec![lmax];
    }
    (0..size)
        .map(|k| lmax * floor.powf(k as f64 / (size - 1) as f64))
        .collect()
}

/// Standardized coefficients along the grid with warm starts.
///
/// Once the fit explains more than 99.9% of the centered variance, or the
/// explained fraction grows by less than 1e-5 between grid values, the
/// remaining grid values reuse the last solution.
fn path(s: &Standardized, lambdas: &[f64], tol: f64) -> Vec<Vec<f64>> {
    let mut solver = Solver::new(s, tol);
    let mut out = Vec::with_capacity(lambdas.len());
    let mut saturated = s.null_loss <= 0.0;
    let mut explained = 0.0;
    for &lambda in lambdas {
        if !saturated {
            solver.solve(lambda);
            let now = 1.0 - solver.half_mse() / s.null_loss;
            saturated = now > 0.999 || (explained > 0.0 && now - explained < 1e-5);
            explained = now;
        }
        out.push(solver.beta.clone());
    }
    out
}

/// Lasso with the penalty chosen by K-fold cross-validation.
///
/// The grid holds `grid_size` log-spaced values from `lambda_max` of the full
/// data down to `1e-3 · lambda_max` (`1e-2 · lambda_max` when there are fewer
/// rows than features). Fold membership is a seeded permutation.
/// The model is refit on all rows at the chosen penalty.
pub fn cv_lasso(
    data: &Dataset,
    n_folds: usize,
    grid_size: usize,
    rule: LassoRule,
    seed: u64,
) -> Result<(FittedModel, CvLassoReport)> {
    require_regression(data)?;
    let n = data.n_rows();
    if n_folds < 2 || n < n_folds {
        return Err(ArtError::config(format!(
            "cross-validation needs 2 <= folds <= rows, got {n_folds} folds for {n} rows"
        )));
    }
    if grid_size == 0 {
        return Err(ArtError::config("lasso grid must have at least one value"));
    }
    let full = Standardized::new(data);
    let lambdas = log_grid(
        full.lambda_max(),
        grid_size,
        grid_floor(n, data.n_features()),
    );

    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut fold_of = vec![0usize; n];
    for (pos, &i) in perm.iter().enumerate() {
        fold_of[i] = pos % n_folds;
    }

    let mut fold_mse = vec![vec![0.0; n_folds]; grid_size];
    for fold in 0..n_folds {
        let train: Vec<usize> = (0..n).filter(|&i| fold_of[i] != fold).collect();
        let test: Vec<usize> = (0..n).filter(|&i| fold_of[i] == fold).collect();
        let train_data = data.select_rows(&train);
        let s = Standardized::new(&train_data);
        let tol = CV_RELATIVE_TOL * (2.0 * s.null_loss).sqrt();
        let betas = path(&s, &lambdas, tol.max(CONVERGENCE_TOL));
        let x = data.features();
        let y = data.response();
        for (g, beta) in betas.iter().enumerate() {
            let model = s.to_linear(beta);
            let coef = DVector::from_column_slice(&model.coefficients);
            let mse = test
                .iter()
                .map(|&i| {
                    let pred = model.intercept + x.row(i).transpose().dot(&coef);
                    (y[i] - pred).powi(2)
                })
                .sum::<f64>()
                / test.len() as f64;
            fold_mse[g][fold] = mse;
        }
    }

    let k = n_folds as f64;
    let cv_mse: Vec<f64> = fold_mse.iter().map(|f| f.iter().sum::<f64>() / k).collect();
    let cv_se: Vec<f64> = fold_mse
        .iter()
        .zip(&cv_mse)
        .map(|(f, m)| {
            let var = f.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (k - 1.0);
            (var / k).sqrt()
        })
        .collect();
    // Ties go to the larger penalty (earlier grid position).
    let best = cv_mse
        .iter()
        .enumerate()
        .fold(0, |b, (g, &v)| if v < cv_mse[b] { g } else { b });
    let chosen = match rule {
        LassoRule::MinCv => best,
        LassoRule::OneSe => {
            let bound = cv_mse[best] + cv_se[best];
            (0..=best).find(|&g| cv_mse[g] <= bound).unwrap_or(best)
        }
    };

    let betas = path(&full, &lambdas[..=chosen], CONVERGENCE_TOL);
    let model = lasso_model(&full, &betas[chosen], lambdas[chosen]);
    Ok((
        FittedModel::new("cv_lasso", Model::Lasso(model)),
        CvLassoReport {
            lambdas,
            cv_mse,
            cv_se,
            chosen,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::fit_ols;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_distr::StandardNormal;

    fn lasso_of(m: &FittedModel) -> &LassoModel {
        match &m.model {
            Model::Lasso(l) => l,
            other => panic!("expected lasso, got {other:?}"),
        }
    }

    fn design(n: usize, p: usize, seed: u64, beta: &[f64], noise: f64) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = DMatrix::from_fn(n, p, |_, _| rng.sample::<f64, _>(StandardNormal));
        let y = DVector::from_fn(n, |i, _| {
            (0..p)
                .map(|j| beta.get(j).copied().unwrap_or(0.0) * x[(i, j)])
                .sum::<f64>()
                + noise * rng.sample::<f64, _>(StandardNormal)
        });
        Dataset::new(x, y, Task::Regression).unwrap()
    }

    /// Subgradient conditions on the standardized scale, computed from scratch.
    fn kkt_violation(data: &Dataset, m: &LassoModel) -> f64 {
        let x = data.features();
        let (n, p) = x.shape();
        let nf = n as f64;
        let resid: Vec<f64> = (0..n)
            .map(|i| data.response()[i] - m.linear.predict(&data.row(i)))
            .collect();
        let mut worst = 0.0f64;
        for j in 0..p {
            let col = x.column(j);
            let mean = col.mean();
            let sd = (col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / nf).sqrt();
            let g: f64 = (0..n)
                .map(|i| (x[(i, j)] - mean) / sd * resid[i])
                .sum::<f64>()
                / nf;
            let b = m.linear.coefficients[j];
            let v = if b == 0.0 {
                (g.abs() - m.lambda_reg).max(0.0)
            } else {
                (g - m.lambda_reg * b.signum()).abs()
            };
            worst = worst.max(v);
        }
        worst
    }

    #[test]
    fn zero_penalty_matches_ols() {
        let d = design(60, 8, 1, &[1.0, -2.0, 0.5, 0.0, 0.0, 3.0, 0.0, 1.0], 1.0);
        let lasso = fit_lasso(&d, 0.0).unwrap();
        let ols = fit_ols(&d).unwrap();
        let Model::Linear(o) = &ols.model else {
            unreachable!()
        };
        let l = &lasso_of(&lasso).linear;
        for j in 0..8 {
            assert_abs_diff_eq!(l.coefficients[j], o.coefficients[j], epsilon = 1e-6);
        }
        assert_abs_diff_eq!(l.intercept, o.intercept, epsilon = 1e-6);
    }

    #[test]
    fn orthonormal_soft_threshold() {
        // Single column with mean 0 and unit population variance; OLS slope 1.
        let x = [1.0, -1.0, 1.0, -1.0];
        let y = [1.0, -1.0, 1.0, -1.0];
        let rows: Vec<Vec<f64>> = x.iter().map(|&v| vec![v]).collect();
        let d = Dataset::from_rows(&rows, y.to_vec(), Task::Regression).unwrap();
        let m = fit_lasso(&d, 0.3).unwrap();
        // One-dimensional subgradient solution: S(1.0, 0.3) = 0.7.
        assert_abs_diff_eq!(lasso_of(&m).linear.coefficients[0], 0.7, epsilon = 1e-12);
    }

    #[test]
    fn lambda_max_zeroes_everything() {
        let d = design(40, 6, 2, &[1.0, 1.0], 0.5);
        let lmax = lambda_max(&d);
        let m = fit_lasso(&d, lmax).unwrap();
        let l = lasso_of(&m);
        assert!(l.active_set.is_empty());
        assert!(l.linear.coefficients.iter().all(|&b| b == 0.0));
        // the zero vector satisfies |(1/n) x̃ᵀ(y - ȳ)| <= lambda for every column
        assert!(kkt_violation(&d, l) <= 1e-12);
        let below = fit_lasso(&d, 0.9 * lmax).unwrap();
        assert!(!lasso_of(&below).active_set.is_empty());
    }

    #[test]
    fn subgradient_optimality() {
        let d = design(80, 30, 3, &[2.0, -1.5, 1.0, 0.0, 0.5], 1.0);
        let lmax = lambda_max(&d);
        for frac in [0.5, 0.2, 0.05, 0.01] {
            let m = fit_lasso(&d, frac * lmax).unwrap();
            let l = lasso_of(&m);
            assert!(kkt_violation(&d, l) < 1e-6, "frac {frac}");
            let expected: Vec<usize> = (0..30)
                .filter(|&j| l.linear.coefficients[j] != 0.0)
                .collect();
            assert_eq!(l.active_set, expected);
        }
    }

    #[test]
    fn active_set_in_range_with_constant_column() {
        let mut d = design(30, 4, 4, &[1.0, 0.0, 0.0, 2.0], 0.1);
        let mut x = d.features().clone();
        x.column_mut(2).fill(5.0);
        d = Dataset::new(x, d.response().clone(), Task::Regression).unwrap();
        let m = fit_lasso(&d, 0.01).unwrap();
        let l = lasso_of(&m);
        assert!(!l.active_set.contains(&2));
        assert_eq!(l.linear.coefficients[2], 0.0);
    }

    #[test]
    fn cv_on_noiseless_signal_picks_small_penalty() {
        let d = design(100, 10, 5, &[3.0, -2.0, 1.5, 0.0, 0.0, 1.0], 0.0);
        let (m, report) = cv_lasso(&d, 5, 50, LassoRule::MinCv, 9).unwrap();
        assert!(report.chosen_lambda() < 0.05 * report.lambdas[0]);
        let mse: f64 = (0..100)
            .map(|i| (d.response()[i] - m.predict(&d.row(i))).powi(2))
            .sum::<f64>()
            / 100.0;
        // The path stops once the fit explains 99.9% of the null loss.
        let var_y = d.response().variance();
        assert!(mse < 1e-2 * var_y, "in-sample mse {mse}, var {var_y}");
    }

    #[test]
    fn cv_on_pure_noise_stays_sparse() {
        let d = design(100, 20, 6, &[], 1.0);
        for rule in [LassoRule::MinCv, LassoRule::OneSe] {
            let (m, report) = cv_lasso(&d, 5, 50, rule, 13).unwrap();
            assert!(
                lasso_of(&m).active_set.len() <= 2,
                "{rule:?}: {:?}",
                lasso_of(&m).active_set
            );
            assert!(report.chosen_lambda() > 0.3 * report.lambdas[0]);
        }
    }

    #[test]
    fn cv_is_deterministic_and_validates_folds() {
        let d = design(50, 8, 7, &[1.0, 1.0], 1.0);
        let (a, ra) = cv_lasso(&d, 5, 20, LassoRule::MinCv, 3).unwrap();
        let (b, rb) = cv_lasso(&d, 5, 20, LassoRule::MinCv, 3).unwrap();
        assert_eq!(ra.chosen_lambda(), rb.chosen_lambda());
        assert_eq!(a, b);
        let small = d.select_rows(&[0, 1, 2]);
        assert!(matches!(
            cv_lasso(&small, 5, 20, LassoRule::MinCv, 3),
            Err(ArtError::Config(_))
        ));
    }

    #[test]
    fn one_se_rule_never_picks_smaller_penalty() {
        let d = design(80, 40, 8, &[1.0, 0.8, 0.6, 0.4, 0.2], 1.0);
        let (_, min) = cv_lasso(&d, 5, 40, LassoRule::MinCv, 1).unwrap();
        let (_, one) = cv_lasso(&d, 5, 40, LassoRule::OneSe, 1).unwrap();
        assert!(one.chosen_lambda() >= min.chosen_lambda());
    }
}
