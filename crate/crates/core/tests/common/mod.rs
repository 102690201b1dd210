#![allow(dead_code)]

use art_core::learners::LassoModel;
use art_core::Dataset;

/// Direct evaluation of the exponential weights after the first `upto`
/// held-out positions: π_m exp(−λ Σ_{l<upto} L_ml), normalized.
pub fn naive_weights(priors: &[f64], losses: &[Vec<f64>], lambda: f64, upto: usize) -> Vec<f64> {
    let raw: Vec<f64> = priors
        .iter()
        .zip(losses)
        .map(|(p, row)| p * (-lambda * row[..upto].iter().sum::<f64>()).exp())
        .collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|r| r / total).collect()
}

/// Worst violation of the lasso optimality conditions on the standardized
/// scale: |g_j| ≤ λ for zero coefficients, g_j = λ·sign(β_j) otherwise.
pub fn kkt_violation(data: &Dataset, m: &LassoModel) -> f64 {
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
        if sd == 0.0 {
            continue;
        }
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

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Standard error of the mean (sample SD / √n).
pub fn se(v: &[f64]) -> f64 {
    let m = mean(v);
    let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() as f64 - 1.0);
    (var / v.len() as f64).sqrt()
}

/// Spearman rank correlation for data without ties.
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&i, &j| v[i].total_cmp(&v[j]));
        let mut r = vec![0.0; v.len()];
        for (rank, i) in idx.into_iter().enumerate() {
            r[i] = rank as f64;
        }
        r
    }
    let (ra, rb) = (ranks(a), ranks(b));
    let (ma, mb) = (mean(&ra), mean(&rb));
    let cov: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = ra.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = rb.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}
