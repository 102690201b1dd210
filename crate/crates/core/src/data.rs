//! Labeled tabular samples, primary-data splitting and stacking.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ArtError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Regression,
    Classification,
}

impl std::fmt::Display for Task {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Task::Regression => f.write_str("regression"),
            Task::Classification => f.write_str("classification"),
        }
    }
}

impl std::str::FromStr for Task {
    type Err = ArtError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "regression" => Ok(Task::Regression),
            "classification" => Ok(Task::Classification),
            other => Err(ArtError::config(format!("unknown task `{other}`"))),
        }
    }
}

/// A dense feature matrix with its response vector.
///
/// Rows are observations. Classification responses are exactly 0 or 1 and
/// nothing non-finite is admitted.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: DMatrix<f64>,
    response: DVector<f64>,
    task: Task,
}

impl Dataset {
    pub fn new(features: DMatrix<f64>, response: DVector<f64>, task: Task) -> Result<Self> {
        if features.nrows() == 0 {
            return Err(ArtError::invalid("dataset has no rows"));
        }
        Self::checked(features, response, task)
    }

    /// Builds a dataset from row-major feature rows.
    pub fn from_rows(rows: &[Vec<f64>], response: Vec<f64>, task: Task) -> Result<Self> {
        let p = rows.first().map(Vec::len).unwrap_or(0);
        if let Some(bad) = rows.iter().position(|r| r.len() != p) {
            return Err(ArtError::invalid(format!(
                "row {bad} has {} columns, expected {p}",
                rows[bad].len()
            )));
        }
        let features = DMatrix::from_fn(rows.len(), p, |i, j| rows[i][j]);
        Self::new(features, DVector::from_vec(response), task)
    }

    /// A zero-row dataset; the identity element for [`stack`].
    pub fn empty(n_features: usize, task: Task) -> Self {
        Dataset {
            features: DMatrix::zeros(0, n_features),
            response: DVector::zeros(0),
            task,
        }
    }

    fn checked(features: DMatrix<f64>, response: DVector<f64>, task: Task) -> Result<Self> {
        if features.ncols() == 0 {
            return Err(ArtError::invalid("dataset has no feature columns"));
        }
        if features.nrows() != response.len() {
            return Err(ArtError::invalid(format!(
                "feature matrix has {} rows but response has {}",
                features.nrows(),
                response.len()
            )));
        }
        if features.iter().any(|v| !v.is_finite()) {
            return Err(ArtError::invalid("non-finite value in features"));
        }
        if response.iter().any(|v| !v.is_finite()) {
            return Err(ArtError::invalid("non-finite value in response"));
        }
        if task == Task::Classification && response.iter().any(|&v| v != 0.0 && v != 1.0) {
            return Err(ArtError::invalid(
                "classification response must contain only 0 and 1",
            ));
        }
        Ok(Dataset {
            features,
            response,
            task,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.features.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.features.ncols()
    }

    pub fn task(&self) -> Task {
        self.task
    }

    pub fn features(&self) -> &DMatrix<f64> {
        &self.features
    }

    pub fn response(&self) -> &DVector<f64> {
        &self.response
    }

    pub fn is_empty(&self) -> bool {
        self.n_rows() == 0
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.features.row(i).iter().copied().collect()
    }

    /// Rows in the given order (duplicates allowed).
    pub fn select_rows(&self, idx: &[usize]) -> Dataset {
        let p = self.n_features();
        Dataset {
            features: DMatrix::from_fn(idx.len(), p, |i, j| self.features[(idx[i], j)]),
            response: DVector::from_fn(idx.len(), |i, _| self.response[idx[i]]),
            task: self.task,
        }
    }

    /// Count of responses equal to 1.
    pub fn positives(&self) -> usize {
        self.response.iter().filter(|&&v| v == 1.0).count()
    }

    pub fn has_both_classes(&self) -> bool {
        let pos = self.positives();
        pos > 0 && pos < self.n_rows()
    }
}

/// Disjoint train/test positions into the primary dataset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitIndices {
    pub train_idx: Vec<usize>,
    pub test_idx: Vec<usize>,
}

/// Seeded random split of the primary data.
///
/// The train part receives `floor(ratio * n)` rows. Classification data are
/// stratified by class so that each half sees both labels whenever the class
/// counts allow it. Both parts keep the order of the seeded permutation.
pub fn split_primary(data: &Dataset, ratio: f64, seed: u64) -> Result<SplitIndices> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(ArtError::config(format!(
            "split ratio must lie in (0, 1), got {ratio}"
        )));
    }
    let n = data.n_rows();
    let n_train = (ratio * n as f64).floor() as usize;
    if n_train == 0 || n_train >= n {
        return Err(ArtError::config(format!(
            "degenerate split: {n} rows with ratio {ratio} gives {n_train} training rows"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);

    let in_train = match data.task() {
        Task::Regression => {
            let mut mask = vec![false; n];
            for &i in &perm[..n_train] {
                mask[i] = true;
            }
            mask
        }
        Task::Classification => stratified_mask(data, &perm, n_train),
    };

    let (train_idx, test_idx) = perm.iter().partition(|&&i| in_train[i]);
    Ok(SplitIndices {
        train_idx,
        test_idx,
    })
}

fn stratified_mask(data: &Dataset, perm: &[usize], n_train: usize) -> Vec<bool> {
    let n = perm.len();
    let y = data.response();
    let ones: Vec<usize> = perm.iter().copied().filter(|&i| y[i] == 1.0).collect();
    let zeros: Vec<usize> = perm.iter().copied().filter(|&i| y[i] != 1.0).collect();

    let (n1, n0) = (ones.len(), zeros.len());
    // Each side keeps at least one of every class that has two or more rows.
    let bounds = |count: usize| {
        if count >= 2 {
            (1, count - 1)
        } else {
            (0, count)
        }
    };
    let (lo1, hi1) = bounds(n1);
    let (lo0, hi0) = bounds(n0);
    let lo = lo1.max(n_train.saturating_sub(hi0));
    let hi = hi1.min(n_train.saturating_sub(lo0));
    let proportional = (n_train as f64 * n1 as f64 / n as f64).round() as usize;
    let take_one = if lo <= hi {
        proportional.clamp(lo, hi)
    } else {
        proportional.clamp(n_train.saturating_sub(n0), n1.min(n_train))
    };
    let take_zero = n_train - take_one;

    let mut mask = vec![false; n];
    for &i in ones
        .iter()
        .take(take_one)
        .chain(zeros.iter().take(take_zero))
    {
        mask[i] = true;
    }
    mask
}

/// Row-concatenates `train_part` with `aux`, training rows first.
pub fn stack(train_part: &Dataset, aux: &Dataset) -> Result<Dataset> {
    if train_part.n_features() != aux.n_features() {
        return Err(ArtError::invalid(format!(
            "cannot stack datasets with {} and {} features",
            train_part.n_features(),
            aux.n_features()
        )));
    }
    if train_part.task() != aux.task() {
        return Err(ArtError::invalid(format!(
            "cannot stack {} data with {} data",
            train_part.task(),
            aux.task()
        )));
    }
    if aux.is_empty() {
        return Ok(train_part.clone());
    }
    stack_all(train_part, std::slice::from_ref(aux))
}

/// Stacks any number of same-shaped datasets in order.
pub fn stack_all(first: &Dataset, rest: &[Dataset]) -> Result<Dataset> {
    let p = first.n_features();
    for d in rest {
        if d.n_features() != p || d.task() != first.task() {
            return Err(ArtError::invalid(
                "stacked datasets must share feature count and task",
            ));
        }
    }
    let n: usize = first.n_rows() + rest.iter().map(Dataset::n_rows).sum::<usize>();
    let mut features = DMatrix::zeros(n, p);
    let mut response = DVector::zeros(n);
    let mut offset = 0;
    for d in std::iter::once(first).chain(rest.iter()) {
        let m = d.n_rows();
        features.rows_mut(offset, m).copy_from(d.features());
        response.rows_mut(offset, m).copy_from(d.response());
        offset += m;
    }
    Ok(Dataset {
        features,
        response,
        task: first.task(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn regression(n: usize, p: usize) -> Dataset {
        let features = DMatrix::from_fn(n, p, |i, j| (i * p + j) as f64);
        let response = DVector::from_fn(n, |i, _| i as f64);
        Dataset::new(features, response, Task::Regression).unwrap()
    }

    #[test]
    fn rejects_bad_inputs() {
        let f = DMatrix::from_element(2, 1, 1.0);
        assert!(Dataset::new(f.clone(), DVector::from_vec(vec![1.0]), Task::Regression).is_err());
        assert!(Dataset::new(
            f.clone(),
            DVector::from_vec(vec![0.0, 0.5]),
            Task::Classification
        )
        .is_err());
        assert!(Dataset::new(
            f.clone(),
            DVector::from_vec(vec![0.0, f64::NAN]),
            Task::Regression
        )
        .is_err());
        let mut g = f.clone();
        g[(1, 0)] = f64::INFINITY;
        assert!(Dataset::new(g, DVector::from_vec(vec![0.0, 1.0]), Task::Regression).is_err());
        assert!(Dataset::new(DMatrix::zeros(0, 1), DVector::zeros(0), Task::Regression).is_err());
    }

    #[test]
    fn split_sizes_follow_floor() {
        let d = regression(50, 2);
        let s = split_primary(&d, 0.5, 7).unwrap();
        assert_eq!((s.train_idx.len(), s.test_idx.len()), (25, 25));

        let d = regression(3, 2);
        let s = split_primary(&d, 0.5, 7).unwrap();
        assert_eq!((s.train_idx.len(), s.test_idx.len()), (1, 2));
    }

    #[test]
    fn split_is_deterministic_partition() {
        let d = regression(31, 2);
        let a = split_primary(&d, 0.5, 99).unwrap();
        let b = split_primary(&d, 0.5, 99).unwrap();
        assert_eq!(a, b);
        let mut all: Vec<usize> = a.train_idx.iter().chain(&a.test_idx).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..31).collect::<Vec<_>>());
        let c = split_primary(&d, 0.5, 100).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn degenerate_split_is_config_error() {
        let d = regression(2, 1);
        assert!(matches!(
            split_primary(&d, 0.4, 0),
            Err(ArtError::Config(_))
        ));
        assert!(matches!(
            split_primary(&d, 1.0, 0),
            Err(ArtError::Config(_))
        ));
        let d = regression(1, 1);
        assert!(split_primary(&d, 0.5, 0).is_err());
    }

    #[test]
    fn stratified_split_keeps_both_classes() {
        // 3 positives out of 20: a plain split could put them all on one side.
        let y: Vec<f64> = (0..20).map(|i| if i < 3 { 1.0 } else { 0.0 }).collect();
        let rows: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64]).collect();
        let d = Dataset::from_rows(&rows, y, Task::Classification).unwrap();
        for seed in 0..200 {
            let s = split_primary(&d, 0.5, seed).unwrap();
            assert_eq!(s.train_idx.len(), 10);
            let tr = d.select_rows(&s.train_idx);
            let te = d.select_rows(&s.test_idx);
            assert!(tr.has_both_classes(), "seed {seed}");
            assert!(te.has_both_classes(), "seed {seed}");
        }
    }

    #[test]
    fn stack_orders_rows_and_checks_shape() {
        let a = regression(25, 10);
        let b = regression(50, 10);
        let s = stack(&a, &b).unwrap();
        assert_eq!((s.n_rows(), s.n_features()), (75, 10));
        assert_eq!(s.row(0), a.row(0));
        assert_eq!(s.row(25), b.row(0));
        assert_eq!(s.response()[74], b.response()[49]);

        let e = Dataset::empty(10, Task::Regression);
        assert_eq!(stack(&a, &e).unwrap(), a);

        let c = Dataset::from_rows(&[vec![0.0; 10]], vec![1.0], Task::Classification).unwrap();
        assert!(stack(&a, &c).is_err());
        let narrow = regression(4, 3);
        assert!(stack(&a, &narrow).is_err());
    }
}
