//! Synthetic data generators for the regression, classification and sparse
//! simulation designs.
//!
//! Each component of a draw (coefficients, primary rows, test rows, every
//! auxiliary and adversarial set) reads from its own ChaCha8 stream derived
//! from the generator seed, so growing `m` adds auxiliary sets without disturbing
//! the primary or test data. Normal variates come from `rand_distr`'s
//! ziggurat sampler.

use nalgebra::{DMatrix, DVector};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Task};
use crate::error::{ArtError, Result};
use crate::learners::sigmoid;
use crate::seed::derive_seed;

/// Number of leading coordinates that are nonzero in the sparse design.
pub const SPARSE_ACTIVE: usize = 16;
/// Extra shifted coordinates per auxiliary set in the sparse design.
pub const SPARSE_EXTRA: usize = 12;
/// Leading nonzero coordinates of the mixture centres.
pub const MIXTURE_LEADING: usize = 5;
pub const MIXTURE_COMPONENTS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    /// `y = βᵀx + ε`, x ~ N(0, Σ_AR(0.5)), β ~ N(1, I); auxiliary β + ξ, adversarial −β − ξ.
    LinearRegression,
    /// Same covariates, `P(y = 1) = sigmoid(βᵀx)`.
    LogisticClassification,
    /// Five-component Gaussian mixture per class around ±μ(1,…,1,0,…,0).
    GaussianMixture,
    /// p = 200, first 16 coefficients 0.3; auxiliary sets shift 28 coordinates by 2ξ.
    SparseLinear,
}

impl GeneratorKind {
    pub fn task(self) -> Task {
        match self {
            GeneratorKind::LinearRegression | GeneratorKind::SparseLinear => Task::Regression,
            GeneratorKind::LogisticClassification | GeneratorKind::GaussianMixture => {
                Task::Classification
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    pub p: usize,
    pub n_primary: usize,
    pub n_aux: usize,
    /// Number of auxiliary datasets.
    pub m: usize,
    pub n_adversarial: usize,
    pub xi: f64,
    pub n_test: usize,
    pub seed: u64,
}

impl GeneratorSpec {
    /// Design defaults for each kind: 5,000 test rows throughout.
    pub fn defaults(kind: GeneratorKind) -> Self {
        let (p, n_primary, n_aux, m) = match kind {
            GeneratorKind::LinearRegression | GeneratorKind::LogisticClassification => {
                (10, 50, 50, 10)
            }
            GeneratorKind::GaussianMixture => (10, 50, 50, 10),
            GeneratorKind::SparseLinear => (200, 150, 100, 5),
        };
        GeneratorSpec {
            kind,
            p,
            n_primary,
            n_aux,
            m,
            n_adversarial: 0,
            xi: 0.5,
            n_test: 5000,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.p == 0 || self.n_primary < 2 || self.n_test == 0 {
            return Err(ArtError::config(
                "generator needs p >= 1, n_primary >= 2 and n_test >= 1",
            ));
        }
        if (self.m > 0 || self.n_adversarial > 0) && self.n_aux == 0 {
            return Err(ArtError::config("auxiliary sets need n_aux >= 1"));
        }
        if !self.xi.is_finite() {
            return Err(ArtError::config("xi must be finite"));
        }
        if self.kind == GeneratorKind::SparseLinear {
            if self.p < SPARSE_ACTIVE + SPARSE_EXTRA {
                return Err(ArtError::config(format!(
                    "sparse design needs p >= {}, got {}",
                    SPARSE_ACTIVE + SPARSE_EXTRA,
                    self.p
                )));
            }
            if self.n_adversarial > 0 {
                return Err(ArtError::config(
                    "the sparse design has no adversarial construction",
                ));
            }
        }
        Ok(())
    }
}

/// Output of [`generate`].
#[derive(Debug, Clone)]
pub struct Generated {
    pub primary: Dataset,
    pub auxiliaries: Vec<Dataset>,
    pub adversarials: Vec<Dataset>,
    pub test: Dataset,
    /// Indices of truly active features (sparse design only).
    pub truth: Option<Vec<usize>>,
    /// Primary coefficients (linear kinds) or the positive-class centre (mixture).
    pub primary_coef: Vec<f64>,
    pub aux_coefs: Vec<Vec<f64>>,
    pub adversarial_coefs: Vec<Vec<f64>>,
}

/// `Σ_ij = 0.5^{|i - j|}`.
pub fn ar1_covariance(p: usize, rho: f64) -> DMatrix<f64> {
    DMatrix::from_fn(p, p, |i, j| rho.powi((i as i32 - j as i32).abs()))
}

/// Draws rows of N(0, Σ) through the lower Cholesky factor of Σ.
pub struct CorrelatedNormal {
    factor: DMatrix<f64>,
}

impl CorrelatedNormal {
    pub fn new(cov: DMatrix<f64>) -> Result<Self> {
        let chol = cov
            .cholesky()
            .ok_or_else(|| ArtError::Numerical("covariance is not positive definite".into()))?;
        Ok(CorrelatedNormal { factor: chol.l() })
    }

    pub fn identity(p: usize) -> Self {
        CorrelatedNormal {
            factor: DMatrix::identity(p, p),
        }
    }

    pub fn dim(&self) -> usize {
        self.factor.nrows()
    }

    pub fn sample_rows<R: Rng>(&self, n: usize, rng: &mut R) -> DMatrix<f64> {
        let p = self.dim();
        let z = DMatrix::from_fn(p, n, |_, _| rng.sample::<f64, _>(StandardNormal));
        (&self.factor * z).transpose()
    }
}

fn stream(spec: &GeneratorSpec, component: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(spec.seed, &[component, index]))
}

const BETA: u64 = 0;
const PRIMARY: u64 = 1;
const TEST: u64 = 2;
const AUX: u64 = 3;
const ADV: u64 = 4;
const AUX_SUPPORT: u64 = 5;

fn linear_response<R: Rng>(
    x: &DMatrix<f64>,
    beta: &[f64],
    task: Task,
    rng: &mut R,
) -> DVector<f64> {
    let b = DVector::from_column_slice(beta);
    let eta = x * b;
    match task {
        Task::Regression => eta.map(|e| e + rng.sample::<f64, _>(StandardNormal)),
        Task::Classification => eta.map(|e| {
            if rng.random::<f64>() < sigmoid(e) {
                1.0
            } else {
                0.0
            }
        }),
    }
}

fn linear_dataset(
    spec: &GeneratorSpec,
    sampler: &CorrelatedNormal,
    beta: &[f64],
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Dataset> {
    let task = spec.kind.task();
    let x = sampler.sample_rows(n, rng);
    let y = linear_response(&x, beta, task, rng);
    Dataset::new(x, y, task)
}

/// Class-balanced draw from the two mixtures: row `i` has label `i mod 2`.
fn mixture_dataset(
    sampler: &CorrelatedNormal,
    centres_pos: &[DVector<f64>],
    centres_neg: &[DVector<f64>],
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Dataset> {
    let mut x = sampler.sample_rows(n, rng);
    let mut y = DVector::zeros(n);
    for i in 0..n {
        let positive = i % 2 == 1;
        let c = rng.random_range(0..MIXTURE_COMPONENTS);
        let centre = if positive {
            &centres_pos[c]
        } else {
            &centres_neg[c]
        };
        for j in 0..x.ncols() {
            x[(i, j)] += centre[j];
        }
        y[i] = f64::from(u8::from(positive));
    }
    Dataset::new(x, y, Task::Classification)
}

fn mixture_centres(
    p: usize,
    mu: f64,
    rng: &mut ChaCha8Rng,
) -> (Vec<DVector<f64>>, Vec<DVector<f64>>) {
    let lead = MIXTURE_LEADING.min(p);
    let base = DVector::from_fn(p, |j, _| if j < lead { mu } else { 0.0 });
    let mut draw = |sign: f64| -> Vec<DVector<f64>> {
        (0..MIXTURE_COMPONENTS)
            .map(|_| {
                DVector::from_fn(p, |j, _| {
                    sign * base[j] + rng.sample::<f64, _>(StandardNormal)
                })
            })
            .collect()
    };
    let pos = draw(1.0);
    let neg = draw(-1.0);
    (pos, neg)
}

pub fn generate(spec: &GeneratorSpec) -> Result<Generated> {
    spec.validate()?;
    let p = spec.p;
    let xi = spec.xi;
    match spec.kind {
        GeneratorKind::LinearRegression | GeneratorKind::LogisticClassification => {
            let sampler = CorrelatedNormal::new(ar1_covariance(p, 0.5))?;
            let mut rng = stream(spec, BETA, 0);
            let beta: Vec<f64> = (0..p)
                .map(|_| 1.0 + rng.sample::<f64, _>(StandardNormal))
                .collect();
            let aux_beta: Vec<f64> = beta.iter().map(|b| b + xi).collect();
            let adv_beta: Vec<f64> = beta.iter().map(|b| -b - xi).collect();
            let primary = linear_dataset(
                spec,
                &sampler,
                &beta,
                spec.n_primary,
                &mut stream(spec, PRIMARY, 0),
            )?;
            let test = linear_dataset(
                spec,
                &sampler,
                &beta,
                spec.n_test,
                &mut stream(spec, TEST, 0),
            )?;
            let auxiliaries = (0..spec.m)
                .map(|m| {
                    linear_dataset(
                        spec,
                        &sampler,
                        &aux_beta,
                        spec.n_aux,
                        &mut stream(spec, AUX, m as u64),
                    )
                })
                .collect::<Result<_>>()?;
            // Adversarial sets match the primary size.
            let adversarials = (0..spec.n_adversarial)
                .map(|m| {
                    linear_dataset(
                        spec,
                        &sampler,
                        &adv_beta,
                        spec.n_primary,
                        &mut stream(spec, ADV, m as u64),
                    )
                })
                .collect::<Result<_>>()?;
            Ok(Generated {
                primary,
                auxiliaries,
                adversarials,
                test,
                truth: None,
                primary_coef: beta,
                aux_coefs: vec![aux_beta; spec.m],
                adversarial_coefs: vec![adv_beta; spec.n_adversarial],
            })
        }
        GeneratorKind::GaussianMixture => {
            let sampler = CorrelatedNormal::new(ar1_covariance(p, 0.5))?;
            let mu = 1.0;
            let (pos, neg) = mixture_centres(p, mu, &mut stream(spec, BETA, 0));
            let primary = mixture_dataset(
                &sampler,
                &pos,
                &neg,
                spec.n_primary,
                &mut stream(spec, PRIMARY, 0),
            )?;
            let test = mixture_dataset(
                &sampler,
                &pos,
                &neg,
                spec.n_test,
                &mut stream(spec, TEST, 0),
            )?;
            let lead = MIXTURE_LEADING.min(p);
            let centre = |level: f64| {
                (0..p)
                    .map(|j| if j < lead { level } else { 0.0 })
                    .collect::<Vec<f64>>()
            };
            let mut auxiliaries = Vec::with_capacity(spec.m);
            for m in 0..spec.m {
                let mut rng = stream(spec, AUX, m as u64);
                let (ap, an) = mixture_centres(p, mu + xi, &mut rng);
                auxiliaries.push(mixture_dataset(&sampler, &ap, &an, spec.n_aux, &mut rng)?);
            }
            let mut adversarials = Vec::with_capacity(spec.n_adversarial);
            for m in 0..spec.n_adversarial {
                let mut rng = stream(spec, ADV, m as u64);
                let (ap, an) = mixture_centres(p, -mu - xi, &mut rng);
                adversarials.push(mixture_dataset(
                    &sampler,
                    &ap,
                    &an,
                    spec.n_primary,
                    &mut rng,
                )?);
            }
            Ok(Generated {
                primary,
                auxiliaries,
                adversarials,
                test,
                truth: None,
                primary_coef: centre(mu),
                aux_coefs: vec![centre(mu + xi); spec.m],
                adversarial_coefs: vec![centre(-mu - xi); spec.n_adversarial],
            })
        }
        GeneratorKind::SparseLinear => {
            let sampler = CorrelatedNormal::identity(p);
            let beta: Vec<f64> = (0..p)
                .map(|j| if j < SPARSE_ACTIVE { 0.3 } else { 0.0 })
                .collect();
            let primary = linear_dataset(
                spec,
                &sampler,
                &beta,
                spec.n_primary,
                &mut stream(spec, PRIMARY, 0),
            )?;
            let test = linear_dataset(
                spec,
                &sampler,
                &beta,
                spec.n_test,
                &mut stream(spec, TEST, 0),
            )?;
            let mut auxiliaries = Vec::with_capacity(spec.m);
            let mut aux_coefs = Vec::with_capacity(spec.m);
            for m in 0..spec.m {
                let support = sparse_support(p, &mut stream(spec, AUX_SUPPORT, m as u64));
                let mut b = beta.clone();
                for j in support {
                    b[j] += 2.0 * xi;
                }
                auxiliaries.push(linear_dataset(
                    spec,
                    &sampler,
                    &b,
                    spec.n_aux,
                    &mut stream(spec, AUX, m as u64),
                )?);
                aux_coefs.push(b);
            }
            Ok(Generated {
                primary,
                auxiliaries,
                adversarials: Vec::new(),
                test,
                truth: Some((0..SPARSE_ACTIVE).collect()),
                primary_coef: beta,
                aux_coefs,
                adversarial_coefs: Vec::new(),
            })
        }
    }
}

/// The first 16 coordinates plus 12 distinct others chosen uniformly.
fn sparse_support(p: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut support: Vec<usize> = (0..SPARSE_ACTIVE).collect();
    support.extend(
        sample(rng, p - SPARSE_ACTIVE, SPARSE_EXTRA)
            .into_iter()
            .map(|j| j + SPARSE_ACTIVE),
    );
    support
}
