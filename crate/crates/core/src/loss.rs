use serde::{Deserialize, Serialize};

use crate::error::{ArtError, Result};

/// Probability clipping applied by every classifier and by cross-entropy.
pub const DEFAULT_CLIP: f64 = 1e-6;

/// Loss used to score candidates on the held-out primary rows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Loss {
    /// `(y - pred)^2`
    Squared,
    /// `|tau - 1{y - pred < 0}| * (y - pred)^2`
    AsymmetricSquared { tau: f64 },
    /// Binary log loss with predictions clipped to `[clip, 1 - clip]`.
    CrossEntropy { clip: f64 },
}

impl Loss {
    pub fn cross_entropy() -> Self {
        Loss::CrossEntropy { clip: DEFAULT_CLIP }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Loss::Squared => Ok(()),
            Loss::AsymmetricSquared { tau } if tau > 0.0 && tau < 1.0 => Ok(()),
            Loss::AsymmetricSquared { tau } => Err(ArtError::config(format!(
                "asymmetric loss needs tau in (0, 1), got {tau}"
            ))),
            Loss::CrossEntropy { clip } if clip > 0.0 && clip < 0.5 => Ok(()),
            Loss::CrossEntropy { clip } => Err(ArtError::config(format!(
                "cross-entropy clip must lie in (0, 0.5), got {clip}"
            ))),
        }
    }

    pub fn evaluate(&self, y: f64, pred: f64) -> Result<f64> {
        if !y.is_finite() || !pred.is_finite() {
            return Err(ArtError::invalid(format!(
                "loss evaluated at non-finite input (y = {y}, pred = {pred})"
            )));
        }
        match *self {
            Loss::Squared => Ok((y - pred).powi(2)),
            Loss::AsymmetricSquared { tau } => {
                let r = y - pred;
                let factor = if r < 0.0 { (tau - 1.0).abs() } else { tau };
                Ok(factor * r * r)
            }
            Loss::CrossEntropy { clip } => {
                if y != 0.0 && y != 1.0 {
                    return Err(ArtError::invalid(format!(
                        "cross-entropy needs a 0/1 label, got {y}"
                    )));
                }
                let g = pred.clamp(clip, 1.0 - clip);
                Ok(-y * g.ln() - (1.0 - y) * (1.0 - g).ln())
            }
        }
    }
}

/// Clamps a probability into `[clip, 1 - clip]`.
pub fn clip_probability(p: f64, clip: f64) -> f64 {
    p.clamp(clip, 1.0 - clip)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn worked_values() {
        assert_eq!(Loss::Squared.evaluate(2.0, 3.0).unwrap(), 1.0);
        let ce = Loss::cross_entropy();
        assert_abs_diff_eq!(ce.evaluate(1.0, 0.5).unwrap(), 2f64.ln(), epsilon = 1e-15);
        let asym = Loss::AsymmetricSquared { tau: 0.3 };
        // y - pred = -1 < 0, so the weight is |0.3 - 1| = 0.7
        assert_abs_diff_eq!(asym.evaluate(1.0, 2.0).unwrap(), 0.7, epsilon = 1e-15);
        assert_abs_diff_eq!(asym.evaluate(2.0, 1.0).unwrap(), 0.3, epsilon = 1e-15);
        // pred = 1 is clipped to 1 - 1e-6
        let direct = -(1.0f64 - (1.0 - 1e-6)).ln();
        assert_abs_diff_eq!(ce.evaluate(0.0, 1.0).unwrap(), direct, epsilon = 1e-9);
        assert_abs_diff_eq!(ce.evaluate(0.0, 1.0).unwrap(), 13.8155, epsilon = 1e-4);
    }

    #[test]
    fn rejects_non_finite_and_bad_labels() {
        assert!(Loss::Squared.evaluate(f64::NAN, 1.0).is_err());
        assert!(Loss::Squared.evaluate(1.0, f64::INFINITY).is_err());
        assert!(Loss::cross_entropy().evaluate(0.5, 0.5).is_err());
        assert!(Loss::AsymmetricSquared { tau: 1.0 }.validate().is_err());
        assert!(Loss::CrossEntropy { clip: 0.5 }.validate().is_err());
    }

    proptest! {
        #[test]
        fn losses_are_nonnegative(y in -1e3f64..1e3, pred in -1e3f64..1e3, tau in 0.01f64..0.99) {
            prop_assert!(Loss::Squared.evaluate(y, pred).unwrap() >= 0.0);
            let asym = Loss::AsymmetricSquared { tau };
            prop_assert!(asym.evaluate(y, pred).unwrap() >= 0.0);
        }

        #[test]
        fn half_asymmetric_is_half_squared(y in -1e3f64..1e3, pred in -1e3f64..1e3) {
            let a = Loss::AsymmetricSquared { tau: 0.5 }.evaluate(y, pred).unwrap();
            let s = Loss::Squared.evaluate(y, pred).unwrap();
            prop_assert!((a - 0.5 * s).abs() <= 1e-12 * s.max(1.0));
        }

        #[test]
        fn zero_iff_exact(y in -1e3f64..1e3, d in -10f64..10.0) {
            let asym = Loss::AsymmetricSquared { tau: 0.3 };
            prop_assert_eq!(Loss::Squared.evaluate(y, y).unwrap(), 0.0);
            prop_assert_eq!(asym.evaluate(y, y).unwrap(), 0.0);
            if d != 0.0 {
                prop_assert!(Loss::Squared.evaluate(y, y + d).unwrap() > 0.0);
                prop_assert!(asym.evaluate(y, y + d).unwrap() > 0.0);
            }
        }

        #[test]
        fn cross_entropy_minimized_at_clipped_label(label in 0u8..2, pred in 0f64..1.0) {
            let y = f64::from(label);
            let ce = Loss::cross_entropy();
            let best = ce.evaluate(y, clip_probability(y, DEFAULT_CLIP)).unwrap();
            let v = ce.evaluate(y, pred).unwrap();
            prop_assert!(v.is_finite() && v >= 0.0);
            prop_assert!(best <= v + 1e-15);
        }
    }
}
