//! Nondimensional parameters and the per-mode stiffness `r̂_l`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Mach number `ε`, Weber number `We`, cavitation number `Ca` and polytropic
/// exponent `γ`. Validated on construction and immutable afterwards.
///
/// `ε = 0` is legal and selects the incompressible limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    epsilon: f64,
    weber: f64,
    cavitation: f64,
    gamma: f64,
}

impl Params {
    pub fn new(epsilon: f64, weber: f64, cavitation: f64, gamma: f64) -> Result<Self> {
        for (name, v) in [
            ("epsilon", epsilon),
            ("weber", weber),
            ("cavitation", cavitation),
            ("gamma", gamma),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be finite, got {v}")));
            }
        }
        if epsilon < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be non-negative, got {epsilon}"
            )));
        }
        if weber <= 0.0 {
            return Err(Error::InvalidParameter(format!("weber must be positive, got {weber}")));
        }
        if cavitation < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "cavitation must be non-negative, got {cavitation}"
            )));
        }
        if gamma <= 1.0 {
            return Err(Error::InvalidParameter(format!("gamma must exceed 1, got {gamma}")));
        }
        Ok(Params { epsilon, weber, cavitation, gamma })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
    pub fn weber(&self) -> f64 {
        self.weber
    }
    pub fn cavitation(&self) -> f64 {
        self.cavitation
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Same physical parameters at a different Mach number.
    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        Params::new(epsilon, self.weber, self.cavitation, self.gamma)
    }

    /// Stiffness `r̂_l`. Positive for every admissible `l`.
    ///
    /// `l = 0`: `(3γ/2)Ca + 2(3γ−1)/We`. `l ≥ 2`: `(l+2)(l−1)/We`.
    pub fn rl_hat(&self, l: u32) -> Result<f64> {
        match l {
            0 => Ok(1.5 * self.gamma * self.cavitation
                + 2.0 * (3.0 * self.gamma - 1.0) / self.weber),
            1 => Err(Error::ExcludedMode),
            _ => {
                let l = l as f64;
                Ok((l + 2.0) * (l - 1.0) / self.weber)
            }
        }
    }
}

/// Rejects `l = 1`, the only order without deformation dynamics.
pub fn check_mode(l: u32) -> Result<()> {
    if l == 1 {
        Err(Error::ExcludedMode)
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn construction() {
        assert!(Params::new(0.1, 1.0, 2.0, 1.4).is_ok());
        assert!(Params::new(0.0, 1.0, 2.0, 1.4).is_ok());
        let e = Params::new(0.1, 0.0, 2.0, 1.4).unwrap_err();
        assert!(e.to_string().contains("weber must be positive"));
        assert!(Params::new(-0.1, 1.0, 2.0, 1.4).is_err());
        assert!(Params::new(0.1, 1.0, 2.0, 1.0).is_err());
        assert!(Params::new(f64::NAN, 1.0, 2.0, 1.4).is_err());
        assert!(Params::new(0.1, f64::INFINITY, 2.0, 1.4).is_err());
    }

    #[test]
    fn stiffness_values() {
        let p = Params::new(0.1, 1.0, 2.0, 1.4).unwrap();
        assert!((p.rl_hat(0).unwrap() - 10.6).abs() < 1e-12);
        assert_eq!(p.rl_hat(2).unwrap(), 4.0);
        assert!(matches!(p.rl_hat(1), Err(Error::ExcludedMode)));
        let q = Params::new(0.1, 2.0, 2.0, 1.4).unwrap();
        assert_eq!(q.rl_hat(3).unwrap(), 5.0);
    }

    proptest! {
        #[test]
        fn stiffness_positive_and_increasing(
            we in 1e-3f64..1e3, ca in 0.0f64..1e3, gamma in 1.0001f64..5.0, l in 2u32..500
        ) {
            let p = Params::new(0.1, we, ca, gamma).unwrap();
            prop_assert!(p.rl_hat(0).unwrap() > 0.0);
            let a = p.rl_hat(l).unwrap();
            let b = p.rl_hat(l + 1).unwrap();
            prop_assert!(a > 0.0 && b > a);
        }
    }
}
