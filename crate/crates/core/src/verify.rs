//! Identity suite: exact algebraic facts about `G_l` and `p_l`, plus the
//! structural checks every computed resonance set must pass.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::exact::GRational;
use crate::hankel::{g_taylor_coefficients, wronskian_residual_exact};
use crate::params::Params;
use crate::resonance::{deformation_resonances, mirror_distance, SolverConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub l: u32,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn push(&mut self, name: &str, l: u32, passed: bool, detail: String) {
        self.checks.push(Check { name: name.into(), l, passed, detail });
    }
}

/// `i (2^l l!/(2l)!)²`, the first nonzero odd Taylor coefficient of `G_l`.
pub fn first_odd_coefficient(l: u32) -> GRational {
    let fact = |n: u32| (1..=n).fold(BigInt::one(), |acc, k| acc * k);
    let num = (BigInt::one() << l as usize) * fact(l);
    let den = fact(2 * l);
    GRational::new(BigInt::from(0), &num * &num, &den * &den)
}

/// Odd coefficients below order `2l+1` vanish, the one at `2l+1` equals
/// [`first_odd_coefficient`], and every even coefficient is real.
pub fn check_taylor_structure(l: u32) -> (bool, String) {
    let order = 2 * l as usize + 2;
    let c = g_taylor_coefficients(l, order);
    for k in 0..l as usize {
        if !c[2 * k + 1].is_zero() {
            return (false, format!("order {} coefficient is {}", 2 * k + 1, c[2 * k + 1]));
        }
    }
    let target = first_odd_coefficient(l);
    if c[2 * l as usize + 1] != target {
        return (false, format!("order {} coefficient {} ≠ {target}", 2 * l + 1, c[2 * l as usize + 1]));
    }
    if let Some(k) = (0..=order).step_by(2).find(|&k| !c[k].is_real()) {
        return (false, format!("even order {k} coefficient {} not real", c[k]));
    }
    (true, format!("orders 0..={order} exact"))
}

/// Gaussian rationals with numerators in `±10⁶` and denominators in `1..=10⁶`.
pub fn random_points(seed: u64, count: usize) -> Vec<GRational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let re: i64 = rng.gen_range(-1_000_000..=1_000_000);
            let im: i64 = rng.gen_range(-1_000_000..=1_000_000);
            let den: i64 = rng.gen_range(1..=1_000_000);
            GRational::new(BigInt::from(re), BigInt::from(im), BigInt::from(den))
        })
        .collect()
}

pub fn check_wronskian(l: u32, points: &[GRational]) -> (bool, String) {
    match points.iter().find(|z| !wronskian_residual_exact(l, z).is_zero()) {
        Some(z) => (false, format!("R_l({z}) ≠ 0")),
        None => (true, format!("exactly zero at {} points", points.len())),
    }
}

/// Exact checks for `l = 1..=l_max`, then sum-of-residues and mirror
/// symmetry of the deformation sets `l ∈ {0, 2..=l_max}` at `params`.
pub fn run_identity_suite(params: &Params, l_max: u32, points_per_l: usize, seed: u64, cfg: &SolverConfig) -> Result<VerifyReport> {
    let mut report = VerifyReport::default();
    for l in 1..=l_max {
        let (ok, detail) = check_taylor_structure(l);
        report.push("taylor-structure", l, ok, detail);
        let (ok, detail) = check_wronskian(l, &random_points(seed.wrapping_add(l as u64), points_per_l));
        report.push("wronskian", l, ok, detail);
    }
    for l in std::iter::once(0).chain(2..=l_max) {
        let set = deformation_resonances(params, l, cfg)?;
        let sum: Complex64 = set.residues(params, cfg)?.iter().map(|w| w.weight).sum();
        let err = (sum - 1.0).norm();
        report.push("sum-of-residues", l, err <= 1e-9, format!("|Σ w − 1| = {err:.3e}"));
        let worst = set
            .values
            .iter()
            .map(|v| mirror_distance(&set.values, *v) / v.norm())
            .fold(0.0, f64::max);
        report.push("symmetry", l, worst <= cfg.symmetry_tol, format!("worst relative mirror gap {worst:.3e}"));
    }
    Ok(report)
}
