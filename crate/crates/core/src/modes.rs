//! Time evolution of surface modes `β_l^m` and the radiated potential
//! `Ψ_l^m` as finite sums over resonances.
//!
//! Per unit initial amplitude, `β_l(t) = Σ_j w_j e^{−iλ_j t}` with `w_j` the
//! residue weights of the deformation resonances. The potential is driven by
//! `β_l'` through the rigid (Neumann) resonances `ω_k`; the time convolution
//! is done in closed form, so `Ψ` vanishes identically outside the cone
//! `r ≥ 1 + t/ε`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cpoly::CPoly;
use crate::error::{Error, Result};
use crate::hankel::pl_coefficients;
use crate::params::{check_mode, Params};
use crate::resonance::{deformation_resonances, rigid_resonances, ResonanceSet, ResidueData, SolverConfig};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Orthonormal spherical harmonic with the Condon–Shortley phase.
pub fn ylm(l: u32, m: i32, theta: f64, phi: f64) -> Result<Complex64> {
    let ma = m.unsigned_abs();
    if ma > l {
        return Err(Error::InvalidParameter(format!("|m| = {ma} exceeds l = {l}")));
    }
    let p = normalized_legendre(l, ma, theta.cos(), theta.sin().abs());
    let y = Complex64::from_polar(p, ma as f64 * phi);
    Ok(if m < 0 {
        let sign = if ma % 2 == 0 { 1.0 } else { -1.0 };
        y.conj() * sign
    } else {
        y
    })
}

/// `P̄_l^m(x)` normalised so that `P̄_l^m(cos θ) e^{imφ}` is orthonormal on
/// the sphere; `s = sin θ ≥ 0`.
fn normalized_legendre(l: u32, m: u32, x: f64, s: f64) -> f64 {
    // P̄_m^m = (−1)^m √((2m+1)/4π · Π_{k≤m} (2k−1)/2k) s^m
    let mut pmm = (1.0 / (4.0 * std::f64::consts::PI)).sqrt();
    for k in 1..=m {
        let k = k as f64;
        pmm *= -((2.0 * k + 1.0) / (2.0 * k)).sqrt() * s;
    }
    if l == m {
        return pmm;
    }
    let mut prev = pmm;
    let mut cur = x * (2.0 * m as f64 + 3.0).sqrt() * pmm;
    let mf = m as f64;
    for n in m + 2..=l {
        let nf = n as f64;
        let a = ((4.0 * nf * nf - 1.0) / (nf * nf - mf * mf)).sqrt();
        let b = (((nf - 1.0).powi(2) - mf * mf) / (4.0 * (nf - 1.0).powi(2) - 1.0)).sqrt();
        let next = a * (x * cur - b * prev);
        prev = cur;
        cur = next;
    }
    cur
}

/// One spherical-harmonic component of the initial surface shape.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeEntry {
    pub l: u32,
    pub m: i32,
    pub beta0: Complex64,
}

/// Initial data with the translation mode `l = 1` removed.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ModeSet {
    pub entries: Vec<ModeEntry>,
    /// `Σ (1+l)^{13/6} |β_l^m(0)|`.
    pub norm: f64,
    pub warnings: Vec<String>,
}

impl ModeSet {
    /// Distinct orders present.
    pub fn orders(&self) -> Vec<u32> {
        let mut ls: Vec<u32> = self.entries.iter().map(|e| e.l).collect();
        ls.sort_unstable();
        ls.dedup();
        ls
    }
}

/// Builds a [`ModeSet`]; `l = 1` entries are dropped with a warning.
pub fn project_initial_shape(coeffs: &[(u32, i32, Complex64)]) -> Result<ModeSet> {
    let mut set = ModeSet::default();
    for &(l, m, beta0) in coeffs {
        if !(beta0.re.is_finite() && beta0.im.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite coefficient for (l, m) = ({l}, {m})")));
        }
        if m.unsigned_abs() > l {
            return Err(Error::InvalidParameter(format!("|m| = {} exceeds l = {l}", m.unsigned_abs())));
        }
        if l == 1 {
            set.warnings.push(format!("dropped translation mode (1, {m}) with coefficient {beta0}"));
            continue;
        }
        set.norm += (1.0 + l as f64).powf(2.0 + 1.0 / 6.0) * beta0.norm();
        set.entries.push(ModeEntry { l, m, beta0 });
    }
    Ok(set)
}

/// Resonance data of one order, ready for repeated evaluation.
#[derive(Debug, Clone)]
pub struct ModeData {
    pub l: u32,
    pub epsilon: f64,
    pub rl_hat: f64,
    pub deformation: ResonanceSet,
    pub residues: Vec<ResidueData>,
    pub rigid: ResonanceSet,
    /// `p_l`, for the radial profile of each rigid mode.
    pl: CPoly,
    /// Per rigid mode: `−i z_k / (ε (l(l+1) − z_k²) p_l(z_k))`, `z_k = εω_k`.
    rigid_coeffs: Vec<Complex64>,
}

impl ModeData {
    pub fn new(params: &Params, l: u32, cfg: &SolverConfig) -> Result<Self> {
        check_mode(l)?;
        let eps = params.epsilon();
        let deformation = deformation_resonances(params, l, cfg)?;
        let residues = deformation.residues(params, cfg)?;
        let rigid = rigid_resonances(params, l, cfg)?;
        let pl = pl_coefficients(l).to_cpoly();
        let ll = l as f64 * (l as f64 + 1.0);
        // At a zero of h_l' the radial ODE gives h_l'' = (l(l+1)/z² − 1) h_l,
        // which turns the Laplace-inversion residue into this coefficient.
        let rigid_coeffs = rigid
            .values
            .iter()
            .map(|&w| {
                let z = w * eps;
                -I * z / ((ll - z * z) * pl.eval(z) * eps)
            })
            .collect();
        Ok(ModeData { l, epsilon: eps, rl_hat: params.rl_hat(l)?, deformation, residues, rigid, pl, rigid_coeffs })
    }

    fn terms(&self) -> impl Iterator<Item = (Complex64, Complex64)> + '_ {
        self.deformation.values.iter().zip(&self.residues).map(|(&l, r)| (l, r.weight))
    }

    /// `β_l(t)` per unit initial amplitude.
    pub fn beta(&self, t: f64) -> Complex64 {
        self.terms().map(|(lam, w)| w * (-I * lam * t).exp()).sum()
    }

    /// `β_l'(t)` per unit initial amplitude.
    pub fn beta_dot(&self, t: f64) -> Complex64 {
        self.terms().map(|(lam, w)| -I * lam * w * (-I * lam * t).exp()).sum()
    }

    /// `Ψ_l(r, t)` per unit initial amplitude; identically zero for
    /// `t ≤ ε(r − 1)`.
    pub fn psi(&self, r: f64, t: f64) -> Result<Complex64> {
        if !(r >= 1.0) || !(t >= 0.0) {
            return Err(Error::InvalidParameter(format!("need r ≥ 1 and t ≥ 0, got r = {r}, t = {t}")));
        }
        Ok(self.psi_unchecked(r, t))
    }

    /// Same formula without the domain check, for difference stencils that
    /// straddle the surface.
    pub(crate) fn psi_unchecked(&self, r: f64, t: f64) -> Complex64 {
        let tau = t - self.epsilon * (r - 1.0);
        if tau <= 0.0 {
            return Complex64::default();
        }
        let mut total = Complex64::default();
        for (&w, &c) in self.rigid.values.iter().zip(&self.rigid_coeffs) {
            let z = w * self.epsilon;
            let radial = self.pl.eval(z * r) / r.powi(self.l as i32 + 1);
            let mut conv = Complex64::default();
            for (lam, wt) in self.terms() {
                conv += -I * lam * wt * convolution(w, lam, tau);
            }
            total += c * radial * conv;
        }
        total
    }
}

/// `∫₀^τ e^{−iω(τ−s)} e^{−iλs} ds`, with the removable singularity at
/// `ω = λ` handled by its limit `τ e^{−iωτ}`.
fn convolution(omega: Complex64, lambda: Complex64, tau: f64) -> Complex64 {
    let d = omega - lambda;
    if d.norm() <= 1e-12 * omega.norm().max(lambda.norm()) {
        return tau * (-I * omega * tau).exp();
    }
    ((-I * lambda * tau).exp() - (-I * omega * tau).exp()) / (I * d)
}

/// `β_l^m(t)` for initial amplitude `beta0`.
pub fn beta_mode_evolution(params: &Params, l: u32, beta0: Complex64, t: f64, cfg: &SolverConfig) -> Result<Complex64> {
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!("t must be ≥ 0, got {t}")));
    }
    Ok(beta0 * ModeData::new(params, l, cfg)?.beta(t))
}

/// `Ψ_l^m(r, t)` for initial amplitude `beta0`.
pub fn psi_mode_evolution(
    params: &Params,
    l: u32,
    beta0: Complex64,
    r: f64,
    t: f64,
    cfg: &SolverConfig,
) -> Result<Complex64> {
    Ok(beta0 * ModeData::new(params, l, cfg)?.psi(r, t)?)
}

/// One field point. `beta` is the surface displacement at the sample's
/// angles and time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
    pub t: f64,
    pub psi: Complex64,
    pub beta: Complex64,
}

/// A mode set bound to resonance data for each of its orders.
#[derive(Debug, Clone)]
pub struct Evolution {
    pub set: ModeSet,
    pub modes: BTreeMap<u32, ModeData>,
}

impl Evolution {
    pub fn new(params: &Params, set: &ModeSet, cfg: &SolverConfig) -> Result<Self> {
        let orders = set.orders();
        let modes = crate::parallel::install(|| {
            orders
                .par_iter()
                .map(|&l| ModeData::new(params, l, cfg).map(|d| (l, d)))
                .collect::<Result<BTreeMap<_, _>>>()
        })?;
        Ok(Evolution { set: set.clone(), modes })
    }

    pub fn sample(&self, r: f64, theta: f64, phi: f64, t: f64) -> Result<FieldSample> {
        if !(r >= 1.0) || !(t >= 0.0) {
            return Err(Error::InvalidParameter(format!("need r ≥ 1 and t ≥ 0, got r = {r}, t = {t}")));
        }
        let mut psi = Complex64::default();
        let mut beta = Complex64::default();
        for e in &self.set.entries {
            let d = &self.modes[&e.l];
            let y = ylm(e.l, e.m, theta, phi)? * e.beta0;
            psi += d.psi_unchecked(r, t) * y;
            beta += d.beta(t) * y;
        }
        Ok(FieldSample { r, theta, phi, t, psi, beta })
    }

    /// Coefficients `β_l^m(t)`.
    pub fn coefficients_at(&self, t: f64) -> ModeSet {
        let coeffs: Vec<_> = self
            .set
            .entries
            .iter()
            .map(|e| (e.l, e.m, e.beta0 * self.modes[&e.l].beta(t)))
            .collect();
        project_initial_shape(&coeffs).expect("finite evolved coefficients")
    }
}

/// Superposes all modes at each `(r, θ, φ, t)`; parallel over samples.
pub fn assemble_field(
    params: &Params,
    set: &ModeSet,
    grid: &[(f64, f64, f64, f64)],
    cfg: &SolverConfig,
) -> Result<Vec<FieldSample>> {
    let evo = Evolution::new(params, set, cfg)?;
    crate::parallel::install(|| grid.par_iter().map(|&(r, th, ph, t)| evo.sample(r, th, ph, t)).collect())
}

/// `Σ r̂_l |β_l^m|²`, the positive-definite surface part of the energy.
pub fn surface_energy(params: &Params, set: &ModeSet) -> Result<f64> {
    set.entries
        .iter()
        .map(|e| Ok(params.rl_hat(e.l)? * e.beta0.norm_sqr()))
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeReport {
    /// `min_j |Im λ_j|` of this order.
    pub gap: f64,
    /// `(1+l)^{13/6} |β0|`.
    pub norm: f64,
    /// `|β0| Σ_j |w_j| / norm`, which bounds `|β(t)| e^{gap t} / norm` for
    /// every `t ≥ 0`.
    pub c_bound: f64,
    /// `max_t |β(t)| e^{gap t} / norm` over the grid.
    pub c_min: f64,
    /// `c_min` on the grid with midpoints inserted.
    pub c_min_refined: f64,
    /// Every grid point satisfies `|β(t)| ≤ c_bound · norm · e^{−gap t}`.
    pub holds: bool,
}

impl EnvelopeReport {
    pub fn passes(&self) -> bool {
        self.holds && self.c_min.is_finite() && (self.c_min_refined - self.c_min).abs() <= 0.05 * self.c_min
    }
}

pub fn decay_envelope_check(
    params: &Params,
    l: u32,
    beta0: Complex64,
    t_grid: &[f64],
    cfg: &SolverConfig,
) -> Result<EnvelopeReport> {
    if t_grid.is_empty() || t_grid.iter().any(|&t| !(t >= 0.0)) || t_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter("time grid must be nonempty, nonnegative and increasing".into()));
    }
    if beta0 == Complex64::default() {
        return Err(Error::InvalidParameter("zero initial amplitude has no envelope".into()));
    }
    let d = ModeData::new(params, l, cfg)?;
    let gap = d.deformation.values.iter().map(|v| v.im.abs()).fold(f64::INFINITY, f64::min);
    let norm = (1.0 + l as f64).powf(2.0 + 1.0 / 6.0) * beta0.norm();
    let c_bound = beta0.norm() * d.residues.iter().map(|r| r.weight.norm()).sum::<f64>() / norm;
    let scaled = |t: f64| (beta0 * d.beta(t)).norm() * (gap * t).exp() / norm;
    let c_min = t_grid.iter().map(|&t| scaled(t)).fold(0.0, f64::max);
    let mids = t_grid.windows(2).map(|w| scaled(0.5 * (w[0] + w[1]))).fold(0.0, f64::max);
    let holds = t_grid.iter().all(|&t| scaled(t) <= c_bound * (1.0 + 1e-12));
    Ok(EnvelopeReport { gap, norm, c_bound, c_min, c_min_refined: c_min.max(mids), holds })
}

/// `|∂_tΨ_l(1, t) − r̂_l β_l(t)|` for amplitude `beta0`, with a centred
/// difference of step `h` in time.
pub fn bernoulli_residual(params: &Params, l: u32, beta0: Complex64, t: f64, h: f64, cfg: &SolverConfig) -> Result<f64> {
    if !(t > h && h > 0.0) {
        return Err(Error::InvalidParameter(format!("need 0 < h < t, got h = {h}, t = {t}")));
    }
    let d = ModeData::new(params, l, cfg)?;
    Ok(bernoulli_residual_with(&d, beta0, t, h))
}

pub fn bernoulli_residual_with(d: &ModeData, beta0: Complex64, t: f64, h: f64) -> f64 {
    let dpsi = (d.psi_unchecked(1.0, t + h) - d.psi_unchecked(1.0, t - h)) / (2.0 * h);
    (beta0 * (dpsi - d.rl_hat * d.beta(t))).norm()
}

/// `|∂_rΨ_l(1, t) − β_l'(t)|` for amplitude `beta0`, with a centred
/// difference of step `h` in radius.
pub fn kinematic_residual_with(d: &ModeData, beta0: Complex64, t: f64, h: f64) -> f64 {
    let dpsi = (d.psi_unchecked(1.0 + h, t) - d.psi_unchecked(1.0 - h, t)) / (2.0 * h);
    (beta0 * (dpsi - d.beta_dot(t))).norm()
}

/// `|ε²Ψ_tt − Ψ_rr − 2Ψ_r/r + l(l+1)Ψ/r²|` by centred differences.
pub fn wave_residual_with(d: &ModeData, r: f64, t: f64, h: f64) -> f64 {
    let p = |r: f64, t: f64| d.psi_unchecked(r, t);
    let c = p(r, t);
    let ptt = (p(r, t + h) - 2.0 * c + p(r, t - h)) / (h * h);
    let prr = (p(r + h, t) - 2.0 * c + p(r - h, t)) / (h * h);
    let pr = (p(r + h, t) - p(r - h, t)) / (2.0 * h);
    let ll = d.l as f64 * (d.l as f64 + 1.0);
    (ptt * d.epsilon.powi(2) - prr - pr * (2.0 / r) + c * (ll / (r * r))).norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(eps: f64) -> Params {
        Params::new(eps, 1.0, 2.0, 1.4).unwrap()
    }

    fn cfg() -> SolverConfig {
        SolverConfig::default()
    }

    /// Gauss–Legendre nodes and weights on [−1, 1] by Newton on `P_n`.
    fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
        (0..n)
            .map(|i| {
                let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
                let mut dp = 0.0;
                for _ in 0..100 {
                    let (mut p0, mut p1) = (1.0, x);
                    for k in 2..=n {
                        let k = k as f64;
                        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                        p0 = p1;
                        p1 = p2;
                    }
                    dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                    let dx = p1 / dp;
                    x -= dx;
                    if dx.abs() < 1e-16 {
                        break;
                    }
                }
                (x, 2.0 / ((1.0 - x * x) * dp * dp))
            })
            .collect()
    }

    fn inner(l1: u32, m1: i32, l2: u32, m2: i32) -> Complex64 {
        let nodes = gauss_legendre(50);
        let nphi = 100;
        let mut s = Complex64::default();
        for &(x, w) in &nodes {
            let th = x.acos();
            for k in 0..nphi {
                let ph = 2.0 * std::f64::consts::PI * k as f64 / nphi as f64;
                s += ylm(l1, m1, th, ph).unwrap().conj() * ylm(l2, m2, th, ph).unwrap() * w;
            }
        }
        s * (2.0 * std::f64::consts::PI / nphi as f64)
    }

    #[test]
    fn harmonic_examples() {
        let y00 = ylm(0, 0, 0.7, 1.3).unwrap();
        assert!((y00.re - 0.5 / std::f64::consts::PI.sqrt()).abs() < 1e-15 && y00.im == 0.0);
        assert!((ylm(1, 0, 0.0, 2.0).unwrap().re - 0.5 * (3.0 / std::f64::consts::PI).sqrt()).abs() < 1e-15);
        // Y_1^1 = −(1/2)√(3/2π) sin θ e^{iφ}
        let y11 = ylm(1, 1, 0.4, 0.9).unwrap();
        let e = Complex64::from_polar(-0.5 * (1.5 / std::f64::consts::PI).sqrt() * 0.4f64.sin(), 0.9);
        assert!((y11 - e).norm() < 1e-15);
        assert!(ylm(2, 3, 0.1, 0.1).is_err());
        assert!((inner(2, 1, 2, 1) - 1.0).norm() < 1e-10);
        assert!(inner(2, 1, 3, 1).norm() < 1e-10);
        assert!(inner(4, -2, 4, 2).norm() < 1e-10);
        assert!((inner(5, -3, 5, -3) - 1.0).norm() < 1e-10);
    }

    #[test]
    fn projection_examples() {
        let s = project_initial_shape(&[(2, 0, Complex64::new(1.0, 0.0))]).unwrap();
        assert_eq!(s.entries.len(), 1);
        assert!((s.norm - 3f64.powf(13.0 / 6.0)).abs() < 1e-12);
        let s = project_initial_shape(&[(1, 0, Complex64::new(0.5, 0.0))]).unwrap();
        assert!(s.entries.is_empty() && s.warnings.len() == 1);
        let s = project_initial_shape(&[]).unwrap();
        assert!(s.entries.is_empty() && s.norm == 0.0);
        assert!(project_initial_shape(&[(2, 0, Complex64::new(f64::NAN, 0.0))]).is_err());
    }

    #[test]
    fn beta_starts_at_initial_value_and_matches_closed_form() {
        let params = p(0.1);
        let b0 = Complex64::new(0.3, -0.2);
        for l in [0, 2, 5] {
            let v = beta_mode_evolution(&params, l, b0, 0.0, &cfg()).unwrap();
            assert!((v - b0).norm() < 1e-12 * b0.norm());
        }
        let r = params.rl_hat(0).unwrap();
        let disc = (Complex64::new(4.0 * r - 0.01 * r * r, 0.0)).sqrt();
        let lp = (disc - I * 0.1 * r) / 2.0;
        let lm = (-disc - I * 0.1 * r) / 2.0;
        for t in [0.5, 3.0, 11.0] {
            let closed = b0 * (lp * (-I * lp * t).exp() - lm * (-I * lm * t).exp()) / (lp - lm);
            let v = beta_mode_evolution(&params, 0, b0, t, &cfg()).unwrap();
            assert!((v - closed).norm() < 1e-10, "t={t}");
        }
    }

    #[test]
    fn causality_is_exact() {
        let params = p(0.1);
        let b0 = Complex64::new(1.0, 0.0);
        for t in [0.05, 0.3, 2.0] {
            let r = 1.0 + 2.0 * t / 0.1;
            assert_eq!(psi_mode_evolution(&params, 2, b0, r, t, &cfg()).unwrap(), Complex64::default());
            let r = 1.0 + t / 0.1;
            assert_eq!(psi_mode_evolution(&params, 2, b0, r, t, &cfg()).unwrap(), Complex64::default());
        }
        assert_eq!(psi_mode_evolution(&params, 2, b0, 1.0, 0.0, &cfg()).unwrap(), Complex64::default());
        assert!(psi_mode_evolution(&params, 2, b0, 0.9, 1.0, &cfg()).is_err());
    }

    #[test]
    fn boundary_conditions_hold() {
        let b0 = Complex64::new(1.0, 0.5);
        // Difference error grows like h²|λ|³ with arc frequencies |λ| ~ l/ε.
        for (eps, l, h) in [(0.1, 0, 1e-3), (0.1, 2, 1e-3), (0.5, 3, 1e-3), (0.3, 6, 2e-4)] {
            let d = ModeData::new(&p(eps), l, &cfg()).unwrap();
            for t in [0.4, 1.0, 2.5] {
                let k1 = kinematic_residual_with(&d, b0, t, h);
                let k2 = kinematic_residual_with(&d, b0, t, h / 2.0);
                assert!(k1 < 1e-4, "kinematic l={l} ε={eps} t={t}: {k1}");
                assert!(k2 < 0.3 * k1 || k1 < 1e-9, "kinematic order l={l}: {k1} {k2}");
                let b1 = bernoulli_residual_with(&d, b0, t, h);
                let b2 = bernoulli_residual_with(&d, b0, t, h / 2.0);
                assert!(b1 < 1e-4, "bernoulli l={l} ε={eps} t={t}: {b1}");
                assert!(b2 < 0.3 * b1 || b1 < 1e-9, "bernoulli order l={l}: {b1} {b2}");
            }
        }
    }

    #[test]
    fn wave_equation_interior() {
        for (eps, l) in [(0.1, 2), (0.5, 0), (0.4, 4)] {
            let d = ModeData::new(&p(eps), l, &cfg()).unwrap();
            let t = 2.0;
            let front = 1.0 + t / eps;
            for r in [1.2, 1.0 + 0.5 * (front - 1.0)] {
                let h = 1e-3;
                assert!(r + 5.0 * h < front);
                let a = wave_residual_with(&d, r, t, h);
                let b = wave_residual_with(&d, r, t, h / 2.0);
                let scale = d.psi_unchecked(r, t).norm().max(1e-3);
                assert!(a < 1e-3 * scale.max(1.0), "l={l} r={r}: {a}");
                assert!(b < 0.35 * a || a < 1e-8, "order l={l} r={r}: {a} {b}");
            }
        }
    }

    #[test]
    fn assembled_field() {
        let params = p(0.1);
        let empty = project_initial_shape(&[]).unwrap();
        let s = assemble_field(&params, &empty, &[(1.0, 0.3, 0.2, 1.0)], &cfg()).unwrap();
        assert_eq!(s[0].psi, Complex64::default());
        assert_eq!(s[0].beta, Complex64::default());

        let b0 = Complex64::new(0.7, 0.1);
        let one = project_initial_shape(&[(2, 0, b0)]).unwrap();
        let s = assemble_field(&params, &one, &[(1.0, 0.6, 0.0, 0.0)], &cfg()).unwrap();
        assert!((s[0].beta - ylm(2, 0, 0.6, 0.0).unwrap() * b0).norm() < 1e-12);

        let a = project_initial_shape(&[(0, 0, Complex64::new(0.2, 0.0))]).unwrap();
        let both = project_initial_shape(&[(0, 0, Complex64::new(0.2, 0.0)), (2, 0, b0)]).unwrap();
        let grid = [(1.0, 0.6, 0.0, 0.7), (1.5, 1.1, 0.4, 2.0), (3.0, 2.0, 1.0, 0.5)];
        let fa = assemble_field(&params, &a, &grid, &cfg()).unwrap();
        let fb = assemble_field(&params, &one, &grid, &cfg()).unwrap();
        let fs = assemble_field(&params, &both, &grid, &cfg()).unwrap();
        for k in 0..grid.len() {
            assert!((fs[k].psi - fa[k].psi - fb[k].psi).norm() < 1e-14 * fs[k].psi.norm().max(1.0));
            assert!((fs[k].beta - fa[k].beta - fb[k].beta).norm() < 1e-14);
        }
        assert!(assemble_field(&params, &one, &[(0.5, 0.0, 0.0, 1.0)], &cfg()).is_err());
    }

    #[test]
    fn energy_examples() {
        let params = p(0.1);
        let one = |l| project_initial_shape(&[(l, 0, Complex64::new(1.0, 0.0))]).unwrap();
        assert!((surface_energy(&params, &one(2)).unwrap() - 4.0).abs() < 1e-14);
        assert!((surface_energy(&params, &one(0)).unwrap() - 10.6).abs() < 1e-12);
        assert_eq!(surface_energy(&params, &ModeSet::default()).unwrap(), 0.0);
    }

    #[test]
    fn envelope() {
        let grid: Vec<f64> = (0..=400).map(|k| k as f64 * 0.05).collect();
        let b0 = Complex64::new(1.0, 0.0);
        let r = decay_envelope_check(&p(0.1), 0, b0, &grid, &cfg()).unwrap();
        assert!(r.passes(), "{r:?}");
        assert!(r.c_min * r.norm >= 1.0 - 1e-12);
        let r = decay_envelope_check(&p(0.05), 2, b0, &grid, &cfg()).unwrap();
        assert!(r.passes(), "{r:?}");
        let d = deformation_resonances(&p(0.05), 2, &cfg()).unwrap();
        let gap = d.values.iter().map(|v| v.im.abs()).fold(f64::INFINITY, f64::min);
        assert_eq!(r.gap, gap);
    }
}
