//! Rigid (Neumann) and deformation resonances, their residue weights, and
//! the asymptotic formulas that seed and cross-check them.
//!
//! Deformation resonances are the `l + 2` zeros of
//! `D(λ) = p_l(ελ) · f(λ)`, `f(λ) = λ² + r̂_l G_l(ελ)`. Up to
//! [`SolverConfig::method_boundary`] they come from Aberth iteration on the
//! coefficients of `D`. Beyond it the coefficients are useless in double
//! precision, so the roots are seeded from the large-`l` asymptotics and
//! refined simultaneously using the exact logarithmic derivative `D'/D`.
//! Either way every root is finally Newton-polished on `f` with exact `G_l`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::airy::airy_prime_zero;
use crate::cpoly::{aberth_refine, polish_root, AberthOutcome, CPoly, Step};
use crate::error::{Error, Result};
use crate::hankel::{pl_coefficients, spherical_hankel, GEvaluator};
use crate::params::{check_mode, Params};
use crate::scan::mode_lifetime_m;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Numerical knobs of the resonance solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Largest `l` solved from polynomial coefficients.
    pub method_boundary: u32,
    /// Relative step tolerance of root finding and Newton polish.
    pub polish_tol: f64,
    /// Relative tolerance of the `λ ↦ −conj(λ)` pairing check.
    pub symmetry_tol: f64,
    /// Relative tolerance between the two residue formulas.
    pub residue_tol: f64,
    pub max_iter: usize,
    /// Large-`l` regime starts at `l ≥ axis_k2 · We / ε²`.
    pub axis_k2: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            method_boundary: 30,
            polish_tol: 1e-12,
            symmetry_tol: 1e-9,
            residue_tol: 1e-6,
            max_iter: 200,
            axis_k2: 5.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResonanceKind {
    Rigid,
    Deformation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Polynomial,
    NewtonAsymptotic,
    ClosedForm,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Polynomial => "polynomial",
            Method::NewtonAsymptotic => "newton-asymptotic",
            Method::ClosedForm => "closed-form",
        }
    }
}

/// Where the starting point of a root came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeedOrigin {
    Polynomial,
    /// Arc resonance `s`, fourth quadrant.
    Arc(u32),
    /// Mirror image `−conj` of arc resonance `s`.
    ArcMirror(u32),
    /// Arc resonance `s` projected onto the negative imaginary axis.
    AxisArc(u32),
    /// Large-`l` axis resonance.
    Axis,
    RayleighPlus,
    RayleighMinus,
    /// Imaginary-axis guess for the unpaired root of odd `l`.
    AxisGuess,
}

impl SeedOrigin {
    pub fn label(&self) -> String {
        match self {
            SeedOrigin::Polynomial => "polynomial".into(),
            SeedOrigin::Arc(s) => format!("arc-{s}"),
            SeedOrigin::ArcMirror(s) => format!("arc-mirror-{s}"),
            SeedOrigin::AxisArc(s) => format!("axis-arc-{s}"),
            SeedOrigin::Axis => "axis".into(),
            SeedOrigin::RayleighPlus => "rayleigh+".into(),
            SeedOrigin::RayleighMinus => "rayleigh-".into(),
            SeedOrigin::AxisGuess => "axis-guess".into(),
        }
    }
}

/// Resonances of one kind for one `(l, ε)`.
///
/// Rigid values are frequencies `ω` (zeros of `h_l'(εω)`); deformation values
/// are energies `λ` (zeros of `λ² + r̂_l G_l(ελ)`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonanceSet {
    pub kind: ResonanceKind,
    pub l: u32,
    pub epsilon: f64,
    pub values: Vec<Complex64>,
    /// Rigid: `|h_l'(εω)|`. Deformation: `|f(λ)| / (|λ|² + r̂_l|G_l(ελ)|)`.
    pub residuals: Vec<f64>,
    pub method: Method,
    pub origins: Vec<SeedOrigin>,
    /// Roots whose polish failed or whose residue formulas disagree.
    pub suspect: Vec<bool>,
}

/// `λ_j · Res_{λ_j} [λ² + r̂_l G_l(ελ)]^{-1}`, the weight of `e^{−iλ_j t}` in
/// the mode evolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidueData {
    pub l: u32,
    pub resonance: Complex64,
    /// Primary formula.
    pub weight: Complex64,
    /// Cross-check `1/∂_λ(λ + εr̂ h'(ελ)/h(ελ))`.
    pub alt_weight: Complex64,
    pub suspect: bool,
}

fn require_positive_epsilon(params: &Params) -> Result<f64> {
    let eps = params.epsilon();
    if eps > 0.0 {
        Ok(eps)
    } else {
        Err(Error::InvalidParameter(
            "resonances need epsilon > 0; epsilon = 0 is the incompressible limit".into(),
        ))
    }
}

/// `l p_l(z) − p_{l+1}(z)`, whose zeros are `εω` for rigid resonances `ω`.
pub fn rigid_polynomial(l: u32) -> CPoly {
    let a = pl_coefficients(l).to_cpoly();
    let b = pl_coefficients(l + 1).to_cpoly();
    let coeffs = (0..=l as usize + 1)
        .map(|n| {
            let an = a.coeffs().get(n).copied().unwrap_or_default();
            an * l as f64 - b.coeffs()[n]
        })
        .collect();
    CPoly::new(coeffs)
}

/// `D(λ) = λ² p_l(ελ) + r̂_l[−(l+1)p_l(ελ) + iελ p_l(ελ) + ελ p_l'(ελ)]`,
/// degree `l + 2`, not normalized.
pub fn deformation_polynomial(params: &Params, l: u32) -> Result<CPoly> {
    check_mode(l)?;
    let eps = require_positive_epsilon(params)?;
    let r = params.rl_hat(l)?;
    let a = pl_coefficients(l).to_cpoly();
    let a = |n: isize| -> Complex64 {
        if n < 0 {
            Complex64::default()
        } else {
            a.coeffs().get(n as usize).copied().unwrap_or_default()
        }
    };
    let coeffs = (0..=l as isize + 2)
        .map(|k| {
            let lead = a(k - 2) * eps.powi(k as i32 - 2);
            let tail = (a(k) * (k - l as isize - 1) as f64 + I * a(k - 1)) * (r * eps.powi(k as i32));
            lead + tail
        })
        .collect();
    Ok(CPoly::new(coeffs))
}

/// Exact-`G` evaluation of `f(λ) = λ² + r̂ G_l(ελ)` and its derivative.
struct DeformationFunction {
    ev: GEvaluator,
    r: f64,
    eps: f64,
}

struct FValue {
    f: Complex64,
    df: Complex64,
    g: Complex64,
    /// `ε p_l'(ελ)/p_l(ελ)`.
    dlogp: Complex64,
}

impl DeformationFunction {
    fn new(params: &Params, l: u32) -> Result<Self> {
        Ok(DeformationFunction {
            ev: GEvaluator::new(l),
            r: params.rl_hat(l)?,
            eps: require_positive_epsilon(params)?,
        })
    }

    fn eval(&self, lambda: Complex64) -> Result<FValue> {
        let z = lambda * self.eps;
        let gv = self.ev.eval(z)?;
        let f = lambda * lambda + gv.g * self.r;
        let df = 2.0 * lambda + self.ev.derivative_from(z, gv.g) * (self.r * self.eps);
        let dlogp = if z == Complex64::default() {
            self.ev.dlogp_at_origin() * self.eps
        } else {
            gv.z_dlogp / lambda
        };
        Ok(FValue { f, df, g: gv.g, dlogp })
    }

    fn relative_residual(&self, lambda: Complex64) -> Result<f64> {
        let v = self.eval(lambda)?;
        Ok(v.f.norm() / (lambda.norm_sqr() + self.r * v.g.norm()))
    }

    /// Newton to `tol`, then two more steps so that an exponentially small
    /// imaginary part is resolved relative to itself.
    fn polish(&self, lambda0: Complex64, tol: f64, max_iter: usize) -> Result<Complex64> {
        let mut lambda = lambda0;
        let mut extra = None;
        for _ in 0..max_iter {
            let v = self.eval(lambda)?;
            if v.f == Complex64::default() {
                return Ok(lambda);
            }
            if !(v.df.norm() >= f64::MIN_POSITIVE) {
                return Err(Error::DegenerateRoot(format!("f'(λ) vanishes near {lambda}")));
            }
            let step = v.f / v.df;
            lambda -= step;
            if !(lambda.re.is_finite() && lambda.im.is_finite()) {
                return Err(Error::NoConvergence(format!("Newton diverged from {lambda0}")));
            }
            match extra {
                Some(0) => return Ok(lambda),
                Some(k) => extra = Some(k - 1),
                None if step.norm() <= tol * lambda.norm() => extra = Some(1),
                None => {}
            }
        }
        if extra.is_some() {
            return Ok(lambda);
        }
        Err(Error::NoConvergence(format!("Newton from {lambda0} did not settle")))
    }
}

/// Rigid resonances `ω_{l,k}`, `k = 1..l+1`.
pub fn rigid_resonances(params: &Params, l: u32, cfg: &SolverConfig) -> Result<ResonanceSet> {
    let eps = require_positive_epsilon(params)?;
    let poly = rigid_polynomial(l);
    let report = poly.find_roots(cfg.polish_tol, cfg.max_iter)?;
    let ev = GEvaluator::new(l);
    let g_and_dg = |z: Complex64| -> Result<(Complex64, Complex64)> {
        let g = ev.eval(z)?.g;
        Ok((g, ev.derivative_from(z, g)))
    };
    let (zs, method) = if l <= cfg.method_boundary && report.converged {
        (report.roots, Method::Polynomial)
    } else {
        // Zeros of R = p_l G_l; R'/R = p_l'/p_l + G_l'/G_l.
        let out = aberth_refine(
            |z| {
                let gv = ev.eval(z)?;
                if gv.g == Complex64::default() {
                    return Ok(Step::Root);
                }
                let dlogp = if z == Complex64::default() { ev.dlogp_at_origin() } else { gv.z_dlogp / z };
                Ok(Step::Ratio(dlogp + ev.derivative_from(z, gv.g) / gv.g))
            },
            report.roots,
            cfg.polish_tol,
            cfg.max_iter,
        )?;
        (out.roots, Method::NewtonAsymptotic)
    };
    let mut values = Vec::with_capacity(zs.len());
    let mut residuals = Vec::with_capacity(zs.len());
    let mut suspect = Vec::with_capacity(zs.len());
    for z0 in zs {
        let polished = polish_root(
            |z| g_and_dg(z).map(|v| v.0).unwrap_or(Complex64::new(f64::NAN, f64::NAN)),
            |z| g_and_dg(z).map(|v| v.1).unwrap_or(Complex64::new(f64::NAN, f64::NAN)),
            z0,
            cfg.polish_tol,
            cfg.max_iter,
        );
        let (z, bad) = match polished {
            Ok(z) => (z, false),
            Err(_) => (z0, true),
        };
        let g = ev.eval(z).map(|v| v.g.norm()).unwrap_or(f64::INFINITY);
        let h = spherical_hankel(l, z).map(|h| h.norm()).unwrap_or(f64::INFINITY);
        residuals.push(h * g / z.norm());
        values.push(z / eps);
        suspect.push(bad);
    }
    let set = ResonanceSet {
        kind: ResonanceKind::Rigid,
        l,
        epsilon: eps,
        origins: vec![SeedOrigin::Polynomial; values.len()],
        values,
        residuals,
        method,
        suspect,
    };
    validate_set(&set, l as usize + 1, cfg)?;
    Ok(set)
}

/// Deformation resonances `λ_{l,j}`, `j = 1..l+2`.
pub fn deformation_resonances(params: &Params, l: u32, cfg: &SolverConfig) -> Result<ResonanceSet> {
    check_mode(l)?;
    let eps = require_positive_epsilon(params)?;
    let func = DeformationFunction::new(params, l)?;
    let (mut roots, origins, method) = if l <= cfg.method_boundary {
        let report = deformation_polynomial(params, l)?.find_roots(cfg.polish_tol, cfg.max_iter)?;
        let n = report.roots.len();
        (report.roots, vec![SeedOrigin::Polynomial; n], Method::Polynomial)
    } else {
        let seeded = large_l_seeds(params, l, cfg)?;
        let (seeds, origins): (Vec<_>, Vec<_>) = seeded.into_iter().unzip();
        let out = refine_deformation(&func, seeds, cfg)?;
        (out.roots, origins, Method::NewtonAsymptotic)
    };

    let mut suspect = vec![false; roots.len()];
    let mut polished = roots.clone();
    for (k, &z) in roots.iter().enumerate() {
        match func.polish(z, cfg.polish_tol, cfg.max_iter) {
            Ok(p) => polished[k] = p,
            Err(_) => suspect[k] = true,
        }
    }
    if has_collision(&polished) {
        // Independent Newton let two roots fall into one basin; redo them
        // together so they repel.
        let out = refine_deformation(&func, roots.clone(), cfg)?;
        roots = out.roots;
        for (k, &z) in roots.iter().enumerate() {
            match func.polish(z, cfg.polish_tol, cfg.max_iter) {
                Ok(p) => {
                    polished[k] = p;
                    suspect[k] = false;
                }
                Err(_) => {
                    polished[k] = z;
                    suspect[k] = true;
                }
            }
        }
    }
    let residuals = polished
        .iter()
        .map(|&z| func.relative_residual(z).unwrap_or(f64::INFINITY))
        .collect();
    let set = ResonanceSet {
        kind: ResonanceKind::Deformation,
        l,
        epsilon: eps,
        values: polished,
        residuals,
        method,
        origins,
        suspect,
    };
    validate_set(&set, l as usize + 2, cfg)?;
    Ok(set)
}

fn refine_deformation(func: &DeformationFunction, seeds: Vec<Complex64>, cfg: &SolverConfig) -> Result<AberthOutcome> {
    let out = aberth_refine(
        |lambda| {
            let v = func.eval(lambda)?;
            if v.f == Complex64::default() {
                return Ok(Step::Root);
            }
            // D = p(ελ) f(λ)  ⇒  D'/D = f'/f + ε p'(ελ)/p(ελ)
            Ok(Step::Ratio(v.df / v.f + v.dlogp))
        },
        seeds,
        cfg.polish_tol,
        cfg.max_iter,
    )?;
    if !out.converged {
        return Err(Error::NoConvergence(format!(
            "simultaneous refinement for l = {} stalled after {} iterations",
            func.ev.l(),
            out.iterations
        )));
    }
    Ok(out)
}

fn has_collision(values: &[Complex64]) -> bool {
    for i in 0..values.len() {
        for j in 0..i {
            if (values[i] - values[j]).norm() <= 1e-8 * values[i].norm().max(1e-300) {
                return true;
            }
        }
    }
    false
}

/// Count, strict lower half-plane and mirror symmetry.
pub fn validate_set(set: &ResonanceSet, expected: usize, cfg: &SolverConfig) -> Result<()> {
    let what = match set.kind {
        ResonanceKind::Rigid => "rigid",
        ResonanceKind::Deformation => "deformation",
    };
    if set.values.len() != expected {
        return Err(Error::Invariant(format!(
            "{what} l={} ε={}: {} values, expected {expected}",
            set.l,
            set.epsilon,
            set.values.len()
        )));
    }
    if let Some(v) = set.values.iter().find(|v| !(v.im < 0.0)) {
        return Err(Error::Invariant(format!(
            "{what} l={} ε={}: value {v} not in the open lower half-plane",
            set.l, set.epsilon
        )));
    }
    if let Some(v) = set.values.iter().find(|v| mirror_distance(&set.values, **v) > cfg.symmetry_tol * v.norm()) {
        return Err(Error::Invariant(format!(
            "{what} l={} ε={}: no mirror partner for {v}",
            set.l, set.epsilon
        )));
    }
    if has_collision(&set.values) {
        return Err(Error::Invariant(format!(
            "{what} l={} ε={}: coincident values",
            set.l, set.epsilon
        )));
    }
    Ok(())
}

/// Distance from `−conj(v)` to the nearest member of `values`.
pub fn mirror_distance(values: &[Complex64], v: Complex64) -> f64 {
    let m = -v.conj();
    values.iter().map(|w| (w - m).norm()).fold(f64::INFINITY, f64::min)
}

/// Starting points for the large-`l` solver, one per root.
pub fn large_l_seeds(params: &Params, l: u32, cfg: &SolverConfig) -> Result<Vec<(Complex64, SeedOrigin)>> {
    check_mode(l)?;
    let eps = require_positive_epsilon(params)?;
    if l < 2 {
        return Err(Error::InvalidParameter(format!("large-l seeds need l ≥ 2, got {l}")));
    }
    let we = params.weber();
    let mut seeds = Vec::with_capacity(l as usize + 2);
    let push_pair = |seeds: &mut Vec<_>, s: u32| -> Result<()> {
        let a = arc_resonance_asymptotic(params, l, s)?;
        seeds.push((a, SeedOrigin::Arc(s)));
        seeds.push((-a.conj(), SeedOrigin::ArcMirror(s)));
        Ok(())
    };
    if l as f64 >= cfg.axis_k2 * we / (eps * eps) {
        for s in 1..=(l + 1) / 2 {
            push_pair(&mut seeds, s)?;
        }
        if l % 2 == 0 {
            let s = l / 2 + 1;
            let a = arc_resonance_asymptotic(params, l, s)?;
            seeds.push((Complex64::new(0.0, a.im), SeedOrigin::AxisArc(s)));
        }
        let axis = axis_resonance_asymptotic(params, l, cfg.axis_k2)?;
        seeds.push((axis.value, SeedOrigin::Axis));
    } else {
        let pairs = if l % 2 == 0 { l / 2 } else { (l - 1) / 2 };
        for s in 1..=pairs {
            push_pair(&mut seeds, s)?;
        }
        let (plus, _) = rayleigh_pair_smalleps(params, l)?;
        // Only the real part matters for the start; keep it clear of the axis.
        let im = -(plus.im.abs().min(0.1 * plus.re.abs())).max(1e-3);
        seeds.push((Complex64::new(plus.re, im), SeedOrigin::RayleighPlus));
        seeds.push((Complex64::new(-plus.re, im), SeedOrigin::RayleighMinus));
        if l % 2 == 1 {
            let nu = l as f64 + 0.5;
            seeds.push((Complex64::new(0.0, -nu / eps), SeedOrigin::AxisGuess));
        }
    }
    Ok(seeds)
}

/// Rayleigh pair for small `ε`.
///
/// `l = 0`: `±√(r̂₀ − r̂₀²ε²/4) − i r̂₀ε/2`, exact for the quadratic. `l ≥ 2`:
/// real part `±√((l+2)(l−1)(l+1)/We) [1 − (l+2)(l−1)/(2(2l−1)) ε²/We]`,
/// imaginary part `−M(l, ε)`. Returns `(λ⁺, λ⁻)` with `λ⁻ = −conj(λ⁺)`.
pub fn rayleigh_pair_smalleps(params: &Params, l: u32) -> Result<(Complex64, Complex64)> {
    check_mode(l)?;
    let eps = params.epsilon();
    let r = params.rl_hat(l)?;
    let plus = if l == 0 {
        Complex64::new(r - r * r * eps * eps / 4.0, 0.0).sqrt() - I * (r * eps / 2.0)
    } else {
        let lf = l as f64;
        let pq = (lf + 2.0) * (lf - 1.0);
        let re = (pq * (lf + 1.0) / params.weber()).sqrt()
            * (1.0 - pq / (2.0 * (2.0 * lf - 1.0)) * eps * eps / params.weber());
        Complex64::new(re, -mode_lifetime_m(params, l)?)
    };
    Ok((plus, -plus.conj()))
}

/// `λ_l(0) = √(r̂_l (l+1))`, the undamped oscillation frequency at `ε = 0`.
pub fn incompressible_frequency(params: &Params, l: u32) -> Result<f64> {
    Ok((params.rl_hat(l)? * (l as f64 + 1.0)).sqrt())
}

/// Three-term large-`l` approximation of arc resonance `s`:
/// `(ν/ε)[1 + 2^{-1/3}e^{-2πi/3} ν^{-2/3}|η_s'| + (3/10) 2^{-2/3} e^{-4πi/3} ν^{-4/3}|η_s'|²]`,
/// `ν = l + 1/2`.
pub fn arc_resonance_asymptotic(params: &Params, l: u32, s: u32) -> Result<Complex64> {
    let eps = require_positive_epsilon(params)?;
    if l < 2 {
        return Err(Error::InvalidParameter(format!("arc asymptotics need l ≥ 2, got {l}")));
    }
    let s_max = (l + 1) / 2 + 1;
    if s == 0 || s > s_max {
        return Err(Error::InvalidParameter(format!("arc index s = {s} outside 1..={s_max}")));
    }
    let nu = l as f64 + 0.5;
    let eta = airy_prime_zero(s).value.abs();
    let pi = std::f64::consts::PI;
    let t1 = Complex64::from_polar(2f64.powf(-1.0 / 3.0), -2.0 * pi / 3.0) * (nu.powf(-2.0 / 3.0) * eta);
    let t2 = Complex64::from_polar(0.3 * 2f64.powf(-2.0 / 3.0), -4.0 * pi / 3.0) * (nu.powf(-4.0 / 3.0) * eta * eta);
    Ok((1.0 + t1 + t2) * (nu / eps))
}

/// Axis resonance estimate with its regime flag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisEstimate {
    pub value: Complex64,
    /// `l ≥ K₂ We/ε²`; outside it the formula is only indicative.
    pub in_regime: bool,
}

/// `−i(ν/ε)[ε²ν/We + We/(2ε²ν)]`, `ν = l + 1/2`.
pub fn axis_resonance_asymptotic(params: &Params, l: u32, k2: f64) -> Result<AxisEstimate> {
    check_mode(l)?;
    let eps = require_positive_epsilon(params)?;
    let we = params.weber();
    let nu = l as f64 + 0.5;
    let e2 = eps * eps;
    let value = Complex64::new(0.0, -(nu / eps) * (e2 * nu / we + we / (2.0 * e2 * nu)));
    Ok(AxisEstimate { value, in_regime: l as f64 >= k2 * we / e2 })
}

/// Residue weight of one deformation resonance, computed two ways.
///
/// Primary: `λ p_l(ελ)/D'(λ)` from the coefficients of `D` when
/// `l ≤ method_boundary`, otherwise `λ/f'(λ)` with exact `G_l'`. Cross-check:
/// `1/[1 + ε²r̂(−1 + l(l+1)/z² − 2u/z − u²)]`, `z = ελ`, `u = h_l'(z)/h_l(z)`.
pub fn residue_weight(params: &Params, l: u32, lambda: Complex64, cfg: &SolverConfig) -> Result<ResidueData> {
    check_mode(l)?;
    let eps = require_positive_epsilon(params)?;
    let r = params.rl_hat(l)?;
    let z = lambda * eps;
    let ev = GEvaluator::new(l);
    let g = ev.eval(z)?.g;
    let weight = if l <= cfg.method_boundary {
        let d = deformation_polynomial(params, l)?.derivative();
        let dd = d.eval(lambda);
        if dd.norm() <= 64.0 * f64::EPSILON * d.abs_eval(lambda.norm()) {
            return Err(Error::DegenerateRoot(format!("D'(λ) vanishes at {lambda}")));
        }
        lambda * pl_coefficients(l).to_cpoly().eval(z) / dd
    } else {
        let df = 2.0 * lambda + ev.derivative_from(z, g) * (r * eps);
        if df.norm() <= 64.0 * f64::EPSILON * lambda.norm() {
            return Err(Error::DegenerateRoot(format!("f'(λ) vanishes at {lambda}")));
        }
        lambda / df
    };
    let u = g / z;
    let ll = l as f64 * (l as f64 + 1.0);
    let alt_weight = (1.0 + (-1.0 + ll / (z * z) - 2.0 * u / z - u * u) * (eps * eps * r)).inv();
    let suspect = (weight - alt_weight).norm() > cfg.residue_tol * weight.norm();
    Ok(ResidueData { l, resonance: lambda, weight, alt_weight, suspect })
}

impl ResonanceSet {
    /// Residue weights of a deformation set, in value order.
    pub fn residues(&self, params: &Params, cfg: &SolverConfig) -> Result<Vec<ResidueData>> {
        if self.kind != ResonanceKind::Deformation {
            return Err(Error::InvalidParameter("residue weights exist for deformation sets only".into()));
        }
        let p = params.with_epsilon(self.epsilon)?;
        self.values.iter().map(|&v| residue_weight(&p, self.l, v, cfg)).collect()
    }

    /// Value with the smallest `|Im|`, reported with nonnegative real part.
    pub fn least_damped(&self) -> Complex64 {
        let v = *self
            .values
            .iter()
            .min_by(|a, b| a.im.abs().total_cmp(&b.im.abs()))
            .expect("non-empty set");
        if v.re >= 0.0 {
            return v;
        }
        let m = -v.conj();
        *self
            .values
            .iter()
            .min_by(|a, b| (*a - m).norm().total_cmp(&(*b - m).norm()))
            .expect("non-empty set")
    }
}

/// Least-damped deformation resonance over `l ∈ {0, 2, …, l_max}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralGap {
    pub l_star: u32,
    pub lambda_star: Complex64,
    pub gap: f64,
}

pub fn spectral_gap(params: &Params, l_max: u32, cfg: &SolverConfig) -> Result<SpectralGap> {
    use rayon::prelude::*;
    if l_max < 2 {
        return Err(Error::InvalidParameter(format!("l_max must be at least 2, got {l_max}")));
    }
    let ls: Vec<u32> = std::iter::once(0).chain(2..=l_max).collect();
    let per_l: Vec<(u32, Complex64)> = crate::parallel::install(|| {
        ls.par_iter()
            .map(|&l| deformation_resonances(params, l, cfg).map(|s| (l, s.least_damped())))
            .collect::<Result<_>>()
    })?;
    let (l_star, lambda_star) = per_l
        .into_iter()
        .min_by(|a, b| a.1.im.abs().total_cmp(&b.1.im.abs()))
        .expect("at least two orders");
    Ok(SpectralGap { l_star, lambda_star, gap: lambda_star.im.abs() })
}
