//! Spherical Hankel functions of the first kind through their polynomial
//! representation `h_l(z) = z^{-l-1} p_l(z) e^{iz}`, the logarithmic-derivative
//! ratio `G_l(z) = z h_l'(z)/h_l(z)`, and exact series identities for `G_l`.
//!
//! The coefficients of `p_l` are Gaussian integers
//! `a_n = i^{-n-1} (2l-n)! / (2^{l-n} (l-n)! n!)`. They grow like `(2l)!/(2^l l!)`
//! and alternate in phase, so rounding them to doubles loses everything once
//! `l` is a few dozen and `z` sits in the lower half-plane. [`GEvaluator`]
//! therefore evaluates `G_l` exactly at the dyadic value of a double argument
//! and rounds only the final ratio.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::cpoly::CPoly;
use crate::error::{Error, Result};
use crate::exact::{decode, GRational, GaussInt};

/// Exact coefficients of `p_l`, ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct PlPoly {
    pub l: u32,
    pub coeffs: Vec<GRational>,
}

/// `|a_n|` for `n = 0..=l`; the phase of `a_n` is `i^{-n-1}`.
fn coefficient_magnitudes(l: u32) -> Vec<BigInt> {
    // |a_l| = 1 and |a_{n-1}| = |a_n| · 2n(2l-n+1)·... built downward:
    // |a_{n-1}| / |a_n| = (2l-n+1)·n / (2(l-n+1)).
    let l = l as usize;
    let mut mags = vec![BigInt::zero(); l + 1];
    mags[l] = BigInt::one();
    for n in (1..=l).rev() {
        let num = &mags[n] * BigInt::from((2 * l - n + 1) * n);
        let den = BigInt::from(2 * (l - n + 1));
        debug_assert!((&num % &den).is_zero());
        mags[n - 1] = num / den;
    }
    mags
}

/// `i^{-n-1}` as an index k with value `i^k`.
fn phase_index(n: usize) -> usize {
    (4 - (n + 1) % 4) % 4
}

fn with_phase(mag: &BigInt, k: usize) -> GaussInt {
    let (re, im) = match k {
        0 => (mag.clone(), BigInt::zero()),
        1 => (BigInt::zero(), mag.clone()),
        2 => (-mag, BigInt::zero()),
        _ => (BigInt::zero(), -mag),
    };
    GaussInt { re, im }
}


/// Exact coefficients of `p_l`.
pub fn pl_coefficients(l: u32) -> PlPoly {
    let coeffs = coefficient_magnitudes(l)
        .iter()
        .enumerate()
        .map(|(n, m)| {
            let g = with_phase(m, phase_index(n));
            GRational::from_gaussian(g.re, g.im)
        })
        .collect();
    PlPoly { l, coeffs }
}

impl PlPoly {
    /// Coefficients rounded to the nearest doubles.
    pub fn to_cpoly(&self) -> CPoly {
        CPoly::new(self.coeffs.iter().map(GRational::to_complex64).collect())
    }

    /// Exact value at a Gaussian-rational point.
    pub fn eval_exact(&self, z: &GRational) -> GRational {
        self.coeffs.iter().rev().fold(GRational::zero(), |acc, c| &(&acc * z) + c)
    }

    /// Exact derivative coefficients.
    pub fn derivative_exact(&self) -> Vec<GRational> {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(n, c)| c * &GRational::from_integer(n as i64))
            .collect()
    }
}

fn require_nonzero(z: Complex64) -> Result<()> {
    if z.re == 0.0 && z.im == 0.0 {
        Err(Error::Pole("spherical Hankel function at z = 0".into()))
    } else {
        Ok(())
    }
}

/// `h_l(z)` with `p_l` evaluated in floating point from rounded exact
/// coefficients.
pub fn spherical_hankel(l: u32, z: Complex64) -> Result<Complex64> {
    require_nonzero(z)?;
    let p = pl_coefficients(l).to_cpoly().eval(z);
    Ok(p * z.powi(-(l as i32) - 1) * (Complex64::i() * z).exp())
}

/// `h_l'(z) = l h_l(z)/z − h_{l+1}(z)`.
pub fn spherical_hankel_derivative(l: u32, z: Complex64) -> Result<Complex64> {
    Ok(spherical_hankel(l, z)? * (l as f64) / z - spherical_hankel(l + 1, z)?)
}

/// Spherical Bessel `j_1` (closed form).
pub fn spherical_j1(z: Complex64) -> Complex64 {
    z.sin() / (z * z) - z.cos() / z
}

/// Spherical Neumann `y_1` (closed form).
pub fn spherical_y1(z: Complex64) -> Complex64 {
    -z.cos() / (z * z) - z.sin() / z
}

/// `G_l(z)` together with `z p_l'(z)/p_l(z)`, the logarithmic derivative of
/// `p_l` scaled by `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GValue {
    pub g: Complex64,
    pub z_dlogp: Complex64,
}

/// Exact-arithmetic evaluator of `G_l` for one fixed `l`.
///
/// The double argument `z` is read as `W / 2^e` with `W` a Gaussian integer,
/// so `p_l(z) = P / 2^{el}` with `P = Σ a_n W^n 2^{e(l-n)}` computed without
/// rounding. Bits of the smaller component below `2^{-PRECISION_BITS}|z|` are
/// dropped, which is far below double resolution of `|z|`.
#[derive(Debug, Clone)]
pub struct GEvaluator {
    l: u32,
    coeffs: Vec<GaussInt>,
}

const PRECISION_BITS: i64 = 120;

impl GEvaluator {
    pub fn new(l: u32) -> Self {
        let coeffs = coefficient_magnitudes(l)
            .iter()
            .enumerate()
            .map(|(n, m)| with_phase(m, phase_index(n)))
            .collect();
        GEvaluator { l, coeffs }
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    /// `p_l'(0)/p_l(0)`, the limit of `(z p_l'/p_l)/z`.
    pub fn dlogp_at_origin(&self) -> Complex64 {
        match self.coeffs.get(1) {
            Some(a1) => a1.div_to_complex64(&self.coeffs[0]).expect("a_0 is nonzero"),
            None => Complex64::default(),
        }
    }

    /// `G_l(z)` and `z p_l'/p_l`; a pole error when `p_l(z)` is exactly zero.
    pub fn eval(&self, z: Complex64) -> Result<GValue> {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite argument {z}")));
        }
        let (w, e) = dyadic(z);
        let l = self.l as usize;
        // Horner for P = Σ a_n W^n s^{l-n} and Q = Σ n a_n W^n s^{l-n}, s = 2^e.
        let mut p = self.coeffs[l].clone();
        let mut q = self.coeffs[l].scale(&BigInt::from(l));
        for n in (0..l).rev() {
            let shift = e * (l - n);
            p = p.mul(&w).add(&self.coeffs[n].shl(shift));
            q = q.mul(&w).add(&self.coeffs[n].scale(&BigInt::from(n)).shl(shift));
        }
        if p.is_zero() {
            return Err(Error::Pole(format!("p_{}(z) = 0 at z = {z}", self.l)));
        }
        // G = [s(Q − (l+1)P) + iWP] / (sP)
        let lp1 = BigInt::from(l + 1);
        let num = q
            .add(&p.scale(&-lp1))
            .shl(e)
            .add(&w.mul(&p).times_i());
        let den = p.shl(e);
        let g = num.div_to_complex64(&den).expect("nonzero denominator");
        let z_dlogp = q.div_to_complex64(&p).expect("nonzero denominator");
        Ok(GValue { g, z_dlogp })
    }

    /// `G_l'(z)` from the Riccati identity `z G' = l(l+1) − z² − G − G²`.
    pub fn derivative_from(&self, z: Complex64, g: Complex64) -> Complex64 {
        if z == Complex64::zero() {
            // Taylor: G_0 = −1 + iz; every other G_l has zero linear term.
            return if self.l == 0 { Complex64::i() } else { Complex64::zero() };
        }
        let ll = (self.l as f64) * (self.l as f64 + 1.0);
        (ll - z * z - g - g * g) / z
    }
}

/// `z = W / 2^e` with `e ≥ 0`, truncating bits far below `|z|`.
fn dyadic(z: Complex64) -> (GaussInt, usize) {
    let (mr, er) = decode(z.re);
    let (mi, ei) = decode(z.im);
    let mag = z.re.abs().max(z.im.abs());
    let top = if mag == 0.0 { 0 } else { mag.log2().floor() as i64 };
    let mut need = 0i64;
    if mr != 0 {
        need = need.max(-er);
    }
    if mi != 0 {
        need = need.max(-ei);
    }
    let e = need.min(PRECISION_BITS - top).max(0);
    let scaled = |m: i64, ex: i64| -> BigInt {
        let k = ex + e;
        let m = BigInt::from(m);
        if k >= 0 {
            m << k as usize
        } else {
            // Round half away from zero.
            let half = BigInt::one() << (-k - 1) as usize;
            if m >= BigInt::zero() {
                (m + half) >> (-k) as usize
            } else {
                -((-m + half) >> (-k) as usize)
            }
        }
    };
    (GaussInt { re: scaled(mr, er), im: scaled(mi, ei) }, e as usize)
}

/// `G_l(z) = z h_l'(z)/h_l(z)`, evaluated exactly and rounded once.
pub fn hankel_ratio_g(l: u32, z: Complex64) -> Result<Complex64> {
    Ok(GEvaluator::new(l).eval(z)?.g)
}

/// `G_l(z) = l − z h_{l+1}/h_l` from the forward recurrence of ratios
/// `ρ_k = h_{k+1}/h_k`, `ρ_0 = 1/z − i`, `ρ_k = (2k+1)/z − 1/ρ_{k−1}`.
///
/// Cheap and accurate on and above the real axis. Deep in the lower
/// half-plane near `|z| ≈ l` it loses all accuracy; [`hankel_ratio_g`] is the
/// reference.
pub fn hankel_ratio_g_recurrence(l: u32, z: Complex64) -> Result<Complex64> {
    require_nonzero(z)?;
    let mut rho = z.inv() - Complex64::i();
    for k in 1..=l {
        if rho == Complex64::zero() {
            return Err(Error::Pole(format!("h_{}({z}) = 0", k - 1)));
        }
        rho = (2.0 * k as f64 + 1.0) / z - rho.inv();
    }
    Ok(l as f64 - z * rho)
}

/// Exact Taylor coefficients `[c_0, …, c_order]` of `G_l` about `z = 0`.
pub fn g_taylor_coefficients(l: u32, order: usize) -> Vec<GRational> {
    let p = pl_coefficients(l);
    let a = &p.coeffs;
    // c = (z p')/p by series division: c_n = (b_n − Σ_{j<n} c_j a_{n−j}) / a_0.
    let b = |n: usize| -> GRational {
        if n < a.len() {
            &a[n] * &GRational::from_integer(n as i64)
        } else {
            GRational::zero()
        }
    };
    let mut c: Vec<GRational> = Vec::with_capacity(order + 1);
    for n in 0..=order {
        let mut acc = b(n);
        for (j, cj) in c.iter().enumerate() {
            let k = n - j;
            if k < a.len() {
                acc = &acc - &(cj * &a[k]);
            }
        }
        c.push(&acc / &a[0]);
    }
    c[0] = &c[0] - &GRational::from_integer(l as i64 + 1);
    if order >= 1 {
        c[1] = &c[1] + &GRational::i();
    }
    c
}

/// `R_l(z) = 2i p(z)p(−z) + p'(z)p(−z) + p'(−z)p(z) + 2i z^{2l}` in exact
/// arithmetic. Identically zero.
pub fn wronskian_residual_exact(l: u32, z: &GRational) -> GRational {
    let p = pl_coefficients(l);
    let dp = PlPoly { l, coeffs: p.derivative_exact() };
    let mz = -z;
    let two_i = GRational::from_gaussian(BigInt::zero(), BigInt::from(2));
    let pz = p.eval_exact(z);
    let pm = p.eval_exact(&mz);
    let dpz = dp.eval_exact(z);
    let dpm = dp.eval_exact(&mz);
    let t1 = &two_i * &(&pz * &pm);
    let t2 = &dpz * &pm;
    let t3 = &dpm * &pz;
    let t4 = &two_i * &z.pow(2 * l);
    &(&(&t1 + &t2) + &t3) + &t4
}

/// Floating-point `R_l(z)` from rounded coefficients.
pub fn wronskian_residual(l: u32, z: Complex64) -> Complex64 {
    let p = pl_coefficients(l).to_cpoly();
    let (pz, dpz) = p.eval_with_derivative(z);
    let (pm, dpm) = p.eval_with_derivative(-z);
    2.0 * Complex64::i() * pz * pm + dpz * pm + dpm * pz + 2.0 * Complex64::i() * z.powi(2 * l as i32)
}

/// Magnitude scale of the terms of `R_l` at `|z| = r`, for judging
/// [`wronskian_residual`].
pub fn wronskian_scale(l: u32, r: f64) -> f64 {
    let p = pl_coefficients(l).to_cpoly();
    let a = p.abs_eval(r);
    let da = p.derivative().abs_eval(r);
    2.0 * a * a + 2.0 * a * da + 2.0 * r.powi(2 * l as i32)
}

/// `Q_l(ω, r) = h_l(ωr/c) e^{−iω(r−1)/c} / ((ω/c) h_l'(ω/c))`, written as
/// `p_l(xr) / (r^{l+1} [l p_l(x) − p_{l+1}(x)])` with `x = ω/c`.
pub fn q_ratio(l: u32, omega: Complex64, r: f64, c: f64) -> Result<Complex64> {
    if !(r >= 1.0) || !(c > 0.0) {
        return Err(Error::InvalidParameter(format!("q_ratio needs r ≥ 1 and c > 0, got r={r}, c={c}")));
    }
    let x = omega / c;
    let pl = pl_coefficients(l).to_cpoly();
    let pl1 = pl_coefficients(l + 1).to_cpoly();
    let den = pl.eval(x) * (l as f64) - pl1.eval(x);
    let scale = pl.abs_eval(x.norm()) * (l as f64) + pl1.abs_eval(x.norm());
    if den.norm() <= 1e-14 * scale {
        return Err(Error::Pole(format!("ω/c = {x} is a rigid resonance of order {l}")));
    }
    Ok(pl.eval(x * r) / (r.powi(l as i32 + 1) * den))
}
