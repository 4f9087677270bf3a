//! Airy function `Ai` and its derivative on `|x| ≤ 12`, and the negative real
//! zeros of both.
//!
//! Values come from the two-series Maclaurin representation
//! `Ai(x) = Ai(0) f(x) + Ai'(0) g(x)`. For negative `x` the series terms reach
//! `~e^{(2/3)|x|^{3/2}}` before cancelling to `O(1)`, so the sums are formed in
//! 320-bit fixed point with 67-digit constants and rounded once.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{decode, ratio_to_f64};

/// Series window half-width.
pub const SERIES_WINDOW: f64 = 12.0;

const FRAC_BITS: usize = 320;

const AI0: &str = "0.3550280538878172392600631860041831763979791741991772405833265103008";
const AIP0: &str = "-0.2588194037928067984051835601892039634790911383549345822100018138561";

/// Fixed-point value `v / 2^FRAC_BITS`.
fn fixed_decimal(s: &str) -> BigInt {
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    let digits: BigInt = format!("{int}{frac}").parse().expect("decimal literal");
    let v = (digits << FRAC_BITS) / BigInt::from(10u32).pow(frac.len() as u32);
    if neg {
        -v
    } else {
        v
    }
}

fn fixed_from_f64(x: f64) -> BigInt {
    let (m, e) = decode(x);
    let k = e + FRAC_BITS as i64;
    if k >= 0 {
        BigInt::from(m) << k as usize
    } else {
        BigInt::from(m) >> (-k) as usize
    }
}

fn fixed_mul(a: &BigInt, b: &BigInt) -> BigInt {
    (a * b) >> FRAC_BITS
}

fn fixed_to_f64(v: &BigInt) -> f64 {
    ratio_to_f64(v, &(BigInt::one() << FRAC_BITS))
}

fn check_window(x: f64) -> Result<()> {
    if x.is_finite() && x.abs() <= SERIES_WINDOW {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "Airy series evaluated at {x}, outside |x| ≤ {SERIES_WINDOW}"
        )))
    }
}

/// Sums `Σ_k u_k` with `u_k = u_{k−1} · x³ / ratio(k)` until the terms are
/// decreasing and vanish at the working precision.
fn series(first: BigInt, x3: &BigInt, x3_f: f64, ratio: impl Fn(u64) -> u64) -> BigInt {
    let mut term = first;
    let mut sum = term.clone();
    for k in 1u64.. {
        let r = ratio(k);
        term = fixed_mul(&term, x3) / BigInt::from(r);
        sum += &term;
        if term.is_zero() || (x3_f.abs() < r as f64 && term.abs().bits() < 64) {
            break;
        }
    }
    sum
}

/// `(Ai(x), Ai'(x))`.
pub fn airy_pair(x: f64) -> Result<(f64, f64)> {
    check_window(x)?;
    let c1 = fixed_decimal(AI0);
    let c2 = fixed_decimal(AIP0);
    let q = fixed_from_f64(x);
    let x3 = fixed_mul(&fixed_mul(&q, &q), &q);
    let x3_f = x * x * x;
    let one = BigInt::one() << FRAC_BITS;
    // f = Σ x^{3k} / Π(3j)(3j−1),   g = Σ x^{3k+1} / Π(3j+1)(3j)
    let f = series(one.clone(), &x3, x3_f, |k| 3 * k * (3 * k - 1));
    let g = series(q.clone(), &x3, x3_f, |k| (3 * k + 1) * (3 * k));
    // f' starts at x²/2 with ratio (3k)(3k+2); g' starts at 1 with ratio (3k−2)(3k).
    let fp = series(fixed_mul(&q, &q) / BigInt::from(2), &x3, x3_f, |k| (3 * k) * (3 * k + 2));
    let gp = series(one, &x3, x3_f, |k| (3 * k - 2) * (3 * k));
    let ai = fixed_mul(&c1, &f) + fixed_mul(&c2, &g);
    let aip = fixed_mul(&c1, &fp) + fixed_mul(&c2, &gp);
    Ok((fixed_to_f64(&ai), fixed_to_f64(&aip)))
}

pub fn airy_ai(x: f64) -> Result<f64> {
    Ok(airy_pair(x)?.0)
}

pub fn airy_ai_prime(x: f64) -> Result<f64> {
    Ok(airy_pair(x)?.1)
}

/// Which function a zero belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AiryKind {
    Ai,
    AiPrime,
}

/// How a zero was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZeroSource {
    Asymptotic,
    Refined,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AiryZero {
    pub value: f64,
    pub source: ZeroSource,
}

/// Leading asymptotic location of the s-th zero, `s ≥ 1`.
pub fn zero_seed(kind: AiryKind, s: u32) -> f64 {
    let k = match kind {
        AiryKind::Ai => 4.0 * s as f64 - 1.0,
        AiryKind::AiPrime => 4.0 * s as f64 - 3.0,
    };
    -(3.0 * std::f64::consts::PI * k / 8.0).powf(2.0 / 3.0)
}

fn refine(kind: AiryKind, seed: f64) -> Option<f64> {
    let mut x = seed;
    for _ in 0..60 {
        let (ai, aip) = airy_pair(x).ok()?;
        // Ai'' = x Ai.
        let step = match kind {
            AiryKind::Ai => ai / aip,
            AiryKind::AiPrime => aip / (x * ai),
        };
        if !step.is_finite() {
            return None;
        }
        x -= step;
        if step.abs() <= 1e-15 * x.abs() {
            return Some(x);
        }
    }
    None
}

fn zero(kind: AiryKind, s: u32) -> AiryZero {
    assert!(s >= 1, "Airy zeros are indexed from 1");
    let seed = zero_seed(kind, s);
    if seed.abs() <= SERIES_WINDOW {
        if let Some(v) = refine(kind, seed).filter(|v| v.abs() <= SERIES_WINDOW) {
            return AiryZero { value: v, source: ZeroSource::Refined };
        }
    }
    AiryZero { value: seed, source: ZeroSource::Asymptotic }
}

/// s-th zero `η_s'` of `Ai'`, refined by Newton when the seed lies in the
/// series window.
pub fn airy_prime_zero(s: u32) -> AiryZero {
    zero(AiryKind::AiPrime, s)
}

/// s-th zero `η_s` of `Ai`.
pub fn airy_zero(s: u32) -> AiryZero {
    zero(AiryKind::Ai, s)
}

/// The first `count` zeros of one kind, strictly decreasing.
#[derive(Debug, Clone)]
pub struct AiryZeroTable {
    pub kind: AiryKind,
    pub values: Vec<f64>,
    pub sources: Vec<ZeroSource>,
}

impl AiryZeroTable {
    pub fn new(kind: AiryKind, count: u32) -> Self {
        let zs: Vec<AiryZero> = (1..=count).map(|s| zero(kind, s)).collect();
        AiryZeroTable {
            kind,
            values: zs.iter().map(|z| z.value).collect(),
            sources: zs.iter().map(|z| z.source).collect(),
        }
    }
}
