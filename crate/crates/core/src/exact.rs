//! Exact Gaussian-rational arithmetic on big integers, plus the dyadic
//! conversions used to evaluate polynomials at floating-point arguments
//! without rounding.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// `(re + i·im) / den` with `den > 0` and `gcd(re, im, den) = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GRational {
    re: BigInt,
    im: BigInt,
    den: BigInt,
}

impl GRational {
    /// Panics if `den` is zero.
    pub fn new(re: BigInt, im: BigInt, den: BigInt) -> Self {
        assert!(!den.is_zero(), "GRational with zero denominator");
        let mut g = GRational { re, im, den };
        g.reduce();
        g
    }

    pub fn from_gaussian(re: BigInt, im: BigInt) -> Self {
        GRational { re, im, den: BigInt::one() }
    }

    pub fn from_integer(n: i64) -> Self {
        Self::from_gaussian(BigInt::from(n), BigInt::zero())
    }

    /// `a/b` as a real rational. Panics if `b` is zero.
    pub fn from_ratio(a: i64, b: i64) -> Self {
        Self::new(BigInt::from(a), BigInt::zero(), BigInt::from(b))
    }

    /// Exact value of a double-precision complex number.
    pub fn from_complex64(z: Complex64) -> Self {
        let (mr, er) = decode(z.re);
        let (mi, ei) = decode(z.im);
        let e = er.min(ei);
        let re = BigInt::from(mr) << (er - e) as usize;
        let im = BigInt::from(mi) << (ei - e) as usize;
        if e >= 0 {
            Self::from_gaussian(re << e as usize, im << e as usize)
        } else {
            Self::new(re, im, BigInt::one() << (-e) as usize)
        }
    }

    pub fn zero() -> Self {
        Self::from_integer(0)
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    pub fn i() -> Self {
        Self::from_gaussian(BigInt::zero(), BigInt::one())
    }

    pub fn re_numer(&self) -> &BigInt {
        &self.re
    }

    pub fn im_numer(&self) -> &BigInt {
        &self.im
    }

    pub fn denom(&self) -> &BigInt {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn is_imaginary(&self) -> bool {
        self.re.is_zero()
    }

    pub fn conj(&self) -> Self {
        GRational { re: self.re.clone(), im: -&self.im, den: self.den.clone() }
    }

    /// `None` when dividing by zero.
    pub fn checked_div(&self, rhs: &GRational) -> Option<GRational> {
        if rhs.is_zero() {
            return None;
        }
        // (a + bi)/d1 ÷ (c + di)/d2 = (a + bi)(c − di)·d2 / (d1·(c² + d²))
        let norm = &rhs.re * &rhs.re + &rhs.im * &rhs.im;
        let re = (&self.re * &rhs.re + &self.im * &rhs.im) * &rhs.den;
        let im = (&self.im * &rhs.re - &self.re * &rhs.im) * &rhs.den;
        Some(GRational::new(re, im, &self.den * norm))
    }

    pub fn pow(&self, n: u32) -> GRational {
        let mut acc = GRational::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Nearest-double rounding of each component.
    pub fn to_complex64(&self) -> Complex64 {
        Complex64::new(ratio_to_f64(&self.re, &self.den), ratio_to_f64(&self.im, &self.den))
    }

    fn reduce(&mut self) {
        if self.den.is_negative() {
            self.re = -&self.re;
            self.im = -&self.im;
            self.den = -&self.den;
        }
        let g = self.re.gcd(&self.im).gcd(&self.den);
        if !g.is_one() && !g.is_zero() {
            self.re /= &g;
            self.im /= &g;
            self.den /= &g;
        }
    }
}

impl fmt::Display for GRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.im.is_negative() { '-' } else { '+' };
        if self.den.is_one() {
            write!(f, "{} {} {}i", self.re, sign, self.im.abs())
        } else {
            write!(f, "({} {} {}i)/{}", self.re, sign, self.im.abs(), self.den)
        }
    }
}

impl<'a> Add<&'a GRational> for &'a GRational {
    type Output = GRational;
    fn add(self, rhs: &GRational) -> GRational {
        if self.den == rhs.den {
            return GRational::new(&self.re + &rhs.re, &self.im + &rhs.im, self.den.clone());
        }
        GRational::new(
            &self.re * &rhs.den + &rhs.re * &self.den,
            &self.im * &rhs.den + &rhs.im * &self.den,
            &self.den * &rhs.den,
        )
    }
}

impl<'a> Sub<&'a GRational> for &'a GRational {
    type Output = GRational;
    fn sub(self, rhs: &GRational) -> GRational {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a GRational> for &'a GRational {
    type Output = GRational;
    fn mul(self, rhs: &GRational) -> GRational {
        GRational::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
            &self.den * &rhs.den,
        )
    }
}

impl<'a> Div<&'a GRational> for &'a GRational {
    type Output = GRational;
    /// Panics on division by zero, like integer division.
    fn div(self, rhs: &GRational) -> GRational {
        self.checked_div(rhs).expect("GRational division by zero")
    }
}

impl Neg for &GRational {
    type Output = GRational;
    fn neg(self) -> GRational {
        GRational { re: -&self.re, im: -&self.im, den: self.den.clone() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<GRational> for GRational {
            type Output = GRational;
            fn $m(self, rhs: GRational) -> GRational {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for GRational {
    type Output = GRational;
    fn neg(self) -> GRational {
        -&self
    }
}

/// Gaussian integer; the working type for fraction-free polynomial
/// evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct GaussInt {
    pub re: BigInt,
    pub im: BigInt,
}

impl GaussInt {
    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn mul(&self, o: &GaussInt) -> GaussInt {
        GaussInt {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }

    pub fn add(&self, o: &GaussInt) -> GaussInt {
        GaussInt { re: &self.re + &o.re, im: &self.im + &o.im }
    }

    pub fn scale(&self, k: &BigInt) -> GaussInt {
        GaussInt { re: &self.re * k, im: &self.im * k }
    }

    pub fn shl(&self, bits: usize) -> GaussInt {
        GaussInt { re: &self.re << bits, im: &self.im << bits }
    }

    /// Multiplication by `i`.
    pub fn times_i(&self) -> GaussInt {
        GaussInt { re: -&self.im, im: self.re.clone() }
    }

    /// `self / den` rounded to doubles, component by component.
    pub fn div_to_complex64(&self, den: &GaussInt) -> Option<Complex64> {
        if den.is_zero() {
            return None;
        }
        let norm = &den.re * &den.re + &den.im * &den.im;
        let re = &self.re * &den.re + &self.im * &den.im;
        let im = &self.im * &den.re - &self.re * &den.im;
        Some(Complex64::new(ratio_to_f64(&re, &norm), ratio_to_f64(&im, &norm)))
    }
}

/// `x = mant · 2^exp` exactly.
pub(crate) fn decode(x: f64) -> (i64, i64) {
    if x == 0.0 {
        return (0, 0);
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 0 { 1 } else { -1 };
    let exp_bits = ((bits >> 52) & 0x7ff) as i64;
    let frac = (bits & ((1u64 << 52) - 1)) as i64;
    let (mant, exp) = if exp_bits == 0 { (frac, -1074) } else { (frac | (1i64 << 52), exp_bits - 1075) };
    let tz = mant.trailing_zeros() as i64;
    (sign * (mant >> tz), exp + tz)
}

/// `x · 2^e` without intermediate overflow or underflow.
pub(crate) fn ldexp(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
        if x.is_infinite() {
            return x;
        }
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
        if x == 0.0 {
            return x;
        }
    }
    x * 2f64.powi(e as i32)
}

/// Correctly rounded `num / den` for `den > 0`.
pub(crate) fn ratio_to_f64(num: &BigInt, den: &BigInt) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let negative = num.sign() == Sign::Minus;
    let n = num.abs();
    // Quotient with 65–66 significant bits plus a sticky bit rounds correctly.
    let shift = den.bits() as i64 - n.bits() as i64 + 66;
    let (q, r) = if shift >= 0 {
        (n << shift as usize).div_rem(den)
    } else {
        n.div_rem(&(den << (-shift) as usize))
    };
    let q = if r.is_zero() { q } else { q | BigInt::one() };
    let v = ldexp(q.to_f64().unwrap_or(f64::INFINITY), -shift);
    if negative {
        -v
    } else {
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gr(re: i64, im: i64, den: i64) -> GRational {
        GRational::new(BigInt::from(re), BigInt::from(im), BigInt::from(den))
    }

    #[test]
    fn reduction() {
        let g = gr(4, -6, -8);
        assert_eq!(g.re_numer(), &BigInt::from(-2));
        assert_eq!(g.im_numer(), &BigInt::from(3));
        assert_eq!(g.denom(), &BigInt::from(4));
    }

    #[test]
    fn field_operations() {
        let a = gr(1, 2, 3);
        let b = gr(-5, 1, 7);
        assert_eq!(&(&a * &b) / &b, a);
        assert_eq!(&(&a + &b) - &b, a);
        assert_eq!(&GRational::i() * &GRational::i(), GRational::from_integer(-1));
        assert!(a.checked_div(&GRational::zero()).is_none());
        assert_eq!(gr(1, 1, 1).pow(4), GRational::from_integer(-4));
        assert_eq!(a.conj(), gr(1, -2, 3));
    }

    #[test]
    fn display() {
        assert_eq!(gr(1, -2, 3).to_string(), "(1 - 2i)/3");
        assert_eq!(gr(0, 1, 1).to_string(), "0 + 1i");
    }

    #[test]
    fn rounding() {
        let third = GRational::from_ratio(1, 3).to_complex64();
        assert_eq!(third.re, 1.0 / 3.0);
        // Ties go to even; anything past the tie goes up.
        let two53 = 1i64 << 53;
        assert_eq!(GRational::from_integer(two53 + 1).to_complex64().re, two53 as f64);
        assert_eq!(GRational::from_ratio(2 * two53 + 3, 2).to_complex64().re, (two53 + 2) as f64);
        assert_eq!(GRational::from_integer(two53 + 3).to_complex64().re, (two53 + 4) as f64);
        let tiny = GRational::new(BigInt::from(1), BigInt::zero(), BigInt::one() << 1070usize);
        assert_eq!(tiny.to_complex64().re, f64::from_bits(1 << 4));
    }

    proptest! {
        #[test]
        fn doubles_round_trip(re in any::<f64>(), im in any::<f64>()) {
            prop_assume!(re.is_finite() && im.is_finite());
            let z = Complex64::new(re, im);
            let back = GRational::from_complex64(z).to_complex64();
            prop_assert_eq!(back.re.to_bits(), if re == 0.0 { 0.0f64.to_bits() } else { re.to_bits() });
            prop_assert_eq!(back.im.to_bits(), if im == 0.0 { 0.0f64.to_bits() } else { im.to_bits() });
        }

        #[test]
        fn ratio_matches_float_division(a in -1_000_000_000i64..1_000_000_000, b in 1i64..1_000_000_000) {
            // Both operands are exact doubles, so IEEE division is correctly rounded too.
            let v = ratio_to_f64(&BigInt::from(a), &BigInt::from(b));
            prop_assert_eq!(v, a as f64 / b as f64);
        }

        #[test]
        fn distributive(a in -50i64..50, b in -50i64..50, c in 1i64..50, d in -50i64..50, e in -50i64..50, f in 1i64..50) {
            let x = gr(a, b, c);
            let y = gr(d, e, f);
            let z = gr(b, a, f);
            prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
        }
    }
}
