//! Dense complex polynomials and simultaneous root finding.
//!
//! Root finding is Aberth–Ehrlich on the coefficient-normalized polynomial,
//! started from a rotated circle at the Cauchy bound. [`aberth_refine`] is the
//! same iteration driven by an arbitrary logarithmic derivative, which lets the
//! resonance solver work on functions whose coefficients are too badly scaled
//! to round to doubles.

use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Default relative tolerance for root finding.
pub const DEFAULT_TOL: f64 = 1e-12;
/// Default iteration cap for root finding.
pub const DEFAULT_MAX_ITER: usize = 200;

/// Complex polynomial with ascending coefficients. The leading coefficient is
/// nonzero unless the polynomial is the zero constant.
#[derive(Debug, Clone, PartialEq)]
pub struct CPoly {
    coeffs: Vec<Complex64>,
}

/// Output of [`CPoly::find_roots`].
#[derive(Debug, Clone)]
pub struct RootReport {
    pub roots: Vec<Complex64>,
    /// `|P(root)|` on the caller's (unnormalized) polynomial.
    pub residuals: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl CPoly {
    /// Strips exact-zero leading terms; an empty input becomes the zero constant.
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&ZERO) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(ZERO);
        }
        CPoly { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    /// Monic polynomial `Π (z − r_j)`.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        let mut c = vec![Complex64::new(1.0, 0.0)];
        for &r in roots {
            let mut next = vec![ZERO; c.len() + 1];
            for (k, &ck) in c.iter().enumerate() {
                next[k + 1] += ck;
                next[k] -= r * ck;
            }
            c = next;
        }
        Self::new(c)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
    }

    /// `(P(z), P'(z))` in one Horner pass.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut p = ZERO;
        let mut dp = ZERO;
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// `Σ |c_k| r^k`, the natural magnitude against which `|P(z)|` at `|z| = r`
    /// is judged.
    pub fn abs_eval(&self, r: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
    }

    /// Term-by-term derivative. The derivative of a constant is `[0]`.
    pub fn derivative(&self) -> CPoly {
        if self.coeffs.len() == 1 {
            return CPoly::new(vec![ZERO]);
        }
        CPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    /// Positive root of `|c_n| x^n − Σ_{k<n} |c_k| x^k`, an upper bound on all
    /// root moduli.
    pub fn cauchy_bound(&self) -> f64 {
        let n = self.degree();
        let lead = self.coeffs[n].norm();
        let mags: Vec<f64> = self.coeffs.iter().map(|c| c.norm() / lead).collect();
        // g(x) = 1 − Σ_{k<n} m_k x^{k−n} increases monotonically in x.
        let g = |x: f64| 1.0 - (0..n).map(|k| mags[k] * x.powi(k as i32 - n as i32)).sum::<f64>();
        let mut hi = 1.0 + mags[..n].iter().cloned().fold(0.0, f64::max);
        let mut lo = hi;
        while lo > f64::MIN_POSITIVE.sqrt() && g(lo) > 0.0 {
            lo *= 0.5;
        }
        if g(lo) > 0.0 {
            return lo;
        }
        for _ in 0..200 {
            let mid = (lo * hi).sqrt();
            if g(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi / lo - 1.0 < 1e-12 {
                break;
            }
        }
        hi
    }

    /// All `degree` roots by Aberth–Ehrlich iteration.
    ///
    /// Non-convergence is reported through `converged = false`; the roots are
    /// still returned.
    pub fn find_roots(&self, tol: f64, max_iter: usize) -> Result<RootReport> {
        let n = self.degree();
        if n == 0 {
            return Err(Error::InvalidParameter(
                "root finding needs a polynomial of degree at least 1".into(),
            ));
        }
        let scale = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let normalized = CPoly::new(self.coeffs.iter().map(|c| c / scale).collect());
        let radius = normalized.cauchy_bound();
        // Irrational offset keeps the start away from symmetric configurations.
        let offset = 0.4 * std::f64::consts::SQRT_2;
        let seeds: Vec<Complex64> = (0..n)
            .map(|k| {
                let angle = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + offset;
                Complex64::from_polar(radius, angle)
            })
            .collect();
        let backward_tol = 8.0 * (n as f64) * f64::EPSILON;
        let outcome = aberth_iterate(
            |z| {
                let (p, dp) = normalized.eval_with_derivative(z);
                if p == ZERO {
                    return Ok(Step::Root);
                }
                if p.norm() <= backward_tol * normalized.abs_eval(z.norm()) {
                    return Ok(Step::Settled(p / dp));
                }
                Ok(Step::Ratio(dp / p))
            },
            seeds,
            tol,
            max_iter,
        )?;
        let residuals = outcome.roots.iter().map(|&z| self.eval(z).norm()).collect();
        Ok(RootReport {
            roots: outcome.roots,
            residuals,
            iterations: outcome.iterations,
            converged: outcome.converged,
        })
    }
}

/// What the caller's oracle says about a point during Aberth iteration.
#[derive(Debug, Clone, Copy)]
pub enum Step {
    /// The point is an exact zero.
    Root,
    /// The value is at rounding level; apply this Newton correction and stop
    /// moving the point.
    Settled(Complex64),
    /// Logarithmic derivative `F'/F` at the point.
    Ratio(Complex64),
}

/// Result of [`aberth_refine`].
#[derive(Debug, Clone)]
pub struct AberthOutcome {
    pub roots: Vec<Complex64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Simultaneous Aberth–Ehrlich refinement of `seeds` toward zeros of a
/// function known only through `oracle`. Each returned root stays paired with
/// the seed at the same index.
pub fn aberth_refine<F>(oracle: F, seeds: Vec<Complex64>, tol: f64, max_iter: usize) -> Result<AberthOutcome>
where
    F: Fn(Complex64) -> Result<Step>,
{
    aberth_iterate(oracle, seeds, tol, max_iter)
}

fn aberth_iterate<F>(oracle: F, mut z: Vec<Complex64>, tol: f64, max_iter: usize) -> Result<AberthOutcome>
where
    F: Fn(Complex64) -> Result<Step>,
{
    let n = z.len();
    let mut settled = vec![false; n];
    for iter in 1..=max_iter {
        for i in 0..n {
            if settled[i] {
                continue;
            }
            let w = match oracle(z[i])? {
                Step::Root => {
                    settled[i] = true;
                    continue;
                }
                Step::Settled(w) => {
                    settled[i] = true;
                    w
                }
                Step::Ratio(ratio) => {
                    let s: Complex64 = (0..n).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
                    let denom = ratio - s;
                    if denom == ZERO {
                        ZERO
                    } else {
                        denom.inv()
                    }
                }
            };
            if !(w.re.is_finite() && w.im.is_finite()) {
                return Err(Error::NoConvergence(format!(
                    "Aberth correction became non-finite at {}",
                    z[i]
                )));
            }
            z[i] -= w;
            if w.norm() <= tol * z[i].norm() {
                settled[i] = true;
            }
        }
        if settled.iter().all(|&s| s) {
            return Ok(AberthOutcome { roots: z, iterations: iter, converged: true });
        }
    }
    Ok(AberthOutcome { roots: z, iterations: max_iter, converged: false })
}

/// Newton iteration from `z0` until the step falls below `tol·|z|`.
///
/// Returns `z0` untouched when `f(z0)` is exactly zero. A derivative below the
/// smallest normal double is reported as a degenerate root.
pub fn polish_root<F, D>(f: F, df: D, z0: Complex64, tol: f64, max_iter: usize) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64,
    D: Fn(Complex64) -> Complex64,
{
    let mut z = z0;
    for _ in 0..max_iter {
        let fz = f(z);
        if fz == ZERO {
            return Ok(z);
        }
        let d = df(z);
        if !(d.norm() >= f64::MIN_POSITIVE) {
            return Err(Error::DegenerateRoot(format!("derivative vanishes near {z}")));
        }
        let step = fz / d;
        z -= step;
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NoConvergence(format!("Newton diverged from {z0}")));
        }
        if step.norm() <= tol * z.norm().max(f64::MIN_POSITIVE) {
            return Ok(z);
        }
    }
    Err(Error::NoConvergence(format!(
        "Newton from {z0} did not settle in {max_iter} steps"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn contains(roots: &[Complex64], z: Complex64, tol: f64) -> bool {
        roots.iter().any(|r| (r - z).norm() < tol)
    }

    #[test]
    fn horner() {
        let p = CPoly::from_real(&[1.0, 0.0, 1.0]);
        assert!(p.eval(c(0.0, 1.0)).norm() < 1e-15);
        let k = CPoly::new(vec![c(0.0, -1.0)]);
        assert_eq!(k.eval(c(5.0, 2.0)), c(0.0, -1.0));
        let p2 = CPoly::new(vec![c(0.0, -3.0), c(-3.0, 0.0), c(0.0, 1.0)]);
        assert_eq!(p2.eval(ZERO), c(0.0, -3.0));
    }

    #[test]
    fn derivatives() {
        assert_eq!(CPoly::from_real(&[1.0, 0.0, 1.0]).derivative(), CPoly::from_real(&[0.0, 2.0]));
        assert_eq!(CPoly::new(vec![c(0.0, -1.0)]).derivative(), CPoly::new(vec![ZERO]));
        let p2 = CPoly::new(vec![c(0.0, -3.0), c(-3.0, 0.0), c(0.0, 1.0)]);
        assert_eq!(p2.derivative(), CPoly::new(vec![c(-3.0, 0.0), c(0.0, 2.0)]));
        let (v, d) = p2.eval_with_derivative(c(0.3, -1.2));
        assert!((v - p2.eval(c(0.3, -1.2))).norm() < 1e-14);
        assert!((d - p2.derivative().eval(c(0.3, -1.2))).norm() < 1e-14);
    }

    #[test]
    fn normalization_strips_leading_zeros() {
        let p = CPoly::new(vec![c(1.0, 0.0), c(2.0, 0.0), ZERO, ZERO]);
        assert_eq!(p.degree(), 1);
        assert_eq!(CPoly::new(vec![]).degree(), 0);
    }

    #[test]
    fn simple_roots() {
        let r = CPoly::from_real(&[1.0, 0.0, 1.0]).find_roots(DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        assert!(r.converged);
        assert!(contains(&r.roots, c(0.0, 1.0), 1e-14));
        assert!(contains(&r.roots, c(0.0, -1.0), 1e-14));

        // l·p_1 − p_2 at l = 1, i.e. −iz² + 2z + 2i.
        let p = CPoly::new(vec![c(0.0, 2.0), c(2.0, 0.0), c(0.0, -1.0)]);
        let r = p.find_roots(DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        assert!(r.converged);
        assert!(contains(&r.roots, c(1.0, -1.0), 1e-13));
        assert!(contains(&r.roots, c(-1.0, -1.0), 1e-13));
    }

    #[test]
    fn triple_root_clusters() {
        let p = CPoly::from_real(&[-1.0, 3.0, -3.0, 1.0]);
        let r = p.find_roots(DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        assert_eq!(r.roots.len(), 3);
        for z in &r.roots {
            assert!((z - 1.0).norm() < DEFAULT_TOL.cbrt(), "{z}");
        }
        assert!(r.converged);
        for (z, res) in r.roots.iter().zip(&r.residuals) {
            assert!(*res <= DEFAULT_TOL * p.abs_eval(z.norm()));
        }
    }

    #[test]
    fn degree_zero_rejected() {
        assert!(CPoly::from_real(&[3.0]).find_roots(DEFAULT_TOL, DEFAULT_MAX_ITER).is_err());
    }

    #[test]
    fn zero_root() {
        let p = CPoly::from_real(&[0.0, -2.0, 0.0, 1.0]);
        let r = p.find_roots(DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        assert!(r.converged);
        assert!(contains(&r.roots, ZERO, 1e-14));
        assert!(contains(&r.roots, c(2f64.sqrt(), 0.0), 1e-14));
    }

    #[test]
    fn cauchy_bound_bounds_roots() {
        let roots = [c(3.0, -4.0), c(0.1, 0.0), c(-2.0, 1.0)];
        let b = CPoly::from_roots(&roots).cauchy_bound();
        assert!(b >= 5.0 && b < 20.0, "{b}");
    }

    #[test]
    fn newton_polish() {
        let z = polish_root(|z| z * z + 1.0, |z| 2.0 * z, c(0.0, 0.9), 1e-15, 50).unwrap();
        assert!((z - c(0.0, 1.0)).norm() < 1e-14);
        // Identically zero function: immediate return.
        let z0 = c(0.3, 0.2);
        assert_eq!(polish_root(|_| ZERO, |_| ZERO, z0, 1e-12, 10).unwrap(), z0);
        // Flat but nonzero function: degenerate.
        assert!(matches!(
            polish_root(|_| c(1e-3, 0.0), |_| ZERO, z0, 1e-12, 10),
            Err(Error::DegenerateRoot(_))
        ));
    }

    #[test]
    fn aberth_refine_keeps_seed_order() {
        let p = CPoly::from_roots(&[c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 2.0)]);
        let seeds = vec![c(0.9, 0.1), c(-1.1, 0.05), c(0.1, 1.8)];
        let out = aberth_refine(
            |z| {
                let (v, d) = p.eval_with_derivative(z);
                Ok(if v == ZERO { Step::Root } else { Step::Ratio(d / v) })
            },
            seeds,
            1e-14,
            100,
        )
        .unwrap();
        assert!(out.converged);
        assert!((out.roots[0] - 1.0).norm() < 1e-13);
        assert!((out.roots[1] + 1.0).norm() < 1e-13);
        assert!((out.roots[2] - c(0.0, 2.0)).norm() < 1e-13);
    }

    fn complex_strategy() -> impl Strategy<Value = Complex64> {
        (-3.0f64..3.0, -3.0f64..3.0).prop_map(|(a, b)| c(a, b))
    }

    proptest! {
        #[test]
        fn product_form_reproduces_coefficients(roots in prop::collection::vec(complex_strategy(), 1..12)) {
            let p = CPoly::from_roots(&roots);
            let r = p.find_roots(DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
            prop_assert_eq!(r.roots.len(), roots.len());
            if r.converged {
                let q = CPoly::from_roots(&r.roots);
                let scale = p.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
                for (a, b) in p.coeffs().iter().zip(q.coeffs()) {
                    prop_assert!((a - b).norm() <= 1e-8 * scale);
                }
            }
        }

        #[test]
        fn real_coefficients_give_conjugate_roots(coeffs in prop::collection::vec(-5.0f64..5.0, 3..12)) {
            let mut coeffs = coeffs;
            *coeffs.last_mut().unwrap() = 1.0;
            let p = CPoly::from_real(&coeffs);
            let r = p.find_roots(DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
            prop_assume!(r.converged);
            let spread = r.roots.iter().map(|z| z.norm()).fold(1.0, f64::max);
            for z in &r.roots {
                let d = r.roots.iter().map(|w| (w - z.conj()).norm()).fold(f64::INFINITY, f64::min);
                prop_assert!(d < 1e-6 * spread, "no conjugate partner for {}", z);
            }
        }

        #[test]
        fn newton_polish_barely_moves_aberth_roots(roots in prop::collection::vec(complex_strategy(), 1..10)) {
            let p = CPoly::from_roots(&roots);
            let dp = p.derivative();
            let r = p.find_roots(DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
            prop_assume!(r.converged);
            // Well-separated roots only; clusters are legitimately ill-conditioned.
            let mut sep = f64::INFINITY;
            for i in 0..roots.len() {
                for j in 0..i {
                    sep = sep.min((roots[i] - roots[j]).norm());
                }
            }
            prop_assume!(sep > 0.1);
            for z in &r.roots {
                let polished = polish_root(|w| p.eval(w), |w| dp.eval(w), *z, 1e-15, 20).unwrap_or(*z);
                prop_assert!((polished - z).norm() <= DEFAULT_TOL * z.norm().max(1.0), "moved {}", (polished - z).norm());
            }
        }
    }
}
