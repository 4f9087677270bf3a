//! Longest-lived mode search, the Rayleigh lifetime formula `M(l, ε)`, its
//! Stirling-approximated minimiser, and least-squares fits of fixed scaling
//! forms.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::Params;
use crate::resonance::{deformation_resonances, Method, SolverConfig};

/// `ln n!` by direct summation; exact enough for `n` in the thousands.
pub fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// `M(l, ε) = (1/2ε)[(l+2)(l−1)]^{l+1}(l+1)^l[2^l l!/(2l)!]²(ε/√We)^{2l+2}`,
/// the leading Rayleigh-pair damping, formed in log space. `M(l, 0) = 0`.
pub fn mode_lifetime_m(params: &Params, l: u32) -> Result<f64> {
    if l < 2 {
        return Err(Error::InvalidParameter(format!("lifetime formula needs l ≥ 2, got {l}")));
    }
    let eps = params.epsilon();
    if eps == 0.0 {
        return Ok(0.0);
    }
    let lf = l as f64;
    let ln_m = -(2.0 * eps).ln()
        + (lf + 1.0) * ((lf + 2.0) * (lf - 1.0)).ln()
        + lf * (lf + 1.0).ln()
        + 2.0 * (lf * std::f64::consts::LN_2 + ln_factorial(l) - ln_factorial(2 * l))
        + (2.0 * lf + 2.0) * (eps.ln() - 0.5 * params.weber().ln());
    Ok(ln_m.exp())
}

/// Least-damped deformation resonance of one order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LModeRecord {
    pub l: u32,
    pub lambda: Complex64,
    pub method: Method,
    /// `M(l, ε)` for comparison with `|Im λ|`.
    pub m_formula: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub epsilon: f64,
    pub weber: f64,
    pub entries: Vec<LModeRecord>,
    /// Orders whose solve failed, with the error text; excluded from `l_star`.
    pub failures: Vec<(u32, String)>,
    pub l_star: u32,
    pub lambda_star: Complex64,
}

impl ScanRecord {
    /// Order minimising `M(l, ε)` over the scanned range.
    pub fn l_star_formula(&self) -> Option<u32> {
        self.entries
            .iter()
            .min_by(|a, b| a.m_formula.total_cmp(&b.m_formula))
            .map(|e| e.l)
    }
}

/// Scans `l = 2..=l_max` and picks the least-damped resonance. Every order is
/// solved numerically; failed orders are recorded and skipped.
pub fn find_lstar(params: &Params, l_max: u32, cfg: &SolverConfig) -> Result<ScanRecord> {
    if l_max < 2 {
        return Err(Error::InvalidParameter(format!("l_max must be at least 2, got {l_max}")));
    }
    let results: Vec<(u32, Result<LModeRecord>)> = crate::parallel::install(|| {
        (2..=l_max)
            .into_par_iter()
            .map(|l| {
                let rec = deformation_resonances(params, l, cfg).and_then(|set| {
                    Ok(LModeRecord {
                        l,
                        lambda: set.least_damped(),
                        method: set.method,
                        m_formula: mode_lifetime_m(params, l)?,
                    })
                });
                (l, rec)
            })
            .collect()
    });
    let mut entries = Vec::new();
    let mut failures = Vec::new();
    for (l, r) in results {
        match r {
            Ok(e) => entries.push(e),
            Err(e) => failures.push((l, e.to_string())),
        }
    }
    let best = entries
        .iter()
        .min_by(|a, b| a.lambda.im.abs().total_cmp(&b.lambda.im.abs()))
        .copied()
        .ok_or_else(|| Error::NoConvergence(format!("every order failed: {failures:?}")))?;
    Ok(ScanRecord {
        epsilon: params.epsilon(),
        weber: params.weber(),
        entries,
        failures,
        l_star: best.l,
        lambda_star: best.lambda,
    })
}

/// Scans several Mach numbers concurrently, each with its own `l_max`.
pub fn epsilon_scan(params: &Params, grid: &[(f64, u32)], cfg: &SolverConfig) -> Result<Vec<ScanRecord>> {
    crate::parallel::install(|| {
        grid.par_iter()
            .map(|&(eps, l_max)| find_lstar(&params.with_epsilon(eps)?, l_max, cfg))
            .collect()
    })
}

/// Stirling-approximated minimiser of `M(l, ε)` and the resonance there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StirlingPrediction {
    pub l_pred: f64,
    pub re_pred: f64,
    pub im_pred: f64,
}

/// `l ≈ (4/e³)We/ε²`, `Re λ ≈ (4/e³)^{3/2} We/ε³`,
/// `Im λ ≈ −(4/e⁴)(We/ε³) exp(−(4/e³)We/ε²)`.
pub fn stirling_lstar(params: &Params) -> Result<StirlingPrediction> {
    let eps = params.epsilon();
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter("Stirling prediction needs epsilon > 0".into()));
    }
    let we = params.weber();
    let c = 4.0 / 3f64.exp();
    let x = we / (eps * eps);
    Ok(StirlingPrediction {
        l_pred: c * x,
        re_pred: c.powf(1.5) * x / eps,
        im_pred: -(4.0 / 4f64.exp()) * x / eps * (-c * x).exp(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitForm {
    /// `a ε⁻²`
    InvSquare,
    /// `a ε⁻³`
    InvCube,
    /// `a ε⁻³ exp(−b ε⁻²)`
    InvCubeExp,
}

impl FitForm {
    pub fn as_str(&self) -> &'static str {
        match self {
            FitForm::InvSquare => "a*eps^-2",
            FitForm::InvCube => "a*eps^-3",
            FitForm::InvCubeExp => "a*eps^-3*exp(-b*eps^-2)",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub form: FitForm,
    /// `[a]` or `[a, b]`.
    pub coefficients: Vec<f64>,
    /// Euclidean norm of the residual in `ln|y|`.
    pub residual_norm: f64,
}

/// Least squares in `ln|y|`, where each form is linear. All `y` must share a
/// sign, which `a` inherits.
pub fn fit_scaling(data: &[(f64, f64)], form: FitForm) -> Result<FitResult> {
    if data.len() < 3 {
        return Err(Error::InvalidParameter(format!("fit needs ≥ 3 points, got {}", data.len())));
    }
    if data.iter().any(|&(e, y)| !(e > 0.0 && e.is_finite() && y.is_finite() && y != 0.0)) {
        return Err(Error::InvalidParameter("fit data need ε > 0 and finite nonzero y".into()));
    }
    let sign = data[0].1.signum();
    if data.iter().any(|&(_, y)| y.signum() != sign) {
        return Err(Error::InvalidParameter("fit data change sign".into()));
    }
    let n = data.len() as f64;
    match form {
        FitForm::InvSquare | FitForm::InvCube => {
            let p = if form == FitForm::InvSquare { 2.0 } else { 3.0 };
            let shifted: Vec<f64> = data.iter().map(|&(e, y)| y.abs().ln() + p * e.ln()).collect();
            let ln_a = shifted.iter().sum::<f64>() / n;
            let residual_norm = shifted.iter().map(|s| (s - ln_a).powi(2)).sum::<f64>().sqrt();
            Ok(FitResult { form, coefficients: vec![sign * ln_a.exp()], residual_norm })
        }
        FitForm::InvCubeExp => {
            // ln|y| + 3 ln ε = ln a − b x,  x = ε⁻²
            let xs: Vec<f64> = data.iter().map(|&(e, _)| 1.0 / (e * e)).collect();
            let ys: Vec<f64> = data.iter().map(|&(e, y)| y.abs().ln() + 3.0 * e.ln()).collect();
            let mx = xs.iter().sum::<f64>() / n;
            let my = ys.iter().sum::<f64>() / n;
            let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
            if !(sxx > 1e-12 * mx * mx * n) {
                return Err(Error::DegenerateFit("all ε coincide; slope undetermined".into()));
            }
            let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
            let slope = sxy / sxx;
            let intercept = my - slope * mx;
            let residual_norm = xs
                .iter()
                .zip(&ys)
                .map(|(x, y)| (y - intercept - slope * x).powi(2))
                .sum::<f64>()
                .sqrt();
            Ok(FitResult { form, coefficients: vec![sign * intercept.exp(), -slope], residual_norm })
        }
    }
}

/// Evaluates a fitted form at `ε`.
pub fn fit_eval(fit: &FitResult, eps: f64) -> f64 {
    let a = fit.coefficients[0];
    match fit.form {
        FitForm::InvSquare => a / (eps * eps),
        FitForm::InvCube => a / eps.powi(3),
        FitForm::InvCubeExp => a / eps.powi(3) * (-fit.coefficients[1] / (eps * eps)).exp(),
    }
}
