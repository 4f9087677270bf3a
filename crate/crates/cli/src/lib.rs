//! `bubres` command line: resonance tables, asymptotic formulas, field
//! evolution, longest-lived-mode scans and the identity suite.
//!
//! Exit codes: 0 success, 1 bad input (including usage errors), 2 numerical
//! failure or a failed identity check.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use bubres::error::{Error, Result};
use bubres::io::{Cell, Format, RunConfig, Table, Tabular};
use bubres::modes::{assemble_field, project_initial_shape};
use bubres::params::Params;
use bubres::resonance::{
    arc_resonance_asymptotic, axis_resonance_asymptotic, deformation_resonances, incompressible_frequency,
    rayleigh_pair_smalleps, rigid_resonances, SolverConfig,
};
use bubres::scan::{epsilon_scan, find_lstar, fit_scaling, stirling_lstar, FitForm};
use bubres::verify::run_identity_suite;
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

#[derive(Parser, Debug)]
#[command(name = "bubres", version, about = "Scattering resonances of a gas bubble in a weakly compressible liquid")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Flat key = value run file; flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the effective run configuration here.
    #[arg(long, global = true)]
    save_config: Option<PathBuf>,
    /// Mach number ε.
    #[arg(long, global = true)]
    epsilon: Option<f64>,
    /// Weber number (default 1).
    #[arg(long, global = true)]
    weber: Option<f64>,
    /// Cavitation number (default 2).
    #[arg(long, global = true)]
    ca: Option<f64>,
    /// Polytropic exponent (default 1.4).
    #[arg(long, global = true)]
    gamma: Option<f64>,
    /// Largest l solved through the deformation polynomial (default 30).
    #[arg(long, global = true)]
    method_boundary: Option<u32>,
    /// Relative Newton step that ends root polishing (default 1e-12).
    #[arg(long, global = true)]
    polish_tol: Option<f64>,
    /// Allowed mismatch between λ and −conj(λ) partners (default 1e-9).
    #[arg(long, global = true)]
    symmetry_tol: Option<f64>,
    /// Relative disagreement of the two residue routes that marks a root suspect (default 1e-6).
    #[arg(long, global = true)]
    residue_tol: Option<f64>,
    /// Iteration cap for every root solver (default 200).
    #[arg(long, global = true)]
    max_iter: Option<usize>,
    /// Large-l regime starts at l ≥ axis_k2·We/ε² (default 5).
    #[arg(long, global = true)]
    axis_k2: Option<f64>,
    /// csv or json (default csv).
    #[arg(long, global = true)]
    format: Option<String>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Deformation resonances for one order or a range.
    Resonances {
        #[command(flatten)]
        range: LRange,
        /// Emit residue weights instead of the resonances.
        #[arg(long)]
        residues: bool,
    },
    /// Rigid (Neumann) resonances for one order or a range.
    Rigid {
        #[command(flatten)]
        range: LRange,
    },
    /// Closed-form and asymptotic resonance estimates.
    Asymptotic {
        #[arg(long)]
        l: u32,
    },
    /// Surface and potential fields on an (r, t) grid at fixed angles.
    Evolve {
        /// Initial mode `l,m,re,im`; repeatable.
        #[arg(long = "mode", required = true)]
        modes: Vec<String>,
        /// Polar angle of the sample point.
        #[arg(long, default_value_t = 0.0)]
        theta: f64,
        /// Azimuth of the sample point.
        #[arg(long, default_value_t = 0.0)]
        phi: f64,
        /// Outer radius of the grid, at least 1 (default 2).
        #[arg(long)]
        r_max: Option<f64>,
        /// Radial intervals (default 10).
        #[arg(long)]
        r_steps: Option<u32>,
        /// Final time (default 1).
        #[arg(long)]
        t_max: Option<f64>,
        /// Time intervals (default 10).
        #[arg(long)]
        t_steps: Option<u32>,
    },
    /// Longest-lived mode over l = 2..l_max, or scaling fits over several ε.
    Scan {
        #[arg(long)]
        l_max: Option<u32>,
        /// Comma-separated Mach numbers; switches to fit output.
        #[arg(long, value_delimiter = ',')]
        fit_eps: Vec<f64>,
    },
    /// Exact identity suite and resonance-set checks.
    Verify {
        #[arg(long)]
        l_max: Option<u32>,
        #[arg(long, default_value_t = 20)]
        points: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Args, Debug)]
struct LRange {
    /// Single order (shorthand for --l-min L --l-max L).
    #[arg(long)]
    l: Option<u32>,
    #[arg(long)]
    l_min: Option<u32>,
    #[arg(long)]
    l_max: Option<u32>,
}

/// Parses `argv` (program name first), runs, writes to `out`, returns the
/// exit code.
pub fn run_command<I, T>(argv: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            if code == 0 {
                let _ = write!(out, "{e}");
            } else {
                eprint!("{e}");
            }
            return code;
        }
    };
    let result = bubres::parallel::thread_pool().and_then(|pool| pool.install(|| run(cli))).and_then(|(code, text)| {
        out.write_all(text.as_bytes())
            .map_err(|e| Error::Io { path: "<stdout>".into(), source: e })?;
        Ok(code)
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                1
            } else {
                2
            }
        }
    }
}

fn effective_config(c: &Common) -> Result<RunConfig> {
    let mut cfg = match &c.config {
        Some(p) => RunConfig::load(p)?,
        None => {
            let eps = c
                .epsilon
                .ok_or_else(|| Error::InvalidParameter("--epsilon is required without --config".into()))?;
            let params = Params::new(eps, c.weber.unwrap_or(1.0), c.ca.unwrap_or(2.0), c.gamma.unwrap_or(1.4))?;
            RunConfig::new(&params, &SolverConfig::default())
        }
    };
    macro_rules! set {
        ($($field:ident <- $flag:ident),*) => { $(if let Some(v) = c.$flag { cfg.$field = v; })* };
    }
    set!(epsilon <- epsilon, weber <- weber, cavitation <- ca, gamma <- gamma,
         method_boundary <- method_boundary, polish_tol <- polish_tol, symmetry_tol <- symmetry_tol,
         residue_tol <- residue_tol, max_iter <- max_iter, axis_k2 <- axis_k2);
    if let Some(f) = &c.format {
        cfg.format = Some(f.parse()?);
    }
    if let Some(o) = &c.out {
        cfg.output = Some(o.clone());
    }
    Ok(cfg)
}

fn resolve_range(r: &LRange, cfg: &mut RunConfig) -> Result<(u32, u32)> {
    let lo = r.l.or(r.l_min).or(cfg.l_min);
    let hi = r.l.or(r.l_max).or(cfg.l_max).or(lo);
    let (lo, hi) = match (lo, hi) {
        (Some(a), Some(b)) => (a, b),
        (None, Some(b)) => (b, b),
        _ => return Err(Error::InvalidParameter("give --l or --l-min/--l-max".into())),
    };
    if lo > hi {
        return Err(Error::InvalidParameter(format!("empty range {lo}..={hi}")));
    }
    cfg.l_min = Some(lo);
    cfg.l_max = Some(hi);
    Ok((lo, hi))
}

/// Orders in `lo..=hi`; inside a range the excluded `l = 1` is skipped, on
/// its own it is an error.
fn orders(lo: u32, hi: u32) -> Result<Vec<u32>> {
    if lo == 1 && hi == 1 {
        return Err(Error::ExcludedMode);
    }
    Ok((lo..=hi).filter(|&l| l != 1).collect())
}

/// Returns the exit code and the text destined for standard output.
fn run(cli: Cli) -> Result<(i32, String)> {
    let mut rc = effective_config(&cli.common)?;
    let mut code = 0;
    let mut extra: Vec<(String, String)> = Vec::new();
    let table = match &cli.command {
        Command::Resonances { range, residues } => {
            let (lo, hi) = resolve_range(range, &mut rc)?;
            let (params, solver) = (rc.params()?, rc.solver()?);
            let sets = collect_sets(&orders(lo, hi)?, |l| deformation_resonances(&params, l, &solver))?;
            if *residues {
                let mut data = Vec::new();
                for s in &sets {
                    data.extend(s.residues(&params, &solver)?);
                }
                Table::from_records(&data, vec![])
            } else {
                Table::from_records(&sets, vec![])
            }
        }
        Command::Rigid { range } => {
            let (lo, hi) = resolve_range(range, &mut rc)?;
            let (params, solver) = (rc.params()?, rc.solver()?);
            let sets = collect_sets(&orders(lo, hi)?, |l| rigid_resonances(&params, l, &solver))?;
            Table::from_records(&sets, vec![])
        }
        Command::Asymptotic { l } => {
            rc.l_min = Some(*l);
            rc.l_max = Some(*l);
            asymptotic_table(&rc.params()?, *l, rc.axis_k2)?
        }
        Command::Evolve { modes, theta, phi, r_max, r_steps, t_max, t_steps } => {
            let coeffs = modes.iter().map(|m| parse_mode(m)).collect::<Result<Vec<_>>>()?;
            let set = project_initial_shape(&coeffs)?;
            for w in &set.warnings {
                eprintln!("warning: {w}");
            }
            rc.r_max = Some(r_max.or(rc.r_max).unwrap_or(2.0));
            rc.r_steps = Some(r_steps.or(rc.r_steps).unwrap_or(10));
            rc.t_max = Some(t_max.or(rc.t_max).unwrap_or(1.0));
            rc.t_steps = Some(t_steps.or(rc.t_steps).unwrap_or(10));
            let (rm, rs, tm, ts) = (rc.r_max.unwrap(), rc.r_steps.unwrap(), rc.t_max.unwrap(), rc.t_steps.unwrap());
            if !(rm >= 1.0 && tm >= 0.0) {
                return Err(Error::InvalidParameter("need r_max ≥ 1 and t_max ≥ 0".into()));
            }
            let mut grid = Vec::new();
            for it in 0..=ts {
                for ir in 0..=rs {
                    let r = 1.0 + (rm - 1.0) * ir as f64 / rs.max(1) as f64;
                    let t = tm * it as f64 / ts.max(1) as f64;
                    grid.push((r, *theta, *phi, t));
                }
            }
            extra.push(("theta".into(), theta.to_string()));
            extra.push(("phi".into(), phi.to_string()));
            extra.push(("modes".into(), modes.join(" ")));
            let samples = assemble_field(&rc.params()?, &set, &grid, &rc.solver()?)?;
            Table::from_records(&samples, vec![])
        }
        Command::Scan { l_max, fit_eps } => {
            let (params, solver) = (rc.params()?, rc.solver()?);
            if fit_eps.is_empty() {
                let l_max = l_max.or(rc.l_max).unwrap_or(52);
                rc.l_max = Some(l_max);
                scan_table(&params, l_max, &solver, &mut extra)?
            } else {
                fit_table(&params, *l_max, fit_eps, &solver, &mut extra)?
            }
        }
        Command::Verify { l_max, points, seed } => {
            let l_max = l_max.or(rc.l_max).unwrap_or(8);
            rc.l_max = Some(l_max);
            extra.push(("points".into(), points.to_string()));
            extra.push(("seed".into(), seed.to_string()));
            let report = run_identity_suite(&rc.params()?, l_max, *points, *seed, &rc.solver()?)?;
            if !report.all_passed() {
                code = 2;
            }
            let rows = report
                .checks
                .iter()
                .map(|c| {
                    vec![
                        Cell::Text(c.name.clone()),
                        Cell::Int(c.l as i64),
                        Cell::Bool(c.passed),
                        Cell::Text(c.detail.clone()),
                    ]
                })
                .collect();
            Table { comments: vec![], columns: ["check", "l", "passed", "detail"].map(String::from).to_vec(), rows }
        }
    };
    if let Some(p) = &cli.common.save_config {
        rc.save(p)?;
    }
    let mut table = table;
    table.comments = rc.header();
    table.comments.extend(extra);
    let text = table.render(rc.format.unwrap_or(Format::Csv))?;
    match &rc.output {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| Error::Io { path: p.clone(), source: e })?;
            Ok((code, String::new()))
        }
        None => Ok((code, text)),
    }
}

fn collect_sets<T, F>(ls: &[u32], f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u32) -> Result<T> + Sync,
{
    use rayon::prelude::*;
    ls.par_iter().map(|&l| f(l)).collect()
}

fn parse_mode(s: &str) -> Result<(u32, i32, Complex64)> {
    let bad = || Error::InvalidParameter(format!("--mode expects l,m,re,im; got {s:?}"));
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(bad());
    }
    let l = parts[0].parse().map_err(|_| bad())?;
    let m = parts[1].parse().map_err(|_| bad())?;
    let re: f64 = parts[2].parse().map_err(|_| bad())?;
    let im: f64 = parts[3].parse().map_err(|_| bad())?;
    Ok((l, m, Complex64::new(re, im)))
}

fn estimate_row(quantity: &str, index: i64, v: Complex64, note: &str) -> Vec<Cell> {
    vec![
        Cell::Text(quantity.into()),
        Cell::Int(index),
        Cell::Real(v.re),
        Cell::Real(v.im),
        Cell::Text(note.into()),
    ]
}

fn asymptotic_table(params: &Params, l: u32, k2: f64) -> Result<Table> {
    let mut rows = Vec::new();
    rows.push(estimate_row(
        "incompressible",
        0,
        Complex64::new(incompressible_frequency(params, l)?, 0.0),
        "",
    ));
    let (plus, minus) = rayleigh_pair_smalleps(params, l)?;
    rows.push(estimate_row("rayleigh", 1, plus, ""));
    rows.push(estimate_row("rayleigh", -1, minus, ""));
    if l >= 2 && params.epsilon() > 0.0 {
        for s in 1..=(l + 1) / 2 + 1 {
            rows.push(estimate_row("arc", s as i64, arc_resonance_asymptotic(params, l, s)?, ""));
        }
        let axis = axis_resonance_asymptotic(params, l, k2)?;
        let note = if axis.in_regime { "in-regime" } else { "outside-regime" };
        rows.push(estimate_row("axis", 0, axis.value, note));
    }
    Ok(Table {
        comments: vec![],
        columns: ["quantity", "index", "re_value", "im_value", "note"].map(String::from).to_vec(),
        rows,
    })
}

fn scan_table(params: &Params, l_max: u32, solver: &SolverConfig, extra: &mut Vec<(String, String)>) -> Result<Table> {
    let rec = find_lstar(params, l_max, solver)?;
    let mut columns = vec!["row".to_string()];
    columns.extend(bubres::scan::LModeRecord::columns().into_iter().map(String::from));
    let mut rows: Vec<Vec<Cell>> = rec
        .entries
        .iter()
        .flat_map(|e| e.rows())
        .map(|r| std::iter::once(Cell::Text("mode".into())).chain(r).collect())
        .collect();
    rows.push(vec![
        Cell::Text("l_star".into()),
        Cell::Int(rec.l_star as i64),
        Cell::Real(rec.lambda_star.re),
        Cell::Real(rec.lambda_star.im),
        Cell::Text("min |im|".into()),
        Cell::Real(bubres::scan::mode_lifetime_m(params, rec.l_star)?),
    ]);
    if params.epsilon() > 0.0 {
        let s = stirling_lstar(params)?;
        extra.push(("stirling_l".into(), format!("{:.16e}", s.l_pred)));
        extra.push(("stirling_re".into(), format!("{:.16e}", s.re_pred)));
        extra.push(("stirling_im".into(), format!("{:.16e}", s.im_pred)));
    }
    if let Some(l) = rec.l_star_formula() {
        extra.push(("l_star_m_formula".into(), l.to_string()));
    }
    for (l, e) in &rec.failures {
        extra.push((format!("failed_l{l}"), e.clone()));
    }
    Ok(Table { comments: vec![], columns, rows })
}

/// Default order range per ε: generous enough to bracket the numerical
/// minimum, which sits well above the Stirling estimate.
fn default_l_max(eps: f64, we: f64) -> u32 {
    let l_pred = 4.0 / 3f64.exp() * we / (eps * eps);
    52u32.max((3.0 * l_pred).ceil() as u32)
}

fn fit_table(
    params: &Params,
    l_max: Option<u32>,
    eps: &[f64],
    solver: &SolverConfig,
    extra: &mut Vec<(String, String)>,
) -> Result<Table> {
    let grid: Vec<(f64, u32)> = eps
        .iter()
        .map(|&e| (e, l_max.unwrap_or_else(|| default_l_max(e, params.weber()))))
        .collect();
    let recs = epsilon_scan(params, &grid, solver)?;
    for r in &recs {
        extra.push((format!("eps_{}", r.epsilon), format!("l_star {} lambda_star {}", r.l_star, r.lambda_star)));
    }
    let l_data: Vec<_> = recs.iter().map(|r| (r.epsilon, r.l_star as f64)).collect();
    let re_data: Vec<_> = recs.iter().map(|r| (r.epsilon, r.lambda_star.re)).collect();
    let im_data: Vec<_> = recs.iter().map(|r| (r.epsilon, r.lambda_star.im)).collect();
    let fits = [
        fit_scaling(&l_data, FitForm::InvSquare)?,
        fit_scaling(&re_data, FitForm::InvCube)?,
        fit_scaling(&im_data, FitForm::InvCubeExp)?,
    ];
    Ok(Table::from_records(&fits, vec![]))
}
