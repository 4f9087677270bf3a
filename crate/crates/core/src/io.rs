//! Run configuration files and tabular export.
//!
//! Tables are written as CSV (header row, `# key = value` comment lines
//! above it, reals with 17 significant digits) or as a JSON array of
//! objects. A column pair `re_x`, `im_x` becomes one JSON member
//! `x: {"re": …, "im": …}`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::modes::FieldSample;
use crate::params::Params;
use crate::resonance::{ResidueData, ResonanceKind, ResonanceSet, SolverConfig};
use crate::scan::{FitResult, LModeRecord};

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io { path: path.to_path_buf(), source }
}

/// Every knob of a run, flat so it serialises to plain `key = value` lines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub epsilon: f64,
    pub weber: f64,
    pub cavitation: f64,
    pub gamma: f64,
    pub method_boundary: u32,
    pub polish_tol: f64,
    pub symmetry_tol: f64,
    pub residue_tol: f64,
    pub max_iter: usize,
    pub axis_k2: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l_min: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l_max: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_steps: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_steps: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

impl RunConfig {
    pub fn new(params: &Params, solver: &SolverConfig) -> Self {
        RunConfig {
            epsilon: params.epsilon(),
            weber: params.weber(),
            cavitation: params.cavitation(),
            gamma: params.gamma(),
            method_boundary: solver.method_boundary,
            polish_tol: solver.polish_tol,
            symmetry_tol: solver.symmetry_tol,
            residue_tol: solver.residue_tol,
            max_iter: solver.max_iter,
            axis_k2: solver.axis_k2,
            l_min: None,
            l_max: None,
            t_max: None,
            t_steps: None,
            r_max: None,
            r_steps: None,
            output: None,
            format: None,
        }
    }

    pub fn params(&self) -> Result<Params> {
        Params::new(self.epsilon, self.weber, self.cavitation, self.gamma)
    }

    pub fn solver(&self) -> Result<SolverConfig> {
        let positive = [self.polish_tol, self.symmetry_tol, self.residue_tol, self.axis_k2];
        if positive.iter().any(|v| !(v.is_finite() && *v > 0.0)) || self.max_iter == 0 {
            return Err(Error::InvalidParameter("solver tolerances, axis_k2 and max_iter must be positive".into()));
        }
        Ok(SolverConfig {
            method_boundary: self.method_boundary,
            polish_tol: self.polish_tol,
            symmetry_tol: self.symmetry_tol,
            residue_tol: self.residue_tol,
            max_iter: self.max_iter,
            axis_k2: self.axis_k2,
        })
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&fs::read_to_string(path).map_err(|e| io_err(path, e))?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_toml_string()?).map_err(|e| io_err(path, e))
    }

    /// `(key, value)` pairs echoed above exported tables.
    pub fn header(&self) -> Vec<(String, String)> {
        let value: Value = serde_json::to_value(self).expect("plain struct serialises");
        value
            .as_object()
            .expect("struct is an object")
            .iter()
            .filter(|(_, v)| !v.is_null())
            .map(|(k, v)| (k.clone(), v.as_str().map(str::to_owned).unwrap_or_else(|| v.to_string())))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Format(format!("unknown format {s:?}; expected csv or json"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Real(v) => format!("{v:.16e}"),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Real(v) if v.is_finite() => json!(v),
            Cell::Real(v) => json!(v.to_string()),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
        }
    }
}

/// Records with a fixed column layout.
pub trait Tabular {
    fn columns() -> Vec<&'static str>;
    fn rows(&self) -> Vec<Vec<Cell>>;
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub comments: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn from_records<T: Tabular>(records: &[T], comments: Vec<(String, String)>) -> Self {
        Table {
            comments,
            columns: T::columns().into_iter().map(String::from).collect(),
            rows: records.iter().flat_map(Tabular::rows).collect(),
        }
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut out = String::new();
        for (k, v) in &self.comments {
            writeln!(out, "# {k} = {v}").expect("string write");
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        let fmt = |e: csv::Error| Error::Format(e.to_string());
        w.write_record(&self.columns).map_err(fmt)?;
        for row in &self.rows {
            if row.len() != self.columns.len() {
                return Err(Error::Format(format!("row has {} cells, header {}", row.len(), self.columns.len())));
            }
            w.write_record(row.iter().map(Cell::csv)).map_err(fmt)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Format(e.to_string()))?;
        out.push_str(&String::from_utf8(bytes).expect("csv output is utf-8"));
        Ok(out)
    }

    pub fn to_json(&self) -> Value {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = Map::new();
                let mut k = 0;
                while k < self.columns.len() {
                    let name = &self.columns[k];
                    let paired = name.strip_prefix("re_").filter(|base| {
                        self.columns.get(k + 1).map(|n| n.strip_prefix("im_") == Some(base)).unwrap_or(false)
                    });
                    if let Some(base) = paired {
                        obj.insert(base.to_string(), json!({"re": row[k].json(), "im": row[k + 1].json()}));
                        k += 2;
                    } else {
                        obj.insert(name.clone(), row[k].json());
                        k += 1;
                    }
                }
                Value::Object(obj)
            })
            .collect();
        Value::Array(rows)
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => Ok(serde_json::to_string_pretty(&self.to_json()).expect("json values serialise") + "\n"),
        }
    }

    /// Parses CSV written by [`Table::to_csv`]; cells come back as text.
    pub fn parse_csv(text: &str) -> Result<Table> {
        let mut comments = Vec::new();
        let mut body = String::new();
        for line in text.lines() {
            match line.strip_prefix("# ") {
                Some(c) => {
                    let (k, v) = c.split_once(" = ").ok_or_else(|| Error::Format(format!("bad comment {line:?}")))?;
                    comments.push((k.to_string(), v.to_string()));
                }
                None => {
                    body.push_str(line);
                    body.push('\n');
                }
            }
        }
        let mut r = csv::Reader::from_reader(body.as_bytes());
        let fmt = |e: csv::Error| Error::Format(e.to_string());
        let columns = r.headers().map_err(fmt)?.iter().map(String::from).collect();
        let rows = r
            .records()
            .map(|rec| rec.map(|rec| rec.iter().map(|c| Cell::Text(c.to_string())).collect()).map_err(fmt))
            .collect::<Result<_>>()?;
        Ok(Table { comments, columns, rows })
    }
}

/// Writes `records` to `path` in the chosen format.
pub fn export_table<T: Tabular>(
    records: &[T],
    format: Format,
    path: &Path,
    comments: Vec<(String, String)>,
) -> Result<()> {
    let text = Table::from_records(records, comments).render(format)?;
    fs::write(path, text).map_err(|e| io_err(path, e))
}

fn cx(v: Complex64) -> [Cell; 2] {
    [Cell::Real(v.re), Cell::Real(v.im)]
}

impl Tabular for ResonanceSet {
    fn columns() -> Vec<&'static str> {
        vec!["kind", "l", "epsilon", "index", "re_value", "im_value", "residual", "method", "origin", "suspect"]
    }

    fn rows(&self) -> Vec<Vec<Cell>> {
        let kind = match self.kind {
            ResonanceKind::Rigid => "rigid",
            ResonanceKind::Deformation => "deformation",
        };
        (0..self.values.len())
            .map(|k| {
                let [re, im] = cx(self.values[k]);
                vec![
                    Cell::Text(kind.into()),
                    Cell::Int(self.l as i64),
                    Cell::Real(self.epsilon),
                    Cell::Int(k as i64),
                    re,
                    im,
                    Cell::Real(self.residuals[k]),
                    Cell::Text(self.method.as_str().into()),
                    Cell::Text(self.origins[k].label()),
                    Cell::Bool(self.suspect[k]),
                ]
            })
            .collect()
    }
}

impl Tabular for ResidueData {
    fn columns() -> Vec<&'static str> {
        vec!["l", "re_resonance", "im_resonance", "re_weight", "im_weight", "re_alt_weight", "im_alt_weight", "suspect"]
    }

    fn rows(&self) -> Vec<Vec<Cell>> {
        let [a, b] = cx(self.resonance);
        let [c, d] = cx(self.weight);
        let [e, f] = cx(self.alt_weight);
        vec![vec![Cell::Int(self.l as i64), a, b, c, d, e, f, Cell::Bool(self.suspect)]]
    }
}

impl Tabular for FieldSample {
    fn columns() -> Vec<&'static str> {
        vec!["r", "theta", "phi", "t", "re_psi", "im_psi", "re_beta", "im_beta"]
    }

    fn rows(&self) -> Vec<Vec<Cell>> {
        let [a, b] = cx(self.psi);
        let [c, d] = cx(self.beta);
        vec![vec![Cell::Real(self.r), Cell::Real(self.theta), Cell::Real(self.phi), Cell::Real(self.t), a, b, c, d]]
    }
}

impl Tabular for LModeRecord {
    fn columns() -> Vec<&'static str> {
        vec!["l", "re_lambda", "im_lambda", "method", "m_formula"]
    }

    fn rows(&self) -> Vec<Vec<Cell>> {
        let [a, b] = cx(self.lambda);
        vec![vec![Cell::Int(self.l as i64), a, b, Cell::Text(self.method.as_str().into()), Cell::Real(self.m_formula)]]
    }
}

impl Tabular for FitResult {
    fn columns() -> Vec<&'static str> {
        vec!["form", "a", "b", "residual_norm"]
    }

    fn rows(&self) -> Vec<Vec<Cell>> {
        let b = self.coefficients.get(1).map(|&b| Cell::Real(b)).unwrap_or(Cell::Text(String::new()));
        vec![vec![
            Cell::Text(self.form.as_str().into()),
            Cell::Real(self.coefficients[0]),
            b,
            Cell::Real(self.residual_norm),
        ]]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resonance::deformation_resonances;
    use proptest::prelude::*;

    fn params() -> Params {
        Params::new(0.1, 1.0, 2.0, 1.4).unwrap()
    }

    #[test]
    fn config_round_trip() {
        let mut c = RunConfig::new(&params(), &SolverConfig::default());
        c.l_max = Some(12);
        c.output = Some("out.csv".into());
        c.format = Some(Format::Json);
        let text = c.to_toml_string().unwrap();
        assert!(!text.contains('['), "flat file expected:\n{text}");
        assert_eq!(RunConfig::from_toml_str(&text).unwrap(), c);
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("run.toml");
        c.save(&p).unwrap();
        assert_eq!(RunConfig::load(&p).unwrap(), c);
        assert!(matches!(RunConfig::from_toml_str("epsilon = 1\nbogus = 2"), Err(Error::Format(_))));
        let h = c.header();
        assert!(h.iter().any(|(k, v)| k == "polish_tol" && v == "1e-12"));
        assert!(h.iter().any(|(k, v)| k == "method_boundary" && v == "30"));
    }

    #[test]
    fn resonance_csv_and_json() {
        let set = deformation_resonances(&params(), 0, &SolverConfig::default()).unwrap();
        let t = Table::from_records(std::slice::from_ref(&set), vec![("epsilon".into(), "0.1".into())]);
        let csv = t.to_csv().unwrap();
        let parsed = Table::parse_csv(&csv).unwrap();
        assert_eq!(parsed.rows.len(), 2);
        assert_eq!(parsed.comments, vec![("epsilon".to_string(), "0.1".to_string())]);
        for (row, v) in parsed.rows.iter().zip(&set.values) {
            let get = |k: usize| match &row[k] {
                Cell::Text(s) => s.parse::<f64>().unwrap(),
                _ => unreachable!(),
            };
            assert_eq!(get(4).to_bits(), v.re.to_bits());
            assert_eq!(get(5).to_bits(), v.im.to_bits());
        }
        let j = t.to_json();
        assert_eq!(j.as_array().unwrap().len(), 2);
        assert_eq!(j[0]["value"]["re"].as_f64().unwrap(), set.values[0].re);
        assert_eq!(j[0]["l"], json!(0));
    }

    #[test]
    fn empty_table_is_header_only() {
        let t = Table::from_records::<FieldSample>(&[], vec![]);
        assert_eq!(t.to_csv().unwrap(), "r,theta,phi,t,re_psi,im_psi,re_beta,im_beta\n");
        assert_eq!(t.to_json(), json!([]));
    }

    #[test]
    fn export_errors_name_the_path() {
        let bad = Path::new("/nonexistent-dir/x.csv");
        let err = export_table::<FieldSample>(&[], Format::Csv, bad, vec![]).unwrap_err();
        assert!(err.to_string().contains("/nonexistent-dir/x.csv"));
        assert!(err.is_validation());
        let dir = tempfile::tempdir().unwrap();
        let ok = dir.path().join("x.json");
        export_table::<FieldSample>(&[], Format::Json, &ok, vec![]).unwrap();
        assert_eq!(fs::read_to_string(ok).unwrap().trim(), "[]");
    }

    #[test]
    fn output_is_deterministic() {
        let set = deformation_resonances(&params(), 4, &SolverConfig::default()).unwrap();
        let a = Table::from_records(std::slice::from_ref(&set), vec![]).to_csv().unwrap();
        let set = deformation_resonances(&params(), 4, &SolverConfig::default()).unwrap();
        let b = Table::from_records(std::slice::from_ref(&set), vec![]).to_csv().unwrap();
        assert_eq!(a, b);
    }

    proptest! {
        #[test]
        fn reals_round_trip_bit_exactly(bits in any::<u64>()) {
            let v = f64::from_bits(bits);
            prop_assume!(v.is_finite());
            let s = Cell::Real(v).csv();
            prop_assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
    }
}
