//! Command-line front end: profile tables, the verification suite, and the
//! volume/action comparisons, as CSV or JSON on stdout.
//!
//! Exit codes: 0 when everything requested succeeded and every check
//! passed, 1 on a failed check or a runtime error, 2 on a bad
//! configuration. Errors go to stderr as a one-line JSON record.

use std::ffi::OsString;
use std::io::Write;

use clap::{Parser, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::actions::{
    baptista, eh_action_by_parts, eh_action_closed, eh_action_quadrature, relative_error, total_volume_closed,
    total_volume_quadrature,
};
use crate::exact::{SymSum, SymValue};
use crate::metric_profiles::{a_profile, coefficients, volume_density, MetricFamily, MetricKind, ModelParams, MuPoint};
use crate::quadrature::QuadratureOptions;
use crate::ricci::{ricci_profile, scalar_curvature, MU_RICCI_MAX};
use crate::verify::{log_grid, run_suite, SuiteConfig};
use crate::Error;

/// Relative agreement required of numeric pairs in `compare`.
pub const COMPARE_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Profiles, coefficients, C, kappa and V on a log-spaced grid
    Table,
    /// Run the invariant suite
    Verify,
    /// Total volume, closed form vs quadrature
    Volume,
    /// Einstein-Hilbert action, closed forms vs quadrature
    Action,
    /// L2 volume and action against the conjectured general formulas
    Compare,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    L2,
    Fs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug, Parser, Serialize)]
#[command(name = "lumpgeom", version, about = "Geometry of the charge-one CP^k lump moduli space")]
pub struct RunConfig {
    #[arg(value_enum)]
    pub command: Command,
    /// Target dimension; a comma-separated list runs each value in turn
    #[arg(long, value_delimiter = ',', default_value = "2")]
    pub k: Vec<u32>,
    /// Curvature of the domain sphere (L2)
    #[arg(long, default_value_t = 4.0)]
    pub c1: f64,
    /// Curvature of the target CP^k (L2)
    #[arg(long, default_value_t = 4.0)]
    pub c2: f64,
    /// Holomorphic sectional curvature (FS)
    #[arg(long, default_value_t = 4.0)]
    pub c: f64,
    #[arg(long, value_enum, default_value_t = Metric::L2)]
    pub metric: Metric,
    #[arg(long, default_value_t = 1.01)]
    pub mu_min: f64,
    #[arg(long, default_value_t = 1000.0)]
    pub mu_max: f64,
    #[arg(long, default_value_t = 50)]
    pub steps: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Relative tolerance of the adaptive quadrature
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Relative perturbation of C in the Ricci form used by the trace check
    #[arg(long, default_value_t = 0.0)]
    pub perturb: f64,
}

impl RunConfig {
    fn families(&self) -> Result<Vec<MetricFamily>, Error> {
        let kind = match self.metric {
            Metric::L2 => MetricKind::L2,
            Metric::Fs => MetricKind::FS,
        };
        self.k.iter().map(|&k| Ok(MetricFamily::new(kind, ModelParams::new(k, self.c1, self.c2, self.c)?))).collect()
    }

    fn validate(&self) -> Result<Vec<MetricFamily>, Error> {
        let pre = |msg: String| Err(Error::Precondition(msg));
        if self.k.is_empty() {
            return pre("no k given".into());
        }
        if self.steps < 2 {
            return pre(format!("steps = {}: need at least 2", self.steps));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return pre(format!("tol = {}: need a positive finite value", self.tol));
        }
        if !self.perturb.is_finite() {
            return pre(format!("perturb = {}: need a finite value", self.perturb));
        }
        if matches!(self.command, Command::Table | Command::Verify)
            && !(self.mu_min > 1.0 && self.mu_min < self.mu_max && self.mu_max <= MU_RICCI_MAX)
        {
            return pre(format!(
                "mu range [{}, {}]: need 1 < mu_min < mu_max <= {MU_RICCI_MAX:e}",
                self.mu_min, self.mu_max
            ));
        }
        if self.command == Command::Compare && self.metric != Metric::L2 {
            return pre("compare is defined for the L2 metric only".into());
        }
        self.families()
    }

    fn grid(&self) -> Vec<f64> {
        log_grid(self.mu_min, self.mu_max, self.steps)
    }
}

enum Cell {
    Int(u64),
    Num(f64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(n) => n.to_string(),
            Cell::Num(x) => format!("{x:e}"),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(n) => json!(n),
            Cell::Num(x) => json!(x),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
            Cell::Empty => Value::Null,
        }
    }
}

struct Report {
    key: &'static str,
    columns: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
    failed: bool,
}

fn exact_cell(v: Result<SymValue, Error>) -> (Cell, Option<SymValue>) {
    match v {
        Ok(v) => (Cell::Text(v.to_string()), Some(v)),
        Err(_) => (Cell::Empty, None),
    }
}

fn error_cell(errors: &[Error]) -> Cell {
    if errors.is_empty() {
        Cell::Empty
    } else {
        Cell::Text(errors.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; "))
    }
}

fn table(cfg: &RunConfig, families: &[MetricFamily]) -> Result<Report, Error> {
    let columns = vec!["k", "mu", "A", "dA", "A0", "A1", "A2", "A3", "A4", "C", "D", "kappa", "V"];
    let mut rows = Vec::new();
    for fam in families {
        let ricci = ricci_profile(fam);
        for mu in cfg.grid() {
            let p = MuPoint::checked(mu)?;
            let a = a_profile(fam, p)?;
            let co = coefficients(fam, p)?;
            rows.push(vec![
                Cell::Int(fam.k() as u64),
                Cell::Num(mu),
                Cell::Num(a.value),
                Cell::Num(a.d1),
                Cell::Num(co.a0),
                Cell::Num(co.a1),
                Cell::Num(co.a2),
                Cell::Num(co.a3),
                Cell::Num(co.a4),
                Cell::Num(ricci.c(p)?.value),
                Cell::Num(ricci.d),
                Cell::Num(scalar_curvature(fam, p)?),
                Cell::Num(volume_density(fam, p)?),
            ]);
        }
    }
    Ok(Report { key: "rows", columns, rows, failed: false })
}

fn verify(cfg: &RunConfig, families: &[MetricFamily]) -> Report {
    let columns = vec!["k", "name", "measured", "tolerance", "passed", "error"];
    let mut rows = Vec::new();
    let mut failed = false;
    for fam in families {
        let suite = SuiteConfig {
            family: *fam,
            mu_min: cfg.mu_min,
            mu_max: cfg.mu_max,
            steps: cfg.steps,
            tol: cfg.tol,
            perturb: cfg.perturb,
        };
        for c in run_suite(&suite) {
            failed |= !c.passed;
            rows.push(vec![
                Cell::Int(fam.k() as u64),
                Cell::Text(c.name),
                Cell::Num(c.measured),
                Cell::Num(c.tolerance),
                Cell::Bool(c.passed),
                c.error.map_or(Cell::Empty, Cell::Text),
            ]);
        }
    }
    Report { key: "checks", columns, rows, failed }
}

/// One closed form against quadrature. Failures are recorded in the row.
fn numeric_row(
    k: u32,
    exact: Result<SymValue, Error>,
    quad: Result<crate::quadrature::QuadratureResult, Error>,
    rows: &mut Vec<Vec<Cell>>,
) -> bool {
    let mut errors = Vec::new();
    let (exact_text, exact) = match exact {
        Err(e) => {
            errors.push(e);
            (Cell::Empty, None)
        }
        ok => exact_cell(ok),
    };
    let (q, est, evals) = match &quad {
        Ok(q) => (Cell::Num(q.value), Cell::Num(q.error_estimate), Cell::Int(q.evaluations as u64)),
        Err(_) => (Cell::Empty, Cell::Empty, Cell::Empty),
    };
    let rel = match (&exact, &quad) {
        (Some(x), Ok(q)) => Some(relative_error(q.value, x)),
        _ => None,
    };
    if let Err(e) = quad {
        errors.push(e);
    }
    let ok = errors.is_empty() && rel.is_some_and(|r| r <= COMPARE_TOLERANCE);
    rows.push(vec![
        Cell::Int(k as u64),
        exact_text,
        exact.as_ref().map_or(Cell::Empty, |x| Cell::Num(x.to_f64())),
        q,
        est,
        evals,
        rel.map_or(Cell::Empty, Cell::Num),
        error_cell(&errors),
    ]);
    ok
}

fn volume(cfg: &RunConfig, families: &[MetricFamily]) -> Report {
    let columns = vec!["k", "Vol", "Vol_value", "quadrature", "error_estimate", "evaluations", "rel_error", "error"];
    let opts = QuadratureOptions::relative(cfg.tol);
    let mut rows = Vec::new();
    let mut failed = false;
    for fam in families {
        failed |= !numeric_row(fam.k(), total_volume_closed(fam), total_volume_quadrature(fam, opts), &mut rows);
    }
    Report { key: "rows", columns, rows, failed }
}

fn action(cfg: &RunConfig, families: &[MetricFamily]) -> Report {
    let columns =
        vec!["k", "route", "H", "H_value", "quadrature", "error_estimate", "evaluations", "rel_error", "error"];
    let opts = QuadratureOptions::relative(cfg.tol);
    let mut rows = Vec::new();
    let mut failed = false;
    for fam in families {
        let quad = eh_action_quadrature(fam, opts);
        for (route, exact) in [("closed", eh_action_closed(fam)), ("by_parts", eh_action_by_parts(fam))] {
            let mut one = Vec::new();
            failed |= !numeric_row(fam.k(), exact, quad.clone(), &mut one);
            let mut row = one.pop().expect("one row");
            row.insert(1, Cell::Text(route.into()));
            rows.push(row);
        }
    }
    Report { key: "rows", columns, rows, failed }
}

fn compare(cfg: &RunConfig, families: &[MetricFamily]) -> Report {
    let columns = vec![
        "k",
        "quantity",
        "closed",
        "baptista",
        "exact_equal",
        "closed_value",
        "quadrature",
        "rel_error",
        "agree",
        "error",
    ];
    let opts = QuadratureOptions::relative(cfg.tol);
    let mut rows = Vec::new();
    let mut failed = false;
    for fam in families {
        let b = baptista(1, fam.k(), 0, &SymValue::pi());
        let pairs = [
            ("H", eh_action_closed(fam), b.as_ref().map(|b| b.h.clone()), eh_action_quadrature(fam, opts)),
            ("Vol", total_volume_closed(fam), b.as_ref().map(|b| b.vol.clone()), total_volume_quadrature(fam, opts)),
        ];
        for (quantity, closed, conj, quad) in pairs {
            let mut errors = Vec::new();
            let closed = closed.map_err(|e| errors.push(e)).ok();
            let conj = conj.map_err(|e| errors.push(e.clone())).ok();
            let quad = quad.map_err(|e| errors.push(e)).ok();
            let equal = match (&closed, &conj) {
                (Some(x), Some(y)) => Some(&SymSum::from(x.clone()) == y),
                _ => None,
            };
            let rel = match (&closed, &quad) {
                (Some(x), Some(q)) => Some(relative_error(q.value, x)),
                _ => None,
            };
            let agree = errors.is_empty() && equal == Some(true) && rel.is_some_and(|r| r <= COMPARE_TOLERANCE);
            failed |= !agree;
            rows.push(vec![
                Cell::Int(fam.k() as u64),
                Cell::Text(quantity.into()),
                closed.as_ref().map_or(Cell::Empty, |x| Cell::Text(x.to_string())),
                conj.as_ref().map_or(Cell::Empty, |x| Cell::Text(x.to_string())),
                equal.map_or(Cell::Empty, Cell::Bool),
                closed.as_ref().map_or(Cell::Empty, |x| Cell::Num(x.to_f64())),
                quad.map_or(Cell::Empty, |q| Cell::Num(q.value)),
                rel.map_or(Cell::Empty, Cell::Num),
                Cell::Bool(agree),
                error_cell(&errors),
            ]);
        }
    }
    Report { key: "rows", columns, rows, failed }
}

fn emit(cfg: &RunConfig, report: &Report, out: &mut dyn Write) -> std::io::Result<()> {
    let config = serde_json::to_value(cfg).expect("config serializes");
    match cfg.format {
        Format::Json => {
            let rows: Vec<Value> = report
                .rows
                .iter()
                .map(|r| {
                    let m: Map<String, Value> =
                        report.columns.iter().zip(r).map(|(c, v)| (c.to_string(), v.json())).collect();
                    Value::Object(m)
                })
                .collect();
            let mut doc = Map::new();
            doc.insert("config".into(), config);
            doc.insert(report.key.into(), Value::Array(rows));
            writeln!(out, "{}", Value::Object(doc))
        }
        Format::Csv => {
            writeln!(out, "# lumpgeom {config}")?;
            let mut w = csv::Writer::from_writer(out);
            w.write_record(&report.columns)?;
            for r in &report.rows {
                w.write_record(r.iter().map(Cell::csv))?;
            }
            w.flush()
        }
    }
}

fn error_record(kind: &str, message: &str) -> String {
    json!({ "error": { "kind": kind, "message": message } }).to_string()
}

/// Runs the CLI on `args` (including the program name) and returns the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(cfg) => cfg,
        Err(e) if !e.use_stderr() => {
            let _ = write!(out, "{e}");
            return 0;
        }
        Err(e) => {
            let _ = writeln!(err, "{}", error_record("usage", e.to_string().trim_end()));
            return 2;
        }
    };
    let families = match cfg.validate() {
        Ok(f) => f,
        Err(e) => {
            let _ = writeln!(err, "{}", error_record(e.kind(), &e.to_string()));
            return 2;
        }
    };
    let report = match cfg.command {
        Command::Table => table(&cfg, &families),
        Command::Verify => Ok(verify(&cfg, &families)),
        Command::Volume => Ok(volume(&cfg, &families)),
        Command::Action => Ok(action(&cfg, &families)),
        Command::Compare => Ok(compare(&cfg, &families)),
    };
    let report = match report {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "{}", error_record(e.kind(), &e.to_string()));
            return 1;
        }
    };
    if let Err(e) = emit(&cfg, &report, out) {
        let _ = writeln!(err, "{}", error_record("io", &e.to_string()));
        return 1;
    }
    i32::from(report.failed)
}
