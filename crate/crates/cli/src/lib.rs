//! Front end of the `pcr4bp` prover: argument handling, the run transcript
//! and JSON/CSV export of run reports.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::Parser;
use serde::Serialize;
use thiserror::Error;

use pcr4bp_core::interval::{Interval, PBox};
use pcr4bp_core::potential::ParamRect;
use pcr4bp_core::search::{BoxList, ParamList, RunReport, Strategy, PARAM_DOMAIN};
use pcr4bp_core::small_masses::AuditRow;

/// Version of the JSON and CSV export layouts.
pub const SCHEMA_VERSION: u32 = 1;

/// Largest accepted `t`. Ordered masses need `t <= 2/3`, but rectangles may
/// reach further (the heavy strip is `t <= 0.67`); the excess is unordered
/// and discarded by the search. Beyond `t = 1` the mass `m3` is negative.
pub const T_MAX: f64 = 1.0;

pub const EXIT_CONCLUSIVE: i32 = 0;
pub const EXIT_INCONCLUSIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "pcr4bp",
    about = "Verified count of the relative equilibria of the planar circular restricted 4-body problem",
    version
)]
pub struct Args {
    /// Stopping tolerance of the adaptive bisection.
    #[arg(required_unless_present = "constants_audit")]
    pub tol: Option<f64>,
    #[arg(required_unless_present = "constants_audit", allow_negative_numbers = true)]
    pub min_s: Option<f64>,
    #[arg(required_unless_present = "constants_audit", allow_negative_numbers = true)]
    pub max_s: Option<f64>,
    #[arg(required_unless_present = "constants_audit", allow_negative_numbers = true)]
    pub min_t: Option<f64>,
    #[arg(required_unless_present = "constants_audit", allow_negative_numbers = true)]
    pub max_t: Option<f64>,
    /// 1: count all solutions, 2: prove no bifurcations, 3: resolve bifurcations.
    #[arg(required_unless_present = "constants_audit")]
    pub strategy: Option<u8>,
    /// Write the report as JSON.
    #[arg(long, value_name = "PATH")]
    pub json: Option<PathBuf>,
    /// Write every list as CSV rows.
    #[arg(long, value_name = "PATH")]
    pub csv: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, value_name = "N")]
    pub threads: Option<usize>,
    /// Print the reproduced small-mass constants and exit.
    #[arg(long)]
    pub constants_audit: bool,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid arguments: {0}")]
    Invalid(String),
    #[error("parameter rectangle {0} is outside [0, 1/2] x [0, 1]")]
    OutOfDomain(String),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("cannot encode {path}: {message}")]
    Encode { path: PathBuf, message: String },
}

/// A validated invocation.
#[derive(Debug, Clone)]
pub struct Invocation {
    pub tol: f64,
    pub param: ParamRect,
    pub strategy: Strategy,
}

pub fn validate(args: &Args) -> Result<Invocation, CliError> {
    let missing = || CliError::Invalid("expected <tol> <minS> <maxS> <minT> <maxT> <strategy>".into());
    let tol = args.tol.ok_or_else(missing)?;
    let (s0, s1) = (args.min_s.ok_or_else(missing)?, args.max_s.ok_or_else(missing)?);
    let (t0, t1) = (args.min_t.ok_or_else(missing)?, args.max_t.ok_or_else(missing)?);
    let n = args.strategy.ok_or_else(missing)?;
    if !(tol.is_finite() && tol > 0.0) {
        return Err(CliError::Invalid(format!("tol must be positive, got {tol}")));
    }
    if [s0, s1, t0, t1].iter().any(|x| !x.is_finite()) {
        return Err(CliError::Invalid("parameter bounds must be finite".into()));
    }
    if s0 > s1 || t0 > t1 {
        return Err(CliError::Invalid(format!("need minS <= maxS and minT <= maxT, got [{s0}, {s1}] x [{t0}, {t1}]")));
    }
    let ((ds0, ds1), _) = PARAM_DOMAIN;
    if s0 < ds0 || s1 > ds1 || t0 < 0.0 || t1 > T_MAX {
        return Err(CliError::OutOfDomain(format!("[{s0}, {s1}] x [{t0}, {t1}]")));
    }
    let strategy =
        Strategy::from_number(n).ok_or_else(|| CliError::Invalid(format!("strategy must be 1, 2 or 3, got {n}")))?;
    Ok(Invocation { tol, param: ParamRect::from_bounds((s0, s1), (t0, t1)), strategy })
}

// ---------------------------------------------------------------------------
// Transcript
// ---------------------------------------------------------------------------

/// `+6.250000e-02`: sign, six fractional digits, signed two-digit exponent.
pub fn sci(x: f64) -> String {
    let s = format!("{:+.6e}", x);
    let Some((mant, exp)) = s.split_once('e') else { return s };
    let e: i32 = exp.parse().unwrap_or(0);
    format!("{mant}e{}{:02}", if e < 0 { '-' } else { '+' }, e.abs())
}

pub fn fmt_interval(x: &Interval) -> String {
    format!("[{}, {}]", sci(x.lo()), sci(x.hi()))
}

pub fn fmt_box(b: &PBox) -> String {
    format!("{{{},{}}}", fmt_interval(&b[0]), fmt_interval(&b[1]))
}

/// `+8`: integers carry an explicit sign.
fn int(n: usize) -> String {
    format!("+{n}")
}

const RULE: &str = "=========================================================";

/// Lines printed before the search starts.
pub fn header(inv: &Invocation, started: &str) -> String {
    let mut s = String::new();
    let m = inv.param.masses();
    s += "\n============================================================\n";
    s += "========================== pcr4bp ==========================\n";
    let _ = writeln!(s, "Started computations: {started}\n");
    let _ = writeln!(s, "Stopping tolerance in the search: TOL = {}", sci(inv.tol));
    let _ = writeln!(s, "Parameter range for s = {}", fmt_interval(&inv.param.s));
    let _ = writeln!(s, "Parameter range for t = {}", fmt_interval(&inv.param.t));
    s += "  This corresponds to\n";
    let _ = writeln!(s, "  m1 = {}", fmt_interval(&m.m1));
    let _ = writeln!(s, "  m2 = {}", fmt_interval(&m.m2));
    let _ = writeln!(s, "  m3 = {}", fmt_interval(&m.m3));
    s += RULE;
    s += "\n";
    s += match inv.strategy {
        Strategy::Count => "Using strategy #1: Trying to get an exact count valid for\nthe entire parameter region.\n",
        Strategy::NoBifurcation => {
            "Using strategy #2: Trying to prove that no bifurcations\ntake place for the entire parameter region.\n"
        }
        Strategy::Resolve => "Using strategy #3: Doing a full bifurcation analysis for\nthe entire parameter region.\n",
    };
    s += RULE;
    s += "\n";
    s
}

fn unordered_note(s: &mut String) {
    s.push_str("NOTE: we encountered regions in parameter space that\ncorrespond to unordered masses. These were not analyzed.\n");
}

fn outer_block(r: &RunReport, s: &mut String) {
    let l = &r.lists;
    let _ = writeln!(s, "  unordered masses: {}", int(r.unordered_count));
    let _ = writeln!(s, "  |smallList|     : {}", int(l.small.len()));
    let _ = writeln!(s, "  |noList|        : {}", int(l.no.len()));
    let _ = writeln!(s, "  |ndgList|       : {}", int(l.ndg.len()));
    let _ = writeln!(s, "  |ndtList|       : {}", int(l.ndt.len()));
    let _ = writeln!(s, "  small-mass certificates used: {}", int(r.small_mass_certificates));
    if r.unordered_count > 0 {
        unordered_note(s);
    }
}

/// The body of the transcript: regions searched, list sizes and verdict.
pub fn body(r: &RunReport) -> String {
    let mut s = String::new();
    let l = &r.lists;
    match r.strategy {
        Strategy::Count => {
            s += "Searching the full configuration space:\n";
            let _ = writeln!(s, "  C = {}", fmt_box(&r.regions[0].bx));
            s += "After bisection/Krawczyk stage:\n";
            let _ = writeln!(s, "  |smallList|  : {}", int(l.small.len()));
            let _ = writeln!(s, "  |noList|     : {}", int(l.no.len()));
            let _ = writeln!(s, "  |yesList|    : {}", int(l.yes.len()));
            let _ = writeln!(s, "  |tightList|  : {}", int(l.tight.len()));
            let _ = writeln!(s, "  |ndtList|    : {}", int(l.ndt.len()));
            s += RULE;
            s += "\n";
            match r.solution_count {
                Some(n) if r.conclusive => {
                    s += "SUCCESS: the explicit search was conclusive.\n";
                    let _ = writeln!(s, "We found exactly {} solutions.", int(n));
                }
                _ => {
                    s += "FAILURE: the explicit search was inconclusive.\n";
                    let _ = writeln!(
                        s,
                        "We found {} certified solutions and {} unresolved boxes.",
                        int(l.yes.len()),
                        int(l.small.len())
                    );
                }
            }
        }
        Strategy::NoBifurcation => {
            s += "Searching the full configuration space:\n";
            let _ = writeln!(s, "  C = {}", fmt_box(&r.regions[0].bx));
            s += "After bisection/determinant stage:\n";
            outer_block(r, &mut s);
            s += RULE;
            s += "\n";
            if r.conclusive {
                s += "SUCCESS: the implicit search was conclusive.\n";
                s += "There are no bifurcations occurring for these parameters.\n";
            } else {
                s += "FAILURE: the implicit search was inconclusive.\n";
                let _ = writeln!(s, "There are {} unresolved boxes.", int(l.small.len()));
            }
        }
        Strategy::Resolve => {
            s += "Searching the following three outer regions of configuration space:\n";
            for reg in &r.regions {
                let _ = writeln!(s, "  {} = {}", reg.name, fmt_box(&reg.bx));
            }
            s += "After bisection/determinant stage:\n";
            outer_block(r, &mut s);
            s += RULE;
            s += "\n";
            if r.outer_conclusive {
                s += "SUCCESS: the outer bifurcation analysis was conclusive.\n";
                s += "There are no bifurcations occurring for these parameters.\n";
            } else {
                s += "FAILURE: the outer bifurcation analysis was inconclusive.\n";
            }
            s += RULE;
            s += "\n";
            if let Some(inner) = &r.inner_region {
                s += "Searching the single, inner region of configuration space:\n";
                let _ = writeln!(s, "  {} = {}", inner.name, fmt_box(&inner.bx));
            }
            if let Some((lo, hi)) = r.param_tolerances {
                let _ = writeln!(s, "Splitting tolerances for parameters: [{}, {}].", sci(lo), sci(hi));
            }
            s += "After the bisection/bifurcation stage:\n";
            let _ = writeln!(s, "  |smallList|: {}", int(l.inner_small.len()));
            let _ = writeln!(s, "  |s0List|   : {}", int(l.s0.len()));
            let _ = writeln!(s, "  |s1List|   : {}", int(l.s1.len()));
            let _ = writeln!(s, "  |s2List|   : {}", int(l.s2.len()));
            let _ = writeln!(s, "  |s3List|   : {}", int(l.s3_count()));
            let _ = writeln!(s, "  |s111List| : {}", int(l.s111.len()));
            let _ = writeln!(s, "  |s210List| : {}", int(l.s210.len()));
            let _ = writeln!(s, "  |s300List| : {}", int(l.s300.len()));
            if l.s3_count() > 0 {
                s += "There are subregions of C0 with at most three solutions.\n";
            }
            if !l.s2.is_empty() {
                s += "There are subregions of C0 with at most two solutions.\n";
            }
            if !l.s1.is_empty() {
                s += "There are subregions of C0 with at most one solution.\n";
            }
            if !l.s0.is_empty() {
                unordered_note(&mut s);
            }
            if let Some(c) = &r.connectivity {
                let _ = writeln!(
                    s,
                    "Connected components: s1 {}, s111 {}, s210 {}, s300 {}.",
                    int(c.s1_components),
                    int(c.s111_components),
                    int(c.s210_components),
                    int(c.s300_components)
                );
                let yes = |b: bool| if b { "yes" } else { "no" };
                let _ = writeln!(
                    s,
                    "Linkage: s1 meets P1: {}, s111 meets P2: {}, unanchored components: {}.",
                    yes(c.s1_meets_p1),
                    yes(c.s111_meets_p2),
                    int(c.unanchored)
                );
            }
            s += RULE;
            s += "\n";
            if r.inner_conclusive == Some(true) {
                s += "SUCCESS: the inner bifurcation analysis was conclusive.\n";
            } else {
                s += "FAILURE: the inner bifurcation analysis was inconclusive.\n";
            }
        }
    }
    s += RULE;
    s += "\n";
    s
}

pub fn footer(ended: &str, seconds: f64) -> String {
    format!("Ended computations: {ended}\nWall time: {seconds:.3} s\n{RULE}\n")
}

pub fn timestamp() -> String {
    chrono::Local::now().format("%a %b %e %H:%M:%S %Y").to_string()
}

pub fn audit_transcript(rows: &[AuditRow]) -> String {
    let mut s = pcr4bp_core::small_masses::audit_table(rows);
    let bad = rows.iter().filter(|r| !r.ok()).count();
    if bad == 0 {
        s += "All reproduced constants are within tolerance of the reference values.\n";
    } else {
        let _ = writeln!(s, "{bad} constants fall outside tolerance.");
    }
    s
}

// ---------------------------------------------------------------------------
// Export
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct JsonDocument<'a> {
    schema: &'static str,
    version: u32,
    #[serde(flatten)]
    report: &'a RunReport,
}

pub fn to_json(report: &RunReport) -> Result<String, serde_json::Error> {
    serde_json::to_string_pretty(&JsonDocument { schema: "pcr4bp-report", version: SCHEMA_VERSION, report })
}

pub fn write_json(report: &RunReport, path: &Path) -> Result<(), CliError> {
    let text = to_json(report).map_err(|e| CliError::Encode { path: path.into(), message: e.to_string() })?;
    std::fs::write(path, text).map_err(|source| CliError::Io { path: path.into(), source })
}

/// One CSV row: a phase box (absent for parameter-only lists) and a
/// parameter rectangle. Floats are written in shortest round-trip form.
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct CsvRow {
    pub version: u32,
    pub list: String,
    pub index: usize,
    pub r_lo: Option<f64>,
    pub r_hi: Option<f64>,
    pub phi_lo: Option<f64>,
    pub phi_hi: Option<f64>,
    pub s_lo: f64,
    pub s_hi: f64,
    pub t_lo: f64,
    pub t_hi: f64,
}

fn box_rows(name: &str, l: &BoxList, out: &mut Vec<CsvRow>) {
    for (i, rec) in l.records.iter().enumerate() {
        out.push(CsvRow {
            version: SCHEMA_VERSION,
            list: name.into(),
            index: i,
            r_lo: Some(rec.phase[0].lo()),
            r_hi: Some(rec.phase[0].hi()),
            phi_lo: Some(rec.phase[1].lo()),
            phi_hi: Some(rec.phase[1].hi()),
            s_lo: rec.param.s.lo(),
            s_hi: rec.param.s.hi(),
            t_lo: rec.param.t.lo(),
            t_hi: rec.param.t.hi(),
        });
    }
}

fn param_rows(name: &str, l: &ParamList, out: &mut Vec<CsvRow>) {
    for (i, rec) in l.records.iter().enumerate() {
        out.push(CsvRow {
            version: SCHEMA_VERSION,
            list: name.into(),
            index: i,
            r_lo: None,
            r_hi: None,
            phi_lo: None,
            phi_hi: None,
            s_lo: rec.param.s.lo(),
            s_hi: rec.param.s.hi(),
            t_lo: rec.param.t.lo(),
            t_hi: rec.param.t.hi(),
        });
    }
}

/// Every stored record of every list, in list order.
pub fn csv_rows(report: &RunReport) -> Vec<CsvRow> {
    let l = &report.lists;
    let mut out = Vec::new();
    for (name, list) in
        [("small", &l.small), ("no", &l.no), ("yes", &l.yes), ("tight", &l.tight), ("ndt", &l.ndt), ("ndg", &l.ndg)]
    {
        box_rows(name, list, &mut out);
    }
    for (name, list) in [
        ("inner_small", &l.inner_small),
        ("s0", &l.s0),
        ("s1", &l.s1),
        ("s2", &l.s2),
        ("s111", &l.s111),
        ("s210", &l.s210),
        ("s300", &l.s300),
    ] {
        param_rows(name, list, &mut out);
    }
    out
}

pub fn write_csv(report: &RunReport, path: &Path) -> Result<(), CliError> {
    let io = |source: std::io::Error| CliError::Io { path: path.into(), source };
    let mut w =
        csv::Writer::from_path(path).map_err(|e| CliError::Encode { path: path.into(), message: e.to_string() })?;
    for row in csv_rows(report) {
        w.serialize(row).map_err(|e| CliError::Encode { path: path.into(), message: e.to_string() })?;
    }
    w.flush().map_err(io)
}

/// Runs an invocation end to end; returns the transcript and exit code.
pub fn run(args: &Args) -> Result<(String, i32), CliError> {
    if args.constants_audit {
        let rows = pcr4bp_core::small_masses::constants_audit()
            .map_err(|e| CliError::Invalid(format!("constants audit failed: {e}")))?;
        let ok = rows.iter().all(AuditRow::ok);
        return Ok((audit_transcript(&rows), if ok { EXIT_CONCLUSIVE } else { EXIT_INCONCLUSIVE }));
    }
    let inv = validate(args)?;
    let opts = pcr4bp_core::search::SearchOptions::new(inv.tol);
    let mut text = header(&inv, &timestamp());
    let clock = std::time::Instant::now();
    let report = pcr4bp_core::search::run_strategy(inv.strategy, &inv.param, &opts);
    text += &body(&report);
    text += &footer(&timestamp(), clock.elapsed().as_secs_f64());
    if let Some(p) = &args.json {
        write_json(&report, p)?;
    }
    if let Some(p) = &args.csv {
        write_csv(&report, p)?;
    }
    Ok((text, if report.conclusive { EXIT_CONCLUSIVE } else { EXIT_INCONCLUSIVE }))
}
