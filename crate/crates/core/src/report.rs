//! CSV and JSON shapes shared by the command-line tool. CSV uses `,` and
//! `\n` and always starts with a header row.

use std::fmt::Write as _;
use std::f64::consts::LN_10;

use num_bigint::BigInt;
use num_traits::Signed;
use serde::Serialize;

use crate::exact::{format_float, ln_abs, to_f64, Fraction};
use crate::remainder::{ChainDiagnostic, FloatRoute, RemainderReport, ScanReport};
use crate::spectrum::EigenvalueTable;

pub const SPECTRUM_HEADER: &str = "n,s,multiplicity,lambda_exact,lambda_float";
pub const REMAINDER_HEADER: &str = "n,r_num,r_den,r_float,sqrtn_r";

/// Float rendering of an integer that may overflow `f64`.
pub fn format_big(x: &BigInt) -> String {
    let f = to_f64(x);
    if f.is_finite() {
        return format_float(f);
    }
    let log10 = ln_abs(x) / LN_10;
    let exp = log10.floor();
    let mantissa = 10f64.powf(log10 - exp);
    let sign = if x.is_negative() { "-" } else { "" };
    format!("{sign}{mantissa:.15}e{exp}")
}

/// One row per level `s = 0..=n` for each table.
pub fn spectrum_csv<'a>(tables: impl IntoIterator<Item = &'a EigenvalueTable>) -> String {
    let mut out = String::from(SPECTRUM_HEADER);
    out.push('\n');
    for t in tables {
        for s in 0..=t.n() {
            let l = t.lambda(s);
            let _ = writeln!(out, "{},{s},{},{l},{}", t.n(), t.multiplicity(s), format_big(l));
        }
    }
    out
}

pub fn remainder_csv(scan: &ScanReport) -> String {
    let mut out = String::from(REMAINDER_HEADER);
    out.push('\n');
    for r in &scan.reports {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.n,
            r.r_exact.numer(),
            r.r_exact.denom(),
            format_float(r.r_float),
            format_float(r.sqrt_n_times_r)
        );
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct RemainderRecord {
    pub n: usize,
    pub r: Fraction,
    pub r_float: f64,
    pub float_route: FloatRoute,
    pub sqrtn_r: f64,
    pub chain: Option<ChainDiagnostic>,
    pub riemann_sum: Option<f64>,
    pub riemann_gap: Option<f64>,
}

impl From<&RemainderReport> for RemainderRecord {
    fn from(r: &RemainderReport) -> Self {
        RemainderRecord {
            n: r.n,
            r: Fraction::from(&r.r_exact),
            r_float: r.r_float,
            float_route: r.float_route,
            sqrtn_r: r.sqrt_n_times_r,
            chain: r.chain,
            riemann_sum: r.riemann_sum,
            riemann_gap: r.riemann_gap(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RemainderSummary {
    pub n_values: Vec<usize>,
    pub envelope_constant: f64,
    pub reports: Vec<RemainderRecord>,
}

impl From<&ScanReport> for RemainderSummary {
    fn from(scan: &ScanReport) -> Self {
        RemainderSummary {
            n_values: scan.reports.iter().map(|r| r.n).collect(),
            envelope_constant: scan.envelope_constant,
            reports: scan.reports.iter().map(RemainderRecord::from).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelRecord {
    pub s: usize,
    pub multiplicity: String,
    pub lambda_exact: String,
    pub lambda_float: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumRecord {
    pub n: usize,
    pub trivial_eigenvalue: String,
    pub levels: Vec<LevelRecord>,
}

impl From<&EigenvalueTable> for SpectrumRecord {
    fn from(t: &EigenvalueTable) -> Self {
        SpectrumRecord {
            n: t.n(),
            trivial_eigenvalue: t.trivial_eigenvalue().to_string(),
            levels: (0..=t.n())
                .map(|s| LevelRecord {
                    s,
                    multiplicity: t.multiplicity(s).to_string(),
                    lambda_exact: t.lambda(s).to_string(),
                    lambda_float: format_big(t.lambda(s)),
                })
                .collect(),
        }
    }
}
