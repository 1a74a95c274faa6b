//! The remainder term
//! `r_n = (1/N^2) sum_{i=1}^{N-1} lambda_i lambda_{N-i}`
//! over the sorted nonempty spectrum, i.e. the minimum of
//! `(1/N^2) sum_S lambda_S lambda_{pi(S)}` over permutations `pi`.

mod birkhoff;

use std::f64::consts::{FRAC_PI_2, LN_2};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;
use statrs::function::gamma::ln_gamma;

pub use birkhoff::{birkhoff_sanity, sinkhorn_balance, BirkhoffReport, SINKHORN_MAX_SWEEPS, SINKHORN_TOL};

use crate::combinatorics::STREAM_CAP;
use crate::error::{check_cap, Error, Result};
use crate::exact::ratio_to_f64;
use crate::spectrum::{class_levels, ln_mu, spectrum_summary, Block};

/// Pairs the expanded multiset described by `blocks` against its reverse and
/// returns `(1/N^2) sum_i lambda_i lambda_{N-i}`, with `N = 2^n`.
///
/// Position `p` from the top meets position `p` from the bottom, so the sum
/// is a merge of the block list with its reversal; each step consumes the
/// overlap of the two current blocks. The multiset is never materialized.
pub fn rearrangement_min_pairing(n: usize, blocks: &[Block]) -> Result<BigRational> {
    let size = BigInt::one() << n;
    let total: BigInt = blocks.iter().map(|b| &b.multiplicity).sum();
    if total != &size - 1 {
        return Err(Error::Integrity(format!(
            "block multiplicities sum to {total}, expected 2^{n} - 1"
        )));
    }
    if blocks.iter().any(|b| !b.multiplicity.is_positive()) {
        return Err(Error::Integrity("block with non-positive multiplicity".into()));
    }
    if blocks.windows(2).any(|w| w[0].value <= w[1].value) {
        return Err(Error::Integrity("blocks not strictly descending".into()));
    }

    let mut acc = BigInt::zero();
    let (mut i, mut j) = (0usize, blocks.len() - 1);
    let mut rem_top = blocks[0].multiplicity.clone();
    let mut rem_bottom = blocks[j].multiplicity.clone();
    loop {
        let take = if rem_top < rem_bottom { rem_top.clone() } else { rem_bottom.clone() };
        acc += &blocks[i].value * &blocks[j].value * &take;
        rem_top -= &take;
        rem_bottom -= &take;
        if rem_top.is_zero() {
            i += 1;
            if i == blocks.len() {
                break;
            }
            rem_top = blocks[i].multiplicity.clone();
        }
        if rem_bottom.is_zero() {
            if j == 0 {
                break;
            }
            j -= 1;
            rem_bottom = blocks[j].multiplicity.clone();
        }
    }
    Ok(BigRational::new(acc, &size * &size))
}

/// Exact `r_n` from the sorted spectrum.
pub fn remainder_exact(n: usize) -> Result<BigRational> {
    check_cap("exact remainder", n, STREAM_CAP)?;
    let table = spectrum_summary(n)?;
    rearrangement_min_pairing(n, table.blocks())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FloatRoute {
    /// Class values and counts from log-gamma, `n = 4m` only.
    LogBeta,
    /// `n` not divisible by 4: the exact value rounded to `f64`.
    ExactDowncast,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FloatRemainder {
    pub value: f64,
    pub route: FloatRoute,
}

fn ln_binomial(n: usize, k: usize) -> f64 {
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

fn log_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// `ln(e^a - e^b)` for `a > b`.
fn log_sub(a: f64, b: f64) -> f64 {
    a + (-(b - a).exp()).ln_1p()
}

/// One signed class at `n = 4m`, in log form.
#[derive(Debug, Clone, Copy)]
struct LogClass {
    sign: f64,
    ln_abs: f64,
    ln_count: f64,
}

fn log_classes(m: usize) -> Vec<LogClass> {
    let n = 4 * m;
    let mut classes: Vec<LogClass> = (0..=m)
        .map(|j| LogClass {
            sign: if j % 2 == 0 { 1.0 } else { -1.0 },
            ln_abs: ln_mu(m, j),
            ln_count: class_levels(m, j)
                .into_iter()
                .map(|s| ln_binomial(n, s))
                .fold(f64::NEG_INFINITY, log_add),
        })
        .collect();
    // positives by size descending, then negatives by size ascending
    classes.sort_by(|a, b| match (a.sign > 0.0, b.sign > 0.0) {
        (true, false) => std::cmp::Ordering::Less,
        (false, true) => std::cmp::Ordering::Greater,
        (true, true) => b.ln_abs.total_cmp(&a.ln_abs),
        (false, false) => a.ln_abs.total_cmp(&b.ln_abs),
    });
    classes
}

/// Float `r_n`. For `n = 4m` this is an independent log-space route: class
/// values from the Beta form, class sizes from log-gamma, and the same
/// top/bottom merge as [`rearrangement_min_pairing`] done on log-counts.
pub fn remainder_float(n: usize) -> Result<FloatRemainder> {
    check_cap("float remainder", n, STREAM_CAP)?;
    if n == 0 || n % 4 != 0 {
        let exact = remainder_exact(n)?;
        return Ok(FloatRemainder {
            value: ratio_to_f64(&exact),
            route: FloatRoute::ExactDowncast,
        });
    }
    let classes = log_classes(n / 4);
    let ln_scale = 2.0 * n as f64 * LN_2;
    let term = |a: &LogClass, b: &LogClass, ln_len: f64| {
        a.sign * b.sign * (a.ln_abs + b.ln_abs + ln_len - ln_scale).exp()
    };
    // Pairing a sorted list with its reversal is symmetric about the middle,
    // so only the first half is walked and doubled. Walking past the middle
    // would subtract nearly equal log-counts and lose all precision.
    let (mut i, mut j) = (0usize, classes.len() - 1);
    let mut rem_top = classes[0].ln_count;
    let mut rem_bottom = classes[j].ln_count;
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    let mut add = |x: f64| {
        // Neumaier summation
        let t = sum + x;
        comp += if sum.abs() >= x.abs() { (sum - t) + x } else { (x - t) + sum };
        sum = t;
    };
    while i <= j {
        if i == j {
            // rem_top + rem_bottom - count is the self-paired middle stretch
            let total = log_add(rem_top, rem_bottom);
            let c = classes[i].ln_count;
            if total > c {
                add(term(&classes[i], &classes[i], log_sub(total, c)));
            }
            break;
        }
        add(2.0 * term(&classes[i], &classes[j], rem_top.min(rem_bottom)));
        let tie = (rem_top - rem_bottom).abs() <= 1e-12;
        let top_done = tie || rem_top < rem_bottom;
        let bottom_done = tie || rem_bottom < rem_top;
        if !top_done {
            rem_top = log_sub(rem_top, rem_bottom);
        }
        if !bottom_done {
            rem_bottom = log_sub(rem_bottom, rem_top);
        }
        if top_done {
            i += 1;
            rem_top = classes[i].ln_count;
        }
        if bottom_done {
            j -= 1;
            rem_bottom = classes[j].ln_count;
        }
    }
    Ok(FloatRemainder {
        value: sum + comp,
        route: FloatRoute::LogBeta,
    })
}

/// Upper bound `(2/N^2) sum_k n_{2k+1} mu_{2k+1} mu_{2k+3}` on `-r_n`, as a
/// float diagnostic at `n = 4m`. The `k = m` term needs `mu_{2m+3}`, which
/// does not exist; it is dropped and `truncated` is set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChainDiagnostic {
    pub value: f64,
    pub truncated: bool,
}

pub fn chain_diagnostic(m: usize) -> Result<ChainDiagnostic> {
    if m == 0 {
        return Err(Error::Argument("chain diagnostic needs m >= 1".into()));
    }
    let n = 4 * m;
    check_cap("chain diagnostic", n, STREAM_CAP)?;
    let ln_scale = 2.0 * n as f64 * LN_2;
    let value = (0..m)
        .map(|k| {
            let ln_count = class_levels(m, k)
                .into_iter()
                .map(|s| ln_binomial(n, s))
                .fold(f64::NEG_INFINITY, log_add);
            (LN_2 + ln_count + ln_mu(m, k) + ln_mu(m, k + 1) - ln_scale).exp()
        })
        .sum();
    Ok(ChainDiagnostic {
        value,
        truncated: true,
    })
}

/// `sum_{k=0}^{m} (1/(2m+1)) / sqrt(x_k (1 - x_k))`, `x_k = (2k+2)/(4m+2)`,
/// a Riemann sum for `int_0^{1/2} dx / sqrt(x(1-x)) = pi/2`.
pub fn riemann_sum(m: usize) -> f64 {
    let width = 1.0 / (2 * m + 1) as f64;
    (0..=m)
        .map(|k| {
            let x = (2 * k + 2) as f64 / (4 * m + 2) as f64;
            width / (x * (1.0 - x)).sqrt()
        })
        .sum()
}

/// Riemann-sum limit.
pub const RIEMANN_LIMIT: f64 = FRAC_PI_2;

#[derive(Debug, Clone)]
pub struct RemainderReport {
    pub n: usize,
    pub r_exact: BigRational,
    pub r_float: f64,
    pub float_route: FloatRoute,
    pub sqrt_n_times_r: f64,
    /// Max of `sqrt(n) |r_n|` over the scan this report belongs to.
    pub envelope_constant: f64,
    /// Present when `n = 4m`.
    pub chain: Option<ChainDiagnostic>,
    pub riemann_sum: Option<f64>,
}

impl RemainderReport {
    pub fn new(n: usize) -> Result<Self> {
        let r_exact = remainder_exact(n)?;
        let float = remainder_float(n)?;
        let exact_f = ratio_to_f64(&r_exact);
        let multiple_of_four = n % 4 == 0;
        Ok(RemainderReport {
            n,
            sqrt_n_times_r: (n as f64).sqrt() * exact_f,
            r_exact,
            r_float: float.value,
            float_route: float.route,
            envelope_constant: f64::NAN,
            chain: if multiple_of_four { Some(chain_diagnostic(n / 4)?) } else { None },
            riemann_sum: multiple_of_four.then(|| riemann_sum(n / 4)),
        })
    }

    pub fn riemann_gap(&self) -> Option<f64> {
        self.riemann_sum.map(|s| (s - RIEMANN_LIMIT).abs())
    }

    /// Relative gap between the float route and the exact value.
    pub fn float_relative_error(&self) -> f64 {
        let e = ratio_to_f64(&self.r_exact);
        if e == 0.0 {
            self.r_float.abs()
        } else {
            ((self.r_float - e) / e).abs()
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScanReport {
    pub reports: Vec<RemainderReport>,
    pub envelope_constant: f64,
}

/// `r_n` for each requested `n`, in input order.
pub fn asymptotic_scan(n_values: &[usize]) -> Result<ScanReport> {
    for &n in n_values {
        check_cap("remainder scan", n, STREAM_CAP)?;
        if n == 0 {
            return Err(Error::Argument("scan entries must be >= 1".into()));
        }
    }
    let mut reports: Vec<RemainderReport> = n_values
        .par_iter()
        .map(|&n| RemainderReport::new(n))
        .collect::<Result<_>>()?;
    let envelope_constant = reports
        .iter()
        .map(|r| r.sqrt_n_times_r.abs())
        .fold(0.0, f64::max);
    for r in &mut reports {
        r.envelope_constant = envelope_constant;
    }
    Ok(ScanReport {
        reports,
        envelope_constant,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    fn block(v: i64, m: i64) -> Block {
        Block {
            value: v.into(),
            multiplicity: m.into(),
            levels: vec![],
        }
    }

    #[test]
    fn pairing_examples() {
        assert_eq!(rearrangement_min_pairing(2, &[block(1, 2), block(-1, 1)]).unwrap(), q(-1, 16));
        assert_eq!(rearrangement_min_pairing(4, &[block(3, 5), block(-1, 10)]).unwrap(), q(-25, 256));
        assert_eq!(rearrangement_min_pairing(1, &[block(1, 1)]).unwrap(), q(1, 4));
    }

    #[test]
    fn pairing_rejects_bad_blocks() {
        assert!(matches!(
            rearrangement_min_pairing(2, &[block(1, 2), block(-1, 2)]),
            Err(Error::Integrity(_))
        ));
        assert!(rearrangement_min_pairing(2, &[block(-1, 1), block(1, 2)]).is_err());
    }

    #[test]
    fn exact_small() {
        assert_eq!(remainder_exact(1).unwrap(), q(1, 4));
        assert_eq!(remainder_exact(2).unwrap(), q(-1, 16));
        assert_eq!(remainder_exact(3).unwrap(), q(-8, 64));
        assert_eq!(remainder_exact(4).unwrap(), q(-25, 256));
    }

    #[test]
    fn float_small() {
        let f = remainder_float(4).unwrap();
        assert_eq!(f.route, FloatRoute::LogBeta);
        assert!((f.value + 0.09765625).abs() < 1e-12);
        let g = remainder_float(6).unwrap();
        assert_eq!(g.route, FloatRoute::ExactDowncast);
    }

    #[test]
    fn float_matches_exact_n64() {
        let e = ratio_to_f64(&remainder_exact(64).unwrap());
        let f = remainder_float(64).unwrap().value;
        assert!(((f - e) / e).abs() < 1e-9, "{f} vs {e}");
    }

    #[test]
    fn log_space_helpers() {
        assert!((log_add(2f64.ln(), 3f64.ln()) - 5f64.ln()).abs() < 1e-15);
        assert!((log_sub(5f64.ln(), 3f64.ln()) - 2f64.ln()).abs() < 1e-15);
        assert_eq!(log_add(f64::NEG_INFINITY, 1.0), 1.0);
    }

    #[test]
    fn riemann_sum_approaches_limit() {
        assert!(riemann_sum(4096) > riemann_sum(256));
        assert!((riemann_sum(1 << 16) - RIEMANN_LIMIT).abs() < 0.005);
    }

    #[test]
    fn chain_diagnostic_covers_remainder_n4() {
        let d = chain_diagnostic(1).unwrap();
        // Only the k = 0 term survives: 2 * 5 * 3 * 1 / 256.
        assert!((d.value - 30.0 / 256.0).abs() < 1e-12);
        assert!(d.truncated);
        assert!(d.value >= 25.0 / 256.0);
    }

    #[test]
    fn scan_sets_envelope() {
        let s = asymptotic_scan(&[4, 8, 16]).unwrap();
        assert_eq!(s.reports.len(), 3);
        assert!(s.reports.iter().all(|r| r.envelope_constant == s.envelope_constant));
        let max = s.reports.iter().map(|r| r.sqrt_n_times_r.abs()).fold(0.0, f64::max);
        assert_eq!(max, s.envelope_constant);
        assert!(asymptotic_scan(&[STREAM_CAP + 1]).is_err());
    }
}
