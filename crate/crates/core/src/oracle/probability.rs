use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bijection::{Bijection, Family, SearchTrace};
use super::transform::{eigenvalues_via_wht, wht_in_place};
use crate::error::{check_cap, Error, Result};
use crate::exact::Fraction;
use crate::remainder::remainder_exact;
use crate::spectrum::spectrum_summary;

/// Largest `n` for the direct pair count.
pub const DIRECT_CAP: usize = 13;
/// Largest `n` for dense `N x N` work in the character basis.
pub const DENSE_CAP: usize = 10;

const TOL: f64 = 1e-9;

/// Ordered pairs `(i, j)`, diagonal included, with both `i, j` and
/// `f(i), f(j)` at Hamming distance at most `floor(n/2)`.
pub fn joint_count(f: &Bijection) -> u64 {
    let h = (f.n() / 2) as u32;
    let map = f.map();
    let size = map.len();
    let off_diagonal: u64 = (0..size)
        .into_par_iter()
        .map(|i| {
            let fi = map[i];
            let mut c = 0u64;
            for j in (i + 1)..size {
                if ((i ^ j) as u32).count_ones() <= h && (fi ^ map[j]).count_ones() <= h {
                    c += 1;
                }
            }
            c
        })
        .sum();
    2 * off_diagonal + size as u64
}

/// `Pr[<x,y> >= 0 and <f(x),f(y)> >= 0]` over independent uniform `x, y`.
pub fn joint_probability(f: &Bijection) -> Result<BigRational> {
    check_cap("direct joint probability", f.n(), DIRECT_CAP)?;
    let size = BigInt::from(f.len());
    Ok(BigRational::new(BigInt::from(joint_count(f)), &size * &size))
}

/// `W = N * U^T P U`, i.e. `W[S][T] = sum_x chi_S(x) chi_T(f(x))`, row-major.
pub fn conjugated_characters(f: &Bijection) -> Result<Vec<i32>> {
    check_cap("character-basis conjugation", f.n(), DENSE_CAP)?;
    let size = f.len();
    let mut w = vec![0i32; size * size];
    w.par_chunks_mut(size).enumerate().try_for_each(|(s, row)| {
        for x in 0..size {
            let chi = if (s & x).count_ones() % 2 == 0 { 1 } else { -1 };
            row[f.image(x)] = chi;
        }
        wht_in_place(row)
    })?;
    Ok(w)
}

/// `(1/N^2) sum_{S,T} lambda_S lambda_T R[S][T]^2` with `R = U^T P U`.
pub fn joint_probability_spectral(f: &Bijection) -> Result<f64> {
    let w = conjugated_characters(f)?;
    let lambda: Vec<f64> = eigenvalues_via_wht(f.n())?.into_iter().map(|v| v as f64).collect();
    let size = f.len();
    let nf = size as f64;
    let total: f64 = w
        .par_chunks(size)
        .zip(lambda.par_iter())
        .map(|(row, &ls)| {
            let inner: f64 = row
                .iter()
                .zip(&lambda)
                .map(|(&v, &lt)| {
                    let r = f64::from(v) / nf;
                    lt * r * r
                })
                .sum();
            ls * inner
        })
        .sum();
    Ok(total / (nf * nf))
}

/// Worst deviations seen while checking the structure of `R = U^T P U`.
#[derive(Debug, Clone, Serialize)]
pub struct ConjugationReport {
    pub n: usize,
    pub r_empty_empty: f64,
    pub max_abs_empty_row: f64,
    pub max_abs_empty_col: f64,
    pub max_row_sum_error: f64,
    pub max_col_sum_error: f64,
    pub min_entry: f64,
}

/// Checks `R[0][0] = 1`, `R[0][T] = R[T][0] = 0` and that `B = R o R` is
/// doubly stochastic, all within `1e-9`.
pub fn conjugation_structure_report(f: &Bijection) -> Result<ConjugationReport> {
    let w = conjugated_characters(f)?;
    let size = f.len();
    let nf = size as f64;
    let r = |s: usize, t: usize| f64::from(w[s * size + t]) / nf;

    let r00 = r(0, 0);
    if (r00 - 1.0).abs() > TOL {
        return Err(Error::Integrity(format!("R[empty][empty] = {r00}, expected 1")));
    }
    let mut report = ConjugationReport {
        n: f.n(),
        r_empty_empty: r00,
        max_abs_empty_row: 0.0,
        max_abs_empty_col: 0.0,
        max_row_sum_error: 0.0,
        max_col_sum_error: 0.0,
        min_entry: f64::INFINITY,
    };
    for t in 1..size {
        let (row, col) = (r(0, t).abs(), r(t, 0).abs());
        if row > TOL {
            return Err(Error::Integrity(format!("R[empty][{t}] = {row}, expected 0")));
        }
        if col > TOL {
            return Err(Error::Integrity(format!("R[{t}][empty] = {col}, expected 0")));
        }
        report.max_abs_empty_row = report.max_abs_empty_row.max(row);
        report.max_abs_empty_col = report.max_abs_empty_col.max(col);
    }
    let mut col_sums = vec![0.0f64; size];
    for s in 0..size {
        let mut row_sum = 0.0;
        for (t, cs) in col_sums.iter_mut().enumerate() {
            let b = r(s, t) * r(s, t);
            report.min_entry = report.min_entry.min(b);
            row_sum += b;
            *cs += b;
        }
        let err = (row_sum - 1.0).abs();
        if err > TOL {
            return Err(Error::Integrity(format!("row {s} of R o R sums to {row_sum}")));
        }
        report.max_row_sum_error = report.max_row_sum_error.max(err);
    }
    for (t, cs) in col_sums.iter().enumerate() {
        let err = (cs - 1.0).abs();
        if err > TOL {
            return Err(Error::Integrity(format!("column {t} of R o R sums to {cs}")));
        }
        report.max_col_sum_error = report.max_col_sum_error.max(err);
    }
    if report.min_entry < -1e-12 {
        return Err(Error::Integrity(format!("R o R has entry {}", report.min_entry)));
    }
    Ok(report)
}

/// `lambda_empty^2 / N^2 + r_n`, the exact lower bound every bijection meets.
pub fn chain_bound(n: usize) -> Result<BigRational> {
    let table = spectrum_summary(n)?;
    let size = table.size();
    let lead = BigRational::new(
        table.trivial_eigenvalue() * table.trivial_eigenvalue(),
        &size * &size,
    );
    Ok(lead + remainder_exact(n)?)
}

/// A bijection with its exact joint probability and distance to the bound.
#[derive(Debug, Clone)]
pub struct BijectionProbe {
    pub bijection: Bijection,
    pub probability: BigRational,
    /// Character-basis route, present for `n <= DENSE_CAP`.
    pub spectral_probability: Option<f64>,
    /// `lambda_empty^2 / N^2 + r_n`.
    pub bound: BigRational,
    pub margin: BigRational,
}

impl BijectionProbe {
    pub fn new(bijection: Bijection) -> Result<Self> {
        let n = bijection.n();
        let probability = joint_probability(&bijection)?;
        Self::with_probability(bijection, probability, n <= DENSE_CAP)
    }

    pub(crate) fn with_probability(
        bijection: Bijection,
        probability: BigRational,
        spectral: bool,
    ) -> Result<Self> {
        let n = bijection.n();
        let bound = chain_bound(n)?;
        let margin = &probability - &bound;
        if margin < BigRational::from_integer(0.into()) {
            return Err(Error::Integrity(format!(
                "n = {n}: probability {probability} below bound {bound}"
            )));
        }
        if probability > BigRational::one() {
            return Err(Error::Integrity(format!("probability {probability} exceeds 1")));
        }
        let spectral_probability = if spectral {
            Some(joint_probability_spectral(&bijection)?)
        } else {
            None
        };
        Ok(BijectionProbe {
            bijection,
            probability,
            spectral_probability,
            bound,
            margin,
        })
    }

    /// Wire form. The permutation is included for `n <= 10`, or always when
    /// `emit_permutation` is set.
    pub fn record(&self, emit_permutation: bool) -> ProbeRecord {
        let prov = self.bijection.provenance();
        let include = emit_permutation || self.bijection.n() <= DENSE_CAP;
        ProbeRecord {
            n: self.bijection.n(),
            family: prov.family,
            seed: prov.seed,
            permutation: include.then(|| self.bijection.map().to_vec()),
            probability: Fraction::from(&self.probability),
            bound: Fraction::from(&self.bound),
            margin: Fraction::from(&self.margin),
            trace: prov.trace.clone(),
        }
    }
}

/// JSON form of a probe.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeRecord {
    pub n: usize,
    pub family: Family,
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub permutation: Option<Vec<u32>>,
    pub probability: Fraction,
    pub bound: Fraction,
    pub margin: Fraction,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<SearchTrace>,
}
