use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::remainder_exact;
use crate::error::{check_cap, Error, Result};
use crate::exact::ratio_to_f64;
use crate::spectrum::spectrum_summary;

pub const SINKHORN_TOL: f64 = 1e-10;
pub const SINKHORN_MAX_SWEEPS: usize = 10_000;
const BIRKHOFF_CAP: usize = 10;
const PERMUTATION_TRIALS: usize = 64;
const OBJECTIVE_SLACK: f64 = 1e-9;

/// Alternately rescales rows and columns of the positive `dim x dim`
/// row-major matrix until every row sum is within `tol` of 1 right after a
/// column pass. Returns the number of sweeps, or `None` on non-convergence.
pub fn sinkhorn_balance(a: &mut [f64], dim: usize, tol: f64, max_sweeps: usize) -> Option<usize> {
    assert_eq!(a.len(), dim * dim);
    let mut col = vec![0.0f64; dim];
    for sweep in 1..=max_sweeps {
        for row in a.chunks_exact_mut(dim) {
            let s: f64 = row.iter().sum();
            row.iter_mut().for_each(|x| *x /= s);
        }
        col.iter_mut().for_each(|c| *c = 0.0);
        for row in a.chunks_exact(dim) {
            col.iter_mut().zip(row).for_each(|(c, x)| *c += x);
        }
        for row in a.chunks_exact_mut(dim) {
            row.iter_mut().zip(&col).for_each(|(x, c)| *x /= c);
        }
        let worst = a
            .chunks_exact(dim)
            .map(|row| (row.iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max);
        if worst <= tol {
            return Some(sweep);
        }
    }
    None
}

#[derive(Debug, Clone, Serialize)]
pub struct BirkhoffReport {
    pub n: usize,
    pub trials: usize,
    pub accepted: usize,
    /// Samples where balancing did not converge.
    pub discarded: usize,
    pub max_sweeps_used: usize,
    pub remainder: f64,
    /// Smallest `(1/N^2) sum lambda_S lambda_T D[S][T]` over balanced samples.
    pub min_objective: f64,
    pub permutation_trials: usize,
    #[serde(skip)]
    pub permutation_min: BigRational,
    /// `(1/N^2) sum lambda_S^2`, the largest pairing.
    #[serde(skip)]
    pub identity_pairing: BigRational,
}

/// Samples points of the Birkhoff polytope on the nonempty sets and checks
/// that none beats the rearrangement minimum `r_n`.
///
/// Random positive matrices with log-uniform entries are balanced by
/// Sinkhorn; each must give an objective `>= r_n - 1e-9`. Random permutation
/// pairings are checked exactly.
pub fn birkhoff_sanity(n: usize, trials: usize, seed: u64) -> Result<BirkhoffReport> {
    check_cap("Birkhoff sampling", n, BIRKHOFF_CAP)?;
    if n == 0 {
        return Err(Error::Argument("n must be >= 1".into()));
    }
    let table = spectrum_summary(n)?;
    let lambda: Vec<i64> = (1usize..1 << n)
        .map(|mask| {
            table
                .lambda(mask.count_ones() as usize)
                .to_i64()
                .expect("eigenvalues fit i64 for n <= 10")
        })
        .collect();
    let dim = lambda.len();
    let size = BigInt::one() << n;
    let n2 = &size * &size;
    let n2f = ((1u64 << n) as f64).powi(2);
    let r_exact = remainder_exact(n)?;
    let r = ratio_to_f64(&r_exact);
    let lf: Vec<f64> = lambda.iter().map(|&v| v as f64).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = BirkhoffReport {
        n,
        trials,
        accepted: 0,
        discarded: 0,
        max_sweeps_used: 0,
        remainder: r,
        min_objective: f64::INFINITY,
        permutation_trials: PERMUTATION_TRIALS,
        permutation_min: BigRational::new(BigInt::from(i64::MAX), BigInt::one()),
        identity_pairing: BigRational::new(lambda.iter().map(|&v| i128::from(v * v)).sum::<i128>().into(), n2.clone()),
    };

    let mut d = vec![0.0f64; dim * dim];
    for _ in 0..trials {
        d.iter_mut().for_each(|x| *x = (4.0 * (rng.gen::<f64>() - 0.5)).exp());
        match sinkhorn_balance(&mut d, dim, SINKHORN_TOL, SINKHORN_MAX_SWEEPS) {
            Some(sweeps) => {
                report.accepted += 1;
                report.max_sweeps_used = report.max_sweeps_used.max(sweeps);
            }
            None => {
                report.discarded += 1;
                continue;
            }
        }
        let objective: f64 = d
            .chunks_exact(dim)
            .zip(&lf)
            .map(|(row, &ls)| ls * row.iter().zip(&lf).map(|(x, lt)| x * lt).sum::<f64>())
            .sum::<f64>()
            / n2f;
        if objective < r - OBJECTIVE_SLACK {
            return Err(Error::Integrity(format!(
                "doubly stochastic sample reaches {objective} below r_n = {r}"
            )));
        }
        report.min_objective = report.min_objective.min(objective);
    }

    let mut perm: Vec<usize> = (0..dim).collect();
    for _ in 0..PERMUTATION_TRIALS {
        perm.shuffle(&mut rng);
        let s: i128 = perm
            .iter()
            .enumerate()
            .map(|(i, &p)| i128::from(lambda[i] * lambda[p]))
            .sum();
        let value = BigRational::new(s.into(), n2.clone());
        if value < r_exact {
            return Err(Error::Integrity(format!(
                "permutation pairing {value} below r_n = {r_exact}"
            )));
        }
        if value < report.permutation_min {
            report.permutation_min = value;
        }
    }
    if report.identity_pairing < r_exact {
        return Err(Error::Integrity("identity pairing below r_n".into()));
    }
    Ok(report)
}
