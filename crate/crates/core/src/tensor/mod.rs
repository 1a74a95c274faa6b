//! Integral points of the line-stochastic 3-tensor polytope (Latin squares)
//! and the cubic objective `(1/N^3) sum lambda_i lambda_j lambda_L(i,j)`.

mod jm;
mod latin;

pub use latin::{latin_square_enumerate, LatinSquare, LatinSquares, ENUMERATION_CAP, ORDER_CAP};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_cap, Error, Result};
use crate::exact::Fraction;
use crate::remainder::remainder_exact;
use crate::spectrum::EigenvalueTable;
use jm::JmState;

pub const TENSOR_RANK: usize = 3;
pub const R2_SAMPLES: usize = 10_000;
const R2_CAP: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct TensorInstance {
    lambda: Vec<f64>,
    scale: f64,
}

impl TensorInstance {
    pub fn new(lambda: Vec<f64>, scale: f64) -> Result<Self> {
        if lambda.is_empty() {
            return Err(Error::Argument("lambda must be nonempty".into()));
        }
        check_cap("tensor order", lambda.len(), ORDER_CAP)?;
        if !(scale.is_finite() && scale > 0.0) || lambda.iter().any(|x| !x.is_finite()) {
            return Err(Error::Argument("scale must be positive and lambda finite".into()));
        }
        Ok(TensorInstance { lambda, scale })
    }

    /// Expanded nonempty spectrum, optionally preceded by `lambda_empty`,
    /// with divisor `N^3`.
    pub fn from_spectrum(table: &EigenvalueTable, include_empty: bool) -> Result<Self> {
        let n = table.n();
        if n == 0 {
            return Err(Error::Argument("n must be >= 1".into()));
        }
        let order = (1usize << n.min(30)) - usize::from(!include_empty);
        check_cap("tensor order", order, ORDER_CAP)?;
        let mut lambda: Vec<f64> = Vec::with_capacity(order);
        if include_empty {
            lambda.push(table.trivial_eigenvalue().to_f64().expect("small"));
        }
        lambda.extend(table.expanded()?.into_iter().map(|v| v as f64));
        let size = (1u64 << n) as f64;
        Self::new(lambda, size * size * size)
    }

    pub fn order(&self) -> usize {
        self.lambda.len()
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn rank(&self) -> usize {
        TENSOR_RANK
    }

    fn raw(&self, cells: &[u8]) -> f64 {
        let q = self.lambda.len();
        cells
            .chunks_exact(q)
            .zip(&self.lambda)
            .map(|(row, li)| {
                li * row
                    .iter()
                    .zip(&self.lambda)
                    .map(|(&s, lj)| lj * self.lambda[s as usize])
                    .sum::<f64>()
            })
            .sum()
    }
}

pub fn tensor_objective(inst: &TensorInstance, square: &LatinSquare) -> Result<f64> {
    if square.order() != inst.order() {
        return Err(Error::Dimension {
            expected: inst.order(),
            got: square.order(),
        });
    }
    Ok(inst.raw(square.cells()) / inst.scale)
}

/// Minimum of the objective over every Latin square; first minimiser in
/// enumeration order.
pub fn exhaustive_min(inst: &TensorInstance) -> Result<(f64, LatinSquare)> {
    let mut best: Option<(f64, LatinSquare)> = None;
    for sq in latin_square_enumerate(inst.order())? {
        let v = inst.raw(sq.cells());
        if best.as_ref().is_none_or(|(b, _)| v < *b) {
            best = Some((v, sq));
        }
    }
    let (v, sq) = best.expect("at least one square");
    Ok((v / inst.scale, sq))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Move {
    RowSwap,
    ColumnSwap,
    SymbolSwap,
    Intercalate,
    JacobsonMatthews,
}

const MOVES: [Move; 5] = [
    Move::RowSwap,
    Move::ColumnSwap,
    Move::SymbolSwap,
    Move::Intercalate,
    Move::JacobsonMatthews,
];

fn distinct_pair<R: Rng>(rng: &mut R, q: usize) -> (usize, usize) {
    let a = rng.gen_range(0..q);
    let b = rng.gen_range(0..q - 1);
    (a, if b >= a { b + 1 } else { b })
}

/// Applies a random move of kind `mv` in place. Returns false when the move
/// had nothing to do (no intercalate through the chosen cells).
fn propose<R: Rng>(rng: &mut R, q: usize, cells: &mut Vec<u8>, mv: Move) -> bool {
    match mv {
        Move::RowSwap => {
            let (a, b) = distinct_pair(rng, q);
            for c in 0..q {
                cells.swap(a * q + c, b * q + c);
            }
        }
        Move::ColumnSwap => {
            let (a, b) = distinct_pair(rng, q);
            for row in cells.chunks_exact_mut(q) {
                row.swap(a, b);
            }
        }
        Move::SymbolSwap => {
            let (a, b) = distinct_pair(rng, q);
            let (a, b) = (a as u8, b as u8);
            for x in cells.iter_mut() {
                if *x == a {
                    *x = b;
                } else if *x == b {
                    *x = a;
                }
            }
        }
        Move::Intercalate => {
            let (r1, r2) = distinct_pair(rng, q);
            let c1 = rng.gen_range(0..q);
            let (a, b) = (cells[r1 * q + c1], cells[r2 * q + c1]);
            let c2 = (0..q).find(|&c| cells[r1 * q + c] == b).expect("row holds every symbol");
            if cells[r2 * q + c2] != a {
                return false;
            }
            cells[r1 * q + c1] = b;
            cells[r2 * q + c1] = a;
            cells[r1 * q + c2] = a;
            cells[r2 * q + c2] = b;
        }
        Move::JacobsonMatthews => {
            let mut st = JmState::new(q, std::mem::take(cells));
            st.step_to_proper(rng);
            *cells = st.cells;
        }
    }
    true
}

fn random_square<R: Rng>(rng: &mut R, q: usize) -> Vec<u8> {
    let mut st = JmState::new(q, LatinSquare::cyclic(q).expect("order checked").cells().to_vec());
    for _ in 0..q * q * q {
        st.step_to_proper(rng);
    }
    let mut cells = st.cells;
    let mut perm: Vec<u8> = (0..q as u8).collect();
    perm.shuffle(rng);
    cells.iter_mut().for_each(|x| *x = perm[*x as usize]);
    cells
}

fn anneal(inst: &TensorInstance, seed: u64, restart: u64, iters: u64) -> (f64, Vec<u8>) {
    let q = inst.order();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart);
    let mut cur = random_square(&mut rng, q);
    let mut cur_v = inst.raw(&cur);
    let mut best = (cur_v, cur.clone());
    if q < 2 {
        return best;
    }

    // Starting temperature from the typical size of an uphill step.
    let mut ups = Vec::new();
    for _ in 0..64 {
        let mut c = cur.clone();
        let mv = *MOVES.choose(&mut rng).expect("nonempty");
        if propose(&mut rng, q, &mut c, mv) {
            let d = inst.raw(&c) - cur_v;
            if d > 0.0 {
                ups.push(d);
            }
        }
    }
    let t0 = if ups.is_empty() {
        1.0
    } else {
        ups.iter().sum::<f64>() / ups.len() as f64
    };
    let t_end = t0 * 1e-4;

    let mut cand = cur.clone();
    for k in 0..iters {
        let t = t0 * (t_end / t0).powf(k as f64 / iters.max(1) as f64);
        cand.clone_from(&cur);
        let mv = *MOVES.choose(&mut rng).expect("nonempty");
        if !propose(&mut rng, q, &mut cand, mv) {
            continue;
        }
        let v = inst.raw(&cand);
        let d = v - cur_v;
        if d <= 0.0 || rng.gen::<f64>() < (-d / t).exp() {
            std::mem::swap(&mut cur, &mut cand);
            cur_v = v;
            if cur_v < best.0 {
                best = (cur_v, cur.clone());
            }
        }
    }
    best
}

#[derive(Debug, Clone, Serialize)]
pub struct TensorSearchResult {
    pub order: usize,
    pub r: usize,
    pub best_objective: f64,
    #[serde(serialize_with = "serialize_rows")]
    pub square: LatinSquare,
    pub restarts: usize,
    pub iters: u64,
    pub seed: u64,
}

fn serialize_rows<S: serde::Serializer>(sq: &LatinSquare, s: S) -> std::result::Result<S::Ok, S::Error> {
    sq.rows().serialize(s)
}

/// Simulated annealing over Latin squares, one independent chain per restart
/// on its own ChaCha stream. Ties between restarts go to the lowest index.
pub fn tensor_min_search(inst: &TensorInstance, seed: u64, restarts: usize, iters: u64) -> Result<TensorSearchResult> {
    if restarts == 0 {
        return Err(Error::Argument("restarts must be >= 1".into()));
    }
    let q = inst.order();
    let runs: Vec<(f64, Vec<u8>)> = (0..restarts as u64)
        .into_par_iter()
        .map(|r| anneal(inst, seed, r, iters))
        .collect();
    let (v, cells) = runs
        .into_iter()
        .reduce(|a, b| if b.0 < a.0 { b } else { a })
        .expect("restarts >= 1");
    let square = LatinSquare::new(q, cells)
        .map_err(|e| Error::Integrity(format!("search produced a non-Latin square: {e}")))?;
    Ok(TensorSearchResult {
        order: q,
        r: TENSOR_RANK,
        best_objective: v / inst.scale,
        square,
        restarts,
        iters,
        seed,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct R2Report {
    pub n: usize,
    pub remainder: Fraction,
    pub reverse_pairing: Fraction,
    pub sampled_min: Fraction,
    pub samples: usize,
    /// Sampled minimum is not below `r_n`.
    pub sampled_above: bool,
    /// Reverse pairing equals `r_n`.
    pub reverse_attains: bool,
}

impl R2Report {
    pub fn consistent(&self) -> bool {
        self.sampled_above && self.reverse_attains
    }
}

/// The rank-2 case: pairings `(1/N^2) sum lambda_i lambda_pi(i)` over random
/// permutations and the reverse pairing, against `r_n`.
pub fn r2_consistency(table: &EigenvalueTable, seed: u64) -> Result<R2Report> {
    let n = table.n();
    check_cap("rank-2 consistency", n, R2_CAP)?;
    let lambda = table.expanded()?;
    let n2 = BigInt::from(1u64 << (2 * n));
    let pairing = |perm: &mut dyn Iterator<Item = i64>| -> i128 {
        lambda.iter().zip(perm).map(|(&a, b)| i128::from(a * b)).sum()
    };
    let reverse = pairing(&mut lambda.iter().rev().copied());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut shuffled = lambda.clone();
    let mut min = reverse;
    for _ in 0..R2_SAMPLES {
        shuffled.shuffle(&mut rng);
        min = min.min(pairing(&mut shuffled.iter().copied()));
    }
    let r = remainder_exact(n)?;
    let reverse = BigRational::new(reverse.into(), n2.clone());
    let min = BigRational::new(min.into(), n2);
    Ok(R2Report {
        n,
        sampled_above: min >= r,
        reverse_attains: reverse == r,
        remainder: Fraction::from(&r),
        reverse_pairing: Fraction::from(&reverse),
        sampled_min: Fraction::from(&min),
        samples: R2_SAMPLES,
    })
}
