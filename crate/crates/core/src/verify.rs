//! The full invariant suite behind `bijcorr verify`. Each check runs up to
//! `n_max`, clipped to the cap of the module it exercises.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::combinatorics::{alternating_prefix, binomial, KrawtchoukTable};
use crate::error::{Error, Result};
use crate::oracle::{
    conjugation_structure_report, eigenvalues_via_wht, joint_probability, joint_probability_spectral,
    worst_case_search, Bijection, BijectionProbe, SearchMode,
};
use crate::remainder::{
    asymptotic_scan, birkhoff_sanity, remainder_exact, remainder_float, RIEMANN_LIMIT,
};
use crate::spectrum::{lambda_beta, lambda_genfunc, lambda_kraw_sum, mu_sequence, spectrum_summary};
use crate::tensor::{
    exhaustive_min, latin_square_enumerate, r2_consistency, tensor_min_search, tensor_objective,
    LatinSquare, TensorInstance,
};

const KRAWTCHOUK_LIMIT: usize = 20;
const SPECTRUM_LIMIT: usize = 64;
const WHT_LIMIT: usize = 20;
const WHT_MASKS: usize = 64;
const ORACLE_LIMIT: usize = 10;
const CONJUGATION_LIMIT: usize = 8;
const RANDOM_BIJECTIONS: usize = 32;
const MATERIALIZED_LIMIT: usize = 16;
const BIRKHOFF_LIMIT: usize = 10;
const BIRKHOFF_TRIALS: usize = 200;
const EXHAUSTIVE_LIMIT: usize = 3;
const SCAN_LIMIT: usize = 4096;
const ENVELOPE_BASE: usize = 64;
const RIEMANN_M: usize = 256;
const RIEMANN_TOL: f64 = 0.05;
const REL_TOL: f64 = 1e-9;
const FLOAT_REMAINDER_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn from_outcome(name: &str, outcome: Result<String>) -> Self {
        match outcome {
            Ok(detail) => CheckResult {
                name: name.into(),
                passed: true,
                detail,
            },
            Err(e) => CheckResult {
                name: name.into(),
                passed: false,
                detail: e.to_string(),
            },
        }
    }
}

fn fail(msg: String) -> Error {
    Error::Integrity(msg)
}

fn rel_err(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        ((a - b) / b).abs()
    }
}

pub fn run_all(n_max: usize, seed: u64) -> Result<Vec<CheckResult>> {
    if n_max == 0 {
        return Err(Error::Argument("verify needs n >= 1".into()));
    }
    let checks: Vec<(&str, Box<dyn Fn() -> Result<String>>)> = vec![
        ("krawtchouk-reciprocity", Box::new(move || krawtchouk_identities(n_max))),
        ("alternating-prefix", Box::new(move || alternating_prefix_literal(n_max))),
        ("spectrum-routes", Box::new(move || spectrum_routes(n_max))),
        ("spectrum-traces", Box::new(move || spectrum_traces(n_max))),
        ("spectrum-palindromy", Box::new(move || palindromy(n_max))),
        ("mu-sequence", Box::new(move || mu_checks(n_max))),
        ("wht-oracle", Box::new(move || wht_oracle(n_max, seed))),
        ("probability-routes", Box::new(move || probability_routes(n_max, seed))),
        ("conjugation-structure", Box::new(move || conjugation(n_max, seed))),
        ("isometry-probability", Box::new(move || isometries(n_max, seed))),
        ("isometry-invariance", Box::new(move || isometry_invariance(n_max, seed))),
        ("grouped-vs-materialized", Box::new(move || grouped_vs_materialized(n_max))),
        ("birkhoff-sampling", Box::new(move || birkhoff(n_max, seed))),
        ("float-remainder", Box::new(move || float_remainder(n_max))),
        ("exhaustive-bound-chain", Box::new(move || exhaustive_chain(n_max))),
        ("latin-enumeration", Box::new(latin_counts)),
        ("tensor-relabeling", Box::new(move || tensor_relabeling(seed))),
        ("tensor-search-vs-exhaustive", Box::new(move || tensor_search(seed))),
        ("rank-two-consistency", Box::new(move || rank_two(n_max, seed))),
    ];
    let mut results: Vec<CheckResult> = checks
        .iter()
        .map(|(name, f)| CheckResult::from_outcome(name, f()))
        .collect();
    if n_max > ENVELOPE_BASE {
        results.push(CheckResult::from_outcome("envelope-guard", envelope(n_max)));
    }
    if n_max >= 4 * RIEMANN_M {
        results.push(CheckResult::from_outcome("riemann-sum", riemann()));
    }
    Ok(results)
}

fn krawtchouk_identities(n_max: usize) -> Result<String> {
    let top = n_max.min(KRAWTCHOUK_LIMIT);
    for n in 1..=top {
        let t = KrawtchoukTable::new(n)?;
        for k in 0..=n {
            for i in 0..=n {
                let lhs = binomial(n, i as i64)? * t.get(k, i)?;
                let rhs = binomial(n, k as i64)? * t.get(i, k)?;
                if lhs != rhs {
                    return Err(fail(format!("reciprocity fails at n = {n}, k = {k}, i = {i}")));
                }
            }
        }
        for i in 1..=n {
            let col: BigInt = (0..=n).map(|k| t.get(k, i).cloned()).sum::<Result<BigInt>>()?;
            if !col.is_zero() {
                return Err(fail(format!("sum_k K_k({i}) = {col} at n = {n}")));
            }
        }
    }
    Ok(format!("n <= {top}"))
}

fn alternating_prefix_literal(n_max: usize) -> Result<String> {
    let top = n_max.min(SPECTRUM_LIMIT);
    for n in 1..=top {
        let mut acc = BigInt::zero();
        for d in 0..=n {
            let c = binomial(n, d as i64)?;
            if d % 2 == 0 {
                acc += c;
            } else {
                acc -= c;
            }
            if alternating_prefix(n, d)? != acc {
                return Err(fail(format!("alternating prefix differs at n = {n}, D = {d}")));
            }
        }
    }
    Ok(format!("n <= {top}"))
}

fn spectrum_routes(n_max: usize) -> Result<String> {
    let top = n_max.min(SPECTRUM_LIMIT);
    let mut worst = 0.0f64;
    for n in 1..=top {
        let table = spectrum_summary(n)?;
        for s in 1..=n {
            let k = lambda_kraw_sum(n, s)?;
            if k != lambda_genfunc(n, s)? || &k != table.lambda(s) {
                return Err(fail(format!("routes disagree at n = {n}, s = {s}")));
            }
            if n % 4 == 0 {
                let e = rel_err(lambda_beta(n, s)?, crate::exact::to_f64(&k));
                worst = worst.max(e);
                if e > REL_TOL {
                    return Err(fail(format!("Beta form off by {e:e} at n = {n}, s = {s}")));
                }
            }
        }
    }
    Ok(format!("n <= {top}, worst Beta relative error {worst:.3e}"))
}

fn spectrum_traces(n_max: usize) -> Result<String> {
    let top = n_max.min(SPECTRUM_LIMIT);
    for n in 1..=top {
        spectrum_summary(n)?.check()?;
    }
    Ok(format!("n <= {top}"))
}

fn palindromy(n_max: usize) -> Result<String> {
    let top = n_max.min(SPECTRUM_LIMIT);
    let mut checked = 0;
    for n in (4..=top).step_by(4) {
        let t = spectrum_summary(n)?;
        for s in 1..=n {
            if t.lambda(s) != t.lambda(n + 1 - s) {
                return Err(fail(format!("lambda({s}) != lambda({}) at n = {n}", n + 1 - s)));
            }
        }
        checked += 1;
    }
    Ok(format!("{checked} values of n = 4m"))
}

fn mu_checks(n_max: usize) -> Result<String> {
    let top = n_max.min(SPECTRUM_LIMIT) / 4;
    let mut problems = Vec::new();
    for m in 1..=top {
        let seq = mu_sequence(m)?;
        if !seq.counts_increasing() {
            problems.push(format!("m = {m}: class counts not increasing at {:?}", seq.count_order_violations));
        }
        if !seq.counts_bounded() {
            problems.push(format!("m = {m}: count bound fails at {:?}", seq.count_bound_violations));
        }
    }
    if problems.is_empty() {
        Ok(format!("m <= {top}"))
    } else {
        Err(fail(problems.join("; ")))
    }
}

fn wht_oracle(n_max: usize, seed: u64) -> Result<String> {
    let top = n_max.min(WHT_LIMIT);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for n in 1..=top {
        let eig = eigenvalues_via_wht(n)?;
        let t = spectrum_summary(n)?;
        for _ in 0..WHT_MASKS {
            let mask = rng.gen_range(0..eig.len());
            let level = mask.count_ones() as usize;
            if BigInt::from(eig[mask]) != *t.lambda(level) {
                return Err(fail(format!("WHT eigenvalue at mask {mask:#x} differs, n = {n}")));
            }
        }
    }
    Ok(format!("n <= {top}, {WHT_MASKS} masks each"))
}

fn probability_routes(n_max: usize, seed: u64) -> Result<String> {
    let top = n_max.min(ORACLE_LIMIT);
    let mut worst = 0.0f64;
    for n in 1..=top {
        for k in 0..RANDOM_BIJECTIONS as u64 {
            let f = Bijection::random(n, seed.wrapping_add(k))?;
            let probe = BijectionProbe::new(f)?;
            let exact = crate::exact::ratio_to_f64(&probe.probability);
            let spectral = joint_probability_spectral(&probe.bijection)?;
            let e = rel_err(spectral, exact);
            worst = worst.max(e);
            if e > REL_TOL {
                return Err(fail(format!("routes differ by {e:e} at n = {n}")));
            }
        }
    }
    Ok(format!("n <= {top}, worst relative error {worst:.3e}"))
}

fn conjugation(n_max: usize, seed: u64) -> Result<String> {
    let top = n_max.min(CONJUGATION_LIMIT);
    for n in 1..=top {
        for k in 0..RANDOM_BIJECTIONS as u64 {
            conjugation_structure_report(&Bijection::random(n, seed.wrapping_add(k))?)?;
        }
    }
    Ok(format!("n <= {top}"))
}

fn random_isometry(n: usize, rng: &mut ChaCha8Rng) -> Result<Bijection> {
    let mut coords: Vec<usize> = (0..n).collect();
    coords.shuffle(rng);
    Bijection::isometry(n, &coords, rng.gen())
}

fn isometries(n_max: usize, seed: u64) -> Result<String> {
    let top = n_max.min(ORACLE_LIMIT);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for n in 1..=top {
        let t = spectrum_summary(n)?;
        let expected = BigRational::new(t.trivial_eigenvalue().clone(), t.size());
        let mut family = vec![Bijection::identity(n)?, Bijection::complement(n)?];
        for _ in 0..8 {
            family.push(random_isometry(n, &mut rng)?);
        }
        for f in &family {
            if joint_probability(f)? != expected {
                return Err(fail(format!("distance-preserving map off lambda_empty/N at n = {n}")));
            }
        }
    }
    Ok(format!("n <= {top}"))
}

fn isometry_invariance(n_max: usize, seed: u64) -> Result<String> {
    let top = n_max.min(ORACLE_LIMIT);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5a5a);
    for n in 1..=top {
        for k in 0..4u64 {
            let f = Bijection::random(n, seed.wrapping_add(k))?;
            let p = joint_probability(&f)?;
            let a = random_isometry(n, &mut rng)?;
            let b = random_isometry(n, &mut rng)?;
            let g = b.compose(&f.compose(&a)?)?;
            if joint_probability(&g)? != p {
                return Err(fail(format!("probability changed under conjugation at n = {n}")));
            }
        }
    }
    Ok(format!("n <= {top}"))
}

/// Expands every mask's eigenvalue, sorts and pairs against the reverse.
pub(crate) fn materialized_pairing(n: usize) -> Result<BigRational> {
    let levels = spectrum_summary(n)?;
    let mut values: Vec<BigInt> = (1usize..1 << n)
        .map(|mask| levels.lambda(mask.count_ones() as usize).clone())
        .collect();
    values.sort_unstable_by(|a, b| b.cmp(a));
    let acc: BigInt = values.iter().zip(values.iter().rev()).map(|(a, b)| a * b).sum();
    let size = BigInt::one() << n;
    Ok(BigRational::new(acc, &size * &size))
}

fn grouped_vs_materialized(n_max: usize) -> Result<String> {
    let top = n_max.min(MATERIALIZED_LIMIT);
    for n in 1..=top {
        if remainder_exact(n)? != materialized_pairing(n)? {
            return Err(fail(format!("grouped and materialized pairings differ at n = {n}")));
        }
    }
    Ok(format!("n <= {top}"))
}

fn birkhoff(n_max: usize, seed: u64) -> Result<String> {
    let top = n_max.min(BIRKHOFF_LIMIT);
    let mut discarded = 0;
    for n in 1..=top {
        discarded += birkhoff_sanity(n, BIRKHOFF_TRIALS, seed.wrapping_add(n as u64))?.discarded;
    }
    Ok(format!("n <= {top}, {BIRKHOFF_TRIALS} samples each, {discarded} unbalanced"))
}

fn float_remainder(n_max: usize) -> Result<String> {
    let top = n_max.min(SCAN_LIMIT);
    let mut worst = 0.0f64;
    let mut n = 4;
    while n <= top {
        let exact = crate::exact::ratio_to_f64(&remainder_exact(n)?);
        let e = rel_err(remainder_float(n)?.value, exact);
        worst = worst.max(e);
        let tol = if n <= SPECTRUM_LIMIT { REL_TOL } else { FLOAT_REMAINDER_TOL };
        if e > tol {
            return Err(fail(format!("float remainder off by {e:e} at n = {n}")));
        }
        n *= 2;
    }
    Ok(format!("n = 4, 8, .., {}; worst relative error {worst:.3e}", n / 2))
}

fn exhaustive_chain(n_max: usize) -> Result<String> {
    let quarter = BigRational::new(BigInt::one(), BigInt::from(4));
    let mut margins = Vec::new();
    for n in 1..=n_max.min(EXHAUSTIVE_LIMIT) {
        let probe = worst_case_search(n, SearchMode::Exhaustive, 0, 0)?;
        let r = remainder_exact(n)?;
        if &quarter + &r > probe.bound || probe.bound > probe.probability {
            return Err(fail(format!("bound chain fails at n = {n}")));
        }
        margins.push(format!("n = {n}: min {}", probe.probability));
    }
    Ok(margins.join(", "))
}

fn scan_points(n_max: usize) -> Vec<usize> {
    let top = n_max.min(SCAN_LIMIT);
    std::iter::successors(Some(4usize), |n| Some(n * 2))
        .take_while(|&n| n <= top)
        .collect()
}

fn envelope(n_max: usize) -> Result<String> {
    let points = scan_points(n_max);
    let scan = asymptotic_scan(&points)?;
    let base = scan
        .reports
        .iter()
        .find(|r| r.n == ENVELOPE_BASE)
        .map(|r| r.sqrt_n_times_r.abs())
        .ok_or_else(|| fail("scan misses the reference point".into()))?;
    for r in scan.reports.iter().filter(|r| r.n > ENVELOPE_BASE) {
        if r.sqrt_n_times_r.abs() > 2.0 * base {
            return Err(fail(format!(
                "sqrt(n)|r_n| = {} at n = {} exceeds twice {base}",
                r.sqrt_n_times_r.abs(),
                r.n
            )));
        }
    }
    Ok(format!("envelope constant {}", scan.envelope_constant))
}

fn riemann() -> Result<String> {
    let s = crate::remainder::riemann_sum(RIEMANN_M);
    let gap = (s - RIEMANN_LIMIT).abs();
    if gap > RIEMANN_TOL {
        return Err(fail(format!(
            "Riemann sum at m = {RIEMANN_M} is {s}, {gap} from pi/2"
        )));
    }
    Ok(format!("{s}"))
}

fn latin_counts() -> Result<String> {
    let expected = [1usize, 2, 12, 576, 161_280];
    for (q, &want) in (1..=5).zip(&expected) {
        let mut got = 0usize;
        for sq in latin_square_enumerate(q)? {
            sq.validate()?;
            got += 1;
        }
        if got != want {
            return Err(fail(format!("{got} squares of order {q}, expected {want}")));
        }
    }
    Ok("orders 1..5".into())
}

fn tensor_relabeling(seed: u64) -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inst = TensorInstance::from_spectrum(&spectrum_summary(3)?, false)?;
    let q = inst.order();
    for _ in 0..20 {
        let found = tensor_min_search(&inst, rng.gen(), 1, 50)?;
        let sq: LatinSquare = found.square;
        let mut p: Vec<usize> = (0..q).collect();
        p.shuffle(&mut rng);
        let mut relabeled = vec![0.0; q];
        for (i, &v) in inst.lambda().iter().enumerate() {
            relabeled[p[i]] = v;
        }
        let other = TensorInstance::new(relabeled, inst.scale())?;
        let a = tensor_objective(&inst, &sq)?;
        let b = tensor_objective(&other, &sq.relabel(&p))?;
        if (a - b).abs() > 1e-12 {
            return Err(fail(format!("objective {a} became {b} after relabeling")));
        }
    }
    Ok("20 relabelings at order 7".into())
}

fn tensor_search(seed: u64) -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t2 = spectrum_summary(2)?;
    let mut instances = vec![
        TensorInstance::from_spectrum(&t2, false)?,
        TensorInstance::from_spectrum(&t2, true)?,
    ];
    for q in 2..=5 {
        let l = (0..q).map(|_| f64::from(rng.gen_range(-5i32..=5))).collect();
        instances.push(TensorInstance::new(l, 1.0)?);
    }
    for inst in &instances {
        let (exact, _) = exhaustive_min(inst)?;
        let found = tensor_min_search(inst, seed, 4, 3000)?;
        if found.best_objective != exact {
            return Err(fail(format!(
                "order {}: search {} vs exhaustive {exact}",
                inst.order(),
                found.best_objective
            )));
        }
    }
    Ok(format!("{} instances of order <= 5", instances.len()))
}

fn rank_two(n_max: usize, seed: u64) -> Result<String> {
    let top = n_max.min(BIRKHOFF_LIMIT);
    for n in 1..=top {
        let rep = r2_consistency(&spectrum_summary(n)?, seed)?;
        if !rep.consistent() {
            return Err(fail(format!("rank-2 pairing inconsistent at n = {n}")));
        }
    }
    Ok(format!("n <= {top}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes() {
        let results = run_all(6, 1).unwrap();
        for r in &results {
            assert!(r.passed, "{}: {}", r.name, r.detail);
        }
        assert!(results.iter().all(|r| r.name != "envelope-guard"));
    }

    #[test]
    fn materialized_matches_known_values() {
        assert_eq!(materialized_pairing(2).unwrap(), BigRational::new((-1).into(), 16.into()));
        assert_eq!(materialized_pairing(4).unwrap(), BigRational::new((-25).into(), 256.into()));
    }

    #[test]
    fn mu_check_reports_count_order() {
        assert!(mu_checks(8).is_ok());
        let err = mu_checks(12).unwrap_err().to_string();
        assert!(err.contains("m = 3"), "{err}");
    }

    #[test]
    fn rejects_zero() {
        assert!(run_all(0, 1).is_err());
    }
}
