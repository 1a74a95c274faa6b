//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use bijcorr::combinatorics::binomial;
use bijcorr::exact::to_f64;
use bijcorr::oracle::{
    conjugation_structure_report, eigenvalues_via_wht, worst_case_search, Bijection, SearchMode,
};
use bijcorr::remainder::{asymptotic_scan, remainder_exact, riemann_sum, RIEMANN_LIMIT};
use bijcorr::spectrum::{lambda_beta, lambda_genfunc, lambda_kraw_sum, mu_sequence, spectrum_summary};
use bijcorr::tensor::{
    exhaustive_min, latin_square_enumerate, r2_consistency, tensor_min_search, TensorInstance,
};
use common::{materialized_remainder, q};

type Outcome = Result<String, String>;

fn route_agreement() -> Outcome {
    let mut worst = 0.0f64;
    for n in 1..=64 {
        for s in 1..=n {
            let k = lambda_kraw_sum(n, s).map_err(|e| e.to_string())?;
            let g = lambda_genfunc(n, s).map_err(|e| e.to_string())?;
            if k != g {
                return Err(format!("n = {n}, s = {s}: {k} vs {g}"));
            }
            if n % 4 == 0 {
                let b = lambda_beta(n, s).map_err(|e| e.to_string())?;
                let e = ((b - to_f64(&k)) / to_f64(&k)).abs();
                worst = worst.max(e);
                if e > 1e-9 {
                    return Err(format!("Beta form at n = {n}, s = {s} off by {e:e}"));
                }
            }
        }
    }
    Ok(format!("n <= 64 exact, Beta worst relative error {worst:.2e}"))
}

fn trace_identities() -> Outcome {
    for n in 1..=64usize {
        let size = BigInt::one() << n;
        let trivial: BigInt = (0..=n / 2).map(|k| binomial(n, k as i64).unwrap()).sum();
        let mut t1 = trivial.clone();
        let mut t2 = &trivial * &trivial;
        for s in 1..=n {
            let c = binomial(n, s as i64).unwrap();
            let l = lambda_kraw_sum(n, s).unwrap();
            t1 += &c * &l;
            t2 += &c * &l * &l;
        }
        if t1 != size || t2 != &size * &trivial {
            return Err(format!("n = {n}"));
        }
    }
    Ok("n <= 64".into())
}

fn oracle_agreement() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for n in 1..=20 {
        let eig = eigenvalues_via_wht(n).map_err(|e| e.to_string())?;
        for _ in 0..64 {
            let mask = rng.gen_range(0..eig.len());
            let level = mask.count_ones() as usize;
            let formula = if level == 0 {
                spectrum_summary(n).unwrap().trivial_eigenvalue().clone()
            } else {
                lambda_kraw_sum(n, level).unwrap()
            };
            if BigInt::from(eig[mask]) != formula {
                return Err(format!("n = {n}, mask {mask:#x}"));
            }
        }
    }
    Ok("n <= 20, 64 masks each".into())
}

fn remainder_correctness() -> Outcome {
    let r2 = materialized_remainder(2);
    let r4 = materialized_remainder(4);
    if r2 != q(-1, 16) || r4 != q(-25, 256) {
        return Err(format!("materialized oracle gives r_2 = {r2}, r_4 = {r4}"));
    }
    for n in 1..=16 {
        let grouped = remainder_exact(n).map_err(|e| e.to_string())?;
        let materialized = materialized_remainder(n);
        if grouped != materialized {
            return Err(format!("n = {n}: grouped {grouped} vs materialized {materialized}"));
        }
    }
    Ok("r_2 = -1/16, r_4 = -25/256; grouped = materialized for n <= 16".into())
}

fn bound_validity() -> Outcome {
    let quarter = q(1, 4);
    let mut parts = Vec::new();
    for n in 1..=3 {
        let probe = worst_case_search(n, SearchMode::Exhaustive, 0, 0).map_err(|e| e.to_string())?;
        let t = spectrum_summary(n).unwrap();
        let size = t.size();
        let bound = BigRational::new(t.trivial_eigenvalue() * t.trivial_eigenvalue(), &size * &size)
            + remainder_exact(n).unwrap();
        let floor = &quarter + remainder_exact(n).unwrap();
        if !(probe.probability >= bound && bound >= floor) {
            return Err(format!("n = {n}: min {} bound {bound} floor {floor}", probe.probability));
        }
        parts.push(format!("n={n}: {} >= {bound} >= {floor}", probe.probability));
    }
    Ok(parts.join("; "))
}

fn doubly_stochastic() -> Outcome {
    let mut worst = 0.0f64;
    for n in 1..=8 {
        for seed in 0..32 {
            let f = Bijection::random(n, seed).unwrap();
            let r = conjugation_structure_report(&f).map_err(|e| format!("n = {n}, seed {seed}: {e}"))?;
            worst = worst
                .max((r.r_empty_empty - 1.0).abs())
                .max(r.max_abs_empty_row)
                .max(r.max_abs_empty_col)
                .max(r.max_row_sum_error)
                .max(r.max_col_sum_error);
        }
    }
    if worst > 1e-9 {
        return Err(format!("worst deviation {worst:e}"));
    }
    Ok(format!("n <= 8, 32 bijections each, worst deviation {worst:.2e}"))
}

fn asymptotic_envelope() -> Outcome {
    let points: Vec<usize> = (2..=12).map(|k| 1usize << k).collect();
    let scan = asymptotic_scan(&points).map_err(|e| e.to_string())?;
    let base = scan
        .reports
        .iter()
        .find(|r| r.n == 64)
        .map(|r| r.sqrt_n_times_r.abs())
        .unwrap();
    let mut problems = Vec::new();
    for r in scan.reports.iter().filter(|r| r.n > 64) {
        if r.sqrt_n_times_r.abs() > 2.0 * base {
            problems.push(format!("sqrt(n)|r_n| = {} at n = {}", r.sqrt_n_times_r.abs(), r.n));
        }
    }
    let s = riemann_sum(256);
    let gap = (s - RIEMANN_LIMIT).abs();
    if gap > 0.05 {
        problems.push(format!("Riemann sum at m = 256 is {s:.5}, {gap:.4} from pi/2 (tolerance 0.05)"));
    }
    let summary = format!(
        "envelope constant {:.5}, value at 64 {base:.5}, Riemann gap {gap:.4}",
        scan.envelope_constant
    );
    if problems.is_empty() {
        Ok(summary)
    } else {
        Err(format!("{}; {summary}", problems.join("; ")))
    }
}

fn mu_structure() -> Outcome {
    let mut problems = Vec::new();
    for m in 1..=16 {
        let seq = match mu_sequence(m) {
            Ok(seq) => seq,
            Err(e) => {
                problems.push(format!("m = {m}: {e}"));
                continue;
            }
        };
        if !seq.counts_increasing() {
            let j = seq.count_order_violations[0];
            problems.push(format!(
                "m = {m}: n_{} = {} >= n_{} = {}",
                2 * j + 1,
                seq.counts[j],
                2 * j + 3,
                seq.counts[j + 1]
            ));
        }
        if !seq.counts_bounded() {
            problems.push(format!("m = {m}: count bound fails at {:?}", seq.count_bound_violations));
        }
    }
    if problems.is_empty() {
        Ok("n = 4m <= 64: ordering, identifications, counts".into())
    } else {
        let shown = problems.len().min(3);
        Err(format!(
            "{} problems, first: {}",
            problems.len(),
            problems[..shown].join("; ")
        ))
    }
}

fn tensor_exploration() -> Outcome {
    let c3 = latin_square_enumerate(3).unwrap().count();
    let c4 = latin_square_enumerate(4).unwrap().count();
    if (c3, c4) != (12, 576) {
        return Err(format!("counts {c3}, {c4}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let t2 = spectrum_summary(2).unwrap();
    let mut instances = vec![
        TensorInstance::from_spectrum(&t2, false).unwrap(),
        TensorInstance::from_spectrum(&t2, true).unwrap(),
    ];
    for order in 1..=5 {
        for _ in 0..2 {
            let l = (0..order).map(|_| rng.gen_range(-9.0f64..9.0).round()).collect();
            instances.push(TensorInstance::new(l, 1.0).unwrap());
        }
    }
    for inst in &instances {
        let (exact, _) = exhaustive_min(inst).unwrap();
        let found = tensor_min_search(inst, 7, 4, 4000).unwrap();
        if found.best_objective != exact {
            return Err(format!(
                "lambda {:?}: search {} vs exhaustive {exact}",
                inst.lambda(),
                found.best_objective
            ));
        }
    }
    for n in 2..=4 {
        let rep = r2_consistency(&spectrum_summary(n).unwrap(), 5).unwrap();
        if !rep.consistent() {
            return Err(format!("rank-2 check at n = {n}: {rep:?}"));
        }
    }
    Ok(format!("counts 12, 576; {} search instances match; rank 2 at n = 2..4", instances.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("spectrum route agreement", route_agreement),
        ("trace identities", trace_identities),
        ("oracle agreement", oracle_agreement),
        ("remainder correctness", remainder_correctness),
        ("bound validity", bound_validity),
        ("doubly stochastic structure", doubly_stochastic),
        ("asymptotic envelope", asymptotic_envelope),
        ("eigenvalue class structure", mu_structure),
        ("tensor exploration", tensor_exploration),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("acceptance {} {name}: PASS ({detail}) [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("acceptance {} {name}: FAIL ({detail}) [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

