use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::bijection::{Bijection, Family, Provenance, SearchMode, SearchTrace};
use super::probability::{joint_count, BijectionProbe, DENSE_CAP};
use crate::error::{check_cap, Result};

/// `N!` stays below 40320 up to here.
pub const EXHAUSTIVE_CAP: usize = 3;
pub const LOCAL_SEARCH_CAP: usize = DENSE_CAP;

/// Candidate swaps examined per step once the full neighbourhood is too big.
const NEIGHBOURHOOD_SAMPLE: usize = 4096;

/// Lowest joint probability found over bijections of the `n`-cube.
///
/// `Exhaustive` walks all `N!` permutations and is exact. `LocalSearch` runs
/// best-improvement transposition descent from seeded shuffles, restarting at
/// each local minimum, for `iters` steps in total.
pub fn worst_case_search(n: usize, mode: SearchMode, seed: u64, iters: u64) -> Result<BijectionProbe> {
    let (map, count, trace) = match mode {
        SearchMode::Exhaustive => {
            check_cap("exhaustive search over N! permutations", n, EXHAUSTIVE_CAP)?;
            exhaustive(n)
        }
        SearchMode::LocalSearch => {
            check_cap("local search", n, LOCAL_SEARCH_CAP)?;
            local_search(n, seed, iters)
        }
    };
    let provenance = Provenance {
        family: Family::Search,
        seed: (mode == SearchMode::LocalSearch).then_some(seed),
        trace: Some(trace),
    };
    let f = Bijection::new(n, map, provenance)?;
    debug_assert_eq!(joint_count(&f), count);
    let size = BigInt::from(1u64 << n);
    let probability = BigRational::new(BigInt::from(count), &size * &size);
    BijectionProbe::with_probability(f, probability, true)
}

fn count_pairs(n: usize, map: &[u32]) -> u64 {
    let h = (n / 2) as u32;
    let size = map.len();
    let mut c = 0u64;
    for i in 0..size {
        for j in (i + 1)..size {
            if ((i ^ j) as u32).count_ones() <= h && (map[i] ^ map[j]).count_ones() <= h {
                c += 1;
            }
        }
    }
    2 * c + size as u64
}

fn next_permutation(v: &mut [u32]) -> bool {
    let Some(i) = v.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = v.iter().rposition(|&x| x > v[i]).expect("pivot has a successor");
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}

fn exhaustive(n: usize) -> (Vec<u32>, u64, SearchTrace) {
    let mut perm: Vec<u32> = (0..1u32 << n).collect();
    let mut best = (count_pairs(n, &perm), perm.clone());
    let mut evaluated = 1;
    while next_permutation(&mut perm) {
        evaluated += 1;
        let c = count_pairs(n, &perm);
        if c < best.0 {
            best = (c, perm.clone());
        }
    }
    let trace = SearchTrace {
        mode: SearchMode::Exhaustive,
        evaluated,
        restarts: 0,
        steps: 0,
        improvements: 0,
    };
    (best.1, best.0, trace)
}

/// Change in the ordered pair count when the images of `a` and `b` swap.
fn swap_delta(h: u32, map: &[u32], a: usize, b: usize) -> i64 {
    let (fa, fb) = (map[a], map[b]);
    let mut d = 0i64;
    for (j, &fj) in map.iter().enumerate() {
        if j == a || j == b {
            continue;
        }
        let ma = i64::from(((a ^ j) as u32).count_ones() <= h);
        let mb = i64::from(((b ^ j) as u32).count_ones() <= h);
        if ma == mb {
            continue;
        }
        let ga = i64::from((fa ^ fj).count_ones() <= h);
        let gb = i64::from((fb ^ fj).count_ones() <= h);
        d += (ma - mb) * (gb - ga);
    }
    2 * d
}

fn local_search(n: usize, seed: u64, iters: u64) -> (Vec<u32>, u64, SearchTrace) {
    let h = (n / 2) as u32;
    let size = 1usize << n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let all_pairs = size * (size - 1) / 2;

    let mut current: Vec<u32> = (0..size as u32).collect();
    current.shuffle(&mut rng);
    let mut current_count = count_pairs(n, &current);
    let mut best = (current_count, current.clone());
    let mut trace = SearchTrace {
        mode: SearchMode::LocalSearch,
        evaluated: 1,
        restarts: 0,
        steps: 0,
        improvements: 0,
    };

    while trace.steps < iters {
        trace.steps += 1;
        let mut best_move: Option<(i64, usize, usize)> = None;
        let mut consider = |a: usize, b: usize, map: &[u32]| {
            let d = swap_delta(h, map, a, b);
            if d < 0 && best_move.is_none_or(|(bd, _, _)| d < bd) {
                best_move = Some((d, a, b));
            }
        };
        if all_pairs <= NEIGHBOURHOOD_SAMPLE {
            for a in 0..size {
                for b in (a + 1)..size {
                    consider(a, b, &current);
                }
            }
            trace.evaluated += all_pairs as u64;
        } else {
            for _ in 0..NEIGHBOURHOOD_SAMPLE {
                let a = rng.gen_range(0..size);
                let b = rng.gen_range(0..size - 1);
                let b = if b >= a { b + 1 } else { b };
                consider(a.min(b), a.max(b), &current);
            }
            trace.evaluated += NEIGHBOURHOOD_SAMPLE as u64;
        }

        match best_move {
            Some((d, a, b)) => {
                current.swap(a, b);
                current_count = (current_count as i64 + d) as u64;
                trace.improvements += 1;
                if current_count < best.0 {
                    best = (current_count, current.clone());
                }
            }
            None => {
                trace.restarts += 1;
                current.shuffle(&mut rng);
                current_count = count_pairs(n, &current);
                if current_count < best.0 {
                    best = (current_count, current.clone());
                }
            }
        }
    }
    (best.1, best.0, trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn next_permutation_counts() {
        let mut v: Vec<u32> = (0..5).collect();
        let mut c = 1;
        while next_permutation(&mut v) {
            c += 1;
        }
        assert_eq!(c, 120);
    }

    #[test]
    fn swap_delta_matches_recount() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [2usize, 3, 4, 5] {
            let mut map: Vec<u32> = (0..1u32 << n).collect();
            map.shuffle(&mut rng);
            let before = count_pairs(n, &map) as i64;
            for _ in 0..20 {
                let a = rng.gen_range(0..map.len());
                let b = rng.gen_range(0..map.len());
                if a == b {
                    continue;
                }
                let d = swap_delta((n / 2) as u32, &map, a, b);
                let mut m2 = map.clone();
                m2.swap(a, b);
                assert_eq!(count_pairs(n, &m2) as i64 - before, d);
            }
        }
    }

    #[test]
    fn exhaustive_n1_and_n2() {
        let p = worst_case_search(1, SearchMode::Exhaustive, 0, 0).unwrap();
        assert_eq!(p.probability, q(1, 2));
        let p = worst_case_search(2, SearchMode::Exhaustive, 0, 0).unwrap();
        assert!(p.probability >= q(1, 2));
        assert_eq!(p.bijection.provenance().trace.as_ref().unwrap().evaluated, 24);
    }

    #[test]
    fn exhaustive_refused_beyond_cap() {
        assert!(matches!(
            worst_case_search(4, SearchMode::Exhaustive, 0, 0),
            Err(Error::CapExceeded { .. })
        ));
        assert!(worst_case_search(11, SearchMode::LocalSearch, 0, 1).is_err());
    }

    #[test]
    fn local_search_deterministic_and_bounded() {
        let a = worst_case_search(4, SearchMode::LocalSearch, 9, 200).unwrap();
        let b = worst_case_search(4, SearchMode::LocalSearch, 9, 200).unwrap();
        assert_eq!(a.bijection, b.bijection);
        assert_eq!(a.probability, b.probability);
        assert!(a.margin >= q(0, 1));
        let identity = q(11 * 16, 256);
        assert!(a.probability < identity);
    }

    #[test]
    fn local_search_reaches_exhaustive_optimum_n3() {
        let exact = worst_case_search(3, SearchMode::Exhaustive, 0, 0).unwrap();
        let local = worst_case_search(3, SearchMode::LocalSearch, 1, 2000).unwrap();
        assert_eq!(local.probability, exact.probability);
    }
}
