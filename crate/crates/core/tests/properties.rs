mod common;

use bijcorr::combinatorics::{binomial, krawtchouk};
use bijcorr::oracle::{chain_bound, joint_probability, joint_probability_spectral, Bijection};
use bijcorr::remainder::remainder_exact;
use bijcorr::spectrum::{lambda_genfunc, lambda_kraw_sum};
use bijcorr::tensor::{tensor_min_search, TensorInstance};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn krawtchouk_reciprocity(n in 1usize..40, k in 0usize..40, i in 0usize..40) {
        let (k, i) = (k % (n + 1), i % (n + 1));
        let lhs = binomial(n, i as i64).unwrap() * krawtchouk(n, k, i).unwrap();
        let rhs = binomial(n, k as i64).unwrap() * krawtchouk(n, i, k).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn eigenvalue_routes(n in 1usize..200, s in 1usize..200) {
        let s = 1 + (s - 1) % n;
        prop_assert_eq!(lambda_kraw_sum(n, s).unwrap(), lambda_genfunc(n, s).unwrap());
    }

    #[test]
    fn probability_respects_bound(n in 1usize..8, seed in any::<u64>()) {
        let f = Bijection::random(n, seed).unwrap();
        let p = joint_probability(&f).unwrap();
        prop_assert!(p >= chain_bound(n).unwrap());
        let s = joint_probability_spectral(&f).unwrap();
        let e = bijcorr::exact::ratio_to_f64(&p);
        prop_assert!(((s - e) / e).abs() < 1e-9);
    }

    #[test]
    fn inverse_has_same_probability(n in 1usize..8, seed in any::<u64>()) {
        let f = Bijection::random(n, seed).unwrap();
        prop_assert_eq!(joint_probability(&f).unwrap(), joint_probability(&f.inverse()).unwrap());
    }

    #[test]
    fn search_emits_latin_squares(seed in any::<u64>(), order in 2usize..9) {
        let l: Vec<f64> = (0..order).map(|i| (i as f64) - 3.0).collect();
        let inst = TensorInstance::new(l, 1.0).unwrap();
        let res = tensor_min_search(&inst, seed, 2, 200).unwrap();
        prop_assert!(res.square.validate().is_ok());
    }
}

#[test]
fn grouped_matches_materialized() {
    for n in 1..=12 {
        assert_eq!(remainder_exact(n).unwrap(), common::materialized_remainder(n), "n = {n}");
    }
}
