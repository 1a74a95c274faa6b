#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;

/// Eigenvalues of `M` straight from the transform of its first row, sorted
/// descending with the constant character dropped, paired against the
/// reverse. Shares nothing with the grouped implementation but the
/// transform.
pub fn materialized_remainder(n: usize) -> BigRational {
    let eig = bijcorr::oracle::eigenvalues_via_wht(n).expect("n within transform cap");
    let mut values: Vec<i64> = eig[1..].to_vec();
    values.sort_unstable_by(|a, b| b.cmp(a));
    let acc: i128 = values
        .iter()
        .zip(values.iter().rev())
        .map(|(&a, &b)| i128::from(a) * i128::from(b))
        .sum();
    let size = BigInt::from(1u64 << n);
    BigRational::new(acc.into(), &size * &size)
}

pub fn q(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}
