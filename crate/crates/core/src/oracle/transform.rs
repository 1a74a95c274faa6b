use std::ops::{Add, Sub};

use crate::error::{check_cap, Error, Result};

/// Largest cube dimension for mask-indexed eigenvalue vectors.
pub const WHT_CAP: usize = 24;

/// Unnormalized Walsh-Hadamard transform: `v[S] <- sum_x (-1)^{|S & x|} v[x]`.
/// Applying it twice multiplies by the length.
pub fn wht_in_place<T>(v: &mut [T]) -> Result<()>
where
    T: Copy + Add<Output = T> + Sub<Output = T>,
{
    let len = v.len();
    if !len.is_power_of_two() {
        return Err(Error::Argument(format!(
            "transform length {len} is not a power of two"
        )));
    }
    let mut h = 1;
    while h < len {
        for block in v.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
    Ok(())
}

/// First row of `M`: `1[popcount(x) <= floor(n/2)]`.
pub fn halfspace_row(n: usize) -> Vec<i64> {
    let h = (n / 2) as u32;
    (0..1u64 << n)
        .map(|x| i64::from(x.count_ones() <= h))
        .collect()
}

/// Eigenvalue of `M` on `chi_S` for every mask `S`.
///
/// `M[x][y]` depends only on `x ^ y`, so the transform of its first row is
/// its spectrum. Values are bounded by `2^n`, so `i64` is exact.
pub fn eigenvalues_via_wht(n: usize) -> Result<Vec<i64>> {
    check_cap("Walsh-Hadamard eigenvalues", n, WHT_CAP)?;
    let mut v = halfspace_row(n);
    wht_in_place(&mut v)?;
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_goes_to_constant() {
        let mut v = vec![0i64; 16];
        v[0] = 1;
        wht_in_place(&mut v).unwrap();
        assert!(v.iter().all(|&x| x == 1));
    }

    #[test]
    fn double_application_scales() {
        let orig: Vec<i64> = (0..32).map(|i| (i * 7 % 11) - 5).collect();
        let mut v = orig.clone();
        wht_in_place(&mut v).unwrap();
        wht_in_place(&mut v).unwrap();
        assert!(v.iter().zip(&orig).all(|(a, b)| *a == 32 * b));
    }

    #[test]
    fn rejects_bad_length() {
        let mut v = vec![0.0f64; 6];
        assert!(wht_in_place(&mut v).is_err());
    }

    #[test]
    fn small_spectra() {
        assert_eq!(eigenvalues_via_wht(2).unwrap(), vec![3, 1, 1, -1]);
        let v = eigenvalues_via_wht(4).unwrap();
        assert_eq!(v[0], 11);
        for mask in 0..16usize {
            if mask.count_ones() == 2 {
                assert_eq!(v[mask], -1);
            }
        }
        assert!(eigenvalues_via_wht(WHT_CAP + 1).is_err());
    }
}
