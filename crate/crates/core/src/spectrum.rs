//! Eigenvalues of the half-space matrix `M[x][y] = 1[<x, y> >= 0]`.
//!
//! `M` is the sum of the distance matrices `A_0 .. A_{floor(n/2)}` of the
//! Hamming scheme, so on the character `chi_S` it acts by
//! `lambda(|S|) = sum_{d <= n/2} K_d(|S|)`. Three routes are provided:
//!
//! * [`lambda_kraw_sum`]: the partial Krawtchouk sum itself,
//! * [`lambda_genfunc`]: the coefficient of `x^{floor(n/2)}` in
//!   `(1 - x)^{s-1} (1 + x)^{n-s}`,
//! * [`lambda_beta`]: a Beta-function closed form, valid for `n = 4m`.
//!
//! [`lambda_levels`] produces every level at once from a coefficient
//! recurrence and backs [`spectrum_summary`].

use std::f64::consts::{LN_2, PI};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use statrs::function::beta::ln_beta;

use crate::combinatorics::{binomial_row, krawtchouk, STREAM_CAP};
use crate::error::{check_cap, Error, Result};
use crate::exact::ln_abs;

/// Largest distance counted by `M`.
pub fn half_radius(n: usize) -> usize {
    n / 2
}

fn check_level(n: usize, s: usize) -> Result<()> {
    check_cap("spectrum", n, STREAM_CAP)?;
    if s > n {
        return Err(Error::Argument(format!("level s = {s} outside [0, {n}]")));
    }
    Ok(())
}

/// `lambda(s) = sum_{d=0}^{floor(n/2)} K_d(s)`.
pub fn lambda_kraw_sum(n: usize, s: usize) -> Result<BigInt> {
    check_level(n, s)?;
    let mut acc = BigInt::zero();
    for d in 0..=half_radius(n) {
        acc += krawtchouk(n, d, s)?;
    }
    Ok(acc)
}

/// `[x^{floor(n/2)}] (1 - x)^{s-1} (1 + x)^{n-s}` as one alternating sum.
pub fn lambda_genfunc(n: usize, s: usize) -> Result<BigInt> {
    check_level(n, s)?;
    if s == 0 {
        return Err(Error::Argument(
            "generating-function route needs a nonempty set (s >= 1)".into(),
        ));
    }
    let h = half_radius(n);
    let minus = binomial_row(s - 1)?;
    let plus = binomial_row(n - s)?;
    let mut acc = BigInt::zero();
    for k in 0..=h.min(s - 1) {
        let Some(c) = plus.get(h - k) else { continue };
        let term = &minus[k] * c;
        if k % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    Ok(acc)
}

/// Sign and `ln |lambda(s)|` from the Beta closed form at `n = 4m`.
pub fn ln_abs_lambda_beta(n: usize, s: usize) -> Result<(i8, f64)> {
    if n % 4 != 0 || n == 0 {
        return Err(Error::Unsupported(format!(
            "Beta closed form needs n divisible by 4, got n = {n}"
        )));
    }
    if s == 0 || s > n {
        return Err(Error::Argument(format!("level s = {s} outside [1, {n}]")));
    }
    let nf = n as f64;
    let sf = s as f64;
    let (half_turns, a, b) = if s % 2 == 0 {
        (s / 2, (sf + 1.0) / 2.0, (nf + 1.0 - sf) / 2.0)
    } else {
        ((s - 1) / 2, sf / 2.0, (nf + 2.0 - sf) / 2.0)
    };
    let sign = if half_turns % 2 == 0 { 1 } else { -1 };
    let ln_abs = (nf - 1.0) * LN_2 - PI.ln() + ln_beta(a, b);
    Ok((sign, ln_abs))
}

/// Beta closed form for `lambda(s)` at `n = 4m`, evaluated through log-gamma.
pub fn lambda_beta(n: usize, s: usize) -> Result<f64> {
    let (sign, ln) = ln_abs_lambda_beta(n, s)?;
    Ok(f64::from(sign) * ln.exp())
}

/// `lambda(s)` for every `s in 0..=n`.
///
/// Level 0 is `sum_{k <= n/2} C(n, k)`. For `s >= 1`, with
/// `f_s(x) = (1 - x)^{s-1} (1 + x)^{n-s}` we have `(1 + x) f_{s+1} = (1 - x) f_s`,
/// which updates the low coefficients of `f_s` in place.
pub fn lambda_levels(n: usize) -> Result<Vec<BigInt>> {
    check_cap("spectrum", n, STREAM_CAP)?;
    let h = half_radius(n);
    let row = binomial_row(n)?;
    let mut levels = Vec::with_capacity(n + 1);
    levels.push(row[..=h].iter().sum::<BigInt>());
    if n == 0 {
        return Ok(levels);
    }

    let mut coeffs: Vec<BigInt> = binomial_row(n - 1)?;
    coeffs.resize(h + 1, BigInt::zero());
    coeffs.truncate(h + 1);
    levels.push(coeffs[h].clone());
    for _ in 2..=n {
        let mut prev_old = BigInt::zero();
        let mut prev_new = BigInt::zero();
        for c in coeffs.iter_mut() {
            let old = std::mem::take(c);
            let new = &old - &prev_old - &prev_new;
            prev_old = old;
            *c = new.clone();
            prev_new = new;
        }
        levels.push(coeffs[h].clone());
    }
    Ok(levels)
}

/// A run of equal eigenvalues among the nonempty sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub value: BigInt,
    pub multiplicity: BigInt,
    /// Levels `|S|` contributing to this value, ascending.
    pub levels: Vec<usize>,
}

/// Distinct eigenvalues of `M` with multiplicities.
#[derive(Debug, Clone)]
pub struct EigenvalueTable {
    n: usize,
    lambda_by_level: Vec<BigInt>,
    multiplicity_by_level: Vec<BigInt>,
    trivial_eigenvalue: BigInt,
    sorted_blocks: Vec<Block>,
}

impl EigenvalueTable {
    pub fn n(&self) -> usize {
        self.n
    }

    /// `2^n`.
    pub fn size(&self) -> BigInt {
        BigInt::one() << self.n
    }

    pub fn lambda_by_level(&self) -> &[BigInt] {
        &self.lambda_by_level
    }

    pub fn lambda(&self, s: usize) -> &BigInt {
        &self.lambda_by_level[s]
    }

    pub fn multiplicity(&self, s: usize) -> &BigInt {
        &self.multiplicity_by_level[s]
    }

    pub fn trivial_eigenvalue(&self) -> &BigInt {
        &self.trivial_eigenvalue
    }

    /// Nonempty-set eigenvalues, strictly descending, equal values merged.
    pub fn blocks(&self) -> &[Block] {
        &self.sorted_blocks
    }

    /// Expanded nonempty spectrum `lambda_1 >= ... >= lambda_{N-1}` as `i64`.
    /// Only meant for small `n`.
    pub fn expanded(&self) -> Result<Vec<i64>> {
        check_cap("expanded spectrum", self.n, 24)?;
        let mut out = Vec::with_capacity((1usize << self.n) - 1);
        for b in &self.sorted_blocks {
            let v: i64 = (&b.value)
                .try_into()
                .map_err(|_| Error::Argument("eigenvalue exceeds i64".into()))?;
            let m: usize = (&b.multiplicity)
                .try_into()
                .map_err(|_| Error::Argument("multiplicity exceeds usize".into()))?;
            out.extend(std::iter::repeat_n(v, m));
        }
        Ok(out)
    }

    /// Re-checks the spectral identities. Called at construction.
    pub fn check(&self) -> Result<()> {
        let n = self.n;
        let size = self.size();
        let total: BigInt = self.sorted_blocks.iter().map(|b| &b.multiplicity).sum();
        if total != &size - 1 {
            return Err(Error::Integrity(format!(
                "n = {n}: block multiplicities sum to {total}, expected 2^n - 1"
            )));
        }
        if self.trivial_eigenvalue != self.lambda_by_level[0] {
            return Err(Error::Integrity(format!(
                "n = {n}: trivial eigenvalue differs from level 0"
            )));
        }
        if self.trivial_eigenvalue < (BigInt::one() << (n - 1)) {
            return Err(Error::Integrity(format!(
                "n = {n}: trivial eigenvalue below 2^(n-1)"
            )));
        }
        let mut trace = BigInt::zero();
        let mut trace_sq = BigInt::zero();
        for (l, m) in self.lambda_by_level.iter().zip(&self.multiplicity_by_level) {
            trace += m * l;
            trace_sq += m * l * l;
        }
        if trace != size {
            return Err(Error::Integrity(format!("n = {n}: trace(M) = {trace} != 2^n")));
        }
        if trace_sq != &size * &self.trivial_eigenvalue {
            return Err(Error::Integrity(format!(
                "n = {n}: trace(M^2) != 2^n * lambda_empty"
            )));
        }
        for w in self.sorted_blocks.windows(2) {
            if w[0].value <= w[1].value {
                return Err(Error::Integrity(format!(
                    "n = {n}: blocks not strictly descending"
                )));
            }
        }
        Ok(())
    }
}

/// Full spectrum of `M` for the `n`-cube.
pub fn spectrum_summary(n: usize) -> Result<EigenvalueTable> {
    if n == 0 {
        return Err(Error::Argument("spectrum needs n >= 1".into()));
    }
    let lambda_by_level = lambda_levels(n)?;
    let multiplicity_by_level = binomial_row(n)?;

    let mut order: Vec<usize> = (1..=n).collect();
    order.sort_by(|&a, &b| lambda_by_level[b].cmp(&lambda_by_level[a]).then(a.cmp(&b)));
    let mut sorted_blocks: Vec<Block> = Vec::new();
    for s in order {
        match sorted_blocks.last_mut() {
            Some(b) if b.value == lambda_by_level[s] => {
                b.multiplicity += &multiplicity_by_level[s];
                b.levels.push(s);
            }
            _ => sorted_blocks.push(Block {
                value: lambda_by_level[s].clone(),
                multiplicity: multiplicity_by_level[s].clone(),
                levels: vec![s],
            }),
        }
    }
    for b in &mut sorted_blocks {
        b.levels.sort_unstable();
    }

    let table = EigenvalueTable {
        n,
        trivial_eigenvalue: lambda_by_level[0].clone(),
        lambda_by_level,
        multiplicity_by_level,
        sorted_blocks,
    };
    table.check()?;
    Ok(table)
}

/// Distinct absolute eigenvalues at `n = 4m`, grouped into `m + 1` classes.
///
/// Class `j` collects the levels `{2j, 2j+1, 4m-2j, 4m-2j+1}` within `[1, 4m]`.
/// Its eigenvalue is `(-1)^j mu_{2j+1}` with
/// `mu_{2j+1} = 2^{4m-1}/pi * B((2j+1)/2, (4m+1-2j)/2)`.
#[derive(Debug, Clone)]
pub struct MuSequence {
    pub m: usize,
    /// `mu_{2j+1}` from the Beta form; overflows to `inf` beyond `n ~ 1024`.
    pub mu: Vec<f64>,
    pub ln_mu: Vec<f64>,
    /// Exact signed eigenvalue of each class.
    pub exact: Vec<BigInt>,
    pub signs: Vec<i8>,
    pub levels: Vec<Vec<usize>>,
    /// `n_{2j+1}`: number of nonempty sets with eigenvalue `(-1)^j mu_{2j+1}`.
    pub counts: Vec<BigInt>,
    /// Indices `j` where `counts[j] >= counts[j + 1]`.
    pub count_order_violations: Vec<usize>,
    /// Indices `j` where `counts[j] >= 4 C(4m, 2j+1)`.
    pub count_bound_violations: Vec<usize>,
    /// Largest relative gap between `|lambda(s)|` and the class `mu`.
    pub max_relative_error: f64,
    /// The variant with second Beta argument `(4m+1-j)/2`; kept only to show
    /// that it does not reproduce the eigenvalues once `j >= 1`.
    pub variant_values: Vec<f64>,
}

impl MuSequence {
    pub fn counts_increasing(&self) -> bool {
        self.count_order_violations.is_empty()
    }

    pub fn counts_bounded(&self) -> bool {
        self.count_bound_violations.is_empty()
    }
}

/// Levels `{2j, 2j+1, 4m-2j, 4m-2j+1}` within `[1, 4m]`, for `j <= m`.
pub fn class_levels(m: usize, j: usize) -> Vec<usize> {
    let n = 4 * m;
    let mut lv: Vec<usize> = [2 * j, 2 * j + 1, n - 2 * j, n - 2 * j + 1]
        .into_iter()
        .filter(|&s| (1..=n).contains(&s))
        .collect();
    lv.sort_unstable();
    lv.dedup();
    lv
}

/// `ln mu_{2j+1}` for `n = 4m`.
pub fn ln_mu(m: usize, j: usize) -> f64 {
    let n = (4 * m) as f64;
    let jf = j as f64;
    (n - 1.0) * LN_2 - PI.ln() + ln_beta((2.0 * jf + 1.0) / 2.0, (n + 1.0 - 2.0 * jf) / 2.0)
}

pub fn mu_sequence(m: usize) -> Result<MuSequence> {
    if m == 0 {
        return Err(Error::Argument("mu sequence needs m >= 1".into()));
    }
    let n = 4 * m;
    check_cap("mu sequence", n, STREAM_CAP)?;
    let levels_exact = lambda_levels(n)?;
    let binom = binomial_row(n)?;

    let mut seq = MuSequence {
        m,
        mu: Vec::with_capacity(m + 1),
        ln_mu: Vec::with_capacity(m + 1),
        exact: Vec::with_capacity(m + 1),
        signs: Vec::with_capacity(m + 1),
        levels: Vec::with_capacity(m + 1),
        counts: Vec::with_capacity(m + 1),
        count_order_violations: Vec::new(),
        count_bound_violations: Vec::new(),
        max_relative_error: 0.0,
        variant_values: Vec::with_capacity(m + 1),
    };

    let prefactor = (n as f64 - 1.0) * LN_2 - PI.ln();
    for j in 0..=m {
        let lv = class_levels(m, j);

        let value = levels_exact[lv[0]].clone();
        for &s in &lv[1..] {
            if levels_exact[s] != value {
                return Err(Error::Integrity(format!(
                    "level identification lambda({}) = lambda({s}) fails at n = {n}",
                    lv[0]
                )));
            }
        }
        let sign: i8 = if j % 2 == 0 { 1 } else { -1 };
        let sign_ok = if sign > 0 { value.is_positive() } else { value.is_negative() };
        if !sign_ok {
            return Err(Error::Integrity(format!(
                "class {j} at n = {n}: lambda({}) = {value} has the wrong sign",
                lv[0]
            )));
        }

        let jf = j as f64;
        let ln_mu = ln_mu(m, j);
        let rel = ((ln_abs(&value) - ln_mu).exp_m1()).abs();
        seq.max_relative_error = seq.max_relative_error.max(rel);
        let variant =
            (prefactor + ln_beta((2.0 * jf + 1.0) / 2.0, (n as f64 + 1.0 - jf) / 2.0)).exp();

        seq.counts.push(lv.iter().map(|&s| &binom[s]).sum());
        seq.mu.push(ln_mu.exp());
        seq.ln_mu.push(ln_mu);
        seq.exact.push(value);
        seq.signs.push(sign);
        seq.levels.push(lv);
        seq.variant_values.push(variant);
    }

    for j in 0..m {
        if seq.exact[j].abs() <= seq.exact[j + 1].abs() {
            return Err(Error::Integrity(format!(
                "ordering mu_{} > mu_{} fails at n = {n}",
                2 * j + 1,
                2 * j + 3
            )));
        }
    }
    if seq.max_relative_error > 1e-9 {
        return Err(Error::Integrity(format!(
            "Beta form misses exact eigenvalues by {:.3e} at n = {n}",
            seq.max_relative_error
        )));
    }
    for j in 0..m {
        if seq.counts[j] >= seq.counts[j + 1] {
            seq.count_order_violations.push(j);
        }
    }
    for j in 0..=m {
        if seq.counts[j] >= &binom[2 * j + 1] * 4 {
            seq.count_bound_violations.push(j);
        }
    }
    Ok(seq)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn kraw_sum_examples() {
        assert_eq!(lambda_kraw_sum(4, 0).unwrap(), b(11));
        assert_eq!(lambda_kraw_sum(4, 1).unwrap(), b(3));
        assert_eq!(lambda_kraw_sum(4, 2).unwrap(), b(-1));
    }

    #[test]
    fn genfunc_examples() {
        assert_eq!(lambda_genfunc(4, 1).unwrap(), b(3));
        assert_eq!(lambda_genfunc(4, 4).unwrap(), b(3));
        assert_eq!(lambda_genfunc(4, 2).unwrap(), b(-1));
        assert!(matches!(lambda_genfunc(4, 0), Err(Error::Argument(_))));
        assert!(matches!(lambda_genfunc(4, 5), Err(Error::Argument(_))));
    }

    #[test]
    fn beta_examples() {
        assert!((lambda_beta(4, 1).unwrap() - 3.0).abs() < 1e-12);
        assert!((lambda_beta(4, 2).unwrap() + 1.0).abs() < 1e-12);
        let exact = lambda_genfunc(8, 8).unwrap();
        let approx = lambda_beta(8, 8).unwrap();
        let e = crate::exact::to_f64(&exact);
        assert!(((approx - e) / e).abs() < 1e-9);
        assert!(matches!(lambda_beta(6, 1), Err(Error::Unsupported(_))));
    }

    #[test]
    fn levels_match_single_level_routes() {
        for n in 1..=40 {
            let all = lambda_levels(n).unwrap();
            assert_eq!(all[0], lambda_kraw_sum(n, 0).unwrap());
            for s in 1..=n {
                assert_eq!(all[s], lambda_genfunc(n, s).unwrap(), "n={n} s={s}");
            }
        }
    }

    #[test]
    fn summary_small_cases() {
        let t = spectrum_summary(4).unwrap();
        let blocks: Vec<(BigInt, BigInt)> =
            t.blocks().iter().map(|b| (b.value.clone(), b.multiplicity.clone())).collect();
        assert_eq!(blocks, vec![(b(3), b(5)), (b(-1), b(10))]);
        assert_eq!(t.trivial_eigenvalue(), &b(11));

        let t = spectrum_summary(2).unwrap();
        let blocks: Vec<(BigInt, BigInt)> =
            t.blocks().iter().map(|b| (b.value.clone(), b.multiplicity.clone())).collect();
        assert_eq!(blocks, vec![(b(1), b(2)), (b(-1), b(1))]);

        let t = spectrum_summary(1).unwrap();
        assert_eq!(t.blocks().len(), 1);
        assert_eq!(t.blocks()[0].value, b(1));
        assert_eq!(t.blocks()[0].multiplicity, b(1));
        assert!(spectrum_summary(0).is_err());
    }

    #[test]
    fn expanded_small() {
        assert_eq!(spectrum_summary(2).unwrap().expanded().unwrap(), vec![1, 1, -1]);
        assert_eq!(spectrum_summary(3).unwrap().expanded().unwrap(), vec![2, 2, 2, 0, 0, 0, -2]);
    }

    #[test]
    fn mu_sequence_m1() {
        let s = mu_sequence(1).unwrap();
        assert_eq!(s.exact, vec![b(3), b(-1)]);
        assert!((s.mu[0] - 3.0).abs() < 1e-12);
        assert!((s.mu[1] - 1.0).abs() < 1e-12);
        assert_eq!(s.counts, vec![b(5), b(10)]);
        assert_eq!(s.levels, vec![vec![1, 4], vec![2, 3]]);
        assert!(s.counts_increasing() && s.counts_bounded());
        // The variant form gives 8/pi * B(3/2, 2) = 32/(15 pi) at j = 1.
        assert!((s.variant_values[1] - 32.0 / (15.0 * PI)).abs() < 1e-12);
    }

    #[test]
    fn mu_sequence_m2_ordering() {
        let s = mu_sequence(2).unwrap();
        assert_eq!(s.mu.len(), 3);
        assert!(s.mu[0] > s.mu[1] && s.mu[1] > s.mu[2]);
        assert_eq!(s.counts, vec![b(9), b(120), b(126)]);
    }

    #[test]
    fn mu_sequence_reports_count_order_breaks() {
        // From m = 3 on, the middle class holds only two levels and the last
        // count drops below its predecessor.
        let s = mu_sequence(3).unwrap();
        assert_eq!(s.counts, vec![b(13), b(364), b(2002), b(1716)]);
        assert_eq!(s.count_order_violations, vec![2]);
        assert!(s.counts_bounded());
    }
}
