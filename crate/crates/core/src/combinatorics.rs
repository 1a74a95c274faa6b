//! Exact binomial coefficients and Krawtchouk polynomials.
//!
//! Everything here is exact [`BigInt`] arithmetic. Dense tables are limited to
//! `n <= DENSE_CAP`; single rows and single values stream up to `STREAM_CAP`.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{check_cap, Error, Result};

/// Largest order for which dense `(n+1) x (n+1)` tables are built.
pub const DENSE_CAP: usize = 512;

/// Largest order for which rows are streamed on demand.
pub const STREAM_CAP: usize = 4096;

/// Pascal triangle of exact binomial coefficients, rows `0..=n_max`.
#[derive(Debug, Clone)]
pub struct BinomialCache {
    rows: Vec<Vec<BigInt>>,
}

impl BinomialCache {
    pub fn new(n_max: usize) -> Result<Self> {
        check_cap("binomial cache", n_max, DENSE_CAP)?;
        let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(n_max + 1);
        rows.push(vec![BigInt::one()]);
        for n in 1..=n_max {
            let prev = &rows[n - 1];
            let mut row = Vec::with_capacity(n + 1);
            row.push(BigInt::one());
            for k in 1..n {
                row.push(&prev[k - 1] + &prev[k]);
            }
            row.push(BigInt::one());
            rows.push(row);
        }
        Ok(Self { rows })
    }

    pub fn n_max(&self) -> usize {
        self.rows.len() - 1
    }

    /// `C(n, k)`, zero when `k < 0` or `k > n`.
    pub fn binomial(&self, n: usize, k: i64) -> Result<BigInt> {
        check_cap("binomial cache lookup", n, self.n_max())?;
        if k < 0 || k as usize > n {
            return Ok(BigInt::zero());
        }
        Ok(self.rows[n][k as usize].clone())
    }

    pub fn row(&self, n: usize) -> Result<&[BigInt]> {
        check_cap("binomial cache lookup", n, self.n_max())?;
        Ok(&self.rows[n])
    }
}

/// Row `n` of Pascal's triangle, built multiplicatively without a table.
pub fn binomial_row(n: usize) -> Result<Vec<BigInt>> {
    check_cap("binomial row", n, STREAM_CAP)?;
    let mut row = Vec::with_capacity(n + 1);
    let mut c = BigInt::one();
    row.push(c.clone());
    for k in 1..=n {
        c = c * (n + 1 - k) / k;
        row.push(c.clone());
    }
    Ok(row)
}

/// Exact `C(n, k)`; zero when `k < 0` or `k > n`.
pub fn binomial(n: usize, k: i64) -> Result<BigInt> {
    check_cap("binomial", n, STREAM_CAP)?;
    if k < 0 || k as usize > n {
        return Ok(BigInt::zero());
    }
    let k = (k as usize).min(n - k as usize);
    let mut c = BigInt::one();
    for j in 1..=k {
        c = c * (n + 1 - j) / j;
    }
    Ok(c)
}

fn row_get(row: &[BigInt], k: usize) -> BigInt {
    row.get(k).cloned().unwrap_or_else(BigInt::zero)
}

/// Krawtchouk sum `sum_j (-1)^j C(i, j) C(n-i, k-j)` given the two rows.
fn krawtchouk_from_rows(k: usize, row_i: &[BigInt], row_rest: &[BigInt]) -> BigInt {
    let mut acc = BigInt::zero();
    for j in 0..=k.min(row_i.len() - 1) {
        let term = &row_i[j] * row_get(row_rest, k - j);
        if j % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

fn check_index(name: &str, v: usize, n: usize) -> Result<()> {
    if v > n {
        return Err(Error::Argument(format!("{name} = {v} outside [0, {n}]")));
    }
    Ok(())
}

/// Degree-`k` Krawtchouk polynomial for the `n`-cube evaluated at `i`.
pub fn krawtchouk(n: usize, k: usize, i: usize) -> Result<BigInt> {
    check_cap("krawtchouk", n, STREAM_CAP)?;
    check_index("k", k, n)?;
    check_index("i", i, n)?;
    let row_i = binomial_row(i)?;
    let row_rest = binomial_row(n - i)?;
    Ok(krawtchouk_from_rows(k, &row_i, &row_rest))
}

/// Dense table of `K_k(i)` for `0 <= k, i <= n`.
#[derive(Debug, Clone)]
pub struct KrawtchoukTable {
    n: usize,
    // values[k][i]
    values: Vec<Vec<BigInt>>,
}

impl KrawtchoukTable {
    pub fn new(n: usize) -> Result<Self> {
        let cache = BinomialCache::new(n)?;
        Self::with_cache(n, &cache)
    }

    pub fn with_cache(n: usize, cache: &BinomialCache) -> Result<Self> {
        check_cap("krawtchouk table", n, cache.n_max())?;
        let mut values = vec![Vec::with_capacity(n + 1); n + 1];
        for i in 0..=n {
            let row_i = cache.row(i)?;
            let row_rest = cache.row(n - i)?;
            for (k, col) in values.iter_mut().enumerate() {
                col.push(krawtchouk_from_rows(k, row_i, row_rest));
            }
        }
        Ok(Self { n, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, k: usize, i: usize) -> Result<&BigInt> {
        check_index("k", k, self.n)?;
        check_index("i", i, self.n)?;
        Ok(&self.values[k][i])
    }

    /// Row `k`, i.e. `K_k(0..=n)`.
    pub fn degree(&self, k: usize) -> Result<&[BigInt]> {
        check_index("k", k, self.n)?;
        Ok(&self.values[k])
    }
}

/// `sum_{j=0}^{d} (-1)^j C(n, j)` in closed form, `(-1)^d C(n-1, d)`.
pub fn alternating_prefix(n: usize, d: usize) -> Result<BigInt> {
    check_cap("alternating prefix", n, STREAM_CAP)?;
    check_index("D", d, n)?;
    if n == 0 {
        // Only d = 0 is in range; the sum is the single term C(0, 0).
        return Ok(BigInt::one());
    }
    let c = binomial(n - 1, d as i64)?;
    Ok(if d % 2 == 0 { c } else { -c })
}
