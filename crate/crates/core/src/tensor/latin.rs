use crate::error::{check_cap, Error, Result};

/// Largest order handled by the enumerator.
pub const ENUMERATION_CAP: usize = 5;
/// Largest order a square may have.
pub const ORDER_CAP: usize = 64;

/// Order-`q` Latin square, row-major, symbols in `0..q`.
///
/// `(i, j, L[i][j])` marks the ones of a 0/1 three-way tensor whose every
/// axis-parallel line sums to 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LatinSquare {
    order: usize,
    cells: Vec<u8>,
}

impl LatinSquare {
    pub fn new(order: usize, cells: Vec<u8>) -> Result<Self> {
        let sq = LatinSquare { order, cells };
        sq.validate()?;
        Ok(sq)
    }

    pub(crate) fn from_cells_unchecked(order: usize, cells: Vec<u8>) -> Self {
        debug_assert!(is_latin(order, &cells));
        LatinSquare { order, cells }
    }

    /// `L[i][j] = (i + j) mod q`.
    pub fn cyclic(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::Argument("order must be >= 1".into()));
        }
        check_cap("Latin square order", order, ORDER_CAP)?;
        let cells = (0..order * order)
            .map(|p| ((p / order + p % order) % order) as u8)
            .collect();
        Ok(LatinSquare { order, cells })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn cells(&self) -> &[u8] {
        &self.cells
    }

    pub fn get(&self, row: usize, col: usize) -> usize {
        self.cells[row * self.order + col] as usize
    }

    pub fn rows(&self) -> Vec<Vec<u8>> {
        self.cells.chunks(self.order).map(<[u8]>::to_vec).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.order == 0 {
            return Err(Error::Argument("order must be >= 1".into()));
        }
        check_cap("Latin square order", self.order, ORDER_CAP)?;
        if self.cells.len() != self.order * self.order {
            return Err(Error::Dimension {
                expected: self.order * self.order,
                got: self.cells.len(),
            });
        }
        if !is_latin(self.order, &self.cells) {
            return Err(Error::Argument("rows or columns repeat a symbol".into()));
        }
        Ok(())
    }

    /// Applies the same relabeling to rows, columns and symbols:
    /// `L'[p(i)][p(j)] = p(L[i][j])`.
    pub fn relabel(&self, p: &[usize]) -> LatinSquare {
        let q = self.order;
        let mut cells = vec![0u8; q * q];
        for i in 0..q {
            for j in 0..q {
                cells[p[i] * q + p[j]] = p[self.get(i, j)] as u8;
            }
        }
        LatinSquare { order: q, cells }
    }
}

pub(crate) fn is_latin(q: usize, cells: &[u8]) -> bool {
    if cells.len() != q * q {
        return false;
    }
    let full: u64 = if q == 64 { u64::MAX } else { (1u64 << q) - 1 };
    let mut cols = vec![0u64; q];
    for row in cells.chunks_exact(q) {
        let mut seen = 0u64;
        for (c, &s) in row.iter().enumerate() {
            let s = s as usize;
            if s >= q {
                return false;
            }
            seen |= 1 << s;
            cols[c] |= 1 << s;
        }
        if seen != full {
            return false;
        }
    }
    cols.iter().all(|&c| c == full)
}

/// Every Latin square of order `q`, in lexicographic row-major order.
pub fn latin_square_enumerate(q: usize) -> Result<LatinSquares> {
    if q == 0 {
        return Err(Error::Argument("order must be >= 1".into()));
    }
    check_cap("Latin square enumeration", q, ENUMERATION_CAP)?;
    Ok(LatinSquares {
        q,
        cells: vec![0; q * q],
        next: vec![0; q * q],
        row_used: vec![0; q],
        col_used: vec![0; q],
        pos: 0,
        done: false,
    })
}

/// Backtracking enumerator with row and column symbol masks.
#[derive(Debug, Clone)]
pub struct LatinSquares {
    q: usize,
    cells: Vec<u8>,
    next: Vec<u8>,
    row_used: Vec<u32>,
    col_used: Vec<u32>,
    pos: usize,
    done: bool,
}

impl LatinSquares {
    fn unplace(&mut self, p: usize) {
        let (r, c) = (p / self.q, p % self.q);
        let bit = 1u32 << self.cells[p];
        self.row_used[r] &= !bit;
        self.col_used[c] &= !bit;
    }
}

impl Iterator for LatinSquares {
    type Item = LatinSquare;

    fn next(&mut self) -> Option<LatinSquare> {
        let q = self.q;
        let total = q * q;
        loop {
            if self.done {
                return None;
            }
            if self.pos == total {
                let square = LatinSquare::from_cells_unchecked(q, self.cells.clone());
                self.pos -= 1;
                self.unplace(self.pos);
                return Some(square);
            }
            let p = self.pos;
            let (r, c) = (p / q, p % q);
            let used = self.row_used[r] | self.col_used[c];
            match (self.next[p] as usize..q).find(|&s| used & (1 << s) == 0) {
                Some(s) => {
                    self.cells[p] = s as u8;
                    self.next[p] = s as u8 + 1;
                    self.row_used[r] |= 1 << s;
                    self.col_used[c] |= 1 << s;
                    self.pos += 1;
                }
                None => {
                    self.next[p] = 0;
                    if p == 0 {
                        self.done = true;
                        return None;
                    }
                    self.pos -= 1;
                    self.unplace(self.pos);
                }
            }
        }
    }
}
