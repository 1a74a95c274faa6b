use rand::Rng;

/// Jacobson-Matthews walk on Latin squares of order `q >= 2`.
///
/// An improper square has one cell holding `+a +b -z`; `cells` at that
/// position is unused while `improper` is set.
#[derive(Debug, Clone)]
pub(crate) struct JmState {
    q: usize,
    pub(crate) cells: Vec<u8>,
    improper: Option<Improper>,
}

#[derive(Debug, Clone, Copy)]
struct Improper {
    r: usize,
    c: usize,
    pos: [u8; 2],
    neg: u8,
}

impl JmState {
    pub(crate) fn new(q: usize, cells: Vec<u8>) -> Self {
        debug_assert_eq!(cells.len(), q * q);
        JmState { q, cells, improper: None }
    }

    fn at(&self, r: usize, c: usize) -> u8 {
        self.cells[r * self.q + c]
    }

    fn rows_with(&self, c: usize, s: u8, skip: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.q).filter(move |&r| r != skip && self.at(r, c) == s)
    }

    fn cols_with(&self, r: usize, s: u8, skip: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.q).filter(move |&c| c != skip && self.at(r, c) == s)
    }

    fn step<R: Rng>(&mut self, rng: &mut R) {
        let q = self.q;
        let (r, c, s, s1, r1, c1, centre) = match self.improper.take() {
            None => {
                let r = rng.gen_range(0..q);
                let c = rng.gen_range(0..q);
                let s1 = self.at(r, c);
                let s = rng.gen_range(0..q - 1) as u8;
                let s = if s >= s1 { s + 1 } else { s };
                let r1 = self.rows_with(c, s, r).next().expect("column holds every symbol");
                let c1 = self.cols_with(r, s, c).next().expect("row holds every symbol");
                (r, c, s, s1, r1, c1, s)
            }
            Some(imp) => {
                let pick = rng.gen_range(0..2);
                let s1 = imp.pos[pick];
                let s = imp.neg;
                let rows: Vec<usize> = self.rows_with(imp.c, s, imp.r).collect();
                let cols: Vec<usize> = self.cols_with(imp.r, s, imp.c).collect();
                debug_assert_eq!((rows.len(), cols.len()), (2, 2));
                let r1 = rows[rng.gen_range(0..2)];
                let c1 = cols[rng.gen_range(0..2)];
                (imp.r, imp.c, s, s1, r1, c1, imp.pos[1 - pick])
            }
        };
        self.cells[r * q + c] = centre;
        self.cells[r * q + c1] = s1;
        self.cells[r1 * q + c] = s1;
        let t = self.at(r1, c1);
        if t == s1 {
            self.cells[r1 * q + c1] = s;
        } else {
            self.improper = Some(Improper { r: r1, c: c1, pos: [t, s], neg: s1 });
        }
    }

    /// One proper-to-proper move of the walk.
    pub(crate) fn step_to_proper<R: Rng>(&mut self, rng: &mut R) {
        if self.q < 2 {
            return;
        }
        self.step(rng);
        while self.improper.is_some() {
            self.step(rng);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::latin::{is_latin, LatinSquare};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashSet;

    #[test]
    fn stays_latin() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for q in [2usize, 3, 5, 8, 17] {
            let mut st = JmState::new(q, LatinSquare::cyclic(q).unwrap().cells().to_vec());
            for _ in 0..300 {
                st.step_to_proper(&mut rng);
                assert!(is_latin(q, &st.cells), "q = {q}");
            }
        }
    }

    #[test]
    fn reaches_every_order_four_square() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut st = JmState::new(4, LatinSquare::cyclic(4).unwrap().cells().to_vec());
        let mut seen = HashSet::new();
        for _ in 0..50_000 {
            st.step_to_proper(&mut rng);
            seen.insert(st.cells.clone());
        }
        assert_eq!(seen.len(), 576);
    }
}
