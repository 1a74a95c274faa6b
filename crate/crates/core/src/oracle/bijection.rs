use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_cap, Error, Result};

/// Largest cube dimension for which a bijection is stored explicitly.
pub const BIJECTION_CAP: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Identity,
    Complement,
    CoordinatePermutation,
    Random,
    Search,
    Explicit,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Identity => "identity",
            Family::Complement => "complement",
            Family::CoordinatePermutation => "coordinate-permutation",
            Family::Random => "random",
            Family::Search => "search",
            Family::Explicit => "explicit",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchMode {
    Exhaustive,
    LocalSearch,
}

/// How a search-produced bijection was found.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchTrace {
    pub mode: SearchMode,
    pub evaluated: u64,
    pub restarts: u64,
    pub steps: u64,
    pub improvements: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub family: Family,
    pub seed: Option<u64>,
    pub trace: Option<SearchTrace>,
}

impl Provenance {
    pub fn named(family: Family) -> Self {
        Provenance {
            family,
            seed: None,
            trace: None,
        }
    }
}

/// A permutation of the vertex indices `0..2^n`.
///
/// Vertex `i` stands for the sign vector whose coordinate `b` is `-1` exactly
/// when bit `b` of `i` is set; Hamming distance is `popcount(i ^ j)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bijection {
    n: usize,
    map: Vec<u32>,
    provenance: Provenance,
}

impl Bijection {
    pub fn new(n: usize, map: Vec<u32>, provenance: Provenance) -> Result<Self> {
        check_cap("bijection", n, BIJECTION_CAP)?;
        let size = 1usize << n;
        if map.len() != size {
            return Err(Error::Dimension {
                expected: size,
                got: map.len(),
            });
        }
        let mut seen = vec![false; size];
        for &y in &map {
            let y = y as usize;
            if y >= size || seen[y] {
                return Err(Error::Argument(format!(
                    "image {y} repeated or out of range: not a bijection"
                )));
            }
            seen[y] = true;
        }
        Ok(Bijection { n, map, provenance })
    }

    pub fn identity(n: usize) -> Result<Self> {
        check_cap("bijection", n, BIJECTION_CAP)?;
        let map = (0..1u32 << n).collect();
        Ok(Bijection {
            n,
            map,
            provenance: Provenance::named(Family::Identity),
        })
    }

    /// `x -> -x`.
    pub fn complement(n: usize) -> Result<Self> {
        check_cap("bijection", n, BIJECTION_CAP)?;
        let mask = (1u32 << n) - 1;
        let map = (0..1u32 << n).map(|x| x ^ mask).collect();
        Ok(Bijection {
            n,
            map,
            provenance: Provenance::named(Family::Complement),
        })
    }

    /// Coordinate `b` of the image is coordinate `coords[b]` of the input,
    /// negated when bit `b` of `flips` is set. Preserves all inner products.
    pub fn isometry(n: usize, coords: &[usize], flips: u32) -> Result<Self> {
        check_cap("bijection", n, BIJECTION_CAP)?;
        let mut sorted = coords.to_vec();
        sorted.sort_unstable();
        if sorted != (0..n).collect::<Vec<_>>() {
            return Err(Error::Argument(format!(
                "{coords:?} is not a permutation of the {n} coordinates"
            )));
        }
        let mask = ((1u64 << n) - 1) as u32;
        let map = (0..1u32 << n)
            .map(|x| {
                let mut y = 0u32;
                for (b, &src) in coords.iter().enumerate() {
                    y |= ((x >> src) & 1) << b;
                }
                y ^ (flips & mask)
            })
            .collect();
        Ok(Bijection {
            n,
            map,
            provenance: Provenance::named(Family::CoordinatePermutation),
        })
    }

    /// Uniform random bijection from a seeded shuffle.
    pub fn random(n: usize, seed: u64) -> Result<Self> {
        check_cap("bijection", n, BIJECTION_CAP)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut map: Vec<u32> = (0..1u32 << n).collect();
        map.shuffle(&mut rng);
        Ok(Bijection {
            n,
            map,
            provenance: Provenance {
                family: Family::Random,
                seed: Some(seed),
                trace: None,
            },
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn map(&self) -> &[u32] {
        &self.map
    }

    pub fn image(&self, i: usize) -> usize {
        self.map[i] as usize
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    /// `self` after `first`: `x -> self(first(x))`.
    pub fn compose(&self, first: &Bijection) -> Result<Bijection> {
        if self.n != first.n {
            return Err(Error::Dimension {
                expected: self.len(),
                got: first.len(),
            });
        }
        let map = first.map.iter().map(|&x| self.map[x as usize]).collect();
        Ok(Bijection {
            n: self.n,
            map,
            provenance: Provenance::named(Family::Explicit),
        })
    }

    pub fn inverse(&self) -> Bijection {
        let mut inv = vec![0u32; self.map.len()];
        for (x, &y) in self.map.iter().enumerate() {
            inv[y as usize] = x as u32;
        }
        Bijection {
            n: self.n,
            map: inv,
            provenance: Provenance::named(Family::Explicit),
        }
    }
}
