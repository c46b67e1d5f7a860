//! Deterministic enumeration of low-dimensional subspaces.
//!
//! Subspaces are listed by dimension, then by pivot-column set in
//! lexicographic order, then by the free entries of the canonical basis read
//! row by row (first free entry most significant). Every index maps to its
//! subspace directly, so any index range can be handed to a worker.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use super::{LinalgError, Matrix, Subspace};
use crate::gf::{Elem, FieldRef};

/// Gaussian binomial `[k choose d]_q` by the product formula.
pub fn gaussian_binomial(k: usize, d: usize, q: u32) -> BigUint {
    if d > k {
        return BigUint::zero();
    }
    let q = BigUint::from(q);
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..d {
        num *= q.pow((k - i) as u32) - 1u32;
        den *= q.pow((i + 1) as u32) - 1u32;
    }
    num / den
}

/// Number of subspaces of `F_q^ambient` with dimension in `1..=r`.
pub fn subspace_count(ambient: usize, r: usize, q: u32) -> BigUint {
    (1..=r.min(ambient)).map(|d| gaussian_binomial(ambient, d, q)).sum()
}

#[derive(Clone, Debug)]
struct Block {
    dim: usize,
    pivots: Vec<usize>,
    /// (row, column) of each free entry, in significance order.
    free: Vec<(usize, usize)>,
    start: u64,
    count: u64,
}

/// Indexable stream of every subspace of dimension `1..=r`.
#[derive(Clone, Debug)]
pub struct SubspaceEnumerator {
    field: FieldRef,
    ambient: usize,
    r: usize,
    blocks: Vec<Block>,
    total: u64,
}

impl SubspaceEnumerator {
    /// Refuses with the exact count when it exceeds `budget`.
    pub fn new(field: &FieldRef, ambient: usize, r: usize, budget: u128) -> Result<Self, LinalgError> {
        let r = r.min(ambient);
        let count = subspace_count(ambient, r, field.q());
        let fits = count.to_u128().is_some_and(|c| c <= budget) && count.to_u64().is_some();
        if !fits {
            return Err(LinalgError::BudgetExceeded { count, budget });
        }
        let q = field.q() as u64;
        let mut blocks = Vec::new();
        let mut start = 0u64;
        for dim in 1..=r {
            for pivots in Combinations::new(ambient, dim) {
                let mut is_pivot = vec![false; ambient];
                for &p in &pivots {
                    is_pivot[p] = true;
                }
                let free: Vec<(usize, usize)> = pivots
                    .iter()
                    .enumerate()
                    .flat_map(|(row, &p)| (p + 1..ambient).filter(|&c| !is_pivot[c]).map(move |c| (row, c)))
                    .collect::<Vec<_>>();
                let count = q.pow(free.len() as u32);
                blocks.push(Block {
                    dim,
                    pivots,
                    free,
                    start,
                    count,
                });
                start += count;
            }
        }
        debug_assert_eq!(BigUint::from(start), subspace_count(ambient, r, field.q()));
        Ok(SubspaceEnumerator {
            field: field.clone(),
            ambient,
            r,
            blocks,
            total: start,
        })
    }

    pub fn len(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn max_dim(&self) -> usize {
        self.r
    }

    /// Index range holding the subspaces of dimension `d`.
    pub fn dim_range(&self, d: usize) -> std::ops::Range<u64> {
        let mut it = self.blocks.iter().filter(|b| b.dim == d);
        match it.next() {
            None => 0..0,
            Some(first) => {
                let end = it.next_back().map_or(first.start + first.count, |b| b.start + b.count);
                first.start..end
            }
        }
    }

    pub fn get(&self, index: u64) -> Subspace {
        assert!(index < self.total, "index {index} out of range {}", self.total);
        let bi = self.blocks.partition_point(|b| b.start + b.count <= index);
        let block = &self.blocks[bi];
        let q = self.field.q() as u64;
        let mut basis = Matrix::zeros(&self.field, block.dim, self.ambient);
        for (row, &p) in block.pivots.iter().enumerate() {
            basis.set(row, p, 1);
        }
        let mut local = index - block.start;
        for &(row, col) in block.free.iter().rev() {
            basis.set(row, col, (local % q) as Elem);
            local /= q;
        }
        Subspace::from_parts(basis, block.pivots.clone())
    }

    pub fn iter(&self) -> impl Iterator<Item = Subspace> + '_ {
        self.range(0, self.total)
    }

    pub fn range(&self, start: u64, end: u64) -> impl Iterator<Item = Subspace> + '_ {
        (start..end.min(self.total)).map(move |i| self.get(i))
    }
}

/// Lexicographic `d`-subsets of `0..n`.
struct Combinations {
    n: usize,
    cur: Option<Vec<usize>>,
}

impl Combinations {
    fn new(n: usize, d: usize) -> Self {
        Combinations {
            n,
            cur: (d <= n).then(|| (0..d).collect()),
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.cur.clone()?;
        let d = out.len();
        let mut next = out.clone();
        let mut i = d;
        loop {
            if i == 0 {
                self.cur = None;
                break;
            }
            i -= 1;
            if next[i] < self.n - d + i {
                next[i] += 1;
                for j in i + 1..d {
                    next[j] = next[j - 1] + 1;
                }
                self.cur = Some(next);
                break;
            }
        }
        Some(out)
    }
}
