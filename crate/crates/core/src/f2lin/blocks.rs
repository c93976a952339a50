use serde::{Deserialize, Serialize};

use super::{check_dim, mask, Subspace, Word};
use crate::error::{Error, Result};

/// Split of `V = (F₂)ⁿ` into `b` blocks of width `m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlockLayout {
    b: usize,
    m: usize,
}

/// `J_U` and `dim(U ∩ V_j)` for every block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockProfile {
    /// Blocks `j` with `U ∩ V_j ≠ V_j`, 0-based, ascending.
    pub j_set: Vec<usize>,
    pub dims: Vec<usize>,
}

impl BlockLayout {
    pub fn new(b: usize, m: usize) -> Result<Self> {
        if b == 0 || m == 0 {
            return Err(Error::out_of_range("block count and width must be positive"));
        }
        check_dim(b * m)?;
        Ok(BlockLayout { b, m })
    }

    #[inline]
    pub fn b(&self) -> usize {
        self.b
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.b * self.m
    }

    /// Bits of block `j`.
    #[inline]
    pub fn block_mask(&self, j: usize) -> Word {
        mask(self.m) << (j * self.m)
    }

    /// Coordinates of `v` in block `j`, shifted down to bit 0.
    #[inline]
    pub fn block(&self, v: Word, j: usize) -> Word {
        (v >> (j * self.m)) & mask(self.m)
    }

    /// Places `x` into block `j` of an otherwise zero vector.
    #[inline]
    pub fn embed(&self, x: Word, j: usize) -> Word {
        (x & mask(self.m)) << (j * self.m)
    }

    /// `⊕_{j∈I} V_j`, where bit `j` of `set` marks `j ∈ I`.
    pub fn sum_of_blocks(&self, set: Word) -> Subspace {
        let bits = (0..self.b)
            .filter(|&j| set >> j & 1 == 1)
            .flat_map(|j| (0..self.m).map(move |k| 1 << (j * self.m + k)));
        Subspace::span_unchecked(bits, self.n())
    }

    /// All walls with their index sets, ordered by index-set bitmask.
    pub fn walls(&self) -> Vec<(Word, Subspace)> {
        (1..mask(self.b))
            .map(|set| (set, self.sum_of_blocks(set)))
            .collect()
    }

    /// Index set `I` (bitmask) when `u` is a wall.
    pub fn is_wall(&self, u: &Subspace) -> Option<Word> {
        if u.ambient_dim() != self.n() || u.is_trivial() || u.dim() % self.m != 0 {
            return None;
        }
        let mut set = 0;
        for j in 0..self.b {
            let bm = self.block_mask(j);
            let inside = u.basis().iter().filter(|&&r| r & !bm == 0).count();
            if inside == self.m {
                set |= 1 << j;
            }
        }
        (self.sum_of_blocks(set) == *u && set != 0).then_some(set)
    }

    pub fn profile(&self, u: &Subspace) -> Result<BlockProfile> {
        if u.ambient_dim() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: u.ambient_dim(),
            });
        }
        let mut dims = Vec::with_capacity(self.b);
        let mut j_set = Vec::new();
        for j in 0..self.b {
            let d = u.intersection(&self.sum_of_blocks(1 << j)).dim();
            if d < self.m {
                j_set.push(j);
            }
            dims.push(d);
        }
        if u.dim() + 1 == self.n() {
            assert!(
                j_set.iter().all(|&j| dims[j] + 1 == self.m),
                "hyperplane meets a block in codimension > 1"
            );
        }
        Ok(BlockProfile { j_set, dims })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::f2lin::enumerate_subspaces;

    #[test]
    fn first_block_is_a_wall() {
        let l = BlockLayout::new(2, 4).unwrap();
        let v1 = Subspace::span([1, 2, 4, 8], 8).unwrap();
        assert_eq!(l.is_wall(&v1), Some(0b01));
        let diag = Subspace::span((0..4).map(|k| (1 << k) | (1 << (k + 4))), 8).unwrap();
        assert_eq!(l.is_wall(&diag), None);
        assert_eq!(l.is_wall(&Subspace::full(8)), None);
        assert_eq!(l.is_wall(&Subspace::zero(8)), None);
    }

    #[test]
    fn wall_counts() {
        assert_eq!(BlockLayout::new(3, 2).unwrap().walls().len(), 6);
        for (b, m) in [(2, 2), (2, 3), (3, 2), (2, 4), (4, 2)] {
            let l = BlockLayout::new(b, m).unwrap();
            let found = enumerate_subspaces(b * m, None)
                .unwrap()
                .filter(|u| l.is_wall(u).is_some())
                .count();
            assert_eq!(found, (1 << b) - 2, "b={b} m={m}");
        }
    }

    #[test]
    fn profiles() {
        let l = BlockLayout::new(2, 4).unwrap();
        let p = l.profile(&Subspace::kernel_of(0x01, 8).unwrap()).unwrap();
        assert_eq!(p.j_set, vec![0]);
        assert_eq!(p.dims, vec![3, 4]);
        assert!(l.profile(&Subspace::full(8)).unwrap().j_set.is_empty());
        let p = l.profile(&Subspace::kernel_of(0x11, 8).unwrap()).unwrap();
        assert_eq!(p.j_set, vec![0, 1]);
        assert_eq!(p.dims, vec![3, 3]);
    }

    #[test]
    fn block_coordinates() {
        let l = BlockLayout::new(3, 4).unwrap();
        assert_eq!(l.block(0xabc, 1), 0xb);
        assert_eq!(l.embed(0x5, 2), 0x500);
    }
}
