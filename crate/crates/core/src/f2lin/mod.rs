//! Linear algebra over F₂ on word-packed vectors.
//!
//! A vector of `V = (F₂)ⁿ` is a [`Word`] whose bit `k` is coordinate `k`.
//! When `V` is split into `b` S-box blocks of width `m`, block `j` (0-based)
//! occupies bits `[j·m, (j+1)·m)`.

mod blocks;
mod enumerate;
mod gf;
mod linmap;
mod subspace;

pub use blocks::{BlockLayout, BlockProfile};
pub use enumerate::{
    count_subspaces, enumerate_subspaces, enumerate_subspaces_of, gaussian_binomial, SubspaceIter,
};
pub use gf::GfContext;
pub use linmap::LinearMap;
pub use subspace::Subspace;

use crate::error::{Error, Result};

/// Packed coordinate word. `n ≤ 16` is enforced wherever a dimension enters.
pub type Word = u32;

/// Largest ambient dimension accepted anywhere in the crate.
pub const MAX_DIM: usize = 16;

/// Largest ambient dimension for exhaustive enumerations.
pub const MAX_ENUM_DIM: usize = 12;

/// An element of `(F₂)ⁿ` carrying its dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct F2Vector {
    bits: Word,
    dim: u8,
}

impl F2Vector {
    pub fn new(bits: Word, dim: usize) -> Result<Self> {
        check_dim(dim)?;
        if bits & !mask(dim) != 0 {
            return Err(Error::out_of_range(format!(
                "vector {bits:#x} has bits beyond dimension {dim}"
            )));
        }
        Ok(F2Vector {
            bits,
            dim: dim as u8,
        })
    }

    pub fn zero(dim: usize) -> Self {
        F2Vector {
            bits: 0,
            dim: dim as u8,
        }
    }

    pub fn basis_vector(k: usize, dim: usize) -> Self {
        assert!(k < dim);
        F2Vector {
            bits: 1 << k,
            dim: dim as u8,
        }
    }

    #[inline]
    pub fn bits(self) -> Word {
        self.bits
    }

    #[inline]
    pub fn dim(self) -> usize {
        self.dim as usize
    }

    pub fn dot(self, other: F2Vector) -> bool {
        dot(self.bits, other.bits)
    }
}

impl std::ops::Add for F2Vector {
    type Output = F2Vector;

    fn add(self, rhs: F2Vector) -> F2Vector {
        debug_assert_eq!(self.dim, rhs.dim);
        F2Vector {
            bits: self.bits ^ rhs.bits,
            dim: self.dim,
        }
    }
}

impl From<F2Vector> for Word {
    fn from(v: F2Vector) -> Word {
        v.bits
    }
}

/// Standard inner product on packed bits.
#[inline]
pub fn dot(a: Word, b: Word) -> bool {
    (a & b).count_ones() & 1 == 1
}

/// Mask with the low `n` bits set.
#[inline]
pub fn mask(n: usize) -> Word {
    if n >= 32 {
        Word::MAX
    } else {
        (1 << n) - 1
    }
}

pub(crate) fn check_dim(n: usize) -> Result<()> {
    if n > MAX_DIM {
        return Err(Error::TooLarge {
            what: "dimension",
            value: n,
            limit: MAX_DIM,
        });
    }
    Ok(())
}

/// Checks whether `points` (pairwise distinct) form an affine subspace.
pub fn is_affine_set(points: &[Word]) -> bool {
    let len = points.len();
    if len == 0 || !len.is_power_of_two() {
        return false;
    }
    let target = len.trailing_zeros() as usize;
    let origin = points[0];
    let mut echelon = Echelon::default();
    for &p in &points[1..] {
        if echelon.insert(p ^ origin) && echelon.rank() > target {
            return false;
        }
    }
    echelon.rank() == target
}

/// Incremental (non-reduced) echelon basis used for rank tests.
#[derive(Clone, Debug, Default)]
pub(crate) struct Echelon {
    // rows[p] has highest bit p, or 0
    rows: [Word; 32],
    rank: usize,
}

impl Echelon {
    /// Inserts `v`; returns true if it increased the rank.
    pub(crate) fn insert(&mut self, mut v: Word) -> bool {
        while v != 0 {
            let p = 31 - v.leading_zeros() as usize;
            if self.rows[p] == 0 {
                self.rows[p] = v;
                self.rank += 1;
                return true;
            }
            v ^= self.rows[p];
        }
        false
    }

    pub(crate) fn rank(&self) -> usize {
        self.rank
    }
}
