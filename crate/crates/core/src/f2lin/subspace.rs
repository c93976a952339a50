use std::fmt;

use serde::Serialize;

use super::{check_dim, mask, Word};
use crate::error::{Error, Result};

/// A subspace of `(F₂)ⁿ` held as its reduced row-echelon basis.
///
/// The pivot of a row is its highest set bit. No row has a set bit at
/// another row's pivot, and rows are sorted ascending, so two equal
/// subspaces always carry identical bases.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Subspace {
    #[serde(rename = "ambient_dim")]
    n: usize,
    basis: Vec<Word>,
}

impl Subspace {
    pub fn zero(n: usize) -> Self {
        Subspace {
            n,
            basis: Vec::new(),
        }
    }

    pub fn full(n: usize) -> Self {
        Subspace {
            n,
            basis: (0..n).map(|k| 1 << k).collect(),
        }
    }

    /// F₂-span of `vectors`.
    pub fn span<I: IntoIterator<Item = Word>>(vectors: I, n: usize) -> Result<Self> {
        check_dim(n)?;
        let mut s = Subspace::zero(n);
        for v in vectors {
            if v & !mask(n) != 0 {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: 32 - v.leading_zeros() as usize,
                });
            }
            s.insert(v);
        }
        Ok(s)
    }

    /// Span of vectors already known to lie in `(F₂)ⁿ`.
    pub(crate) fn span_unchecked<I: IntoIterator<Item = Word>>(vectors: I, n: usize) -> Self {
        let mut s = Subspace::zero(n);
        for v in vectors {
            s.insert(v);
        }
        s
    }

    /// Builds a subspace from rows that are already in canonical form.
    pub(crate) fn from_canonical(basis: Vec<Word>, n: usize) -> Self {
        debug_assert!(Subspace::span_unchecked(basis.iter().copied(), n).basis == basis);
        Subspace { n, basis }
    }

    /// Kernel of the functional `x ↦ ⟨x, c⟩`.
    pub fn kernel_of(c: Word, n: usize) -> Result<Self> {
        Ok(Subspace::span([c], n)?.orthogonal_complement())
    }

    /// Adds `v` to the span; returns true if the dimension grew.
    pub fn insert(&mut self, v: Word) -> bool {
        let r = self.reduce(v);
        if r == 0 {
            return false;
        }
        let p = 31 - r.leading_zeros();
        for row in &mut self.basis {
            if *row >> p & 1 == 1 {
                *row ^= r;
            }
        }
        let pos = self.basis.partition_point(|&row| row < r);
        self.basis.insert(pos, r);
        true
    }

    #[inline]
    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Number of elements, `2^dim`.
    #[inline]
    pub fn size(&self) -> usize {
        1 << self.basis.len()
    }

    pub fn basis(&self) -> &[Word] {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.n
    }

    pub fn is_trivial(&self) -> bool {
        self.is_zero() || self.is_full()
    }

    /// Canonical representative of the coset `v + U`.
    #[inline]
    pub fn reduce(&self, mut v: Word) -> Word {
        for &row in self.basis.iter().rev() {
            let p = 31 - row.leading_zeros();
            if v >> p & 1 == 1 {
                v ^= row;
            }
        }
        v
    }

    #[inline]
    pub fn contains(&self, v: Word) -> bool {
        self.reduce(v) == 0
    }

    /// Bitmask of pivot positions.
    pub fn pivot_mask(&self) -> Word {
        self.basis
            .iter()
            .fold(0, |acc, &row| acc | 1 << (31 - row.leading_zeros()))
    }

    /// Element with index `idx` in `0..size()`: XOR of the rows selected by the bits of `idx`.
    #[inline]
    pub fn element(&self, idx: usize) -> Word {
        let mut acc = 0;
        let mut bits = idx;
        let mut j = 0;
        while bits != 0 {
            if bits & 1 == 1 {
                acc ^= self.basis[j];
            }
            bits >>= 1;
            j += 1;
        }
        acc
    }

    /// All elements in Gray-code order, starting at 0.
    pub fn elements(&self) -> Vec<Word> {
        let mut out = Vec::with_capacity(self.size());
        let mut acc = 0;
        out.push(0);
        for i in 1..self.size() {
            acc ^= self.basis[i.trailing_zeros() as usize];
            out.push(acc);
        }
        out
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.basis.iter().all(|&v| other.contains(v))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut s = self.clone();
        for &v in &other.basis {
            s.insert(v);
        }
        s
    }

    pub fn intersection(&self, other: &Subspace) -> Subspace {
        // (U ∩ W)^⊥ = U^⊥ + W^⊥
        self.orthogonal_complement()
            .sum(&other.orthogonal_complement())
            .orthogonal_complement()
    }

    /// `{ v : ⟨v, u⟩ = 0 for all u ∈ U }`.
    pub fn orthogonal_complement(&self) -> Subspace {
        let pivots = self.pivot_mask();
        let mut out = Vec::with_capacity(self.n - self.dim());
        for f in 0..self.n {
            if pivots >> f & 1 == 1 {
                continue;
            }
            let mut v: Word = 1 << f;
            for &row in &self.basis {
                if row >> f & 1 == 1 {
                    v |= 1 << (31 - row.leading_zeros());
                }
            }
            out.push(v);
        }
        Subspace::span_unchecked(out, self.n)
    }

    /// Coordinates of `v ∈ U` with respect to the canonical basis.
    pub fn coordinates(&self, v: Word) -> Option<usize> {
        let mut idx = 0;
        let mut rest = v;
        for (j, &row) in self.basis.iter().enumerate().rev() {
            let p = 31 - row.leading_zeros();
            if rest >> p & 1 == 1 {
                rest ^= row;
                idx |= 1 << j;
            }
        }
        (rest == 0).then_some(idx)
    }

    /// Smallest element of `V \ U`, if any.
    pub fn min_outside(&self) -> Option<Word> {
        if self.is_full() {
            return None;
        }
        (0..=mask(self.n)).find(|&v| !self.contains(v))
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(n={}, [", self.n)?;
        for (i, v) in self.basis.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v:#x}")?;
        }
        write!(f, "])")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_span_is_zero() {
        let s = Subspace::span([], 3).unwrap();
        assert_eq!(s.dim(), 0);
        assert_eq!(s.elements(), vec![0]);
    }

    #[test]
    fn span_of_two_vectors() {
        let s = Subspace::span([0b001, 0b011], 3).unwrap();
        assert_eq!(s.dim(), 2);
        let mut e = s.elements();
        e.sort();
        assert_eq!(e, vec![0, 1, 2, 3]);
    }

    #[test]
    fn standard_basis_spans_everything() {
        let n = 5;
        let s = Subspace::span((0..n).map(|k| 1 << k), n).unwrap();
        assert!(s.is_full());
        assert_eq!(s, Subspace::full(n));
    }

    #[test]
    fn span_rejects_wide_vectors() {
        assert!(Subspace::span([0b1000], 3).is_err());
    }

    #[test]
    fn canonical_basis_is_order_independent() {
        let a = Subspace::span([0b0110, 0b1010, 0b0011], 4).unwrap();
        let b = Subspace::span([0b0011, 0b0110, 0b1010 ^ 0b0110], 4).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.basis(), b.basis());
    }

    #[test]
    fn complement_and_intersection() {
        let n = 6;
        let u = Subspace::span([0b000011, 0b001100, 0b110001], n).unwrap();
        let perp = u.orthogonal_complement();
        assert_eq!(perp.dim(), n - u.dim());
        for v in 0..64u32 {
            let brute = u.basis().iter().all(|&b| !super::super::dot(v, b));
            assert_eq!(perp.contains(v), brute);
        }
        let w = Subspace::span([0b000011, 0b100000, 0b010001], n).unwrap();
        let meet = u.intersection(&w);
        for v in 0..64u32 {
            assert_eq!(meet.contains(v), u.contains(v) && w.contains(v));
        }
    }

    #[test]
    fn coordinates_round_trip() {
        let u = Subspace::span([0b1011, 0b0110], 4).unwrap();
        for idx in 0..u.size() {
            assert_eq!(u.coordinates(u.element(idx)), Some(idx));
        }
        assert_eq!(u.coordinates(0b0001), None);
    }

    #[test]
    fn kernel_of_functional() {
        let u = Subspace::kernel_of(0b0001_0001, 8).unwrap();
        assert_eq!(u.dim(), 7);
        assert!(!u.contains(0b1));
        assert!(u.contains(0b0001_0001));
    }
}
