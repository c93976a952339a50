use rand::Rng;

use super::{check_dim, mask, Echelon, Subspace, Word};
use crate::error::{Error, Result};

/// Linear map on `(F₂)ⁿ`, acting on row vectors: row `k` is the image of `e_k`.
///
/// Composition reads left to right, so `a.then(&b)` is `x ↦ (x a) b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinearMap {
    n: usize,
    rows: Vec<Word>,
}

impl LinearMap {
    pub fn from_rows(rows: Vec<Word>) -> Result<Self> {
        let n = rows.len();
        check_dim(n)?;
        if let Some(&bad) = rows.iter().find(|&&r| r & !mask(n) != 0) {
            return Err(Error::out_of_range(format!(
                "matrix row {bad:#x} has bits beyond dimension {n}"
            )));
        }
        Ok(LinearMap { n, rows })
    }

    /// Like [`from_rows`](Self::from_rows) but rejects singular matrices.
    pub fn invertible_from_rows(rows: Vec<Word>) -> Result<Self> {
        let map = Self::from_rows(rows)?;
        let rank = map.rank();
        if rank < map.n {
            return Err(Error::NotInvertible { rank, n: map.n });
        }
        Ok(map)
    }

    pub fn identity(n: usize) -> Self {
        LinearMap {
            n,
            rows: (0..n).map(|k| 1 << k).collect(),
        }
    }

    /// Uniformly random element of `GL(n, 2)` (rejection sampling).
    pub fn random_invertible<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        loop {
            let rows: Vec<Word> = (0..n).map(|_| rng.gen::<Word>() & mask(n)).collect();
            let map = LinearMap { n, rows };
            if map.rank() == n {
                return map;
            }
        }
    }

    /// Block-diagonal map with blocks `parts[j]` acting on bit range `[j·m, (j+1)·m)`.
    pub fn block_diagonal(parts: &[LinearMap]) -> Result<Self> {
        let m = parts.first().map_or(0, |p| p.n);
        if parts.iter().any(|p| p.n != m) {
            return Err(Error::precondition("block-diagonal parts must share one width"));
        }
        let mut rows = Vec::with_capacity(m * parts.len());
        for (j, p) in parts.iter().enumerate() {
            rows.extend(p.rows.iter().map(|&r| r << (j * m)));
        }
        LinearMap::from_rows(rows)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[Word] {
        &self.rows
    }

    #[inline]
    pub fn apply(&self, v: Word) -> Word {
        let mut acc = 0;
        let mut bits = v;
        while bits != 0 {
            let k = bits.trailing_zeros() as usize;
            acc ^= self.rows[k];
            bits &= bits - 1;
        }
        acc
    }

    pub fn rank(&self) -> usize {
        let mut e = Echelon::default();
        for &r in &self.rows {
            e.insert(r);
        }
        e.rank()
    }

    pub fn is_invertible(&self) -> bool {
        self.rank() == self.n
    }

    /// `x ↦ (x self) next`.
    pub fn then(&self, next: &LinearMap) -> LinearMap {
        assert_eq!(self.n, next.n);
        LinearMap {
            n: self.n,
            rows: self.rows.iter().map(|&r| next.apply(r)).collect(),
        }
    }

    pub fn inverse(&self) -> Result<LinearMap> {
        let n = self.n;
        // invariant: a[r] = inv[r]·M; at the end a = I
        let mut a: Vec<Word> = self.rows.clone();
        let mut inv: Vec<Word> = (0..n).map(|k| 1 << k).collect();
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| a[r] >> col & 1 == 1) else {
                return Err(Error::NotInvertible {
                    rank: self.rank(),
                    n,
                });
            };
            a.swap(col, piv);
            inv.swap(col, piv);
            for r in 0..n {
                if r != col && a[r] >> col & 1 == 1 {
                    a[r] ^= a[col];
                    inv[r] ^= inv[col];
                }
            }
        }
        Ok(LinearMap { n, rows: inv })
    }

    /// `U λ`.
    pub fn map_subspace(&self, u: &Subspace) -> Subspace {
        assert_eq!(u.ambient_dim(), self.n);
        Subspace::span_unchecked(u.basis().iter().map(|&v| self.apply(v)), self.n)
    }

    /// Full lookup table `x ↦ xλ`.
    pub fn table(&self) -> Vec<Word> {
        (0..1usize << self.n).map(|x| self.apply(x as Word)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn inverse_composes_to_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..=10 {
            let m = LinearMap::random_invertible(n, &mut rng);
            let inv = m.inverse().unwrap();
            assert_eq!(m.then(&inv), LinearMap::identity(n));
            assert_eq!(inv.then(&m), LinearMap::identity(n));
        }
    }

    #[test]
    fn singular_rejected() {
        assert!(LinearMap::invertible_from_rows(vec![1, 1]).is_err());
        assert!(LinearMap::from_rows(vec![1, 1]).unwrap().inverse().is_err());
    }

    #[test]
    fn additive_exhaustive_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 6;
        let m = LinearMap::random_invertible(n, &mut rng);
        for u in 0..64 {
            for v in 0..64 {
                assert_eq!(m.apply(u ^ v), m.apply(u) ^ m.apply(v));
            }
        }
    }

    #[test]
    fn block_diagonal_acts_per_block() {
        let swap = LinearMap::from_rows(vec![0b10, 0b01]).unwrap();
        let id = LinearMap::identity(2);
        let bd = LinearMap::block_diagonal(&[swap, id]).unwrap();
        assert_eq!(bd.apply(0b0001), 0b0010);
        assert_eq!(bd.apply(0b0100), 0b0100);
    }
}
