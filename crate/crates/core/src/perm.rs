//! Permutations of `V = (F₂)ⁿ` as lookup tables.

use crate::error::{Error, Result};
use crate::f2lin::{check_dim, mask, Word};

/// A permutation of `{0, …, 2ⁿ−1}`, acting on the right: `x ↦ table[x]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    n: usize,
    table: Vec<Word>,
}

impl Permutation {
    pub fn from_table(table: Vec<Word>) -> Result<Self> {
        let len = table.len();
        if !len.is_power_of_two() {
            return Err(Error::precondition(format!(
                "permutation length {len} is not a power of two"
            )));
        }
        let n = len.trailing_zeros() as usize;
        check_dim(n)?;
        let mut seen = vec![false; len];
        for &y in &table {
            if y as usize >= len || std::mem::replace(&mut seen[y as usize], true) {
                return Err(Error::precondition("table is not a bijection"));
            }
        }
        Ok(Permutation { n, table })
    }

    /// Caller guarantees bijectivity.
    pub(crate) fn from_table_unchecked(table: Vec<Word>) -> Self {
        debug_assert!(Permutation::from_table(table.clone()).is_ok());
        Permutation {
            n: table.len().trailing_zeros() as usize,
            table,
        }
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            n,
            table: (0..=mask(n)).collect(),
        }
    }

    /// `σ_v : x ↦ x + v`.
    pub fn translation(v: Word, n: usize) -> Self {
        Permutation {
            n,
            table: (0..=mask(n)).map(|x| x ^ v).collect(),
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn apply(&self, x: Word) -> Word {
        self.table[x as usize]
    }

    pub fn table(&self) -> &[Word] {
        &self.table
    }

    pub fn is_identity(&self) -> bool {
        self.table.iter().enumerate().all(|(x, &y)| x as Word == y)
    }

    /// `x ↦ (x self) next`.
    pub fn then(&self, next: &Permutation) -> Permutation {
        assert_eq!(self.n, next.n);
        Permutation {
            n: self.n,
            table: self.table.iter().map(|&y| next.apply(y)).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.table.len()];
        for (x, &y) in self.table.iter().enumerate() {
            inv[y as usize] = x as Word;
        }
        Permutation {
            n: self.n,
            table: inv,
        }
    }
}
