use super::{Subspace, Word, MAX_ENUM_DIM};
use crate::error::{Error, Result};

/// Gaussian binomial `[n choose k]₂`: the number of `k`-dimensional subspaces of `(F₂)ⁿ`.
pub fn gaussian_binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k {
        num *= (1u128 << (n - i)) - 1;
        den *= (1u128 << (i + 1)) - 1;
    }
    (num / den) as u64
}

/// Number of subspaces emitted by [`enumerate_subspaces`] with the same arguments.
pub fn count_subspaces(n: usize, dim: Option<usize>) -> u64 {
    match dim {
        Some(k) => gaussian_binomial(n, k),
        None => (0..=n).map(|k| gaussian_binomial(n, k)).sum(),
    }
}

/// Streams every subspace of `(F₂)ⁿ` exactly once.
///
/// Order: dimension ascending, then pivot set ascending as a bitmask, then the
/// free entries of the echelon form counted up as a binary number.
pub fn enumerate_subspaces(n: usize, dim: Option<usize>) -> Result<SubspaceIter> {
    if n > MAX_ENUM_DIM {
        return Err(Error::TooLarge {
            what: "enumeration dimension",
            value: n,
            limit: MAX_ENUM_DIM,
        });
    }
    if let Some(k) = dim {
        if k > n {
            return Err(Error::out_of_range(format!("dimension filter {k} exceeds {n}")));
        }
    }
    let (lo, hi) = dim.map_or((0, n), |k| (k, k));
    Ok(SubspaceIter::new(n, lo, hi))
}

/// Streams every subspace of `u` (as subspaces of the ambient space of `u`).
pub fn enumerate_subspaces_of(
    u: &Subspace,
    dim: Option<usize>,
) -> Result<impl Iterator<Item = Subspace> + '_> {
    let inner = enumerate_subspaces(u.dim(), dim)?;
    let n = u.ambient_dim();
    Ok(inner.map(move |s| {
        Subspace::span_unchecked(
            s.basis().iter().map(|&coords| u.element(coords as usize)),
            n,
        )
    }))
}

pub struct SubspaceIter {
    n: usize,
    dim: usize,
    max_dim: usize,
    pivots: Word,
    // (row index, bit position) for each free echelon entry
    slots: Vec<(usize, u32)>,
    counter: u64,
    done: bool,
}

impl SubspaceIter {
    fn new(n: usize, lo: usize, hi: usize) -> Self {
        let mut it = SubspaceIter {
            n,
            dim: lo,
            max_dim: hi,
            pivots: (1 << lo) - 1,
            slots: Vec::new(),
            counter: 0,
            done: false,
        };
        it.load_slots();
        it
    }

    fn load_slots(&mut self) {
        self.slots.clear();
        let mut row = 0;
        for p in 0..self.n as u32 {
            if self.pivots >> p & 1 == 0 {
                continue;
            }
            for q in 0..p {
                if self.pivots >> q & 1 == 0 {
                    self.slots.push((row, q));
                }
            }
            row += 1;
        }
        self.counter = 0;
    }

    fn advance_pivots(&mut self) {
        let k = self.dim;
        let next = if k == 0 {
            None
        } else {
            // Gosper's hack: next bitmask with the same popcount
            let c = self.pivots;
            let low = c & c.wrapping_neg();
            let ripple = c + low;
            let next = (((ripple ^ c) >> 2) / low) | ripple;
            (next < 1 << self.n).then_some(next)
        };
        match next {
            Some(p) => self.pivots = p,
            None => {
                if self.dim == self.max_dim {
                    self.done = true;
                    return;
                }
                self.dim += 1;
                self.pivots = (1 << self.dim) - 1;
            }
        }
        self.load_slots();
    }
}

impl Iterator for SubspaceIter {
    type Item = Subspace;

    fn next(&mut self) -> Option<Subspace> {
        if self.done {
            return None;
        }
        let mut rows: Vec<Word> = (0..self.n as u32)
            .filter(|&p| self.pivots >> p & 1 == 1)
            .map(|p| 1 << p)
            .collect();
        for (i, &(row, bit)) in self.slots.iter().enumerate() {
            if self.counter >> i & 1 == 1 {
                rows[row] |= 1 << bit;
            }
        }
        let out = Subspace::from_canonical(rows, self.n);
        self.counter += 1;
        if self.counter >> self.slots.len() != 0 {
            self.advance_pivots();
        }
        Some(out)
    }
}
