//! Partitions of `V`, linear and linear-affine partitions, and their behaviour
//! under translations and permutations.

mod lemmaeasy;
mod structured;
mod translations;

pub use lemmaeasy::lemmaeasy_check;
pub use structured::{
    enumerate_linear_affine_partitions, enumerate_linear_partitions, LinearAffinePartition,
    LinearPartition, Structure,
};
pub use translations::{classify_under_translations, maps_onto, TranslationSubgroup, Verdict};

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::f2lin::{check_dim, Subspace, Word, MAX_ENUM_DIM};
use crate::perm::Permutation;

/// A partition of `V = (F₂)ⁿ`, stored as a dense label array.
///
/// Canonical form: blocks are numbered by their minimal member, ascending,
/// so two partitions are equal iff their label arrays are.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    n: usize,
    labels: Vec<u32>,
    blocks: u32,
}

impl Partition {
    /// Canonicalises arbitrary labels (any `u32` values).
    pub fn from_labels(n: usize, raw: &[u32]) -> Result<Self> {
        check_dim(n)?;
        if n > MAX_ENUM_DIM {
            return Err(Error::TooLarge {
                what: "partition dimension",
                value: n,
                limit: MAX_ENUM_DIM,
            });
        }
        if raw.len() != 1 << n {
            return Err(Error::DimensionMismatch {
                expected: 1 << n,
                got: raw.len(),
            });
        }
        Ok(Partition::canonical(n, raw.iter().copied()))
    }

    pub(crate) fn canonical<I: IntoIterator<Item = u32>>(n: usize, raw: I) -> Self {
        let mut map = std::collections::HashMap::new();
        let mut labels = Vec::with_capacity(1 << n);
        for r in raw {
            let next = map.len() as u32;
            labels.push(*map.entry(r).or_insert(next));
        }
        Partition {
            n,
            blocks: map.len() as u32,
            labels,
        }
    }

    /// Canonicalises labels that are already small (< 2ⁿ), without hashing.
    pub(crate) fn canonical_dense(n: usize, raw: &[u32]) -> Self {
        let mut map = vec![u32::MAX; 1 << n];
        let mut next = 0;
        let labels = raw
            .iter()
            .map(|&r| {
                let slot = &mut map[r as usize];
                if *slot == u32::MAX {
                    *slot = next;
                    next += 1;
                }
                *slot
            })
            .collect();
        Partition {
            n,
            labels,
            blocks: next,
        }
    }

    /// Partition from explicit blocks, which must cover `V` exactly once.
    pub fn from_blocks(n: usize, blocks: &[Vec<Word>]) -> Result<Self> {
        let mut raw = vec![u32::MAX; 1 << n];
        for (i, block) in blocks.iter().enumerate() {
            for &x in block {
                let slot = raw
                    .get_mut(x as usize)
                    .ok_or_else(|| Error::out_of_range(format!("vector {x:#x} outside V")))?;
                if *slot != u32::MAX {
                    return Err(Error::precondition(format!("vector {x:#x} appears twice")));
                }
                *slot = i as u32;
            }
        }
        if raw.contains(&u32::MAX) {
            return Err(Error::precondition("blocks do not cover V"));
        }
        Partition::from_labels(n, &raw)
    }

    pub fn singletons(n: usize) -> Self {
        Partition {
            n,
            labels: (0..1 << n).collect(),
            blocks: 1 << n,
        }
    }

    pub fn one_block(n: usize) -> Self {
        Partition {
            n,
            labels: vec![0; 1 << n],
            blocks: 1,
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    #[inline]
    pub fn label(&self, x: Word) -> u32 {
        self.labels[x as usize]
    }

    pub fn block_count(&self) -> usize {
        self.blocks as usize
    }

    pub fn is_trivial(&self) -> bool {
        self.blocks == 1 || self.blocks as usize == self.labels.len()
    }

    /// Blocks in canonical order, members ascending.
    pub fn blocks(&self) -> Vec<Vec<Word>> {
        let mut out = vec![Vec::new(); self.blocks as usize];
        for (x, &l) in self.labels.iter().enumerate() {
            out[l as usize].push(x as Word);
        }
        out
    }

    /// Members of the block containing `x`.
    pub fn block_of(&self, x: Word) -> Vec<Word> {
        let l = self.label(x);
        (0..self.labels.len() as Word)
            .filter(|&y| self.labels[y as usize] == l)
            .collect()
    }

    /// Sizes of all blocks, in canonical order.
    pub fn block_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.blocks as usize];
        for &l in &self.labels {
            sizes[l as usize] += 1;
        }
        sizes
    }

    /// `Aρ = { Aρ : A ∈ 𝒜 }` for `ρ` given pointwise.
    pub fn map_with<F: Fn(Word) -> Word>(&self, rho: F) -> Partition {
        let mut raw = vec![0u32; self.labels.len()];
        for (x, &l) in self.labels.iter().enumerate() {
            raw[rho(x as Word) as usize] = l;
        }
        Partition::canonical_dense(self.n, &raw)
    }

    pub fn map(&self, rho: &Permutation) -> Partition {
        assert_eq!(rho.n(), self.n);
        self.map_with(|x| rho.apply(x))
    }

    /// Whether `ρ` maps this partition onto itself.
    pub fn is_invariant_under<F: Fn(Word) -> Word>(&self, rho: F) -> bool {
        // 𝒜ρ = 𝒜 iff the block map label(x) ↦ label(xρ) is well defined
        let mut image = vec![u32::MAX; self.blocks as usize];
        for (x, &l) in self.labels.iter().enumerate() {
            let target = self.labels[rho(x as Word) as usize];
            let slot = &mut image[l as usize];
            if *slot == u32::MAX {
                *slot = target;
            } else if *slot != target {
                return false;
            }
        }
        true
    }

    /// Whether `ρ` maps this partition onto `other`.
    pub fn maps_onto_with<F: Fn(Word) -> Word>(&self, rho: F, other: &Partition) -> bool {
        if self.blocks != other.blocks {
            return false;
        }
        let mut image = vec![u32::MAX; self.blocks as usize];
        for (x, &l) in self.labels.iter().enumerate() {
            let target = other.labels[rho(x as Word) as usize];
            let slot = &mut image[l as usize];
            if *slot == u32::MAX {
                *slot = target;
            } else if *slot != target {
                return false;
            }
        }
        true
    }

    pub fn is_invariant_under_translation(&self, v: Word) -> bool {
        self.is_invariant_under(|x| x ^ v)
    }

    /// `{ v : 𝒜σ_v = 𝒜 }`, a subspace.
    pub fn translation_stabilizer(&self) -> Subspace {
        let mut stab = Subspace::zero(self.n);
        let zero_block = self.block_of(0);
        // σ_v fixes 𝒜 only if it carries the block of 0 onto the block of v,
        // so v ranges over vectors whose block has the same size
        let size = zero_block.len();
        let sizes = self.block_sizes();
        for v in 1..self.labels.len() as Word {
            if stab.contains(v) || sizes[self.label(v) as usize] != size {
                continue;
            }
            if self.is_invariant_under_translation(v) {
                stab.insert(v);
            }
        }
        stab
    }

    /// `W` when this partition is `L(W)`.
    pub fn as_linear(&self) -> Option<Subspace> {
        let zero_block = self.block_of(0);
        let w = Subspace::span_unchecked(zero_block.iter().copied(), self.n);
        if w.size() != zero_block.len() {
            return None;
        }
        (LinearPartition::new(w.clone()).expand() == *self).then_some(w)
    }

    /// One block per line, comma-separated hex members.
    pub fn to_block_file(&self) -> String {
        let mut out = String::new();
        for block in self.blocks() {
            let line: Vec<String> = block.iter().map(|x| format!("{x:x}")).collect();
            let _ = writeln!(out, "{}", line.join(","));
        }
        out
    }
}

/// Every partition of `V` for `2ⁿ ≤ 8` (Bell(8) = 4140 at `n = 3`), as
/// restricted growth strings in lexicographic order.
pub fn enumerate_all_partitions(n: usize) -> Result<Vec<Partition>> {
    if n > 3 {
        return Err(Error::TooLarge {
            what: "dimension for full partition enumeration",
            value: n,
            limit: 3,
        });
    }
    let size = 1usize << n;
    let mut out = Vec::new();
    let mut rgs = vec![0u32; size];
    loop {
        out.push(Partition::canonical_dense(n, &rgs));
        // next restricted growth string: rgs[i] ≤ 1 + max(rgs[..i])
        let mut i = size - 1;
        loop {
            if i == 0 {
                return Ok(out);
            }
            let prefix_max = *rgs[..i].iter().max().unwrap();
            if rgs[i] <= prefix_max {
                rgs[i] += 1;
                for r in rgs.iter_mut().skip(i + 1) {
                    *r = 0;
                }
                break;
            }
            i -= 1;
        }
    }
}

impl serde::Serialize for Partition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Partition", 2)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("blocks", &self.blocks())?;
        st.end()
    }
}

impl std::fmt::Debug for Partition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Partition(n={}, {:?})", self.n, self.blocks())
    }
}
