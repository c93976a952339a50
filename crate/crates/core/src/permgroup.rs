//! Orbits, minimal block systems and primitivity for groups on `V` given
//! by generators.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::f2lin::Word;
use crate::partition::Partition;
use crate::perm::Permutation;

/// Generators of a permutation group on the `2ⁿ` points of `V`.
#[derive(Clone, Debug)]
pub struct PermSet {
    n: usize,
    gens: Vec<Permutation>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Primitivity {
    Primitive,
    Imprimitive {
        /// Seed point paired with 0.
        seed: Word,
        #[serde(serialize_with = "blocks_as_lists")]
        blocks: Partition,
    },
    Intransitive {
        orbit_of_zero: usize,
    },
}

fn blocks_as_lists<S: serde::Serializer>(p: &Partition, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeStruct;
    let mut st = s.serialize_struct("BlockSystem", 3)?;
    st.serialize_field("block_count", &p.block_count())?;
    st.serialize_field("block_size", &p.block_sizes()[0])?;
    st.serialize_field("block_of_zero", &p.block_of(0))?;
    st.end()
}

impl PermSet {
    pub fn new(n: usize, gens: Vec<Permutation>) -> Result<Self> {
        if let Some(g) = gens.iter().find(|g| g.n() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: g.n(),
            });
        }
        Ok(PermSet { n, gens })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.gens
    }

    /// Orbit of `x`, ascending.
    pub fn orbit(&self, x: Word) -> Vec<Word> {
        let size = 1usize << self.n;
        let mut seen = vec![false; size];
        let mut queue = vec![x];
        seen[x as usize] = true;
        while let Some(y) = queue.pop() {
            for g in &self.gens {
                let z = g.apply(y);
                if !seen[z as usize] {
                    seen[z as usize] = true;
                    queue.push(z);
                }
            }
        }
        (0..size as Word).filter(|&y| seen[y as usize]).collect()
    }

    pub fn is_transitive(&self) -> bool {
        self.orbit(0).len() == 1 << self.n
    }

    /// The finest invariant partition with `x` and `y` in one block.
    pub fn minimal_block_system(&self, x: Word, y: Word) -> Result<Partition> {
        if x == y || x as usize >= 1 << self.n || y as usize >= 1 << self.n {
            return Err(Error::precondition("seed pair must be two distinct points of V"));
        }
        if !self.is_transitive() {
            return Err(Error::precondition("group is not transitive"));
        }
        Ok(self.closure(x, y))
    }

    fn closure(&self, x: Word, y: Word) -> Partition {
        let mut uf = UnionFind::new(1 << self.n);
        uf.union(x, y);
        let mut pending = vec![(x, y)];
        while let Some((a, b)) = pending.pop() {
            for g in &self.gens {
                let (c, d) = (g.apply(a), g.apply(b));
                if uf.union(c, d) {
                    pending.push((c, d));
                }
            }
        }
        let labels: Vec<u32> = (0..1 << self.n).map(|v| uf.find(v)).collect();
        let p = Partition::canonical_dense(self.n, &labels);
        debug_assert!(self.is_block_system(&p));
        p
    }

    /// Every generator maps the partition onto itself.
    pub fn is_block_system(&self, p: &Partition) -> bool {
        self.gens.iter().all(|g| p.is_invariant_under(|x| g.apply(x)))
    }

    /// Transitivity, then the closures of `(0, y)` for all `y ≠ 0`.
    pub fn is_primitive(&self) -> Primitivity {
        let orbit = self.orbit(0).len();
        if orbit != 1 << self.n {
            return Primitivity::Intransitive { orbit_of_zero: orbit };
        }
        let found = (1..1 << self.n as Word).into_par_iter().find_map_first(|y| {
            let p = self.closure(0, y);
            (p.block_count() > 1).then_some((y, p))
        });
        match found {
            None => Primitivity::Primitive,
            Some((seed, blocks)) => {
                assert!(self.is_block_system(&blocks), "closure is not a block system");
                Primitivity::Imprimitive { seed, blocks }
            }
        }
    }
}

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new(size: usize) -> Self {
        UnionFind {
            parent: (0..size as u32).collect(),
        }
    }

    fn find(&mut self, mut x: Word) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    /// Merges the classes; `false` if they already coincided.
    fn union(&mut self, a: Word, b: Word) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi as usize] = lo;
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::f2lin::Subspace;
    use crate::partition::LinearPartition;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn translations(n: usize) -> PermSet {
        PermSet::new(n, (0..n).map(|k| Permutation::translation(1 << k, n)).collect()).unwrap()
    }

    #[test]
    fn identity_is_intransitive() {
        let g = PermSet::new(3, vec![Permutation::identity(3)]).unwrap();
        assert_eq!(g.orbit(5), vec![5]);
        assert_eq!(g.is_primitive(), Primitivity::Intransitive { orbit_of_zero: 1 });
        assert!(g.minimal_block_system(0, 1).is_err());
    }

    #[test]
    fn translation_group_blocks_are_cosets() {
        let g = translations(4);
        assert!(g.is_transitive());
        for v in 1..16 {
            let p = g.minimal_block_system(0, v).unwrap();
            let expect = LinearPartition::new(Subspace::span([v], 4).unwrap()).expand();
            assert_eq!(p, expect);
        }
        match g.is_primitive() {
            Primitivity::Imprimitive { seed, blocks } => {
                assert_eq!(seed, 1);
                assert_eq!(blocks.block_sizes(), vec![2; 8]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn symmetric_group_is_primitive() {
        // an 8-cycle and a transposition generate Sym(8)
        let cycle = Permutation::from_table((0..8).map(|x| (x + 1) % 8).collect()).unwrap();
        let swap = Permutation::from_table(vec![1, 0, 2, 3, 4, 5, 6, 7]).unwrap();
        let g = PermSet::new(3, vec![cycle, swap]).unwrap();
        assert_eq!(g.is_primitive(), Primitivity::Primitive);
        for y in 1..8 {
            assert_eq!(g.minimal_block_system(0, y).unwrap().block_count(), 1);
        }
    }

    #[test]
    fn closure_is_order_independent_and_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let n = 4;
        let mut gens: Vec<Permutation> = (0..n).map(|k| Permutation::translation(1 << k, n)).collect();
        // a linear map preserving span{1} keeps cosets of span{1} as blocks
        let lin = Permutation::from_table((0..16).map(|x: Word| x ^ ((x >> 1) & 1)).collect()).unwrap();
        gens.push(lin);
        let g = PermSet::new(n, gens.clone()).unwrap();
        let p = g.minimal_block_system(0, 1).unwrap();
        gens.shuffle(&mut rng);
        let h = PermSet::new(n, gens.clone()).unwrap();
        assert_eq!(h.minimal_block_system(0, 1).unwrap(), p);
        assert_eq!(p.block_sizes(), vec![2; 8]);
        // adding a random permutation makes it primitive; supersets stay primitive
        let mut table: Vec<Word> = (0..16).collect();
        table.shuffle(&mut rng);
        gens.push(Permutation::from_table(table).unwrap());
        let big = PermSet::new(n, gens.clone()).unwrap();
        assert_eq!(big.is_primitive(), Primitivity::Primitive);
        gens.push(Permutation::translation(3, n));
        assert_eq!(PermSet::new(n, gens).unwrap().is_primitive(), Primitivity::Primitive);
    }
}
