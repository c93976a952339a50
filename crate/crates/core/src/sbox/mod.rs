//! S-boxes, parallel maps and their differential / linear properties.

mod analysis;
mod catalog;

pub use analysis::{AffineHull, AntiInvariance, Ddt};
pub use catalog::{find_permutation, reference_boxes, AFFINE_COMPONENT_4};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::f2lin::{mask, BlockLayout, GfContext, LinearMap, Word};

/// Vectorial Boolean function `(F₂)^m → (F₂)^m` as a lookup table.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SBox {
    m: usize,
    table: Vec<Word>,
}

impl SBox {
    pub fn new(table: Vec<Word>) -> Result<Self> {
        let len = table.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::InvalidSbox(format!(
                "table length {len} is not a power of two ≥ 2"
            )));
        }
        let m = len.trailing_zeros() as usize;
        if m > 16 {
            return Err(Error::TooLarge {
                what: "S-box width",
                value: m,
                limit: 16,
            });
        }
        if let Some((x, &y)) = table.iter().enumerate().find(|&(_, &y)| y as usize >= len) {
            return Err(Error::InvalidSbox(format!(
                "entry {x} = {y:#x} does not fit in {m} bits"
            )));
        }
        Ok(SBox { m, table })
    }

    /// Like [`new`](Self::new) but also requires a permutation.
    pub fn permutation(table: Vec<Word>) -> Result<Self> {
        let s = SBox::new(table)?;
        if !s.is_bijective() {
            return Err(Error::InvalidSbox("table is not a permutation".into()));
        }
        Ok(s)
    }

    pub fn identity(m: usize) -> Self {
        SBox {
            m,
            table: (0..1 << m).collect(),
        }
    }

    pub fn from_linear(map: &LinearMap) -> Self {
        SBox {
            m: map.dim(),
            table: map.table(),
        }
    }

    /// Inversion map of `GF(2^m)`, with `0 ↦ 0`.
    pub fn inversion(ctx: &GfContext) -> Self {
        SBox {
            m: ctx.m(),
            table: ctx.inverse_table(),
        }
    }

    /// Resolves `builtin:inv<m>` and `builtin:id<m>`.
    pub fn builtin(name: &str) -> Result<Self> {
        let rest = name
            .strip_prefix("builtin:")
            .ok_or_else(|| Error::Config(format!("not a builtin S-box name: {name}")))?;
        let (kind, digits) = rest.split_at(rest.find(|c: char| c.is_ascii_digit()).unwrap_or(rest.len()));
        let m: usize = digits
            .parse()
            .map_err(|_| Error::Config(format!("missing width in {name}")))?;
        match kind {
            "inv" => Ok(SBox::inversion(&GfContext::default_for(m)?)),
            "id" if (1..=16).contains(&m) => Ok(SBox::identity(m)),
            _ => Err(Error::Config(format!("unknown builtin S-box {name}"))),
        }
    }

    /// Uniformly random permutation of `(F₂)^m` fixing 0.
    pub fn random_permutation<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Self {
        let mut rest: Vec<Word> = (1..1 << m).collect();
        rest.shuffle(rng);
        let mut table = vec![0];
        table.extend(rest);
        SBox { m, table }
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.table.len()
    }

    pub fn table(&self) -> &[Word] {
        &self.table
    }

    #[inline]
    pub fn apply(&self, x: Word) -> Word {
        self.table[x as usize]
    }

    pub fn is_bijective(&self) -> bool {
        let mut seen = vec![false; self.size()];
        self.table
            .iter()
            .all(|&y| !std::mem::replace(&mut seen[y as usize], true))
    }

    pub fn inverse(&self) -> Result<SBox> {
        if !self.is_bijective() {
            return Err(Error::InvalidSbox("cannot invert a non-bijective S-box".into()));
        }
        let mut inv = vec![0; self.size()];
        for (x, &y) in self.table.iter().enumerate() {
            inv[y as usize] = x as Word;
        }
        Ok(SBox {
            m: self.m,
            table: inv,
        })
    }

    /// `(g, c)` with `g(x) = f(x) + f(0)` and `c = f(0)`.
    pub fn normalize_zero(&self) -> (SBox, Word) {
        let c = self.table[0];
        let table = self.table.iter().map(|&y| y ^ c).collect();
        (SBox { m: self.m, table }, c)
    }

    /// Table of `f̂_u(x) = f(x+u) + f(x)`.
    pub fn derivative(&self, u: Word) -> Vec<Word> {
        let u = u & mask(self.m);
        (0..self.size() as Word)
            .map(|x| self.apply(x ^ u) ^ self.apply(x))
            .collect()
    }

    /// `f̂_u(S)` as a sorted set.
    pub fn derivative_image_on(&self, u: Word, set: &[Word]) -> Vec<Word> {
        let mut out: Vec<Word> = set.iter().map(|&x| self.apply(x ^ u) ^ self.apply(x)).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// `Im(f̂_u)` as a sorted set.
    pub fn derivative_image(&self, u: Word) -> Vec<Word> {
        let mut out = self.derivative(u);
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// `γ = (γ₁, …, γ_b)` acting blockwise.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ParallelMap {
    layout: BlockLayout,
    boxes: Vec<SBox>,
}

impl ParallelMap {
    pub fn new(boxes: Vec<SBox>) -> Result<Self> {
        let m = boxes
            .first()
            .ok_or_else(|| Error::precondition("a parallel map needs at least one S-box"))?
            .m();
        if boxes.iter().any(|s| s.m() != m) {
            return Err(Error::precondition("all S-boxes of a parallel map must share one width"));
        }
        let layout = BlockLayout::new(boxes.len(), m)?;
        Ok(ParallelMap { layout, boxes })
    }

    /// `b` copies of `s`.
    pub fn uniform(s: &SBox, b: usize) -> Result<Self> {
        ParallelMap::new(vec![s.clone(); b])
    }

    pub fn identity(layout: BlockLayout) -> Self {
        ParallelMap {
            layout,
            boxes: vec![SBox::identity(layout.m()); layout.b()],
        }
    }

    pub fn layout(&self) -> BlockLayout {
        self.layout
    }

    pub fn boxes(&self) -> &[SBox] {
        &self.boxes
    }

    pub fn is_bijective(&self) -> bool {
        self.boxes.iter().all(SBox::is_bijective)
    }

    pub fn fixes_zero(&self) -> bool {
        self.boxes.iter().all(|s| s.apply(0) == 0)
    }

    #[inline]
    pub fn apply(&self, v: Word) -> Word {
        let l = &self.layout;
        let mut out = 0;
        for (j, s) in self.boxes.iter().enumerate() {
            out |= l.embed(s.apply(l.block(v, j)), j);
        }
        out
    }

    pub fn table(&self) -> Vec<Word> {
        (0..1usize << self.layout.n())
            .map(|v| self.apply(v as Word))
            .collect()
    }

    pub fn inverse(&self) -> Result<ParallelMap> {
        Ok(ParallelMap {
            layout: self.layout,
            boxes: self.boxes.iter().map(SBox::inverse).collect::<Result<_>>()?,
        })
    }

    /// Splits off `0γ`: returns the 0-fixing map and the offset word.
    pub fn normalize_zero(&self) -> (ParallelMap, Word) {
        let mut offset = 0;
        let mut boxes = Vec::with_capacity(self.boxes.len());
        for (j, s) in self.boxes.iter().enumerate() {
            let (g, c) = s.normalize_zero();
            offset |= self.layout.embed(c, j);
            boxes.push(g);
        }
        (
            ParallelMap {
                layout: self.layout,
                boxes,
            },
            offset,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn derivative_basics() {
        let inv = SBox::builtin("builtin:inv4").unwrap();
        assert!(inv.derivative(0).iter().all(|&y| y == 0));
        let id = SBox::identity(4);
        for u in 0..16 {
            assert!(id.derivative(u).iter().all(|&y| y == u));
        }
        assert!(inv.derivative_image(1).len() >= 4);
        assert!(inv.derivative_image_on(1, &[]).is_empty());
        let hyperplane: Vec<Word> = (0..16).filter(|x| x & 1 == 0).collect();
        assert!(inv.derivative_image_on(1, &hyperplane).len() >= 2);
    }

    #[test]
    fn normalize_zero_folds_offset() {
        let table: Vec<Word> = (0..16).map(|x| x ^ 0b1010).collect();
        let (g, c) = SBox::new(table).unwrap().normalize_zero();
        assert_eq!(g, SBox::identity(4));
        assert_eq!(c, 0b1010);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut t: Vec<Word> = (0..8).collect();
        t.shuffle(&mut rng);
        let f = SBox::new(t).unwrap();
        let (g, c) = f.normalize_zero();
        assert_eq!(g.apply(0), 0);
        assert!((0..8).all(|x| g.apply(x) ^ f.apply(x) == c));
        let inv = SBox::builtin("builtin:inv3").unwrap();
        assert_eq!(inv.normalize_zero(), (inv.clone(), 0));
    }

    #[test]
    fn parallel_map_acts_blockwise() {
        let inv = SBox::builtin("builtin:inv4").unwrap();
        let pm = ParallelMap::new(vec![inv.clone(), SBox::identity(4)]).unwrap();
        assert_eq!(pm.apply(0x32), 0x30 | inv.apply(2));
        let back = pm.inverse().unwrap();
        for v in 0..256 {
            assert_eq!(back.apply(pm.apply(v)), v);
        }
    }

    #[test]
    fn rejects_malformed_tables() {
        assert!(SBox::new(vec![0, 1, 2]).is_err());
        assert!(SBox::new(vec![0, 4, 1, 2]).is_err());
        assert!(SBox::permutation(vec![0, 0, 1, 2]).is_err());
        assert!(SBox::builtin("builtin:inv9").is_err());
        assert!(SBox::builtin("inv4").is_err());
    }
}
