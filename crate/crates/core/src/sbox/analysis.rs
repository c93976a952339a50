use rayon::prelude::*;
use serde::Serialize;

use super::SBox;
use crate::error::{Error, Result};
use crate::f2lin::{dot, enumerate_subspaces, is_affine_set, mask, Subspace, Word};

/// Difference distribution table: `counts[a·2^m + b] = δ_f(a, b)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ddt {
    m: usize,
    counts: Vec<u32>,
}

impl Ddt {
    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn get(&self, a: Word, b: Word) -> u32 {
        self.counts[((a as usize) << self.m) | b as usize]
    }

    pub fn row(&self, a: Word) -> &[u32] {
        let w = 1 << self.m;
        &self.counts[a as usize * w..(a as usize + 1) * w]
    }

    /// Largest entry over rows `a ≠ 0`.
    pub fn uniformity(&self) -> u32 {
        (1..1 << self.m)
            .map(|a| *self.row(a).iter().max().unwrap())
            .max()
            .unwrap_or(0)
    }
}

/// Smallest affine subspace containing a point set: `offset + direction`,
/// with `offset` reduced modulo `direction`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct AffineHull {
    pub offset: Word,
    pub direction: Subspace,
}

impl AffineHull {
    pub fn new(point: Word, direction: Subspace) -> Self {
        AffineHull {
            offset: direction.reduce(point),
            direction,
        }
    }

    /// Brute-force closure of a nonempty point set.
    pub fn of_points(points: &[Word], n: usize) -> Option<Self> {
        let &p0 = points.first()?;
        let dir = Subspace::span(points.iter().map(|&p| p ^ p0), n).ok()?;
        Some(AffineHull::new(p0, dir))
    }

    pub fn is_full(&self) -> bool {
        self.direction.is_full()
    }
}

/// Outcome of a strong anti-invariance check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AntiInvariance {
    pub r: usize,
    pub holds: bool,
    /// `(U, f(U))` violating the definition.
    pub witness: Option<(Subspace, Subspace)>,
}

impl SBox {
    pub fn compute_ddt(&self) -> Result<Ddt> {
        if self.m > 10 {
            return Err(Error::TooLarge {
                what: "DDT width",
                value: self.m,
                limit: 10,
            });
        }
        let size = self.size();
        let mut counts = vec![0u32; size * size];
        for a in 0..size {
            let row = &mut counts[a * size..(a + 1) * size];
            for x in 0..size {
                row[(self.table[x ^ a] ^ self.table[x]) as usize] += 1;
            }
        }
        Ok(Ddt { m: self.m, counts })
    }

    /// `δ = max_{a≠0, b} δ_f(a, b)`, without materialising the table.
    pub fn differential_uniformity(&self) -> u32 {
        let size = self.size();
        (1..size)
            .into_par_iter()
            .map(|a| {
                let mut row = vec![0u32; size];
                for x in 0..size {
                    row[(self.table[x ^ a] ^ self.table[x]) as usize] += 1;
                }
                row.into_iter().max().unwrap()
            })
            .max()
            .unwrap_or(0)
    }

    fn require_zero_fixed(&self) -> Result<()> {
        if self.table[0] != 0 {
            return Err(Error::precondition(format!(
                "S-box must fix 0 (f(0) = {:#x}); normalize it first",
                self.table[0]
            )));
        }
        Ok(())
    }

    /// Whether `f` is strongly `r`-anti-invariant. Accepts `0 ≤ r < m`.
    ///
    /// Subspaces are scanned by descending dimension; the first violation is
    /// returned as witness. For a permutation only `dim U ≥ m − r` can violate,
    /// otherwise every dimension is scanned.
    pub fn strong_anti_invariance(&self, r: usize) -> Result<AntiInvariance> {
        self.require_zero_fixed()?;
        let m = self.m;
        if r >= m {
            return Err(Error::out_of_range(format!("r = {r} must be < m = {m}")));
        }
        if m > crate::f2lin::MAX_ENUM_DIM {
            return Err(Error::TooLarge {
                what: "S-box width for subspace scans",
                value: m,
                limit: crate::f2lin::MAX_ENUM_DIM,
            });
        }
        let lowest = if self.is_bijective() { m - r } else { 1 };
        for d in (lowest..=m).rev() {
            let subspaces: Vec<Subspace> = enumerate_subspaces(m, Some(d))?.collect();
            let witness = subspaces.par_iter().find_map_first(|u| {
                let w = self.subspace_image(u)?;
                let fine = (u.dim() == w.dim() && u.dim() < m - r) || (u.is_full() && w.is_full());
                (!fine).then(|| (u.clone(), w))
            });
            if let Some(w) = witness {
                return Ok(AntiInvariance {
                    r,
                    holds: false,
                    witness: Some(w),
                });
            }
        }
        Ok(AntiInvariance {
            r,
            holds: true,
            witness: None,
        })
    }

    /// `f(U)` when it is a subspace.
    pub fn subspace_image(&self, u: &Subspace) -> Option<Subspace> {
        let mut img: Vec<Word> = u.elements().into_iter().map(|x| self.apply(x)).collect();
        img.sort_unstable();
        img.dedup();
        if img[0] != 0 || !is_affine_set(&img) {
            return None;
        }
        Some(Subspace::span_unchecked(img, self.m))
    }

    /// `V_a = { v : x ↦ ⟨f̂_a(x), v⟩ is constant }`.
    pub fn linear_structure_space(&self, a: Word) -> Result<Subspace> {
        if a == 0 || a & !mask(self.m) != 0 {
            return Err(Error::out_of_range(format!(
                "direction {a:#x} must be a nonzero vector of width {}",
                self.m
            )));
        }
        let d = self.derivative(a);
        let members: Vec<Word> = (0..self.size() as Word)
            .filter(|&v| {
                let c = dot(d[0], v);
                d.iter().all(|&y| dot(y, v) == c)
            })
            .collect();
        let space = Subspace::span_unchecked(members.iter().copied(), self.m);
        assert_eq!(space.size(), members.len(), "V_a is not closed under addition");
        Ok(space)
    }

    /// `n̂(f) = max_{a≠0} (|V_a| − 1)`.
    pub fn n_hat(&self) -> usize {
        (1..self.size() as Word)
            .into_par_iter()
            .map(|a| self.linear_structure_space(a).unwrap().size() - 1)
            .max()
            .unwrap_or(0)
    }

    /// `f(a) + V_a^⊥`, cross-checked against the brute-force closure of `Im(f̂_a)`.
    pub fn affine_hull_of_derivative_image(&self, a: Word) -> Result<AffineHull> {
        self.require_zero_fixed()?;
        let va = self.linear_structure_space(a)?;
        let hull = AffineHull::new(self.apply(a), va.orthogonal_complement());
        let brute = AffineHull::of_points(&self.derivative_image(a), self.m).unwrap();
        assert_eq!(hull, brute, "affine hull of Im(f̂_a) disagrees with f(a) + V_a^⊥");
        Ok(hull)
    }

    /// Walsh coefficients `W(α, β) = Σ_x (−1)^{⟨β, f(x)⟩ + ⟨α, x⟩}` of the component `β`.
    pub fn walsh_spectrum(&self, beta: Word) -> Vec<i32> {
        let mut w: Vec<i32> = self
            .table
            .iter()
            .map(|&y| if dot(beta, y) { -1 } else { 1 })
            .collect();
        let mut h = 1;
        while h < w.len() {
            for i in (0..w.len()).step_by(2 * h) {
                for j in i..i + h {
                    let (x, y) = (w[j], w[j + h]);
                    w[j] = x + y;
                    w[j + h] = x - y;
                }
            }
            h *= 2;
        }
        w
    }

    /// Minimum distance of a nonzero component to the affine functions.
    pub fn nonlinearity(&self) -> u32 {
        let max_abs = (1..self.size() as Word)
            .into_par_iter()
            .map(|beta| {
                self.walsh_spectrum(beta)
                    .into_iter()
                    .map(i32::unsigned_abs)
                    .max()
                    .unwrap()
            })
            .max()
            .unwrap_or(self.size() as u32);
        (self.size() as u32 - max_abs) / 2
    }
}
