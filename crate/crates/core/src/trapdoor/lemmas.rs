//! Exhaustive checks of the parallel-map lemmas: which linear and
//! linear-affine partitions a parallel S-box layer maps onto each other.

use rayon::prelude::*;
use serde::Serialize;

use super::search::cosets_stay_affine;
use super::Shape;
use crate::cipher::SboxConditions;
use crate::error::{Error, Result};
use crate::f2lin::{enumerate_subspaces, enumerate_subspaces_of, BlockLayout, Subspace, Word};
use crate::partition::{LinearAffinePartition, LinearPartition};
use crate::sbox::ParallelMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum LemmaId {
    /// `L(W) → LA_U(W₁|W₂)`, small uniformity with strong anti-invariance.
    #[serde(rename = "lm1")]
    Lm1,
    /// `LA_U(W₁|W₂) → L(W)`, same hypotheses.
    #[serde(rename = "lm2")]
    Lm2,
    /// `LA_U → LA_{U′}` with `J_U ∩ J_{U′} = ∅`, same hypotheses.
    #[serde(rename = "lm3")]
    Lm3,
    /// As [`LemmaId::Lm1`] for 4-uniform boxes with `n̂ = 0`, `m ≥ 4`.
    #[serde(rename = "lm11")]
    Lm11,
    #[serde(rename = "lm22")]
    Lm22,
    #[serde(rename = "lm33")]
    Lm33,
}

impl LemmaId {
    pub const ALL: [LemmaId; 6] = [
        LemmaId::Lm1,
        LemmaId::Lm2,
        LemmaId::Lm3,
        LemmaId::Lm11,
        LemmaId::Lm22,
        LemmaId::Lm33,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LemmaId::Lm1 => "lm1",
            LemmaId::Lm2 => "lm2",
            LemmaId::Lm3 => "lm3",
            LemmaId::Lm11 => "lm11",
            LemmaId::Lm22 => "lm22",
            LemmaId::Lm33 => "lm33",
        }
    }

    fn four_uniform_variant(self) -> bool {
        matches!(self, LemmaId::Lm11 | LemmaId::Lm22 | LemmaId::Lm33)
    }

    /// Whether the S-box layer meets this lemma's hypotheses.
    pub fn hypotheses_hold(self, c: &SboxConditions) -> bool {
        if self.four_uniform_variant() {
            c.four_uniform && c.n_hat_zero && c.m >= 4
        } else {
            c.uniform_r_below_m_minus_1 && c.strongly_r_anti_invariant
        }
    }
}

impl std::str::FromStr for LemmaId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace([':', '-'], "");
        LemmaId::ALL
            .into_iter()
            .find(|l| l.name() == key)
            .ok_or_else(|| Error::Config(format!("unknown lemma {s:?}")))
    }
}

/// Hyperplanes to scan. `None` selects every hyperplane, and for the
/// `LA → LA` lemmas every ordered pair with disjoint `J` sets.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LemmaParams {
    pub hyperplanes: Option<Vec<Subspace>>,
    pub pairs: Option<Vec<(Subspace, Subspace)>>,
}

/// A source partition whose image lies in the target family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaHit {
    pub source: Shape,
    pub image: Shape,
    /// For `LA → LA`: the hyperplane of the source.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u: Option<Subspace>,
    /// All spaces are one wall and both partitions are linear.
    pub conclusion: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaReport {
    pub lemma: LemmaId,
    pub conditions: SboxConditions,
    pub hypotheses_hold: bool,
    /// Source partitions considered.
    pub scanned: u64,
    /// Sources whose blocks all map to affine sets.
    pub survivors: u64,
    pub hits: Vec<LemmaHit>,
    pub violations: usize,
    pub holds: bool,
}

fn j_set(layout: &BlockLayout, u: &Subspace) -> Result<Vec<usize>> {
    Ok(layout.profile(u)?.j_set)
}

fn hyperplanes(n: usize) -> Result<Vec<Subspace>> {
    Ok(enumerate_subspaces(n, Some(n - 1))?.collect())
}

/// Runs the lemma's scan over `γ`; refuses when the hypotheses fail.
pub fn validate_lemma(gamma: &ParallelMap, which: LemmaId, params: &LemmaParams) -> Result<LemmaReport> {
    if !gamma.fixes_zero() {
        return Err(Error::precondition("the S-box layer must fix 0"));
    }
    let conditions = SboxConditions::of(gamma);
    if !which.hypotheses_hold(&conditions) {
        return Err(Error::Hypotheses(format!(
            "{}: δ = {}, r = {}, n̂ = {}, m = {}",
            which.name(),
            conditions.delta,
            conditions.r,
            conditions.n_hat,
            conditions.m
        )));
    }
    let layout = gamma.layout();
    let n = layout.n();
    let (scanned, survivors, hits) = match which {
        LemmaId::Lm1 | LemmaId::Lm11 => linear_to_affine(&layout, &gamma.table(), params, false)?,
        LemmaId::Lm2 | LemmaId::Lm22 => {
            linear_to_affine(&layout, &gamma.inverse()?.table(), params, true)?
        }
        LemmaId::Lm3 | LemmaId::Lm33 => {
            let pairs = match &params.pairs {
                Some(p) => {
                    for (u, v) in p {
                        if u.dim() + 1 != n || v.dim() + 1 != n {
                            return Err(Error::precondition("U and U′ must be hyperplanes"));
                        }
                        let ju = j_set(&layout, u)?;
                        if j_set(&layout, v)?.iter().any(|j| ju.contains(j)) {
                            return Err(Error::precondition("J_U and J_U′ must be disjoint"));
                        }
                    }
                    p.clone()
                }
                None => disjoint_pairs(&layout)?,
            };
            affine_to_affine(&layout, &gamma.table(), &pairs)?
        }
    };
    let violations = hits.iter().filter(|h| !h.conclusion).count();
    Ok(LemmaReport {
        lemma: which,
        conditions,
        hypotheses_hold: true,
        scanned,
        survivors,
        hits,
        violations,
        holds: violations == 0,
    })
}

fn disjoint_pairs(layout: &BlockLayout) -> Result<Vec<(Subspace, Subspace)>> {
    let hs = hyperplanes(layout.n())?;
    let js: Vec<Vec<usize>> = hs.iter().map(|u| j_set(layout, u)).collect::<Result<_>>()?;
    let mut out = Vec::new();
    for (a, ja) in hs.iter().zip(&js) {
        for (b, jb) in hs.iter().zip(&js) {
            if !ja.iter().any(|j| jb.contains(j)) {
                out.push((a.clone(), b.clone()));
            }
        }
    }
    Ok(out)
}

fn is_wall(layout: &BlockLayout, w: &Subspace) -> bool {
    layout.is_wall(w).is_some()
}

/// Whether the stabilizer makes `p` linear-affine over one of `allowed`.
fn over_allowed(stab: &Subspace, allowed: Option<&[Subspace]>) -> bool {
    let n = stab.ambient_dim();
    match allowed {
        _ if stab.dim() + 1 < n => false,
        None => true,
        Some(list) => stab.is_full() && !list.is_empty() || list.contains(stab),
    }
}

/// `L(W) → LA_U`: image under `table` of every nontrivial `L(W)`. With
/// `pulled_back`, `table` is `γ⁻¹`, so the hit is a source `LA_U` mapped onto `L(W)`.
fn linear_to_affine(
    layout: &BlockLayout,
    table: &[Word],
    params: &LemmaParams,
    pulled_back: bool,
) -> Result<(u64, u64, Vec<LemmaHit>)> {
    let n = layout.n();
    let all: Vec<Word> = (0..1 << n as Word).collect();
    let spaces: Vec<Subspace> = enumerate_subspaces(n, None)?.filter(|w| !w.is_trivial()).collect();
    let scanned = spaces.len() as u64;
    let allowed = params.hyperplanes.as_deref();
    let found: Vec<Option<LemmaHit>> = spaces
        .into_par_iter()
        .filter(|w| cosets_stay_affine(w, &all, table))
        .map(|w| {
            let lw = LinearPartition::new(w.clone()).expand();
            let p = lw.map_with(|x| table[x as usize]);
            let stab = p.translation_stabilizer();
            over_allowed(&stab, allowed).then(|| {
                let conclusion = is_wall(layout, &w) && p == lw;
                let (source, image) = if pulled_back {
                    (Shape::of(&p), Shape::Linear { w })
                } else {
                    (Shape::Linear { w }, Shape::of(&p))
                };
                LemmaHit {
                    source,
                    image,
                    u: None,
                    conclusion,
                }
            })
        })
        .collect();
    let survivors = found.len() as u64;
    Ok((scanned, survivors, found.into_iter().flatten().collect()))
}

/// `LA_U(W₁|W₂) → LA_{U′}` for each `U` with its admissible `U′`.
fn affine_to_affine(
    layout: &BlockLayout,
    table: &[Word],
    pairs: &[(Subspace, Subspace)],
) -> Result<(u64, u64, Vec<LemmaHit>)> {
    let mut sources: Vec<&Subspace> = pairs.iter().map(|(u, _)| u).collect();
    sources.dedup();
    let mut scanned = 0;
    let mut survivors = 0;
    let mut hits = Vec::new();
    for u in sources {
        let targets: Vec<Subspace> = pairs.iter().filter(|(a, _)| a == u).map(|(_, b)| b.clone()).collect();
        let inside = u.elements();
        let vbar = u.min_outside().expect("hyperplane");
        let outside: Vec<Word> = inside.iter().map(|&x| x ^ vbar).collect();
        let subs: Vec<Subspace> = enumerate_subspaces_of(u, None)?.collect();
        let count = subs.len() as u64;
        scanned += count * count - 1;
        let w1: Vec<&Subspace> = subs.par_iter().filter(|w| cosets_stay_affine(w, &inside, table)).collect();
        let w2: Vec<&Subspace> = subs.par_iter().filter(|w| cosets_stay_affine(w, &outside, table)).collect();
        survivors += (w1.len() * w2.len()) as u64;
        let found: Vec<LemmaHit> = w1
            .par_iter()
            .flat_map_iter(|a| w2.iter().map(move |b| (*a, *b)))
            .filter(|(a, b)| !(a.is_zero() && b.is_zero()))
            .filter_map(|(a, b)| {
                let src = LinearAffinePartition {
                    u: u.clone(),
                    w1: a.clone(),
                    w2: b.clone(),
                };
                let sp = src.expand();
                let p = sp.map_with(|x| table[x as usize]);
                let stab = p.translation_stabilizer();
                if !over_allowed(&stab, Some(&targets)) {
                    return None;
                }
                let conclusion = a == b && is_wall(layout, a) && p == sp;
                Some(LemmaHit {
                    source: Shape::of(&sp),
                    image: Shape::of(&p),
                    u: Some(u.clone()),
                    conclusion,
                })
            })
            .collect();
        hits.extend(found);
    }
    Ok((scanned, survivors, hits))
}
