use rayon::prelude::*;
use serde::Serialize;

use crate::cipher::TbCipher;
use crate::error::{Error, Result};
use crate::f2lin::{enumerate_subspaces, enumerate_subspaces_of, is_affine_set, Subspace, Word};
use crate::partition::{
    classify_under_translations, enumerate_all_partitions, LinearAffinePartition, LinearPartition,
    Partition, TranslationSubgroup, Verdict,
};

/// Witness keys are re-checked exhaustively up to this many tuples.
pub const EXHAUSTIVE_RECHECK: u128 = 1 << 20;
/// Sample size for re-checks beyond [`EXHAUSTIVE_RECHECK`].
pub const RECHECK_SAMPLES: usize = 4096;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    LinearOnly,
    /// `u_list` restricts the hyperplanes allowed for linear-affine candidates.
    LinearAndAffine { u_list: Option<Vec<Subspace>> },
    /// Every partition of `V`, for `2ⁿ ≤ 8`.
    ExhaustiveTiny,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "keys", rename_all = "snake_case")]
pub enum KeySubset {
    /// Whole image up to 2²⁰ tuples, else a sample of 4096 from seed 0.
    Auto,
    Full,
    Sample { count: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchScope {
    pub family: Family,
    pub keys: KeySubset,
}

impl SearchScope {
    pub fn linear() -> Self {
        SearchScope {
            family: Family::LinearOnly,
            keys: KeySubset::Auto,
        }
    }

    pub fn affine() -> Self {
        SearchScope {
            family: Family::LinearAndAffine { u_list: None },
            keys: KeySubset::Auto,
        }
    }

    pub fn tiny() -> Self {
        SearchScope {
            family: Family::ExhaustiveTiny,
            keys: KeySubset::Auto,
        }
    }
}

/// Structural class of a partition in a chain.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum Shape {
    Linear { w: Subspace },
    LinearAffine { u: Subspace, w1: Subspace, w2: Subspace },
    Other { blocks: usize },
}

impl Shape {
    pub fn of(p: &Partition) -> Shape {
        if let Some(w) = p.as_linear() {
            return Shape::Linear { w };
        }
        let stab = p.translation_stabilizer();
        if stab.dim() + 1 == p.n() {
            if let Ok(Verdict::LinearAffine { u, w1, w2 }) =
                classify_under_translations(&TranslationSubgroup::new(stab), p)
            {
                return Shape::LinearAffine { u, w1, w2 };
            }
        }
        Shape::Other {
            blocks: p.block_count(),
        }
    }

    pub fn is_linear(&self) -> bool {
        matches!(self, Shape::Linear { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainEntry {
    pub index: usize,
    pub shape: Shape,
    #[serde(skip)]
    pub partition: Partition,
}

/// `(A, B)` mapped onto each other by the checked encryption functions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TrapdoorWitness {
    pub a: Partition,
    pub b: Partition,
    /// `A₁ = A`, `A_{h+1} = A_h γ_h λ_h σ_{c_h}` along the key-box offsets; `A_{ℓ+1} = B`.
    pub chain: Vec<ChainEntry>,
    /// Key position at which candidates were enumerated (0 for the exhaustive family).
    pub anchor: usize,
    pub keys_checked: usize,
    pub keys_exhaustive: bool,
}

/// `A_{i+1} = A_i γ_i λ_i`, without key additions.
pub fn propagate(c: &TbCipher, a1: &Partition) -> Vec<ChainEntry> {
    let mut out = Vec::with_capacity(c.round_count() + 1);
    let mut cur = a1.clone();
    out.push(ChainEntry {
        index: 1,
        shape: Shape::of(&cur),
        partition: cur.clone(),
    });
    for (h, r) in c.rounds().iter().enumerate() {
        cur = cur.map_with(|x| r.apply(x));
        out.push(ChainEntry {
            index: h + 2,
            shape: Shape::of(&cur),
            partition: cur.clone(),
        });
    }
    out
}

/// Round tables and the shifted key box of a cipher.
struct Prepared {
    n: usize,
    rho: Vec<Vec<Word>>,
    rho_inv: Vec<Vec<Word>>,
    offsets: Vec<Word>,
    dirs: Vec<Subspace>,
}

impl Prepared {
    fn new(c: &TbCipher) -> Self {
        let bx = c.effective_box();
        let rho: Vec<Vec<Word>> = (1..=c.round_count())
            .map(|h| c.round_permutation(h).table().to_vec())
            .collect();
        let rho_inv = rho
            .iter()
            .map(|t| {
                let mut inv = vec![0; t.len()];
                for (x, &y) in t.iter().enumerate() {
                    inv[y as usize] = x as Word;
                }
                inv
            })
            .collect();
        Prepared {
            n: c.n(),
            rho,
            rho_inv,
            offsets: bx.offsets,
            dirs: bx.dirs,
        }
    }

    fn rounds(&self) -> usize {
        self.rho.len()
    }

    fn invariant_at(&self, h: usize, p: &Partition) -> bool {
        self.dirs[h]
            .basis()
            .iter()
            .all(|&v| p.is_invariant_under_translation(v))
    }

    /// `P_0 … P_{ℓ−1}` (0-based) from `P_anchor`, or `None` at the first
    /// position whose key directions do not fix the partition.
    fn chain_from(&self, anchor: usize, p: Partition) -> Option<Vec<Partition>> {
        let l = self.rounds();
        if !self.invariant_at(anchor, &p) {
            return None;
        }
        let mut chain = vec![None; l];
        let mut cur = p.clone();
        for h in anchor + 1..l {
            let (c, rho) = (self.offsets[h - 1], &self.rho[h]);
            cur = cur.map_with(|x| rho[(x ^ c) as usize]);
            if !self.invariant_at(h, &cur) {
                return None;
            }
            chain[h] = Some(cur.clone());
        }
        cur = p.clone();
        for h in (0..anchor).rev() {
            let (c, inv) = (self.offsets[h], &self.rho_inv[h + 1]);
            cur = cur.map_with(|x| inv[x as usize] ^ c);
            if !self.invariant_at(h, &cur) {
                return None;
            }
            chain[h] = Some(cur.clone());
        }
        chain[anchor] = Some(p);
        Some(chain.into_iter().map(Option::unwrap).collect())
    }

    fn encrypt_table(&self, keys: &[Word], folded: &[Word]) -> Vec<Word> {
        let mut t: Vec<Word> = (0..1 << self.n as Word).collect();
        for ((rho, k), c) in self.rho.iter().zip(keys).zip(folded) {
            for y in t.iter_mut() {
                *y = rho[*y as usize] ^ k ^ c;
            }
        }
        t
    }
}

fn check_keys(c: &TbCipher, subset: &KeySubset) -> Result<(Vec<Vec<Word>>, bool)> {
    let ks = c.schedule();
    Ok(match subset {
        KeySubset::Auto => ks.keys_for_checks(EXHAUSTIVE_RECHECK, 0, RECHECK_SAMPLES),
        KeySubset::Full => (ks.enumerate()?, true),
        KeySubset::Sample { count, seed } => (ks.sample(*seed, *count), false),
    })
}

/// Whether `τ_k` maps `A` onto `B` for every listed key tuple.
fn recheck(prep: &Prepared, folded: &[Word], keys: &[Vec<Word>], a: &Partition, b: &Partition) -> bool {
    keys.par_iter().all(|k| {
        let t = prep.encrypt_table(k, folded);
        a.maps_onto_with(|x| t[x as usize], b)
    })
}

fn witness_from_chain(
    prep: &Prepared,
    chain: Vec<Partition>,
) -> (Partition, Partition, Vec<ChainEntry>) {
    let l = prep.rounds();
    let inv = &prep.rho_inv[0];
    let a = chain[0].map_with(|x| inv[x as usize]);
    let mut entries = vec![ChainEntry {
        index: 1,
        shape: Shape::of(&a),
        partition: a.clone(),
    }];
    for (h, p) in chain.into_iter().enumerate() {
        let c = prep.offsets[h];
        let next = p.map_with(|x| x ^ c);
        entries.push(ChainEntry {
            index: h + 2,
            shape: Shape::of(&next),
            partition: next,
        });
    }
    let b = entries[l].partition.clone();
    (a, b, entries)
}

struct Plan {
    anchor: usize,
    linear: Vec<Subspace>,
    affine_u: Option<Subspace>,
    w1: Vec<Subspace>,
    w2: Vec<Subspace>,
}

/// Whether `(S + c)π` is affine for every coset `S` of `w` inside `region`.
pub(crate) fn cosets_stay_affine(w: &Subspace, region: &[Word], pi: &[Word]) -> bool {
    let elems = w.elements();
    let mut img = Vec::with_capacity(elems.len());
    for &x in region {
        if w.reduce(x) != x {
            continue;
        }
        img.clear();
        img.extend(elems.iter().map(|&e| pi[(x ^ e) as usize]));
        if !is_affine_set(&img) {
            return false;
        }
    }
    true
}

fn plan(prep: &Prepared, family: &Family) -> Result<Plan> {
    let n = prep.n;
    let l = prep.rounds();
    let anchor = (0..l).find(|&h| prep.dirs[h].dim() + 1 >= n).ok_or_else(|| {
        Error::precondition(
            "no key position varies over a subgroup of order ≥ 2^{n−1}; use the exhaustive family",
        )
    })?;
    // the next such position sees every block of the anchor partition as an affine set
    let filter = (anchor + 1..l).find(|&h| prep.dirs[h].dim() + 1 >= n);
    let pi: Option<Vec<Word>> = filter.map(|f| {
        (0..1 << n as Word)
            .map(|x| {
                let mut y = x;
                for h in anchor + 1..=f {
                    y = prep.rho[h][(y ^ prep.offsets[h - 1]) as usize];
                }
                y
            })
            .collect()
    });
    let passes = |w: &Subspace, region: &[Word]| pi.as_ref().map_or(true, |p| cosets_stay_affine(w, region, p));
    let everything: Vec<Word> = (0..1 << n as Word).collect();
    let all: Vec<Subspace> = enumerate_subspaces(n, None)?
        .filter(|w| !w.is_trivial())
        .collect();
    let linear: Vec<Subspace> = all.into_par_iter().filter(|w| passes(w, &everything)).collect();
    let u = &prep.dirs[anchor];
    let wants_affine = match family {
        Family::LinearAndAffine { u_list } => {
            !u.is_full() && u_list.as_ref().map_or(true, |list| list.contains(u))
        }
        _ => false,
    };
    let (affine_u, w1, w2) = if wants_affine {
        let inside = u.elements();
        let vbar = u.min_outside().expect("hyperplane");
        let outside: Vec<Word> = inside.iter().map(|&x| x ^ vbar).collect();
        let subs: Vec<Subspace> = enumerate_subspaces_of(u, None)?.collect();
        let w1 = subs.par_iter().filter(|w| passes(w, &inside)).cloned().collect();
        let w2 = subs.into_par_iter().filter(|w| passes(w, &outside)).collect();
        (Some(u.clone()), w1, w2)
    } else {
        (None, Vec::new(), Vec::new())
    };
    Ok(Plan {
        anchor,
        linear,
        affine_u,
        w1,
        w2,
    })
}

impl Plan {
    fn linear_at(&self, i: usize) -> Partition {
        LinearPartition::new(self.linear[i].clone()).expand()
    }

    fn affine_at(&self, i: usize, j: usize) -> Option<Partition> {
        (self.w1[i] != self.w2[j]).then(|| {
            LinearAffinePartition {
                u: self.affine_u.clone().expect("affine family"),
                w1: self.w1[i].clone(),
                w2: self.w2[j].clone(),
            }
            .expand()
        })
    }
}

/// First witness in candidate order, or `None`.
pub fn search_trapdoor(c: &TbCipher, scope: &SearchScope) -> Result<Option<TrapdoorWitness>> {
    Ok(search(c, scope, true)?.into_iter().next())
}

/// Every witness of the scope's family, in candidate order.
pub fn search_all(c: &TbCipher, scope: &SearchScope) -> Result<Vec<TrapdoorWitness>> {
    search(c, scope, false)
}

fn search(c: &TbCipher, scope: &SearchScope, first_only: bool) -> Result<Vec<TrapdoorWitness>> {
    let prep = Prepared::new(c);
    let (keys, exhaustive) = check_keys(c, &scope.keys)?;
    let folded = c.offsets().to_vec();
    if scope.family == Family::ExhaustiveTiny {
        return exhaustive_tiny(c, &prep, &folded, &keys, exhaustive, first_only);
    }
    let plan = plan(&prep, &scope.family)?;
    let attempt = |p: Partition| -> Option<TrapdoorWitness> {
        let chain = prep.chain_from(plan.anchor, p)?;
        let (a, b, entries) = witness_from_chain(&prep, chain);
        recheck(&prep, &folded, &keys, &a, &b).then(|| TrapdoorWitness {
            a,
            b,
            chain: entries,
            anchor: plan.anchor + 1,
            keys_checked: keys.len(),
            keys_exhaustive: exhaustive,
        })
    };
    let lin = 0..plan.linear.len();
    let rows = 0..plan.w1.len();
    let plan = &plan;
    let row = move |i: usize| (0..plan.w2.len()).filter_map(move |j| plan.affine_at(i, j));
    if first_only {
        let hit = lin
            .into_par_iter()
            .find_map_first(|i| attempt(plan.linear_at(i)))
            .or_else(|| rows.into_par_iter().find_map_first(|i| row(i).find_map(attempt)));
        return Ok(hit.into_iter().collect());
    }
    let mut out: Vec<TrapdoorWitness> = lin
        .into_par_iter()
        .filter_map(|i| attempt(plan.linear_at(i)))
        .collect();
    let more: Vec<Vec<TrapdoorWitness>> = rows
        .into_par_iter()
        .map(|i| row(i).filter_map(attempt).collect())
        .collect();
    out.extend(more.into_iter().flatten());
    Ok(out)
}

fn exhaustive_tiny(
    c: &TbCipher,
    prep: &Prepared,
    folded: &[Word],
    keys: &[Vec<Word>],
    exhaustive: bool,
    first_only: bool,
) -> Result<Vec<TrapdoorWitness>> {
    let n = c.n();
    if n > 3 {
        return Err(Error::TooLarge {
            what: "dimension for the exhaustive family",
            value: n,
            limit: 3,
        });
    }
    let tables: Vec<Vec<Word>> = keys.iter().map(|k| prep.encrypt_table(k, folded)).collect();
    let mut out = Vec::new();
    for a in enumerate_all_partitions(n)? {
        if a.is_trivial() {
            continue;
        }
        let b = a.map_with(|x| tables[0][x as usize]);
        if tables.iter().all(|t| a.maps_onto_with(|x| t[x as usize], &b)) {
            let chain = tiny_chain(prep, &a);
            out.push(TrapdoorWitness {
                a,
                b,
                chain,
                anchor: 0,
                keys_checked: keys.len(),
                keys_exhaustive: exhaustive,
            });
            if first_only {
                break;
            }
        }
    }
    Ok(out)
}

fn tiny_chain(prep: &Prepared, a: &Partition) -> Vec<ChainEntry> {
    let mut cur = a.clone();
    let mut out = vec![ChainEntry {
        index: 1,
        shape: Shape::of(&cur),
        partition: cur.clone(),
    }];
    for (h, rho) in prep.rho.iter().enumerate() {
        let c = prep.offsets[h];
        cur = cur.map_with(|x| rho[x as usize] ^ c);
        out.push(ChainEntry {
            index: h + 2,
            shape: Shape::of(&cur),
            partition: cur.clone(),
        });
    }
    out
}
