//! Control ciphers: trapdoored by construction, a compliant cipher and one
//! counterexample per weakened hypothesis.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cipher::{is_strongly_proper, KeySchedule, Round, ScheduleVariant, TbCipher};
use crate::error::{Error, Result};
use crate::f2lin::{mask, BlockLayout, GfContext, LinearMap, Subspace, Word};
use crate::partition::LinearPartition;
use crate::sbox::{ParallelMap, SBox, AFFINE_COMPONENT_4};

/// `W ∩ V_j` for each block, or `None` unless `W` is their direct sum.
fn decompose(layout: &BlockLayout, w: &Subspace) -> Option<Vec<Subspace>> {
    let m = layout.m();
    let parts: Vec<Subspace> = (0..layout.b())
        .map(|j| {
            let inter = w.intersection(&layout.sum_of_blocks(1 << j));
            Subspace::span_unchecked(inter.basis().iter().map(|&v| layout.block(v, j)), m)
        })
        .collect();
    (parts.iter().map(Subspace::dim).sum::<usize>() == w.dim()).then_some(parts)
}

fn random_subspace<R: Rng>(m: usize, dim: usize, rng: &mut R) -> Subspace {
    let mut s = Subspace::zero(m);
    while s.dim() < dim {
        s.insert(rng.gen::<Word>() & mask(m));
    }
    s
}

/// A bijection of `(F₂)^m` fixing 0 that maps each coset of `from` onto a coset of `to`.
fn coset_bijection<R: Rng>(from: &Subspace, to: &Subspace, rng: &mut R) -> SBox {
    let m = from.ambient_dim();
    let reps = |s: &Subspace| -> Vec<Word> { (0..1 << m as Word).filter(|&x| s.reduce(x) == x).collect() };
    let (src, mut dst) = (reps(from), reps(to));
    dst[1..].shuffle(rng);
    let (a, b) = (from.elements(), to.elements());
    let mut table = vec![0; 1 << m];
    for (&c, &d) in src.iter().zip(&dst) {
        let mut inside = b.clone();
        if c == 0 {
            inside[1..].shuffle(rng);
        } else {
            inside.shuffle(rng);
        }
        for (&x, &y) in a.iter().zip(&inside) {
            table[(x ^ c) as usize] = y ^ d;
        }
    }
    SBox::permutation(table).expect("coset bijection")
}

/// Invertible `λ` with `Yλ = T`, random elsewhere.
fn linear_onto<R: Rng>(y: &Subspace, t: &Subspace, rng: &mut R) -> LinearMap {
    let n = y.ambient_dim();
    let extend = |s: &Subspace, rng: &mut R| {
        let mut rows = s.basis().to_vec();
        let mut acc = s.clone();
        while acc.dim() < n {
            let v = rng.gen::<Word>() & mask(n);
            if acc.insert(v) {
                rows.push(v);
            }
        }
        LinearMap::from_rows(rows).expect("full basis")
    };
    let mut target = extend(t, rng).rows().to_vec();
    // mix the basis of T so the map is not just a basis alignment
    let d = t.dim();
    for _ in 0..2 * n {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if i != j && (j < d || i >= d) {
            target[i] ^= target[j];
        }
    }
    let src = extend(y, rng);
    src.inverse()
        .expect("basis")
        .then(&LinearMap::from_rows(target).expect("basis"))
}

/// Whitening round followed by rounds mapping `L(chain[h])` onto `L(chain[h+1])`,
/// with independent round keys.
pub fn build_trapdoored_cipher(layout: BlockLayout, chain: &[Subspace], seed: u64) -> Result<TbCipher> {
    let n = layout.n();
    if chain.len() < 2 {
        return Err(Error::precondition("the chain needs at least two subspaces"));
    }
    if let Some(w) = chain.iter().find(|w| w.ambient_dim() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: w.ambient_dim(),
        });
    }
    if chain.iter().any(Subspace::is_trivial) {
        return Err(Error::precondition("chain subspaces must be nontrivial"));
    }
    if chain.windows(2).any(|p| p[0].dim() != p[1].dim()) {
        return Err(Error::precondition("chain subspaces must share one dimension"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rounds = vec![Round::identity(layout)];
    for (h, pair) in chain.windows(2).enumerate() {
        let parts = decompose(&layout, &pair[0]).ok_or_else(|| {
            Error::precondition(format!("chain entry {} is not a sum of per-block subspaces", h + 1))
        })?;
        let mut boxes = Vec::with_capacity(layout.b());
        let mut y = Vec::new();
        for (j, w) in parts.iter().enumerate() {
            let target = random_subspace(layout.m(), w.dim(), &mut rng);
            boxes.push(coset_bijection(w, &target, &mut rng));
            y.extend(target.basis().iter().map(|&v| layout.embed(v, j)));
        }
        let y = Subspace::span_unchecked(y, n);
        let round = Round {
            gamma: ParallelMap::new(boxes)?,
            lambda: linear_onto(&y, &pair[1], &mut rng),
        };
        debug_assert_eq!(
            LinearPartition::new(pair[0].clone()).expand().map_with(|x| round.apply(x)),
            LinearPartition::new(pair[1].clone()).expand()
        );
        rounds.push(round);
    }
    let ks = KeySchedule::new(n, rounds.len(), ScheduleVariant::Independent)?;
    TbCipher::new(layout, rounds, ks)
}

fn span(vs: &[Word], n: usize) -> Subspace {
    Subspace::span(vs.iter().copied(), n).expect("inside V")
}

/// `n = 6`, two 3-bit blocks: `V₁ → span{e₀} ⊕ span{e₃, e₄} → ` a non-split subspace.
pub fn trapdoored6(seed: u64) -> TbCipher {
    let layout = BlockLayout::new(2, 3).unwrap();
    let chain = [span(&[1, 2, 4], 6), span(&[1, 8, 16], 6), span(&[9, 18, 36], 6)];
    build_trapdoored_cipher(layout, &chain, seed).expect("feasible chain")
}

/// `n = 6` with the first block wall kept by every round.
pub fn wall_preserving(seed: u64) -> TbCipher {
    let layout = BlockLayout::new(2, 3).unwrap();
    let v1 = span(&[1, 2, 4], 6);
    build_trapdoored_cipher(layout, &[v1.clone(), v1.clone(), v1], seed).expect("feasible chain")
}

/// Which hypothesis a counterexample weakens.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ablation {
    /// Round 3 mixes blockwise, so it is not strongly proper.
    BlockwiseMixing,
    /// Rounds 3 and 4 use a 4-bit S-box with an affine component.
    AffineComponent,
    /// Round key 4 is fixed, so no three consecutive keys vary.
    ShortKeyBox,
}

impl Ablation {
    pub const ALL: [Ablation; 3] = [
        Ablation::BlockwiseMixing,
        Ablation::AffineComponent,
        Ablation::ShortKeyBox,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Ablation::BlockwiseMixing => "blockwise-mixing",
            Ablation::AffineComponent => "affine-component",
            Ablation::ShortKeyBox => "short-key-box",
        }
    }
}

const ROUNDS: usize = 5;
const FREE_ROUND: usize = 3;
const FIXED_KEYS: [Word; ROUNDS] = [0x3a, 0, 0, 0, 0xc5];

fn hyperplane(c: Word) -> Subspace {
    Subspace::kernel_of(c, 8).expect("nonzero functional")
}

/// `U₁, U₂, U₃` of the compliant cipher.
pub fn compliant_spaces() -> [Subspace; 3] {
    [hyperplane(0x01), hyperplane(0x10), hyperplane(0x11)]
}

fn mixing_layers(seed: u64) -> Vec<LinearMap> {
    let layout = BlockLayout::new(2, 4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let [u1, u2, _] = compliant_spaces();
    let images = [hyperplane(0x01), hyperplane(0x10), hyperplane(0x11)];
    (1..=ROUNDS)
        .map(|h| loop {
            let lam = LinearMap::random_invertible(8, &mut rng);
            if !is_strongly_proper(&lam, &layout).holds {
                continue;
            }
            if h != FREE_ROUND {
                break lam;
            }
            // (U₁)λ₃ must stay among the hyperplanes kept by an affine component,
            // and U₂λ₃⁻¹ must meet only the second block properly
            let pulled = lam.inverse().expect("invertible").map_subspace(&u2);
            let j = layout.profile(&pulled).expect("same dimension").j_set;
            if images.contains(&lam.map_subspace(&u1)) && j == [1] {
                break lam;
            }
        })
        .collect()
}

fn inversion4() -> SBox {
    SBox::inversion(&GfContext::default_for(4).expect("m = 4"))
}

fn assemble(lambdas: Vec<LinearMap>, boxes: Vec<SBox>, variant: ScheduleVariant) -> TbCipher {
    let layout = BlockLayout::new(2, 4).unwrap();
    let rounds = lambdas
        .into_iter()
        .zip(boxes)
        .map(|(lambda, s)| Round {
            gamma: ParallelMap::uniform(&s, 2).expect("uniform layer"),
            lambda,
        })
        .collect();
    let ks = KeySchedule::new(8, ROUNDS, variant).expect("valid schedule");
    TbCipher::new(layout, rounds, ks).expect("valid cipher")
}

fn almost_independent() -> ScheduleVariant {
    ScheduleVariant::AlmostIndependent {
        i: FREE_ROUND,
        u: compliant_spaces(),
        fixed_keys: FIXED_KEYS.to_vec(),
    }
}

/// `n = 8`, two inversion S-boxes over GF(16), five rounds, round keys 2–4
/// free in `U₁ × U₂ × U₃`.
pub fn compliant8(seed: u64) -> TbCipher {
    assemble(mixing_layers(seed), vec![inversion4(); ROUNDS], almost_independent())
}

/// [`compliant8`] with exactly one hypothesis broken.
pub fn ablated8(seed: u64, which: Ablation) -> TbCipher {
    let mut lambdas = mixing_layers(seed);
    let mut boxes = vec![inversion4(); ROUNDS];
    let mut variant = almost_independent();
    match which {
        Ablation::BlockwiseMixing => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xb10c);
            let parts = [
                LinearMap::random_invertible(4, &mut rng),
                LinearMap::random_invertible(4, &mut rng),
            ];
            lambdas[FREE_ROUND - 1] = LinearMap::block_diagonal(&parts).expect("square blocks");
        }
        Ablation::AffineComponent => {
            let s = SBox::permutation(AFFINE_COMPONENT_4.to_vec()).expect("catalog box");
            boxes[FREE_ROUND - 1] = s.clone();
            boxes[FREE_ROUND] = s;
        }
        Ablation::ShortKeyBox => {
            let [u1, u2, _] = compliant_spaces();
            let zero = Subspace::zero(8);
            variant = ScheduleVariant::Product(vec![
                (FIXED_KEYS[0], zero.clone()),
                (0, u1),
                (0, u2),
                (0x5e, zero.clone()),
                (FIXED_KEYS[4], zero),
            ]);
        }
    }
    assemble(lambdas, boxes, variant)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::Partition;
    use crate::permgroup::{PermSet, Primitivity};
    use crate::trapdoor::{search_all, search_trapdoor, SearchScope};

    #[test]
    fn coset_bijection_respects_cosets() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for d in 0..=3 {
            let w = random_subspace(3, d, &mut rng);
            let y = random_subspace(3, d, &mut rng);
            let s = coset_bijection(&w, &y, &mut rng);
            assert_eq!(s.apply(0), 0);
            let lw = LinearPartition::new(w).expand();
            assert_eq!(lw.map_with(|x| s.apply(x)), LinearPartition::new(y).expand());
        }
    }

    #[test]
    fn linear_onto_hits_the_target() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for d in 1..6 {
            let y = random_subspace(6, d, &mut rng);
            let t = random_subspace(6, d, &mut rng);
            let lam = linear_onto(&y, &t, &mut rng);
            assert!(lam.is_invertible());
            assert_eq!(lam.map_subspace(&y), t);
        }
    }

    #[test]
    fn infeasible_chains_are_rejected() {
        let layout = BlockLayout::new(2, 3).unwrap();
        let v1 = span(&[1, 2, 4], 6);
        assert!(build_trapdoored_cipher(layout, &[v1.clone(), Subspace::zero(6)], 0).is_err());
        assert!(build_trapdoored_cipher(layout, &[v1.clone(), Subspace::full(6)], 0).is_err());
        assert!(build_trapdoored_cipher(layout, &[span(&[9, 18, 36], 6), v1.clone()], 0).is_err());
        assert!(build_trapdoored_cipher(layout, &[v1], 0).is_err());
    }

    #[test]
    fn trapdoor_control_has_its_trapdoor() {
        let c = trapdoored6(1);
        let a = LinearPartition::new(span(&[1, 2, 4], 6)).expand();
        let b = LinearPartition::new(span(&[9, 18, 36], 6)).expand();
        let keys = c.schedule().enumerate().unwrap();
        for k in keys.iter().step_by(997) {
            let t = c.materialize(k).unwrap();
            assert!(a.maps_onto_with(|x| t.apply(x), &b));
        }
        let found: Vec<(Partition, Partition)> = search_all(&c, &SearchScope::linear())
            .unwrap()
            .into_iter()
            .map(|w| (w.a, w.b))
            .collect();
        assert!(found.contains(&(a, b)));
        let w = search_trapdoor(&c, &SearchScope::linear()).unwrap().unwrap();
        assert!(w.keys_exhaustive);
        assert!(w.chain.iter().all(|e| e.shape.is_linear()));
        assert_eq!(w.chain.last().unwrap().partition, w.b);
    }

    #[test]
    fn wall_preserving_control_is_imprimitive() {
        let c = wall_preserving(2);
        let keys = c.schedule().sample(3, 16);
        let gens = keys.iter().map(|k| c.materialize(k).unwrap()).collect();
        let g = PermSet::new(6, gens).unwrap();
        let l1 = LinearPartition::new(span(&[1, 2, 4], 6)).expand();
        assert_eq!(g.minimal_block_system(0, 1).unwrap(), l1);
        assert!(matches!(g.is_primitive(), Primitivity::Imprimitive { .. }));
    }

    #[test]
    fn fixtures_are_deterministic() {
        let a = compliant8(7);
        let b = compliant8(7);
        let keys = a.schedule().sample(1, 4);
        for k in &keys {
            assert_eq!(a.materialize(k).unwrap(), b.materialize(k).unwrap());
        }
        for which in Ablation::ALL {
            let c = ablated8(7, which);
            assert_eq!(c.round_count(), 5);
        }
    }

    #[test]
    fn compliant_cipher_has_no_trapdoor_and_ablations_do() {
        use crate::cipher::{theorem_hypotheses_report, TheoremId};
        let c = compliant8(0);
        let rep = theorem_hypotheses_report(&c);
        assert!(rep.check(TheoremId::Mainme).applies, "{rep:?}");
        assert!(search_trapdoor(&c, &SearchScope::affine()).unwrap().is_none());
        for which in Ablation::ALL {
            let c = ablated8(0, which);
            let rep = theorem_hypotheses_report(&c);
            assert!(!rep.check(TheoremId::Mainme).applies, "{}", which.name());
            let w = search_trapdoor(&c, &SearchScope::affine()).unwrap();
            assert!(w.is_some(), "{}", which.name());
        }
    }

    #[test]
    fn compliant_rounds_break_wall_chains() {
        use crate::trapdoor::propagate;
        let c = compliant8(0);
        let layout = c.layout();
        for (_, wall) in layout.walls() {
            let chain = propagate(&c, &LinearPartition::new(wall).expand());
            let broken = chain[1..3].iter().any(|e| match &e.shape {
                crate::trapdoor::Shape::Linear { w } => layout.is_wall(w).is_none(),
                _ => true,
            });
            assert!(broken);
        }
    }
}
