use serde::Serialize;

use super::{LinearAffinePartition, LinearPartition, Partition, Structure};
use crate::error::{Error, Result};
use crate::f2lin::Subspace;
use crate::perm::Permutation;

/// `T' = { σ_v : v ∈ U }`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct TranslationSubgroup {
    pub u: Subspace,
}

impl TranslationSubgroup {
    pub fn new(u: Subspace) -> Self {
        TranslationSubgroup { u }
    }

    pub fn full(n: usize) -> Self {
        TranslationSubgroup {
            u: Subspace::full(n),
        }
    }

    pub fn order(&self) -> usize {
        self.u.size()
    }

    /// Whether every element of `T'` fixes `a` (it suffices to test a basis).
    pub fn fixes(&self, a: &Partition) -> bool {
        self.u
            .basis()
            .iter()
            .all(|&v| a.is_invariant_under_translation(v))
    }
}

/// Outcome of [`classify_under_translations`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Linear { w: Subspace },
    LinearAffine { u: Subspace, w1: Subspace, w2: Subspace },
    NotMapped,
}

impl Verdict {
    pub fn structure(&self) -> Option<Structure> {
        match self {
            Verdict::Linear { w } => Some(Structure::Linear(LinearPartition::new(w.clone()))),
            Verdict::LinearAffine { u, w1, w2 } => Some(Structure::LinearAffine(
                LinearAffinePartition {
                    u: u.clone(),
                    w1: w1.clone(),
                    w2: w2.clone(),
                },
            )),
            Verdict::NotMapped => None,
        }
    }
}

/// True iff `Aρ = B` for every non-identity `ρ` in `perms`.
pub fn maps_onto(perms: &[Permutation], a: &Partition, b: &Partition) -> bool {
    perms
        .iter()
        .filter(|p| !p.is_identity())
        .all(|p| a.maps_onto_with(|x| p.apply(x), b))
}

/// Decides whether a translation group of order `2^{n−1}` or `2ⁿ` maps `A`
/// onto some partition, and if so recovers its linear or linear-affine shape
/// from the block through 0 and the block through `v̄`.
pub fn classify_under_translations(t: &TranslationSubgroup, a: &Partition) -> Result<Verdict> {
    let n = a.n();
    let u = &t.u;
    if u.ambient_dim() != n || u.dim() + 1 < n {
        return Err(Error::precondition(format!(
            "translation subgroup must have dimension n−1 or n (got {} with n = {n})",
            u.dim()
        )));
    }
    // T' maps A onto B ⇒ B = A, so the question is whether T' fixes A
    if !t.fixes(a) {
        return Ok(Verdict::NotMapped);
    }
    let a0 = a.block_of(0);
    let verdict = if u.is_full() || a0.iter().any(|&x| !u.contains(x)) {
        Verdict::Linear {
            w: subspace_of_block(&a0, n),
        }
    } else {
        let vbar = u.min_outside().expect("hyperplane");
        let w1 = subspace_of_block(&a0, n);
        let shifted: Vec<_> = a.block_of(vbar).into_iter().map(|x| x ^ vbar).collect();
        let w2 = subspace_of_block(&shifted, n);
        if w1 == w2 {
            Verdict::Linear { w: w1 }
        } else {
            Verdict::LinearAffine {
                u: u.clone(),
                w1,
                w2,
            }
        }
    };
    let rebuilt = verdict.structure().expect("mapped").expand();
    assert_eq!(&rebuilt, a, "classification does not reproduce the partition");
    Ok(verdict)
}

fn subspace_of_block(block: &[crate::f2lin::Word], n: usize) -> Subspace {
    let s = Subspace::span_unchecked(block.iter().copied(), n);
    assert_eq!(s.size(), block.len(), "fixed block through 0 is not a subspace");
    s
}
