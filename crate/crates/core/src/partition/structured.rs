use serde::Serialize;

use super::Partition;
use crate::error::{Error, Result};
use crate::f2lin::{enumerate_subspaces, enumerate_subspaces_of, LinearMap, Subspace, Word};

/// `L(W) = { W + v : v ∈ V }`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LinearPartition {
    pub w: Subspace,
}

impl LinearPartition {
    pub fn new(w: Subspace) -> Self {
        LinearPartition { w }
    }

    pub fn is_trivial(&self) -> bool {
        self.w.is_trivial()
    }

    pub fn expand(&self) -> Partition {
        let raw: Vec<u32> = (0..1u32 << self.w.ambient_dim())
            .map(|x| self.w.reduce(x))
            .collect();
        Partition::canonical_dense(self.w.ambient_dim(), &raw)
    }

    pub fn map_linear(&self, lambda: &LinearMap) -> LinearPartition {
        LinearPartition::new(lambda.map_subspace(&self.w))
    }
}

/// `LA_U(W₁|W₂) = { W₁ + v : v ∈ U } ∪ { (W₂ + v̄) + v : v ∈ U }` for a hyperplane `U`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LinearAffinePartition {
    pub u: Subspace,
    pub w1: Subspace,
    pub w2: Subspace,
}

impl LinearAffinePartition {
    /// `W₁ = W₂` is accepted; the result then equals `L(W₁)`.
    pub fn new(u: Subspace, w1: Subspace, w2: Subspace) -> Result<Self> {
        let n = u.ambient_dim();
        if u.dim() + 1 != n {
            return Err(Error::precondition(format!(
                "U must be a hyperplane (dim {} given, n = {n})",
                u.dim()
            )));
        }
        if w1.ambient_dim() != n || w2.ambient_dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: w1.ambient_dim().max(w2.ambient_dim()),
            });
        }
        if !w1.is_subspace_of(&u) || !w2.is_subspace_of(&u) {
            return Err(Error::precondition("W1 and W2 must be contained in U"));
        }
        Ok(LinearAffinePartition { u, w1, w2 })
    }

    /// Canonical anchor: the minimal vector of `V \ U`.
    pub fn vbar(&self) -> Word {
        self.u.min_outside().expect("U is a hyperplane")
    }

    pub fn is_linear(&self) -> bool {
        self.w1 == self.w2
    }

    pub fn expand(&self) -> Partition {
        self.expand_with_anchor(self.vbar())
    }

    /// Expansion computed literally from the definition with the given `v̄ ∉ U`.
    pub fn expand_with_anchor(&self, vbar: Word) -> Partition {
        assert!(!self.u.contains(vbar), "anchor must lie outside U");
        let n = self.u.ambient_dim();
        let mut raw = vec![0u32; 1 << n];
        let high = 1u32 << n;
        for v in self.u.elements() {
            raw[v as usize] = self.w1.reduce(v);
            let x = v ^ vbar;
            raw[x as usize] = high | self.w2.reduce(x ^ vbar);
        }
        Partition::canonical(n, raw)
    }

    /// `LA_U(W₁|W₂)λ = LA_{Uλ}(W₁λ|W₂λ)`.
    pub fn map_linear(&self, lambda: &LinearMap) -> LinearAffinePartition {
        LinearAffinePartition {
            u: lambda.map_subspace(&self.u),
            w1: lambda.map_subspace(&self.w1),
            w2: lambda.map_subspace(&self.w2),
        }
    }
}

/// A partition known to be linear or linear-affine.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Structure {
    Linear(LinearPartition),
    LinearAffine(LinearAffinePartition),
}

impl Structure {
    pub fn expand(&self) -> Partition {
        match self {
            Structure::Linear(l) => l.expand(),
            Structure::LinearAffine(la) => la.expand(),
        }
    }

    pub fn map_linear(&self, lambda: &LinearMap) -> Structure {
        match self {
            Structure::Linear(l) => Structure::Linear(l.map_linear(lambda)),
            Structure::LinearAffine(la) => Structure::LinearAffine(la.map_linear(lambda)),
        }
    }

    /// Collapses `LA_U(W|W)` to `L(W)`.
    pub fn normalized(self) -> Structure {
        match self {
            Structure::LinearAffine(la) if la.is_linear() => {
                Structure::Linear(LinearPartition::new(la.w1))
            }
            s => s,
        }
    }
}

/// All `L(W)`, trivial ones included, in subspace enumeration order.
pub fn enumerate_linear_partitions(n: usize) -> Result<impl Iterator<Item = LinearPartition>> {
    Ok(enumerate_subspaces(n, None)?.map(LinearPartition::new))
}

/// All `LA_U(W₁|W₂)` with `W₁ ≠ W₂ ⊆ U`, ordered by `(W₁, W₂)` enumeration index.
pub fn enumerate_linear_affine_partitions(
    u: &Subspace,
) -> Result<impl Iterator<Item = LinearAffinePartition> + '_> {
    if u.dim() + 1 != u.ambient_dim() {
        return Err(Error::precondition("U must be a hyperplane"));
    }
    let subs: Vec<Subspace> = enumerate_subspaces_of(u, None)?.collect();
    Ok((0..subs.len()).flat_map(move |i| {
        let subs = subs.clone();
        (0..subs.len()).filter(move |&j| j != i).map(move |j| LinearAffinePartition {
            u: u.clone(),
            w1: subs[i].clone(),
            w2: subs[j].clone(),
        })
    }))
}
