use super::Structure;
use crate::error::{Error, Result};
use crate::f2lin::{Subspace, Word};
use crate::perm::Permutation;

/// Checks the derivative containments implied by `γ` (with `0γ = 0`) mapping
/// `source` onto `target`:
///
/// - `L(W) → L(W')`: `γ̂_u(V) ⊆ W'` for `u ∈ W`;
/// - `L(W) → LA_U(W₁|W₂)`: `γ̂_u(Uγ⁻¹) ⊆ W₁` and `γ̂_u((U+v̄)γ⁻¹) ⊆ W₂` for `u ∈ W`;
/// - `LA_U(W₁|W₂) → L(W)`: `γ̂_u(U) ⊆ W` for `u ∈ W₁`, `γ̂_u(U+v̄) ⊆ W` for `u ∈ W₂`;
/// - `LA_U(W₁|W₂) → LA_{U'}(W'₁|W'₂)`: for `u ∈ W₁` (on `U`) or `u ∈ W₂` (on `U+v̄`),
///   `γ̂_u(S) ⊆ W'₁` on `S ⊆ U'γ⁻¹` and `⊆ W'₂` on `S ⊆ (U'+v̄')γ⁻¹`.
///
/// Errors if the mapping precondition does not hold.
pub fn lemmaeasy_check(gamma: &Permutation, source: &Structure, target: &Structure) -> Result<bool> {
    if gamma.apply(0) != 0 {
        return Err(Error::precondition("γ must fix 0"));
    }
    let a = source.expand();
    let b = target.expand();
    if a.n() != gamma.n() || b.n() != gamma.n() {
        return Err(Error::DimensionMismatch {
            expected: gamma.n(),
            got: a.n().max(b.n()),
        });
    }
    if !a.maps_onto_with(|x| gamma.apply(x), &b) {
        return Err(Error::precondition("γ does not map the source partition onto the target"));
    }
    let n = gamma.n();
    for x in 0..1 << n as Word {
        let y = gamma.apply(x);
        let dirs = side_space(source, x);
        let allowed = side_space(target, y);
        for u in dirs.elements() {
            if !allowed.contains(gamma.apply(x ^ u) ^ y) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The direction space of the block containing `x`.
fn side_space(s: &Structure, x: Word) -> &Subspace {
    match s {
        Structure::Linear(l) => &l.w,
        Structure::LinearAffine(la) if la.u.contains(x) => &la.w1,
        Structure::LinearAffine(la) => &la.w2,
    }
}
