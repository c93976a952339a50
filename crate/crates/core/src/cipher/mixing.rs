use serde::Serialize;

use crate::f2lin::{BlockLayout, LinearMap, Subspace, Word};

/// Outcome of a wall test on a mixing layer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WallCheck {
    pub holds: bool,
    /// Offending wall (as 0-based block-index bitmask) and its image.
    pub witness: Option<WallWitness>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WallWitness {
    pub wall: Word,
    pub image: Subspace,
    /// Index set of the image when it is itself a wall.
    pub image_wall: Option<Word>,
}

/// No wall is invariant under `λ`.
pub fn is_proper(lambda: &LinearMap, layout: &BlockLayout) -> WallCheck {
    check(lambda, layout, |w, img| img == w)
}

/// No wall is mapped onto a wall.
pub fn is_strongly_proper(lambda: &LinearMap, layout: &BlockLayout) -> WallCheck {
    check(lambda, layout, |_, img| layout.is_wall(img).is_some())
}

fn check<F: Fn(&Subspace, &Subspace) -> bool>(
    lambda: &LinearMap,
    layout: &BlockLayout,
    bad: F,
) -> WallCheck {
    assert_eq!(lambda.dim(), layout.n());
    for (set, wall) in layout.walls() {
        let image = lambda.map_subspace(&wall);
        if bad(&wall, &image) {
            let image_wall = layout.is_wall(&image);
            return WallCheck {
                holds: false,
                witness: Some(WallWitness {
                    wall: set,
                    image,
                    image_wall,
                }),
            };
        }
    }
    WallCheck {
        holds: true,
        witness: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::f2lin::enumerate_subspaces;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn swap(m: usize) -> LinearMap {
        let rows = (0..2 * m).map(|k| 1 << ((k + m) % (2 * m))).collect();
        LinearMap::from_rows(rows).unwrap()
    }

    #[test]
    fn identity_and_swap() {
        let l = BlockLayout::new(2, 4).unwrap();
        let id = is_proper(&LinearMap::identity(8), &l);
        assert!(!id.holds);
        assert_eq!(id.witness.unwrap().wall, 0b01);
        assert!(is_proper(&swap(4), &l).holds);
        let sp = is_strongly_proper(&swap(4), &l);
        assert!(!sp.holds);
        assert_eq!(sp.witness.unwrap().image_wall, Some(0b10));
    }

    #[test]
    fn random_layers() {
        let l = BlockLayout::new(2, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut strong = 0;
        for _ in 0..200 {
            let lam = LinearMap::random_invertible(8, &mut rng);
            let sp = is_strongly_proper(&lam, &l).holds;
            if sp {
                strong += 1;
                assert!(is_proper(&lam, &l).holds);
                // exhaustive confirmation over all subspaces that are walls
                for u in enumerate_subspaces(8, Some(4)).unwrap() {
                    if l.is_wall(&u).is_some() {
                        assert!(l.is_wall(&lam.map_subspace(&u)).is_none());
                    }
                }
            }
        }
        assert!(strong > 100);
    }

    #[test]
    fn proper_not_strong_means_wall_onto_other_wall() {
        for m in 1..=3 {
            let l = BlockLayout::new(2, m).unwrap();
            let n = 2 * m;
            let mut rng = ChaCha8Rng::seed_from_u64(m as u64);
            let (v0, v1) = (l.sum_of_blocks(1), l.sum_of_blocks(2));
            for _ in 0..300 {
                let lam = LinearMap::random_invertible(n, &mut rng);
                let proper = is_proper(&lam, &l).holds;
                let strong = is_strongly_proper(&lam, &l).holds;
                let (i0, i1) = (lam.map_subspace(&v0), lam.map_subspace(&v1));
                assert_eq!(proper && !strong, i0 == v1 || i1 == v0);
                if i0 == v1 && i1 == v0 {
                    assert!(proper && !strong);
                }
            }
            assert!(is_proper(&swap(m), &l).holds && !is_strongly_proper(&swap(m), &l).holds);
        }
    }
}
