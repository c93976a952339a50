use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::SBox;
use crate::f2lin::{GfContext, Word};

const PRESENT: [Word; 16] = [
    0xC, 0x5, 0x6, 0xB, 0x9, 0x0, 0xA, 0xD, 0x3, 0xE, 0xF, 0x8, 0x4, 0x7, 0x1, 0x2,
];

/// 4-bit permutation with δ = 6 whose coordinate 0 is linear (`f(x)₀ = x₀`).
pub const AFFINE_COMPONENT_4: [Word; 16] = [0, 9, 12, 5, 8, 11, 10, 3, 4, 1, 2, 15, 6, 7, 14, 13];

/// Named S-boxes used as a regression catalog, all fixing 0, widths `3..=max_m`.
pub fn reference_boxes(max_m: usize) -> Vec<(String, SBox)> {
    let mut out = Vec::new();
    for m in 3..=max_m.min(8) {
        let gf = GfContext::default_for(m).unwrap();
        out.push((format!("inv{m}"), SBox::inversion(&gf)));
        if m % 2 == 1 {
            let cube = (0..1 << m).map(|x| gf.pow(x, 3)).collect();
            out.push((format!("cube{m}"), SBox::new(cube).unwrap()));
        }
        if m <= 6 {
            let mut rng = ChaCha8Rng::seed_from_u64(m as u64);
            out.push((format!("random{m}"), SBox::random_permutation(m, &mut rng)));
        }
    }
    if max_m >= 4 {
        out.push(("id4".into(), SBox::identity(4)));
        let (present, _) = SBox::new(PRESENT.to_vec()).unwrap().normalize_zero();
        out.push(("present".into(), present));
        out.push((
            "affine-component4".into(),
            SBox::new(AFFINE_COMPONENT_4.to_vec()).unwrap(),
        ));
    }
    out
}

/// First seeded random 0-fixing permutation of width `m` satisfying `pred`.
pub fn find_permutation<F: Fn(&SBox) -> bool>(
    m: usize,
    seed: u64,
    max_tries: usize,
    pred: F,
) -> Option<SBox> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..max_tries)
        .map(|_| SBox::random_permutation(m, &mut rng))
        .find(|s| pred(s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::f2lin::dot;

    /// Distance to the nearest affine Boolean function, by enumeration.
    fn brute_nonlinearity(f: &SBox) -> u32 {
        let size = f.size() as Word;
        let mut best = u32::MAX;
        for beta in 1..size {
            for alpha in 0..size {
                let dist = (0..size)
                    .filter(|&x| dot(beta, f.apply(x)) != dot(alpha, x))
                    .count() as u32;
                best = best.min(dist).min(size - dist);
            }
        }
        best
    }

    #[test]
    fn catalog_is_well_formed() {
        let cat = reference_boxes(6);
        assert!(cat.iter().all(|(_, s)| s.is_bijective() && s.apply(0) == 0));
        let names: Vec<&str> = cat.iter().map(|(n, _)| n.as_str()).collect();
        assert!(names.contains(&"inv4") && names.contains(&"present"));
    }

    #[test]
    fn walsh_matches_distance_brute_force() {
        for (name, s) in reference_boxes(5) {
            assert_eq!(s.nonlinearity(), brute_nonlinearity(&s), "{name}");
        }
    }

    #[test]
    fn anti_invariance_agrees_with_nonlinearity() {
        for (name, s) in reference_boxes(5) {
            let sai = s.strong_anti_invariance(1).unwrap().holds;
            assert_eq!(sai, s.nonlinearity() > 0, "{name}");
        }
    }

    #[test]
    fn affine_component_box() {
        let s = SBox::new(AFFINE_COMPONENT_4.to_vec()).unwrap();
        assert!(s.is_bijective());
        assert_eq!(s.differential_uniformity(), 6);
        assert_eq!(s.nonlinearity(), 0);
        assert!((0..16).all(|x| s.apply(x) & 1 == x & 1));
    }

    #[test]
    fn search_is_deterministic() {
        let a = find_permutation(4, 1, 1000, |s| s.differential_uniformity() == 4);
        let b = find_permutation(4, 1, 1000, |s| s.differential_uniformity() == 4);
        assert!(a.is_some());
        assert_eq!(a, b);
    }
}
