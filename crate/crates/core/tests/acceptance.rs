//! End-to-end acceptance checks, one status line each.

use std::time::Instant;

use partrap::cipher::{theorem_hypotheses_report, TheoremId};
use partrap::f2lin::{dot, enumerate_subspaces, enumerate_subspaces_of, BlockLayout, GfContext, LinearMap, Subspace, Word};
use partrap::partition::{
    classify_under_translations, enumerate_all_partitions, enumerate_linear_partitions, maps_onto,
    LinearAffinePartition, LinearPartition, Partition, TranslationSubgroup, Verdict,
};
use partrap::perm::Permutation;
use partrap::permgroup::{PermSet, Primitivity};
use partrap::sbox::{reference_boxes, ParallelMap, SBox};
use partrap::trapdoor::{
    ablated8, trapdoored6, compliant8, search_trapdoor, validate_lemma, validate_theorem, wall_preserving,
    Ablation, LemmaId, LemmaParams, SearchScope, TheoremOptions,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn inversion_golden() -> Outcome {
    let mut delta_ok = true;
    let mut n_hats = Vec::new();
    for m in 3..=8 {
        let s = SBox::inversion(&GfContext::default_for(m).unwrap());
        let expect = if m % 2 == 0 { 4 } else { 2 };
        delta_ok &= s.differential_uniformity() == expect;
        n_hats.push((m, s.n_hat()));
    }
    // x ↦ x⁶ on GF(8) is quadratic, so every derivative lands in an affine hyperplane
    let n_hat_ok = n_hats.iter().all(|&(m, h)| h == usize::from(m == 3));
    assert!(delta_ok && n_hat_ok, "{n_hats:?}");
    let all_zero = n_hats.iter().all(|&(_, h)| h == 0);
    outcome(
        delta_ok && all_zero,
        format!("δ = 2 (odd m), 4 (even m) for m = 3..8; n̂ per m {n_hats:?}: n̂ = 1 at m = 3, not 0"),
    )
}

fn derivative_bound() -> Outcome {
    let mut violations = 0;
    let mut checked = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut boxes: Vec<SBox> = reference_boxes(8).into_iter().map(|(_, s)| s).collect();
    boxes.extend((3..=8).map(|m| SBox::random_permutation(m, &mut rng)));
    for s in &boxes {
        let delta = s.differential_uniformity() as usize;
        for u in 1..s.size() as Word {
            checked += 1;
            if s.derivative_image(u).len() * delta < s.size() {
                violations += 1;
            }
        }
    }
    outcome(violations == 0, format!("{checked} (box, u) pairs over {} boxes, {violations} violations", boxes.len()))
}

fn translations(u: &Subspace) -> Vec<Permutation> {
    u.elements().into_iter().map(|v| Permutation::translation(v, u.ambient_dim())).collect()
}

fn full_translation_group() -> Outcome {
    let all = enumerate_all_partitions(3).unwrap();
    let t = translations(&Subspace::full(3));
    // σ_0 is the identity, so any B equals A
    let mapped: Vec<&Partition> = all.iter().filter(|a| maps_onto(&t, a, a)).collect();
    let other_b = all.iter().any(|a| {
        let b = a.map_with(|x| x ^ 1);
        b != *a && t.iter().all(|p| a.maps_onto_with(|x| p.apply(x), &b))
    });
    let mut linear: Vec<Partition> = enumerate_linear_partitions(3).unwrap().map(|l| l.expand()).collect();
    linear.sort();
    let mut got: Vec<Partition> = mapped.into_iter().cloned().collect();
    got.sort();
    outcome(
        got == linear && got.len() == 16 && !other_b && all.len() == 4140,
        format!("{} of {} partitions mapped, all linear, B = A", got.len(), all.len()),
    )
}

fn hyperplane_translations() -> Outcome {
    let all = enumerate_all_partitions(3).unwrap();
    let mut agree = 0;
    let mut total = 0;
    let mut mapped = 0;
    for u in enumerate_subspaces(3, Some(2)).unwrap() {
        let t = TranslationSubgroup::new(u.clone());
        let perms = translations(&u);
        for a in &all {
            total += 1;
            let brute = maps_onto(&perms, a, a);
            let verdict = classify_under_translations(&t, a).unwrap();
            let ok = match &verdict {
                Verdict::NotMapped => !brute,
                v => brute && v.structure().unwrap().expand() == *a,
            };
            mapped += usize::from(brute);
            agree += usize::from(ok);
        }
    }
    outcome(agree == total, format!("{agree}/{total} verdicts agree over 7 hyperplanes, {mapped} mapped"))
}

fn linear_images() -> Outcome {
    let n = 6;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let subspaces: Vec<Subspace> = enumerate_subspaces(n, None).unwrap().collect();
    let hyperplanes: Vec<Subspace> = enumerate_subspaces(n, Some(n - 1)).unwrap().collect();
    let inner: Vec<Vec<Subspace>> = hyperplanes
        .iter()
        .map(|u| enumerate_subspaces_of(u, None).unwrap().collect())
        .collect();
    let mut bad = 0;
    let mut checks = 0u64;
    for _ in 0..100 {
        let lam = LinearMap::random_invertible(n, &mut rng);
        let apply = |p: &Partition| p.map_with(|x| lam.apply(x));
        for w in &subspaces {
            let l = LinearPartition::new(w.clone());
            checks += 1;
            bad += usize::from(apply(&l.expand()) != l.map_linear(&lam).expand());
        }
        // blocks never straddle U and V \ U on either side, so the W₁ and W₂
        // slots are independent; each subspace of U is put through both slots
        for (u, subs) in hyperplanes.iter().zip(&inner) {
            let k = subs.len();
            for (i, w) in subs.iter().enumerate() {
                let partner = &subs[(i * 7 + 3) % k];
                for (w1, w2) in [(w, partner), (partner, w)] {
                    let la = LinearAffinePartition::new(u.clone(), w1.clone(), w2.clone()).unwrap();
                    checks += 1;
                    bad += usize::from(apply(&la.expand()) != la.map_linear(&lam).expand());
                }
            }
        }
    }
    outcome(bad == 0, format!("{checks} mapped partitions over 100 maps, {bad} mismatches"))
}

fn derivative_hulls() -> Outcome {
    let mut bad = 0;
    let mut checked = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut boxes: Vec<SBox> = reference_boxes(6).into_iter().map(|(_, s)| s).collect();
    boxes.extend((3..=6).map(|m| SBox::random_permutation(m, &mut rng)));
    for s in &boxes {
        let m = s.m();
        for a in 1..s.size() as Word {
            let d = s.derivative(a);
            let va: Vec<Word> = (0..s.size() as Word)
                .filter(|&v| d.iter().all(|&y| dot(y, v) == dot(d[0], v)))
                .collect();
            let va = Subspace::span(va, m).unwrap();
            let perp = va.orthogonal_complement();
            let img = s.derivative_image(a);
            let hull = Subspace::span(img.iter().map(|&y| y ^ img[0]), m).unwrap();
            let same = hull == perp && perp.contains(s.apply(a) ^ s.apply(0) ^ img[0]);
            let lib = s.affine_hull_of_derivative_image(a).unwrap();
            checked += 1;
            bad += usize::from(!same || lib.direction != perp);
        }
    }
    outcome(bad == 0, format!("{checked} directions over {} boxes, {bad} mismatches", boxes.len()))
}

fn inversion_lemmas() -> Outcome {
    let gamma = ParallelMap::uniform(&SBox::inversion(&GfContext::default_for(4).unwrap()), 2).unwrap();
    let layout = BlockLayout::new(2, 4).unwrap();
    let mut notes = Vec::new();
    let mut pass = true;
    for l in [LemmaId::Lm11, LemmaId::Lm22, LemmaId::Lm33] {
        let rep = validate_lemma(&gamma, l, &LemmaParams::default()).unwrap();
        let walls_only = rep.hits.iter().all(|h| match &h.source {
            partrap::trapdoor::Shape::Linear { w } => layout.is_wall(w).is_some(),
            _ => false,
        });
        pass &= rep.holds && walls_only && !rep.hits.is_empty();
        notes.push(format!("{}: {} scanned, {} hits, {} non-wall", l.name(), rep.scanned, rep.hits.len(), rep.violations));
    }
    outcome(pass, notes.join("; "))
}

fn compliant_end_to_end() -> Outcome {
    let c = compliant8(0);
    let hyp = theorem_hypotheses_report(&c);
    let j_ok = hyp.j_conditions.iter().any(|j| j.disjoint);
    let rep = validate_theorem(&c, TheoremId::Mainme, &TheoremOptions::default()).unwrap();
    outcome(
        rep.pass && j_ok && rep.witness.is_none() && rep.primitivity == Some(Primitivity::Primitive),
        format!(
            "no witness over the affine family; primitive with {} generators",
            rep.generators
        ),
    )
}

fn negative_controls() -> Outcome {
    let c = trapdoored6(1);
    let w = search_trapdoor(&c, &SearchScope::linear()).unwrap().unwrap();
    let keys = c.schedule().enumerate().unwrap();
    let reverified = keys.iter().all(|k| {
        let t = c.materialize(k).unwrap();
        w.a.maps_onto_with(|x| t.apply(x), &w.b)
    });
    let linear = w.chain.iter().all(|e| e.shape.is_linear());
    let wp = wall_preserving(2);
    let gens = wp.schedule().sample(0, 64).iter().map(|k| wp.materialize(k).unwrap()).collect();
    let v1 = LinearPartition::new(BlockLayout::new(2, 3).unwrap().sum_of_blocks(1)).expand();
    let blocks_ok = match PermSet::new(6, gens).unwrap().is_primitive() {
        Primitivity::Imprimitive { blocks, .. } => blocks == v1,
        _ => false,
    };
    outcome(
        linear && reverified && w.a != w.b && blocks_ok,
        format!(
            "trapdoor re-verified on all {} key tuples, chain of {} linear partitions; wall-preserving blocks = L(V₁)",
            keys.len(),
            w.chain.len()
        ),
    )
}

fn ablations() -> Outcome {
    let mut pass = search_trapdoor(&compliant8(0), &SearchScope::affine()).unwrap().is_none();
    let mut notes = Vec::new();
    for which in Ablation::ALL {
        let first = search_trapdoor(&ablated8(0, which), &SearchScope::affine()).unwrap();
        let again = search_trapdoor(&ablated8(0, which), &SearchScope::affine()).unwrap();
        pass &= first.is_some() && first == again;
        notes.push(format!("{}: {}", which.name(), if first.is_some() { "witness" } else { "none" }));
    }
    outcome(pass, format!("{}; compliant: none", notes.join(", ")))
}

fn main() {
    let checks: [(&str, fn() -> Outcome); 10] = [
        ("inversion uniformity and linear structures", inversion_golden),
        ("derivative image size bound", derivative_bound),
        ("translation group on all partitions of 8 points", full_translation_group),
        ("hyperplane translations against the classifier", hyperplane_translations),
        ("linear and linear-affine images under linear maps", linear_images),
        ("affine hulls of derivative images", derivative_hulls),
        ("parallel inversion lemma scans at n = 8", inversion_lemmas),
        ("compliant cipher: no trapdoor, primitive group", compliant_end_to_end),
        ("trapdoored and wall-preserving controls", negative_controls),
        ("ablation fixtures", ablations),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in checks.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let status = if o.pass { "PASS" } else { "FAIL" };
        println!("{status} {:>2} {name}: {} [{:.1?}]", i + 1, o.detail, start.elapsed());
        if !o.pass {
            failed.push(i + 1);
        }
    }
    // check 1 fails only on n̂ at m = 3, whose computed value is asserted inside
    if failed != [1] {
        eprintln!("unexpected failures: {failed:?}");
        std::process::exit(1);
    }
}
