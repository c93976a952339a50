use std::collections::{HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::f2lin::{check_dim, mask, Subspace, Word};

/// Largest key-schedule image that is ever enumerated.
pub const MAX_IMAGE: u128 = 1 << 24;

/// `Φ′ : (F₂)³ × V → V^{ℓ−3}` as a lookup table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiPrime {
    width: usize,
    table: Vec<Word>,
}

impl PhiPrime {
    /// `table[(abc | k₄ << 3) · width + j]` is output coordinate `j`.
    pub fn new(n: usize, width: usize, table: Vec<Word>) -> Result<Self> {
        if table.len() != (8usize << n) * width {
            return Err(Error::DimensionMismatch {
                expected: (8usize << n) * width,
                got: table.len(),
            });
        }
        if table.iter().any(|&w| w > mask(n)) {
            return Err(Error::out_of_range("Φ′ output outside V"));
        }
        Ok(PhiPrime { width, table })
    }

    /// Uniformly random table from a seed.
    pub fn seeded(n: usize, width: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let table = (0..(8usize << n) * width)
            .map(|_| rng.gen::<Word>() & mask(n))
            .collect();
        PhiPrime { width, table }
    }

    fn eval(&self, abc: usize, k4: Word) -> &[Word] {
        let at = ((abc | (k4 as usize) << 3)) * self.width;
        &self.table[at..at + self.width]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScheduleVariant {
    /// The image listed tuple by tuple.
    Explicit(Vec<Vec<Word>>),
    /// `Im Φ = V^ℓ`.
    Independent,
    /// Round keys `i−1, i, i+1` free in `V`, the rest fixed.
    ThreeIndependent { i: usize, fixed_keys: Vec<Word> },
    /// Round keys `i−1, i, i+1` free in `U₁ × U₂ × U₃`, the rest fixed.
    AlmostIndependent {
        i: usize,
        u: [Subspace; 3],
        fixed_keys: Vec<Word>,
    },
    /// `Φ(k₁,k₂,k₃,k₄) = (k₁, k₂, k₃, Φ′(f₁(k₁), f₂(k₂), f₃(k₃), k₄))`.
    ExampleLinear { f: [Word; 3], phi_prime: PhiPrime },
    /// `Im Φ = ∏ (c_h + D_h)`.
    Product(Vec<(Word, Subspace)>),
}

/// An affine product `∏ (c_h + D_h)` contained in `Im Φ`.
///
/// `exact` is set when it equals `Im Φ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KeyBox {
    pub offsets: Vec<Word>,
    pub dirs: Vec<Subspace>,
    pub exact: bool,
}

impl KeyBox {
    pub fn rounds(&self) -> usize {
        self.offsets.len()
    }
}

/// A round `i` and `U₁, U₂, U₃` for which the schedule is 3-round
/// almost-independent, with one admissible completion.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IndependenceWitness {
    pub i: usize,
    pub u: [Subspace; 3],
    /// Full tuple; the three free positions hold 0.
    pub fixed_keys: Vec<Word>,
}

/// `Φ : K → V^ℓ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeySchedule {
    n: usize,
    rounds: usize,
    variant: ScheduleVariant,
}

impl KeySchedule {
    pub fn new(n: usize, rounds: usize, variant: ScheduleVariant) -> Result<Self> {
        check_dim(n)?;
        if rounds == 0 {
            return Err(Error::Config("a cipher needs at least one round".into()));
        }
        let in_v = |w: Word| w <= mask(n);
        let free = |i: usize| {
            if i < 2 || i + 1 > rounds {
                Err(Error::out_of_range(format!("round i = {i} must lie in 2..={}", rounds.saturating_sub(1))))
            } else {
                Ok(())
            }
        };
        let length = |k: &[Word]| {
            if k.len() != rounds {
                Err(Error::DimensionMismatch {
                    expected: rounds,
                    got: k.len(),
                })
            } else if !k.iter().all(|&w| in_v(w)) {
                Err(Error::out_of_range("round key outside V"))
            } else {
                Ok(())
            }
        };
        match &variant {
            ScheduleVariant::Explicit(tuples) => {
                if tuples.is_empty() {
                    return Err(Error::Config("explicit key schedule is empty".into()));
                }
                tuples.iter().try_for_each(|t| length(t))?;
            }
            ScheduleVariant::Independent => {}
            ScheduleVariant::ThreeIndependent { i, fixed_keys } => {
                free(*i)?;
                length(fixed_keys)?;
            }
            ScheduleVariant::AlmostIndependent { i, u, fixed_keys } => {
                free(*i)?;
                length(fixed_keys)?;
                for s in u {
                    check_space(s, n)?;
                }
            }
            ScheduleVariant::ExampleLinear { f, phi_prime } => {
                if rounds < 3 {
                    return Err(Error::Config("the example schedule needs ℓ ≥ 3".into()));
                }
                if !f.iter().all(|&w| in_v(w)) {
                    return Err(Error::out_of_range("functional outside V"));
                }
                if phi_prime.width != rounds - 3 || phi_prime.table.len() != (8usize << n) * (rounds - 3) {
                    return Err(Error::Config(format!(
                        "Φ′ must produce {} round keys over n = {n}",
                        rounds - 3
                    )));
                }
            }
            ScheduleVariant::Product(pos) => {
                if pos.len() != rounds {
                    return Err(Error::DimensionMismatch {
                        expected: rounds,
                        got: pos.len(),
                    });
                }
                for (c, d) in pos {
                    if !in_v(*c) || d.ambient_dim() != n {
                        return Err(Error::out_of_range("product position outside V"));
                    }
                }
            }
        }
        Ok(KeySchedule { n, rounds, variant })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `ℓ`.
    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn variant(&self) -> &ScheduleVariant {
        &self.variant
    }

    pub fn variant_name(&self) -> &'static str {
        match self.variant {
            ScheduleVariant::Explicit(_) => "explicit",
            ScheduleVariant::Independent => "independent",
            ScheduleVariant::ThreeIndependent { .. } => "three_independent",
            ScheduleVariant::AlmostIndependent { .. } => "almost_independent",
            ScheduleVariant::ExampleLinear { .. } => "example_linear",
            ScheduleVariant::Product(_) => "product",
        }
    }

    /// Size of the master key set `K`.
    pub fn key_count(&self) -> u128 {
        let n = self.n as u32;
        match &self.variant {
            ScheduleVariant::Explicit(t) => t.len() as u128,
            ScheduleVariant::Independent => 1u128 << (n * self.rounds as u32).min(127),
            ScheduleVariant::ThreeIndependent { .. } => 1 << (3 * n),
            ScheduleVariant::AlmostIndependent { u, .. } => {
                1 << u.iter().map(|s| s.dim() as u32).sum::<u32>()
            }
            ScheduleVariant::ExampleLinear { .. } => 1 << (4 * n),
            ScheduleVariant::Product(pos) => {
                1 << pos.iter().map(|(_, d)| d.dim() as u32).sum::<u32>().min(127)
            }
        }
    }

    /// Round keys of master key number `idx < key_count()`.
    pub fn key(&self, idx: u128) -> Vec<Word> {
        let n = self.n;
        let take = |idx: &mut u128, bits: usize| {
            let v = (*idx & ((1u128 << bits) - 1)) as usize;
            *idx >>= bits;
            v
        };
        let mut idx = idx;
        match &self.variant {
            ScheduleVariant::Explicit(t) => t[idx as usize].clone(),
            ScheduleVariant::Independent => (0..self.rounds).map(|_| take(&mut idx, n) as Word).collect(),
            ScheduleVariant::ThreeIndependent { i, fixed_keys } => {
                let mut k = fixed_keys.clone();
                for slot in &mut k[i - 2..=*i] {
                    *slot = take(&mut idx, n) as Word;
                }
                k
            }
            ScheduleVariant::AlmostIndependent { i, u, fixed_keys } => {
                let mut k = fixed_keys.clone();
                for (slot, s) in k[i - 2..=*i].iter_mut().zip(u) {
                    *slot = s.element(take(&mut idx, s.dim()));
                }
                k
            }
            ScheduleVariant::ExampleLinear { f, phi_prime } => {
                let k: Vec<Word> = (0..4).map(|_| take(&mut idx, n) as Word).collect();
                let mut out = k[..3].to_vec();
                out.extend_from_slice(phi_prime.eval(example_abc(f, &k[..3]), k[3]));
                out
            }
            ScheduleVariant::Product(pos) => pos
                .iter()
                .map(|(c, d)| c ^ d.element(take(&mut idx, d.dim())))
                .collect(),
        }
    }

    /// All of `Φ(K)` in master-key order (with repetitions if `Φ` is not injective).
    pub fn enumerate(&self) -> Result<Vec<Vec<Word>>> {
        let count = self.key_count();
        if count > MAX_IMAGE {
            return Err(Error::TooLarge {
                what: "key schedule image",
                value: usize::try_from(count).unwrap_or(usize::MAX),
                limit: MAX_IMAGE as usize,
            });
        }
        Ok((0..count).map(|k| self.key(k)).collect())
    }

    /// `count` master keys drawn uniformly from a seed.
    pub fn sample(&self, seed: u64, count: usize) -> Vec<Vec<Word>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let total = self.key_count();
        (0..count).map(|_| self.key(rng.gen_range(0..total))).collect()
    }

    /// The whole image when it has at most `limit` tuples, else a seeded sample.
    pub fn keys_for_checks(&self, limit: u128, seed: u64, samples: usize) -> (Vec<Vec<Word>>, bool) {
        if self.key_count() <= limit {
            (self.enumerate().expect("within cap"), true)
        } else {
            (self.sample(seed, samples), false)
        }
    }

    /// Definition of 3-round independence at `i`.
    pub fn is_3round_independent(&self, i: usize) -> Result<bool> {
        let full = Subspace::full(self.n);
        self.is_3round_almost_independent(i, [&full, &full, &full])
    }

    /// Definition of 3-round almost-independence at `i` w.r.t. `U₁, U₂, U₃`.
    pub fn is_3round_almost_independent(&self, i: usize, u: [&Subspace; 3]) -> Result<bool> {
        Ok(self.almost_independence_witness(i, u)?.is_some())
    }

    /// A completion witnessing almost-independence at `i`, if one exists.
    pub fn almost_independence_witness(
        &self,
        i: usize,
        u: [&Subspace; 3],
    ) -> Result<Option<Vec<Word>>> {
        if i < 2 || i + 1 > self.rounds {
            return Err(Error::out_of_range(format!(
                "round i = {i} must lie in 2..={}",
                self.rounds.saturating_sub(1)
            )));
        }
        for s in u {
            check_space(s, self.n)?;
        }
        let lo = i - 2;
        let with_gap = |mut k: Vec<Word>| {
            k[lo..=i].iter_mut().for_each(|x| *x = 0);
            k
        };
        match &self.variant {
            ScheduleVariant::ExampleLinear { f, phi_prime } if i == 2 => {
                // a fixed k₄ must make Φ′ constant over the attainable functional values
                let reach: Vec<Vec<usize>> = f
                    .iter()
                    .zip(u)
                    .map(|(&fj, uj)| {
                        let ones = uj.basis().iter().any(|&v| crate::f2lin::dot(fj, v));
                        if ones { vec![0, 1] } else { vec![0] }
                    })
                    .collect();
                for k4 in 0..=mask(self.n) {
                    let base = phi_prime.eval(0, k4);
                    let constant = reach[0].iter().all(|&a| {
                        reach[1].iter().all(|&b| {
                            reach[2]
                                .iter()
                                .all(|&c| phi_prime.eval(a | b << 1 | c << 2, k4) == base)
                        })
                    });
                    if constant {
                        let mut k = vec![0; 3];
                        k.extend_from_slice(base);
                        return Ok(Some(k));
                    }
                }
                Ok(None)
            }
            ScheduleVariant::Explicit(_) | ScheduleVariant::ExampleLinear { .. } => {
                self.grouped_witness(i, u)
            }
            _ => {
                let bx = self.key_box();
                let ok = (lo..=i).zip(u).all(|(h, uh)| {
                    bx.dirs[h].contains(bx.offsets[h]) && uh.is_subspace_of(&bx.dirs[h])
                });
                Ok(ok.then(|| with_gap(bx.offsets.clone())))
            }
        }
    }

    /// Groups the enumerated image by the coordinates outside `i−1, i, i+1`.
    fn grouped_witness(&self, i: usize, u: [&Subspace; 3]) -> Result<Option<Vec<Word>>> {
        let lo = i - 2;
        let needed = u.iter().map(|s| s.size()).product::<usize>();
        let mut groups: HashMap<Vec<Word>, HashSet<[Word; 3]>> = HashMap::new();
        let mut order = Vec::new();
        for k in self.enumerate()? {
            let t = [k[lo], k[lo + 1], k[lo + 2]];
            if !(u[0].contains(t[0]) && u[1].contains(t[1]) && u[2].contains(t[2])) {
                continue;
            }
            let mut rest = k;
            rest[lo..=i].iter_mut().for_each(|x| *x = 0);
            let entry = groups.entry(rest.clone()).or_insert_with(|| {
                order.push(rest);
                HashSet::new()
            });
            entry.insert(t);
        }
        Ok(order.into_iter().find(|r| groups[r].len() == needed))
    }

    /// An affine product inside `Im Φ`, used to anchor trapdoor searches.
    pub fn key_box(&self) -> KeyBox {
        let n = self.n;
        let l = self.rounds;
        let zero = Subspace::zero(n);
        match &self.variant {
            ScheduleVariant::Independent => KeyBox {
                offsets: vec![0; l],
                dirs: vec![Subspace::full(n); l],
                exact: true,
            },
            ScheduleVariant::ThreeIndependent { i, fixed_keys } => {
                let mut offsets = fixed_keys.clone();
                let mut dirs = vec![zero; l];
                for h in i - 2..=*i {
                    offsets[h] = 0;
                    dirs[h] = Subspace::full(n);
                }
                KeyBox {
                    offsets,
                    dirs,
                    exact: true,
                }
            }
            ScheduleVariant::AlmostIndependent { i, u, fixed_keys } => {
                let mut offsets = fixed_keys.clone();
                let mut dirs = vec![zero; l];
                for (h, s) in (i - 2..=*i).zip(u) {
                    offsets[h] = 0;
                    dirs[h] = s.clone();
                }
                KeyBox {
                    offsets,
                    dirs,
                    exact: true,
                }
            }
            ScheduleVariant::Product(pos) => KeyBox {
                offsets: pos.iter().map(|(c, d)| d.reduce(*c)).collect(),
                dirs: pos.iter().map(|(_, d)| d.clone()).collect(),
                exact: true,
            },
            ScheduleVariant::Explicit(t) => {
                let found = self.independence_witnesses().into_iter().next();
                match found {
                    Some(w) => {
                        let mut dirs = vec![zero; l];
                        for (h, s) in (w.i - 2..=w.i).zip(w.u) {
                            dirs[h] = s;
                        }
                        let exact = t.len() as u128 == dirs.iter().map(|d| d.size() as u128).product::<u128>();
                        KeyBox {
                            offsets: w.fixed_keys,
                            dirs,
                            exact,
                        }
                    }
                    None => KeyBox {
                        offsets: t[0].clone(),
                        dirs: vec![zero; l],
                        exact: t.iter().all(|k| *k == t[0]),
                    },
                }
            }
            ScheduleVariant::ExampleLinear { f, .. } => {
                let u = f.map(|fj| kernel_or_full(fj, n));
                let witness = self
                    .almost_independence_witness(2, [&u[0], &u[1], &u[2]])
                    .expect("valid round");
                let mut dirs = vec![zero; l];
                let offsets = match witness {
                    Some(k) => {
                        for (h, s) in u.into_iter().enumerate() {
                            dirs[h] = s;
                        }
                        k
                    }
                    None => self.key(0),
                };
                KeyBox {
                    offsets,
                    dirs,
                    exact: false,
                }
            }
        }
    }

    /// Rounds and spaces at which the schedule is 3-round almost-independent.
    ///
    /// Box-shaped variants report their own directions; the example schedule
    /// reports `ker f_j` at round 2; explicit images are searched for full
    /// triples and, when `n ≤ 4`, for hyperplane triples.
    pub fn independence_witnesses(&self) -> Vec<IndependenceWitness> {
        let n = self.n;
        let mut out = Vec::new();
        if self.rounds < 3 {
            return out;
        }
        match &self.variant {
            ScheduleVariant::Explicit(_) => {
                let mut spaces: Vec<Subspace> = vec![Subspace::full(n)];
                if n <= 4 {
                    spaces.extend((1..=mask(n)).map(|c| Subspace::kernel_of(c, n).unwrap()));
                }
                for i in 2..self.rounds {
                    'search: for a in &spaces {
                        for b in &spaces {
                            for c in &spaces {
                                if let Ok(Some(k)) = self.almost_independence_witness(i, [a, b, c]) {
                                    out.push(IndependenceWitness {
                                        i,
                                        u: [a.clone(), b.clone(), c.clone()],
                                        fixed_keys: k,
                                    });
                                    break 'search;
                                }
                            }
                        }
                    }
                }
            }
            ScheduleVariant::ExampleLinear { f, .. } => {
                let u = f.map(|fj| kernel_or_full(fj, n));
                if let Ok(Some(k)) = self.almost_independence_witness(2, [&u[0], &u[1], &u[2]]) {
                    out.push(IndependenceWitness {
                        i: 2,
                        u,
                        fixed_keys: k,
                    });
                }
            }
            _ => {
                let bx = self.key_box();
                for i in 2..self.rounds {
                    let three = &bx.dirs[i - 2..=i];
                    if three.iter().all(|d| d.dim() + 1 >= n) {
                        let u = [three[0].clone(), three[1].clone(), three[2].clone()];
                        if let Ok(Some(k)) = self.almost_independence_witness(i, [&u[0], &u[1], &u[2]]) {
                            out.push(IndependenceWitness { i, u, fixed_keys: k });
                        }
                    }
                }
            }
        }
        out
    }
}

fn example_abc(f: &[Word; 3], k: &[Word]) -> usize {
    (0..3)
        .map(|j| (crate::f2lin::dot(f[j], k[j]) as usize) << j)
        .sum()
}

/// `ker f`, or `V` when `f = 0`.
fn kernel_or_full(f: Word, n: usize) -> Subspace {
    if f == 0 {
        Subspace::full(n)
    } else {
        Subspace::kernel_of(f, n).expect("nonzero functional")
    }
}

fn check_space(s: &Subspace, n: usize) -> Result<()> {
    if s.ambient_dim() != n || s.dim() + 1 < n {
        return Err(Error::precondition(format!(
            "key subgroups need dimension ≥ n − 1 = {} (got {})",
            n.saturating_sub(1),
            s.dim()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_tuples(n: usize, l: usize) -> Vec<Vec<Word>> {
        let ks = KeySchedule::new(n, l, ScheduleVariant::Independent).unwrap();
        ks.enumerate().unwrap()
    }

    #[test]
    fn full_image_is_independent_everywhere() {
        let ks = KeySchedule::new(2, 4, ScheduleVariant::Explicit(all_tuples(2, 4))).unwrap();
        for i in 2..=3 {
            assert!(ks.is_3round_independent(i).unwrap());
        }
        assert!(ks.is_3round_independent(1).is_err());
        assert!(ks.is_3round_independent(4).is_err());
        let bx = ks.key_box();
        assert!(!bx.exact);
        assert!(bx.dirs[..3].iter().all(Subspace::is_full) && bx.dirs[3].is_zero());
    }

    #[test]
    fn repeated_master_key_is_not() {
        let t = (0..8).map(|k| vec![k; 4]).collect();
        let ks = KeySchedule::new(3, 4, ScheduleVariant::Explicit(t)).unwrap();
        assert!(!ks.is_3round_independent(2).unwrap());
        assert!(!ks.is_3round_independent(3).unwrap());
        assert!(ks.independence_witnesses().is_empty());
    }

    #[test]
    fn three_independent_only_at_its_round() {
        let n = 2;
        for i in 2..=4 {
            let ks = KeySchedule::new(
                n,
                5,
                ScheduleVariant::ThreeIndependent {
                    i,
                    fixed_keys: vec![1, 2, 3, 1, 2],
                },
            )
            .unwrap();
            let ex = KeySchedule::new(n, 5, ScheduleVariant::Explicit(ks.enumerate().unwrap())).unwrap();
            for j in 2..=4 {
                assert_eq!(ks.is_3round_independent(j).unwrap(), i == j);
                assert_eq!(ex.is_3round_independent(j).unwrap(), i == j);
            }
        }
    }

    #[test]
    fn structural_and_grouping_agree() {
        let n = 2;
        let hyper: Vec<Subspace> = (0..4)
            .map(|c| if c == 0 { Subspace::full(n) } else { Subspace::kernel_of(c, n).unwrap() })
            .collect();
        let schedules = [
            ScheduleVariant::AlmostIndependent {
                i: 2,
                u: [hyper[1].clone(), hyper[2].clone(), hyper[0].clone()],
                fixed_keys: vec![0, 0, 0, 3],
            },
            ScheduleVariant::Product(vec![
                (1, hyper[3].clone()),
                (0, hyper[0].clone()),
                (2, hyper[2].clone()),
                (1, Subspace::zero(n)),
            ]),
            ScheduleVariant::Independent,
        ];
        for v in schedules {
            let ks = KeySchedule::new(n, 4, v).unwrap();
            let ex = KeySchedule::new(n, 4, ScheduleVariant::Explicit(ks.enumerate().unwrap())).unwrap();
            for i in 2..=3 {
                for a in &hyper {
                    for b in &hyper {
                        for c in &hyper {
                            let s = ks.is_3round_almost_independent(i, [a, b, c]).unwrap();
                            let e = ex.is_3round_almost_independent(i, [a, b, c]).unwrap();
                            assert_eq!(s, e, "{:?} at {i}", ks.variant_name());
                            if ks.is_3round_independent(i).unwrap() {
                                assert!(s);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn missing_tuple_breaks_almost_independence() {
        let n = 2;
        let u = Subspace::kernel_of(1, n).unwrap();
        // two fixed-part classes, each missing a different triple of U³
        let mut t = Vec::new();
        for last in [0, 3] {
            for (idx, a) in u.elements().into_iter().enumerate() {
                for b in u.elements() {
                    for c in u.elements() {
                        if (idx, b, c, last) == (1, 0, 0, 0) || (idx, b, c, last) == (0, 2, 2, 3) {
                            continue;
                        }
                        t.push(vec![a, b, c, last]);
                    }
                }
            }
        }
        let ks = KeySchedule::new(n, 4, ScheduleVariant::Explicit(t.clone())).unwrap();
        assert!(!ks.is_3round_almost_independent(2, [&u, &u, &u]).unwrap());
        t.push(vec![u.element(1), 0, 0, 0]);
        let ks = KeySchedule::new(n, 4, ScheduleVariant::Explicit(t)).unwrap();
        assert_eq!(
            ks.almost_independence_witness(2, [&u, &u, &u]).unwrap(),
            Some(vec![0, 0, 0, 0])
        );
    }

    #[test]
    fn example_schedule_is_almost_independent_on_kernels() {
        let n = 4;
        let f = [0b0001, 0b0110, 0b1111];
        let ks = KeySchedule::new(
            n,
            5,
            ScheduleVariant::ExampleLinear {
                f,
                phi_prime: PhiPrime::seeded(n, 2, 11),
            },
        )
        .unwrap();
        let u = f.map(|c| Subspace::kernel_of(c, n).unwrap());
        assert!(ks.is_3round_almost_independent(2, [&u[0], &u[1], &u[2]]).unwrap());
        // a random Φ′ is not constant over all functional values
        assert!(!ks.is_3round_independent(2).unwrap());
        let w = ks.independence_witnesses();
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].u, u);
        // the box is inside the image
        let bx = ks.key_box();
        let image: HashSet<Vec<Word>> = ks.enumerate().unwrap().into_iter().collect();
        for a in u[0].elements().into_iter().take(3) {
            for c in u[2].elements().into_iter().take(3) {
                let mut k = bx.offsets.clone();
                k[0] = a;
                k[2] = c;
                assert!(image.contains(&k));
            }
        }
    }

    #[test]
    fn keys_and_sampling_are_deterministic() {
        let ks = KeySchedule::new(4, 3, ScheduleVariant::Independent).unwrap();
        assert_eq!(ks.key_count(), 1 << 12);
        assert_eq!(ks.key(0x321), vec![1, 2, 3]);
        assert_eq!(ks.sample(5, 10), ks.sample(5, 10));
        let (all, exhaustive) = ks.keys_for_checks(1 << 20, 0, 16);
        assert!(exhaustive && all.len() == 4096);
        assert!(KeySchedule::new(4, 3, ScheduleVariant::Explicit(vec![vec![1, 2]])).is_err());
    }
}
