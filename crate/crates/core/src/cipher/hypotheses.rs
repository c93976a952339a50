use std::collections::HashMap;

use serde::Serialize;

use super::mixing::{is_proper, is_strongly_proper, WallCheck};
use super::schedule::IndependenceWitness;
use super::TbCipher;
use crate::f2lin::{BlockLayout, LinearMap, Subspace, Word};
use crate::sbox::{ParallelMap, SBox};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum TheoremId {
    #[serde(rename = "th-francesi")]
    Francesi,
    #[serde(rename = "th-main")]
    Main,
    #[serde(rename = "th-gam")]
    Gam,
    #[serde(rename = "th-mainme")]
    Mainme,
    #[serde(rename = "cor-nonlimit")]
    Nonlimit,
}

impl TheoremId {
    pub const ALL: [TheoremId; 5] = [
        TheoremId::Francesi,
        TheoremId::Main,
        TheoremId::Gam,
        TheoremId::Mainme,
        TheoremId::Nonlimit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TheoremId::Francesi => "th-francesi",
            TheoremId::Main => "th-main",
            TheoremId::Gam => "th-gam",
            TheoremId::Mainme => "th-mainme",
            TheoremId::Nonlimit => "cor-nonlimit",
        }
    }
}

impl std::str::FromStr for TheoremId {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        let key = s.trim_start_matches("th-").trim_start_matches("cor-");
        Ok(match key {
            "francesi" => TheoremId::Francesi,
            "main" => TheoremId::Main,
            "gam" => TheoremId::Gam,
            "mainme" => TheoremId::Mainme,
            "nonlimit" => TheoremId::Nonlimit,
            _ => return Err(crate::Error::Config(format!("unknown theorem {s:?}"))),
        })
    }
}

/// S-box properties of one parallel layer, worst case over its boxes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SboxConditions {
    pub m: usize,
    pub delta: u32,
    /// Least `r` with `δ ≤ 2^r`.
    pub r: usize,
    pub n_hat: usize,
    pub uniform_r_below_m: bool,
    pub uniform_r_below_m_minus_1: bool,
    /// Strong `(r−1)`-anti-invariance of every box.
    pub strongly_r_minus_1_anti_invariant: bool,
    /// Strong `r`-anti-invariance of every box (`false` when `r ≥ m`).
    pub strongly_r_anti_invariant: bool,
    pub four_uniform: bool,
    pub n_hat_zero: bool,
    /// Conditions 1) and 2) with `r < m` and strong `(r−1)`-anti-invariance.
    pub classic: bool,
    /// `r < m−1` with strong `r`-anti-invariance, or 4-uniform with `n̂ = 0` and `m ≥ 4`.
    pub almost_independent_ready: bool,
}

impl SboxConditions {
    pub fn of(gamma: &ParallelMap) -> SboxConditions {
        conditions(gamma, &mut Cache::default())
    }
}

/// Per-table results shared between rounds.
#[derive(Default)]
struct Cache {
    basic: HashMap<Vec<Word>, (u32, usize)>,
    sai: HashMap<(Vec<Word>, usize), bool>,
}

impl Cache {
    fn basic(&mut self, s: &SBox) -> (u32, usize) {
        *self
            .basic
            .entry(s.table().to_vec())
            .or_insert_with(|| (s.differential_uniformity(), s.n_hat()))
    }

    fn sai(&mut self, s: &SBox, r: usize) -> bool {
        *self
            .sai
            .entry((s.table().to_vec(), r))
            .or_insert_with(|| s.strong_anti_invariance(r).map(|a| a.holds).unwrap_or(false))
    }
}

fn ceil_log2(d: u32) -> usize {
    (32 - d.saturating_sub(1).leading_zeros()) as usize
}

fn conditions(gamma: &ParallelMap, cache: &mut Cache) -> SboxConditions {
    let m = gamma.layout().m();
    let basics: Vec<(u32, usize)> = gamma.boxes().iter().map(|s| cache.basic(s)).collect();
    let delta = basics.iter().map(|b| b.0).max().unwrap_or(0);
    let n_hat = basics.iter().map(|b| b.1).max().unwrap_or(0);
    let r = ceil_log2(delta);
    let mut sai_at = |rr: Option<usize>| match rr.filter(|&rr| rr < m) {
        Some(rr) => gamma.boxes().iter().all(|s| cache.sai(s, rr)),
        None => false,
    };
    let strongly_r_minus_1_anti_invariant = sai_at(r.checked_sub(1));
    let strongly_r_anti_invariant = sai_at(Some(r));
    let uniform_r_below_m = r < m;
    let uniform_r_below_m_minus_1 = r + 1 < m;
    let four_uniform = delta <= 4;
    let n_hat_zero = n_hat == 0;
    SboxConditions {
        m,
        delta,
        r,
        n_hat,
        uniform_r_below_m,
        uniform_r_below_m_minus_1,
        strongly_r_minus_1_anti_invariant,
        strongly_r_anti_invariant,
        four_uniform,
        n_hat_zero,
        classic: uniform_r_below_m && strongly_r_minus_1_anti_invariant,
        almost_independent_ready: (uniform_r_below_m_minus_1 && strongly_r_anti_invariant)
            || (four_uniform && n_hat_zero && m >= 4),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RoundReport {
    pub round: usize,
    pub sbox: SboxConditions,
    pub proper: WallCheck,
    pub strongly_proper: WallCheck,
}

/// `J_{U₂λ_i⁻¹} ∩ J_{U₁}` for one almost-independence witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JCondition {
    pub i: usize,
    pub j_u1: Vec<usize>,
    pub j_u2_pulled_back: Vec<usize>,
    pub disjoint: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TheoremCheck {
    pub theorem: TheoremId,
    pub applies: bool,
    /// Round `i` (or `h`) for which the listed failures were evaluated.
    pub round: Option<usize>,
    /// Whether the conclusion is about `Γ(C)` itself (rather than `Γ_ind`).
    pub concerns_gamma: bool,
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HypothesesReport {
    pub n: usize,
    pub b: usize,
    pub m: usize,
    pub rounds: usize,
    pub whitening: bool,
    pub schedule: &'static str,
    pub independent_schedule: bool,
    pub per_round: Vec<RoundReport>,
    pub three_round_independent: Vec<usize>,
    pub almost_independent: Vec<IndependenceWitness>,
    pub j_conditions: Vec<JCondition>,
    pub theorems: Vec<TheoremCheck>,
    /// First primitivity theorem for `Γ(C)` whose hypotheses all hold.
    pub verdict: Option<TheoremId>,
    pub notes: Vec<String>,
}

impl HypothesesReport {
    pub fn check(&self, id: TheoremId) -> &TheoremCheck {
        self.theorems.iter().find(|t| t.theorem == id).expect("all theorems reported")
    }
}

fn j_set(layout: &BlockLayout, u: &Subspace) -> Vec<usize> {
    layout.profile(u).expect("same ambient space").j_set
}

fn pull_back(lambda: &LinearMap, u: &Subspace) -> Subspace {
    lambda.inverse().expect("invertible").map_subspace(u)
}

pub fn theorem_hypotheses_report(c: &TbCipher) -> HypothesesReport {
    let layout = c.layout();
    let l = c.round_count();
    let ks = c.schedule();
    let mut cache = Cache::default();
    let per_round: Vec<RoundReport> = c
        .rounds()
        .iter()
        .enumerate()
        .map(|(h, r)| RoundReport {
            round: h + 1,
            sbox: conditions(&r.gamma, &mut cache),
            proper: is_proper(&r.lambda, &layout),
            strongly_proper: is_strongly_proper(&r.lambda, &layout),
        })
        .collect();
    let witnesses = ks.independence_witnesses();
    let three_round_independent: Vec<usize> = witnesses
        .iter()
        .filter(|w| w.u.iter().all(Subspace::is_full))
        .map(|w| w.i)
        .collect();
    let j_conditions: Vec<JCondition> = witnesses
        .iter()
        .map(|w| {
            let j_u1 = j_set(&layout, &w.u[0]);
            let j_u2_pulled_back = j_set(&layout, &pull_back(&c.round(w.i).lambda, &w.u[1]));
            let disjoint = j_u1.iter().all(|j| !j_u2_pulled_back.contains(j));
            JCondition {
                i: w.i,
                j_u1,
                j_u2_pulled_back,
                disjoint,
            }
        })
        .collect();
    let bx = ks.key_box();
    let independent_schedule = bx.exact && bx.dirs.iter().all(Subspace::is_full);

    let round_failures = |i: usize, classic: bool| -> Vec<String> {
        let mut f = Vec::new();
        for h in [i, i + 1] {
            let s = &per_round[h - 1].sbox;
            let ok = if classic { s.classic } else { s.almost_independent_ready };
            if !ok {
                f.push(format!(
                    "round {h}: S-box conditions fail (δ = {}, r = {}, n̂ = {})",
                    s.delta, s.r, s.n_hat
                ));
            }
        }
        let sp = &per_round[i - 1].strongly_proper;
        if let Some(w) = &sp.witness {
            f.push(format!(
                "round {i}: λ not strongly proper (wall {:#b} maps onto wall {:#b})",
                w.wall,
                w.image_wall.unwrap_or(0)
            ));
        }
        f
    };

    let mut theorems = Vec::new();
    // th-francesi: independent keys and a whitening round
    let mut f = Vec::new();
    if !independent_schedule {
        f.push("round keys are not independent".to_string());
    }
    if !c.has_whitening() {
        f.push("round 1 is not the identity".to_string());
    }
    theorems.push(TheoremCheck {
        theorem: TheoremId::Francesi,
        applies: f.is_empty(),
        round: None,
        concerns_gamma: independent_schedule,
        failures: f,
    });
    theorems.push(best(
        TheoremId::Main,
        independent_schedule,
        (1..l).map(|h| (h, round_failures(h, true))),
        "fewer than two rounds",
    ));
    theorems.push(best(
        TheoremId::Gam,
        true,
        three_round_independent
            .iter()
            .map(|&i| (i, round_failures(i, true))),
        "key schedule is not 3-round independent at any round",
    ));
    theorems.push(best(
        TheoremId::Mainme,
        true,
        witnesses.iter().zip(&j_conditions).map(|(w, j)| {
            let mut f = round_failures(w.i, false);
            if !j.disjoint {
                f.push(format!(
                    "round {}: J(U₂λ⁻¹) = {:?} meets J(U₁) = {:?}",
                    w.i, j.j_u2_pulled_back, j.j_u1
                ));
            }
            (w.i, f)
        }),
        "key schedule is not 3-round almost-independent at any round",
    ));
    theorems.push(best(
        TheoremId::Nonlimit,
        true,
        witnesses.iter().map(|w| {
            let mut f = round_failures(w.i, false);
            if !w.u.iter().any(Subspace::is_full) {
                f.push(format!("round {}: no key subgroup is all of T(V)", w.i));
            }
            (w.i, f)
        }),
        "key schedule is not 3-round almost-independent at any round",
    ));
    let verdict = [TheoremId::Gam, TheoremId::Mainme, TheoremId::Nonlimit, TheoremId::Main]
        .into_iter()
        .find(|&id| {
            let t = theorems.iter().find(|t| t.theorem == id).unwrap();
            t.applies && t.concerns_gamma
        });
    let notes = vec![
        "no J-set condition is imposed on U₃; the final step only needs the linear-to-linear-affine lemma".to_string(),
    ];
    HypothesesReport {
        n: layout.n(),
        b: layout.b(),
        m: layout.m(),
        rounds: l,
        whitening: c.has_whitening(),
        schedule: ks.variant_name(),
        independent_schedule,
        per_round,
        three_round_independent,
        almost_independent: witnesses,
        j_conditions,
        theorems,
        verdict,
        notes,
    }
}

/// The first candidate with no failures, else the one with the fewest.
fn best<I: Iterator<Item = (usize, Vec<String>)>>(
    theorem: TheoremId,
    concerns_gamma: bool,
    candidates: I,
    none: &str,
) -> TheoremCheck {
    let mut chosen: Option<(usize, Vec<String>)> = None;
    for (i, f) in candidates {
        let better = chosen.as_ref().map_or(true, |(_, g)| f.len() < g.len());
        if better {
            let done = f.is_empty();
            chosen = Some((i, f));
            if done {
                break;
            }
        }
    }
    match chosen {
        Some((i, failures)) => TheoremCheck {
            theorem,
            applies: failures.is_empty(),
            round: Some(i),
            concerns_gamma,
            failures,
        },
        None => TheoremCheck {
            theorem,
            applies: false,
            round: None,
            concerns_gamma,
            failures: vec![none.to_string()],
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::f2lin::GfContext;

    #[test]
    fn log2_rounding() {
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(4), 2);
        assert_eq!(ceil_log2(6), 3);
        assert_eq!(ceil_log2(16), 4);
    }

    #[test]
    fn inversion_layers() {
        let inv4 = SBox::inversion(&GfContext::default_for(4).unwrap());
        let c = SboxConditions::of(&ParallelMap::uniform(&inv4, 2).unwrap());
        assert_eq!((c.delta, c.r, c.n_hat), (4, 2, 0));
        assert!(c.uniform_r_below_m && c.uniform_r_below_m_minus_1);
        // the subfield F₄ is mapped onto itself
        assert!(!c.strongly_r_anti_invariant);
        assert!(c.almost_independent_ready);
        let inv3 = SBox::inversion(&GfContext::default_for(3).unwrap());
        let c = SboxConditions::of(&ParallelMap::uniform(&inv3, 2).unwrap());
        assert_eq!((c.delta, c.r), (2, 1));
        assert!(c.classic && c.strongly_r_anti_invariant && c.almost_independent_ready);
        let id = SboxConditions::of(&ParallelMap::uniform(&SBox::identity(4), 2).unwrap());
        assert!(!id.classic && !id.almost_independent_ready);
    }
}
