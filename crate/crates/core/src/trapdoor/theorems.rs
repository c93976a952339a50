use serde::Serialize;

use super::{search_trapdoor, SearchScope, TrapdoorWitness};
use crate::cipher::{theorem_hypotheses_report, TbCipher, TheoremCheck, TheoremId};
use crate::error::{Error, Result};
use crate::permgroup::{PermSet, Primitivity};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TheoremOptions {
    /// Run even when the hypotheses fail.
    pub force: bool,
    /// Encryption functions used as generators for the primitivity check.
    pub sample_keys: usize,
    pub seed: u64,
    /// Overrides the scope implied by the theorem.
    pub scope: Option<SearchScope>,
}

impl Default for TheoremOptions {
    fn default() -> Self {
        TheoremOptions {
            force: false,
            sample_keys: 64,
            seed: 0,
            scope: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TheoremReport {
    pub theorem: TheoremId,
    pub hypotheses: TheoremCheck,
    pub forced: bool,
    pub scope: SearchScope,
    pub witness: Option<TrapdoorWitness>,
    /// Not computed for the chain theorem, whose conclusion is about witnesses.
    pub primitivity: Option<Primitivity>,
    pub generators: usize,
    pub pass: bool,
}

fn default_scope(which: TheoremId) -> SearchScope {
    match which {
        TheoremId::Mainme | TheoremId::Nonlimit => SearchScope::affine(),
        _ => SearchScope::linear(),
    }
}

/// Checks a theorem's conclusion on `c`.
///
/// For the chain theorem a pass means any witness has an all-linear chain
/// ending at `B`. Otherwise it means no witness and a primitive group
/// generated by `sample_keys` encryption functions.
pub fn validate_theorem(c: &TbCipher, which: TheoremId, opts: &TheoremOptions) -> Result<TheoremReport> {
    let report = theorem_hypotheses_report(c);
    let hypotheses = report.check(which).clone();
    if !hypotheses.applies && !opts.force {
        return Err(Error::Hypotheses(format!(
            "{}: {}",
            which.name(),
            hypotheses.failures.join("; ")
        )));
    }
    let scope = opts.scope.clone().unwrap_or_else(|| default_scope(which));
    let witness = search_trapdoor(c, &scope)?;
    if which == TheoremId::Francesi {
        let pass = witness.as_ref().map_or(true, |w| {
            w.chain.iter().all(|e| e.shape.is_linear()) && w.chain.last().map(|e| &e.partition) == Some(&w.b)
        });
        return Ok(TheoremReport {
            theorem: which,
            hypotheses,
            forced: opts.force,
            scope,
            witness,
            primitivity: None,
            generators: 0,
            pass,
        });
    }
    let keys = c.schedule().sample(opts.seed, opts.sample_keys);
    let gens = keys.iter().map(|k| c.materialize(k)).collect::<Result<Vec<_>>>()?;
    let generators = gens.len();
    let primitivity = PermSet::new(c.n(), gens)?.is_primitive();
    let pass = witness.is_none() && primitivity == Primitivity::Primitive;
    Ok(TheoremReport {
        theorem: which,
        hypotheses,
        forced: opts.force,
        scope,
        witness,
        primitivity: Some(primitivity),
        generators,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cipher::{KeySchedule, Round};
    use crate::f2lin::LinearMap;
    use crate::trapdoor::{trapdoored6, compliant8};

    #[test]
    fn compliant_cipher_passes() {
        let c = compliant8(0);
        let rep = validate_theorem(&c, TheoremId::Mainme, &TheoremOptions::default()).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert_eq!(rep.primitivity, Some(Primitivity::Primitive));
    }

    #[test]
    fn block_swap_fails_and_forced_run_finds_the_wall() {
        let c = compliant8(0);
        let swap = LinearMap::from_rows((0..8).map(|k| 1 << ((k + 4) % 8)).collect()).unwrap();
        let rounds = c
            .rounds()
            .iter()
            .map(|r| Round {
                gamma: r.gamma.clone(),
                lambda: swap.clone(),
            })
            .collect();
        let ks = KeySchedule::new(8, 5, c.schedule().variant().clone()).unwrap();
        let s = TbCipher::new(c.layout(), rounds, ks).unwrap();
        assert!(matches!(
            validate_theorem(&s, TheoremId::Mainme, &TheoremOptions::default()),
            Err(Error::Hypotheses(_))
        ));
        let forced = TheoremOptions {
            force: true,
            ..TheoremOptions::default()
        };
        let rep = validate_theorem(&s, TheoremId::Mainme, &forced).unwrap();
        assert!(!rep.pass);
        assert!(rep.hypotheses.failures.iter().any(|f| f.contains("strongly proper")));
        let w = rep.witness.unwrap();
        assert!(w.chain.iter().any(|e| match &e.shape {
            crate::trapdoor::Shape::Linear { w } => c.layout().is_wall(w).is_some(),
            _ => false,
        }));
    }

    #[test]
    fn trapdoored_chain_is_linear() {
        let c = trapdoored6(3);
        let rep = validate_theorem(&c, TheoremId::Francesi, &TheoremOptions::default()).unwrap();
        assert!(rep.pass);
        let w = rep.witness.unwrap();
        assert!(w.keys_exhaustive);
        assert_ne!(w.a, w.b);
    }
}
