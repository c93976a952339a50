//! Partition trapdoors: search, control ciphers and computational checks of
//! the primitivity results.

mod build;
mod lemmas;
mod search;
mod theorems;

pub use build::{
    ablated8, trapdoored6, build_trapdoored_cipher, compliant8, compliant_spaces, wall_preserving,
    Ablation,
};
pub use lemmas::{validate_lemma, LemmaHit, LemmaId, LemmaParams, LemmaReport};
pub use search::{
    propagate, search_all, search_trapdoor, ChainEntry, Family, KeySubset, SearchScope, Shape,
    TrapdoorWitness, EXHAUSTIVE_RECHECK, RECHECK_SAMPLES,
};
pub use theorems::{validate_theorem, TheoremOptions, TheoremReport};
