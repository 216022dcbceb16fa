//! Constants of the level-set lemmas, the fast-geometric-convergence
//! iteration, the oscillation-reduction recursion, and empirical checkers of
//! the two measure-to-pointwise lemmas on discrete fields.

mod constants;
mod lemma;
mod recursion;

pub use constants::{a_full, a_reduced, beta, ln_nu_minus, nu_minus, nu_plus, DeGiorgiConstants, LemmaParams};
pub use lemma::{
    check_lemma41, check_lemma42, smallest_consistent_gamma, LemmaKind, LemmaSetup, LemmaStatus, LemmaVerdict,
};
pub use recursion::{
    alpha, fgc, fgc_threshold, ln_fgc_threshold, osc_recursion, FgcOutcome, FgcVerdict, OscillationTrace, StopReason,
    FGC_ZERO,
};
