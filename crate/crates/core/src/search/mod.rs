//! Soundness harness, countermodel enumeration, bounded proof search and the
//! decision procedure that interleaves the last two.

mod countermodel;
mod proof;
mod soundness;

use core::time::Duration;

pub use countermodel::{enumerate_countermodels, rooted_frames, Countermodel, CountermodelSearch};
pub use proof::{proof_search, Proof, ProofSearch};
pub use soundness::{soundness_check, Violation};

use crate::language::{Sequent, Signature};

/// Limits for [`decide`] and its two halves.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBounds {
    pub max_worlds: usize,
    pub max_domain: usize,
    pub max_proof_depth: usize,
    /// Fresh variables offered as instantiation candidates.
    pub max_candidate_terms: usize,
    /// Wall-clock budget, honoured by callers that supply a clock through [`Budget`].
    pub deadline: Option<Duration>,
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds {
            max_worlds: 4,
            max_domain: 3,
            max_proof_depth: 8,
            max_candidate_terms: 1,
            deadline: None,
        }
    }
}

/// Cooperative cancellation. The core crate has no clock; callers decide what
/// running out means.
pub trait Budget {
    fn exhausted(&self) -> bool;
}

/// Never runs out.
#[derive(Clone, Copy, Debug, Default)]
pub struct Unlimited;

impl Budget for Unlimited {
    fn exhausted(&self) -> bool {
        false
    }
}

impl<F: Fn() -> bool> Budget for F {
    fn exhausted(&self) -> bool {
        self()
    }
}

/// Which limits were reached without a verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Exhausted {
    /// Deepest proof-search depth completed.
    pub depth: usize,
    /// Largest `(worlds, domain)` size completed by the countermodel search.
    pub worlds: usize,
    pub domain: usize,
    pub timed_out: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    /// A kernel-checked derivation.
    Proved(Proof),
    /// An adequate, finite, constant-domain, irreflexive countermodel.
    Refuted(Countermodel),
    Exhausted(Exhausted),
}

/// Alternates proof search at increasing depth with countermodel enumeration
/// at increasing `(worlds, domain)` until one of them succeeds or every bound
/// is used up.
pub fn decide(
    sig: &Signature,
    seq: &Sequent,
    bounds: &SearchBounds,
    budget: &dyn Budget,
) -> SearchOutcome {
    let mut prover = ProofSearch::new(sig, seq, bounds.max_candidate_terms);
    let sizes: alloc::vec::Vec<(usize, usize)> = (1..=bounds.max_worlds)
        .flat_map(|k| (1..=bounds.max_domain).map(move |n| (k, n)))
        .collect();
    let mut refuter = CountermodelSearch::new(sig, seq);
    let mut done = Exhausted {
        depth: 0,
        worlds: 0,
        domain: 0,
        timed_out: false,
    };
    let rounds = bounds.max_proof_depth.max(sizes.len());
    for round in 0..rounds {
        if round < bounds.max_proof_depth {
            let depth = round + 1;
            match prover.run(depth, budget) {
                Ok(Some(proof)) => return SearchOutcome::Proved(proof),
                Ok(None) => done.depth = depth,
                Err(_) => {
                    done.timed_out = true;
                    return SearchOutcome::Exhausted(done);
                }
            }
        }
        if let Some(&(k, n)) = sizes.get(round) {
            match refuter.search_size(k, n, budget) {
                Ok(Some(cm)) => return SearchOutcome::Refuted(cm),
                Ok(None) => {
                    done.worlds = k;
                    done.domain = n;
                }
                Err(_) => {
                    done.timed_out = true;
                    return SearchOutcome::Exhausted(done);
                }
            }
        }
    }
    SearchOutcome::Exhausted(done)
}

/// Returned by the search halves when the [`Budget`] runs out.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OutOfBudget;
