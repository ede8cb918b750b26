//! Bounded backward proof search.
//!
//! Goal-directed and incomplete: conjunctions and universals on the right are
//! decomposed eagerly, then the left side is taken apart with the elimination
//! rules, `Nec` and `Trans`. Universals on the left are instantiated with the
//! terms of the sequent plus a few fresh variables. Depth is counted in nodes,
//! and failed goals are remembered with the depth they failed at.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use super::{Budget, OutOfBudget, SearchBounds};
use crate::calculus::{check, derived::alpha_conversion, Derivation};
use crate::language::{Formula, Sequent, Signature, Term, VarName};

/// A derivation together with the signature it was checked against.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Proof {
    pub derivation: Derivation,
    pub signature: Signature,
}

/// Iterative deepening up to `bounds.max_proof_depth`.
pub fn proof_search(
    sig: &Signature,
    seq: &Sequent,
    bounds: &SearchBounds,
    budget: &dyn Budget,
) -> Result<Option<Proof>, OutOfBudget> {
    let mut search = ProofSearch::new(sig, seq, bounds.max_candidate_terms);
    for depth in 1..=bounds.max_proof_depth {
        if let Some(p) = search.run(depth, budget)? {
            return Ok(Some(p));
        }
    }
    Ok(None)
}

pub struct ProofSearch {
    sig: Signature,
    goal: Sequent,
    fresh: usize,
    failed: BTreeMap<Sequent, usize>,
    steps: usize,
}

impl ProofSearch {
    /// `fresh` is how many unused variables are offered when instantiating a
    /// universal on the left.
    pub fn new(sig: &Signature, seq: &Sequent, fresh: usize) -> Self {
        ProofSearch {
            sig: sig.clone(),
            goal: seq.clone(),
            fresh,
            failed: BTreeMap::new(),
            steps: 0,
        }
    }

    /// Looks for a derivation of depth at most `depth`.
    pub fn run(&mut self, depth: usize, budget: &dyn Budget) -> Result<Option<Proof>, OutOfBudget> {
        if !self.goal.is_well_formed(&self.sig) {
            return Ok(None);
        }
        let goal = self.goal.clone();
        let Some(d) = self.prove(&goal, depth, budget)? else {
            return Ok(None);
        };
        let proved = check(&d, &self.sig).expect("proof search built an invalid derivation");
        assert_eq!(proved, goal, "proof search proved the wrong sequent");
        Ok(Some(Proof {
            derivation: d,
            signature: self.sig.clone(),
        }))
    }

    fn prove(
        &mut self,
        seq: &Sequent,
        depth: usize,
        budget: &dyn Budget,
    ) -> Result<Option<Derivation>, OutOfBudget> {
        if depth == 0 || self.failed.get(seq).is_some_and(|&d| d >= depth) {
            return Ok(None);
        }
        self.steps += 1;
        if self.steps.is_multiple_of(1024) && budget.exhausted() {
            return Err(OutOfBudget);
        }
        let found = match axiom(seq) {
            Some(d) => Some(d),
            None if depth == 1 => None,
            None => self.decompose(seq, depth, budget)?,
        };
        if found.is_none() {
            let entry = self.failed.entry(seq.clone()).or_insert(0);
            *entry = (*entry).max(depth);
        }
        Ok(found)
    }

    fn decompose(
        &mut self,
        seq: &Sequent,
        depth: usize,
        budget: &dyn Budget,
    ) -> Result<Option<Derivation>, OutOfBudget> {
        let (phi, psi) = (&seq.antecedent, &seq.consequent);
        let below = depth - 1;

        match psi {
            Formula::And(a, b) => {
                let Some(l) =
                    self.prove(&Sequent::new(phi.clone(), (**a).clone()), below, budget)?
                else {
                    return Ok(None);
                };
                let r = self.prove(&Sequent::new(phi.clone(), (**b).clone()), below, budget)?;
                return Ok(r.map(|r| Derivation::AndI {
                    left: Box::new(l),
                    right: Box::new(r),
                }));
            }
            Formula::All(x, b) if !phi.has_free_var(*x) => {
                let p = self.prove(&Sequent::new(phi.clone(), (**b).clone()), below, budget)?;
                return Ok(p.map(|p| all_ir(*x, p)));
            }
            Formula::All(x, b) => {
                // x is free on the left: prove a renamed copy, then convert back.
                if depth < 4 {
                    return Ok(None);
                }
                let z = fresh_var(seq, 0);
                let renamed = b.substitute(*x, &Term::Var(z));
                let back = alpha_conversion(&renamed, z, *x)
                    .expect("a fresh variable can always be renamed back");
                let p = self.prove(&Sequent::new(phi.clone(), renamed), depth - 2, budget)?;
                return Ok(p.map(|p| Derivation::Cut {
                    left: Box::new(all_ir(z, p)),
                    right: Box::new(back),
                }));
            }
            _ => {}
        }

        if let (Formula::Diam(a), Formula::Diam(b)) = (phi, psi) {
            let inner = Sequent::new((**a).clone(), (**b).clone());
            if let Some(p) = self.prove(&inner, below, budget)? {
                return Ok(Some(Derivation::Nec {
                    premise: Box::new(p),
                }));
            }
        }

        if let Formula::Diam(a) = phi {
            if let Formula::Diam(chi) = &**a {
                let shorter = Sequent::new(Formula::diam((**chi).clone()), psi.clone());
                if let Some(p) = self.prove(&shorter, below, budget)? {
                    return Ok(Some(cut(
                        Derivation::Trans {
                            formula: (**chi).clone(),
                        },
                        p,
                    )));
                }
            }
        }

        if let Formula::And(a, b) = phi {
            let l = Sequent::new((**a).clone(), psi.clone());
            if let Some(p) = self.prove(&l, below, budget)? {
                let first = Derivation::AndEl {
                    left: (**a).clone(),
                    right: (**b).clone(),
                };
                return Ok(Some(cut(first, p)));
            }
            let r = Sequent::new((**b).clone(), psi.clone());
            if let Some(p) = self.prove(&r, below, budget)? {
                let first = Derivation::AndEr {
                    left: (**a).clone(),
                    right: (**b).clone(),
                };
                return Ok(Some(cut(first, p)));
            }
        }

        if let Formula::All(x, a) = phi {
            for t in self.candidates(seq) {
                if !a.is_free_for(*x, &t) {
                    continue;
                }
                let inst = Sequent::new(a.substitute(*x, &t), psi.clone());
                if let Some(p) = self.prove(&inst, below, budget)? {
                    return Ok(Some(Derivation::AllIl {
                        var: *x,
                        term: t,
                        body: (**a).clone(),
                        premise: Box::new(p),
                    }));
                }
            }
        }

        Ok(None)
    }

    /// Terms of the sequent, declared constants it mentions, then fresh variables.
    fn candidates(&self, seq: &Sequent) -> Vec<Term> {
        let mut terms: BTreeSet<Term> = seq.antecedent.terms();
        terms.extend(seq.consequent.terms());
        terms.extend(seq.free_vars().into_iter().map(Term::Var));
        terms.extend(seq.constants().into_iter().map(Term::Const));
        let mut out: Vec<Term> = terms.into_iter().collect();
        let mut next = 0;
        for _ in 0..self.fresh {
            let z = fresh_var(seq, next);
            next = z.0 + 1;
            out.push(Term::Var(z));
        }
        out
    }
}

fn axiom(seq: &Sequent) -> Option<Derivation> {
    let (phi, psi) = (&seq.antecedent, &seq.consequent);
    if *psi == Formula::Top {
        return Some(Derivation::Top {
            antecedent: phi.clone(),
        });
    }
    if phi == psi {
        return Some(Derivation::Refl {
            formula: phi.clone(),
        });
    }
    if let Formula::And(a, b) = phi {
        if **a == *psi {
            return Some(Derivation::AndEl {
                left: (**a).clone(),
                right: (**b).clone(),
            });
        }
        if **b == *psi {
            return Some(Derivation::AndEr {
                left: (**a).clone(),
                right: (**b).clone(),
            });
        }
    }
    if let (Formula::Diam(a), Formula::Diam(chi)) = (phi, psi) {
        if **a == Formula::Diam(chi.clone()) {
            return Some(Derivation::Trans {
                formula: (**chi).clone(),
            });
        }
    }
    None
}

fn all_ir(x: VarName, premise: Derivation) -> Derivation {
    Derivation::AllIr {
        var: x,
        premise: Box::new(premise),
    }
}

fn cut(left: Derivation, right: Derivation) -> Derivation {
    Derivation::Cut {
        left: Box::new(left),
        right: Box::new(right),
    }
}

/// Smallest variable at least `from` that does not occur in `seq` at all.
fn fresh_var(seq: &Sequent, from: u32) -> VarName {
    let used = seq.all_vars();
    (from..)
        .map(VarName)
        .find(|x| !used.contains(x))
        .expect("finitely many variables in use")
}
