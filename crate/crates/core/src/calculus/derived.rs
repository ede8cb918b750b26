//! Builders for derived rules. Each returns a tree of primitive rules; the
//! result still has to go through [`super::check`] to be trusted.

use alloc::boxed::Box;
use alloc::string::String;

use super::Derivation;
use crate::language::{Formula, Term, VarName};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum DerivedRuleError {
    #[error("term is not free for {var} in {formula}")]
    NotFreeFor {
        var: VarName,
        term: Term,
        formula: Formula,
    },
    #[error("{var} is free in {formula}")]
    VarFree { var: VarName, formula: Formula },
    #[error("constant {constant} occurs in {formula}")]
    ConstantOccurs { constant: String, formula: Formula },
    #[error("premise proves {found}, expected {expected}")]
    PremiseMismatch { expected: Formula, found: Formula },
}

fn instantiate(var: VarName, term: Term, body: Formula, premise: Derivation) -> Derivation {
    Derivation::AllIl {
        var,
        term,
        body,
        premise: Box::new(premise),
    }
}

fn generalize(var: VarName, premise: Derivation) -> Derivation {
    Derivation::AllIr {
        var,
        premise: Box::new(premise),
    }
}

/// `∀x φ ⇝ φ`, by instantiating `x` with itself.
fn strip(phi: &Formula, x: VarName) -> Derivation {
    instantiate(
        x,
        Term::Var(x),
        phi.clone(),
        Derivation::Refl {
            formula: phi.clone(),
        },
    )
}

/// `∀x ∀y φ ⇝ ∀y ∀x φ`
pub fn all_comm(phi: &Formula, x: VarName, y: VarName) -> Derivation {
    let inner = Formula::all(y, phi.clone());
    // ∀x∀y φ ⇝ φ
    let opened = instantiate(x, Term::Var(x), inner, strip(phi, y));
    generalize(y, generalize(x, opened))
}

/// `∀x φ ⇝ φ[x:=t]`, provided `t` is free for `x` in `φ`.
pub fn all_sub(phi: &Formula, x: VarName, t: &Term) -> Result<Derivation, DerivedRuleError> {
    if !phi.is_free_for(x, t) {
        return Err(DerivedRuleError::NotFreeFor {
            var: x,
            term: t.clone(),
            formula: phi.clone(),
        });
    }
    Ok(instantiate(
        x,
        t.clone(),
        phi.clone(),
        Derivation::Refl {
            formula: phi.substitute(x, t),
        },
    ))
}

/// `◇∀x φ ⇝ ∀x ◇φ`
pub fn diam_all(phi: &Formula, x: VarName) -> Derivation {
    generalize(
        x,
        Derivation::Nec {
            premise: Box::new(strip(phi, x)),
        },
    )
}

/// `∀x φ ⇝ ∀y φ[x:=y]`, provided `y` is free for `x` in `φ` and `y` is not
/// free in `∀x φ`.
pub fn alpha_conversion(
    phi: &Formula,
    x: VarName,
    y: VarName,
) -> Result<Derivation, DerivedRuleError> {
    let yt = Term::Var(y);
    if !phi.is_free_for(x, &yt) {
        return Err(DerivedRuleError::NotFreeFor {
            var: x,
            term: yt,
            formula: phi.clone(),
        });
    }
    let closed = Formula::all(x, phi.clone());
    if closed.has_free_var(y) {
        return Err(DerivedRuleError::VarFree {
            var: y,
            formula: closed,
        });
    }
    Ok(generalize(y, all_sub(phi, x, &yt)?))
}

/// From `d : φ ⇝ ψ`, `φ ⇝ ψ[x:=t]`, provided `x ∉ fv(φ)` and `t` is free for
/// `x` in `ψ`.
pub fn term_ir(d: Derivation, x: VarName, t: &Term) -> Result<Derivation, DerivedRuleError> {
    let s = d.conclusion();
    if s.antecedent.has_free_var(x) {
        return Err(DerivedRuleError::VarFree {
            var: x,
            formula: s.antecedent,
        });
    }
    if !s.consequent.is_free_for(x, t) {
        return Err(DerivedRuleError::NotFreeFor {
            var: x,
            term: t.clone(),
            formula: s.consequent,
        });
    }
    // φ[x:=t] is φ itself since x is not free there.
    Ok(Derivation::TermI {
        var: x,
        term: t.clone(),
        premise: Box::new(d),
    })
}

/// From `d : φ ⇝ ψ[x:=c]`, `φ ⇝ ∀x ψ`, provided `x ∉ fv(φ)` and `c` occurs in
/// neither `φ` nor `ψ`.
pub fn const_all_ir(
    d: Derivation,
    psi: &Formula,
    x: VarName,
    c: &str,
) -> Result<Derivation, DerivedRuleError> {
    let s = d.conclusion();
    if s.antecedent.has_free_var(x) {
        return Err(DerivedRuleError::VarFree {
            var: x,
            formula: s.antecedent,
        });
    }
    for f in [&s.antecedent, psi] {
        if f.mentions_const(c) {
            return Err(DerivedRuleError::ConstantOccurs {
                constant: c.into(),
                formula: f.clone(),
            });
        }
    }
    let expected = psi.substitute(x, &Term::Const(c.into()));
    if expected != s.consequent {
        return Err(DerivedRuleError::PremiseMismatch {
            expected,
            found: s.consequent,
        });
    }
    let eliminated = Derivation::ConstE {
        var: x,
        constant: c.into(),
        antecedent: s.antecedent,
        consequent: psi.clone(),
        premise: Box::new(d),
    };
    Ok(generalize(x, eliminated))
}
