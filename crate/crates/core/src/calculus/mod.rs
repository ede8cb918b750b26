//! Derivation trees and the proof checker.
//!
//! The trusted kernel is [`check_step`]: one case per primitive rule, nothing
//! else. [`check`] folds it over a tree bottom-up. The derived rules in
//! [`derived`] only build primitive trees and are never trusted.

pub mod derived;

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::language::{Formula, Sequent, Signature, Term, VarName, VarTable, WellFormedError};

/// A proof of a sequent, carrying every rule parameter explicitly.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Derivation {
    /// `φ ⇝ ⊤`
    Top { antecedent: Formula },
    /// `φ ⇝ φ`
    Refl { formula: Formula },
    /// `φ ∧ ψ ⇝ φ`
    AndEl { left: Formula, right: Formula },
    /// `φ ∧ ψ ⇝ ψ`
    AndEr { left: Formula, right: Formula },
    /// From `φ ⇝ ψ` and `φ ⇝ χ`, `φ ⇝ ψ ∧ χ`.
    AndI {
        left: Box<Derivation>,
        right: Box<Derivation>,
    },
    /// From `φ ⇝ ψ` and `ψ ⇝ χ`, `φ ⇝ χ`.
    Cut {
        left: Box<Derivation>,
        right: Box<Derivation>,
    },
    /// From `φ ⇝ ψ`, `◇φ ⇝ ◇ψ`.
    Nec { premise: Box<Derivation> },
    /// `◇◇φ ⇝ ◇φ`
    Trans { formula: Formula },
    /// From `φ ⇝ ψ`, `φ ⇝ ∀x ψ` when `x ∉ fv(φ)`.
    AllIr {
        var: VarName,
        premise: Box<Derivation>,
    },
    /// From `φ[x:=t] ⇝ ψ`, `∀x φ ⇝ ψ` when `t` is free for `x` in `φ`.
    AllIl {
        var: VarName,
        term: Term,
        body: Formula,
        premise: Box<Derivation>,
    },
    /// From `φ ⇝ ψ`, `φ[x:=t] ⇝ ψ[x:=t]` when `t` is free for `x` in both.
    TermI {
        var: VarName,
        term: Term,
        premise: Box<Derivation>,
    },
    /// From `φ[x:=c] ⇝ ψ[x:=c]`, `φ ⇝ ψ` when `c` occurs in neither.
    ConstE {
        var: VarName,
        constant: String,
        antecedent: Formula,
        consequent: Formula,
        premise: Box<Derivation>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleTag {
    Top,
    Refl,
    AndEl,
    AndEr,
    AndI,
    Cut,
    Nec,
    Trans,
    AllIr,
    AllIl,
    TermI,
    ConstE,
}

impl RuleTag {
    pub const ALL: [RuleTag; 12] = [
        RuleTag::Top,
        RuleTag::Refl,
        RuleTag::AndEl,
        RuleTag::AndEr,
        RuleTag::AndI,
        RuleTag::Cut,
        RuleTag::Nec,
        RuleTag::Trans,
        RuleTag::AllIr,
        RuleTag::AllIl,
        RuleTag::TermI,
        RuleTag::ConstE,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RuleTag::Top => "Top",
            RuleTag::Refl => "Refl",
            RuleTag::AndEl => "AndEl",
            RuleTag::AndEr => "AndEr",
            RuleTag::AndI => "AndI",
            RuleTag::Cut => "Cut",
            RuleTag::Nec => "Nec",
            RuleTag::Trans => "Trans",
            RuleTag::AllIr => "AllIr",
            RuleTag::AllIl => "AllIl",
            RuleTag::TermI => "TermI",
            RuleTag::ConstE => "ConstE",
        }
    }

    pub fn from_name(name: &str) -> Option<RuleTag> {
        RuleTag::ALL.into_iter().find(|t| t.name() == name)
    }

    /// Number of premises the rule takes.
    pub fn arity(self) -> usize {
        match self {
            RuleTag::Top | RuleTag::Refl | RuleTag::AndEl | RuleTag::AndEr | RuleTag::Trans => 0,
            RuleTag::AndI | RuleTag::Cut => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for RuleTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Antecedent,
    Consequent,
}

/// The closed set of reasons a rule application is rejected.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CheckFailure {
    IllFormed(WellFormedError),
    /// `AllIr`: the generalised variable is free in the antecedent.
    VarFreeInAntecedent(VarName),
    /// `AllIl` / `TermI`: the term is not free for the variable.
    NotFreeFor {
        side: Side,
        var: VarName,
        term: Term,
    },
    /// `ConstE`: the eliminated constant occurs in the conclusion.
    ConstantOccurs {
        side: Side,
        constant: String,
    },
    /// A premise does not have the shape the rule requires.
    PremiseMismatch {
        expected: Formula,
        found: Formula,
    },
    /// `check_step` was handed the wrong number of premise sequents.
    PremiseCount {
        expected: usize,
        found: usize,
    },
}

/// First failure found by [`check`], visiting premises left to right before
/// the node itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckError {
    /// Premise indices from the root to the failing node.
    pub path: Vec<usize>,
    pub rule: RuleTag,
    pub reason: CheckFailure,
}

impl Derivation {
    pub fn tag(&self) -> RuleTag {
        match self {
            Derivation::Top { .. } => RuleTag::Top,
            Derivation::Refl { .. } => RuleTag::Refl,
            Derivation::AndEl { .. } => RuleTag::AndEl,
            Derivation::AndEr { .. } => RuleTag::AndEr,
            Derivation::AndI { .. } => RuleTag::AndI,
            Derivation::Cut { .. } => RuleTag::Cut,
            Derivation::Nec { .. } => RuleTag::Nec,
            Derivation::Trans { .. } => RuleTag::Trans,
            Derivation::AllIr { .. } => RuleTag::AllIr,
            Derivation::AllIl { .. } => RuleTag::AllIl,
            Derivation::TermI { .. } => RuleTag::TermI,
            Derivation::ConstE { .. } => RuleTag::ConstE,
        }
    }

    pub fn premises(&self) -> Vec<&Derivation> {
        match self {
            Derivation::Top { .. }
            | Derivation::Refl { .. }
            | Derivation::AndEl { .. }
            | Derivation::AndEr { .. }
            | Derivation::Trans { .. } => Vec::new(),
            Derivation::AndI { left, right } | Derivation::Cut { left, right } => {
                alloc::vec![&**left, &**right]
            }
            Derivation::Nec { premise }
            | Derivation::AllIr { premise, .. }
            | Derivation::AllIl { premise, .. }
            | Derivation::TermI { premise, .. }
            | Derivation::ConstE { premise, .. } => alloc::vec![&**premise],
        }
    }

    /// The sequent this tree claims to prove, read off its parameters without
    /// checking any side condition.
    pub fn conclusion(&self) -> Sequent {
        match self {
            Derivation::Top { antecedent } => Sequent::new(antecedent.clone(), Formula::Top),
            Derivation::Refl { formula } => Sequent::new(formula.clone(), formula.clone()),
            Derivation::AndEl { left, right } => {
                Sequent::new(Formula::and(left.clone(), right.clone()), left.clone())
            }
            Derivation::AndEr { left, right } => {
                Sequent::new(Formula::and(left.clone(), right.clone()), right.clone())
            }
            Derivation::AndI { left, right } => {
                let l = left.conclusion();
                let r = right.conclusion();
                Sequent::new(l.antecedent, Formula::and(l.consequent, r.consequent))
            }
            Derivation::Cut { left, right } => {
                Sequent::new(left.conclusion().antecedent, right.conclusion().consequent)
            }
            Derivation::Nec { premise } => {
                let p = premise.conclusion();
                Sequent::new(Formula::diam(p.antecedent), Formula::diam(p.consequent))
            }
            Derivation::Trans { formula } => Sequent::new(
                Formula::diam_n(2, formula.clone()),
                Formula::diam(formula.clone()),
            ),
            Derivation::AllIr { var, premise } => {
                let p = premise.conclusion();
                Sequent::new(p.antecedent, Formula::all(*var, p.consequent))
            }
            Derivation::AllIl {
                var, body, premise, ..
            } => Sequent::new(
                Formula::all(*var, body.clone()),
                premise.conclusion().consequent,
            ),
            Derivation::TermI { var, term, premise } => {
                let p = premise.conclusion();
                Sequent::new(
                    p.antecedent.substitute(*var, term),
                    p.consequent.substitute(*var, term),
                )
            }
            Derivation::ConstE {
                antecedent,
                consequent,
                ..
            } => Sequent::new(antecedent.clone(), consequent.clone()),
        }
    }

    /// Longest root-to-leaf path, counted in nodes.
    pub fn depth(&self) -> usize {
        1 + self
            .premises()
            .into_iter()
            .map(Derivation::depth)
            .max()
            .unwrap_or(0)
    }

    pub fn size(&self) -> usize {
        1 + self
            .premises()
            .into_iter()
            .map(Derivation::size)
            .sum::<usize>()
    }

    /// Every node with its path from the root, in pre-order.
    pub fn nodes(&self) -> Vec<(Vec<usize>, &Derivation)> {
        let mut out = Vec::new();
        let mut stack = alloc::vec![(Vec::new(), self)];
        while let Some((path, d)) = stack.pop() {
            let premises = d.premises();
            for (i, p) in premises.into_iter().enumerate().rev() {
                let mut child = path.clone();
                child.push(i);
                stack.push((child, p));
            }
            out.push((path, d));
        }
        out
    }

    /// Constants the tree mentions in any parameter.
    pub fn constants(&self) -> alloc::collections::BTreeSet<String> {
        let mut out = alloc::collections::BTreeSet::new();
        for (_, d) in self.nodes() {
            match d {
                Derivation::Top { antecedent: f }
                | Derivation::Refl { formula: f }
                | Derivation::Trans { formula: f } => out.extend(f.constants()),
                Derivation::AndEl { left, right } | Derivation::AndEr { left, right } => {
                    out.extend(left.constants());
                    out.extend(right.constants());
                }
                Derivation::AllIl { term, body, .. } => {
                    out.extend(body.constants());
                    if let Term::Const(c) = term {
                        out.insert(c.clone());
                    }
                }
                Derivation::TermI {
                    term: Term::Const(c),
                    ..
                } => {
                    out.insert(c.clone());
                }
                Derivation::ConstE {
                    constant,
                    antecedent,
                    consequent,
                    ..
                } => {
                    out.insert(constant.clone());
                    out.extend(antecedent.constants());
                    out.extend(consequent.constants());
                }
                _ => {}
            }
        }
        out
    }
}

fn well_formed(f: &Formula, sig: &Signature) -> Result<(), CheckFailure> {
    f.check_well_formed(sig).map_err(CheckFailure::IllFormed)
}

fn well_formed_term(t: &Term, sig: &Signature) -> Result<(), CheckFailure> {
    match t {
        Term::Const(c) if !sig.is_constant(c) => Err(CheckFailure::IllFormed(
            WellFormedError::UndeclaredConstant(c.clone()),
        )),
        _ => Ok(()),
    }
}

fn same(expected: &Formula, found: &Formula) -> Result<(), CheckFailure> {
    if expected == found {
        Ok(())
    } else {
        Err(CheckFailure::PremiseMismatch {
            expected: expected.clone(),
            found: found.clone(),
        })
    }
}

/// Checks one rule application given the sequents its premises prove, and
/// returns the sequent it concludes.
pub fn check_step(
    node: &Derivation,
    premises: &[Sequent],
    sig: &Signature,
) -> Result<Sequent, CheckFailure> {
    let expected = node.tag().arity();
    if premises.len() != expected {
        return Err(CheckFailure::PremiseCount {
            expected,
            found: premises.len(),
        });
    }
    match node {
        Derivation::Top { antecedent } => {
            well_formed(antecedent, sig)?;
            Ok(Sequent::new(antecedent.clone(), Formula::Top))
        }
        Derivation::Refl { formula } => {
            well_formed(formula, sig)?;
            Ok(Sequent::new(formula.clone(), formula.clone()))
        }
        Derivation::AndEl { left, right } | Derivation::AndEr { left, right } => {
            well_formed(left, sig)?;
            well_formed(right, sig)?;
            Ok(node.conclusion())
        }
        Derivation::Trans { formula } => {
            well_formed(formula, sig)?;
            Ok(node.conclusion())
        }
        Derivation::AndI { .. } => {
            let (l, r) = (&premises[0], &premises[1]);
            same(&l.antecedent, &r.antecedent)?;
            Ok(Sequent::new(
                l.antecedent.clone(),
                Formula::and(l.consequent.clone(), r.consequent.clone()),
            ))
        }
        Derivation::Cut { .. } => {
            let (l, r) = (&premises[0], &premises[1]);
            same(&l.consequent, &r.antecedent)?;
            Ok(Sequent::new(l.antecedent.clone(), r.consequent.clone()))
        }
        Derivation::Nec { .. } => {
            let p = &premises[0];
            Ok(Sequent::new(
                Formula::diam(p.antecedent.clone()),
                Formula::diam(p.consequent.clone()),
            ))
        }
        Derivation::AllIr { var, .. } => {
            let p = &premises[0];
            if p.antecedent.has_free_var(*var) {
                return Err(CheckFailure::VarFreeInAntecedent(*var));
            }
            Ok(Sequent::new(
                p.antecedent.clone(),
                Formula::all(*var, p.consequent.clone()),
            ))
        }
        Derivation::AllIl {
            var, term, body, ..
        } => {
            let p = &premises[0];
            well_formed(body, sig)?;
            well_formed_term(term, sig)?;
            if !body.is_free_for(*var, term) {
                return Err(CheckFailure::NotFreeFor {
                    side: Side::Antecedent,
                    var: *var,
                    term: term.clone(),
                });
            }
            same(&body.substitute(*var, term), &p.antecedent)?;
            Ok(Sequent::new(
                Formula::all(*var, body.clone()),
                p.consequent.clone(),
            ))
        }
        Derivation::TermI { var, term, .. } => {
            let p = &premises[0];
            well_formed_term(term, sig)?;
            for (side, f) in [
                (Side::Antecedent, &p.antecedent),
                (Side::Consequent, &p.consequent),
            ] {
                if !f.is_free_for(*var, term) {
                    return Err(CheckFailure::NotFreeFor {
                        side,
                        var: *var,
                        term: term.clone(),
                    });
                }
            }
            Ok(Sequent::new(
                p.antecedent.substitute(*var, term),
                p.consequent.substitute(*var, term),
            ))
        }
        Derivation::ConstE {
            var,
            constant,
            antecedent,
            consequent,
            ..
        } => {
            let p = &premises[0];
            well_formed(antecedent, sig)?;
            well_formed(consequent, sig)?;
            for (side, f) in [
                (Side::Antecedent, antecedent),
                (Side::Consequent, consequent),
            ] {
                if f.mentions_const(constant) {
                    return Err(CheckFailure::ConstantOccurs {
                        side,
                        constant: constant.clone(),
                    });
                }
            }
            let c = Term::Const(constant.clone());
            same(&antecedent.substitute(*var, &c), &p.antecedent)?;
            same(&consequent.substitute(*var, &c), &p.consequent)?;
            Ok(Sequent::new(antecedent.clone(), consequent.clone()))
        }
    }
}

/// Checks a whole derivation and returns the sequent it proves.
pub fn check(d: &Derivation, sig: &Signature) -> Result<Sequent, CheckError> {
    let mut path = Vec::new();
    check_at(d, sig, &mut path)
}

fn check_at(d: &Derivation, sig: &Signature, path: &mut Vec<usize>) -> Result<Sequent, CheckError> {
    let mut proved = Vec::new();
    for (i, p) in d.premises().into_iter().enumerate() {
        path.push(i);
        proved.push(check_at(p, sig, path)?);
        path.pop();
    }
    check_step(d, &proved, sig).map_err(|reason| CheckError {
        path: path.clone(),
        rule: d.tag(),
        reason,
    })
}

impl CheckError {
    pub fn display<'a>(&'a self, vars: Option<&'a VarTable>) -> CheckErrorDisplay<'a> {
        CheckErrorDisplay { error: self, vars }
    }
}

pub struct CheckErrorDisplay<'a> {
    error: &'a CheckError,
    vars: Option<&'a VarTable>,
}

impl fmt::Display for CheckErrorDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = self.error;
        let vars = self.vars;
        let var = |x: VarName| Term::Var(x);
        f.write_str("rule ")?;
        write!(f, "{} at /", e.rule)?;
        for (i, p) in e.path.iter().enumerate() {
            if i > 0 {
                f.write_str("/")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str(": ")?;
        let side_name = |s: Side| match s {
            Side::Antecedent => "antecedent",
            Side::Consequent => "consequent",
        };
        match &e.reason {
            CheckFailure::IllFormed(w) => write!(f, "ill-formed formula: {w}"),
            CheckFailure::VarFreeInAntecedent(x) => write!(
                f,
                "side condition violated: {} is free in the antecedent",
                var(*x).display(vars)
            ),
            CheckFailure::NotFreeFor { side, var: x, term } => write!(
                f,
                "side condition violated: {} is not free for {} in the {}",
                term.display(vars),
                var(*x).display(vars),
                side_name(*side)
            ),
            CheckFailure::ConstantOccurs { side, constant } => write!(
                f,
                "side condition violated: constant {constant} occurs in the {}",
                side_name(*side)
            ),
            CheckFailure::PremiseMismatch { expected, found } => write!(
                f,
                "premise mismatch: expected {}, found {}",
                expected.display(vars),
                found.display(vars)
            ),
            CheckFailure::PremiseCount { expected, found } => {
                write!(f, "expected {expected} premises, found {found}")
            }
        }
    }
}

impl fmt::Display for CheckError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.display(None).fmt(f)
    }
}

impl core::error::Error for CheckError {}

#[cfg(test)]
mod tests;
