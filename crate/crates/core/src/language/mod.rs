//! The quantified strictly positive language.
//!
//! Variables are named (natural numbers) and substitution is unguarded: it
//! never renames binders. Callers that need capture avoidance check
//! [`Formula::is_free_for`] first, which is how the calculus states its side
//! conditions.

mod parse;
mod print;

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub use parse::{
    parse_formula, parse_problem, parse_sequent, parse_term, ParseError, ParseErrorKind, Problem,
};
pub use print::{FormulaDisplay, SequentDisplay, TermDisplay};

/// A variable. Variables are natural numbers; the text syntax maps identifiers
/// onto them through a [`VarTable`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarName(pub u32);

impl fmt::Display for VarName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "_{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SignatureError {
    #[error("`{0}` is declared both as a constant and as a predicate")]
    NameClash(String),
    #[error("predicate `{name}` redeclared with arity {new} (was {old})")]
    ArityRedeclared {
        name: String,
        old: usize,
        new: usize,
    },
}

/// Constant names and predicate names with their arities.
///
/// Both name sets are kept sorted, so the position of a name is stable and can
/// be used as a dense index by the model tables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    constants: BTreeSet<String>,
    predicates: BTreeMap<String, usize>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_constant(&mut self, name: &str) -> Result<(), SignatureError> {
        if self.predicates.contains_key(name) {
            return Err(SignatureError::NameClash(name.into()));
        }
        self.constants.insert(name.into());
        Ok(())
    }

    pub fn add_predicate(&mut self, name: &str, arity: usize) -> Result<(), SignatureError> {
        if self.constants.contains(name) {
            return Err(SignatureError::NameClash(name.into()));
        }
        match self.predicates.get(name) {
            Some(&old) if old != arity => Err(SignatureError::ArityRedeclared {
                name: name.into(),
                old,
                new: arity,
            }),
            _ => {
                self.predicates.insert(name.into(), arity);
                Ok(())
            }
        }
    }

    /// Builder form of [`Signature::add_constant`].
    pub fn with_constant(mut self, name: &str) -> Result<Self, SignatureError> {
        self.add_constant(name)?;
        Ok(self)
    }

    /// Builder form of [`Signature::add_predicate`].
    pub fn with_predicate(mut self, name: &str, arity: usize) -> Result<Self, SignatureError> {
        self.add_predicate(name, arity)?;
        Ok(self)
    }

    pub fn is_constant(&self, name: &str) -> bool {
        self.constants.contains(name)
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.predicates.get(name).copied()
    }

    pub fn constants(&self) -> impl ExactSizeIterator<Item = &str> + Clone {
        self.constants.iter().map(String::as_str)
    }

    pub fn predicates(&self) -> impl ExactSizeIterator<Item = (&str, usize)> + Clone {
        self.predicates.iter().map(|(n, &a)| (n.as_str(), a))
    }

    pub fn constant_count(&self) -> usize {
        self.constants.len()
    }

    pub fn predicate_count(&self) -> usize {
        self.predicates.len()
    }

    pub fn constant_index(&self, name: &str) -> Option<usize> {
        self.constants.iter().position(|c| c == name)
    }

    pub fn predicate_index(&self, name: &str) -> Option<usize> {
        self.predicates.keys().position(|p| p == name)
    }

    /// True when every name of `self` is declared in `other` with the same arity.
    pub fn is_subsignature_of(&self, other: &Signature) -> bool {
        self.constants.iter().all(|c| other.is_constant(c))
            && self
                .predicates
                .iter()
                .all(|(p, &a)| other.arity(p) == Some(a))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(VarName),
    Const(String),
}

impl Term {
    pub fn var(id: u32) -> Self {
        Term::Var(VarName(id))
    }

    pub fn constant(name: &str) -> Self {
        Term::Const(name.into())
    }

    /// `{x}` for a variable, `∅` for a constant.
    pub fn free_vars(&self) -> BTreeSet<VarName> {
        match self {
            Term::Var(x) => BTreeSet::from([*x]),
            Term::Const(_) => BTreeSet::new(),
        }
    }

    pub fn as_var(&self) -> Option<VarName> {
        match self {
            Term::Var(x) => Some(*x),
            Term::Const(_) => None,
        }
    }

    fn substitute(&self, x: VarName, t: &Term) -> Term {
        match self {
            Term::Var(y) if *y == x => t.clone(),
            other => other.clone(),
        }
    }
}

/// A strictly positive formula: `⊤`, atoms, `∧`, `◇` and `∀`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Top,
    Pred(String, Vec<Term>),
    And(Box<Formula>, Box<Formula>),
    Diam(Box<Formula>),
    All(VarName, Box<Formula>),
}

/// Why a formula is not well formed in a signature.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum WellFormedError {
    #[error("undeclared predicate `{0}`")]
    UndeclaredPredicate(String),
    #[error("predicate `{name}` has arity {expected} but is applied to {found} terms")]
    ArityMismatch {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("undeclared constant `{0}`")]
    UndeclaredConstant(String),
}

impl Formula {
    pub fn pred(name: &str, args: Vec<Term>) -> Self {
        Formula::Pred(name.into(), args)
    }

    pub fn and(l: Formula, r: Formula) -> Self {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn diam(f: Formula) -> Self {
        Formula::Diam(Box::new(f))
    }

    pub fn all(x: VarName, f: Formula) -> Self {
        Formula::All(x, Box::new(f))
    }

    /// `◇ⁿ f`.
    pub fn diam_n(n: usize, f: Formula) -> Self {
        (0..n).fold(f, |acc, _| Formula::diam(acc))
    }

    pub fn free_vars(&self) -> BTreeSet<VarName> {
        let mut out = BTreeSet::new();
        self.collect_free_vars(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free_vars(&self, bound: &mut Vec<VarName>, out: &mut BTreeSet<VarName>) {
        match self {
            Formula::Top => {}
            Formula::Pred(_, args) => {
                for t in args {
                    if let Term::Var(x) = t {
                        if !bound.contains(x) {
                            out.insert(*x);
                        }
                    }
                }
            }
            Formula::And(l, r) => {
                l.collect_free_vars(bound, out);
                r.collect_free_vars(bound, out);
            }
            Formula::Diam(f) => f.collect_free_vars(bound, out),
            Formula::All(x, f) => {
                bound.push(*x);
                f.collect_free_vars(bound, out);
                bound.pop();
            }
        }
    }

    pub fn has_free_var(&self, x: VarName) -> bool {
        match self {
            Formula::Top => false,
            Formula::Pred(_, args) => args.contains(&Term::Var(x)),
            Formula::And(l, r) => l.has_free_var(x) || r.has_free_var(x),
            Formula::Diam(f) => f.has_free_var(x),
            Formula::All(y, f) => *y != x && f.has_free_var(x),
        }
    }

    /// Every variable that occurs in the formula, free or bound, including binders.
    pub fn all_vars(&self) -> BTreeSet<VarName> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Formula::Pred(_, args) => out.extend(args.iter().filter_map(Term::as_var)),
            Formula::All(x, _) => {
                out.insert(*x);
            }
            _ => {}
        });
        out
    }

    /// Constant names occurring anywhere in the formula.
    pub fn constants(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Pred(_, args) = f {
                for t in args {
                    if let Term::Const(c) = t {
                        out.insert(c.clone());
                    }
                }
            }
        });
        out
    }

    /// Predicate names with the number of arguments they are applied to.
    pub fn predicates(&self) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        self.visit(&mut |f| {
            if let Formula::Pred(p, args) = f {
                out.insert(p.clone(), args.len());
            }
        });
        out
    }

    /// Every term appearing as a predicate argument.
    pub fn terms(&self) -> BTreeSet<Term> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Pred(_, args) = f {
                out.extend(args.iter().cloned());
            }
        });
        out
    }

    pub fn mentions_const(&self, c: &str) -> bool {
        match self {
            Formula::Top => false,
            Formula::Pred(_, args) => args.iter().any(|t| matches!(t, Term::Const(d) if d == c)),
            Formula::And(l, r) => l.mentions_const(c) || r.mentions_const(c),
            Formula::Diam(f) | Formula::All(_, f) => f.mentions_const(c),
        }
    }

    /// Pre-order traversal.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Formula)) {
        f(self);
        match self {
            Formula::Top | Formula::Pred(..) => {}
            Formula::And(l, r) => {
                l.visit(f);
                r.visit(f);
            }
            Formula::Diam(g) | Formula::All(_, g) => g.visit(f),
        }
    }

    /// Unguarded substitution `φ[x:=t]`: replaces the free occurrences of `x`
    /// and stops at binders for `x`. Nothing is renamed, so a variable of `t`
    /// can be captured unless [`Formula::is_free_for`] holds.
    pub fn substitute(&self, x: VarName, t: &Term) -> Formula {
        match self {
            Formula::Top => Formula::Top,
            Formula::Pred(p, args) => {
                Formula::Pred(p.clone(), args.iter().map(|a| a.substitute(x, t)).collect())
            }
            Formula::And(l, r) => Formula::and(l.substitute(x, t), r.substitute(x, t)),
            Formula::Diam(f) => Formula::diam(f.substitute(x, t)),
            Formula::All(y, f) if *y == x => self.clone(),
            Formula::All(y, f) => Formula::all(*y, f.substitute(x, t)),
        }
    }

    /// `t` is free for `x` in `φ`: no free occurrence of `x` sits under a
    /// binder for a variable of `t`.
    pub fn is_free_for(&self, x: VarName, t: &Term) -> bool {
        let Term::Var(tv) = t else {
            return true;
        };
        self.free_for_var(x, *tv)
    }

    fn free_for_var(&self, x: VarName, tv: VarName) -> bool {
        match self {
            Formula::Top | Formula::Pred(..) => true,
            Formula::And(l, r) => l.free_for_var(x, tv) && r.free_for_var(x, tv),
            Formula::Diam(f) => f.free_for_var(x, tv),
            Formula::All(y, _) if *y == x => true,
            Formula::All(y, f) => {
                if *y == tv && f.has_free_var(x) {
                    false
                } else {
                    f.free_for_var(x, tv)
                }
            }
        }
    }

    pub fn check_well_formed(&self, sig: &Signature) -> Result<(), WellFormedError> {
        match self {
            Formula::Top => Ok(()),
            Formula::Pred(p, args) => {
                let expected = sig
                    .arity(p)
                    .ok_or_else(|| WellFormedError::UndeclaredPredicate(p.clone()))?;
                if expected != args.len() {
                    return Err(WellFormedError::ArityMismatch {
                        name: p.clone(),
                        expected,
                        found: args.len(),
                    });
                }
                for t in args {
                    if let Term::Const(c) = t {
                        if !sig.is_constant(c) {
                            return Err(WellFormedError::UndeclaredConstant(c.clone()));
                        }
                    }
                }
                Ok(())
            }
            Formula::And(l, r) => {
                l.check_well_formed(sig)?;
                r.check_well_formed(sig)
            }
            Formula::Diam(f) | Formula::All(_, f) => f.check_well_formed(sig),
        }
    }

    pub fn is_well_formed(&self, sig: &Signature) -> bool {
        self.check_well_formed(sig).is_ok()
    }

    /// Nesting depth of connectives; atoms and `⊤` have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Top | Formula::Pred(..) => 0,
            Formula::And(l, r) => 1 + l.depth().max(r.depth()),
            Formula::Diam(f) | Formula::All(_, f) => 1 + f.depth(),
        }
    }

    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }
}

/// `antecedent ⇝ consequent`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sequent {
    pub antecedent: Formula,
    pub consequent: Formula,
}

impl Sequent {
    pub fn new(antecedent: Formula, consequent: Formula) -> Self {
        Sequent {
            antecedent,
            consequent,
        }
    }

    pub fn free_vars(&self) -> BTreeSet<VarName> {
        let mut out = self.antecedent.free_vars();
        out.extend(self.consequent.free_vars());
        out
    }

    pub fn all_vars(&self) -> BTreeSet<VarName> {
        let mut out = self.antecedent.all_vars();
        out.extend(self.consequent.all_vars());
        out
    }

    pub fn constants(&self) -> BTreeSet<String> {
        let mut out = self.antecedent.constants();
        out.extend(self.consequent.constants());
        out
    }

    pub fn mentions_const(&self, c: &str) -> bool {
        self.antecedent.mentions_const(c) || self.consequent.mentions_const(c)
    }

    pub fn check_well_formed(&self, sig: &Signature) -> Result<(), WellFormedError> {
        self.antecedent.check_well_formed(sig)?;
        self.consequent.check_well_formed(sig)
    }

    pub fn is_well_formed(&self, sig: &Signature) -> bool {
        self.check_well_formed(sig).is_ok()
    }
}

/// Per-file mapping between identifiers and [`VarName`]s.
///
/// Identifiers get fresh numbers in order of first appearance. The spelling
/// `_N` always denotes variable `N` directly, which is also how variables
/// without a registered name are printed. Using `_N` reserves `N`, so later
/// identifiers never receive it; using it after `N` went to an identifier is
/// an error.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VarTable {
    by_name: BTreeMap<String, VarName>,
    by_id: BTreeMap<VarName, String>,
}

impl VarTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Looks up `name`, allocating the smallest unnamed number if it is new.
    /// Fails only for a raw `_N` whose number already belongs to an identifier.
    pub fn intern(&mut self, name: &str) -> Result<VarName, VarClash> {
        if let Some(&id) = self.by_name.get(name) {
            return Ok(id);
        }
        if let Some(id) = raw_var(name) {
            if let Some(owner) = self.by_id.get(&id) {
                return Err(VarClash {
                    raw: name.into(),
                    name: owner.clone(),
                });
            }
            self.bind(name, id);
            return Ok(id);
        }
        let mut next = 0;
        while self.by_id.contains_key(&VarName(next)) {
            next += 1;
        }
        self.bind(name, VarName(next));
        Ok(VarName(next))
    }

    /// Names `id` explicitly. Overwrites any previous binding of either side.
    pub fn bind(&mut self, name: &str, id: VarName) {
        if let Some(old) = self.by_id.remove(&id) {
            self.by_name.remove(&old);
        }
        if let Some(old) = self.by_name.remove(name) {
            self.by_id.remove(&old);
        }
        self.by_name.insert(name.into(), id);
        self.by_id.insert(id, name.into());
    }

    pub fn get(&self, name: &str) -> Option<VarName> {
        raw_var(name).or_else(|| self.by_name.get(name).copied())
    }

    pub fn name(&self, id: VarName) -> Option<&str> {
        self.by_id.get(&id).map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, VarName)> {
        self.by_name.iter().map(|(n, &v)| (n.as_str(), v))
    }
}

/// A raw variable spelling that denotes a number already given to an identifier.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("`{raw}` denotes the same variable as `{name}`")]
pub struct VarClash {
    pub raw: String,
    pub name: String,
}

fn raw_var(name: &str) -> Option<VarName> {
    let digits = name.strip_prefix('_')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok().map(VarName)
}

#[cfg(test)]
mod tests;
