//! Seeded random formulas, assignments and derivations for property tests.
//!
//! Derivations are grown from the rules themselves, so every tree produced here
//! passes [`crate::calculus::check`]; the soundness harness then evaluates its
//! conclusion on random models.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::calculus::{derived, Derivation, RuleTag};
use crate::language::{Formula, Sequent, Signature, Term, VarName};
use crate::semantics::{Assignment, RawModel, World};

/// Shape of generated formulas.
#[derive(Clone, Debug)]
pub struct FormulaGen {
    pub sig: Signature,
    /// Variables are drawn from `0..vars`.
    pub vars: u32,
    pub max_depth: usize,
}

impl FormulaGen {
    pub fn new(sig: &Signature, vars: u32, max_depth: usize) -> Self {
        FormulaGen {
            sig: sig.clone(),
            vars,
            max_depth,
        }
    }

    pub fn var<R: Rng>(&self, rng: &mut R) -> VarName {
        VarName(rng.gen_range(0..self.vars.max(1)))
    }

    pub fn term<R: Rng>(&self, rng: &mut R) -> Term {
        let consts: Vec<&str> = self.sig.constants().collect();
        if !consts.is_empty() && rng.gen_bool(0.3) {
            Term::constant(consts.choose(rng).unwrap())
        } else {
            Term::Var(self.var(rng))
        }
    }

    pub fn atom<R: Rng>(&self, rng: &mut R) -> Formula {
        let preds: Vec<(&str, usize)> = self.sig.predicates().collect();
        match preds.choose(rng) {
            Some(&(p, arity)) if rng.gen_bool(0.85) => {
                Formula::pred(p, (0..arity).map(|_| self.term(rng)).collect())
            }
            _ => Formula::Top,
        }
    }

    pub fn formula<R: Rng>(&self, rng: &mut R) -> Formula {
        let depth = rng.gen_range(0..=self.max_depth);
        self.formula_of_depth(rng, depth)
    }

    /// A formula of depth at most `depth`.
    pub fn formula_of_depth<R: Rng>(&self, rng: &mut R, depth: usize) -> Formula {
        if depth == 0 || rng.gen_bool(0.15) {
            return self.atom(rng);
        }
        match rng.gen_range(0..3) {
            0 => Formula::and(
                self.formula_of_depth(rng, depth - 1),
                self.formula_of_depth(rng, depth - 1),
            ),
            1 => Formula::diam(self.formula_of_depth(rng, depth - 1)),
            _ => Formula::all(self.var(rng), self.formula_of_depth(rng, depth - 1)),
        }
    }

    /// A term that is free for `x` in every formula of `fs`, if one turns up.
    fn free_term<R: Rng>(&self, rng: &mut R, x: VarName, fs: &[&Formula]) -> Option<Term> {
        (0..8)
            .map(|_| self.term(rng))
            .find(|t| fs.iter().all(|f| f.is_free_for(x, t)))
    }
}

/// A random assignment at `w` whose overrides cover `0..vars`.
pub fn random_assignment<R: Rng>(rng: &mut R, m: &RawModel, w: World, vars: u32) -> Assignment {
    let size = m.domain_size(w);
    let mut g = Assignment::new(m, w, rng.gen_range(0..size)).expect("nonempty domain");
    for x in 0..vars {
        if rng.gen_bool(0.7) {
            g.bind(m, VarName(x), rng.gen_range(0..size))
                .expect("in range");
        }
    }
    g
}

/// Random well-formed derivations.
#[derive(Clone, Debug)]
pub struct DerivationGen {
    pub formulas: FormulaGen,
    /// Budget for nested rule applications below the root.
    pub max_height: usize,
}

impl DerivationGen {
    pub fn new(formulas: FormulaGen, max_height: usize) -> Self {
        DerivationGen {
            formulas,
            max_height,
        }
    }

    /// A derivation whose last step is `rule`.
    pub fn rooted_at<R: Rng>(&self, rng: &mut R, rule: RuleTag) -> Derivation {
        let f = &self.formulas;
        let h = self.max_height;
        match rule {
            RuleTag::Top => Derivation::Top {
                antecedent: f.formula(rng),
            },
            RuleTag::Refl => Derivation::Refl {
                formula: f.formula(rng),
            },
            RuleTag::AndEl => Derivation::AndEl {
                left: f.formula(rng),
                right: f.formula(rng),
            },
            RuleTag::AndEr => Derivation::AndEr {
                left: f.formula(rng),
                right: f.formula(rng),
            },
            RuleTag::Trans => Derivation::Trans {
                formula: f.formula(rng),
            },
            RuleTag::AndI => {
                let lhs = f.formula(rng);
                Derivation::AndI {
                    left: Box::new(self.from(rng, &lhs, h)),
                    right: Box::new(self.from(rng, &lhs, h)),
                }
            }
            RuleTag::Cut => {
                let lhs = f.formula(rng);
                let left = self.from(rng, &lhs, h);
                let mid = left.conclusion().consequent;
                Derivation::Cut {
                    left: Box::new(left),
                    right: Box::new(self.from(rng, &mid, h)),
                }
            }
            RuleTag::Nec => {
                let lhs = f.formula(rng);
                Derivation::Nec {
                    premise: Box::new(self.from(rng, &lhs, h)),
                }
            }
            RuleTag::AllIr => {
                let lhs = f.formula(rng);
                let premise = self.from(rng, &lhs, h);
                Derivation::AllIr {
                    var: self.var_not_free(rng, &lhs),
                    premise: Box::new(premise),
                }
            }
            RuleTag::AllIl => {
                let body = f.formula(rng);
                let var = f.var(rng);
                let term = f.free_term(rng, var, &[&body]).unwrap_or(Term::Var(var));
                let instance = body.substitute(var, &term);
                Derivation::AllIl {
                    var,
                    term,
                    body,
                    premise: Box::new(self.from(rng, &instance, h)),
                }
            }
            RuleTag::TermI => {
                let lhs = f.formula(rng);
                let premise = self.from(rng, &lhs, h);
                let s = premise.conclusion();
                let var = f.var(rng);
                let term = f
                    .free_term(rng, var, &[&s.antecedent, &s.consequent])
                    .unwrap_or(Term::Var(var));
                Derivation::TermI {
                    var,
                    term,
                    premise: Box::new(premise),
                }
            }
            RuleTag::ConstE => self.const_elimination(rng),
        }
    }

    /// Proves `φ[x:=c] ⇝ ψ[x:=c]` for some `c` of the signature, then abstracts
    /// every occurrence of `c` into a variable `x` unused by the sequent.
    fn const_elimination<R: Rng>(&self, rng: &mut R) -> Derivation {
        let consts: Vec<String> = self.formulas.sig.constants().map(String::from).collect();
        let lhs = self.formulas.formula(rng);
        let premise = self.from(rng, &lhs, self.max_height);
        let s = premise.conclusion();
        let constant = match consts.choose(rng) {
            Some(c) => c.clone(),
            // No constants to eliminate: use a name outside the signature,
            // which cannot occur in the sequent.
            None => String::from("_c"),
        };
        let var = fresh_var(&s, self.formulas.vars);
        Derivation::ConstE {
            var,
            antecedent: abstract_const(&s.antecedent, &constant, var),
            consequent: abstract_const(&s.consequent, &constant, var),
            constant,
            premise: Box::new(premise),
        }
    }

    fn var_not_free<R: Rng>(&self, rng: &mut R, f: &Formula) -> VarName {
        let fv = f.free_vars();
        let mut candidates: Vec<VarName> = (0..self.formulas.vars)
            .map(VarName)
            .filter(|x| !fv.contains(x))
            .collect();
        candidates.shuffle(rng);
        candidates
            .first()
            .copied()
            .unwrap_or(VarName(self.formulas.vars))
    }

    /// A random derivation with antecedent `lhs`.
    pub fn from<R: Rng>(&self, rng: &mut R, lhs: &Formula, height: usize) -> Derivation {
        let mut options: Vec<u8> = alloc::vec![0, 1];
        if let Formula::And(..) = lhs {
            options.extend([2, 3]);
        }
        if let Formula::Diam(inner) = lhs {
            if let Formula::Diam(_) = **inner {
                options.push(4);
            }
        }
        if height > 0 {
            options.extend([5, 6, 9]);
            match lhs {
                Formula::Diam(_) => options.extend([7, 7]),
                Formula::All(..) => options.extend([8, 8]),
                _ => {}
            }
        }
        let h = height.saturating_sub(1);
        match *options.choose(rng).unwrap() {
            0 => Derivation::Top {
                antecedent: lhs.clone(),
            },
            1 => Derivation::Refl {
                formula: lhs.clone(),
            },
            k @ (2 | 3) => {
                let Formula::And(l, r) = lhs else {
                    unreachable!()
                };
                let (left, right) = ((**l).clone(), (**r).clone());
                if k == 2 {
                    Derivation::AndEl { left, right }
                } else {
                    Derivation::AndEr { left, right }
                }
            }
            4 => {
                let Formula::Diam(inner) = lhs else {
                    unreachable!()
                };
                let Formula::Diam(core) = &**inner else {
                    unreachable!()
                };
                Derivation::Trans {
                    formula: (**core).clone(),
                }
            }
            5 => Derivation::AndI {
                left: Box::new(self.from(rng, lhs, h)),
                right: Box::new(self.from(rng, lhs, h)),
            },
            6 => {
                let left = self.from(rng, lhs, h);
                let mid = left.conclusion().consequent;
                Derivation::Cut {
                    left: Box::new(left),
                    right: Box::new(self.from(rng, &mid, h)),
                }
            }
            7 => {
                let Formula::Diam(inner) = lhs else {
                    unreachable!()
                };
                Derivation::Nec {
                    premise: Box::new(self.from(rng, inner, h)),
                }
            }
            8 => {
                let Formula::All(var, body) = lhs else {
                    unreachable!()
                };
                let term = self
                    .formulas
                    .free_term(rng, *var, &[body])
                    .unwrap_or(Term::Var(*var));
                let instance = body.substitute(*var, &term);
                Derivation::AllIl {
                    var: *var,
                    term,
                    body: (**body).clone(),
                    premise: Box::new(self.from(rng, &instance, h)),
                }
            }
            _ => {
                let premise = self.from(rng, lhs, h);
                Derivation::AllIr {
                    var: self.var_not_free(rng, lhs),
                    premise: Box::new(premise),
                }
            }
        }
    }
}

/// The smallest variable below `preferred` that does not occur in `s` at all,
/// or the first one above every variable of `s`.
pub fn fresh_var(s: &Sequent, preferred: u32) -> VarName {
    let used = s.all_vars();
    (0..preferred)
        .map(VarName)
        .find(|x| !used.contains(x))
        .unwrap_or_else(|| {
            VarName(
                used.iter()
                    .map(|v| v.0 + 1)
                    .max()
                    .unwrap_or(0)
                    .max(preferred),
            )
        })
}

/// Replaces every occurrence of the constant `c` by the variable `x`.
pub fn abstract_const(f: &Formula, c: &str, x: VarName) -> Formula {
    match f {
        Formula::Top => Formula::Top,
        Formula::Pred(p, args) => Formula::Pred(
            p.clone(),
            args.iter()
                .map(|t| match t {
                    Term::Const(d) if d == c => Term::Var(x),
                    other => other.clone(),
                })
                .collect(),
        ),
        Formula::And(l, r) => Formula::and(abstract_const(l, c, x), abstract_const(r, c, x)),
        Formula::Diam(g) => Formula::diam(abstract_const(g, c, x)),
        Formula::All(y, g) => Formula::all(*y, abstract_const(g, c, x)),
    }
}

/// The six derived rules, by name.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DerivedRule {
    AllComm,
    AllSub,
    DiamAll,
    AlphaConversion,
    TermIr,
    ConstAllIr,
}

impl DerivedRule {
    pub const ALL: [DerivedRule; 6] = [
        DerivedRule::AllComm,
        DerivedRule::AllSub,
        DerivedRule::DiamAll,
        DerivedRule::AlphaConversion,
        DerivedRule::TermIr,
        DerivedRule::ConstAllIr,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DerivedRule::AllComm => "AllC",
            DerivedRule::AllSub => "All_sub",
            DerivedRule::DiamAll => "Diam_All",
            DerivedRule::AlphaConversion => "alphaconversion",
            DerivedRule::TermIr => "TermIr",
            DerivedRule::ConstAllIr => "Const_AllIr",
        }
    }
}

/// A random instance of a derived rule: the built derivation together with the
/// sequent the builder advertises for it.
pub fn derived_instance<R: Rng>(
    rng: &mut R,
    gen: &DerivationGen,
    rule: DerivedRule,
) -> (Derivation, Sequent) {
    let f = &gen.formulas;
    loop {
        let phi = f.formula(rng);
        let x = f.var(rng);
        let y = f.var(rng);
        let built = match rule {
            DerivedRule::AllComm => {
                let expected = Sequent::new(
                    Formula::all(x, Formula::all(y, phi.clone())),
                    Formula::all(y, Formula::all(x, phi.clone())),
                );
                Some((derived::all_comm(&phi, x, y), expected))
            }
            DerivedRule::AllSub => {
                let t = f.term(rng);
                derived::all_sub(&phi, x, &t).ok().map(|d| {
                    (
                        d,
                        Sequent::new(Formula::all(x, phi.clone()), phi.substitute(x, &t)),
                    )
                })
            }
            DerivedRule::DiamAll => {
                let expected = Sequent::new(
                    Formula::diam(Formula::all(x, phi.clone())),
                    Formula::all(x, Formula::diam(phi.clone())),
                );
                Some((derived::diam_all(&phi, x), expected))
            }
            DerivedRule::AlphaConversion => derived::alpha_conversion(&phi, x, y).ok().map(|d| {
                (
                    d,
                    Sequent::new(
                        Formula::all(x, phi.clone()),
                        Formula::all(y, phi.substitute(x, &Term::Var(y))),
                    ),
                )
            }),
            DerivedRule::TermIr => {
                let premise = gen.from(rng, &phi, gen.max_height);
                let s = premise.conclusion();
                let t = f.term(rng);
                derived::term_ir(premise, x, &t).ok().map(|d| {
                    (
                        d,
                        Sequent::new(s.antecedent.clone(), s.consequent.substitute(x, &t)),
                    )
                })
            }
            DerivedRule::ConstAllIr => {
                let consts: Vec<&str> = f.sig.constants().collect();
                let Some(&c) = consts.choose(rng) else {
                    continue;
                };
                let premise = gen.from(rng, &phi, gen.max_height);
                let s = premise.conclusion();
                // ψ[x:=c] = s.consequent with ψ free of c.
                let psi = abstract_const(&s.consequent, c, x);
                if psi.substitute(x, &Term::constant(c)) != s.consequent {
                    continue;
                }
                derived::const_all_ir(premise, &psi, x, c).ok().map(|d| {
                    (
                        d,
                        Sequent::new(s.antecedent.clone(), Formula::all(x, psi.clone())),
                    )
                })
            }
        };
        if let Some(out) = built {
            return out;
        }
    }
}
