use core::fmt;

use super::{Formula, Sequent, Term, VarName, VarTable};

pub struct TermDisplay<'a> {
    term: &'a Term,
    vars: Option<&'a VarTable>,
}

pub struct FormulaDisplay<'a> {
    formula: &'a Formula,
    vars: Option<&'a VarTable>,
}

pub struct SequentDisplay<'a> {
    sequent: &'a Sequent,
    vars: Option<&'a VarTable>,
}

fn write_var(f: &mut fmt::Formatter<'_>, x: VarName, vars: Option<&VarTable>) -> fmt::Result {
    match vars.and_then(|v| v.name(x)) {
        Some(name) => f.write_str(name),
        None => write!(f, "{x}"),
    }
}

impl fmt::Display for TermDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.term {
            Term::Var(x) => write_var(f, *x, self.vars),
            Term::Const(c) => f.write_str(c),
        }
    }
}

impl FormulaDisplay<'_> {
    fn child<'b>(&'b self, formula: &'b Formula) -> FormulaDisplay<'b> {
        FormulaDisplay {
            formula,
            vars: self.vars,
        }
    }

    // `&` is the only infix connective; prefix operators bind tighter.
    fn write_operand(&self, f: &mut fmt::Formatter<'_>, g: &Formula) -> fmt::Result {
        if matches!(g, Formula::And(..)) {
            write!(f, "({})", self.child(g))
        } else {
            write!(f, "{}", self.child(g))
        }
    }
}

impl fmt::Display for FormulaDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.formula {
            Formula::Top => f.write_str("T"),
            Formula::Pred(p, args) => {
                f.write_str(p)?;
                if !args.is_empty() {
                    f.write_str("(")?;
                    for (i, t) in args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(", ")?;
                        }
                        write!(f, "{}", t.display(self.vars))?;
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
            Formula::And(l, r) => {
                write!(f, "{} & ", self.child(l))?;
                self.write_operand(f, r)
            }
            Formula::Diam(g) => {
                f.write_str("<> ")?;
                self.write_operand(f, g)
            }
            Formula::All(x, g) => {
                f.write_str("A ")?;
                write_var(f, *x, self.vars)?;
                f.write_str(" . ")?;
                self.write_operand(f, g)
            }
        }
    }
}

impl fmt::Display for SequentDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} ~> {}",
            self.sequent.antecedent.display(self.vars),
            self.sequent.consequent.display(self.vars)
        )
    }
}

impl Term {
    pub fn display<'a>(&'a self, vars: Option<&'a VarTable>) -> TermDisplay<'a> {
        TermDisplay { term: self, vars }
    }
}

impl Formula {
    /// Renders in the ASCII grammar accepted by [`super::parse_formula`].
    pub fn display<'a>(&'a self, vars: Option<&'a VarTable>) -> FormulaDisplay<'a> {
        FormulaDisplay {
            formula: self,
            vars,
        }
    }
}

impl Sequent {
    pub fn display<'a>(&'a self, vars: Option<&'a VarTable>) -> SequentDisplay<'a> {
        SequentDisplay {
            sequent: self,
            vars,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.display(None).fmt(f)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.display(None).fmt(f)
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.display(None).fmt(f)
    }
}
