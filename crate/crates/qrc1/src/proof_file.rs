//! JSON proof files (`.qpf`).
//!
//! ```json
//! {
//!   "signature": { "predicates": { "P": 1 } },
//!   "proof": { "rule": "Trans", "params": { "phi": "P(x)" }, "premises": [] }
//! }
//! ```
//!
//! Parameters by rule:
//!
//! | rule | params |
//! |------|--------|
//! | `Top`, `Refl`, `Trans` | `phi` |
//! | `AndEl`, `AndEr` | `phi`, `psi` (the two conjuncts) |
//! | `AndI`, `Cut`, `Nec` | none |
//! | `AllIr` | `x` |
//! | `AllIl` | `x`, `t`, `phi` (the body of `∀x φ`) |
//! | `TermI` | `x`, `t` |
//! | `ConstE` | `x`, `c`, `phi`, `psi` (the conclusion) |
//!
//! Formulas use the text syntax of `qrc1_core::language`. Every identifier that
//! is not a declared constant is a variable, and one variable table is shared
//! by the whole file.

use std::collections::BTreeSet;

use qrc1_core::language::{parse_formula, parse_term, ParseError, SignatureError};
use qrc1_core::{Derivation, Formula, RuleTag, Signature, Term, VarName, VarTable};
use serde::{Deserialize, Serialize};

use crate::SignatureFile;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProofFile {
    #[serde(default)]
    pub signature: SignatureFile,
    pub proof: Node,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Node {
    pub rule: String,
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub premises: Vec<Node>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<String>,
}

/// Position of a node as premise indices from the root, printed `/0/1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodePath(pub Vec<usize>);

impl std::fmt::Display for NodePath {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0.is_empty() {
            return f.write_str("/");
        }
        for i in &self.0 {
            write!(f, "/{i}")?;
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ProofFileError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("signature: {0}")]
    Signature(#[from] SignatureError),
    #[error("node {path}: unknown rule `{rule}`")]
    UnknownRule { path: NodePath, rule: String },
    #[error("node {path}: rule {rule} needs parameter `{param}`")]
    MissingParam {
        path: NodePath,
        rule: RuleTag,
        param: &'static str,
    },
    #[error("node {path}: rule {rule} takes no parameter `{param}`")]
    UnexpectedParam {
        path: NodePath,
        rule: RuleTag,
        param: &'static str,
    },
    #[error("node {path}: rule {rule} takes {expected} premises, found {found}")]
    PremiseCount {
        path: NodePath,
        rule: RuleTag,
        expected: usize,
        found: usize,
    },
    #[error("node {path}: parameter `{param}`: {error}")]
    Parse {
        path: NodePath,
        param: &'static str,
        error: ParseError,
    },
    #[error("node {path}: parameter `{param}` must be a variable")]
    NotAVariable { path: NodePath, param: &'static str },
    #[error("node {path}: `{name}` is not a declared constant")]
    UnknownConstant { path: NodePath, name: String },
}

/// A decoded proof file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoadedProof {
    pub signature: Signature,
    pub vars: VarTable,
    pub derivation: Derivation,
}

impl ProofFile {
    pub fn parse(text: &str) -> Result<LoadedProof, ProofFileError> {
        serde_json::from_str::<ProofFile>(text)?.decode()
    }

    pub fn decode(&self) -> Result<LoadedProof, ProofFileError> {
        let signature = self.signature.to_signature()?;
        let mut decoder = Decoder {
            sig: &signature,
            vars: VarTable::new(),
            path: Vec::new(),
        };
        let derivation = decoder.node(&self.proof)?;
        let vars = decoder.vars;
        Ok(LoadedProof {
            signature,
            vars,
            derivation,
        })
    }

    /// Encodes a derivation. Variables without a name in `vars` are given one.
    pub fn encode(d: &Derivation, sig: &Signature, vars: &VarTable) -> ProofFile {
        let vars = name_all(d, sig, vars);
        ProofFile {
            signature: SignatureFile::from_signature(sig),
            proof: encode_node(d, &vars),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("proof files always serialize")
    }
}

struct Decoder<'a> {
    sig: &'a Signature,
    vars: VarTable,
    path: Vec<usize>,
}

impl Decoder<'_> {
    fn path(&self) -> NodePath {
        NodePath(self.path.clone())
    }

    fn node(&mut self, n: &Node) -> Result<Derivation, ProofFileError> {
        let rule = RuleTag::from_name(&n.rule).ok_or_else(|| ProofFileError::UnknownRule {
            path: self.path(),
            rule: n.rule.clone(),
        })?;
        if n.premises.len() != rule.arity() {
            return Err(ProofFileError::PremiseCount {
                path: self.path(),
                rule,
                expected: rule.arity(),
                found: n.premises.len(),
            });
        }
        let wanted: &[&str] = match rule {
            RuleTag::Top | RuleTag::Refl | RuleTag::Trans => &["phi"],
            RuleTag::AndEl | RuleTag::AndEr => &["phi", "psi"],
            RuleTag::AndI | RuleTag::Cut | RuleTag::Nec => &[],
            RuleTag::AllIr => &["x"],
            RuleTag::AllIl => &["x", "t", "phi"],
            RuleTag::TermI => &["x", "t"],
            RuleTag::ConstE => &["x", "c", "phi", "psi"],
        };
        let p = &n.params;
        for (param, present) in [
            ("phi", p.phi.is_some()),
            ("psi", p.psi.is_some()),
            ("x", p.x.is_some()),
            ("t", p.t.is_some()),
            ("c", p.c.is_some()),
        ] {
            if present && !wanted.contains(&param) {
                return Err(ProofFileError::UnexpectedParam {
                    path: self.path(),
                    rule,
                    param,
                });
            }
        }

        // Parameters are read before premises so variable numbering follows
        // the order of the file.
        let d = match rule {
            RuleTag::Top => Derivation::Top {
                antecedent: self.formula(rule, "phi", &p.phi)?,
            },
            RuleTag::Refl => Derivation::Refl {
                formula: self.formula(rule, "phi", &p.phi)?,
            },
            RuleTag::Trans => Derivation::Trans {
                formula: self.formula(rule, "phi", &p.phi)?,
            },
            RuleTag::AndEl => Derivation::AndEl {
                left: self.formula(rule, "phi", &p.phi)?,
                right: self.formula(rule, "psi", &p.psi)?,
            },
            RuleTag::AndEr => Derivation::AndEr {
                left: self.formula(rule, "phi", &p.phi)?,
                right: self.formula(rule, "psi", &p.psi)?,
            },
            RuleTag::AndI => {
                let (left, right) = self.two(&n.premises)?;
                Derivation::AndI { left, right }
            }
            RuleTag::Cut => {
                let (left, right) = self.two(&n.premises)?;
                Derivation::Cut { left, right }
            }
            RuleTag::Nec => Derivation::Nec {
                premise: self.one(&n.premises)?,
            },
            RuleTag::AllIr => {
                let var = self.var(rule, &p.x)?;
                Derivation::AllIr {
                    var,
                    premise: self.one(&n.premises)?,
                }
            }
            RuleTag::AllIl => {
                let var = self.var(rule, &p.x)?;
                let term = self.term(rule, &p.t)?;
                let body = self.formula(rule, "phi", &p.phi)?;
                Derivation::AllIl {
                    var,
                    term,
                    body,
                    premise: self.one(&n.premises)?,
                }
            }
            RuleTag::TermI => {
                let var = self.var(rule, &p.x)?;
                let term = self.term(rule, &p.t)?;
                Derivation::TermI {
                    var,
                    term,
                    premise: self.one(&n.premises)?,
                }
            }
            RuleTag::ConstE => {
                let var = self.var(rule, &p.x)?;
                let constant = self.required(rule, "c", &p.c)?.trim().to_string();
                if !self.sig.is_constant(&constant) {
                    return Err(ProofFileError::UnknownConstant {
                        path: self.path(),
                        name: constant,
                    });
                }
                Derivation::ConstE {
                    var,
                    constant,
                    antecedent: self.formula(rule, "phi", &p.phi)?,
                    consequent: self.formula(rule, "psi", &p.psi)?,
                    premise: self.one(&n.premises)?,
                }
            }
        };
        Ok(d)
    }

    fn premise(&mut self, i: usize, n: &Node) -> Result<Box<Derivation>, ProofFileError> {
        self.path.push(i);
        let d = self.node(n);
        self.path.pop();
        d.map(Box::new)
    }

    fn one(&mut self, ps: &[Node]) -> Result<Box<Derivation>, ProofFileError> {
        self.premise(0, &ps[0])
    }

    fn two(&mut self, ps: &[Node]) -> Result<(Box<Derivation>, Box<Derivation>), ProofFileError> {
        Ok((self.premise(0, &ps[0])?, self.premise(1, &ps[1])?))
    }

    fn required<'s>(
        &self,
        rule: RuleTag,
        param: &'static str,
        value: &'s Option<String>,
    ) -> Result<&'s str, ProofFileError> {
        value
            .as_deref()
            .ok_or_else(|| ProofFileError::MissingParam {
                path: self.path(),
                rule,
                param,
            })
    }

    fn formula(
        &mut self,
        rule: RuleTag,
        param: &'static str,
        value: &Option<String>,
    ) -> Result<Formula, ProofFileError> {
        let text = self.required(rule, param, value)?;
        parse_formula(text, self.sig, &mut self.vars).map_err(|error| ProofFileError::Parse {
            path: self.path(),
            param,
            error,
        })
    }

    fn term(&mut self, rule: RuleTag, value: &Option<String>) -> Result<Term, ProofFileError> {
        let text = self.required(rule, "t", value)?;
        parse_term(text, self.sig, &mut self.vars).map_err(|error| ProofFileError::Parse {
            path: self.path(),
            param: "t",
            error,
        })
    }

    fn var(&mut self, rule: RuleTag, value: &Option<String>) -> Result<VarName, ProofFileError> {
        match self.term(rule, value) {
            Ok(Term::Var(x)) => Ok(x),
            Ok(Term::Const(_)) => Err(ProofFileError::NotAVariable {
                path: self.path(),
                param: "x",
            }),
            Err(ProofFileError::Parse { error, .. }) => Err(ProofFileError::Parse {
                path: self.path(),
                param: "x",
                error,
            }),
            Err(e) => Err(e),
        }
    }
}

fn encode_node(d: &Derivation, vars: &VarTable) -> Node {
    let f = |phi: &Formula| Some(phi.display(Some(vars)).to_string());
    let v = |x: &VarName| Some(Term::Var(*x).display(Some(vars)).to_string());
    let t = |t: &Term| Some(t.display(Some(vars)).to_string());
    let params = match d {
        Derivation::Top { antecedent: phi }
        | Derivation::Refl { formula: phi }
        | Derivation::Trans { formula: phi } => Params {
            phi: f(phi),
            ..Params::default()
        },
        Derivation::AndEl { left, right } | Derivation::AndEr { left, right } => Params {
            phi: f(left),
            psi: f(right),
            ..Params::default()
        },
        Derivation::AndI { .. } | Derivation::Cut { .. } | Derivation::Nec { .. } => {
            Params::default()
        }
        Derivation::AllIr { var, .. } => Params {
            x: v(var),
            ..Params::default()
        },
        Derivation::AllIl {
            var, term, body, ..
        } => Params {
            x: v(var),
            t: t(term),
            phi: f(body),
            ..Params::default()
        },
        Derivation::TermI { var, term, .. } => Params {
            x: v(var),
            t: t(term),
            ..Params::default()
        },
        Derivation::ConstE {
            var,
            constant,
            antecedent,
            consequent,
            ..
        } => Params {
            x: v(var),
            c: Some(constant.clone()),
            phi: f(antecedent),
            psi: f(consequent),
            ..Params::default()
        },
    };
    Node {
        rule: d.tag().name().into(),
        params,
        premises: d
            .premises()
            .into_iter()
            .map(|p| encode_node(p, vars))
            .collect(),
    }
}

/// Every variable a derivation mentions, in any parameter.
pub fn derivation_vars(d: &Derivation) -> BTreeSet<VarName> {
    let mut out = BTreeSet::new();
    for (_, node) in d.nodes() {
        match node {
            Derivation::Top { antecedent: f }
            | Derivation::Refl { formula: f }
            | Derivation::Trans { formula: f } => out.extend(f.all_vars()),
            Derivation::AndEl { left, right } | Derivation::AndEr { left, right } => {
                out.extend(left.all_vars());
                out.extend(right.all_vars());
            }
            Derivation::AndI { .. } | Derivation::Cut { .. } | Derivation::Nec { .. } => {}
            Derivation::AllIr { var, .. } => {
                out.insert(*var);
            }
            Derivation::AllIl {
                var, term, body, ..
            } => {
                out.insert(*var);
                out.extend(term.free_vars());
                out.extend(body.all_vars());
            }
            Derivation::TermI { var, term, .. } => {
                out.insert(*var);
                out.extend(term.free_vars());
            }
            Derivation::ConstE {
                var,
                antecedent,
                consequent,
                ..
            } => {
                out.insert(*var);
                out.extend(antecedent.all_vars());
                out.extend(consequent.all_vars());
            }
        }
    }
    out
}

fn is_raw(name: &str) -> bool {
    name.strip_prefix('_')
        .is_some_and(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
}

/// Extends `vars` with readable names for every unnamed variable of `d`.
/// Names avoid the signature, keywords and each other.
pub fn name_all(d: &Derivation, sig: &Signature, vars: &VarTable) -> VarTable {
    let mut out = vars.clone();
    let taken = |out: &VarTable, name: &str| {
        out.get(name).is_some()
            || sig.is_constant(name)
            || sig.arity(name).is_some()
            || ["T", "A", "const", "pred"].contains(&name)
    };
    let mut candidates = ["x", "y", "z", "u", "v", "w"]
        .into_iter()
        .map(String::from)
        .chain((1..).map(|i| format!("v{i}")));
    for x in derivation_vars(d) {
        // Raw `_N` spellings are renamed too: they would clash with
        // identifiers numbered afresh when the file is read back.
        if out.name(x).is_some_and(|n| !is_raw(n)) {
            continue;
        }
        let name = candidates
            .by_ref()
            .find(|n| !taken(&out, n))
            .expect("unbounded supply of names");
        out.bind(&name, x);
    }
    out
}
