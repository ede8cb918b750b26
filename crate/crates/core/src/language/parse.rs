//! Recursive-descent parser for the ASCII syntax.
//!
//! ```text
//! problem  := decl* sequent
//! decl     := "const" ident "." | "pred" ident "/" number "."
//! sequent  := formula "~>" formula
//! formula  := unary ("&" unary)*
//! unary    := "<>" unary | "A" ident "." unary | atom
//! atom     := "T" | "(" formula ")" | ident [ "(" [term ("," term)*] ")" ]
//! term     := ident
//! ```
//!
//! A term identifier is a constant when the signature declares it and a
//! variable otherwise.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use super::{Formula, Sequent, Signature, SignatureError, Term, VarClash, VarName, VarTable};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Unexpected {
        found: String,
        expected: &'static str,
    },
    UnexpectedEnd {
        expected: &'static str,
    },
    InvalidCharacter(char),
    UndeclaredPredicate(String),
    ArityMismatch {
        name: String,
        expected: usize,
        found: usize,
    },
    ConstantAsBinder(String),
    ReservedName(String),
    VariableClash(VarClash),
    Signature(SignatureError),
}

/// A parse failure with a 1-based line and column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: ", self.line, self.column)?;
        match &self.kind {
            ParseErrorKind::Unexpected { found, expected } => {
                write!(f, "expected {expected}, found `{found}`")
            }
            ParseErrorKind::UnexpectedEnd { expected } => {
                write!(f, "expected {expected}, found end of input")
            }
            ParseErrorKind::InvalidCharacter(c) => write!(f, "invalid character `{c}`"),
            ParseErrorKind::UndeclaredPredicate(p) => write!(f, "undeclared predicate `{p}`"),
            ParseErrorKind::ArityMismatch {
                name,
                expected,
                found,
            } => write!(
                f,
                "predicate `{name}` has arity {expected} but is applied to {found} terms"
            ),
            ParseErrorKind::ConstantAsBinder(c) => {
                write!(f, "constant `{c}` cannot be bound by a quantifier")
            }
            ParseErrorKind::ReservedName(n) => write!(f, "`{n}` is a reserved word"),
            ParseErrorKind::VariableClash(e) => write!(f, "{e}"),
            ParseErrorKind::Signature(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for ParseError {}

/// A sequent together with the declarations and variable names it was read with.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Problem {
    pub signature: Signature,
    pub vars: VarTable,
    pub sequent: Sequent,
}

pub fn parse_formula(
    text: &str,
    sig: &Signature,
    vars: &mut VarTable,
) -> Result<Formula, ParseError> {
    let mut p = Parser::new(text, SigMode::Fixed(sig), vars)?;
    let f = p.formula()?;
    p.finish()?;
    Ok(f)
}

pub fn parse_sequent(
    text: &str,
    sig: &Signature,
    vars: &mut VarTable,
) -> Result<Sequent, ParseError> {
    let mut p = Parser::new(text, SigMode::Fixed(sig), vars)?;
    let s = p.sequent()?;
    p.finish()?;
    Ok(s)
}

pub fn parse_term(text: &str, sig: &Signature, vars: &mut VarTable) -> Result<Term, ParseError> {
    let mut p = Parser::new(text, SigMode::Fixed(sig), vars)?;
    let t = p.term()?;
    p.finish()?;
    Ok(t)
}

/// Parses `const`/`pred` declarations followed by a sequent. Predicates that
/// are used without a declaration are added with the arity of their first use.
pub fn parse_problem(text: &str) -> Result<Problem, ParseError> {
    let mut signature = Signature::new();
    let mut vars = VarTable::new();
    let sequent = {
        let mut p = Parser::new(text, SigMode::Inferring(&mut signature), &mut vars)?;
        p.declarations()?;
        let s = p.sequent()?;
        p.finish()?;
        s
    };
    Ok(Problem {
        signature,
        vars,
        sequent,
    })
}

const KEYWORDS: [&str; 4] = ["T", "A", "const", "pred"];

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Number(usize),
    LParen,
    RParen,
    Comma,
    Amp,
    Diamond,
    Dot,
    Slash,
    LeadsTo,
}

impl Tok {
    fn text(&self) -> String {
        match self {
            Tok::Ident(s) => s.clone(),
            Tok::Number(n) => n.to_string(),
            Tok::LParen => "(".into(),
            Tok::RParen => ")".into(),
            Tok::Comma => ",".into(),
            Tok::Amp => "&".into(),
            Tok::Diamond => "<>".into(),
            Tok::Dot => ".".into(),
            Tok::Slash => "/".into(),
            Tok::LeadsTo => "~>".into(),
        }
    }
}

#[derive(Clone, Copy)]
struct Pos {
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<(Vec<(Tok, Pos)>, Pos), ParseError> {
    let mut out = Vec::new();
    let mut line = 1;
    let mut column = 1;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let pos = Pos { line, column };
        let err = |kind| ParseError {
            kind,
            line: pos.line,
            column: pos.column,
        };
        if c == '\n' {
            chars.next();
            line += 1;
            column = 1;
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            column += 1;
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&d) = chars.peek() {
                if d.is_ascii_alphanumeric() || d == '_' || d == '\'' {
                    s.push(d);
                    chars.next();
                    column += 1;
                } else {
                    break;
                }
            }
            out.push((Tok::Ident(s), pos));
            continue;
        }
        if c.is_ascii_digit() {
            let mut n: usize = 0;
            while let Some(&d) = chars.peek() {
                let Some(v) = d.to_digit(10) else { break };
                n = n
                    .checked_mul(10)
                    .and_then(|n| n.checked_add(v as usize))
                    .ok_or_else(|| err(ParseErrorKind::InvalidCharacter(d)))?;
                chars.next();
                column += 1;
            }
            out.push((Tok::Number(n), pos));
            continue;
        }
        chars.next();
        column += 1;
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            '&' => Tok::Amp,
            '.' => Tok::Dot,
            '/' => Tok::Slash,
            '<' if chars.peek() == Some(&'>') => {
                chars.next();
                column += 1;
                Tok::Diamond
            }
            '~' if chars.peek() == Some(&'>') => {
                chars.next();
                column += 1;
                Tok::LeadsTo
            }
            other => return Err(err(ParseErrorKind::InvalidCharacter(other))),
        };
        out.push((tok, pos));
    }
    Ok((out, Pos { line, column }))
}

enum SigMode<'a> {
    Fixed(&'a Signature),
    Inferring(&'a mut Signature),
}

impl SigMode<'_> {
    fn sig(&self) -> &Signature {
        match self {
            SigMode::Fixed(s) => s,
            SigMode::Inferring(s) => s,
        }
    }
}

struct Parser<'a> {
    toks: Vec<(Tok, Pos)>,
    end: Pos,
    at: usize,
    sig: SigMode<'a>,
    vars: &'a mut VarTable,
}

impl<'a> Parser<'a> {
    fn new(text: &str, sig: SigMode<'a>, vars: &'a mut VarTable) -> Result<Self, ParseError> {
        let (toks, end) = lex(text)?;
        Ok(Parser {
            toks,
            end,
            at: 0,
            sig,
            vars,
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(t, _)| t)
    }

    fn peek_is_ident(&self, s: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(i)) if i == s)
    }

    fn pos(&self) -> Pos {
        self.toks.get(self.at).map_or(self.end, |(_, p)| *p)
    }

    fn error_at(&self, pos: Pos, kind: ParseErrorKind) -> ParseError {
        ParseError {
            kind,
            line: pos.line,
            column: pos.column,
        }
    }

    fn unexpected(&self, expected: &'static str) -> ParseError {
        let kind = match self.peek() {
            Some(t) => ParseErrorKind::Unexpected {
                found: t.text(),
                expected,
            },
            None => ParseErrorKind::UnexpectedEnd { expected },
        };
        self.error_at(self.pos(), kind)
    }

    fn expect(&mut self, tok: Tok, expected: &'static str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.at += 1;
            Ok(())
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn ident(&mut self, expected: &'static str) -> Result<(String, Pos), ParseError> {
        match self.toks.get(self.at) {
            Some((Tok::Ident(s), p)) => {
                let out = (s.clone(), *p);
                self.at += 1;
                Ok(out)
            }
            _ => Err(self.unexpected(expected)),
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        if self.at == self.toks.len() {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }

    fn declared_name(&mut self) -> Result<(String, Pos), ParseError> {
        let (name, pos) = self.ident("a name")?;
        if KEYWORDS.contains(&name.as_str()) {
            return Err(self.error_at(pos, ParseErrorKind::ReservedName(name)));
        }
        Ok((name, pos))
    }

    fn declarations(&mut self) -> Result<(), ParseError> {
        loop {
            if self.peek_is_ident("const") {
                self.at += 1;
                let (name, pos) = self.declared_name()?;
                self.expect(Tok::Dot, "`.`")?;
                self.declare(pos, |s| s.add_constant(&name))?;
            } else if self.peek_is_ident("pred") {
                self.at += 1;
                let (name, pos) = self.declared_name()?;
                self.expect(Tok::Slash, "`/`")?;
                let arity = match self.peek() {
                    Some(Tok::Number(n)) => *n,
                    _ => return Err(self.unexpected("an arity")),
                };
                self.at += 1;
                self.expect(Tok::Dot, "`.`")?;
                self.declare(pos, |s| s.add_predicate(&name, arity))?;
            } else {
                return Ok(());
            }
        }
    }

    fn declare(
        &mut self,
        pos: Pos,
        f: impl FnOnce(&mut Signature) -> Result<(), SignatureError>,
    ) -> Result<(), ParseError> {
        match &mut self.sig {
            SigMode::Inferring(s) => {
                f(s).map_err(|e| self.error_at(pos, ParseErrorKind::Signature(e)))
            }
            SigMode::Fixed(_) => Err(self.error_at(
                pos,
                ParseErrorKind::Unexpected {
                    found: "declaration".into(),
                    expected: "a formula",
                },
            )),
        }
    }

    fn sequent(&mut self) -> Result<Sequent, ParseError> {
        let antecedent = self.formula()?;
        self.expect(Tok::LeadsTo, "`~>`")?;
        let consequent = self.formula()?;
        Ok(Sequent::new(antecedent, consequent))
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.unary()?;
        while self.peek() == Some(&Tok::Amp) {
            self.at += 1;
            let rhs = self.unary()?;
            acc = Formula::and(acc, rhs);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Tok::Diamond) => {
                self.at += 1;
                Ok(Formula::diam(self.unary()?))
            }
            Some(Tok::Ident(s)) if s == "A" => {
                self.at += 1;
                let (name, pos) = self.ident("a bound variable")?;
                if self.sig.sig().is_constant(&name) {
                    return Err(self.error_at(pos, ParseErrorKind::ConstantAsBinder(name)));
                }
                let x = self.variable(name, pos)?;
                self.expect(Tok::Dot, "`.`")?;
                Ok(Formula::all(x, self.unary()?))
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Tok::LParen) => {
                self.at += 1;
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Some(Tok::Ident(s)) if s == "T" => {
                self.at += 1;
                Ok(Formula::Top)
            }
            Some(Tok::Ident(s)) if KEYWORDS.contains(&s.as_str()) => {
                Err(self.unexpected("a formula"))
            }
            Some(Tok::Ident(_)) => {
                let (name, pos) = self.ident("a predicate")?;
                let mut args = Vec::new();
                if self.peek() == Some(&Tok::LParen) {
                    self.at += 1;
                    if self.peek() != Some(&Tok::RParen) {
                        args.push(self.term()?);
                        while self.peek() == Some(&Tok::Comma) {
                            self.at += 1;
                            args.push(self.term()?);
                        }
                    }
                    self.expect(Tok::RParen, "`,` or `)`")?;
                }
                self.check_predicate(&name, args.len(), pos)?;
                Ok(Formula::Pred(name, args))
            }
            _ => Err(self.unexpected("a formula")),
        }
    }

    fn check_predicate(&mut self, name: &str, found: usize, pos: Pos) -> Result<(), ParseError> {
        match self.sig.sig().arity(name) {
            Some(expected) if expected == found => Ok(()),
            Some(expected) => Err(self.error_at(
                pos,
                ParseErrorKind::ArityMismatch {
                    name: name.into(),
                    expected,
                    found,
                },
            )),
            None => match &mut self.sig {
                SigMode::Inferring(s) => s
                    .add_predicate(name, found)
                    .map_err(|e| self.error_at(pos, ParseErrorKind::Signature(e))),
                SigMode::Fixed(_) => {
                    Err(self.error_at(pos, ParseErrorKind::UndeclaredPredicate(name.into())))
                }
            },
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let (name, pos) = self.ident("a term")?;
        if self.sig.sig().is_constant(&name) {
            Ok(Term::Const(name))
        } else {
            Ok(Term::Var(self.variable(name, pos)?))
        }
    }

    fn variable(&mut self, name: String, pos: Pos) -> Result<VarName, ParseError> {
        self.vars
            .intern(&name)
            .map_err(|e| self.error_at(pos, ParseErrorKind::VariableClash(e)))
    }
}
