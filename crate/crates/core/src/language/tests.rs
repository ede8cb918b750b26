use super::*;
use alloc::string::ToString;
use alloc::vec;
use proptest::prelude::*;

fn x() -> VarName {
    VarName(0)
}
fn y() -> VarName {
    VarName(1)
}
fn z() -> VarName {
    VarName(2)
}

fn s(a: Term, b: Term) -> Formula {
    Formula::pred("S", vec![a, b])
}

fn sig() -> Signature {
    Signature::new()
        .with_constant("c")
        .and_then(|s| s.with_constant("d"))
        .and_then(|s| s.with_predicate("S", 2))
        .and_then(|s| s.with_predicate("P", 1))
        .and_then(|s| s.with_predicate("Q", 1))
        .unwrap()
}

#[test]
fn free_vars_examples() {
    assert!(Formula::Top.free_vars().is_empty());
    let f = Formula::all(x(), s(Term::Var(x()), Term::Var(y())));
    assert_eq!(f.free_vars(), BTreeSet::from([y()]));
    let g = Formula::and(
        s(Term::Var(x()), Term::Var(x())),
        Formula::diam(Formula::pred("P", vec![Term::Var(z())])),
    );
    assert_eq!(g.free_vars(), BTreeSet::from([x(), z()]));
}

#[test]
fn term_free_vars() {
    assert_eq!(Term::Var(x()).free_vars(), BTreeSet::from([x()]));
    assert!(Term::constant("c").free_vars().is_empty());
    assert_eq!(Term::Var(y()).free_vars(), BTreeSet::from([y()]));
}

#[test]
fn occurs_const_examples() {
    assert!(s(Term::constant("c"), Term::Var(y())).mentions_const("c"));
    assert!(!Formula::all(x(), s(Term::Var(x()), Term::Var(x()))).mentions_const("c"));
    assert!(!Formula::diam(Formula::pred("P", vec![Term::constant("d")])).mentions_const("c"));
}

#[test]
fn substitution_respects_binders() {
    let phi = Formula::all(x(), s(Term::Var(x()), Term::Var(z())));
    assert_eq!(phi.substitute(x(), &Term::Var(y())), phi);
}

#[test]
fn substitution_is_unguarded() {
    // (∀y S(x,y))[x:=y] captures y.
    let phi = Formula::all(y(), s(Term::Var(x()), Term::Var(y())));
    let naive = Formula::all(y(), s(Term::Var(y()), Term::Var(y())));
    assert_eq!(phi.substitute(x(), &Term::Var(y())), naive);
    assert!(!phi.is_free_for(x(), &Term::Var(y())));
}

#[test]
fn substitution_by_constant() {
    let phi = s(Term::Var(x()), Term::Var(z()));
    assert_eq!(
        phi.substitute(x(), &Term::constant("c")),
        s(Term::constant("c"), Term::Var(z()))
    );
}

#[test]
fn free_for_examples() {
    let phi = Formula::all(y(), s(Term::Var(x()), Term::Var(y())));
    assert!(!phi.is_free_for(x(), &Term::Var(y())));
    assert!(phi.is_free_for(x(), &Term::constant("c")));
    assert!(phi.is_free_for(x(), &Term::Var(z())));
    // A binder for the term's variable is harmless when x does not occur below it.
    let psi = Formula::and(
        Formula::pred("P", vec![Term::Var(x())]),
        Formula::all(y(), Formula::pred("P", vec![Term::Var(y())])),
    );
    assert!(psi.is_free_for(x(), &Term::Var(y())));
    // x shadowed by its own binder.
    let chi = Formula::all(y(), Formula::all(x(), s(Term::Var(x()), Term::Var(y()))));
    assert!(chi.is_free_for(x(), &Term::Var(y())));
}

#[test]
fn well_formedness() {
    let sig = sig();
    assert!(Formula::Top.is_well_formed(&sig));
    assert_eq!(
        Formula::pred("S", vec![Term::Var(x())]).check_well_formed(&sig),
        Err(WellFormedError::ArityMismatch {
            name: "S".into(),
            expected: 2,
            found: 1
        })
    );
    assert!(s(Term::Var(x()), Term::constant("c")).is_well_formed(&sig));
    assert!(!Formula::pred("R", vec![]).is_well_formed(&sig));
    assert!(!s(Term::Var(x()), Term::constant("e")).is_well_formed(&sig));
}

#[test]
fn signature_rejects_clashes() {
    let sig = Signature::new().with_constant("c").unwrap();
    assert_eq!(
        sig.clone().with_predicate("c", 1),
        Err(SignatureError::NameClash("c".into()))
    );
    let sig = Signature::new().with_predicate("P", 1).unwrap();
    assert!(matches!(
        sig.with_predicate("P", 2),
        Err(SignatureError::ArityRedeclared { .. })
    ));
}

#[test]
fn parse_examples() {
    let sig = sig();
    let mut vars = VarTable::new();
    assert_eq!(parse_formula("T", &sig, &mut vars).unwrap(), Formula::Top);
    let f = parse_formula("A x . S(x, c)", &sig, &mut vars).unwrap();
    let xv = vars.get("x").unwrap();
    assert_eq!(f, Formula::all(xv, s(Term::Var(xv), Term::constant("c"))));

    let sig = Signature::new().with_predicate("P", 1).unwrap();
    let mut vars = VarTable::new();
    let seq = parse_sequent("<> <> P(x) ~> <> P(x)", &sig, &mut vars).unwrap();
    let px = Formula::pred("P", vec![Term::Var(vars.get("x").unwrap())]);
    assert_eq!(
        seq,
        Sequent::new(Formula::diam_n(2, px.clone()), Formula::diam(px))
    );
    assert_eq!(
        seq.display(Some(&vars)).to_string(),
        "<> <> P(x) ~> <> P(x)"
    );
}

#[test]
fn precedence() {
    let sig = sig();
    let mut vars = VarTable::new();
    let f = parse_formula("A x . P(x) & <> Q(x) & T", &sig, &mut vars).unwrap();
    let xv = vars.get("x").unwrap();
    let px = Formula::pred("P", vec![Term::Var(xv)]);
    let qx = Formula::pred("Q", vec![Term::Var(xv)]);
    assert_eq!(
        f,
        Formula::and(
            Formula::and(Formula::all(xv, px.clone()), Formula::diam(qx.clone())),
            Formula::Top
        )
    );
    let g = parse_formula("P(x) & (Q(x) & T)", &sig, &mut vars).unwrap();
    assert_eq!(g, Formula::and(px, Formula::and(qx, Formula::Top)));
    assert_eq!(g.display(Some(&vars)).to_string(), "P(x) & (Q(x) & T)");
}

#[test]
fn parse_errors() {
    let sig = sig();
    let mut vars = VarTable::new();
    let e = parse_formula("S(x)", &sig, &mut vars).unwrap_err();
    assert!(matches!(e.kind, ParseErrorKind::ArityMismatch { .. }));
    assert_eq!((e.line, e.column), (1, 1));
    let e = parse_formula("R(x)", &sig, &mut vars).unwrap_err();
    assert_eq!(e.kind, ParseErrorKind::UndeclaredPredicate("R".into()));
    let e = parse_formula("P(x) &", &sig, &mut vars).unwrap_err();
    assert!(matches!(e.kind, ParseErrorKind::UnexpectedEnd { .. }));
    assert_eq!(e.column, 7);
    let e = parse_formula("P(x) Q(x)", &sig, &mut vars).unwrap_err();
    assert!(matches!(e.kind, ParseErrorKind::Unexpected { .. }));
    let e = parse_formula("A c . P(c)", &sig, &mut vars).unwrap_err();
    assert_eq!(e.kind, ParseErrorKind::ConstantAsBinder("c".into()));
    let e = parse_formula("P(x) # T", &sig, &mut vars).unwrap_err();
    assert_eq!(e.kind, ParseErrorKind::InvalidCharacter('#'));
    let e = parse_sequent("T\n  ~> <> R", &sig, &mut vars).unwrap_err();
    assert_eq!((e.line, e.column), (2, 9));
}

#[test]
fn problem_header() {
    let p = parse_problem("const c.\npred P/1.\nA x . P(x) ~> P(c)").unwrap();
    assert!(p.signature.is_constant("c"));
    assert_eq!(p.signature.arity("P"), Some(1));
    let xv = p.vars.get("x").unwrap();
    assert_eq!(
        p.sequent,
        Sequent::new(
            Formula::all(xv, Formula::pred("P", vec![Term::Var(xv)])),
            Formula::pred("P", vec![Term::constant("c")])
        )
    );
    // undeclared predicates are inferred
    let p = parse_problem("<> P ~> <> <> P & Q(y, y)").unwrap();
    assert_eq!(p.signature.arity("P"), Some(0));
    assert_eq!(p.signature.arity("Q"), Some(2));
    let e = parse_problem("P(x) ~> P(x, x)").unwrap_err();
    assert!(matches!(e.kind, ParseErrorKind::ArityMismatch { .. }));
    let e = parse_problem("const P. P ~> T").unwrap_err();
    assert!(matches!(e.kind, ParseErrorKind::Signature(_)));
    let e = parse_problem("const T. T ~> T").unwrap_err();
    assert_eq!(e.kind, ParseErrorKind::ReservedName("T".into()));
}

#[test]
fn raw_variable_names() {
    let sig = sig();
    let mut vars = VarTable::new();
    let f = parse_formula("P(_7)", &sig, &mut vars).unwrap();
    assert_eq!(f, Formula::pred("P", vec![Term::var(7)]));
    assert_eq!(f.to_string(), "P(_7)");
    assert_eq!(vars.intern("x"), Ok(VarName(0)));
    assert_eq!(vars.intern("y"), Ok(VarName(1)));
    assert_eq!(vars.intern("x"), Ok(VarName(0)));
    // `_1` was handed to `y` above.
    let e = parse_formula("P(_1)", &sig, &mut vars).unwrap_err();
    assert!(matches!(e.kind, ParseErrorKind::VariableClash(_)));
    // A raw number used first is skipped by later identifiers.
    let mut vars = VarTable::new();
    let f = parse_formula("S(_0, z)", &sig, &mut vars).unwrap();
    assert_eq!(f, Formula::pred("S", vec![Term::var(0), Term::var(1)]));
}

#[test]
fn structural_equality_only() {
    let sx = Formula::all(x(), Formula::pred("P", vec![Term::Var(x())]));
    let sy = Formula::all(y(), Formula::pred("P", vec![Term::Var(y())]));
    assert_ne!(sx, sy);
}

// ---- property tests ----

const CONSTS: [&str; 2] = ["c", "d"];

fn arb_term() -> impl Strategy<Value = Term> {
    prop_oneof![
        3 => (0u32..4).prop_map(Term::var),
        1 => proptest::sample::select(&CONSTS[..]).prop_map(Term::constant),
    ]
}

fn arb_formula() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        1 => Just(Formula::Top),
        2 => arb_term().prop_map(|t| Formula::pred("P", vec![t])),
        2 => (arb_term(), arb_term()).prop_map(|(a, b)| s(a, b)),
        1 => Just(Formula::pred("R", vec![])),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::and(l, r)),
            inner.clone().prop_map(Formula::diam),
            ((0u32..4), inner).prop_map(|(x, f)| Formula::all(VarName(x), f)),
        ]
    })
}

fn full_sig() -> Signature {
    sig().with_predicate("R", 0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn print_parse_round_trip(f in arb_formula()) {
        let sig = full_sig();
        let mut vars = VarTable::new();
        for (i, n) in ["x", "y", "z", "w"].iter().enumerate() {
            vars.bind(n, VarName(i as u32));
        }
        let text = f.display(Some(&vars)).to_string();
        let back = parse_formula(&text, &sig, &mut vars.clone()).unwrap();
        prop_assert_eq!(&back, &f);
        // and without names, through the `_N` spelling
        let raw = parse_formula(&f.to_string(), &sig, &mut VarTable::new()).unwrap();
        prop_assert_eq!(raw, f);
    }

    #[test]
    fn substitution_of_absent_variable_is_identity(f in arb_formula(), v in 0u32..6, t in arb_term()) {
        let x = VarName(v);
        prop_assume!(!f.free_vars().contains(&x));
        prop_assert_eq!(f.substitute(x, &t), f.clone());
        prop_assert!(f.is_free_for(x, &t));
    }

    #[test]
    fn free_vars_after_substitution(f in arb_formula(), v in 0u32..4, t in arb_term()) {
        let x = VarName(v);
        let mut expected = f.free_vars();
        if f.is_free_for(x, &t) && expected.remove(&x) {
            expected.extend(t.free_vars());
            prop_assert_eq!(f.substitute(x, &t).free_vars(), expected);
        }
    }

    #[test]
    fn constant_substitution_removes_variable(f in arb_formula(), v in 0u32..4) {
        let x = VarName(v);
        prop_assert!(!f.substitute(x, &Term::constant("c")).free_vars().contains(&x));
    }

    #[test]
    fn has_free_var_agrees_with_free_vars(f in arb_formula(), v in 0u32..5) {
        prop_assert_eq!(f.has_free_var(VarName(v)), f.free_vars().contains(&VarName(v)));
    }
}
