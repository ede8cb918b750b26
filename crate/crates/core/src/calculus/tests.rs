use alloc::string::ToString;
use alloc::vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::derived::*;
use super::*;
use crate::gen::{derived_instance, DerivationGen, DerivedRule, FormulaGen};
use crate::language::parse_formula;

const X: VarName = VarName(0);
const Y: VarName = VarName(1);

fn sig() -> Signature {
    Signature::new()
        .with_constant("c")
        .unwrap()
        .with_constant("d")
        .unwrap()
        .with_predicate("S", 2)
        .unwrap()
        .with_predicate("P", 1)
        .unwrap()
        .with_predicate("Q", 1)
        .unwrap()
        .with_predicate("R", 0)
        .unwrap()
}

fn vars() -> VarTable {
    let mut v = VarTable::new();
    v.bind("x", X);
    v.bind("y", Y);
    v.bind("z", VarName(2));
    v
}

fn f(s: &str) -> Formula {
    parse_formula(s, &sig(), &mut vars()).unwrap()
}

fn seq(l: &str, r: &str) -> Sequent {
    Sequent::new(f(l), f(r))
}

fn refl(s: &str) -> Derivation {
    Derivation::Refl { formula: f(s) }
}

#[test]
fn trans_axiom() {
    let d = Derivation::Trans { formula: f("P(x)") };
    let s = check(&d, &sig()).unwrap();
    assert_eq!(s, seq("<> <> P(x)", "<> P(x)"));
    assert_eq!(
        s.display(Some(&vars())).to_string(),
        "<> <> P(x) ~> <> P(x)"
    );
}

#[test]
fn refl_axiom() {
    assert_eq!(check(&refl("T"), &sig()).unwrap(), seq("T", "T"));
}

#[test]
fn axioms_reject_ill_formed_parameters() {
    let d = Derivation::Top {
        antecedent: Formula::pred("P", vec![Term::constant("e")]),
    };
    let e = check(&d, &sig()).unwrap_err();
    assert!(matches!(e.reason, CheckFailure::IllFormed(_)));
    assert_eq!(e.rule, RuleTag::Top);
}

#[test]
fn const_elimination_boundary() {
    let premise = Derivation::Cut {
        left: Box::new(refl("S(c, c)")),
        right: Box::new(Derivation::Top {
            antecedent: f("S(c, c)"),
        }),
    };
    let good = Derivation::ConstE {
        var: X,
        constant: "c".into(),
        antecedent: f("S(x, x)"),
        consequent: f("T"),
        premise: Box::new(premise.clone()),
    };
    assert_eq!(check(&good, &sig()).unwrap(), seq("S(x, x)", "T"));

    let bad = Derivation::ConstE {
        var: X,
        constant: "c".into(),
        antecedent: f("S(c, x)"),
        consequent: f("T"),
        premise: Box::new(premise),
    };
    let e = check(&bad, &sig()).unwrap_err();
    assert_eq!(e.path, vec![]);
    assert_eq!(e.rule, RuleTag::ConstE);
    assert_eq!(
        e.reason,
        CheckFailure::ConstantOccurs {
            side: Side::Antecedent,
            constant: "c".into()
        }
    );
}

#[test]
fn const_elimination_example() {
    let premise = Derivation::AllIl {
        var: Y,
        term: Term::constant("c"),
        body: f("S(c, y)"),
        premise: Box::new(refl("S(c, c)")),
    };
    let mk = |antecedent: &str, consequent: &str| Derivation::ConstE {
        var: X,
        constant: "c".into(),
        antecedent: f(antecedent),
        consequent: f(consequent),
        premise: Box::new(premise.clone()),
    };
    let d = mk("A y . S(x, y)", "S(x, x)");
    assert_eq!(check(&d, &sig()).unwrap(), seq("A y . S(x, y)", "S(x, x)"));
    let e = check(&mk("A y . S(c, y)", "S(x, x)"), &sig()).unwrap_err();
    assert_eq!(
        e.reason,
        CheckFailure::ConstantOccurs {
            side: Side::Antecedent,
            constant: "c".into()
        }
    );
    let e = check(&mk("A y . S(x, y)", "S(x, c)"), &sig()).unwrap_err();
    assert_eq!(
        e.reason,
        CheckFailure::ConstantOccurs {
            side: Side::Consequent,
            constant: "c".into()
        }
    );
    // Only some occurrences abstracted: the premise no longer matches.
    let e = check(&mk("A y . S(x, y)", "S(x, d)"), &sig()).unwrap_err();
    assert!(matches!(e.reason, CheckFailure::PremiseMismatch { .. }));
}

#[test]
fn all_ir_side_condition() {
    let d = Derivation::AllIr {
        var: X,
        premise: Box::new(refl("P(x)")),
    };
    let e = check(&d, &sig()).unwrap_err();
    assert_eq!(e.reason, CheckFailure::VarFreeInAntecedent(X));
    let d = Derivation::AllIr {
        var: Y,
        premise: Box::new(refl("P(x)")),
    };
    assert_eq!(check(&d, &sig()).unwrap(), seq("P(x)", "A y . P(x)"));
}

#[test]
fn all_il_side_condition() {
    let d = Derivation::AllIl {
        var: X,
        term: Term::Var(Y),
        body: f("A y . S(x, y)"),
        premise: Box::new(refl("A y . S(y, y)")),
    };
    let e = check(&d, &sig()).unwrap_err();
    assert_eq!(
        e.reason,
        CheckFailure::NotFreeFor {
            side: Side::Antecedent,
            var: X,
            term: Term::Var(Y)
        }
    );
}

#[test]
fn term_i_checks_both_sides() {
    let premise = Derivation::AndEl {
        left: f("P(x)"),
        right: f("A y . S(x, y)"),
    };
    let d = Derivation::TermI {
        var: X,
        term: Term::Var(Y),
        premise: Box::new(premise.clone()),
    };
    let e = check(&d, &sig()).unwrap_err();
    assert_eq!(
        e.reason,
        CheckFailure::NotFreeFor {
            side: Side::Antecedent,
            var: X,
            term: Term::Var(Y)
        }
    );
    let d = Derivation::TermI {
        var: X,
        term: Term::constant("c"),
        premise: Box::new(premise),
    };
    assert_eq!(
        check(&d, &sig()).unwrap(),
        seq("P(c) & A y . S(c, y)", "P(c)")
    );
}

#[test]
fn structural_premise_matching() {
    let d = Derivation::Cut {
        left: Box::new(refl("P(x)")),
        right: Box::new(refl("P(y)")),
    };
    let e = check(&d, &sig()).unwrap_err();
    assert_eq!(
        e.reason,
        CheckFailure::PremiseMismatch {
            expected: f("P(x)"),
            found: f("P(y)")
        }
    );
    // No alpha-equivalence: ∀x P(x) and ∀y P(y) are different formulas.
    let d = Derivation::AndI {
        left: Box::new(refl("A x . P(x)")),
        right: Box::new(Derivation::Top {
            antecedent: f("A y . P(y)"),
        }),
    };
    assert!(check(&d, &sig()).is_err());
}

#[test]
fn first_failure_is_leftmost_deepest() {
    let bad = |v| Derivation::AllIr {
        var: v,
        premise: Box::new(refl("P(x) & P(y)")),
    };
    let d = Derivation::AndI {
        left: Box::new(Derivation::Nec {
            premise: Box::new(bad(Y)),
        }),
        right: Box::new(bad(X)),
    };
    let e = check(&d, &sig()).unwrap_err();
    assert_eq!(e.path, vec![0, 0]);
    assert_eq!(e.reason, CheckFailure::VarFreeInAntecedent(Y));
    assert_eq!(
        e.display(Some(&vars())).to_string(),
        "rule AllIr at /0/0: side condition violated: y is free in the antecedent"
    );
}

#[test]
fn premise_count_is_enforced_by_check_step() {
    let e = check_step(&refl("T"), &[seq("T", "T")], &sig()).unwrap_err();
    assert_eq!(
        e,
        CheckFailure::PremiseCount {
            expected: 0,
            found: 1
        }
    );
}

#[test]
fn rule_tags_round_trip() {
    for tag in RuleTag::ALL {
        assert_eq!(RuleTag::from_name(tag.name()), Some(tag));
    }
    assert_eq!(RuleTag::ALL.len(), 12);
}

#[test]
fn all_comm_examples() {
    let s = check(&all_comm(&f("S(x, y)"), X, Y), &sig()).unwrap();
    assert_eq!(s, seq("A x . A y . S(x, y)", "A y . A x . S(x, y)"));
    let s = check(&all_comm(&f("S(x, y)"), X, X), &sig()).unwrap();
    assert_eq!(s, seq("A x . A x . S(x, y)", "A x . A x . S(x, y)"));
    let s = check(&all_comm(&Formula::Top, X, Y), &sig()).unwrap();
    assert_eq!(s, seq("A x . A y . T", "A y . A x . T"));
}

#[test]
fn all_sub_examples() {
    let s = check(
        &all_sub(&f("P(x)"), X, &Term::constant("c")).unwrap(),
        &sig(),
    )
    .unwrap();
    assert_eq!(s, seq("A x . P(x)", "P(c)"));
    let s = check(&all_sub(&f("S(x, y)"), X, &Term::Var(X)).unwrap(), &sig()).unwrap();
    assert_eq!(s, seq("A x . S(x, y)", "S(x, y)"));
    assert!(matches!(
        all_sub(&f("A y . S(x, y)"), X, &Term::Var(Y)),
        Err(DerivedRuleError::NotFreeFor { .. })
    ));
}

#[test]
fn diam_all_examples() {
    let s = check(&diam_all(&f("P(x)"), X), &sig()).unwrap();
    assert_eq!(s, seq("<> A x . P(x)", "A x . <> P(x)"));
    let s = check(&diam_all(&Formula::Top, X), &sig()).unwrap();
    assert_eq!(s, seq("<> A x . T", "A x . <> T"));
    let s = check(&diam_all(&f("P(x) & Q(y)"), X), &sig()).unwrap();
    assert_eq!(s, seq("<> A x . (P(x) & Q(y))", "A x . <> (P(x) & Q(y))"));
}

#[test]
fn alpha_conversion_examples() {
    let s = check(&alpha_conversion(&f("P(x)"), X, Y).unwrap(), &sig()).unwrap();
    assert_eq!(s, seq("A x . P(x)", "A y . P(y)"));
    let s = check(&alpha_conversion(&f("S(x, y)"), X, X).unwrap(), &sig()).unwrap();
    assert_eq!(s, seq("A x . S(x, y)", "A x . S(x, y)"));
    assert!(matches!(
        alpha_conversion(&f("S(x, y)"), X, Y),
        Err(DerivedRuleError::VarFree { .. })
    ));
    assert!(matches!(
        alpha_conversion(&f("A y . P(x)"), X, Y),
        Err(DerivedRuleError::NotFreeFor { .. })
    ));
}

#[test]
fn term_ir_examples() {
    let d = Derivation::AndEr {
        left: f("P(y)"),
        right: f("Q(x)"),
    };
    let e = term_ir(d.clone(), X, &Term::constant("c")).unwrap_err();
    assert!(matches!(e, DerivedRuleError::VarFree { .. }));

    let d = Derivation::Cut {
        left: Box::new(Derivation::AllIl {
            var: X,
            term: Term::Var(X),
            body: f("P(y) & Q(x)"),
            premise: Box::new(refl("P(y) & Q(x)")),
        }),
        right: Box::new(Derivation::AndEr {
            left: f("P(y)"),
            right: f("Q(x)"),
        }),
    };
    let s = check(
        &term_ir(d.clone(), X, &Term::constant("c")).unwrap(),
        &sig(),
    )
    .unwrap();
    assert_eq!(s, seq("A x . (P(y) & Q(x))", "Q(c)"));
    let s = check(&term_ir(d, X, &Term::Var(X)).unwrap(), &sig()).unwrap();
    assert_eq!(s, seq("A x . (P(y) & Q(x))", "Q(x)"));
}

#[test]
fn const_all_ir_examples() {
    // ∀z (P(y) & Q(z)) ⇝ Q(c), generalized to ∀x Q(x).
    let d = Derivation::Cut {
        left: Box::new(Derivation::AllIl {
            var: VarName(2),
            term: Term::constant("c"),
            body: f("P(y) & Q(z)"),
            premise: Box::new(refl("P(y) & Q(c)")),
        }),
        right: Box::new(Derivation::AndEr {
            left: f("P(y)"),
            right: f("Q(c)"),
        }),
    };
    let s = check(
        &const_all_ir(d.clone(), &f("Q(x)"), X, "c").unwrap(),
        &sig(),
    )
    .unwrap();
    assert_eq!(s, seq("A z . (P(y) & Q(z))", "A x . Q(x)"));

    let top = Derivation::Top {
        antecedent: f("P(y)"),
    };
    let s = check(&const_all_ir(top, &Formula::Top, X, "c").unwrap(), &sig()).unwrap();
    assert_eq!(s, seq("P(y)", "A x . T"));

    let mentions_c = Derivation::AndEr {
        left: f("P(c)"),
        right: f("Q(c)"),
    };
    assert!(matches!(
        const_all_ir(mentions_c, &f("Q(x)"), X, "c"),
        Err(DerivedRuleError::ConstantOccurs { .. })
    ));
    assert!(matches!(
        const_all_ir(d, &f("P(x)"), X, "c"),
        Err(DerivedRuleError::PremiseMismatch { .. })
    ));
}

fn derivations() -> DerivationGen {
    DerivationGen::new(FormulaGen::new(&sig(), 3, 3), 3)
}

#[test]
fn generated_derivations_check_and_audit() {
    let gen = derivations();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for tag in RuleTag::ALL {
        for _ in 0..200 {
            let d = gen.rooted_at(&mut rng, tag);
            assert_eq!(d.tag(), tag);
            let s = check(&d, &sig()).unwrap_or_else(|e| panic!("{tag}: {e}"));
            assert_eq!(s, d.conclusion());
            assert_eq!(check(&d, &sig()), Ok(s));
            for (_, node) in d.nodes() {
                let premises: Vec<Sequent> =
                    node.premises().iter().map(|p| p.conclusion()).collect();
                assert_eq!(
                    check_step(node, &premises, &sig()),
                    Ok(node.conclusion()),
                    "local step of {}",
                    node.tag()
                );
            }
        }
    }
}

#[test]
fn derived_builders_recheck() {
    let gen = derivations();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for rule in DerivedRule::ALL {
        for _ in 0..100 {
            let (d, expected) = derived_instance(&mut rng, &gen, rule);
            assert_eq!(check(&d, &sig()), Ok(expected), "{}", rule.name());
        }
    }
}

#[test]
fn nodes_are_preorder_with_paths() {
    let d = Derivation::AndI {
        left: Box::new(Derivation::Nec {
            premise: Box::new(refl("P(x)")),
        }),
        right: Box::new(refl("<> P(x)")),
    };
    let paths: Vec<Vec<usize>> = d.nodes().into_iter().map(|(p, _)| p).collect();
    assert_eq!(paths, vec![vec![], vec![0], vec![0, 0], vec![1]]);
    assert_eq!(d.depth(), 3);
    assert_eq!(d.size(), 4);
}
