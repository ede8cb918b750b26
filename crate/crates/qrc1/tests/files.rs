use qrc1::model_file::{ModelFile, ModelFileError};
use qrc1::proof_file::{ProofFile, ProofFileError};
use qrc1_core::calculus::check;
use qrc1_core::gen::{DerivationGen, FormulaGen};
use qrc1_core::semantics::{GenBounds, ModelGenerator};
use qrc1_core::{Derivation, Formula, RuleTag, Signature, Term, VarName, VarTable};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn sig() -> Signature {
    Signature::new()
        .with_constant("c")
        .and_then(|s| s.with_constant("d"))
        .and_then(|s| s.with_predicate("P", 1))
        .and_then(|s| s.with_predicate("S", 2))
        .unwrap()
}

#[test]
fn generated_models_round_trip() {
    for m in ModelGenerator::new(&sig(), GenBounds::default(), 3).take(200) {
        let text = ModelFile::from_model(&m).to_json();
        let back = ModelFile::parse(&text).unwrap();
        assert_eq!(&back, m.raw());
    }
}

#[test]
fn model_defaults() {
    let m = ModelFile::parse(
        r#"{ "signature": { "predicates": { "P": 1 } }, "worlds": 2, "rel": [[0, 1]], "domains": [2, 2] }"#,
    )
    .unwrap();
    assert_eq!(m.eta_map(0, 1), &[0, 1]);
    assert!(m.extension(1, "P").unwrap().is_empty());
}

#[test]
fn model_errors() {
    let err = |text: &str| ModelFile::parse(text).unwrap_err();
    assert!(matches!(
        err(r#"{ "signature": {}, "worlds": 2, "domains": [1, 2] }"#),
        ModelFileError::MissingEta
    ));
    assert!(matches!(
        err(r#"{ "signature": {}, "worlds": 2, "domains": [1] }"#),
        ModelFileError::WorldCount {
            field: "domains",
            worlds: 2,
            found: 1
        }
    ));
    assert!(matches!(
        err(r#"{ "signature": {}, "worlds": 1, "rel": [[0, 1]], "domains": [1] }"#),
        ModelFileError::RelOutOfRange(0, 1)
    ));
    assert!(matches!(
        err(
            r#"{ "signature": { "constants": ["c"] }, "worlds": 1, "domains": [1], "constInterp": [{}] }"#
        ),
        ModelFileError::MissingConstant { world: 0, .. }
    ));
    assert!(matches!(
        err(r#"{ "signature": {}, "worlds": 1, "domains": [1], "constInterp": [{ "e": 0 }] }"#),
        ModelFileError::UnknownConstant { .. }
    ));
    assert!(matches!(
        err(r#"{ "signature": {}, "worlds": 1, "domains": [1], "predInterp": [{ "Q": [] }] }"#),
        ModelFileError::UnknownPredicate { .. }
    ));
    assert!(matches!(
        err(
            r#"{ "signature": { "predicates": { "P": 1 } }, "worlds": 1, "domains": [1], "predInterp": [{ "P": [[3]] }] }"#
        ),
        ModelFileError::Model(_)
    ));
    assert!(matches!(
        err(r#"{ "signature": {}, "worlds": 1, "domains": [1], "colour": "red" }"#),
        ModelFileError::Json(_)
    ));
}

#[test]
fn generated_proofs_round_trip() {
    let sig = sig();
    let gen = DerivationGen::new(FormulaGen::new(&sig, 3, 3), 3);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for tag in RuleTag::ALL {
        for _ in 0..30 {
            let d = gen.rooted_at(&mut rng, tag);
            let proved = check(&d, &sig).unwrap();
            let file = ProofFile::encode(&d, &sig, &VarTable::new());
            let loaded = ProofFile::parse(&file.to_json()).unwrap();
            assert_eq!(loaded.signature, sig);
            let reproved = check(&loaded.derivation, &loaded.signature).unwrap();
            // Variables are renumbered on reading, so compare printed forms.
            let names = qrc1::proof_file::name_all(&d, &sig, &VarTable::new());
            assert_eq!(
                reproved.display(Some(&loaded.vars)).to_string(),
                proved.display(Some(&names)).to_string()
            );
            // A second trip is the identity on the file.
            let again = ProofFile::encode(&loaded.derivation, &loaded.signature, &loaded.vars);
            assert_eq!(again, file);
        }
    }
}

#[test]
fn encoding_keeps_given_names() {
    let sig = Signature::new().with_predicate("P", 1).unwrap();
    let mut vars = VarTable::new();
    vars.bind("alpha", VarName(7));
    let d = Derivation::AllIr {
        var: VarName(7),
        premise: Box::new(Derivation::Top {
            antecedent: Formula::pred("P", vec![Term::var(3)]),
        }),
    };
    let loaded = ProofFile::parse(&ProofFile::encode(&d, &sig, &vars).to_json()).unwrap();
    let s = check(&loaded.derivation, &sig).unwrap();
    assert_eq!(
        s.display(Some(&loaded.vars)).to_string(),
        "P(x) ~> A alpha . T"
    );
}

#[test]
fn proof_errors() {
    let err = |proof: &str| {
        let text = format!(
            r#"{{ "signature": {{ "constants": ["c"], "predicates": {{ "P": 1 }} }}, "proof": {proof} }}"#
        );
        ProofFile::parse(&text).unwrap_err()
    };
    let e = err(
        r#"{ "rule": "Cut", "premises": [{ "rule": "Refl", "params": { "phi": "T" } }, { "rule": "Frob" }] }"#,
    );
    assert!(matches!(e, ProofFileError::UnknownRule { .. }));
    assert_eq!(e.to_string(), "node /1: unknown rule `Frob`");
    assert!(matches!(
        err(r#"{ "rule": "Refl" }"#),
        ProofFileError::MissingParam { param: "phi", .. }
    ));
    assert!(matches!(
        err(r#"{ "rule": "Top", "params": { "phi": "T", "x": "x" } }"#),
        ProofFileError::UnexpectedParam { param: "x", .. }
    ));
    assert!(matches!(
        err(r#"{ "rule": "Nec", "params": {} }"#),
        ProofFileError::PremiseCount {
            expected: 1,
            found: 0,
            ..
        }
    ));
    assert!(matches!(
        err(r#"{ "rule": "Refl", "params": { "phi": "P(" } }"#),
        ProofFileError::Parse { param: "phi", .. }
    ));
    assert!(matches!(
        err(
            r#"{ "rule": "AllIr", "params": { "x": "c" }, "premises": [{ "rule": "Refl", "params": { "phi": "T" } }] }"#
        ),
        ProofFileError::NotAVariable { param: "x", .. }
    ));
    assert!(matches!(
        err(
            r#"{ "rule": "ConstE", "params": { "x": "x", "c": "e", "phi": "T", "psi": "T" }, "premises": [{ "rule": "Refl", "params": { "phi": "T" } }] }"#
        ),
        ProofFileError::UnknownConstant { .. }
    ));
    assert!(matches!(
        err(r#"{ "rule": "Refl", "params": { "phi": "Q(x)" } }"#),
        ProofFileError::Parse { .. }
    ));
}
