use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::gen::{random_assignment, FormulaGen};
use crate::language::{parse_formula, VarTable};

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
}

fn f(s: &str) -> Formula {
    let mut v = VarTable::new();
    v.bind("x", X);
    v.bind("y", Y);
    parse_formula(s, &sig(), &mut v).unwrap()
}

fn set(tuples: &[&[Elem]]) -> BTreeSet<Vec<Elem>> {
    tuples.iter().map(|t| t.to_vec()).collect()
}

/// Constant-domain model over `sig()` with both constants at 0 and the given
/// extensions of `P` per world; `S` is empty.
fn cd_model(rel: Vec<Vec<bool>>, size: usize, p: Vec<BTreeSet<Vec<Elem>>>) -> RawModel {
    let n = rel.len();
    let frame = RawFrame::constant_domain(rel, size).unwrap();
    let preds = p
        .into_iter()
        .map(|ext| vec![ext, BTreeSet::new()])
        .collect();
    // predicates are sorted by name: P before S
    RawModel::new(sig(), frame, vec![vec![0, 0]; n], preds).unwrap()
}

fn one_world() -> RawModel {
    cd_model(vec![vec![false]], 1, vec![BTreeSet::new()])
}

/// w R u R v and w R v, two elements everywhere, identity η.
fn chain3() -> RawModel {
    let rel = vec![
        vec![false, true, true],
        vec![false, false, true],
        vec![false, false, false],
    ];
    cd_model(rel, 2, vec![BTreeSet::new(); 3])
}

fn with_eta(m: &RawModel, w: World, u: World, map: Vec<Elem>) -> RawModel {
    let f = m.frame();
    let mut eta: Vec<Vec<Vec<Elem>>> = f
        .worlds()
        .map(|a| f.worlds().map(|b| f.eta_map(a, b).to_vec()).collect())
        .collect();
    eta[w][u] = map;
    let frame = RawFrame::new(f.relation().to_vec(), f.domains().to_vec(), eta).unwrap();
    RawModel::new(
        m.signature().clone(),
        frame,
        m.const_table().to_vec(),
        m.pred_table().to_vec(),
    )
    .unwrap()
}

#[test]
fn frame_shape_is_validated() {
    assert_eq!(
        RawFrame::new(vec![], vec![], vec![]),
        Err(ModelError::NoWorlds)
    );
    assert_eq!(
        RawFrame::new(vec![vec![false]], vec![2], vec![vec![vec![0, 2]]]),
        Err(ModelError::EtaRange {
            from: 0,
            to: 0,
            elem: 2
        })
    );
    let frame = RawFrame::constant_domain(vec![vec![false]], 1).unwrap();
    let bad = RawModel::new(
        sig(),
        frame,
        vec![vec![0, 1]],
        vec![vec![set(&[]), set(&[])]],
    );
    assert!(matches!(bad, Err(ModelError::ConstRange { .. })));
}

#[test]
fn adequacy_examples() {
    assert!(one_world().check_adequacy().is_adequate());
    assert!(chain3().check_adequacy().is_adequate());

    let r = with_eta(&chain3(), 1, 1, vec![1, 0]).check_adequacy();
    assert!(!r.eta_identity());
    assert_eq!(r.identity, Some((1, 0)));

    // Perturb η_{w,v} on a single element of a valid model.
    let m = chain3();
    for d in 0..2 {
        let mut map = m.eta_map(0, 2).to_vec();
        map[d] = 1 - map[d];
        let r = with_eta(&m, 0, 2, map).check_adequacy();
        assert!(!r.eta_functorial());
        assert_eq!(
            r.functoriality,
            Some(FunctorialityWitness {
                w: 0,
                u: 1,
                v: 2,
                elem: d
            })
        );
        assert!(r.transitive() && r.eta_identity());
    }

    let mut rel = chain3().relation().to_vec();
    rel[0][2] = false;
    let r = cd_model(rel, 2, vec![BTreeSet::new(); 3]).check_adequacy();
    assert_eq!(r.transitivity, Some((0, 1, 2)));

    let mut consts = chain3().const_table().to_vec();
    consts[2][1] = 1;
    let m = chain3();
    let raw = RawModel::new(sig(), m.frame().clone(), consts, m.pred_table().to_vec()).unwrap();
    let r = raw.check_adequacy();
    assert_eq!(
        r.concordance,
        Some(ConcordanceWitness {
            w: 0,
            u: 2,
            constant: "d".into()
        })
    );
    assert!(Model::new(raw).is_err());
}

#[test]
fn assignments() {
    let m = chain3();
    assert_eq!(
        Assignment::new(&m, 3, 0),
        Err(AssignmentError::NoSuchWorld(3))
    );
    assert!(matches!(
        Assignment::new(&m, 0, 2),
        Err(AssignmentError::OutOfDomain { .. })
    ));
    let mut g = Assignment::new(&m, 0, 0).unwrap();
    g.bind(&m, X, 1).unwrap();
    assert!(g.bind(&m, Y, 5).is_err());
    assert_eq!(assign_term(&m, &g, &Term::Var(X)), Ok(1));
    assert_eq!(assign_term(&m, &g, &Term::Var(Y)), Ok(0));
    assert_eq!(assign_term(&m, &g, &Term::constant("c")), Ok(0));
    assert_eq!(
        assign_term(&m, &g, &Term::constant("e")),
        Err(AssignmentError::UndeclaredConstant("e".into()))
    );
    // Overrides equal to the default are not stored.
    assert_eq!(g.with(X, 0), Assignment::new(&m, 0, 0).unwrap());

    let frame = RawFrame::new(
        vec![vec![false, false], vec![false, false]],
        vec![1, 0],
        vec![vec![vec![0], vec![]], vec![vec![], vec![]]],
    );
    // An η into an empty domain cannot map anything.
    assert!(frame.is_err());
    let frame = RawFrame::new(vec![vec![false]], vec![0], vec![vec![vec![]]]).unwrap();
    let m = RawModel::new(Signature::new(), frame, vec![vec![]], vec![vec![]]).unwrap();
    assert_eq!(
        Assignment::new(&m, 0, 0),
        Err(AssignmentError::EmptyDomain(0))
    );
}

#[test]
fn eta_compose_examples() {
    let m = chain3();
    let g = Assignment::new(&m, 0, 1).unwrap().with(X, 0);
    let same = eta_compose(&m, 0, &g);
    assert_eq!(same, g);

    let m = with_eta(&chain3(), 0, 1, vec![1, 1]);
    let h = eta_compose(&m, 1, &g);
    assert_eq!(h.world(), 1);
    assert!((0..5).all(|i| h.get(VarName(i)) == 1));
    assert!(h.overrides().is_empty());
}

#[test]
fn eta_compose_along_chains() {
    let mut gen = ModelGenerator::new(&sig(), GenBounds::default(), 3).only(Family::Forest);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let m = gen.next().unwrap();
        for w in m.worlds() {
            let g = random_assignment(&mut rng, &m, w, 4);
            for u in m.successors(w) {
                for v in m.successors(u) {
                    let two = eta_compose(&m, v, &eta_compose(&m, u, &g));
                    let one = eta_compose(&m, v, &g);
                    assert!((0..6).all(|i| two.get(VarName(i)) == one.get(VarName(i))));
                }
            }
        }
    }
}

#[test]
fn alternatives_and_equivalence() {
    let m = chain3();
    let g = Assignment::new(&m, 0, 0).unwrap().with(Y, 1);
    let gx = g.with(X, 1);
    let none = BTreeSet::new();
    let just_x: BTreeSet<VarName> = [X].into();
    let just_y: BTreeSet<VarName> = [Y].into();
    assert!(xaltern(&g, &g, &none));
    assert!(xaltern(&g, &gx, &just_x));
    assert!(!xaltern(&g, &gx, &just_y));
    // Different defaults differ on infinitely many variables.
    let h = Assignment::new(&m, 0, 1).unwrap();
    assert!(!xaltern(&g, &h, &just_x));

    assert!(xeq(&g, &h, &none));
    assert!(xeq(&g, &h, &just_y));
    assert!(!xeq(&g, &gx, &just_x));
    assert!(xeq(&g, &gx, &f("P(y)").free_vars()));
}

#[test]
fn sat_examples() {
    let m = one_world();
    let g = Assignment::new(&m, 0, 0).unwrap();
    assert!(sat(&m, &g, &Formula::Top));
    assert!(!sat(&m, &g, &f("<> T")));
    assert!(sat(&m, &g, &f("A x . T")));

    let m = cd_model(
        vec![vec![false, true], vec![false, false]],
        1,
        vec![set(&[]), set(&[&[0]])],
    );
    let g = Assignment::new(&m, 0, 0).unwrap();
    assert!(sat(&m, &g, &f("<> P(x)")));
    assert!(!sat(&m, &g, &f("<> <> P(x)")));
    assert!(!sat(&m, &g, &f("P(x)")));
    assert!(sat(&m, &g, &f("<> A y . P(y)")));
}

/// Hand-computed two-world model with a non-identity η.
#[test]
fn sat_through_eta() {
    // World 0 has {0, 1}, world 1 has {0}; η_{0,1} sends both to 0.
    let frame = RawFrame::new(
        vec![vec![false, true], vec![false, false]],
        vec![2, 1],
        vec![vec![vec![0, 1], vec![0, 0]], vec![vec![0], vec![0]]],
    )
    .unwrap();
    let preds = vec![
        vec![set(&[&[1]]), set(&[&[0, 1]])],
        vec![set(&[&[0]]), set(&[])],
    ];
    let m = RawModel::new(sig(), frame, vec![vec![0, 1], vec![0, 0]], preds).unwrap();
    assert!(Model::new(m.clone()).is_ok());
    let g = Assignment::new(&m, 0, 0).unwrap();
    assert!(!sat(&m, &g, &f("P(x)")));
    assert!(sat(&m, &g, &f("P(d)")));
    assert!(sat(&m, &g, &f("S(c, d)")));
    assert!(!sat(&m, &g, &f("A x . P(x)")));
    assert!(sat(&m, &g, &f("<> A x . P(x)")));
    assert!(sat(&m, &g.with(X, 1), &f("P(x) & <> P(x)")));
    assert!(!sat(&m, &g, &f("A y . S(c, y)")));
    assert!(sat(&m, &g, &f("A y . <> P(y)")));
}

#[test]
fn replace_const_examples() {
    let m = with_eta(&chain3(), 0, 2, vec![1, 1]);
    let r = replace_const(&m, 0, "c", 1).unwrap();
    assert_eq!(r.const_value(0, "c"), Some(1));
    assert_eq!(r.const_value(1, "c"), Some(1));
    assert_eq!(r.const_value(2, "c"), Some(1));
    for w in 0..3 {
        assert_eq!(r.const_value(w, "d"), m.const_value(w, "d"));
    }
    // World 2 does not see world 0; c there is η_{2,0}(d), which is identity.
    let r = replace_const(&m, 2, "c", 1).unwrap();
    assert_eq!(r.const_value(0, "c"), Some(1));
    assert_eq!(
        replace_const(&m, 0, "e", 0),
        Err(SurgeryError::UndeclaredConstant("e".into()))
    );
    assert_eq!(
        replace_const(&m, 4, "c", 0),
        Err(SurgeryError::NoSuchWorld(4))
    );
}

#[test]
fn restrict_to_cone_examples() {
    let m = chain3();
    let leaf = restrict_to_cone(&m, 2);
    assert_eq!(leaf.worlds, vec![2]);
    assert_eq!(leaf.model.world_count(), 1);
    let all = restrict_to_cone(&m, 0);
    assert_eq!(all.worlds, vec![0, 1, 2]);
    assert_eq!(all.model, m);

    let rel = vec![
        vec![false, true, false],
        vec![false, false, false],
        vec![false, false, false],
    ];
    let m = cd_model(rel, 1, vec![set(&[]), set(&[&[0]]), set(&[&[0]])]);
    let cone = restrict_to_cone(&m, 0);
    assert_eq!(cone.worlds, vec![0, 1]);
    assert_eq!(cone.index_of(2), None);
    assert_eq!(cone.index_of(1), Some(1));
    assert_eq!(cone.model.extension(1, "P"), Some(&set(&[&[0]])));
}

#[test]
fn restrict_replace_examples() {
    let m = Model::new(cd_model(vec![vec![false]], 2, vec![set(&[])])).unwrap();
    let (r, w) = restrict_replace(&m, 0, "c", 1).unwrap();
    assert_eq!(w, 0);
    assert_eq!(r.const_value(0, "c"), Some(1));
    assert_eq!(r.const_value(0, "d"), m.const_value(0, "d"));
    assert_eq!(r.pred_table(), m.pred_table());

    // Two-world chain with η_{0,1} swapping elements.
    let base = cd_model(
        vec![vec![false, true], vec![false, false]],
        2,
        vec![set(&[]); 2],
    );
    let raw = with_eta(&base, 0, 1, vec![1, 0]);
    let mut consts = raw.const_table().to_vec();
    consts[1] = vec![1, 1];
    let raw = RawModel::new(
        sig(),
        raw.frame().clone(),
        consts,
        raw.pred_table().to_vec(),
    )
    .unwrap();
    let m = Model::new(raw).unwrap();
    let (r, _) = restrict_replace(&m, 0, "c", 1).unwrap();
    assert_eq!(r.const_value(1, "c"), Some(0));
    let (r, w) = restrict_replace(&m, 1, "c", 0).unwrap();
    assert_eq!((r.world_count(), w), (1, 0));
}

#[test]
fn generator_examples() {
    let tiny = GenBounds {
        max_worlds: 1,
        max_domain: 1,
    };
    let models: Vec<Model> = ModelGenerator::new(&sig(), tiny, 0).take(20).collect();
    for m in &models {
        assert_eq!(m.world_count(), 1);
        assert_eq!(m.domain_size(0), 1);
        assert!(!m.related(0, 0) || m.is_constant_domain());
    }
    for family in [Family::ConstantDomain, Family::Forest] {
        let mut gen = ModelGenerator::new(&sig(), GenBounds::default(), 9).only(family);
        for _ in 0..300 {
            let m = gen.next().unwrap();
            assert!(m.check_adequacy().is_adequate());
            assert!(m.world_count() <= 4);
            assert!(m.domains().iter().all(|&s| (1..=3).contains(&s)));
            if family == Family::Forest {
                assert!(m.is_irreflexive());
            } else {
                assert!(m.is_constant_domain());
            }
        }
    }
    let a: Vec<Model> = ModelGenerator::new(&sig(), GenBounds::default(), 5)
        .take(10)
        .collect();
    let b: Vec<Model> = ModelGenerator::new(&sig(), GenBounds::default(), 5)
        .take(10)
        .collect();
    assert_eq!(a, b);
}

fn instances(seed: u64, count: usize) -> Vec<(Model, Assignment, Formula)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let formulas = FormulaGen::new(&sig(), 3, 4);
    ModelGenerator::new(&sig(), GenBounds::default(), seed)
        .take(count)
        .map(|m| {
            let w = rng.gen_range(0..m.world_count());
            let g = random_assignment(&mut rng, &m, w, 3);
            let phi = formulas.formula(&mut rng);
            (m, g, phi)
        })
        .collect()
}

#[test]
fn cone_locality() {
    for (m, g, phi) in instances(21, 300) {
        let cone = restrict_to_cone(&m, g.world());
        assert!(cone.model.check_adequacy().is_adequate());
        let h = g.moved_to(cone.root);
        assert_eq!(sat(&m, &g, &phi), sat(&cone.model, &h, &phi));
    }
}

#[test]
fn free_variable_lemmas() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for (m, g, phi) in instances(22, 300) {
        let fv = phi.free_vars();
        // Reassign everything outside fv(φ).
        let mut h =
            Assignment::new(&m, g.world(), rng.gen_range(0..m.domain_size(g.world()))).unwrap();
        for &x in &fv {
            h.bind(&m, x, g.get(x)).unwrap();
        }
        assert!(xeq(&g, &h, &fv));
        assert_eq!(sat(&m, &g, &phi), sat(&m, &h, &phi));

        let gamma: BTreeSet<VarName> = (0..6).map(VarName).filter(|x| !fv.contains(x)).collect();
        let mut k = g.clone();
        for &x in &gamma {
            k.bind(&m, x, rng.gen_range(0..m.domain_size(g.world())))
                .unwrap();
        }
        assert!(xaltern(&g, &k, &gamma));
        assert_eq!(sat(&m, &g, &phi), sat(&m, &k, &phi));
    }
}

#[test]
fn substitution_lemma() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let formulas = FormulaGen::new(&sig(), 3, 4);
    for (m, g, phi) in instances(23, 300) {
        let x = formulas.var(&mut rng);
        let t = formulas.term(&mut rng);
        if !phi.is_free_for(x, &t) {
            continue;
        }
        let gt = g.with(x, assign_term(&m, &g, &t).unwrap());
        assert_eq!(sat(&m, &gt, &phi), sat(&m, &g, &phi.substitute(x, &t)));
    }
}

#[test]
fn replacement_lemmas() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let formulas = FormulaGen::new(&sig(), 3, 4);
    for (m, g, phi) in instances(24, 300) {
        let c = if rng.gen_bool(0.5) { "c" } else { "d" };
        if phi.mentions_const(c) {
            continue;
        }
        let x = formulas.var(&mut rng);
        let cx = Term::constant(c);
        let w = g.world();
        let replaced = replace_const(&m, w, c, g.get(x)).unwrap();
        assert_eq!(
            sat(&m, &g, &phi),
            sat(&replaced, &g, &phi.substitute(x, &cx))
        );

        let (r, root) = restrict_replace(&m, w, c, g.get(x)).unwrap();
        assert!(r.check_adequacy().is_adequate());
        assert_eq!(
            sat(&m, &g, &phi),
            sat(&r, &g.moved_to(root), &phi.substitute(x, &cx))
        );
    }
}
