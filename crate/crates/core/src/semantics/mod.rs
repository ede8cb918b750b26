//! Finite Kripke models with varying domains.
//!
//! Worlds and domain elements are small indices: world `w` has the domain
//! `0..domain_size(w)`. Compatibility functions are stored for *every* ordered
//! pair of worlds, not just the related ones, which is what makes
//! [`replace_const`] total.

mod generate;
mod surgery;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::ops::Deref;

pub(crate) use generate::tuples;
pub use generate::{Family, GenBounds, ModelGenerator};
pub use surgery::{replace_const, restrict_replace, restrict_to_cone, Cone, SurgeryError};

use crate::language::{Formula, Signature, Term, VarName};

pub type World = usize;
pub type Elem = usize;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("a model needs at least one world")]
    NoWorlds,
    #[error("accessibility matrix is not {0}x{0}")]
    RelationShape(usize),
    #[error("compatibility function table is not {0}x{0}")]
    EtaShape(usize),
    #[error("eta({from}, {to}) must map {expected} elements, has {found}")]
    EtaLength {
        from: World,
        to: World,
        expected: usize,
        found: usize,
    },
    #[error("eta({from}, {to}) maps {elem} outside the target domain")]
    EtaRange { from: World, to: World, elem: Elem },
    #[error("interpretation tables do not cover {0} worlds")]
    InterpShape(usize),
    #[error("world {world}: constant `{constant}` is not interpreted in the domain")]
    ConstRange { world: World, constant: String },
    #[error("world {world}: predicate `{predicate}` has a tuple of the wrong arity or outside the domain")]
    TupleRange { world: World, predicate: String },
}

/// `⟨W, R, {M_w}, {η_{w,u}}⟩` with no adequacy requirement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawFrame {
    rel: Vec<Vec<bool>>,
    domains: Vec<usize>,
    eta: Vec<Vec<Vec<Elem>>>,
}

impl RawFrame {
    /// `eta[w][u][d]` is `η_{w,u}(d)`.
    pub fn new(
        rel: Vec<Vec<bool>>,
        domains: Vec<usize>,
        eta: Vec<Vec<Vec<Elem>>>,
    ) -> Result<Self, ModelError> {
        let n = domains.len();
        if n == 0 {
            return Err(ModelError::NoWorlds);
        }
        if rel.len() != n || rel.iter().any(|row| row.len() != n) {
            return Err(ModelError::RelationShape(n));
        }
        if eta.len() != n || eta.iter().any(|row| row.len() != n) {
            return Err(ModelError::EtaShape(n));
        }
        for (w, row) in eta.iter().enumerate() {
            for (u, map) in row.iter().enumerate() {
                if map.len() != domains[w] {
                    return Err(ModelError::EtaLength {
                        from: w,
                        to: u,
                        expected: domains[w],
                        found: map.len(),
                    });
                }
                if let Some(&elem) = map.iter().find(|&&e| e >= domains[u]) {
                    return Err(ModelError::EtaRange {
                        from: w,
                        to: u,
                        elem,
                    });
                }
            }
        }
        Ok(RawFrame { rel, domains, eta })
    }

    /// Every world has the domain `0..size` and every η is the identity.
    pub fn constant_domain(rel: Vec<Vec<bool>>, size: usize) -> Result<Self, ModelError> {
        let n = rel.len();
        let id: Vec<Elem> = (0..size).collect();
        let eta = alloc::vec![alloc::vec![id; n]; n];
        RawFrame::new(rel, alloc::vec![size; n], eta)
    }

    pub fn world_count(&self) -> usize {
        self.domains.len()
    }

    pub fn worlds(&self) -> core::ops::Range<World> {
        0..self.world_count()
    }

    pub fn related(&self, w: World, u: World) -> bool {
        self.rel[w][u]
    }

    pub fn successors(&self, w: World) -> impl Iterator<Item = World> + '_ {
        self.rel[w]
            .iter()
            .enumerate()
            .filter_map(|(u, &r)| r.then_some(u))
    }

    pub fn domain_size(&self, w: World) -> usize {
        self.domains[w]
    }

    pub fn eta(&self, w: World, u: World, d: Elem) -> Elem {
        self.eta[w][u][d]
    }

    pub fn eta_map(&self, w: World, u: World) -> &[Elem] {
        &self.eta[w][u]
    }

    pub fn relation(&self) -> &[Vec<bool>] {
        &self.rel
    }

    pub fn domains(&self) -> &[usize] {
        &self.domains
    }

    pub fn is_irreflexive(&self) -> bool {
        self.worlds().all(|w| !self.rel[w][w])
    }

    /// Same domain everywhere and every η the identity.
    pub fn is_constant_domain(&self) -> bool {
        let n = self.domains[0];
        self.domains.iter().all(|&d| d == n)
            && self.eta.iter().all(|row| {
                row.iter()
                    .all(|map| map.iter().enumerate().all(|(i, &e)| i == e))
            })
    }
}

/// A frame with constant interpretations `I_w` and predicate interpretations `J_w`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawModel {
    signature: Signature,
    frame: RawFrame,
    /// `consts[w][i]` interprets the `i`-th constant of the signature.
    consts: Vec<Vec<Elem>>,
    /// `preds[w][i]` is the extension of the `i`-th predicate of the signature.
    preds: Vec<Vec<BTreeSet<Vec<Elem>>>>,
}

impl RawModel {
    pub fn new(
        signature: Signature,
        frame: RawFrame,
        consts: Vec<Vec<Elem>>,
        preds: Vec<Vec<BTreeSet<Vec<Elem>>>>,
    ) -> Result<Self, ModelError> {
        let n = frame.world_count();
        if consts.len() != n
            || preds.len() != n
            || consts.iter().any(|c| c.len() != signature.constant_count())
            || preds.iter().any(|p| p.len() != signature.predicate_count())
        {
            return Err(ModelError::InterpShape(n));
        }
        for w in 0..n {
            let size = frame.domain_size(w);
            for (c, &v) in signature.constants().zip(&consts[w]) {
                if v >= size {
                    return Err(ModelError::ConstRange {
                        world: w,
                        constant: c.into(),
                    });
                }
            }
            for ((p, arity), ext) in signature.predicates().zip(&preds[w]) {
                if ext
                    .iter()
                    .any(|t| t.len() != arity || t.iter().any(|&e| e >= size))
                {
                    return Err(ModelError::TupleRange {
                        world: w,
                        predicate: p.into(),
                    });
                }
            }
        }
        Ok(RawModel {
            signature,
            frame,
            consts,
            preds,
        })
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn frame(&self) -> &RawFrame {
        &self.frame
    }

    pub fn const_table(&self) -> &[Vec<Elem>] {
        &self.consts
    }

    pub fn pred_table(&self) -> &[Vec<BTreeSet<Vec<Elem>>>] {
        &self.preds
    }

    /// `c^{I_w}`, if `c` is declared.
    pub fn const_value(&self, w: World, c: &str) -> Option<Elem> {
        self.signature.constant_index(c).map(|i| self.consts[w][i])
    }

    /// The tuples of `S^{J_w}`, if `S` is declared.
    pub fn extension(&self, w: World, pred: &str) -> Option<&BTreeSet<Vec<Elem>>> {
        self.signature
            .predicate_index(pred)
            .map(|i| &self.preds[w][i])
    }

    pub fn check_adequacy(&self) -> AdequacyReport {
        check_adequacy(self)
    }

    fn with_consts(&self, consts: Vec<Vec<Elem>>) -> RawModel {
        RawModel {
            consts,
            ..self.clone()
        }
    }
}

impl Deref for RawModel {
    type Target = RawFrame;

    fn deref(&self) -> &RawFrame {
        &self.frame
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FunctorialityWitness {
    pub w: World,
    pub u: World,
    pub v: World,
    pub elem: Elem,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConcordanceWitness {
    pub w: World,
    pub u: World,
    pub constant: String,
}

/// Outcome of the four adequacy conditions, each with a counterexample when it fails.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AdequacyReport {
    /// `wRu`, `uRv` but not `wRv`.
    pub transitivity: Option<(World, World, World)>,
    /// `wRu`, `uRv` and `η_{w,v}(d) ≠ η_{u,v}(η_{w,u}(d))`.
    pub functoriality: Option<FunctorialityWitness>,
    /// `η_{w,w}(d) ≠ d`.
    pub identity: Option<(World, Elem)>,
    /// `wRu` and `c^{I_u} ≠ η_{w,u}(c^{I_w})`.
    pub concordance: Option<ConcordanceWitness>,
}

impl AdequacyReport {
    pub fn transitive(&self) -> bool {
        self.transitivity.is_none()
    }

    pub fn eta_functorial(&self) -> bool {
        self.functoriality.is_none()
    }

    pub fn eta_identity(&self) -> bool {
        self.identity.is_none()
    }

    pub fn concordant(&self) -> bool {
        self.concordance.is_none()
    }

    pub fn is_adequate(&self) -> bool {
        self.transitive() && self.eta_functorial() && self.eta_identity() && self.concordant()
    }
}

/// Exhaustive check of the adequacy conditions; the first witness in index
/// order is reported for each failing condition.
pub fn check_adequacy(m: &RawModel) -> AdequacyReport {
    let f = &m.frame;
    let mut report = AdequacyReport::default();
    for w in f.worlds() {
        for u in f.successors(w) {
            for v in f.successors(u) {
                if report.transitivity.is_none() && !f.related(w, v) {
                    report.transitivity = Some((w, u, v));
                }
                if report.functoriality.is_none() {
                    if let Some(elem) = (0..f.domain_size(w))
                        .find(|&d| f.eta(w, v, d) != f.eta(u, v, f.eta(w, u, d)))
                    {
                        report.functoriality = Some(FunctorialityWitness { w, u, v, elem });
                    }
                }
            }
        }
    }
    report.identity = f.worlds().find_map(|w| {
        (0..f.domain_size(w))
            .find(|&d| f.eta(w, w, d) != d)
            .map(|d| (w, d))
    });
    'outer: for w in f.worlds() {
        for u in f.successors(w) {
            for (i, c) in m.signature.constants().enumerate() {
                if m.consts[u][i] != f.eta(w, u, m.consts[w][i]) {
                    report.concordance = Some(ConcordanceWitness {
                        w,
                        u,
                        constant: c.into(),
                    });
                    break 'outer;
                }
            }
        }
    }
    report
}

/// A raw model that passed [`check_adequacy`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Model(RawModel);

impl Model {
    pub fn new(raw: RawModel) -> Result<Model, AdequacyReport> {
        let report = check_adequacy(&raw);
        if report.is_adequate() {
            Ok(Model(raw))
        } else {
            Err(report)
        }
    }

    pub fn raw(&self) -> &RawModel {
        &self.0
    }

    pub fn into_raw(self) -> RawModel {
        self.0
    }
}

impl Deref for Model {
    type Target = RawModel;

    fn deref(&self) -> &RawModel {
        &self.0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum AssignmentError {
    #[error("world {0} does not exist")]
    NoSuchWorld(World),
    #[error("world {0} has an empty domain, so it has no assignments")]
    EmptyDomain(World),
    #[error("element {elem} is not in the domain of world {world}")]
    OutOfDomain { world: World, elem: Elem },
    #[error("undeclared constant `{0}`")]
    UndeclaredConstant(String),
}

/// A `w`-assignment: a default element plus finitely many overrides, standing
/// for the total map `x ↦ overrides(x) or default`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment {
    world: World,
    default: Elem,
    overrides: BTreeMap<VarName, Elem>,
}

impl Assignment {
    /// The assignment sending every variable to `default`.
    pub fn new(m: &RawModel, world: World, default: Elem) -> Result<Self, AssignmentError> {
        if world >= m.world_count() {
            return Err(AssignmentError::NoSuchWorld(world));
        }
        let size = m.domain_size(world);
        if size == 0 {
            return Err(AssignmentError::EmptyDomain(world));
        }
        if default >= size {
            return Err(AssignmentError::OutOfDomain {
                world,
                elem: default,
            });
        }
        Ok(Assignment {
            world,
            default,
            overrides: BTreeMap::new(),
        })
    }

    /// Sets `x ↦ d`, checking `d` against the domain.
    pub fn bind(&mut self, m: &RawModel, x: VarName, d: Elem) -> Result<(), AssignmentError> {
        if d >= m.domain_size(self.world) {
            return Err(AssignmentError::OutOfDomain {
                world: self.world,
                elem: d,
            });
        }
        self.set(x, d);
        Ok(())
    }

    /// `g[x ↦ d]`. The caller guarantees `d` lies in the domain.
    pub fn with(&self, x: VarName, d: Elem) -> Assignment {
        let mut g = self.clone();
        g.set(x, d);
        g
    }

    fn set(&mut self, x: VarName, d: Elem) {
        if d == self.default {
            self.overrides.remove(&x);
        } else {
            self.overrides.insert(x, d);
        }
    }

    pub fn world(&self) -> World {
        self.world
    }

    pub fn default_elem(&self) -> Elem {
        self.default
    }

    pub fn overrides(&self) -> &BTreeMap<VarName, Elem> {
        &self.overrides
    }

    pub fn get(&self, x: VarName) -> Elem {
        self.overrides.get(&x).copied().unwrap_or(self.default)
    }

    /// The same values, relabelled as an assignment at `world`. Used when a
    /// model is restricted and its worlds are renumbered.
    pub fn moved_to(&self, world: World) -> Assignment {
        Assignment {
            world,
            ..self.clone()
        }
    }

    /// Checks that every value lies in the domain of the assignment's world.
    pub fn validate(&self, m: &RawModel) -> Result<(), AssignmentError> {
        if self.world >= m.world_count() {
            return Err(AssignmentError::NoSuchWorld(self.world));
        }
        let size = m.domain_size(self.world);
        match core::iter::once(&self.default)
            .chain(self.overrides.values())
            .find(|&&e| e >= size)
        {
            Some(&elem) => Err(AssignmentError::OutOfDomain {
                world: self.world,
                elem,
            }),
            None => Ok(()),
        }
    }
}

/// `g(t)`: the variable's value, or `c^{I_w}` for a constant.
pub fn assign_term(m: &RawModel, g: &Assignment, t: &Term) -> Result<Elem, AssignmentError> {
    match t {
        Term::Var(x) => Ok(g.get(*x)),
        Term::Const(c) => m
            .const_value(g.world, c)
            .ok_or_else(|| AssignmentError::UndeclaredConstant(c.clone())),
    }
}

/// `η_{w,u} ∘ g` as a `u`-assignment.
pub fn eta_compose(m: &RawModel, u: World, g: &Assignment) -> Assignment {
    let map = m.eta_map(g.world, u);
    let mut out = Assignment {
        world: u,
        default: map[g.default],
        overrides: BTreeMap::new(),
    };
    for (&x, &d) in &g.overrides {
        out.set(x, map[d]);
    }
    out
}

/// `g` and `h` agree on every variable outside `gamma`. Exact over all
/// variables: outside the override keys both are their defaults.
pub fn xaltern(g: &Assignment, h: &Assignment, gamma: &BTreeSet<VarName>) -> bool {
    if g.default != h.default {
        return false;
    }
    g.overrides
        .keys()
        .chain(h.overrides.keys())
        .filter(|x| !gamma.contains(x))
        .all(|&x| g.get(x) == h.get(x))
}

/// `g` and `h` agree on every variable in `gamma`.
pub fn xeq(g: &Assignment, h: &Assignment, gamma: &BTreeSet<VarName>) -> bool {
    gamma.iter().all(|&x| g.get(x) == h.get(x))
}

/// `M, w ⊩^g φ` at the world of `g`. Adequacy is not required.
///
/// `φ` must be well formed in the model's signature; an undeclared name panics.
pub fn sat(m: &RawModel, g: &Assignment, phi: &Formula) -> bool {
    let w = g.world;
    match phi {
        Formula::Top => true,
        Formula::Pred(p, args) => {
            let ext = m
                .extension(w, p)
                .unwrap_or_else(|| panic!("undeclared predicate `{p}`"));
            let tuple: Vec<Elem> = args
                .iter()
                .map(|t| assign_term(m, g, t).unwrap_or_else(|e| panic!("{e}")))
                .collect();
            ext.contains(&tuple)
        }
        Formula::And(l, r) => sat(m, g, l) && sat(m, g, r),
        Formula::Diam(f) => m.successors(w).any(|u| sat(m, &eta_compose(m, u, g), f)),
        Formula::All(x, f) => (0..m.domain_size(w)).all(|d| sat(m, &g.with(*x, d), f)),
    }
}

#[cfg(test)]
mod tests;
