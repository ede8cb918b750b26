//! Exhaustive countermodel search over finite, constant-domain, irreflexive,
//! transitive models with identity η.
//!
//! Three reductions keep the enumeration small without changing whether a
//! witness exists within a given `(worlds, domain)` size:
//!
//! * Truth at `w` only depends on the cone of `w`, so only frames rooted at
//!   world 0 are enumerated, one per isomorphism class, and only world 0 is
//!   tried. A countermodel at a non-root world shows up at a smaller size.
//! * Rooted plus concordant plus identity η means each constant has a single
//!   value, and only variables free in the sequent are enumerated.
//! * Formulas are monotone in the predicate interpretation. If some `J`
//!   satisfies the antecedent and falsifies the consequent, so does every
//!   minimal support of the antecedent below `J`. The search therefore walks
//!   the supports of the antecedent and prunes as soon as the consequent holds.
//!
//! Order of enumeration: sizes by increasing `(worlds, domain)`; within a size,
//! frames by canonical code, then constant values and then free-variable values
//! lexicographically, then supports in depth-first order.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::{Budget, OutOfBudget, SearchBounds};
use crate::language::{Formula, Sequent, Signature, Term, VarName};
use crate::semantics::{sat, Assignment, Elem, Model, RawFrame, RawModel, World};

/// `M, w ⊩^g φ` and `M, w ⊮^g ψ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Countermodel {
    pub model: Model,
    pub world: World,
    pub assignment: Assignment,
}

impl Countermodel {
    /// Re-checks every property a refutation promises.
    pub fn verify(&self, seq: &Sequent) -> bool {
        self.model.check_adequacy().is_adequate()
            && self.model.is_irreflexive()
            && self.model.is_constant_domain()
            && self.assignment.world() == self.world
            && self.assignment.validate(&self.model).is_ok()
            && seq.is_well_formed(self.model.signature())
            && sat(&self.model, &self.assignment, &seq.antecedent)
            && !sat(&self.model, &self.assignment, &seq.consequent)
    }
}

/// First countermodel within `bounds.max_worlds` × `bounds.max_domain`.
pub fn enumerate_countermodels(
    sig: &Signature,
    seq: &Sequent,
    bounds: &SearchBounds,
    budget: &dyn Budget,
) -> Result<Option<Countermodel>, OutOfBudget> {
    let mut search = CountermodelSearch::new(sig, seq);
    for k in 1..=bounds.max_worlds {
        for n in 1..=bounds.max_domain {
            if let Some(cm) = search.search_size(k, n, budget)? {
                return Ok(Some(cm));
            }
        }
    }
    Ok(None)
}

/// Transitive irreflexive relations on `k` worlds in which world 0 sees every
/// other world, one per isomorphism class, sorted by canonical code.
pub fn rooted_frames(k: usize) -> Vec<Vec<Vec<bool>>> {
    assert!(k >= 1);
    let m = k - 1;
    // Strict orders on worlds 1..k, built so each new world's predecessors
    // form a down-set of the earlier ones.
    let mut orders: Vec<Vec<Vec<bool>>> = vec![Vec::new()];
    for i in 0..m {
        let mut next = Vec::new();
        for order in &orders {
            for mask in 0u32..(1 << i) {
                let preds: Vec<usize> = (0..i).filter(|j| mask >> j & 1 == 1).collect();
                let closed = preds
                    .iter()
                    .all(|&j| (0..i).all(|l| !order[l][j] || mask >> l & 1 == 1));
                if !closed {
                    continue;
                }
                let mut o: Vec<Vec<bool>> = order
                    .iter()
                    .map(|row| {
                        let mut r = row.clone();
                        r.push(false);
                        r
                    })
                    .collect();
                let mut row = vec![false; i + 1];
                for &j in &preds {
                    o[j][i] = true;
                }
                row[i] = false;
                o.push(row);
                next.push(o);
            }
        }
        orders = next;
    }
    let perms = permutations(m);
    let canon: BTreeSet<u64> = orders
        .iter()
        .map(|o| perms.iter().map(|p| encode(o, p)).min().unwrap_or(0))
        .collect();
    canon
        .into_iter()
        .map(|code| {
            let mut rel = vec![vec![false; k]; k];
            for r in rel[0].iter_mut().skip(1) {
                *r = true;
            }
            let mut bit = 0;
            for i in 0..m {
                for j in 0..m {
                    if i != j {
                        rel[i + 1][j + 1] = code >> bit & 1 == 1;
                        bit += 1;
                    }
                }
            }
            rel
        })
        .collect()
}

fn encode(order: &[Vec<bool>], perm: &[usize]) -> u64 {
    let m = order.len();
    let mut code = 0u64;
    let mut bit = 0;
    for i in 0..m {
        for j in 0..m {
            if i != j {
                if order[perm[i]][perm[j]] {
                    code |= 1 << bit;
                }
                bit += 1;
            }
        }
    }
    code
}

fn permutations(m: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for i in 0..m {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..=i).map(move |pos| {
                    let mut q = p.clone();
                    q.insert(pos, i);
                    q
                })
            })
            .collect();
    }
    out
}

/// Enumerates `values^len` tuples in lexicographic order.
fn lex_tuples(values: usize, len: usize) -> impl Iterator<Item = Vec<Elem>> {
    let total = if values == 0 && len > 0 {
        0
    } else {
        values.pow(len as u32)
    };
    (0..total).map(move |mut code| {
        let mut t = vec![0; len];
        for slot in t.iter_mut().rev() {
            *slot = code % values;
            code /= values;
        }
        t
    })
}

/// Incremental countermodel search for one sequent, one size at a time.
pub struct CountermodelSearch {
    sig: Signature,
    seq: Sequent,
    /// Predicates of the sequent with their arities.
    preds: Vec<(String, usize)>,
    consts: Vec<String>,
    /// Slot of every variable of the sequent, free or bound.
    slots: BTreeMap<VarName, usize>,
    free_slots: Vec<usize>,
    frames: BTreeMap<usize, Vec<Vec<Vec<bool>>>>,
}

impl CountermodelSearch {
    pub fn new(sig: &Signature, seq: &Sequent) -> Self {
        let mut preds = seq.antecedent.predicates();
        preds.extend(seq.consequent.predicates());
        let slots: BTreeMap<VarName, usize> = seq
            .all_vars()
            .into_iter()
            .enumerate()
            .map(|(i, x)| (x, i))
            .collect();
        let free_slots = seq.free_vars().iter().map(|x| slots[x]).collect();
        CountermodelSearch {
            sig: sig.clone(),
            seq: seq.clone(),
            preds: preds.into_iter().collect(),
            consts: seq.constants().into_iter().collect(),
            slots,
            free_slots,
            frames: BTreeMap::new(),
        }
    }

    /// Searches models with exactly `k` worlds and domain `0..n`.
    pub fn search_size(
        &mut self,
        k: usize,
        n: usize,
        budget: &dyn Budget,
    ) -> Result<Option<Countermodel>, OutOfBudget> {
        let frames = self
            .frames
            .entry(k)
            .or_insert_with(|| rooted_frames(k))
            .clone();
        let layout = Layout::new(&self.preds, k, n);
        for rel in &frames {
            for consts in lex_tuples(n, self.consts.len()) {
                for free in lex_tuples(n, self.free_slots.len()) {
                    if budget.exhausted() {
                        return Err(OutOfBudget);
                    }
                    let mut vals = vec![0; self.slots.len()];
                    for (&slot, &v) in self.free_slots.iter().zip(&free) {
                        vals[slot] = v;
                    }
                    let env = Env {
                        rel,
                        n,
                        layout: &layout,
                        preds: &self.preds,
                        consts: &self.consts,
                        const_vals: &consts,
                        slots: &self.slots,
                    };
                    let mut walk = Walk {
                        env: &env,
                        psi: &self.seq.consequent,
                        root_vals: &vals,
                        acc: vec![0u64; layout.words()],
                        steps: 0,
                        budget,
                    };
                    let mut goals = vec![Goal {
                        formula: &self.seq.antecedent,
                        world: 0,
                        vals: vals.clone(),
                    }];
                    if walk.supports(&mut goals)? {
                        let cm = self.build(rel, n, &consts, &vals, &walk.acc, &layout);
                        assert!(
                            cm.verify(&self.seq),
                            "countermodel search produced an invalid witness"
                        );
                        return Ok(Some(cm));
                    }
                }
            }
        }
        Ok(None)
    }

    fn build(
        &self,
        rel: &[Vec<bool>],
        n: usize,
        const_vals: &[Elem],
        vals: &[Elem],
        acc: &[u64],
        layout: &Layout,
    ) -> Countermodel {
        let k = rel.len();
        let frame = RawFrame::constant_domain(rel.to_vec(), n).expect("well-shaped frame");
        let consts: Vec<Vec<Elem>> = (0..k)
            .map(|_| {
                self.sig
                    .constants()
                    .map(|c| {
                        self.consts
                            .iter()
                            .position(|d| d == c)
                            .map_or(0, |i| const_vals[i])
                    })
                    .collect()
            })
            .collect();
        let preds = (0..k)
            .map(|w| {
                self.sig
                    .predicates()
                    .map(
                        |(p, arity)| match self.preds.iter().position(|(q, _)| q == p) {
                            Some(pi) => crate::semantics::tuples(n, arity)
                                .into_iter()
                                .filter(|t| layout.contains(acc, w, pi, t, n))
                                .collect(),
                            None => BTreeSet::new(),
                        },
                    )
                    .collect()
            })
            .collect();
        let raw = RawModel::new(self.sig.clone(), frame, consts, preds).expect("well-shaped model");
        let model = Model::new(raw).expect("constant-domain rooted models are adequate");
        let mut g = Assignment::new(&model, 0, 0).expect("nonempty domain");
        for x in self.seq.free_vars() {
            g.bind(&model, x, vals[self.slots[&x]]).expect("in range");
        }
        Countermodel {
            model,
            world: 0,
            assignment: g,
        }
    }
}

/// Dense numbering of the atoms `S(d̄)` at each world.
struct Layout {
    offsets: Vec<usize>,
    stride: usize,
    total: usize,
}

impl Layout {
    fn new(preds: &[(String, usize)], k: usize, n: usize) -> Self {
        let mut offsets = Vec::with_capacity(preds.len());
        let mut stride = 0;
        for (_, arity) in preds {
            offsets.push(stride);
            stride += n.pow(*arity as u32);
        }
        Layout {
            offsets,
            stride,
            total: stride * k,
        }
    }

    fn words(&self) -> usize {
        self.total.div_ceil(64).max(1)
    }

    fn index(&self, w: World, pred: usize, tuple: &[Elem], n: usize) -> usize {
        let code = tuple.iter().fold(0, |acc, &d| acc * n + d);
        w * self.stride + self.offsets[pred] + code
    }

    fn contains(&self, acc: &[u64], w: World, pred: usize, tuple: &[Elem], n: usize) -> bool {
        let i = self.index(w, pred, tuple, n);
        acc[i / 64] >> (i % 64) & 1 == 1
    }
}

struct Env<'a> {
    rel: &'a [Vec<bool>],
    n: usize,
    layout: &'a Layout,
    preds: &'a [(String, usize)],
    consts: &'a [String],
    const_vals: &'a [Elem],
    slots: &'a BTreeMap<VarName, usize>,
}

impl Env<'_> {
    fn term(&self, t: &Term, vals: &[Elem]) -> Elem {
        match t {
            Term::Var(x) => vals[self.slots[x]],
            Term::Const(c) => {
                let i = self
                    .consts
                    .iter()
                    .position(|d| d == c)
                    .expect("constant of the sequent");
                self.const_vals[i]
            }
        }
    }

    fn atom(&self, w: World, p: &str, args: &[Term], vals: &[Elem]) -> usize {
        let pi = self
            .preds
            .iter()
            .position(|(q, _)| q == p)
            .expect("predicate of the sequent");
        let tuple: Vec<Elem> = args.iter().map(|t| self.term(t, vals)).collect();
        self.layout.index(w, pi, &tuple, self.n)
    }

    fn eval(&self, f: &Formula, w: World, vals: &mut Vec<Elem>, acc: &[u64]) -> bool {
        match f {
            Formula::Top => true,
            Formula::Pred(p, args) => {
                let i = self.atom(w, p, args, vals);
                acc[i / 64] >> (i % 64) & 1 == 1
            }
            Formula::And(l, r) => self.eval(l, w, vals, acc) && self.eval(r, w, vals, acc),
            Formula::Diam(g) => {
                (0..self.rel.len()).any(|u| self.rel[w][u] && self.eval(g, u, vals, acc))
            }
            Formula::All(x, g) => {
                let slot = self.slots[x];
                let saved = vals[slot];
                let holds = (0..self.n).all(|d| {
                    vals[slot] = d;
                    self.eval(g, w, vals, acc)
                });
                vals[slot] = saved;
                holds
            }
        }
    }
}

struct Goal<'f> {
    formula: &'f Formula,
    world: World,
    vals: Vec<Elem>,
}

struct Walk<'a, 'e> {
    env: &'a Env<'e>,
    psi: &'a Formula,
    root_vals: &'a [Elem],
    acc: Vec<u64>,
    steps: usize,
    budget: &'a dyn Budget,
}

impl<'a> Walk<'a, '_> {
    fn consequent_holds(&self) -> bool {
        let mut vals = self.root_vals.to_vec();
        self.env.eval(self.psi, 0, &mut vals, &self.acc)
    }

    /// Depth-first over the ways of making every pending goal true with as few
    /// atoms as possible. Returns `true` once the accumulated atoms satisfy all
    /// goals while the consequent is still false; `acc` then holds the witness.
    fn supports<'f>(&mut self, goals: &mut Vec<Goal<'f>>) -> Result<bool, OutOfBudget> {
        self.steps += 1;
        if self.steps.is_multiple_of(4096) && self.budget.exhausted() {
            return Err(OutOfBudget);
        }
        let Some(goal) = goals.pop() else {
            return Ok(!self.consequent_holds());
        };
        let found = match goal.formula {
            Formula::Top => self.supports(goals)?,
            Formula::Pred(p, args) => {
                let i = self.env.atom(goal.world, p, args, &goal.vals);
                let (word, bit) = (i / 64, 1u64 << (i % 64));
                if self.acc[word] & bit != 0 {
                    self.supports(goals)?
                } else {
                    self.acc[word] |= bit;
                    // Adding atoms never falsifies the consequent again.
                    let found = !self.consequent_holds() && self.supports(goals)?;
                    if !found {
                        self.acc[word] &= !bit;
                    }
                    found
                }
            }
            Formula::And(l, r) => {
                let depth = goals.len();
                goals.push(Goal {
                    formula: r,
                    world: goal.world,
                    vals: goal.vals.clone(),
                });
                goals.push(Goal {
                    formula: l,
                    world: goal.world,
                    vals: goal.vals.clone(),
                });
                let found = self.supports(goals)?;
                goals.truncate(depth);
                found
            }
            Formula::Diam(g) => {
                let mut found = false;
                for u in 0..self.env.rel.len() {
                    if !self.env.rel[goal.world][u] {
                        continue;
                    }
                    let depth = goals.len();
                    goals.push(Goal {
                        formula: g,
                        world: u,
                        vals: goal.vals.clone(),
                    });
                    found = self.supports(goals)?;
                    goals.truncate(depth);
                    if found {
                        break;
                    }
                }
                found
            }
            Formula::All(x, g) => {
                let slot = self.env.slots[x];
                let depth = goals.len();
                for d in (0..self.env.n).rev() {
                    let mut vals = goal.vals.clone();
                    vals[slot] = d;
                    goals.push(Goal {
                        formula: g,
                        world: goal.world,
                        vals,
                    });
                }
                let found = self.supports(goals)?;
                goals.truncate(depth);
                found
            }
        };
        if !found {
            goals.push(goal);
        }
        Ok(found)
    }
}
