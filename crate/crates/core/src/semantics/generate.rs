//! Seeded generator of adequate models for property testing.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Elem, Model, RawFrame, RawModel};
use crate::language::Signature;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenBounds {
    pub max_worlds: usize,
    pub max_domain: usize,
}

impl Default for GenBounds {
    fn default() -> Self {
        GenBounds {
            max_worlds: 4,
            max_domain: 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// One shared domain, identity η, random transitively closed `R`
    /// (reflexive loops allowed).
    ConstantDomain,
    /// `R` is the strict ancestor order of a random forest; η is random on
    /// tree edges and composed along tree paths.
    Forest,
}

/// Infinite stream of adequate models, alternating the two families.
pub struct ModelGenerator {
    sig: Signature,
    bounds: GenBounds,
    rng: ChaCha8Rng,
    family: Option<Family>,
    count: u64,
}

impl ModelGenerator {
    pub fn new(sig: &Signature, bounds: GenBounds, seed: u64) -> Self {
        assert!(bounds.max_worlds > 0 && bounds.max_domain > 0);
        ModelGenerator {
            sig: sig.clone(),
            bounds,
            rng: ChaCha8Rng::seed_from_u64(seed),
            family: None,
            count: 0,
        }
    }

    /// Restricts the stream to one family.
    pub fn only(mut self, family: Family) -> Self {
        self.family = Some(family);
        self
    }

    pub fn generate(&mut self, family: Family) -> Model {
        let raw = match family {
            Family::ConstantDomain => self.constant_domain(),
            Family::Forest => self.forest(),
        };
        Model::new(raw).expect("generated models are adequate by construction")
    }

    fn constant_domain(&mut self) -> RawModel {
        let n = self.rng.gen_range(1..=self.bounds.max_worlds);
        let size = self.rng.gen_range(1..=self.bounds.max_domain);
        let density = self.rng.gen_range(0.1..0.6);
        let mut rel = vec![vec![false; n]; n];
        for row in rel.iter_mut() {
            for r in row.iter_mut() {
                *r = self.rng.gen_bool(density);
            }
        }
        transitive_closure(&mut rel);

        // With identity η, concordance forces a constant to be equal on any
        // two worlds joined by R, so pick one value per connected component.
        let component = components(&rel);
        let comps = component.iter().max().map_or(0, |m| m + 1);
        let per_comp: Vec<Vec<Elem>> = (0..comps)
            .map(|_| {
                (0..self.sig.constant_count())
                    .map(|_| self.rng.gen_range(0..size))
                    .collect()
            })
            .collect();
        let consts = component.iter().map(|&c| per_comp[c].clone()).collect();
        let domains = vec![size; n];
        let preds = self.random_preds(&domains);
        let frame = RawFrame::constant_domain(rel, size).expect("well-shaped frame");
        RawModel::new(self.sig.clone(), frame, consts, preds).expect("well-shaped model")
    }

    fn forest(&mut self) -> RawModel {
        let n = self.rng.gen_range(1..=self.bounds.max_worlds);
        let domains: Vec<usize> = (0..n)
            .map(|_| self.rng.gen_range(1..=self.bounds.max_domain))
            .collect();
        let parent: Vec<Option<usize>> = (0..n)
            .map(|w| {
                if w == 0 || self.rng.gen_bool(0.25) {
                    None
                } else {
                    Some(self.rng.gen_range(0..w))
                }
            })
            .collect();
        let edge: Vec<Vec<Elem>> = (0..n)
            .map(|w| match parent[w] {
                Some(p) => (0..domains[p])
                    .map(|_| self.rng.gen_range(0..domains[w]))
                    .collect(),
                None => Vec::new(),
            })
            .collect();

        // Parents have smaller indices, so ancestors' maps are ready first.
        let mut rel = vec![vec![false; n]; n];
        let mut eta: Vec<Vec<Vec<Elem>>> = (0..n)
            .map(|w| (0..n).map(|_| vec![0; domains[w]]).collect())
            .collect();
        for w in 0..n {
            eta[w][w] = (0..domains[w]).collect();
        }
        for u in 0..n {
            let Some(p) = parent[u] else { continue };
            let mut ancestors = vec![p];
            let mut cur = p;
            while let Some(q) = parent[cur] {
                ancestors.push(q);
                cur = q;
            }
            for a in ancestors {
                rel[a][u] = true;
                eta[a][u] = eta[a][p].iter().map(|&d| edge[u][d]).collect();
            }
        }

        let mut consts: Vec<Vec<Elem>> = Vec::with_capacity(n);
        for w in 0..n {
            let row = match parent[w] {
                None => (0..self.sig.constant_count())
                    .map(|_| self.rng.gen_range(0..domains[w]))
                    .collect(),
                Some(p) => consts[p].iter().map(|&d| edge[w][d]).collect(),
            };
            consts.push(row);
        }
        let preds = self.random_preds(&domains);
        let frame = RawFrame::new(rel, domains, eta).expect("well-shaped frame");
        RawModel::new(self.sig.clone(), frame, consts, preds).expect("well-shaped model")
    }

    fn random_preds(&mut self, domains: &[usize]) -> Vec<Vec<BTreeSet<Vec<Elem>>>> {
        let density = self.rng.gen_range(0.2..0.8);
        let arities: Vec<usize> = self.sig.predicates().map(|(_, a)| a).collect();
        domains
            .iter()
            .map(|&size| {
                arities
                    .iter()
                    .map(|&arity| {
                        tuples(size, arity)
                            .into_iter()
                            .filter(|_| self.rng.gen_bool(density))
                            .collect()
                    })
                    .collect()
            })
            .collect()
    }
}

impl Iterator for ModelGenerator {
    type Item = Model;

    fn next(&mut self) -> Option<Model> {
        let family = self.family.unwrap_or(if self.count.is_multiple_of(2) {
            Family::ConstantDomain
        } else {
            Family::Forest
        });
        self.count += 1;
        Some(self.generate(family))
    }
}

/// All `arity`-tuples over `0..size`, lexicographically.
pub(crate) fn tuples(size: usize, arity: usize) -> Vec<Vec<Elem>> {
    let mut out = vec![Vec::new()];
    for _ in 0..arity {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..size).map(move |d| {
                    let mut t = t.clone();
                    t.push(d);
                    t
                })
            })
            .collect();
    }
    out
}

pub(crate) fn transitive_closure(rel: &mut [Vec<bool>]) {
    let n = rel.len();
    for k in 0..n {
        let via = rel[k].clone();
        for row in rel.iter_mut() {
            if row[k] {
                for (r, &v) in row.iter_mut().zip(&via) {
                    *r |= v;
                }
            }
        }
    }
}

/// Connected components of `R` seen as an undirected graph, numbered by
/// smallest member.
pub(crate) fn components(rel: &[Vec<bool>]) -> Vec<usize> {
    let n = rel.len();
    let mut comp = vec![usize::MAX; n];
    let mut next = 0;
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        let mut stack = vec![start];
        comp[start] = next;
        while let Some(w) = stack.pop() {
            for u in 0..n {
                if (rel[w][u] || rel[u][w]) && comp[u] == usize::MAX {
                    comp[u] = next;
                    stack.push(u);
                }
            }
        }
        next += 1;
    }
    comp
}
