use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::calculus::{check, CheckError, Derivation};
use crate::gen::random_assignment;
use crate::language::Sequent;
use crate::semantics::{sat, Assignment, Model, World};

/// A model, world and assignment at which a checked sequent fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub sequent: Sequent,
    /// Position in the model slice.
    pub model: usize,
    pub world: World,
    pub assignment: Assignment,
}

/// Checks `d`, then evaluates its conclusion at every world of every model
/// under `samples` random assignments per world.
pub fn soundness_check(
    d: &Derivation,
    sig: &crate::language::Signature,
    models: &[Model],
    samples: usize,
    seed: u64,
) -> Result<Option<Violation>, CheckError> {
    let seq = check(d, sig)?;
    let vars = seq.all_vars().iter().map(|x| x.0 + 1).max().unwrap_or(0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (i, m) in models.iter().enumerate() {
        for w in m.worlds() {
            let gs: Vec<Assignment> = (0..samples)
                .map(|_| random_assignment(&mut rng, m, w, vars))
                .collect();
            for g in gs {
                if sat(m, &g, &seq.antecedent) && !sat(m, &g, &seq.consequent) {
                    return Ok(Some(Violation {
                        sequent: seq,
                        model: i,
                        world: w,
                        assignment: g,
                    }));
                }
            }
        }
    }
    Ok(None)
}
