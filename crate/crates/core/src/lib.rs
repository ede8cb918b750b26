//! Proof kernel, finite Kripke semantics and a bounded decision procedure for
//! QRC₁, the quantified reflection calculus with one modality.
//!
//! The crate is `no_std` and only needs `alloc`. Everything that touches files,
//! clocks or the command line lives in the `qrc1` companion crate.
//!
//! * [`language`]: terms, strictly positive formulas, substitution and the
//!   `freefor` side condition, plus the concrete text syntax.
//! * [`calculus`]: derivation trees for the ten axioms and rules, the checker,
//!   and builders for derived rules.
//! * [`semantics`]: finite varying-domain Kripke models, adequacy, assignments,
//!   satisfaction and the model surgery used for constant elimination.
//! * [`search`]: soundness harness, countermodel enumeration, bounded proof
//!   search and the interleaved decision procedure.
//! * [`gen`]: seeded random formulas and derivations for property testing.
#![no_std]
#![allow(clippy::result_large_err)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod calculus;
pub mod gen;
pub mod language;
pub mod search;
pub mod semantics;

pub use calculus::{CheckError, Derivation, RuleTag};
pub use language::{Formula, Sequent, Signature, Term, VarName, VarTable};
pub use semantics::{Assignment, Model, RawModel};
