//! File formats and command-line front end for `qrc1-core`.
//!
//! * `.qkm` model files: [`model_file`]
//! * `.qpf` proof files: [`proof_file`]
//! * the `qrc1` binary: [`cli`]

pub mod cli;
pub mod model_file;
pub mod proof_file;

use std::collections::BTreeMap;

use qrc1_core::language::SignatureError;
use qrc1_core::Signature;
use serde::{Deserialize, Serialize};

/// The signature block shared by both file formats.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignatureFile {
    #[serde(default)]
    pub constants: Vec<String>,
    /// Predicate name to arity.
    #[serde(default)]
    pub predicates: BTreeMap<String, usize>,
}

impl SignatureFile {
    pub fn to_signature(&self) -> Result<Signature, SignatureError> {
        let mut sig = Signature::new();
        for c in &self.constants {
            sig.add_constant(c)?;
        }
        for (p, &arity) in &self.predicates {
            sig.add_predicate(p, arity)?;
        }
        Ok(sig)
    }

    pub fn from_signature(sig: &Signature) -> Self {
        SignatureFile {
            constants: sig.constants().map(String::from).collect(),
            predicates: sig.predicates().map(|(p, a)| (p.into(), a)).collect(),
        }
    }
}
