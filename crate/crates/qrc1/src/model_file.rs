//! JSON model files (`.qkm`).
//!
//! ```json
//! {
//!   "signature": { "constants": ["c"], "predicates": { "P": 1 } },
//!   "worlds": 2,
//!   "rel": [[0, 1]],
//!   "domains": [1, 1],
//!   "eta": [[[0], [0]], [[0], [0]]],
//!   "constInterp": [{ "c": 0 }, { "c": 0 }],
//!   "predInterp": [{ "P": [] }, { "P": [[0]] }]
//! }
//! ```
//!
//! `eta[w][u][d]` is `η_{w,u}(d)`. It may be omitted when every world has the
//! same domain, in which case every η is the identity. Predicates missing from
//! a world's `predInterp` entry are empty there.

use std::collections::{BTreeMap, BTreeSet};

use qrc1_core::language::SignatureError;
use qrc1_core::semantics::{Elem, ModelError, RawFrame, World};
use qrc1_core::RawModel;
use serde::{Deserialize, Serialize};

use crate::SignatureFile;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct ModelFile {
    pub signature: SignatureFile,
    pub worlds: usize,
    #[serde(default)]
    pub rel: Vec<(World, World)>,
    pub domains: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<Vec<Vec<Vec<Elem>>>>,
    #[serde(default)]
    pub const_interp: Vec<BTreeMap<String, Elem>>,
    #[serde(default)]
    pub pred_interp: Vec<BTreeMap<String, Vec<Vec<Elem>>>>,
}

#[derive(Debug, thiserror::Error)]
pub enum ModelFileError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("signature: {0}")]
    Signature(#[from] SignatureError),
    #[error("`{field}` has {found} entries for {worlds} worlds")]
    WorldCount {
        field: &'static str,
        worlds: usize,
        found: usize,
    },
    #[error("rel pair ({0}, {1}) names a world that does not exist")]
    RelOutOfRange(World, World),
    #[error("`eta` is required when domains differ")]
    MissingEta,
    #[error("world {world}: constant `{name}` is not interpreted")]
    MissingConstant { world: World, name: String },
    #[error("world {world}: `{name}` is not a declared constant")]
    UnknownConstant { world: World, name: String },
    #[error("world {world}: `{name}` is not a declared predicate")]
    UnknownPredicate { world: World, name: String },
    #[error("{0}")]
    Model(#[from] ModelError),
}

impl ModelFile {
    pub fn parse(text: &str) -> Result<RawModel, ModelFileError> {
        serde_json::from_str::<ModelFile>(text)?.to_model()
    }

    pub fn to_model(&self) -> Result<RawModel, ModelFileError> {
        let sig = self.signature.to_signature()?;
        let n = self.worlds;
        for (field, found) in [
            ("domains", self.domains.len()),
            ("constInterp", self.const_interp.len()),
            ("predInterp", self.pred_interp.len()),
        ] {
            // Interpretation lists may be left out entirely.
            if found != n && !(found == 0 && field != "domains") {
                return Err(ModelFileError::WorldCount {
                    field,
                    worlds: n,
                    found,
                });
            }
        }
        let mut rel = vec![vec![false; n]; n];
        for &(w, u) in &self.rel {
            if w >= n || u >= n {
                return Err(ModelFileError::RelOutOfRange(w, u));
            }
            rel[w][u] = true;
        }
        let frame = match &self.eta {
            Some(eta) => RawFrame::new(rel, self.domains.clone(), eta.clone())?,
            None => {
                let size = self.domains.first().copied().unwrap_or(0);
                if self.domains.iter().any(|&d| d != size) {
                    return Err(ModelFileError::MissingEta);
                }
                RawFrame::constant_domain(rel, size)?
            }
        };

        let empty = BTreeMap::new();
        let mut consts = Vec::with_capacity(n);
        for w in 0..n {
            let given = self.const_interp.get(w).unwrap_or(&empty);
            if let Some(name) = given.keys().find(|c| !sig.is_constant(c)) {
                return Err(ModelFileError::UnknownConstant {
                    world: w,
                    name: name.clone(),
                });
            }
            let row = sig
                .constants()
                .map(|c| {
                    given
                        .get(c)
                        .copied()
                        .ok_or_else(|| ModelFileError::MissingConstant {
                            world: w,
                            name: c.into(),
                        })
                })
                .collect::<Result<Vec<_>, _>>()?;
            consts.push(row);
        }

        let empty = BTreeMap::new();
        let mut preds = Vec::with_capacity(n);
        for w in 0..n {
            let given = self.pred_interp.get(w).unwrap_or(&empty);
            if let Some(name) = given.keys().find(|p| sig.arity(p).is_none()) {
                return Err(ModelFileError::UnknownPredicate {
                    world: w,
                    name: name.clone(),
                });
            }
            let row: Vec<BTreeSet<Vec<Elem>>> = sig
                .predicates()
                .map(|(p, _)| {
                    given
                        .get(p)
                        .map(|tuples| tuples.iter().cloned().collect())
                        .unwrap_or_default()
                })
                .collect();
            preds.push(row);
        }
        Ok(RawModel::new(sig, frame, consts, preds)?)
    }

    /// The file for a model, always with an explicit `eta`.
    pub fn from_model(m: &RawModel) -> Self {
        let sig = m.signature();
        let worlds = m.world_count();
        let rel = m
            .worlds()
            .flat_map(|w| m.successors(w).map(move |u| (w, u)))
            .collect();
        let eta = m
            .worlds()
            .map(|w| m.worlds().map(|u| m.eta_map(w, u).to_vec()).collect())
            .collect();
        let const_interp = m
            .const_table()
            .iter()
            .map(|row| {
                sig.constants()
                    .map(String::from)
                    .zip(row.iter().copied())
                    .collect()
            })
            .collect();
        let pred_interp = m
            .pred_table()
            .iter()
            .map(|row| {
                sig.predicates()
                    .zip(row)
                    .map(|((p, _), ext)| (p.to_string(), ext.iter().cloned().collect()))
                    .collect()
            })
            .collect();
        ModelFile {
            signature: SignatureFile::from_signature(sig),
            worlds,
            rel,
            domains: m.domains().to_vec(),
            eta: Some(eta),
            const_interp,
            pred_interp,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model files always serialize")
    }
}
