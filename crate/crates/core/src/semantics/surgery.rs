//! Model surgery behind the soundness of constant elimination: reinterpret a
//! constant from a world onward, then cut the model down to that world's cone.

use alloc::vec::Vec;

use super::{AdequacyReport, Elem, Model, RawFrame, RawModel, World};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SurgeryError {
    #[error("undeclared constant `{0}`")]
    UndeclaredConstant(alloc::string::String),
    #[error("world {0} does not exist")]
    NoSuchWorld(World),
    #[error("element {elem} is not in the domain of world {world}")]
    OutOfDomain { world: World, elem: Elem },
    /// The restricted model failed revalidation. Adequate input never gets here.
    #[error("internal invariant violated: surgery produced an inadequate model ({0:?})")]
    NotAdequate(AdequacyReport),
}

/// `I[w:c/d]`: at every world `u`, `c` now denotes `η_{w,u}(d)`. Other
/// constants keep their interpretation. The result is generally not adequate.
pub fn replace_const(m: &RawModel, w: World, c: &str, d: Elem) -> Result<RawModel, SurgeryError> {
    let idx = m
        .signature()
        .constant_index(c)
        .ok_or_else(|| SurgeryError::UndeclaredConstant(c.into()))?;
    if w >= m.world_count() {
        return Err(SurgeryError::NoSuchWorld(w));
    }
    if d >= m.domain_size(w) {
        return Err(SurgeryError::OutOfDomain { world: w, elem: d });
    }
    let mut consts = m.const_table().to_vec();
    for (u, row) in consts.iter_mut().enumerate() {
        row[idx] = m.eta(w, u, d);
    }
    Ok(m.with_consts(consts))
}

/// A model cut down to one world and its successors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cone {
    pub model: RawModel,
    /// Original index of each kept world, in increasing order.
    pub worlds: Vec<World>,
    /// New index of the world the cone was taken at.
    pub root: World,
}

impl Cone {
    /// New index of an original world, if it was kept.
    pub fn index_of(&self, original: World) -> Option<World> {
        self.worlds.iter().position(|&w| w == original)
    }
}

/// Keeps `{w} ∪ {u : w R u}` and restricts every table to it.
pub fn restrict_to_cone(m: &RawModel, w: World) -> Cone {
    let worlds: Vec<World> = m.worlds().filter(|&u| u == w || m.related(w, u)).collect();
    let rel = worlds
        .iter()
        .map(|&a| worlds.iter().map(|&b| m.related(a, b)).collect())
        .collect();
    let domains = worlds.iter().map(|&a| m.domain_size(a)).collect();
    let eta = worlds
        .iter()
        .map(|&a| worlds.iter().map(|&b| m.eta_map(a, b).to_vec()).collect())
        .collect();
    let frame = RawFrame::new(rel, domains, eta).expect("a sub-frame keeps its shape");
    let consts = worlds.iter().map(|u| m.const_table()[*u].clone()).collect();
    let preds = worlds.iter().map(|u| m.pred_table()[*u].clone()).collect();
    let model = RawModel::new(m.signature().clone(), frame, consts, preds)
        .expect("restricting tables keeps them in range");
    let root = worlds.iter().position(|&u| u == w).expect("w is kept");
    Cone {
        model,
        worlds,
        root,
    }
}

/// `M[w:c/d]↾w`, revalidated. Returns the model and the new index of `w`.
pub fn restrict_replace(
    m: &Model,
    w: World,
    c: &str,
    d: Elem,
) -> Result<(Model, World), SurgeryError> {
    let replaced = replace_const(m, w, c, d)?;
    let cone = restrict_to_cone(&replaced, w);
    let model = Model::new(cone.model).map_err(SurgeryError::NotAdequate)?;
    Ok((model, cone.root))
}
