//! Versioned JSON persistence for a [`StorageSystem`].
//!
//! Field elements are hex strings in the fixed-width byte format of
//! [`ExtField::to_bytes`]. The extension modulus is stored explicitly, so a
//! loaded system never repeats the modulus search.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::{BaseField, ExtField, FieldError};
use crate::linpoly::LinearizedPoly;
use crate::mds::{MdsError, SystematicGenerator};
use crate::params::{validate_params, ParamError, ParamSpec, SystemParams};
use crate::repair::RepairRound;
use crate::system::{BuildError, StorageSystem, StoredPoint};

pub const STATE_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum StateError {
    #[error("state file: {0}")]
    Io(#[from] std::io::Error),
    #[error("state file is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported state version {0} (expected {STATE_VERSION})")]
    Version(u32),
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Mds(#[from] MdsError),
    #[error("base field modulus {found:#x} does not match GF(2^{bits}) ({expected:#x})")]
    BaseModulus { found: u16, expected: u16, bits: u32 },
    #[error("malformed state: {0}")]
    Shape(String),
}

impl From<BuildError> for StateError {
    fn from(e: BuildError) -> Self {
        match e {
            BuildError::Param(e) => e.into(),
            BuildError::Field(e) => e.into(),
            BuildError::Mds(e) => e.into(),
            other => StateError::Shape(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointDoc {
    pub x: String,
    /// One evaluation per stripe.
    pub y: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeDoc {
    pub id: usize,
    pub generation: u64,
    pub stored: Vec<PointDoc>,
    pub codeword: Vec<PointDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateDoc {
    pub version: u32,
    pub params: SystemParams,
    pub base_poly: u16,
    /// Extension modulus coefficients, low degree first, one byte each.
    pub ext_poly: String,
    /// Seed for randomized operations on this state (failure patterns).
    pub seed: u64,
    pub oracle_checks: bool,
    pub repair_m: Vec<Vec<u8>>,
    pub node_gen: Vec<Vec<u8>>,
    /// Stripe polynomial coefficients, kept for verification only.
    pub poly: Vec<Vec<String>>,
    pub nodes: Vec<NodeDoc>,
    pub history: Vec<RepairRound>,
}

fn point_doc(field: &ExtField, p: &StoredPoint) -> PointDoc {
    PointDoc { x: field.to_hex(&p.x), y: p.ys.iter().map(|y| field.to_hex(y)).collect() }
}

fn point_from(field: &ExtField, doc: &PointDoc, stripes: usize) -> Result<StoredPoint, StateError> {
    if doc.y.len() != stripes {
        return Err(StateError::Shape(format!("point has {} stripe values, expected {stripes}", doc.y.len())));
    }
    Ok(StoredPoint {
        x: field.from_hex(&doc.x)?,
        ys: doc.y.iter().map(|y| field.from_hex(y)).collect::<Result<_, _>>()?,
    })
}

pub fn to_doc(system: &StorageSystem, seed: u64) -> StateDoc {
    let field = system.field();
    StateDoc {
        version: STATE_VERSION,
        params: *system.params(),
        base_poly: field.base().modulus(),
        ext_poly: hex::encode(field.modulus()),
        seed,
        oracle_checks: system.oracle_checks(),
        repair_m: system.repair_matrix().to_vec(),
        node_gen: system.node_code().parity().to_vec(),
        poly: system
            .oracle_polys()
            .iter()
            .map(|f| f.coeffs().iter().map(|c| field.to_hex(c)).collect())
            .collect(),
        nodes: system
            .nodes()
            .iter()
            .map(|n| NodeDoc {
                id: n.id,
                generation: n.generation,
                stored: n.stored.iter().map(|p| point_doc(field, p)).collect(),
                codeword: n.codeword.iter().map(|p| point_doc(field, p)).collect(),
            })
            .collect(),
        history: system.history().to_vec(),
    }
}

/// Rebuilds a system from a document, checking every shape and the field
/// moduli. Returns the system and the stored seed.
pub fn from_doc(doc: &StateDoc) -> Result<(StorageSystem, u64), StateError> {
    if doc.version != STATE_VERSION {
        return Err(StateError::Version(doc.version));
    }
    let p = doc.params;
    let params = validate_params(&ParamSpec { n: p.n, k: p.k, d: p.d, r: p.r, mode: p.mode, b: p.b, m: Some(p.m) })?;
    if params != p {
        return Err(StateError::Shape("derived parameters disagree with the stored ones".into()));
    }
    let base = BaseField::new(params.b)?;
    if base.modulus() != doc.base_poly {
        return Err(StateError::BaseModulus { found: doc.base_poly, expected: base.modulus(), bits: params.b });
    }
    let modulus = hex::decode(&doc.ext_poly).map_err(|e| FieldError::Hex(e.to_string()))?;
    if modulus.len() != params.m + 1 {
        return Err(StateError::Shape(format!("extension modulus has degree {}, expected {}", modulus.len().saturating_sub(1), params.m)));
    }
    let field = Arc::new(ExtField::with_modulus(base, modulus)?);

    if doc.poly.is_empty() {
        return Err(StateError::Shape("no stripe polynomials".into()));
    }
    let polys = doc
        .poly
        .iter()
        .map(|coeffs| {
            if coeffs.len() != params.subpackets {
                return Err(StateError::Shape(format!("stripe polynomial has {} terms, expected {}", coeffs.len(), params.subpackets)));
            }
            Ok(LinearizedPoly::new(coeffs.iter().map(|c| field.from_hex(c)).collect::<Result<_, _>>()?))
        })
        .collect::<Result<Vec<_>, StateError>>()?;
    let stripes = polys.len();

    let mut system = StorageSystem::empty(params, field, polys)?;
    let repair_code = SystematicGenerator::from_parity(
        system.repair_code().k_dim(),
        system.repair_code().n_len(),
        doc.repair_m.clone(),
    )?;
    let node_code = SystematicGenerator::from_parity(params.alpha, params.n - 1, doc.node_gen.clone())?;
    system.repair_code = repair_code;
    system.node_code = node_code;
    system.oracle_checks = doc.oracle_checks;

    if doc.nodes.len() != params.n {
        return Err(StateError::Shape(format!("{} nodes, expected {}", doc.nodes.len(), params.n)));
    }
    for (i, nd) in doc.nodes.iter().enumerate() {
        if nd.id != i + 1 {
            return Err(StateError::Shape(format!("node at position {} has id {}", i + 1, nd.id)));
        }
        let empty = nd.stored.is_empty() && nd.codeword.is_empty();
        if !empty && (nd.stored.len() != params.alpha || nd.codeword.len() != params.n - 1) {
            return Err(StateError::Shape(format!(
                "node {} holds {} points and {} codeword symbols, expected {} and {}",
                nd.id,
                nd.stored.len(),
                nd.codeword.len(),
                params.alpha,
                params.n - 1
            )));
        }
        let node = &mut system.nodes[i];
        node.generation = nd.generation;
        node.stored = nd.stored.iter().map(|pd| point_from(&system.field, pd, stripes)).collect::<Result<_, _>>()?;
        node.codeword = nd.codeword.iter().map(|pd| point_from(&system.field, pd, stripes)).collect::<Result<_, _>>()?;
    }
    system.history = doc.history.clone();
    Ok((system, doc.seed))
}

pub fn to_json(system: &StorageSystem, seed: u64) -> String {
    serde_json::to_string_pretty(&to_doc(system, seed)).expect("state serializes")
}

pub fn from_json(text: &str) -> Result<(StorageSystem, u64), StateError> {
    from_doc(&serde_json::from_str(text)?)
}

/// Writes the state through a temporary file and a rename, so a crash never
/// leaves a truncated state behind.
pub fn save(system: &StorageSystem, seed: u64, path: &Path) -> Result<(), StateError> {
    let tmp = path.with_extension("json.tmp");
    std::fs::write(&tmp, to_json(system, seed))?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

pub fn load(path: &Path) -> Result<(StorageSystem, u64), StateError> {
    from_json(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Mode;
    use crate::repair::execute_round;
    use crate::system::build_system;

    fn small() -> StorageSystem {
        let spec = ParamSpec::new(6, 2, 4, 2, Mode::Mbr).with_base_bits(4);
        build_system(&validate_params(&spec).unwrap(), b"state").unwrap()
    }

    #[test]
    fn round_trip_preserves_everything() {
        let mut sys = small();
        execute_round(&mut sys, &[1, 2], None).unwrap();
        let (back, seed) = from_json(&to_json(&sys, 99)).unwrap();
        assert_eq!(seed, 99);
        assert_eq!(back.nodes(), sys.nodes());
        assert_eq!(back.history(), sys.history());
        assert_eq!(back.repair_matrix(), sys.repair_matrix());
        assert_eq!(back.field().modulus(), sys.field().modulus());
        assert_eq!(back.oracle_polys(), sys.oracle_polys());
    }

    #[test]
    fn rejects_bad_version_and_shapes() {
        let sys = small();
        let mut doc = to_doc(&sys, 0);
        doc.version = 7;
        assert!(matches!(from_doc(&doc), Err(StateError::Version(7))));

        let mut doc = to_doc(&sys, 0);
        doc.nodes[2].stored.pop();
        assert!(matches!(from_doc(&doc), Err(StateError::Shape(_))));

        let mut doc = to_doc(&sys, 0);
        doc.ext_poly = hex::encode(vec![0u8; sys.params().m + 1]);
        assert!(matches!(from_doc(&doc), Err(StateError::Field(_))));

        assert!(matches!(from_json("{"), Err(StateError::Json(_))));
    }
}
