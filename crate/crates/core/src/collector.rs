//! Data collection: reconstruct the file from any `k` nodes.

use thiserror::Error;

use crate::file::{unsplit_striped, FileError};
use crate::linpoly::{interpolate_many, select_independent, PolyError};
use crate::subspace::SubspaceBasis;
use crate::system::{StorageSystem, StoredPoint};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CollectError {
    #[error("a data collector contacts exactly {expected} nodes, got {got}")]
    SubsetSize { expected: usize, got: usize },
    #[error("node {0} does not exist")]
    UnknownNode(usize),
    #[error("node {0} listed twice")]
    Duplicate(usize),
    #[error("dimension deficit: nodes span {achieved} dimensions, reconstruction needs {required}")]
    DimensionDeficit { achieved: usize, required: usize },
    #[error(transparent)]
    Interpolation(#[from] PolyError),
    #[error(transparent)]
    File(#[from] FileError),
}

fn check_subset(system: &StorageSystem, subset: &[usize]) -> Result<(), CollectError> {
    let p = system.params();
    if subset.len() != p.k {
        return Err(CollectError::SubsetSize { expected: p.k, got: subset.len() });
    }
    for (i, &id) in subset.iter().enumerate() {
        if id == 0 || id > p.n {
            return Err(CollectError::UnknownNode(id));
        }
        if subset[..i].contains(&id) {
            return Err(CollectError::Duplicate(id));
        }
    }
    Ok(())
}

fn stored_points<'a>(system: &'a StorageSystem, subset: &'a [usize]) -> impl Iterator<Item = &'a StoredPoint> {
    subset.iter().flat_map(move |&id| system.node(id).expect("checked").stored.iter())
}

/// Dimension of the x-span of everything stored on `subset`.
pub fn dc_dimension(system: &StorageSystem, subset: &[usize]) -> Result<usize, CollectError> {
    check_subset(system, subset)?;
    Ok(SubspaceBasis::from_elements(system.field(), stored_points(system, subset).map(|p| &p.x)).dim())
}

/// Same as [`dc_dimension`] but over the full codewords instead of the
/// stored points.
pub fn dc_dimension_from_codewords(system: &StorageSystem, subset: &[usize]) -> Result<usize, CollectError> {
    check_subset(system, subset)?;
    let xs = subset
        .iter()
        .flat_map(|&id| system.node(id).expect("checked").codeword.iter().map(|p| &p.x));
    Ok(SubspaceBasis::from_elements(system.field(), xs).dim())
}

/// Reconstructs the file from the nodes in `subset`. Scans nodes in the
/// given order and points in stored order, keeping the first `B` points whose
/// x-coordinates are independent, then interpolates every stripe.
pub fn collect(system: &StorageSystem, subset: &[usize]) -> Result<Vec<u8>, CollectError> {
    check_subset(system, subset)?;
    let field = system.field();
    let required = system.params().subpackets;
    let chosen = select_independent(field, stored_points(system, subset), |p| &p.x, required);
    if chosen.len() < required {
        return Err(CollectError::DimensionDeficit { achieved: chosen.len(), required });
    }
    let xs: Vec<_> = chosen.iter().map(|p| p.x.clone()).collect();
    let ys: Vec<Vec<_>> = (0..system.stripes())
        .map(|s| chosen.iter().map(|p| p.ys[s].clone()).collect())
        .collect();
    let polys = interpolate_many(field, &xs, &ys)?;
    Ok(unsplit_striped(field, &polys, system.params())?)
}
