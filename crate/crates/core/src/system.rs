//! Storage nodes, initial placement, and the system they form.

use std::sync::Arc;

use thiserror::Error;

use crate::file::{split_striped, unsplit_striped, FileError};
use crate::gf::{BaseField, BaseSymbol, ExtField, FieldElement, FieldError};
use crate::linpoly::{Combine, EvalPoint, LinearizedPoly};
use crate::mds::{make_cauchy_generator, MdsError, SystematicGenerator};
use crate::params::{validate_params, Mode, ParamError, ParamSpec, SystemParams};
use crate::repair::{execute_round_inner, RepairError, RepairRound};
use crate::subspace::SubspaceBasis;

/// A point with one y-value per stripe. All stripes share the x-coordinate,
/// and every linear operation treats the y-values identically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StoredPoint {
    pub x: FieldElement,
    pub ys: Vec<FieldElement>,
}

impl StoredPoint {
    pub fn stripe(&self, s: usize) -> EvalPoint {
        EvalPoint { x: self.x.clone(), y: self.ys[s].clone() }
    }
}

impl Combine for StoredPoint {
    fn zero_like(&self, field: &ExtField) -> Self {
        StoredPoint { x: field.zero(), ys: vec![field.zero(); self.ys.len()] }
    }

    fn add_scaled(&mut self, field: &ExtField, c: BaseSymbol, other: &Self) {
        field.add_scaled(&mut self.x, c, &other.x);
        for (y, oy) in self.ys.iter_mut().zip(&other.ys) {
            field.add_scaled(y, c, oy);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeState {
    /// 1-based node index.
    pub id: usize,
    /// `alpha` points with independent x-coordinates.
    pub stored: Vec<StoredPoint>,
    /// `n - 1` symbols `w_{i,j}`, the systematic `(n-1, alpha)` encoding of
    /// `stored`, ordered by target node id.
    pub codeword: Vec<StoredPoint>,
    /// Round in which the content was last written (0 = initial placement).
    pub generation: u64,
}

impl NodeState {
    pub fn empty(id: usize) -> Self {
        Self { id, stored: Vec::new(), codeword: Vec::new(), generation: 0 }
    }

    pub fn xs(&self) -> impl Iterator<Item = &FieldElement> {
        self.stored.iter().map(|p| &p.x)
    }

    pub fn x_span(&self, field: &ExtField) -> SubspaceBasis {
        SubspaceBasis::from_elements(field, self.xs())
    }

    /// The symbol `w_{i,target}` this node transmits when `target` is repaired.
    pub fn symbol_for(&self, target: usize) -> Option<(usize, &StoredPoint)> {
        let pos = codeword_position(self.id, target)?;
        self.codeword.get(pos).map(|p| (pos, p))
    }
}

/// Index of `w_{node,target}` within node's codeword: the codeword positions
/// are `[n] \ {node}` in ascending order.
pub fn codeword_position(node: usize, target: usize) -> Option<usize> {
    match target.cmp(&node) {
        std::cmp::Ordering::Less => target.checked_sub(1),
        std::cmp::Ordering::Equal => None,
        std::cmp::Ordering::Greater => Some(target - 2),
    }
}

#[derive(Debug, Error)]
pub enum BuildError {
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Mds(#[from] MdsError),
    #[error(transparent)]
    File(#[from] FileError),
    #[error("initial placement failed: {0}")]
    Placement(#[from] RepairError),
}

#[derive(Debug, Clone)]
pub struct StorageSystem {
    pub(crate) params: SystemParams,
    pub(crate) field: Arc<ExtField>,
    pub(crate) nodes: Vec<NodeState>,
    /// Stripe polynomials, kept only to check that points stay on them.
    pub(crate) oracle_polys: Vec<LinearizedPoly>,
    pub(crate) oracle_checks: bool,
    /// `(2r, r)` at MBR, `(3r, 2r)` at the interior point.
    pub(crate) repair_code: SystematicGenerator,
    /// `(n - 1, alpha)`.
    pub(crate) node_code: SystematicGenerator,
    pub(crate) history: Vec<RepairRound>,
}

/// Builds the field, codes, and node contents for a file.
///
/// The first `d` nodes receive disjoint blocks of `alpha` standard basis
/// vectors of GF(q^m) as x-coordinates. The remaining nodes are filled by
/// broadcast repair rounds with helpers `1..=d`, `r` nodes at a time.
pub fn build_system(params: &SystemParams, data: &[u8]) -> Result<StorageSystem, BuildError> {
    let params = validate_params(&ParamSpec {
        n: params.n,
        k: params.k,
        d: params.d,
        r: params.r,
        mode: params.mode,
        b: params.b,
        m: Some(params.m),
    })?;
    let base = BaseField::new(params.b)?;
    let field = Arc::new(ExtField::new(base, params.m)?);
    let polys = split_striped(&field, data, &params);
    let mut system = StorageSystem::empty(params, field, polys)?;

    let alpha = params.alpha;
    for id in 1..=params.d {
        let xs = (0..alpha).map(|j| system.field.basis((id - 1) * alpha + j));
        let stored = xs.map(|x| system.evaluate_all(x)).collect();
        system.install(id, stored, 0);
    }
    let helpers: Vec<usize> = (1..=params.d).collect();
    let pending: Vec<usize> = (params.d + 1..=params.n).collect();
    for group in pending.chunks(params.r) {
        execute_round_inner(&mut system, group, &helpers, true)?;
    }
    Ok(system)
}

impl StorageSystem {
    pub(crate) fn empty(
        params: SystemParams,
        field: Arc<ExtField>,
        polys: Vec<LinearizedPoly>,
    ) -> Result<Self, BuildError> {
        let base = field.base();
        let node_code = make_cauchy_generator(base, params.alpha, params.n - 1)?;
        let repair_code = match params.mode {
            Mode::Mbr => make_cauchy_generator(base, params.r, 2 * params.r)?,
            Mode::Interior => make_cauchy_generator(base, 2 * params.r, 3 * params.r)?,
        };
        Ok(Self {
            params,
            field,
            nodes: (1..=params.n).map(NodeState::empty).collect(),
            oracle_polys: polys,
            oracle_checks: true,
            repair_code,
            node_code,
            history: Vec::new(),
        })
    }

    fn evaluate_all(&self, x: FieldElement) -> StoredPoint {
        let ys = self.oracle_polys.iter().map(|p| p.evaluate(&self.field, &x)).collect();
        StoredPoint { x, ys }
    }

    /// Stores points at a node and re-encodes its codeword.
    pub(crate) fn install(&mut self, id: usize, stored: Vec<StoredPoint>, generation: u64) {
        let codeword = self
            .node_code
            .encode_rows(&self.field, &stored)
            .expect("node holds alpha points");
        let node = &mut self.nodes[id - 1];
        node.stored = stored;
        node.codeword = codeword;
        node.generation = generation;
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn field(&self) -> &ExtField {
        &self.field
    }

    pub fn nodes(&self) -> &[NodeState] {
        &self.nodes
    }

    /// Node by 1-based id.
    pub fn node(&self, id: usize) -> Option<&NodeState> {
        id.checked_sub(1).and_then(|i| self.nodes.get(i))
    }

    /// Direct access for fault injection in tests and fixtures. Nothing
    /// re-encodes or re-validates the node afterwards.
    pub fn node_mut(&mut self, id: usize) -> Option<&mut NodeState> {
        id.checked_sub(1).and_then(move |i| self.nodes.get_mut(i))
    }

    pub fn history(&self) -> &[RepairRound] {
        &self.history
    }

    /// Repair rounds run after initial placement.
    pub fn repair_rounds(&self) -> impl Iterator<Item = &RepairRound> {
        self.history.iter().filter(|r| !r.placement)
    }

    /// The shared repair matrix: `r x r` at MBR, `2r x r` at the interior point.
    pub fn repair_matrix(&self) -> &[Vec<BaseSymbol>] {
        self.repair_code.parity()
    }

    pub fn repair_code(&self) -> &SystematicGenerator {
        &self.repair_code
    }

    pub fn node_code(&self) -> &SystematicGenerator {
        &self.node_code
    }

    pub fn stripes(&self) -> usize {
        self.oracle_polys.len()
    }

    pub fn oracle_polys(&self) -> &[LinearizedPoly] {
        &self.oracle_polys
    }

    /// Whether repair rounds check new points against the stripe polynomials.
    pub fn oracle_checks(&self) -> bool {
        self.oracle_checks
    }

    pub fn set_oracle_checks(&mut self, on: bool) {
        self.oracle_checks = on;
    }

    /// Whether every stored and codeword point of every node lies on its
    /// stripe polynomial.
    pub fn all_points_on_polynomial(&self) -> bool {
        self.nodes.iter().all(|n| {
            n.stored.iter().chain(&n.codeword).all(|p| self.on_polynomial(p))
        })
    }

    pub(crate) fn on_polynomial(&self, p: &StoredPoint) -> bool {
        self.oracle_polys
            .iter()
            .zip(&p.ys)
            .all(|(poly, y)| poly.evaluate(&self.field, &p.x) == *y)
    }

    /// x-span of each node, indexed by `id - 1`.
    pub fn node_spans(&self) -> Vec<SubspaceBasis> {
        self.nodes.iter().map(|n| n.x_span(&self.field)).collect()
    }

    /// The file as originally stored, decoded from the retained polynomials.
    pub fn oracle_file(&self) -> Result<Vec<u8>, FileError> {
        unsplit_striped(&self.field, &self.oracle_polys, &self.params)
    }

    pub(crate) fn next_round_id(&self) -> u64 {
        self.history.last().map_or(1, |r| r.round_id + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subspace::SubspaceBasis;

    #[test]
    fn codeword_positions_skip_self() {
        assert_eq!(codeword_position(1, 2), Some(0));
        assert_eq!(codeword_position(1, 12), Some(10));
        assert_eq!(codeword_position(5, 4), Some(3));
        assert_eq!(codeword_position(5, 6), Some(4));
        assert_eq!(codeword_position(5, 5), None);
        assert_eq!(codeword_position(3, 0), None);
    }

    #[test]
    fn small_mbr_build_invariants() {
        // n=6, k=2, d=4, r=2 over GF(16): alpha = 4, m = 16, B = 2*(8-2+2)/2 = 8
        let spec = ParamSpec::new(6, 2, 4, 2, Mode::Mbr).with_base_bits(4);
        let params = validate_params(&spec).unwrap();
        let sys = build_system(&params, b"hello").unwrap();
        assert_eq!(sys.nodes().len(), 6);
        assert!(sys.all_points_on_polynomial());
        for node in sys.nodes() {
            assert_eq!(node.x_span(sys.field()).dim(), params.alpha);
            assert_eq!(node.codeword.len(), params.n - 1);
            assert_eq!(&node.codeword[..params.alpha], &node.stored[..]);
        }
        let first: Vec<_> = sys.node_spans().into_iter().take(4).collect();
        let total = SubspaceBasis::sum_all(sys.field().base(), params.m, &first);
        assert_eq!(total.dim(), 16);
        assert_eq!(sys.history().len(), 1);
        assert!(sys.history()[0].placement);
        assert_eq!(sys.oracle_file().unwrap(), b"hello");
    }
}
