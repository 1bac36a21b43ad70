//! Infinitesimal holonomy superalgebras, invariant data, parallel sections
//! and the certificates built on them.

mod decompose;
mod sections;
mod transport;

use serde::Serialize;

pub use decompose::{associative_envelope, decomposability_certificate, Decomposability};
pub use sections::{check_parallel, reconstruct_parallel_section, SectionData, SectionError, SectionOutcome};
pub use transport::{
    conjugated_generators, numeric_parallel_transport, span_residual, square_loop, FloatMatrix, TransportError,
    TransportOperator,
};

use crate::geometry::{curvature, next_order, ConnectionData, DerivativeTable};
use crate::linalg::{kernel, Echelon, SparseVec};
use crate::parity::Parity;
use crate::scalar::Scalar;
use crate::superlin::{stabilizer_algebra, supertrace, StructureTensor, SubSuperalgebra, SuperDim, SuperMatrix};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HolonomyError {
    #[error("point has {got} coordinates, chart has {expected} even coordinates")]
    PointDimension { expected: usize, got: usize },
}

/// How far a holonomy computation can be trusted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HolonomyStatus {
    /// Every further generator is provably inside the algebra: the last
    /// derivative table vanished identically, or the algebra is all of
    /// `gl(p|q)`.
    Certified,
    /// One extra derivative order added nothing after closure.
    Plateau,
    /// The order cap was reached before either of the above.
    Capped,
}

/// A curvature-derivative generator evaluated at the base point.
#[derive(Clone, Debug)]
pub struct GeneratorEntry {
    pub order: usize,
    /// `[a_r, …, a_1, a, b]`, 0-based.
    pub slots: Vec<usize>,
    pub matrix: SuperMatrix,
}

#[derive(Clone, Debug)]
pub struct HolonomyResult {
    pub algebra: SubSuperalgebra,
    /// Highest derivative order whose generators were needed; `None` when capped.
    pub stabilized_at_order: Option<usize>,
    pub status: HolonomyStatus,
    pub generator_log: Vec<GeneratorEntry>,
}

impl HolonomyResult {
    pub fn dim(&self) -> SuperDim {
        self.algebra.graded_dim()
    }
}

/// Default order cap `2(p+q)² + m`.
pub fn default_cap(conn: &ConnectionData) -> usize {
    let ch = conn.chart();
    2 * ch.r() * ch.r() + ch.sig.m
}

fn check_point(conn: &ConnectionData, x: &[Scalar]) -> Result<(), HolonomyError> {
    let n = conn.chart().sig.n;
    if x.len() != n {
        return Err(HolonomyError::PointDimension { expected: n, got: x.len() });
    }
    Ok(())
}

/// Lie superalgebra generated by all `∇^r R(∂_a, ∂_b)` at `x` with `Γ̄ = 0`,
/// adding one derivative order at a time until an order adds nothing or
/// `cap` orders beyond the curvature have been evaluated.
pub fn infinitesimal_holonomy(conn: &ConnectionData, x: &[Scalar], cap: usize) -> Result<HolonomyResult, HolonomyError> {
    check_point(conn, x)?;
    let rank = conn.chart().rank;
    let full = rank.total() * rank.total();
    let mut log = Vec::new();
    let mut table: DerivativeTable = crate::geometry::covariant_derivatives(conn, None, 0)
        .expect("no reference connection")
        .pop()
        .unwrap();
    let mut algebra = SubSuperalgebra::zero(rank);
    let mut order: usize = 0;
    loop {
        if table.is_zero() {
            let last = order.saturating_sub(1);
            return Ok(HolonomyResult { algebra, stabilized_at_order: Some(last), status: HolonomyStatus::Certified, generator_log: log });
        }
        let before = algebra.dim_total();
        let mut gens = Vec::new();
        for (slots, m) in table.matrices_at(x, rank) {
            if !m.is_zero() {
                gens.push(m.clone());
                log.push(GeneratorEntry { order, slots, matrix: m });
            }
        }
        algebra = algebra.closure_with(&gens);
        if algebra.dim_total() == full {
            return Ok(HolonomyResult { algebra, stabilized_at_order: Some(order), status: HolonomyStatus::Certified, generator_log: log });
        }
        if order > 0 && algebra.dim_total() == before {
            return Ok(HolonomyResult {
                algebra,
                stabilized_at_order: Some(order - 1),
                status: HolonomyStatus::Plateau,
                generator_log: log,
            });
        }
        if order == cap {
            return Ok(HolonomyResult { algebra, stabilized_at_order: None, status: HolonomyStatus::Capped, generator_log: log });
        }
        table = next_order(conn, None, &table);
        order += 1;
    }
}

/// Common kernel of all basis operators, as homogeneous basis vectors.
pub fn invariant_vectors(h: &SubSuperalgebra) -> Vec<(Parity, Vec<Scalar>)> {
    let dim = h.ambient();
    let n = dim.total();
    let mut rows = Vec::new();
    for (_, a) in h.homogeneous_basis() {
        for r in 0..n {
            rows.push(SparseVec::from_dense(&(0..n).map(|c| a.get(r, c).clone()).collect::<Vec<_>>()));
        }
    }
    kernel(n, rows)
        .into_iter()
        .map(|v| {
            let p = v.leading().map(|(k, _)| dim.parity(k)).unwrap_or(0);
            (Parity::from_bool(p == 1), v.to_dense(n))
        })
        .collect()
}

/// True iff `A w ∈ span(W)` for every basis element `A` of `h` and `w ∈ W`.
pub fn test_invariant_subspace(h: &SubSuperalgebra, w: &[Vec<Scalar>]) -> bool {
    let n = h.ambient().total();
    let mut span = Echelon::new(n);
    for v in w {
        span.insert(&SparseVec::from_dense(v));
    }
    h.homogeneous_basis()
        .iter()
        .all(|(_, a)| w.iter().all(|v| span.contains(&SparseVec::from_dense(&a.apply(v)))))
}

/// Outcome of [`flatness_certificate`].
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Flatness {
    Flat,
    /// `R^A_{B a b} ≠ 0` for the 0-based witness `(B, a, b, A)`.
    NonFlat { witness: (usize, usize, usize, usize), value: String },
}

impl Flatness {
    pub fn is_flat(&self) -> bool {
        matches!(self, Flatness::Flat)
    }
}

pub fn flatness_certificate(conn: &ConnectionData) -> Flatness {
    let r = curvature(conn);
    match r.first_nonzero() {
        None => {
            let origin = vec![Scalar::zero(); conn.chart().sig.n];
            let h = infinitesimal_holonomy(conn, &origin, 0).expect("origin has the right length");
            assert!(h.algebra.is_zero(), "flat connection with nonzero holonomy");
            Flatness::Flat
        }
        Some(w) => Flatness::NonFlat { witness: w, value: r.get(w.0, w.1, w.2, w.3).to_string() },
    }
}

/// An upper bound for the holonomy algebra, usually a stabilizer.
#[derive(Clone, Debug)]
pub struct Candidate {
    pub name: String,
    pub bound: SubSuperalgebra,
}

impl Candidate {
    pub fn stabilizer(name: impl Into<String>, t: &StructureTensor) -> Self {
        Candidate { name: name.into(), bound: stabilizer_algebra(t) }
    }

    /// `{ξ ∈ gl : str(J∘ξ) = 0}` intersected with the stabilizers of `g` and `J`.
    pub fn special_unitary(name: impl Into<String>, g: &SuperMatrix, j: &SuperMatrix) -> Self {
        let sg = stabilizer_algebra(&StructureTensor::form(g.clone()).expect("homogeneous form"));
        let sj = stabilizer_algebra(&StructureTensor::endomorphism(j.clone()).expect("homogeneous J"));
        let u = sg.intersection(&sj);
        Candidate { name: name.into(), bound: u.cut(|x| supertrace(&j.mul(x))) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub structure: String,
    pub contained: bool,
}

/// Exact inclusion of `h` in each candidate bound.
pub fn classify_geometry(h: &SubSuperalgebra, candidates: &[Candidate]) -> Vec<Classification> {
    candidates
        .iter()
        .map(|c| Classification { structure: c.name.clone(), contained: c.bound.contains_all(h) })
        .collect()
}
