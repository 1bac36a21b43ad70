//! A simple Lie superalgebra acting on its parity-reversed adjoint module.

use serde::Serialize;

use super::prolong::matrix_tensor;
use super::{berger_check, cartan_prolongation, Assembler, BergerError};
use crate::linalg::{Echelon, SparseVec};
use crate::parity::Parity;
use crate::scalar::Scalar;
use crate::superlin::{bracket_with, SubSuperalgebra, SuperDim, SuperMatrix};

/// Ideal sweep: nonzero, trivial center, perfect, and every basis element
/// generates the whole algebra as an ideal. Heuristic beyond that.
pub fn is_simple(g: &SubSuperalgebra) -> Result<(), BergerError> {
    if g.is_zero() {
        return Err(BergerError::NotSimple("zero algebra".into()));
    }
    let basis = g.homogeneous_basis();
    let n2 = g.ambient().total().pow(2);
    for p in [Parity::Even, Parity::Odd] {
        let part = g.basis(p);
        let mut sys = Assembler::new(part.len());
        for (j, (pb, b)) in basis.iter().enumerate() {
            for (i, a) in part.iter().enumerate() {
                for (e, val) in bracket_with(a, p, b, *pb).to_vec().entries() {
                    sys.add(j * n2 + e, i, val.clone());
                }
            }
        }
        if !part.is_empty() && !sys.kernel().is_empty() {
            return Err(BergerError::NotSimple("nonzero center".into()));
        }
    }
    let mut brackets = Vec::new();
    for (i, (pa, a)) in basis.iter().enumerate() {
        for (pb, b) in &basis[i..] {
            brackets.push(bracket_with(a, *pa, b, *pb));
        }
    }
    let derived = SubSuperalgebra::span(g.ambient(), &brackets);
    if !derived.same_as(g) {
        return Err(BergerError::NotSimple(format!("derived algebra has dim {}", derived.graded_dim())));
    }
    for (_, a) in &basis {
        let ideal = g.ideal_generated(a);
        if !ideal.same_as(g) {
            return Err(BergerError::NotSimple(format!("proper ideal of dim {}", ideal.graded_dim())));
        }
    }
    Ok(())
}

/// `ρ(x)(Π y) = Π[x, y]` on `V = Π(𝔤)`.
///
/// `V` has the odd basis elements of `𝔤` first (now even), then the even
/// ones. Returns the image algebra and the images `ρ(β_i)` of the basis
/// vectors `β_i` matching `e_i`.
pub fn pi_adjoint_representation(g: &SubSuperalgebra) -> (SubSuperalgebra, Vec<SuperMatrix>) {
    let gd = g.graded_dim();
    let v = SuperDim::new(gd.q, gd.p);
    let betas: Vec<(Parity, SuperMatrix)> = g
        .basis(Parity::Odd)
        .into_iter()
        .map(|m| (Parity::Odd, m))
        .chain(g.basis(Parity::Even).into_iter().map(|m| (Parity::Even, m)))
        .collect();
    let offset = |p: Parity| if p.is_odd() { 0 } else { gd.q };
    let rho: Vec<SuperMatrix> = betas
        .iter()
        .map(|(px, x)| {
            let mut m = SuperMatrix::zero(v);
            for (i, (py, y)) in betas.iter().enumerate() {
                let br = bracket_with(x, *px, y, *py);
                if br.is_zero() {
                    continue;
                }
                let pr = *px + *py;
                let coords = g.coordinates(pr, &br).expect("bracket stays in the algebra");
                for (k, c) in coords.iter().enumerate() {
                    if !c.is_zero() {
                        m.set(offset(pr) + k, i, c.clone());
                    }
                }
            }
            m
        })
        .collect();
    (SubSuperalgebra::span(v, &rho), rho)
}

#[derive(Clone, Debug, Serialize)]
pub struct PiAdjointReport {
    pub algebra_dim: SuperDim,
    pub rep: SuperDim,
    pub g1: SuperDim,
    pub g2: SuperDim,
    /// `𝔤_1` is spanned by `φ_1(x) = (−1)^{|x|} Π(x)`.
    pub generator_matches: bool,
    pub is_berger: bool,
    /// Simplicity was established by the ideal sweep only.
    pub simplicity_heuristic: bool,
}

impl PiAdjointReport {
    pub fn holds(&self) -> bool {
        self.g1 == SuperDim::new(0, 1) && self.g2 == SuperDim::new(0, 0) && self.generator_matches && self.is_berger
    }
}

pub fn pi_adjoint_test(g: &SubSuperalgebra) -> Result<PiAdjointReport, BergerError> {
    is_simple(g)?;
    let (rep, rho) = pi_adjoint_representation(g);
    assert_eq!(rep.graded_dim(), g.graded_dim(), "adjoint action of a simple algebra is faithful");
    let v = rep.ambient();
    let n = v.total();
    let tower = cartan_prolongation(v, &rep, 2)?;
    let g1 = tower.level(1);
    // φ_1(e_i) = (−1)^{|e_i|} ρ(β_i)
    let phi = SparseVec::from_pairs(rho.iter().enumerate().flat_map(|(i, m)| {
        let s = Scalar::sign(v.parity(i) == 1);
        matrix_tensor(m).entries().iter().map(move |(idx, val)| (i * n * n + idx, &s * val)).collect::<Vec<_>>()
    }));
    let mut span = Echelon::new(n * n * n);
    for t in &g1.odd {
        span.insert(t);
    }
    let generator_matches = g1.even.is_empty() && g1.odd.len() == 1 && !phi.is_zero() && span.contains(&phi);
    let is_berger = berger_check(&rep).is_berger;
    Ok(PiAdjointReport {
        algebra_dim: g.graded_dim(),
        rep: v,
        g1: g1.graded_dim(),
        g2: tower.level(2).graded_dim(),
        generator_matches,
        is_berger,
        simplicity_heuristic: true,
    })
}
