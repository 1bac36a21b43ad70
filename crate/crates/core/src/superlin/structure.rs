//! Bilinear forms and endomorphisms as parallel-structure candidates, and
//! their stabilizer subalgebras.

use serde::{Deserialize, Serialize};

use super::{SuperDim, SuperMatrix, SubSuperalgebra, SuperlinError};
use crate::linalg::{kernel, SparseVec};
use crate::parity::Parity;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StructureKind {
    EvenBilinearForm,
    OddBilinearForm,
    EvenEndomorphism,
    OddEndomorphism,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormSymmetry {
    Supersymmetric,
    #[serde(alias = "super_skew")]
    SuperSkew,
    None,
}

/// A tensor whose stabilizer is a candidate holonomy bound.
///
/// For forms, `data[a][b] = g(e_a, e_b)`; for endomorphisms, `data` is the
/// matrix of the operator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StructureTensor {
    pub kind: StructureKind,
    pub symmetry: FormSymmetry,
    pub data: SuperMatrix,
}

impl StructureTensor {
    pub fn form(data: SuperMatrix) -> Result<Self, SuperlinError> {
        let kind = match data.parity() {
            Some(Parity::Even) => StructureKind::EvenBilinearForm,
            Some(Parity::Odd) => StructureKind::OddBilinearForm,
            None => return Err(SuperlinError::NonHomogeneous),
        };
        let symmetry = detect_symmetry(&data);
        Ok(StructureTensor { kind, symmetry, data })
    }

    pub fn endomorphism(data: SuperMatrix) -> Result<Self, SuperlinError> {
        let kind = match data.parity() {
            Some(Parity::Even) => StructureKind::EvenEndomorphism,
            Some(Parity::Odd) => StructureKind::OddEndomorphism,
            None => return Err(SuperlinError::NonHomogeneous),
        };
        Ok(StructureTensor { kind, symmetry: FormSymmetry::None, data })
    }

    pub fn is_form(&self) -> bool {
        matches!(self.kind, StructureKind::EvenBilinearForm | StructureKind::OddBilinearForm)
    }

    pub fn parity(&self) -> Parity {
        match self.kind {
            StructureKind::EvenBilinearForm | StructureKind::EvenEndomorphism => Parity::Even,
            _ => Parity::Odd,
        }
    }

    /// Checks that kind and symmetry match the block pattern of `data`.
    pub fn validate(&self) -> Result<(), SuperlinError> {
        if self.data.parity() != Some(self.parity()) && !self.data.is_zero() {
            return Err(SuperlinError::InvalidParams(format!("{:?} data has the wrong block pattern", self.kind)));
        }
        if self.is_form() && self.symmetry != FormSymmetry::None && detect_symmetry(&self.data) != self.symmetry
            && !self.data.is_zero()
        {
            return Err(SuperlinError::InvalidParams(format!("form is not {:?}", self.symmetry)));
        }
        Ok(())
    }
}

/// Symmetry of a form under `g(X,Y) = ±(−1)^{|X||Y|} g(Y,X)`.
fn detect_symmetry(g: &SuperMatrix) -> FormSymmetry {
    let n = g.size();
    let d = g.dim();
    let check = |skew: bool| {
        (0..n).all(|a| {
            (0..n).all(|b| {
                let sign_neg = (d.parity(a) & d.parity(b) == 1) ^ skew;
                let rhs = if sign_neg { -g.get(b, a) } else { g.get(b, a).clone() };
                *g.get(a, b) == rhs
            })
        })
    };
    if check(false) {
        FormSymmetry::Supersymmetric
    } else if check(true) {
        FormSymmetry::SuperSkew
    } else {
        FormSymmetry::None
    }
}

/// Matrix positions `(r, c)` of parity `p`, used as unknowns.
pub(crate) fn positions(dim: SuperDim, p: Parity) -> Vec<(usize, usize)> {
    let n = dim.total();
    let mut out = Vec::new();
    for r in 0..n {
        for c in 0..n {
            if dim.parity(r) ^ dim.parity(c) == p.bit() {
                out.push((r, c));
            }
        }
    }
    out
}

/// Solves a homogeneous linear condition on matrices of parity `p`.
///
/// `constraint(unknown index, position)` must return the constraint rows
/// contributed by a unit matrix at `position`; rows are keyed by an equation
/// id so contributions accumulate into a full system.
pub(crate) fn solve_matrices(
    dim: SuperDim,
    p: Parity,
    equations: usize,
    contribution: impl Fn(usize, usize) -> Vec<(usize, Scalar)>,
) -> Vec<SuperMatrix> {
    let pos = positions(dim, p);
    let mut rows: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); equations];
    for (u, &(r, c)) in pos.iter().enumerate() {
        for (eq, v) in contribution(r, c) {
            rows[eq].push((u, v));
        }
    }
    let ker = kernel(pos.len(), rows.into_iter().map(SparseVec::from_pairs));
    ker.iter()
        .map(|v| {
            let mut m = SuperMatrix::zero(dim);
            for (u, x) in v.entries() {
                let (r, c) = pos[*u];
                m.set(r, c, x.clone());
            }
            m
        })
        .collect()
}

/// All homogeneous `A` annihilating the structure.
///
/// Forms: `g(AX,Y) + (−1)^{|A||X|} g(X,AY) = 0`. Endomorphisms: `[A,J] = 0`.
pub fn stabilizer_algebra(t: &StructureTensor) -> SubSuperalgebra {
    let dim = t.data.dim();
    let n = dim.total();
    let g = &t.data;
    let mut mats = Vec::new();
    for p in [Parity::Even, Parity::Odd] {
        let sols = if t.is_form() {
            // unit A = E_{rc}: g(A e_b, e_c') = δ_{b c} g(e_r, e_c'), g(e_b, A e_c') = δ_{c c'} g(e_b, e_r)
            solve_matrices(dim, p, n * n, |r, c| {
                let mut out = Vec::new();
                for y in 0..n {
                    let v = g.get(r, y);
                    if !v.is_zero() {
                        out.push((c * n + y, v.clone()));
                    }
                }
                for x in 0..n {
                    let v = g.get(x, r);
                    if !v.is_zero() {
                        let neg = p.bit() & dim.parity(x) == 1;
                        out.push((x * n + c, if neg { -v } else { v.clone() }));
                    }
                }
                out
            })
        } else {
            // [E_{rc}, J] = E_{rc} J − (−1)^{|A||J|} J E_{rc}
            let neg = p.is_odd() && t.parity().is_odd();
            solve_matrices(dim, p, n * n, |r, c| {
                let mut out = Vec::new();
                for y in 0..n {
                    let v = g.get(c, y);
                    if !v.is_zero() {
                        out.push((r * n + y, v.clone()));
                    }
                }
                for x in 0..n {
                    let v = g.get(x, r);
                    if !v.is_zero() {
                        out.push((x * n + c, if neg { v.clone() } else { -v }));
                    }
                }
                out
            })
        };
        mats.extend(sols);
    }
    SubSuperalgebra::span(dim, &mats).closure_with(&[])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::superlin::{superbracket, SuperMatrix};

    #[test]
    fn osp_1_2() {
        let d = SuperDim::new(1, 2);
        let g = SuperMatrix::from_ints(d, &[&[1, 0, 0], &[0, 0, 1], &[0, -1, 0]]);
        let t = StructureTensor::form(g.clone()).unwrap();
        assert_eq!(t.symmetry, FormSymmetry::Supersymmetric);
        let s = stabilizer_algebra(&t);
        assert_eq!(s.graded_dim(), SuperDim::new(3, 2));
        // direct check of the defining condition on every basis element
        for (p, a) in s.homogeneous_basis() {
            for x in 0..3 {
                for y in 0..3 {
                    let mut lhs = Scalar::zero();
                    for k in 0..3 {
                        lhs += &(a.get(k, x) * g.get(k, y));
                        let term = g.get(x, k) * a.get(k, y);
                        if p.bit() & d.parity(x) == 1 {
                            lhs -= &term;
                        } else {
                            lhs += &term;
                        }
                    }
                    assert!(lhs.is_zero());
                }
            }
        }
    }

    #[test]
    fn q1_from_odd_complex_structure() {
        let d = SuperDim::new(1, 1);
        let j = SuperMatrix::from_ints(d, &[&[0, 1], &[-1, 0]]);
        assert_eq!(j.mul(&j), SuperMatrix::identity(d).scale(&Scalar::from_int(-1)));
        let s = stabilizer_algebra(&StructureTensor::endomorphism(j.clone()).unwrap());
        assert_eq!(s.graded_dim(), SuperDim::new(1, 1));
        for (_, a) in s.homogeneous_basis() {
            assert!(superbracket(&a, &j).unwrap().is_zero());
        }
    }

    #[test]
    fn zero_tensor_gives_everything() {
        let d = SuperDim::new(2, 1);
        let s = stabilizer_algebra(&StructureTensor::form(SuperMatrix::zero(d)).unwrap());
        assert_eq!(s.graded_dim(), SuperDim::new(5, 4));
    }
}
