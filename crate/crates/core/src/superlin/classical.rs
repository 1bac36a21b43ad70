//! Standard matrix realizations of the classical Lie superalgebras.

use serde::{Deserialize, Serialize};

use super::structure::stabilizer_algebra;
use super::{supertrace, StructureTensor, SubSuperalgebra, SuperDim, SuperMatrix, SuperlinError};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassicalName {
    Gl,
    Sl,
    Osp,
    OspSk,
    Pe,
    Spe,
    Q,
    Cosp,
    Cpe,
    Cspe,
}

impl std::str::FromStr for ClassicalName {
    type Err = SuperlinError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "gl" => ClassicalName::Gl,
            "sl" => ClassicalName::Sl,
            "osp" => ClassicalName::Osp,
            "osp_sk" | "ospsk" => ClassicalName::OspSk,
            "pe" => ClassicalName::Pe,
            "spe" => ClassicalName::Spe,
            "q" => ClassicalName::Q,
            "cosp" => ClassicalName::Cosp,
            "cpe" => ClassicalName::Cpe,
            "cspe" => ClassicalName::Cspe,
            other => return Err(SuperlinError::InvalidParams(format!("unknown algebra `{other}`"))),
        })
    }
}

fn symplectic(k: usize) -> Vec<Vec<Scalar>> {
    let mut m = vec![vec![Scalar::zero(); 2 * k]; 2 * k];
    for i in 0..k {
        m[i][k + i] = Scalar::one();
        m[k + i][i] = Scalar::from_int(-1);
    }
    m
}

fn unit(n: usize) -> Vec<Vec<Scalar>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }).collect()).collect()
}

/// Even supersymmetric form `diag(I_p; J_q)` (needs `q` even).
pub fn standard_even_form(p: usize, q: usize) -> Result<SuperMatrix, SuperlinError> {
    if q % 2 != 0 {
        return Err(SuperlinError::InvalidParams(format!("osp({p}|{q}) needs an even odd dimension")));
    }
    Ok(SuperMatrix::block_diag(&unit(p), &symplectic(q / 2)))
}

/// Even super-skew form `diag(J_p; I_q)` (needs `p` even).
pub fn standard_skew_form(p: usize, q: usize) -> Result<SuperMatrix, SuperlinError> {
    if p % 2 != 0 {
        return Err(SuperlinError::InvalidParams(format!("osp_sk({p}|{q}) needs an even even dimension")));
    }
    Ok(SuperMatrix::block_diag(&symplectic(p / 2), &unit(q)))
}

/// Odd supersymmetric form pairing `e_i` with `e_{n+i}`.
pub fn standard_odd_form(n: usize) -> SuperMatrix {
    let d = SuperDim::new(n, n);
    let mut g = SuperMatrix::zero(d);
    for i in 0..n {
        g.set(i, n + i, Scalar::one());
        g.set(n + i, i, Scalar::one());
    }
    g
}

/// Odd complex structure `J = [[0, I], [−I, 0]]` with `J² = −id`.
pub fn standard_odd_complex_structure(n: usize) -> SuperMatrix {
    let d = SuperDim::new(n, n);
    let mut j = SuperMatrix::zero(d);
    for i in 0..n {
        j.set(i, n + i, Scalar::one());
        j.set(n + i, i, Scalar::from_int(-1));
    }
    j
}

/// Classical superalgebra in its standard representation on `p|q`.
///
/// `pe`, `spe`, `q` and their central extensions need `p = q`.
pub fn classical_superalgebra(name: ClassicalName, p: usize, q: usize) -> Result<SubSuperalgebra, SuperlinError> {
    let dim = SuperDim::new(p, q);
    let square = || {
        if p == q {
            Ok(p)
        } else {
            Err(SuperlinError::InvalidParams(format!("{name:?} needs p = q, got {p}|{q}")))
        }
    };
    let with_center = |s: SubSuperalgebra| s.extended(&[SuperMatrix::identity(dim)]);
    Ok(match name {
        ClassicalName::Gl => SubSuperalgebra::full(dim),
        ClassicalName::Sl => SubSuperalgebra::full(dim).cut(supertrace),
        ClassicalName::Osp => stabilizer_algebra(&StructureTensor::form(standard_even_form(p, q)?)?),
        ClassicalName::OspSk => stabilizer_algebra(&StructureTensor::form(standard_skew_form(p, q)?)?),
        ClassicalName::Pe => stabilizer_algebra(&StructureTensor::form(standard_odd_form(square()?))?),
        ClassicalName::Spe => classical_superalgebra(ClassicalName::Pe, p, q)?.cut(supertrace),
        ClassicalName::Q => {
            stabilizer_algebra(&StructureTensor::endomorphism(standard_odd_complex_structure(square()?))?)
        }
        ClassicalName::Cosp => with_center(classical_superalgebra(ClassicalName::Osp, p, q)?),
        ClassicalName::Cpe => with_center(classical_superalgebra(ClassicalName::Pe, p, q)?),
        ClassicalName::Cspe => with_center(classical_superalgebra(ClassicalName::Spe, p, q)?),
    })
}
