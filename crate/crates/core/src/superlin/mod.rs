//! Super linear algebra on a `p|q`-dimensional superspace.
//!
//! Basis vectors `e_1..e_p` are even and `e_{p+1}..e_{p+q}` odd. A matrix
//! entry `M[r][c]` is the `e_r` component of `M e_c`.

mod classical;
mod structure;
mod subalgebra;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use classical::{
    classical_superalgebra, standard_even_form, standard_odd_complex_structure, standard_odd_form, standard_skew_form,
    ClassicalName,
};
pub use structure::{stabilizer_algebra, FormSymmetry, StructureKind, StructureTensor};
pub use subalgebra::{generate_subalgebra, subalgebra_equal, subspace_query, Membership, SubSuperalgebra};

use crate::linalg::SparseVec;
use crate::parity::Parity;
use crate::scalar::Scalar;

/// Graded dimension `p|q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub struct SuperDim {
    pub p: usize,
    pub q: usize,
}

impl SuperDim {
    pub fn new(p: usize, q: usize) -> Self {
        SuperDim { p, q }
    }

    pub fn total(&self) -> usize {
        self.p + self.q
    }

    /// Parity bit of basis index `k` (0-based).
    #[inline]
    pub fn parity(&self, k: usize) -> u8 {
        u8::from(k >= self.p)
    }
}

impl fmt::Display for SuperDim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{}", self.p, self.q)
    }
}

/// Declared parity of a matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DeclaredParity {
    Even,
    Odd,
    None,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SuperlinError {
    #[error("matrix is not homogeneous")]
    NonHomogeneous,
    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(SuperDim, SuperDim),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

/// Endomorphism of a `p|q` superspace with exact entries.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SuperMatrix {
    dim: SuperDim,
    entries: Vec<Scalar>,
}

impl SuperMatrix {
    pub fn zero(dim: SuperDim) -> Self {
        let n = dim.total();
        SuperMatrix { dim, entries: vec![Scalar::zero(); n * n] }
    }

    pub fn identity(dim: SuperDim) -> Self {
        let mut m = SuperMatrix::zero(dim);
        for k in 0..dim.total() {
            m.set(k, k, Scalar::one());
        }
        m
    }

    /// Matrix unit `E_{rc}` (0-based).
    pub fn unit(dim: SuperDim, r: usize, c: usize) -> Self {
        let mut m = SuperMatrix::zero(dim);
        m.set(r, c, Scalar::one());
        m
    }

    pub fn from_rows(dim: SuperDim, rows: Vec<Vec<Scalar>>) -> Self {
        let n = dim.total();
        assert_eq!(rows.len(), n);
        let entries: Vec<Scalar> = rows.into_iter().flat_map(|r| {
            assert_eq!(r.len(), n);
            r
        }).collect();
        SuperMatrix { dim, entries }
    }

    pub fn from_ints(dim: SuperDim, rows: &[&[i64]]) -> Self {
        SuperMatrix::from_rows(dim, rows.iter().map(|r| r.iter().map(|&x| Scalar::from_int(x)).collect()).collect())
    }

    /// Block-diagonal matrix from an even block and an odd block.
    pub fn block_diag(even: &[Vec<Scalar>], odd: &[Vec<Scalar>]) -> Self {
        let dim = SuperDim::new(even.len(), odd.len());
        let mut m = SuperMatrix::zero(dim);
        for (r, row) in even.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                m.set(r, c, v.clone());
            }
        }
        for (r, row) in odd.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                m.set(dim.p + r, dim.p + c, v.clone());
            }
        }
        m
    }

    pub fn dim(&self) -> SuperDim {
        self.dim
    }

    pub fn size(&self) -> usize {
        self.dim.total()
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> &Scalar {
        &self.entries[r * self.dim.total() + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        let n = self.dim.total();
        self.entries[r * n + c] = v;
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Scalar::is_zero)
    }

    pub fn add(&self, other: &SuperMatrix) -> SuperMatrix {
        SuperMatrix { dim: self.dim, entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &SuperMatrix) -> SuperMatrix {
        SuperMatrix { dim: self.dim, entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, c: &Scalar) -> SuperMatrix {
        SuperMatrix { dim: self.dim, entries: self.entries.iter().map(|a| a * c).collect() }
    }

    pub fn mul(&self, other: &SuperMatrix) -> SuperMatrix {
        let n = self.dim.total();
        let mut out = SuperMatrix::zero(self.dim);
        for r in 0..n {
            for k in 0..n {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..n {
                    let b = other.get(k, c);
                    if !b.is_zero() {
                        out.entries[r * n + c] += &(a * b);
                    }
                }
            }
        }
        out
    }

    /// `M v` for a coordinate vector.
    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        let n = self.dim.total();
        (0..n)
            .map(|r| {
                let mut acc = Scalar::zero();
                for (c, x) in v.iter().enumerate() {
                    let a = self.get(r, c);
                    if !a.is_zero() && !x.is_zero() {
                        acc += &(a * x);
                    }
                }
                acc
            })
            .collect()
    }

    /// Column `c`, i.e. the image of `e_c`.
    pub fn column(&self, c: usize) -> Vec<Scalar> {
        (0..self.size()).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn transpose(&self) -> SuperMatrix {
        let n = self.size();
        let mut out = SuperMatrix::zero(self.dim);
        for r in 0..n {
            for c in 0..n {
                out.set(c, r, self.get(r, c).clone());
            }
        }
        out
    }

    fn has_block_parity(&self, odd: bool) -> bool {
        let n = self.size();
        (0..n).all(|r| (0..n).all(|c| ((self.dim.parity(r) ^ self.dim.parity(c)) == 1) == odd || self.get(r, c).is_zero()))
    }

    /// Parity of a homogeneous matrix (zero counts as even); `None` if mixed.
    pub fn parity(&self) -> Option<Parity> {
        if self.has_block_parity(false) {
            Some(Parity::Even)
        } else if self.has_block_parity(true) {
            Some(Parity::Odd)
        } else {
            None
        }
    }

    pub fn declared_parity(&self) -> DeclaredParity {
        match self.parity() {
            Some(Parity::Even) => DeclaredParity::Even,
            Some(Parity::Odd) => DeclaredParity::Odd,
            None => DeclaredParity::None,
        }
    }

    /// Homogeneous component of parity `p`.
    pub fn part(&self, p: Parity) -> SuperMatrix {
        let n = self.size();
        let mut out = self.clone();
        for r in 0..n {
            for c in 0..n {
                if (self.dim.parity(r) ^ self.dim.parity(c)) != p.bit() {
                    out.set(r, c, Scalar::zero());
                }
            }
        }
        out
    }

    /// Row-major flattening.
    pub fn to_vec(&self) -> SparseVec {
        SparseVec::from_dense(&self.entries)
    }

    pub fn from_vec(dim: SuperDim, v: &SparseVec) -> Self {
        let n = dim.total();
        SuperMatrix { dim, entries: v.to_dense(n * n) }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.entries.iter().map(Scalar::to_f64).collect()
    }

    pub fn is_real(&self) -> bool {
        self.entries.iter().all(Scalar::is_real)
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        let n = self.size();
        (0..n).map(|r| (0..n).map(|c| self.get(r, c).to_string()).collect()).collect()
    }
}

impl fmt::Debug for SuperMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SuperMatrix<{}>{:?}", self.dim, self.to_strings())
    }
}

impl Serialize for SuperMatrix {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        self.to_strings().serialize(ser)
    }
}

/// `tr(even block) − tr(odd block)`.
pub fn supertrace(a: &SuperMatrix) -> Scalar {
    let mut acc = Scalar::zero();
    for k in 0..a.size() {
        if a.dim.parity(k) == 0 {
            acc += a.get(k, k);
        } else {
            acc -= a.get(k, k);
        }
    }
    acc
}

/// `[A,B] = AB − (−1)^{|A||B|} BA` for homogeneous `A`, `B`.
pub fn superbracket(a: &SuperMatrix, b: &SuperMatrix) -> Result<SuperMatrix, SuperlinError> {
    if a.dim != b.dim {
        return Err(SuperlinError::DimMismatch(a.dim, b.dim));
    }
    let pa = a.parity().ok_or(SuperlinError::NonHomogeneous)?;
    let pb = b.parity().ok_or(SuperlinError::NonHomogeneous)?;
    Ok(bracket_with(a, pa, b, pb))
}

/// Superbracket with parities supplied by the caller.
pub fn bracket_with(a: &SuperMatrix, pa: Parity, b: &SuperMatrix, pb: Parity) -> SuperMatrix {
    let ab = a.mul(b);
    let ba = b.mul(a);
    if pa.is_odd() && pb.is_odd() {
        ab.add(&ba)
    } else {
        ab.sub(&ba)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn supertrace_examples() {
        assert!(supertrace(&SuperMatrix::identity(SuperDim::new(1, 1))).is_zero());
        assert_eq!(supertrace(&SuperMatrix::identity(SuperDim::new(2, 1))), Scalar::one());
        let d = SuperMatrix::from_ints(SuperDim::new(0, 1), &[&[-2]]);
        assert_eq!(supertrace(&d), Scalar::from_int(2));
    }

    #[test]
    fn bracket_examples() {
        let d = SuperDim::new(2, 0);
        let e = SuperMatrix::unit(d, 0, 1);
        let f = SuperMatrix::unit(d, 1, 0);
        assert_eq!(superbracket(&e, &f).unwrap(), SuperMatrix::from_ints(d, &[&[1, 0], &[0, -1]]));
        let d11 = SuperDim::new(1, 1);
        let a = SuperMatrix::from_ints(d11, &[&[0, 1], &[2, 0]]);
        assert_eq!(superbracket(&a, &a).unwrap(), a.mul(&a).scale(&Scalar::from_int(2)));
        let x = SuperMatrix::from_ints(d11, &[&[3, 0], &[0, 5]]);
        assert!(superbracket(&x, &x).unwrap().is_zero());
        let mixed = SuperMatrix::from_ints(d11, &[&[1, 1], &[0, 0]]);
        assert_eq!(superbracket(&mixed, &x), Err(SuperlinError::NonHomogeneous));
    }
}
