//! Graded subspaces and subalgebras of `gl(p|q)` in canonical echelon form.

use serde::Serialize;

use super::{bracket_with, SuperDim, SuperMatrix, SuperlinError};
use crate::linalg::{intersect, Echelon, SparseVec};
use crate::parity::Parity;
use crate::scalar::Scalar;

/// Graded subspace of `gl(p|q)`; `closed` records bracket closure.
///
/// Each parity component is stored as a reduced row echelon basis of the
/// row-major flattened matrices, which makes equality a plain comparison.
#[derive(Clone, Debug)]
pub struct SubSuperalgebra {
    dim: SuperDim,
    even: Echelon,
    odd: Echelon,
    closed: bool,
}

/// Result of [`subspace_query`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    Member,
    NotMember,
}

impl SubSuperalgebra {
    pub fn zero(dim: SuperDim) -> Self {
        let n2 = dim.total() * dim.total();
        SubSuperalgebra { dim, even: Echelon::new(n2), odd: Echelon::new(n2), closed: true }
    }

    /// Graded span of the homogeneous parts of `mats` (no closure).
    pub fn span(dim: SuperDim, mats: &[SuperMatrix]) -> Self {
        let mut s = SubSuperalgebra::zero(dim);
        for m in mats {
            s.insert_raw(m);
        }
        s.even.reduce_fully();
        s.odd.reduce_fully();
        s.closed = s.is_bracket_closed();
        s
    }

    /// The whole of `gl(p|q)`.
    pub fn full(dim: SuperDim) -> Self {
        let n = dim.total();
        let mut mats = Vec::new();
        for r in 0..n {
            for c in 0..n {
                mats.push(SuperMatrix::unit(dim, r, c));
            }
        }
        let mut s = SubSuperalgebra::span(dim, &mats);
        s.closed = true;
        s
    }

    fn echelon(&self, p: Parity) -> &Echelon {
        match p {
            Parity::Even => &self.even,
            Parity::Odd => &self.odd,
        }
    }

    fn echelon_mut(&mut self, p: Parity) -> &mut Echelon {
        match p {
            Parity::Even => &mut self.even,
            Parity::Odd => &mut self.odd,
        }
    }

    /// Inserts the homogeneous parts of `m`; returns the newly independent
    /// parts with their parities.
    fn insert_raw(&mut self, m: &SuperMatrix) -> Vec<(Parity, SuperMatrix)> {
        let mut out = Vec::new();
        for p in [Parity::Even, Parity::Odd] {
            let part = m.part(p);
            if part.is_zero() {
                continue;
            }
            if let Some(row) = self.echelon_mut(p).insert(&part.to_vec()) {
                out.push((p, SuperMatrix::from_vec(self.dim, &row)));
            }
        }
        out
    }

    pub fn ambient(&self) -> SuperDim {
        self.dim
    }

    /// Graded dimension `dim g_0 | dim g_1`.
    pub fn graded_dim(&self) -> SuperDim {
        SuperDim::new(self.even.rank(), self.odd.rank())
    }

    pub fn dim_total(&self) -> usize {
        self.even.rank() + self.odd.rank()
    }

    pub fn is_zero(&self) -> bool {
        self.dim_total() == 0
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn basis(&self, p: Parity) -> Vec<SuperMatrix> {
        let mut e = self.echelon(p).clone();
        e.basis().iter().map(|v| SuperMatrix::from_vec(self.dim, v)).collect()
    }

    pub fn even_basis(&self) -> Vec<SuperMatrix> {
        self.basis(Parity::Even)
    }

    pub fn odd_basis(&self) -> Vec<SuperMatrix> {
        self.basis(Parity::Odd)
    }

    /// Even basis followed by odd basis, each tagged with its parity.
    pub fn homogeneous_basis(&self) -> Vec<(Parity, SuperMatrix)> {
        let mut out: Vec<(Parity, SuperMatrix)> = self.even_basis().into_iter().map(|m| (Parity::Even, m)).collect();
        out.extend(self.odd_basis().into_iter().map(|m| (Parity::Odd, m)));
        out
    }

    /// Rows of the reduced echelon basis of one parity component.
    pub fn rows(&self, p: Parity) -> Vec<SparseVec> {
        let mut e = self.echelon(p).clone();
        e.basis()
    }

    pub fn contains(&self, m: &SuperMatrix) -> bool {
        [Parity::Even, Parity::Odd].iter().all(|&p| {
            let part = m.part(p);
            part.is_zero() || self.echelon(p).contains(&part.to_vec())
        })
    }

    /// Coordinates of a homogeneous element with respect to [`Self::basis`].
    pub fn coordinates(&self, p: Parity, m: &SuperMatrix) -> Option<Vec<Scalar>> {
        let mut e = self.echelon(p).clone();
        e.coordinates(&m.to_vec())
    }

    pub fn contains_all(&self, other: &SubSuperalgebra) -> bool {
        other.homogeneous_basis().iter().all(|(_, m)| self.contains(m))
    }

    pub fn is_bracket_closed(&self) -> bool {
        let basis = self.homogeneous_basis();
        for (i, (pa, a)) in basis.iter().enumerate() {
            for (pb, b) in &basis[i..] {
                if !self.contains(&bracket_with(a, *pa, b, *pb)) {
                    return false;
                }
            }
        }
        true
    }

    /// Smallest subalgebra containing `self` and `gens`.
    pub fn closure_with(&self, gens: &[SuperMatrix]) -> SubSuperalgebra {
        let mut s = self.clone();
        let mut elems: Vec<(Parity, SuperMatrix)> = s.homogeneous_basis();
        let mut queue: Vec<(Parity, SuperMatrix)> = if self.closed { Vec::new() } else { elems.clone() };
        for g in gens {
            let new = s.insert_raw(g);
            elems.extend(new.iter().cloned());
            queue.extend(new);
        }
        let mut head = 0;
        while head < queue.len() {
            let (pa, a) = queue[head].clone();
            head += 1;
            let mut k = 0;
            while k < elems.len() {
                let (pb, b) = elems[k].clone();
                k += 1;
                let br = bracket_with(&a, pa, &b, pb);
                if br.is_zero() {
                    continue;
                }
                let new = s.insert_raw(&br);
                elems.extend(new.iter().cloned());
                queue.extend(new);
            }
        }
        s.even.reduce_fully();
        s.odd.reduce_fully();
        s.closed = true;
        s
    }

    /// Ideal of `self` generated by `x`: the span of `x` closed under
    /// brackets with all of `self`.
    pub fn ideal_generated(&self, x: &SuperMatrix) -> SubSuperalgebra {
        let mut s = SubSuperalgebra::zero(self.dim);
        let algebra = self.homogeneous_basis();
        let mut queue = s.insert_raw(x);
        let mut head = 0;
        while head < queue.len() {
            let (pa, a) = queue[head].clone();
            head += 1;
            for (pb, b) in &algebra {
                let br = bracket_with(b, *pb, &a, pa);
                if !br.is_zero() {
                    queue.extend(s.insert_raw(&br));
                }
            }
        }
        s.even.reduce_fully();
        s.odd.reduce_fully();
        s.closed = s.is_bracket_closed();
        s
    }

    /// Graded intersection of two subspaces.
    pub fn intersection(&self, other: &SubSuperalgebra) -> SubSuperalgebra {
        let n2 = self.dim.total() * self.dim.total();
        let mut out = SubSuperalgebra::zero(self.dim);
        for p in [Parity::Even, Parity::Odd] {
            for v in intersect(n2, &self.rows(p), &other.rows(p)) {
                out.echelon_mut(p).insert(&v);
            }
        }
        out.even.reduce_fully();
        out.odd.reduce_fully();
        out.closed = out.is_bracket_closed();
        out
    }

    /// Kernel of a linear functional restricted to `self`.
    pub fn cut(&self, functional: impl Fn(&SuperMatrix) -> Scalar) -> SubSuperalgebra {
        let mut out = SubSuperalgebra::zero(self.dim);
        for p in [Parity::Even, Parity::Odd] {
            let basis = self.basis(p);
            let values: Vec<Scalar> = basis.iter().map(&functional).collect();
            let pivot = values.iter().position(|v| !v.is_zero());
            for (k, b) in basis.iter().enumerate() {
                let v = match pivot {
                    None => b.clone(),
                    Some(j) if j == k => continue,
                    Some(j) => b.sub(&basis[j].scale(&(&values[k] / &values[j]))),
                };
                out.insert_raw(&v);
            }
        }
        out.even.reduce_fully();
        out.odd.reduce_fully();
        out.closed = out.is_bracket_closed();
        out
    }

    /// Appends elements and closes under brackets.
    pub fn extended(&self, extra: &[SuperMatrix]) -> SubSuperalgebra {
        self.closure_with(extra)
    }

    /// Canonical equality.
    pub fn same_as(&self, other: &SubSuperalgebra) -> bool {
        self.dim == other.dim
            && self.graded_dim() == other.graded_dim()
            && self.rows(Parity::Even) == other.rows(Parity::Even)
            && self.rows(Parity::Odd) == other.rows(Parity::Odd)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "dim": {"p": self.dim.p, "q": self.dim.q},
            "graded_dim": [self.even.rank(), self.odd.rank()],
            "even": self.even_basis(),
            "odd": self.odd_basis(),
        })
    }
}

impl Serialize for SubSuperalgebra {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(ser)
    }
}

/// Smallest bracket-closed graded subspace containing `gens`.
pub fn generate_subalgebra(dim: SuperDim, gens: &[SuperMatrix]) -> Result<SubSuperalgebra, SuperlinError> {
    if let Some(bad) = gens.iter().find(|g| g.dim() != dim) {
        return Err(SuperlinError::DimMismatch(dim, bad.dim()));
    }
    Ok(SubSuperalgebra::zero(dim).closure_with(gens))
}

pub fn subspace_query(s: &SubSuperalgebra, a: &SuperMatrix) -> Membership {
    if s.contains(a) {
        Membership::Member
    } else {
        Membership::NotMember
    }
}

pub fn subalgebra_equal(a: &SubSuperalgebra, b: &SubSuperalgebra) -> bool {
    a.same_as(b)
}
