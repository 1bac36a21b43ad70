//! Curvature, torsion, Bianchi identities and the Ricci tensor in coordinates.

use super::{next_order, ConnectionData, GeometryError};
use crate::scalar::Scalar;
use crate::superfunc::Superfunction;
use crate::superlin::SuperMatrix;

/// `R(∂_a, ∂_b) e_B = R^A_{Bab} e_A`.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureTable {
    d: usize,
    r: usize,
    comps: Vec<Superfunction>,
}

impl CurvatureTable {
    pub(crate) fn new(d: usize, r: usize, comps: Vec<Superfunction>) -> Self {
        CurvatureTable { d, r, comps }
    }

    #[inline]
    fn index(&self, b: usize, a: usize, bb: usize, aa: usize) -> usize {
        ((b * self.d + a) * self.d + bb) * self.r + aa
    }

    /// `R^A_{B a b}` with arguments in the order `(B, a, b, A)`.
    #[inline]
    pub fn get(&self, b: usize, a: usize, bb: usize, aa: usize) -> &Superfunction {
        &self.comps[self.index(b, a, bb, aa)]
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Superfunction::is_zero)
    }

    /// First nonzero component `(B, a, b, A)`.
    pub fn first_nonzero(&self) -> Option<(usize, usize, usize, usize)> {
        let k = self.comps.iter().position(|f| !f.is_zero())?;
        let aa = k % self.r;
        let rest = k / self.r;
        let bb = rest % self.d;
        let rest = rest / self.d;
        Some((rest / self.d, rest % self.d, bb, aa))
    }

    /// `R(∂_a, ∂_b)` at a point as a matrix `[A][B]`.
    pub fn matrix_at(&self, a: usize, bb: usize, point: &[Scalar], rank: crate::superlin::SuperDim) -> SuperMatrix {
        let mut m = SuperMatrix::zero(rank);
        for b in 0..self.r {
            for aa in 0..self.r {
                m.set(aa, b, self.get(b, a, bb, aa).value(point));
            }
        }
        m
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.d, self.r)
    }
}

/// Components per the coordinate formula
/// `R^A_{Bab} = ∂_aΓ^A_{bB} + (−1)^{|a|(|b|+|B|+|C|)}Γ^C_{bB}Γ^A_{aC}
///   − (−1)^{|a||b|}(∂_bΓ^A_{aB} + (−1)^{|b|(|a|+|B|+|C|)}Γ^C_{aB}Γ^A_{bC})`.
pub fn curvature(conn: &ConnectionData) -> CurvatureTable {
    let ch = conn.chart();
    let (d, r) = (ch.d(), ch.r());
    let sig = ch.sig;
    // half(a, b) = ∂_aΓ^A_{bB} + Σ_C (−1)^{|a|(|b|+|B|+|C|)} Γ^C_{bB}Γ^A_{aC}
    let half = |a: usize, b: usize, bb: usize, aa: usize| {
        let mut acc = conn.gamma(b, bb, aa).partial0(a);
        let pa = ch.coord_parity(a);
        for c in 0..r {
            let g1 = conn.gamma(b, bb, c);
            let g2 = conn.gamma(a, c, aa);
            if g1.is_zero() || g2.is_zero() {
                continue;
            }
            let neg = pa & ((ch.coord_parity(b) + ch.fiber_parity(bb) + ch.fiber_parity(c)) & 1) == 1;
            acc.add_scaled(&g1.mul(g2), &Scalar::sign(neg));
        }
        acc
    };
    let mut comps = vec![Superfunction::zero(sig); r * d * d * r];
    for bb in 0..r {
        for a in 0..d {
            for b in 0..d {
                for aa in 0..r {
                    let first = half(a, b, bb, aa);
                    let second = half(b, a, bb, aa);
                    let neg = ch.coord_parity(a) & ch.coord_parity(b) == 1;
                    let mut v = first;
                    v.add_scaled(&second, &Scalar::sign(!neg));
                    comps[((bb * d + a) * d + b) * r + aa] = v;
                }
            }
        }
    }
    let table = CurvatureTable::new(d, r, comps);
    assert_curvature_laws(conn, &table);
    table
}

/// Super-antisymmetry and the parity law; a violation is an internal error.
fn assert_curvature_laws(conn: &ConnectionData, t: &CurvatureTable) {
    let ch = conn.chart();
    for bb in 0..ch.r() {
        for a in 0..ch.d() {
            for b in 0..ch.d() {
                for aa in 0..ch.r() {
                    let x = t.get(bb, a, b, aa);
                    let y = t.get(bb, b, a, aa);
                    let neg = ch.coord_parity(a) & ch.coord_parity(b) == 1;
                    let expected = if neg { y.clone() } else { y.neg() };
                    assert_eq!(*x, expected, "curvature super-antisymmetry violated");
                    let par = (ch.coord_parity(a) + ch.coord_parity(b) + ch.fiber_parity(aa) + ch.fiber_parity(bb)) & 1;
                    assert!(x.has_parity(crate::Parity::from_bool(par == 1)), "curvature parity law violated");
                }
            }
        }
    }
}

/// `T^c_{ab}` stored as `[a][b][c]`.
#[derive(Clone, Debug, PartialEq)]
pub struct TorsionTable {
    d: usize,
    comps: Vec<Superfunction>,
}

impl TorsionTable {
    pub fn get(&self, a: usize, b: usize, c: usize) -> &Superfunction {
        &self.comps[(a * self.d + b) * self.d + c]
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Superfunction::is_zero)
    }
}

/// `T^c_{ab} = Γ^c_{ab} − (−1)^{|a||b|} Γ^c_{ba}`.
pub fn torsion(conn: &ConnectionData) -> Result<TorsionTable, GeometryError> {
    let ch = conn.chart();
    if !ch.is_tangent() {
        return Err(GeometryError::NotTangent);
    }
    let d = ch.d();
    let mut comps = Vec::with_capacity(d * d * d);
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                let neg = ch.coord_parity(a) & ch.coord_parity(b) == 1;
                let mut v = conn.gamma(a, b, c).clone();
                v.add_scaled(conn.gamma(b, a, c), &Scalar::sign(!neg));
                comps.push(v);
            }
        }
    }
    Ok(TorsionTable { d, comps })
}

/// `R(X,Y)Z + (−1)^{|X|(|Y|+|Z|)} R(Y,Z)X + (−1)^{|Z|(|X|+|Y|)} R(Z,X)Y = 0`
/// on all coordinate fields.
pub fn check_first_bianchi(conn: &ConnectionData) -> Result<bool, GeometryError> {
    let ch = conn.chart();
    if !ch.is_tangent() {
        return Err(GeometryError::NotTangent);
    }
    let r = curvature(conn);
    let d = ch.d();
    let p = |k: usize| ch.coord_parity(k);
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                let s1 = p(a) & ((p(b) + p(c)) & 1) == 1;
                let s2 = p(c) & ((p(a) + p(b)) & 1) == 1;
                for e in 0..d {
                    let mut sum = r.get(c, a, b, e).clone();
                    sum.add_scaled(r.get(a, b, c, e), &Scalar::sign(s1));
                    sum.add_scaled(r.get(b, c, a, e), &Scalar::sign(s2));
                    if !sum.is_zero() {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

/// Graded cyclic identity on `∇R` with the connection itself as reference:
/// `∇_X R(Y,Z) + (−1)^{|X|(|Y|+|Z|)} ∇_Y R(Z,X) + (−1)^{|Z|(|X|+|Y|)} ∇_Z R(X,Y) = 0`.
pub fn check_second_bianchi(conn: &ConnectionData) -> Result<bool, GeometryError> {
    let ch = conn.chart();
    if !ch.is_tangent() {
        return Err(GeometryError::NotTangent);
    }
    let r0 = super::derivatives::order_zero(conn);
    let r1 = next_order(conn, Some(conn), &r0);
    let d = ch.d();
    let p = |k: usize| ch.coord_parity(k);
    for x in 0..d {
        for y in 0..d {
            for z in 0..d {
                let s1 = p(x) & ((p(y) + p(z)) & 1) == 1;
                let s2 = p(z) & ((p(x) + p(y)) & 1) == 1;
                for bb in 0..d {
                    for aa in 0..d {
                        let mut sum = r1.get(&[x, y, z], bb, aa).clone();
                        sum.add_scaled(r1.get(&[y, z, x], bb, aa), &Scalar::sign(s1));
                        sum.add_scaled(r1.get(&[z, x, y], bb, aa), &Scalar::sign(s2));
                        if !sum.is_zero() {
                            return Ok(false);
                        }
                    }
                }
            }
        }
    }
    Ok(true)
}

/// `Ric(∂_a, ∂_b)` stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct RicciTable {
    d: usize,
    comps: Vec<Superfunction>,
}

impl RicciTable {
    pub fn get(&self, a: usize, b: usize) -> &Superfunction {
        &self.comps[a * self.d + b]
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Superfunction::is_zero)
    }
}

/// `Ric(∂_a, ∂_b) = str(X ↦ (−1)^{|X||b|} R(∂_a, X)∂_b)
///   = Σ_c (−1)^{|c| + |c||b|} R^c_{b a c}`.
pub fn ricci(conn: &ConnectionData) -> Result<RicciTable, GeometryError> {
    let ch = conn.chart();
    if !ch.is_tangent() {
        return Err(GeometryError::NotTangent);
    }
    let rt = curvature(conn);
    Ok(ricci_from(conn, &rt))
}

pub(crate) fn ricci_from(conn: &ConnectionData, rt: &CurvatureTable) -> RicciTable {
    let ch = conn.chart();
    let d = ch.d();
    let mut comps = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            let mut acc = Superfunction::zero(ch.sig);
            for c in 0..d {
                let pc = ch.coord_parity(c);
                let neg = (pc + (pc & ch.coord_parity(b))) & 1 == 1;
                acc.add_scaled(rt.get(b, a, c, c), &Scalar::sign(neg));
            }
            comps.push(acc);
        }
    }
    RicciTable { d, comps }
}
