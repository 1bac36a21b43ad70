//! Covariant derivatives `∇̄^r R` of the curvature in coordinates.

use super::{curvature, ConnectionData, GeometryError};
use crate::scalar::Scalar;
use crate::superfunc::Superfunction;
use crate::superlin::{SuperDim, SuperMatrix};

/// Components of `∇̄^r_{∂_{a_r},…,∂_{a_1}} R(∂_a, ∂_b)`.
///
/// A component is addressed by its slot tuple `[a_r, …, a_1, a, b]` (length
/// `order + 2`) together with the fiber indices `B` (input) and `A` (output).
#[derive(Clone, Debug, PartialEq)]
pub struct DerivativeTable {
    order: usize,
    d: usize,
    r: usize,
    /// `false` when `Γ̄ = 0` was used.
    with_reference: bool,
    comps: Vec<Superfunction>,
}

fn slot_index(d: usize, slots: &[usize]) -> usize {
    slots.iter().fold(0, |acc, &s| acc * d + s)
}

fn slot_tuple(d: usize, len: usize, mut k: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for i in (0..len).rev() {
        out[i] = k % d;
        k /= d;
    }
    out
}

impl DerivativeTable {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn uses_reference(&self) -> bool {
        self.with_reference
    }

    /// Number of slot tuples, `d^{order+2}`.
    pub fn slot_count(&self) -> usize {
        self.d.pow(self.order as u32 + 2)
    }

    pub fn slots(&self, k: usize) -> Vec<usize> {
        slot_tuple(self.d, self.order + 2, k)
    }

    #[inline]
    pub fn get(&self, slots: &[usize], b: usize, a: usize) -> &Superfunction {
        debug_assert_eq!(slots.len(), self.order + 2);
        &self.comps[(slot_index(self.d, slots) * self.r + b) * self.r + a]
    }

    #[inline]
    fn get_k(&self, k: usize, b: usize, a: usize) -> &Superfunction {
        &self.comps[(k * self.r + b) * self.r + a]
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Superfunction::is_zero)
    }

    /// Every slot tuple with its operator evaluated at `point` (`[A][B]`).
    pub fn matrices_at(&self, point: &[Scalar], rank: SuperDim) -> Vec<(Vec<usize>, SuperMatrix)> {
        (0..self.slot_count())
            .map(|k| {
                let mut m = SuperMatrix::zero(rank);
                for b in 0..self.r {
                    for a in 0..self.r {
                        let f = self.get_k(k, b, a);
                        if !f.is_zero() {
                            m.set(a, b, f.value(point));
                        }
                    }
                }
                (self.slots(k), m)
            })
            .collect()
    }
}

pub(crate) fn order_zero(conn: &ConnectionData) -> DerivativeTable {
    let ch = conn.chart();
    let (d, r) = (ch.d(), ch.r());
    let rt = curvature(conn);
    let mut comps = Vec::with_capacity(d * d * r * r);
    for a in 0..d {
        for b in 0..d {
            for bb in 0..r {
                for aa in 0..r {
                    comps.push(rt.get(bb, a, b, aa).clone());
                }
            }
        }
    }
    DerivativeTable { order: 0, d, r, with_reference: false, comps }
}

/// One more covariant derivative of `prev` along every coordinate field.
///
/// With `rest = (a_{r−1}, …, a_1, a, b)` and `S = Σ|rest|`:
///
/// `new^A_B(a_r, rest) = ∂_{a_r} prev^A_B(rest)
///   + Σ_C (−1)^{|a_r|(S+|B|+|C|)} prev^C_B(rest) Γ^A_{a_r C}
///   − Σ_l Σ_c (−1)^{(|c|+|rest_l|)(|rest_1|+…+|rest_{l−1}|)} Γ̄^c_{a_r rest_l} prev^A_B(rest_l ↦ c)
///   − Σ_C (−1)^{(|C|+|B|)S} Γ^C_{a_r B} prev^A_C(rest)`.
///
/// `reference = None` means `Γ̄ = 0`.
pub fn next_order(conn: &ConnectionData, reference: Option<&ConnectionData>, prev: &DerivativeTable) -> DerivativeTable {
    let ch = conn.chart();
    let (d, r) = (ch.d(), ch.r());
    let len = prev.order + 2;
    let count = prev.slot_count();
    let reference = reference.filter(|c| !c.is_zero());
    let mut comps = Vec::with_capacity(d * count * r * r);
    let cp = |k: usize| ch.coord_parity(k);
    let fp = |k: usize| ch.fiber_parity(k);
    for ar in 0..d {
        let par = cp(ar);
        for k in 0..count {
            let rest = slot_tuple(d, len, k);
            let s = rest.iter().map(|&x| cp(x)).sum::<u8>() & 1;
            for bb in 0..r {
                for aa in 0..r {
                    let mut acc = prev.get_k(k, bb, aa).partial0(ar);
                    for c in 0..r {
                        let p = prev.get_k(k, bb, c);
                        let g = conn.gamma(ar, c, aa);
                        if !p.is_zero() && !g.is_zero() {
                            let neg = par & ((s + fp(bb) + fp(c)) & 1) == 1;
                            acc.add_scaled(&p.mul(g), &Scalar::sign(neg));
                        }
                        let g = conn.gamma(ar, bb, c);
                        let p = prev.get_k(k, c, aa);
                        if !p.is_zero() && !g.is_zero() {
                            let neg = ((fp(c) + fp(bb)) & s) & 1 == 1;
                            acc.add_scaled(&g.mul(p), &Scalar::sign(!neg));
                        }
                    }
                    if let Some(refc) = reference {
                        let mut left = 0u8;
                        let mut slots = rest.clone();
                        for l in 0..len {
                            let orig = rest[l];
                            for c in 0..d {
                                let g = refc.gamma(ar, orig, c);
                                if g.is_zero() {
                                    continue;
                                }
                                slots[l] = c;
                                let p = prev.get(&slots, bb, aa);
                                if !p.is_zero() {
                                    let neg = ((cp(c) + cp(orig)) & left) & 1 == 1;
                                    acc.add_scaled(&g.mul(p), &Scalar::sign(!neg));
                                }
                            }
                            slots[l] = orig;
                            left ^= cp(orig);
                        }
                    }
                    comps.push(acc);
                }
            }
        }
    }
    let table = DerivativeTable {
        order: prev.order + 1,
        d,
        r,
        with_reference: reference.is_some(),
        comps,
    };
    assert_parity_law(conn, &table);
    table
}

fn assert_parity_law(conn: &ConnectionData, t: &DerivativeTable) {
    let ch = conn.chart();
    for k in 0..t.slot_count() {
        let s = t.slots(k).iter().map(|&x| ch.coord_parity(x)).sum::<u8>();
        for b in 0..t.r {
            for a in 0..t.r {
                let p = (s + ch.fiber_parity(a) + ch.fiber_parity(b)) & 1;
                assert!(
                    t.get_k(k, b, a).has_parity(crate::Parity::from_bool(p == 1)),
                    "covariant derivative parity law violated"
                );
            }
        }
    }
}

/// Tables for orders `0..=order`. The reference connection, if any, must be
/// a tangent-sheaf connection on the same chart.
pub fn covariant_derivatives(
    conn: &ConnectionData,
    reference: Option<&ConnectionData>,
    order: usize,
) -> Result<Vec<DerivativeTable>, GeometryError> {
    if let Some(refc) = reference {
        let rc = refc.chart();
        if !rc.is_tangent() || rc.sig != conn.chart().sig {
            return Err(GeometryError::ChartMismatch);
        }
    }
    let mut out = vec![order_zero(conn)];
    for _ in 0..order {
        let next = next_order(conn, reference, out.last().unwrap());
        out.push(next);
    }
    Ok(out)
}
