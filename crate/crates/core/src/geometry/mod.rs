//! Connections on free sheaves over a chart, and their curvature.
//!
//! Indices are 0-based internally: coordinates `a` run over `x^1..x^n` then
//! `ξ^1..ξ^m`, fiber indices `A` over the `p` even then the `q` odd basis
//! sections. JSON keys are 1-based.

mod curvature;
mod derivatives;
mod metric;
mod tensor;
#[cfg(test)]
mod tests;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use curvature::{
    check_first_bianchi, check_second_bianchi, curvature, ricci, torsion, CurvatureTable, RicciTable, TorsionTable,
};
pub use derivatives::{covariant_derivatives, next_order, DerivativeTable};
pub use metric::{
    invert_superfunction_matrix, is_metric_compatible, levi_civita, validate_metric, MetricData, MetricReport,
    SfMatrix,
};
pub use tensor::{form_as_tensor, tensor_basis, tensor_extension, tensor_index, tensor_space_dim};

use crate::scalar::Scalar;
use crate::superfunc::{parse_superfunction, ChartSignature, ParseError, Superfunction};
use crate::superlin::{SuperDim, SuperMatrix};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error("expression for `{key}`: {source}")]
    Parse { key: String, source: ParseError },
    #[error("malformed index key `{0}`")]
    BadKey(String),
    #[error("index key `{0}` out of range")]
    KeyOutOfRange(String),
    #[error("component `{key}` must have parity {expected}")]
    Parity { key: String, expected: u8 },
    #[error("operation requires a tangent-sheaf connection")]
    NotTangent,
    #[error("charts do not match")]
    ChartMismatch,
    #[error("metric: {0}")]
    Metric(String),
}

/// Chart together with the rank of the sheaf the connection lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chart {
    pub sig: ChartSignature,
    pub rank: SuperDim,
    pub tangent: bool,
}

impl Chart {
    pub fn tangent(sig: ChartSignature) -> Self {
        Chart { sig, rank: SuperDim::new(sig.n, sig.m), tangent: true }
    }

    pub fn bundle(sig: ChartSignature, rank: SuperDim) -> Self {
        Chart { sig, rank, tangent: false }
    }

    /// Number of coordinates.
    pub fn d(&self) -> usize {
        self.sig.dim()
    }

    /// Fiber dimension `p + q`.
    pub fn r(&self) -> usize {
        self.rank.total()
    }

    #[inline]
    pub fn coord_parity(&self, a: usize) -> u8 {
        self.sig.coord_parity(a)
    }

    #[inline]
    pub fn fiber_parity(&self, a: usize) -> u8 {
        self.rank.parity(a)
    }

    /// True for tangent charts and for bundles whose rank happens to equal
    /// `n|m` with the coordinate frame as basis.
    pub fn is_tangent(&self) -> bool {
        self.tangent
    }
}

/// Christoffel superfunctions: `∇_{∂_a} e_B = Γ^A_{aB} e_A`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionData {
    chart: Chart,
    gamma: Vec<Superfunction>,
}

pub(crate) fn parse_key(key: &str, bounds: &[usize]) -> Result<Vec<usize>, GeometryError> {
    let parts: Vec<&str> = key.split(',').map(str::trim).collect();
    if parts.len() != bounds.len() {
        return Err(GeometryError::BadKey(key.to_string()));
    }
    parts
        .iter()
        .zip(bounds)
        .map(|(p, &max)| {
            let v: usize = p.parse().map_err(|_| GeometryError::BadKey(key.to_string()))?;
            if v == 0 || v > max {
                Err(GeometryError::KeyOutOfRange(key.to_string()))
            } else {
                Ok(v - 1)
            }
        })
        .collect()
}

impl ConnectionData {
    pub fn zero(chart: Chart) -> Self {
        let len = chart.d() * chart.r() * chart.r();
        ConnectionData { chart, gamma: vec![Superfunction::zero(chart.sig); len] }
    }

    /// Builds from `"a,B,A" → expression` entries (1-based); omitted entries are zero.
    pub fn from_map(chart: Chart, entries: &BTreeMap<String, String>) -> Result<Self, GeometryError> {
        let mut c = ConnectionData::zero(chart);
        for (key, text) in entries {
            let idx = parse_key(key, &[chart.d(), chart.r(), chart.r()])?;
            let f = parse_superfunction(text, chart.sig)
                .map_err(|source| GeometryError::Parse { key: key.clone(), source })?;
            c.set(idx[0], idx[1], idx[2], f);
        }
        c.validate()?;
        Ok(c)
    }

    /// Builds from superfunctions; checks parities.
    pub fn from_fn(chart: Chart, mut f: impl FnMut(usize, usize, usize) -> Superfunction) -> Result<Self, GeometryError> {
        let mut c = ConnectionData::zero(chart);
        for a in 0..chart.d() {
            for b in 0..chart.r() {
                for aa in 0..chart.r() {
                    c.set(a, b, aa, f(a, b, aa));
                }
            }
        }
        c.validate()?;
        Ok(c)
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    #[inline]
    fn index(&self, a: usize, b: usize, aa: usize) -> usize {
        let r = self.chart.r();
        (a * r + b) * r + aa
    }

    /// `Γ^A_{aB}`.
    #[inline]
    pub fn gamma(&self, a: usize, b: usize, aa: usize) -> &Superfunction {
        &self.gamma[self.index(a, b, aa)]
    }

    pub fn set(&mut self, a: usize, b: usize, aa: usize, f: Superfunction) {
        let k = self.index(a, b, aa);
        self.gamma[k] = f;
    }

    /// Required parity `|a| + |A| + |B|` of `Γ^A_{aB}`.
    pub fn expected_parity(&self, a: usize, b: usize, aa: usize) -> u8 {
        (self.chart.coord_parity(a) + self.chart.fiber_parity(b) + self.chart.fiber_parity(aa)) & 1
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        let ch = self.chart;
        if ch.tangent && (ch.rank.p, ch.rank.q) != (ch.sig.n, ch.sig.m) {
            return Err(GeometryError::NotTangent);
        }
        for a in 0..ch.d() {
            for b in 0..ch.r() {
                for aa in 0..ch.r() {
                    let exp = self.expected_parity(a, b, aa);
                    let f = self.gamma(a, b, aa);
                    if !f.has_parity(crate::Parity::from_bool(exp == 1)) {
                        return Err(GeometryError::Parity { key: format!("{},{},{}", a + 1, b + 1, aa + 1), expected: exp });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.gamma.iter().all(Superfunction::is_zero)
    }

    /// Connection matrix `(Γ_a)[A][B] = Γ^A_{aB}` evaluated at a point.
    pub fn matrix_at(&self, a: usize, point: &[Scalar]) -> SuperMatrix {
        let r = self.chart.r();
        let mut m = SuperMatrix::zero(self.chart.rank);
        for b in 0..r {
            for aa in 0..r {
                m.set(aa, b, self.gamma(a, b, aa).value(point));
            }
        }
        m
    }

    /// `Γ + Δ` (entrywise).
    pub fn add(&self, other: &ConnectionData) -> ConnectionData {
        ConnectionData {
            chart: self.chart,
            gamma: self.gamma.iter().zip(&other.gamma).map(|(a, b)| a.add(b)).collect(),
        }
    }

    /// Nonzero entries as `"a,B,A" → text` (1-based).
    pub fn to_map(&self) -> BTreeMap<String, String> {
        let ch = self.chart;
        let mut out = BTreeMap::new();
        for a in 0..ch.d() {
            for b in 0..ch.r() {
                for aa in 0..ch.r() {
                    let f = self.gamma(a, b, aa);
                    if !f.is_zero() {
                        out.insert(format!("{},{},{}", a + 1, b + 1, aa + 1), f.to_string());
                    }
                }
            }
        }
        out
    }
}

/// `(∇_{∂_a} X)^A = ∂_a X^A + (−1)^{|a||X^B|} X^B Γ^A_{aB}`, with each
/// `X^B` split into even and odd parts.
pub fn nabla_section(conn: &ConnectionData, a: usize, x: &[Superfunction]) -> Vec<Superfunction> {
    let ch = conn.chart();
    let odd_dir = ch.coord_parity(a) == 1;
    (0..ch.r())
        .map(|aa| {
            let mut acc = x[aa].partial0(a);
            for (b, xb) in x.iter().enumerate() {
                let g = conn.gamma(a, b, aa);
                if g.is_zero() || xb.is_zero() {
                    continue;
                }
                if odd_dir {
                    let even = xb.part(crate::Parity::Even);
                    let odd = xb.part(crate::Parity::Odd);
                    acc = acc.add(&even.mul(g)).sub(&odd.mul(g));
                } else {
                    acc = acc.add(&xb.mul(g));
                }
            }
            acc
        })
        .collect()
}

/// True iff `∇_{∂_a} X = 0` for every coordinate direction.
pub fn is_parallel(conn: &ConnectionData, x: &[Superfunction]) -> bool {
    (0..conn.chart().d()).all(|a| nabla_section(conn, a, x).iter().all(Superfunction::is_zero))
}

/// Connection for which the columns of the even invertible matrix `K` are
/// parallel: solves `Σ_D (−1)^{|a|(|D|+|C|)} K[D][C] Γ^E_{aD} = −∂_a K[E][C]`.
pub fn gauge_connection(sig: ChartSignature, rank: SuperDim, k: &SfMatrix) -> Result<ConnectionData, GeometryError> {
    let chart = Chart::bundle(sig, rank);
    let r = rank.total();
    let mut conn = ConnectionData::zero(chart);
    for a in 0..chart.d() {
        let pa = chart.coord_parity(a);
        let s = SfMatrix::from_fn(sig, r, |c, d| {
            let f = k.get(d, c);
            if pa & (rank.parity(d) ^ rank.parity(c)) == 1 {
                f.neg()
            } else {
                f.clone()
            }
        });
        let s_inv = invert_superfunction_matrix(&s)?;
        for d in 0..r {
            for e in 0..r {
                let mut acc = Superfunction::zero(sig);
                for c in 0..r {
                    let dk = k.get(e, c).partial0(a);
                    if !dk.is_zero() {
                        acc = acc.sub(&s_inv.get(d, c).mul(&dk));
                    }
                }
                conn.set(a, d, e, acc);
            }
        }
    }
    conn.validate()?;
    Ok(conn)
}
