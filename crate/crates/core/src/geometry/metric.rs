//! Even supersymmetric metrics, their validation, and the Levi-Civita connection.

use std::collections::BTreeMap;

use serde::Serialize;

use super::{parse_key, torsion, Chart, ConnectionData, GeometryError};
use crate::linalg::dense_inverse;
use crate::parity::Parity;
use crate::scalar::Scalar;
use crate::superfunc::{parse_superfunction, ChartSignature, Monomial, OddSet, Superfunction};

/// Square matrix of superfunctions, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SfMatrix {
    n: usize,
    sig: ChartSignature,
    entries: Vec<Superfunction>,
}

impl SfMatrix {
    pub fn zero(sig: ChartSignature, n: usize) -> Self {
        SfMatrix { n, sig, entries: vec![Superfunction::zero(sig); n * n] }
    }

    pub fn identity(sig: ChartSignature, n: usize) -> Self {
        let mut m = SfMatrix::zero(sig, n);
        for i in 0..n {
            m.set(i, i, Superfunction::one(sig));
        }
        m
    }

    pub fn from_fn(sig: ChartSignature, n: usize, mut f: impl FnMut(usize, usize) -> Superfunction) -> Self {
        let mut m = SfMatrix::zero(sig, n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &Superfunction {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, f: Superfunction) {
        self.entries[i * self.n + j] = f;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Superfunction::is_zero)
    }

    pub fn mul(&self, other: &SfMatrix) -> SfMatrix {
        let n = self.n;
        let mut out = SfMatrix::zero(self.sig, n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let idx = i * n + j;
                        out.entries[idx] = out.entries[idx].add(&a.mul(b));
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &SfMatrix) -> SfMatrix {
        SfMatrix {
            n: self.n,
            sig: self.sig,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn neg(&self) -> SfMatrix {
        SfMatrix { n: self.n, sig: self.sig, entries: self.entries.iter().map(Superfunction::neg).collect() }
    }

    /// Constant (degree-zero) part.
    pub fn constant_part(&self) -> Vec<Vec<Scalar>> {
        let one = Monomial::one(self.sig.n);
        (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| self.get(i, j).term(OddSet::EMPTY).map(|p| p.coeff(&one)).unwrap_or_else(Scalar::zero))
                    .collect()
            })
            .collect()
    }

    pub fn from_constant(sig: ChartSignature, m: &[Vec<Scalar>]) -> SfMatrix {
        let n = m.len();
        SfMatrix::from_fn(sig, n, |i, j| Superfunction::constant(sig, m[i][j].clone()))
    }

    pub fn value(&self, point: &[Scalar]) -> Vec<Vec<Scalar>> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j).value(point)).collect()).collect()
    }
}

/// Inverse of `G = G₀ + N` with `G₀` constant invertible and `G₀⁻¹N`
/// nilpotent, via `G⁻¹ = Σ_k (−G₀⁻¹N)^k G₀⁻¹`.
pub fn invert_superfunction_matrix(g: &SfMatrix) -> Result<SfMatrix, GeometryError> {
    let sig = g.sig;
    let n = g.size();
    let g0 = g.constant_part();
    let g0_inv = dense_inverse(&g0)
        .ok_or_else(|| GeometryError::Metric("constant part of the matrix is singular".into()))?;
    let g0_inv = SfMatrix::from_constant(sig, &g0_inv);
    let nil = g.add(&SfMatrix::from_constant(sig, &g0).neg());
    let neg_y = g0_inv.mul(&nil).neg();
    // nilpotency index of a nilpotent matrix over this ring is bounded by
    // n (triangular body part) times m + 1 (odd nilpotents)
    let bound = n * (sig.m + 1) + sig.m + 1;
    let mut power = SfMatrix::identity(sig, n);
    let mut sum = SfMatrix::zero(sig, n);
    for _ in 0..=bound {
        if power.is_zero() {
            let inv = sum.mul(&g0_inv);
            debug_assert_eq!(g.mul(&inv), SfMatrix::identity(sig, n));
            return Ok(inv);
        }
        sum = sum.add(&power);
        power = power.mul(&neg_y);
    }
    Err(GeometryError::Metric(
        "inverse is not polynomial: G₀⁻¹(G − G₀) is not nilpotent (supported metrics are constant invertible plus nilpotent or strictly triangular parts)"
            .into(),
    ))
}

/// `g_{ab} = g(∂_a, ∂_b)` on a tangent chart.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricData {
    chart: Chart,
    g: SfMatrix,
}

impl MetricData {
    pub fn new(sig: ChartSignature, g: SfMatrix) -> Result<Self, GeometryError> {
        if g.size() != sig.dim() || g.sig != sig {
            return Err(GeometryError::ChartMismatch);
        }
        Ok(MetricData { chart: Chart::tangent(sig), g })
    }

    /// Builds from `"a,b" → expression` entries (1-based); omitted entries
    /// are zero, so both `a,b` and `b,a` must be supplied.
    pub fn from_map(sig: ChartSignature, entries: &BTreeMap<String, String>) -> Result<Self, GeometryError> {
        let d = sig.dim();
        let mut g = SfMatrix::zero(sig, d);
        for (key, text) in entries {
            let idx = parse_key(key, &[d, d])?;
            let f = parse_superfunction(text, sig).map_err(|source| GeometryError::Parse { key: key.clone(), source })?;
            g.set(idx[0], idx[1], f);
        }
        MetricData::new(sig, g)
    }

    /// Constant metric.
    pub fn constant(sig: ChartSignature, m: &[Vec<Scalar>]) -> Result<Self, GeometryError> {
        MetricData::new(sig, SfMatrix::from_constant(sig, m))
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub fn sig(&self) -> ChartSignature {
        self.chart.sig
    }

    pub fn get(&self, a: usize, b: usize) -> &Superfunction {
        self.g.get(a, b)
    }

    pub fn matrix(&self) -> &SfMatrix {
        &self.g
    }

    pub fn value(&self, point: &[Scalar]) -> Vec<Vec<Scalar>> {
        self.g.value(point)
    }

    pub fn to_map(&self) -> BTreeMap<String, String> {
        let d = self.g.size();
        let mut out = BTreeMap::new();
        for a in 0..d {
            for b in 0..d {
                let f = self.get(a, b);
                if !f.is_zero() {
                    out.insert(format!("{},{}", a + 1, b + 1), f.to_string());
                }
            }
        }
        out
    }
}

/// Outcome of [`validate_metric`]. `failures` is empty iff `valid`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MetricReport {
    pub valid: bool,
    pub parity_ok: bool,
    pub supersymmetric: bool,
    pub body_blocks_ok: bool,
    pub nondegenerate: bool,
    /// `(positive, negative)` counts of the even body block at the point,
    /// when it is real and nondegenerate.
    pub even_signature: Option<(usize, usize)>,
    pub failures: Vec<String>,
}

/// Signature of a real symmetric matrix by symmetric elimination; `None` if
/// singular or not real.
fn signature(m: &[Vec<Scalar>]) -> Option<(usize, usize)> {
    let n = m.len();
    if m.iter().flatten().any(|x| !x.is_real()) {
        return None;
    }
    let mut a: Vec<Vec<Scalar>> = m.to_vec();
    let (mut pos, mut neg) = (0, 0);
    let mut active: Vec<usize> = (0..n).collect();
    while !active.is_empty() {
        // prefer a nonzero diagonal pivot; otherwise combine two indices
        if let Some(&k) = active.iter().find(|&&k| !a[k][k].is_zero()) {
            let piv = a[k][k].clone();
            match piv.real_sign() {
                Some(s) if s > 0 => pos += 1,
                _ => neg += 1,
            }
            let rest: Vec<usize> = active.iter().copied().filter(|&j| j != k).collect();
            for &i in &rest {
                for &j in &rest {
                    let t = &(&a[i][k] * &a[k][j]) / &piv;
                    a[i][j] -= &t;
                }
            }
            active = rest;
        } else {
            let (i, j) = active
                .iter()
                .flat_map(|&i| active.iter().map(move |&j| (i, j)))
                .find(|&(i, j)| i != j && !a[i][j].is_zero())?;
            // replace row/column i by i + j: new diagonal 2 a_ij ≠ 0
            for r in 0..n {
                let t = a[r][j].clone();
                a[r][i] += &t;
            }
            for c in 0..n {
                let t = a[j][c].clone();
                a[i][c] += &t;
            }
        }
    }
    Some((pos, neg))
}

/// Checks parity (`|g_{ab}| = |a|+|b|`), supersymmetry
/// `g_{ab} = (−1)^{|a||b|} g_{ba}`, vanishing even-odd body blocks, and
/// nondegeneracy of the body at `point`.
pub fn validate_metric(g: &MetricData, point: &[Scalar]) -> MetricReport {
    let ch = g.chart;
    let d = ch.d();
    let mut failures = Vec::new();
    let mut parity_ok = true;
    let mut supersymmetric = true;
    let mut body_blocks_ok = true;
    for a in 0..d {
        for b in 0..d {
            let f = g.get(a, b);
            let p = (ch.coord_parity(a) + ch.coord_parity(b)) & 1;
            if !f.has_parity(Parity::from_bool(p == 1)) {
                parity_ok = false;
                failures.push(format!("g[{},{}] is not of parity {p}", a + 1, b + 1));
            }
            let other = g.get(b, a);
            let expected = if ch.coord_parity(a) & ch.coord_parity(b) == 1 { other.neg() } else { other.clone() };
            if *f != expected && a < b {
                supersymmetric = false;
                failures.push(format!("g[{},{}] and g[{},{}] violate supersymmetry", a + 1, b + 1, b + 1, a + 1));
            }
            if p == 1 && !f.body().is_zero() {
                body_blocks_ok = false;
                failures.push(format!("g[{},{}] has a nonzero even-odd body", a + 1, b + 1));
            }
        }
    }
    let body: Vec<Vec<Scalar>> = (0..d).map(|a| (0..d).map(|b| g.get(a, b).body().eval(point)).collect()).collect();
    let nondegenerate = dense_inverse(&body).is_some();
    if !nondegenerate {
        failures.push("body metric is degenerate at the point".into());
    }
    let n = ch.sig.n;
    let even_block: Vec<Vec<Scalar>> = body[..n].iter().map(|r| r[..n].to_vec()).collect();
    let even_signature = if nondegenerate { signature(&even_block) } else { None };
    MetricReport {
        valid: failures.is_empty(),
        parity_ok,
        supersymmetric,
        body_blocks_ok,
        nondegenerate,
        even_signature,
        failures,
    }
}

/// `∂_a g_{bc} − Σ_d Γ^d_{ab} g_{dc} − (−1)^{|a||b|} Σ_d (−1)^{(|a|+|c|+|d|)|b|} Γ^d_{ac} g_{bd}`.
pub(crate) fn metric_defect(conn: &ConnectionData, g: &MetricData, a: usize, b: usize, c: usize) -> Superfunction {
    let ch = g.chart;
    let p = |k: usize| ch.coord_parity(k);
    let mut acc = g.get(b, c).partial0(a);
    for d in 0..ch.d() {
        acc = acc.sub(&conn.gamma(a, b, d).mul(g.get(d, c)));
        let neg = ((p(a) & p(b)) + ((p(a) + p(c) + p(d)) & p(b))) & 1 == 1;
        acc.add_scaled(&conn.gamma(a, c, d).mul(g.get(b, d)), &Scalar::sign(!neg));
    }
    acc
}

/// True iff `∇g = 0` identically.
pub fn is_metric_compatible(conn: &ConnectionData, g: &MetricData) -> bool {
    let d = g.chart.d();
    (0..d).all(|a| (0..d).all(|b| (0..d).all(|c| metric_defect(conn, g, a, b, c).is_zero())))
}

/// Levi-Civita connection from the super Koszul formula
/// `2Γ_{abc} = ∂_a g_{bc} + (−1)^{|a||b|} ∂_b g_{ac} − (−1)^{|c|(|a|+|b|)} ∂_c g_{ab}`,
/// raised with the inverse metric. Torsion-freeness and `∇g = 0` are
/// re-verified symbolically before returning.
pub fn levi_civita(g: &MetricData) -> Result<ConnectionData, GeometryError> {
    let origin = vec![Scalar::zero(); g.sig().n];
    let report = validate_metric(g, &origin);
    if !(report.parity_ok && report.supersymmetric && report.body_blocks_ok) {
        return Err(GeometryError::Metric(report.failures.join("; ")));
    }
    let ch = g.chart;
    let sig = ch.sig;
    let d = ch.d();
    let inv = invert_superfunction_matrix(&g.g)?;
    let p = |k: usize| ch.coord_parity(k);
    let half = Scalar::ratio(1, 2);
    let mut lowered = vec![Superfunction::zero(sig); d * d * d];
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                let mut v = g.get(b, c).partial0(a);
                v.add_scaled(&g.get(a, c).partial0(b), &Scalar::sign(p(a) & p(b) == 1));
                v.add_scaled(&g.get(a, b).partial0(c), &Scalar::sign((p(c) & (p(a) ^ p(b))) == 0));
                lowered[(a * d + b) * d + c] = v.scale(&half);
            }
        }
    }
    let conn = ConnectionData::from_fn(Chart::tangent(sig), |a, b, e| {
        let mut acc = Superfunction::zero(sig);
        for c in 0..d {
            let l = &lowered[(a * d + b) * d + c];
            let gi = inv.get(c, e);
            if !l.is_zero() && !gi.is_zero() {
                acc = acc.add(&l.mul(gi));
            }
        }
        acc
    })?;
    if !torsion(&conn)?.is_zero() {
        return Err(GeometryError::Metric("internal: Koszul connection has torsion".into()));
    }
    if !is_metric_compatible(&conn, g) {
        return Err(GeometryError::Metric("internal: Koszul connection is not metric".into()));
    }
    Ok(conn)
}
