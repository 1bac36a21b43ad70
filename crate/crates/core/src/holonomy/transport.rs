//! Floating-point parallel transport of the body bundle, used only to
//! validate the exact holonomy algebra.

use nalgebra::DMatrix;

use crate::geometry::{covariant_derivatives, ConnectionData};
use crate::superfunc::{Polynomial, Superfunction};
use crate::superlin::{SubSuperalgebra, SuperDim};

pub type FloatMatrix = DMatrix<f64>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TransportError {
    #[error("path needs at least one point")]
    EmptyPath,
    #[error("path point {index} has {got} coordinates, expected {expected}")]
    PointDimension { index: usize, expected: usize, got: usize },
    #[error("path does not start at the base point")]
    WrongStart,
    #[error("float transport needs real coefficients")]
    NonReal,
}

/// Transport `τ_γ : E_{γ(0)} → E_{γ(1)}` of the body bundle `E = E_0 ⊕ E_1`.
#[derive(Clone, Debug)]
pub struct TransportOperator {
    pub rank: SuperDim,
    pub matrix: FloatMatrix,
    pub path: Vec<Vec<f64>>,
    /// RK4 steps per path segment.
    pub steps: usize,
}

impl TransportOperator {
    /// Largest entry in the blocks mixing `E_0` and `E_1`.
    pub fn mixed_block_norm(&self) -> f64 {
        let n = self.rank.total();
        let mut m: f64 = 0.0;
        for r in 0..n {
            for c in 0..n {
                if self.rank.parity(r) != self.rank.parity(c) {
                    m = m.max(self.matrix[(r, c)].abs());
                }
            }
        }
        m
    }
}

pub(crate) fn poly_f64(p: &Polynomial, x: &[f64]) -> f64 {
    p.terms()
        .map(|(mono, c)| c.to_f64() * mono.0.iter().zip(x).map(|(&e, &v)| v.powi(e as i32)).product::<f64>())
        .sum()
}

fn body_f64(f: &Superfunction, x: &[f64]) -> f64 {
    poly_f64(&f.body(), x)
}

/// Body connection matrices `Γ̃_i[A][B] = Γ̃^A_{iB}` for the even directions.
struct BodyConnection {
    rank: SuperDim,
    gamma: Vec<Vec<(usize, usize, Polynomial)>>,
}

impl BodyConnection {
    fn new(conn: &ConnectionData) -> Result<Self, TransportError> {
        let ch = conn.chart();
        let r = ch.r();
        let mut gamma = Vec::new();
        for i in 0..ch.sig.n {
            let mut entries = Vec::new();
            for b in 0..r {
                for a in 0..r {
                    let p = conn.gamma(i, b, a).body();
                    if p.is_zero() {
                        continue;
                    }
                    if p.terms().any(|(_, c)| !c.is_real()) {
                        return Err(TransportError::NonReal);
                    }
                    entries.push((a, b, p));
                }
            }
            gamma.push(entries);
        }
        Ok(BodyConnection { rank: ch.rank, gamma })
    }

    /// `Γ̃(v)` at `x`.
    fn along(&self, x: &[f64], v: &[f64]) -> FloatMatrix {
        let n = self.rank.total();
        let mut m = FloatMatrix::zeros(n, n);
        for (i, entries) in self.gamma.iter().enumerate() {
            if v[i] == 0.0 {
                continue;
            }
            for (a, b, p) in entries {
                m[(*a, *b)] += v[i] * poly_f64(p, x);
            }
        }
        m
    }
}

/// Solves `dP/dt = −Γ̃(γ̇) P`, `P(0) = I` along a polyline with the classical
/// fourth-order Runge-Kutta scheme, `steps` steps per segment.
pub fn numeric_parallel_transport(
    conn: &ConnectionData,
    path: &[Vec<f64>],
    steps: usize,
) -> Result<TransportOperator, TransportError> {
    let n = conn.chart().sig.n;
    if path.is_empty() {
        return Err(TransportError::EmptyPath);
    }
    for (index, p) in path.iter().enumerate() {
        if p.len() != n {
            return Err(TransportError::PointDimension { index, expected: n, got: p.len() });
        }
    }
    let body = BodyConnection::new(conn)?;
    let r = conn.chart().r();
    let steps = steps.max(1);
    let mut total = FloatMatrix::identity(r, r);
    for seg in path.windows(2) {
        let (p0, p1) = (&seg[0], &seg[1]);
        let v: Vec<f64> = p1.iter().zip(p0).map(|(a, b)| a - b).collect();
        let at = |t: f64| -> Vec<f64> { p0.iter().zip(&v).map(|(a, d)| a + t * d).collect() };
        let rhs = |t: f64, p: &FloatMatrix| -> FloatMatrix { -(body.along(&at(t), &v) * p) };
        let h = 1.0 / steps as f64;
        let mut p = FloatMatrix::identity(r, r);
        for k in 0..steps {
            let t = k as f64 * h;
            let k1 = rhs(t, &p);
            let k2 = rhs(t + h / 2.0, &(&p + &k1 * (h / 2.0)));
            let k3 = rhs(t + h / 2.0, &(&p + &k2 * (h / 2.0)));
            let k4 = rhs(t + h, &(&p + &k3 * h));
            p += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        }
        total = p * total;
    }
    Ok(TransportOperator { rank: conn.chart().rank, matrix: total, path: path.to_vec(), steps })
}

/// Closed square `x → x + ε e_i → x + ε e_i + ε e_j → x + ε e_j → x`.
pub fn square_loop(x: &[f64], i: usize, j: usize, eps: f64) -> Vec<Vec<f64>> {
    let shift = |di: f64, dj: f64| {
        let mut p = x.to_vec();
        p[i] += di;
        p[j] += dj;
        p
    };
    vec![x.to_vec(), shift(eps, 0.0), shift(eps, eps), shift(0.0, eps), x.to_vec()]
}

/// `τ_γ^{-1} ∘ ∇^r R_y(∂_a, ∂_b) ∘ τ_γ` for every path `γ` from `x` to `y`,
/// every derivative order up to `order` and every slot tuple, skipping zeros.
pub fn conjugated_generators(
    conn: &ConnectionData,
    x: &[f64],
    paths: &[Vec<Vec<f64>>],
    order: usize,
    steps: usize,
) -> Result<Vec<FloatMatrix>, TransportError> {
    let tables = covariant_derivatives(conn, None, order).expect("no reference connection");
    let r = conn.chart().r();
    let mut out = Vec::new();
    for path in paths {
        match path.first() {
            Some(p) if p.len() == x.len() && p.iter().zip(x).all(|(a, b)| a == b) => {}
            Some(_) => return Err(TransportError::WrongStart),
            None => return Err(TransportError::EmptyPath),
        }
        let tau = numeric_parallel_transport(conn, path, steps)?;
        let inv = tau.matrix.clone().try_inverse().expect("transport is invertible");
        let y = path.last().unwrap();
        for t in &tables {
            for k in 0..t.slot_count() {
                let slots = t.slots(k);
                let mut g = FloatMatrix::zeros(r, r);
                for b in 0..r {
                    for a in 0..r {
                        g[(a, b)] = body_f64(t.get(&slots, b, a), y);
                    }
                }
                if g.iter().any(|v| *v != 0.0) {
                    out.push(&inv * g * &tau.matrix);
                }
            }
        }
    }
    Ok(out)
}

/// Largest relative distance `‖M − proj(M)‖ / max(1, ‖M‖)` of the given
/// matrices from the real span of the algebra's basis.
pub fn span_residual(h: &SubSuperalgebra, mats: &[FloatMatrix]) -> f64 {
    let n = h.ambient().total();
    let basis: Vec<Vec<f64>> = h.homogeneous_basis().iter().map(|(_, m)| m.to_f64()).collect();
    let q = if basis.is_empty() {
        None
    } else {
        let b = FloatMatrix::from_fn(n * n, basis.len(), |i, j| basis[j][i]);
        Some(b.qr().q())
    };
    mats.iter()
        .map(|m| {
            // row-major flattening, matching SuperMatrix::to_f64
            let v = nalgebra::DVector::from_fn(n * n, |k, _| m[(k / n, k % n)]);
            let resid = match &q {
                Some(q) => &v - q * (q.transpose() * &v),
                None => v.clone(),
            };
            resid.norm() / v.norm().max(1.0)
        })
        .fold(0.0, f64::max)
}
