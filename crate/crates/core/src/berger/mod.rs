//! Algebraic curvature tensors of a linear Lie superalgebra, Berger and
//! symmetric-Berger certificates, Cartan prolongations and the Spencer rank
//! identity.

mod naive;
mod pi;
mod prolong;
#[cfg(test)]
mod tests;

use std::collections::BTreeMap;

use serde::Serialize;

pub use naive::naive_prolongation_dims;
pub use pi::{is_simple, pi_adjoint_representation, pi_adjoint_test, PiAdjointReport};
pub use prolong::{cartan_prolongation, spencer_rank_identity, ProlongationTower, SpencerReport};

use crate::linalg::{kernel, SparseVec};
use crate::parity::Parity;
use crate::scalar::Scalar;
use crate::superlin::{bracket_with, SubSuperalgebra, SuperDim, SuperMatrix};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BergerError {
    #[error("algebra acts on {got}, expected {expected}")]
    DimMismatch { expected: SuperDim, got: SuperDim },
    #[error("prolongation order must be at least 1")]
    ZeroOrder,
    #[error("not simple: {0}")]
    NotSimple(String),
}

/// Graded basis of a solution space, even vectors first.
#[derive(Clone, Debug)]
pub struct LinearSolutionSpace<T> {
    pub ambient: String,
    pub even: Vec<T>,
    pub odd: Vec<T>,
}

impl<T> LinearSolutionSpace<T> {
    pub fn graded_dim(&self) -> SuperDim {
        SuperDim::new(self.even.len(), self.odd.len())
    }

    pub fn is_zero(&self) -> bool {
        self.even.is_empty() && self.odd.is_empty()
    }

    pub fn part(&self, p: Parity) -> &[T] {
        match p {
            Parity::Even => &self.even,
            Parity::Odd => &self.odd,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (Parity, &T)> {
        self.even.iter().map(|t| (Parity::Even, t)).chain(self.odd.iter().map(|t| (Parity::Odd, t)))
    }
}

fn sign(odd: bool) -> Scalar {
    Scalar::sign(odd)
}

/// Sparse constraint rows keyed by an arbitrary equation id.
pub(crate) struct Assembler {
    ncols: usize,
    rows: BTreeMap<usize, Vec<(usize, Scalar)>>,
}

impl Assembler {
    pub(crate) fn new(ncols: usize) -> Self {
        Assembler { ncols, rows: BTreeMap::new() }
    }

    pub(crate) fn add(&mut self, row: usize, col: usize, v: Scalar) {
        if !v.is_zero() {
            self.rows.entry(row).or_default().push((col, v));
        }
    }

    pub(crate) fn kernel(self) -> Vec<SparseVec> {
        kernel(self.ncols, self.rows.into_values().map(SparseVec::from_pairs))
    }
}

/// Independent argument pairs: `(a, b)` with `a < b`, plus `(a, a)` for odd `a`.
pub fn stored_pairs(dim: SuperDim) -> Vec<(usize, usize)> {
    let n = dim.total();
    let mut out = Vec::new();
    for a in 0..n {
        if dim.parity(a) == 1 {
            out.push((a, a));
        }
        for b in a + 1..n {
            out.push((a, b));
        }
    }
    out
}

/// Slot of `R(e_a, e_b)` among the stored pairs and the sign relating them.
fn locate(dim: SuperDim, slots: &[Vec<Option<usize>>], a: usize, b: usize) -> Option<(usize, bool)> {
    if a <= b {
        slots[a][b].map(|s| (s, false))
    } else {
        let odd = dim.parity(a) & dim.parity(b) == 1;
        // R(e_a, e_b) = −(−1)^{|a||b|} R(e_b, e_a)
        slots[b][a].map(|s| (s, !odd))
    }
}

fn slot_table(dim: SuperDim) -> Vec<Vec<Option<usize>>> {
    let n = dim.total();
    let mut t = vec![vec![None; n]; n];
    for (s, (a, b)) in stored_pairs(dim).into_iter().enumerate() {
        t[a][b] = Some(s);
    }
    t
}

/// Homogeneous `R ∈ V* ∧ V* ⊗ gl(V)`; only the stored pairs are kept.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurvatureElement {
    dim: SuperDim,
    parity: Parity,
    stored: Vec<SuperMatrix>,
}

impl CurvatureElement {
    pub fn zero(dim: SuperDim, parity: Parity) -> Self {
        let k = stored_pairs(dim).len();
        CurvatureElement { dim, parity, stored: vec![SuperMatrix::zero(dim); k] }
    }

    /// Builds from the values on the stored pairs, in [`stored_pairs`] order.
    pub fn from_stored(dim: SuperDim, parity: Parity, stored: Vec<SuperMatrix>) -> Self {
        assert_eq!(stored.len(), stored_pairs(dim).len());
        CurvatureElement { dim, parity, stored }
    }

    pub fn dim(&self) -> SuperDim {
        self.dim
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn stored(&self) -> &[SuperMatrix] {
        &self.stored
    }

    pub fn is_zero(&self) -> bool {
        self.stored.iter().all(|m| m.is_zero())
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        CurvatureElement { dim: self.dim, parity: self.parity, stored: self.stored.iter().map(|m| m.scale(c)).collect() }
    }

    pub fn add(&self, other: &CurvatureElement) -> Self {
        assert_eq!(self.parity, other.parity);
        CurvatureElement {
            dim: self.dim,
            parity: self.parity,
            stored: self.stored.iter().zip(&other.stored).map(|(a, b)| a.add(b)).collect(),
        }
    }

    /// `R(e_a, e_b)`.
    pub fn get(&self, a: usize, b: usize) -> SuperMatrix {
        let slots = slot_table(self.dim);
        self.get_with(&slots, a, b)
    }

    fn get_with(&self, slots: &[Vec<Option<usize>>], a: usize, b: usize) -> SuperMatrix {
        match locate(self.dim, slots, a, b) {
            None => SuperMatrix::zero(self.dim),
            Some((s, false)) => self.stored[s].clone(),
            Some((s, true)) => self.stored[s].scale(&Scalar::from_int(-1)),
        }
    }

    /// All `R(e_a, e_b)`, indexed `[a][b]`.
    pub fn table(&self) -> Vec<Vec<SuperMatrix>> {
        let slots = slot_table(self.dim);
        let n = self.dim.total();
        (0..n).map(|a| (0..n).map(|b| self.get_with(&slots, a, b)).collect()).collect()
    }

    /// Values lie in `g` with parity `|R| + |a| + |b|`, and the graded first
    /// Bianchi identity holds on all basis triples.
    pub fn satisfies_constraints(&self, g: &SubSuperalgebra) -> bool {
        let dim = self.dim;
        let n = dim.total();
        let t = self.table();
        for a in 0..n {
            for b in 0..n {
                let m = &t[a][b];
                let p = self.parity + Parity::from_bool((dim.parity(a) ^ dim.parity(b)) == 1);
                if !m.part(p + Parity::Odd).is_zero() || !g.contains(m) {
                    return false;
                }
            }
        }
        bianchi_holds(dim, &t)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let pairs: Vec<serde_json::Value> = stored_pairs(self.dim)
            .into_iter()
            .zip(&self.stored)
            .filter(|(_, m)| !m.is_zero())
            .map(|((a, b), m)| serde_json::json!({"a": a, "b": b, "value": m}))
            .collect();
        serde_json::json!({"parity": self.parity, "values": pairs})
    }
}

/// `R(X,Y)Z + (−1)^{|X|(|Y|+|Z|)} R(Y,Z)X + (−1)^{|Z|(|X|+|Y|)} R(Z,X)Y = 0`.
fn bianchi_holds(dim: SuperDim, t: &[Vec<SuperMatrix>]) -> bool {
    let n = dim.total();
    let pa = |k: usize| dim.parity(k);
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let s1 = sign(pa(a) & (pa(b) ^ pa(c)) == 1);
                let s2 = sign(pa(c) & (pa(a) ^ pa(b)) == 1);
                for d in 0..n {
                    let v = t[a][b].get(d, c) + &(&s1 * t[b][c].get(d, a)) + (&s2 * t[c][a].get(d, b));
                    if !v.is_zero() {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// `R(𝔤)`: every homogeneous `R ∈ V* ∧ V* ⊗ 𝔤` obeying the graded first
/// Bianchi identity.
pub fn curvature_space(g: &SubSuperalgebra) -> LinearSolutionSpace<CurvatureElement> {
    let dim = g.ambient();
    let n = dim.total();
    let pairs = stored_pairs(dim);
    let slots = slot_table(dim);
    let gb = [g.basis(Parity::Even), g.basis(Parity::Odd)];
    let mut out = LinearSolutionSpace { ambient: format!("R(g) on {dim}"), even: Vec::new(), odd: Vec::new() };
    for parity in [Parity::Even, Parity::Odd] {
        // unknowns: (slot, basis element of the matching parity)
        let mut unknowns: Vec<(usize, &SuperMatrix)> = Vec::new();
        let mut by_slot: Vec<Vec<usize>> = vec![Vec::new(); pairs.len()];
        for (s, &(a, b)) in pairs.iter().enumerate() {
            let p = parity.bit() ^ dim.parity(a) ^ dim.parity(b);
            for m in &gb[p as usize] {
                by_slot[s].push(unknowns.len());
                unknowns.push((s, m));
            }
        }
        let mut sys = Assembler::new(unknowns.len());
        let term = |sys: &mut Assembler, x: usize, y: usize, z: usize, outer: bool, row0: usize| {
            let Some((s, inner)) = locate(dim, &slots, x, y) else { return };
            let sg = sign(outer ^ inner);
            for &u in &by_slot[s] {
                let col = unknowns[u].1.column(z);
                for (d, v) in col.iter().enumerate() {
                    if !v.is_zero() {
                        sys.add(row0 + d, u, &sg * v);
                    }
                }
            }
        };
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let (pa, pb, pc) = (dim.parity(a), dim.parity(b), dim.parity(c));
                    let row0 = ((a * n + b) * n + c) * n;
                    term(&mut sys, a, b, c, false, row0);
                    term(&mut sys, b, c, a, pa & (pb ^ pc) == 1, row0);
                    term(&mut sys, c, a, b, pc & (pa ^ pb) == 1, row0);
                }
            }
        }
        for v in sys.kernel() {
            let mut stored = vec![SuperMatrix::zero(dim); pairs.len()];
            for (u, coef) in v.entries() {
                let (s, m) = unknowns[*u];
                stored[s] = stored[s].add(&m.scale(coef));
            }
            let r = CurvatureElement::from_stored(dim, parity, stored);
            assert!(r.satisfies_constraints(g), "curvature basis element fails its constraints");
            match parity {
                Parity::Even => out.even.push(r),
                Parity::Odd => out.odd.push(r),
            }
        }
    }
    out
}

/// `R_A(X,Y) = [A, R(X,Y)] − (−1)^{|A||R|} R(AX, Y) − (−1)^{|A|(|R|+|X|)} R(X, AY)`.
pub fn act_on_curvature(a: &SuperMatrix, pa: Parity, r: &CurvatureElement) -> CurvatureElement {
    let dim = r.dim;
    let t = r.table();
    let stored = stored_pairs(dim).into_iter().map(|(x, y)| act_value(a, pa, r.parity, &t, dim, x, y)).collect();
    CurvatureElement::from_stored(dim, pa + r.parity, stored)
}

pub(crate) fn act_value(
    a: &SuperMatrix,
    pa: Parity,
    pr: Parity,
    t: &[Vec<SuperMatrix>],
    dim: SuperDim,
    x: usize,
    y: usize,
) -> SuperMatrix {
    let n = dim.total();
    let (px, py) = (dim.parity(x), dim.parity(y));
    let pv = pr + Parity::from_bool((px ^ py) == 1);
    let mut out = bracket_with(a, pa, &t[x][y], pv);
    let s1 = sign(pa.bit() & pr.bit() == 1);
    let s2 = sign(pa.bit() & (pr.bit() ^ px) == 1);
    for c in 0..n {
        let ax = a.get(c, x);
        if !ax.is_zero() {
            out = out.sub(&t[c][y].scale(&(&s1 * ax)));
        }
        let ay = a.get(c, y);
        if !ay.is_zero() {
            out = out.sub(&t[x][c].scale(&(&s2 * ay)));
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct BergerCheck {
    /// `L(R(𝔤))`, the span of all values `R(e_a, e_b)`.
    pub l: SubSuperalgebra,
    pub is_berger: bool,
    pub l_is_ideal: bool,
}

pub fn berger_check(g: &SubSuperalgebra) -> BergerCheck {
    berger_check_with(g, &curvature_space(g))
}

pub fn berger_check_with(g: &SubSuperalgebra, r: &LinearSolutionSpace<CurvatureElement>) -> BergerCheck {
    let dim = g.ambient();
    let mut values = Vec::new();
    for (_, el) in r.iter() {
        values.extend(el.stored().iter().filter(|m| !m.is_zero()).cloned());
    }
    let l = SubSuperalgebra::span(dim, &values);
    let lb = l.homogeneous_basis();
    let l_is_ideal =
        g.homogeneous_basis().iter().all(|(pa, a)| lb.iter().all(|(pb, b)| l.contains(&bracket_with(a, *pa, b, *pb))));
    let is_berger = l.same_as(g);
    BergerCheck { l, is_berger, l_is_ideal }
}

/// `S ∈ V* ⊗ R(𝔤)` given by its values `S_{e_a}`.
#[derive(Clone, Debug)]
pub struct DerivativeElement {
    pub parity: Parity,
    pub comps: Vec<CurvatureElement>,
}

/// `R^∇(𝔤)`: `S ∈ V* ⊗ R(𝔤)` with
/// `S_X(Y,Z) + (−1)^{|X|(|Y|+|Z|)} S_Y(Z,X) + (−1)^{|Z|(|X|+|Y|)} S_Z(X,Y) = 0`.
pub fn curvature_derivative_space(
    g: &SubSuperalgebra,
    r: &LinearSolutionSpace<CurvatureElement>,
) -> LinearSolutionSpace<DerivativeElement> {
    let dim = g.ambient();
    let n = dim.total();
    let tables: [Vec<Vec<Vec<SuperMatrix>>>; 2] =
        [r.even.iter().map(|e| e.table()).collect(), r.odd.iter().map(|e| e.table()).collect()];
    let mut out = LinearSolutionSpace { ambient: format!("R^nabla(g) on {dim}"), even: Vec::new(), odd: Vec::new() };
    for parity in [Parity::Even, Parity::Odd] {
        // unknowns: (argument index, R(𝔤) basis element of parity |S| + |a|)
        let mut unknowns: Vec<(usize, usize, usize)> = Vec::new();
        let mut by_arg: Vec<Vec<usize>> = vec![Vec::new(); n];
        for a in 0..n {
            let p = (parity.bit() ^ dim.parity(a)) as usize;
            for j in 0..tables[p].len() {
                by_arg[a].push(unknowns.len());
                unknowns.push((a, p, j));
            }
        }
        if unknowns.is_empty() {
            continue;
        }
        let mut sys = Assembler::new(unknowns.len());
        let term = |sys: &mut Assembler, x: usize, y: usize, z: usize, neg: bool, row0: usize| {
            let sg = sign(neg);
            for &u in &by_arg[x] {
                let (_, p, j) = unknowns[u];
                let m = &tables[p][j][y][z];
                for (k, v) in m.entries().iter().enumerate() {
                    if !v.is_zero() {
                        sys.add(row0 + k, u, &sg * v);
                    }
                }
            }
        };
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let (px, py, pz) = (dim.parity(x), dim.parity(y), dim.parity(z));
                    let row0 = ((x * n + y) * n + z) * n * n;
                    term(&mut sys, x, y, z, false, row0);
                    term(&mut sys, y, z, x, px & (py ^ pz) == 1, row0);
                    term(&mut sys, z, x, y, pz & (px ^ py) == 1, row0);
                }
            }
        }
        for v in sys.kernel() {
            let mut comps: Vec<Option<CurvatureElement>> = vec![None; n];
            for (u, coef) in v.entries() {
                let (a, p, j) = unknowns[*u];
                let term = r.part(Parity::from_bool(p == 1))[j].scale(coef);
                comps[a] = Some(match comps[a].take() {
                    None => term,
                    Some(acc) => acc.add(&term),
                });
            }
            let comps = comps
                .into_iter()
                .enumerate()
                .map(|(a, c)| {
                    c.unwrap_or_else(|| CurvatureElement::zero(dim, parity + Parity::from_bool(dim.parity(a) == 1)))
                })
                .collect();
            let s = DerivativeElement { parity, comps };
            match parity {
                Parity::Even => out.even.push(s),
                Parity::Odd => out.odd.push(s),
            }
        }
    }
    out
}

/// Berger with `R^∇(𝔤) = 0`.
pub fn symmetric_berger_check(g: &SubSuperalgebra) -> bool {
    let r = curvature_space(g);
    berger_check_with(g, &r).is_berger && curvature_derivative_space(g, &r).is_zero()
}

#[derive(Clone, Debug, Serialize)]
pub struct BergerDims {
    #[serde(rename = "R")]
    pub r: SuperDim,
    #[serde(rename = "Rnabla")]
    pub rnabla: SuperDim,
    pub g1: SuperDim,
    pub g2: SuperDim,
    #[serde(rename = "H22_derived")]
    pub h22_derived: Option<SuperDim>,
}

/// Everything computed for one linear Lie superalgebra.
#[derive(Clone, Debug, Serialize)]
pub struct BergerReport {
    pub rep: SuperDim,
    pub algebra_dim: SuperDim,
    pub dims: BergerDims,
    pub is_berger: bool,
    pub is_symmetric_berger: bool,
    pub l_is_ideal: bool,
    pub exactness_ok: bool,
}

pub fn analyze_algebra(g: &SubSuperalgebra) -> BergerReport {
    let r = curvature_space(g);
    let check = berger_check_with(g, &r);
    let rnabla = curvature_derivative_space(g, &r);
    let spencer = spencer_rank_identity(g, &r);
    BergerReport {
        rep: g.ambient(),
        algebra_dim: g.graded_dim(),
        dims: BergerDims {
            r: r.graded_dim(),
            rnabla: rnabla.graded_dim(),
            g1: spencer.g1,
            g2: spencer.g2,
            h22_derived: spencer.h22,
        },
        is_berger: check.is_berger,
        is_symmetric_berger: check.is_berger && rnabla.is_zero(),
        l_is_ideal: check.l_is_ideal,
        exactness_ok: spencer.exactness_ok,
    }
}
