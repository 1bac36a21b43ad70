//! Cartan prolongations `𝔤_k` and the Spencer rank identity.
//!
//! An element of `𝔤_j` is stored as the flattened tensor
//! `T[a_1, …, a_{j+1}, d] = (φ(e_{a_1})(e_{a_2})…(e_{a_{j+1}}))^d`, so `𝔤_0`
//! elements are `T[a, d] = A[d][a]`.

use serde::Serialize;

use super::{
    slot_table, stored_pairs, Assembler, BergerError, CurvatureElement, LinearSolutionSpace,
};
use crate::linalg::{Echelon, SparseVec};
use crate::parity::Parity;
use crate::scalar::Scalar;
use crate::superlin::{SubSuperalgebra, SuperDim, SuperMatrix};

/// `𝔤_0, 𝔤_1, …, 𝔤_k` over `V = 𝔤_{-1}`.
#[derive(Clone, Debug)]
pub struct ProlongationTower {
    pub v: SuperDim,
    /// `levels[j]` is `𝔤_j` as flattened tensors in reduced echelon form.
    pub levels: Vec<LinearSolutionSpace<SparseVec>>,
}

impl ProlongationTower {
    pub fn dims(&self) -> Vec<SuperDim> {
        self.levels.iter().map(|l| l.graded_dim()).collect()
    }

    pub fn level(&self, j: usize) -> &LinearSolutionSpace<SparseVec> {
        &self.levels[j]
    }

    /// Length of the flattened tensors of `𝔤_j`.
    pub fn tensor_len(&self, j: usize) -> usize {
        self.v.total().pow(j as u32 + 2)
    }
}

pub(crate) fn matrix_tensor(m: &SuperMatrix) -> SparseVec {
    let n = m.size();
    let mut pairs = Vec::new();
    for a in 0..n {
        for d in 0..n {
            let v = m.get(d, a);
            if !v.is_zero() {
                pairs.push((a * n + d, v.clone()));
            }
        }
    }
    SparseVec::from_pairs(pairs)
}

fn echelon_basis(len: usize, vs: Vec<SparseVec>) -> Vec<SparseVec> {
    let mut e = Echelon::new(len);
    for v in &vs {
        e.insert(v);
    }
    e.basis()
}

/// One prolongation step: `{φ ∈ V* ⊗ 𝔤_j : φ(x)(y) = (−1)^{|x||y|} φ(y)(x)}`.
fn next_level(v: SuperDim, j: usize, prev: &LinearSolutionSpace<SparseVec>) -> LinearSolutionSpace<SparseVec> {
    let n = v.total();
    // stride of the first index in 𝔤_j tensors
    let stride = n.pow(j as u32 + 1);
    let new_len = n * n.pow(j as u32 + 2);
    let mut out = LinearSolutionSpace { ambient: format!("g_{} on {v}", j + 1), even: Vec::new(), odd: Vec::new() };
    for parity in [Parity::Even, Parity::Odd] {
        let mut unknowns: Vec<(usize, &SparseVec)> = Vec::new();
        for a in 0..n {
            let p = Parity::from_bool((parity.bit() ^ v.parity(a)) == 1);
            for g in prev.part(p) {
                unknowns.push((a, g));
            }
        }
        if unknowns.is_empty() {
            continue;
        }
        let mut sys = Assembler::new(unknowns.len());
        for (u, &(a, g)) in unknowns.iter().enumerate() {
            for (idx, val) in g.entries() {
                let b = idx / stride;
                let rest = idx % stride;
                let odd = v.parity(a) & v.parity(b) == 1;
                // equation E(x, y) for x ≤ y: φ(e_x)(e_y) − (−1)^{|x||y|} φ(e_y)(e_x)
                let (x, y, c) = if a < b {
                    (a, b, val.clone())
                } else if a > b {
                    (b, a, -&(&Scalar::sign(odd) * val))
                } else if odd {
                    (a, a, val + val)
                } else {
                    continue;
                };
                sys.add((x * n + y) * stride + rest, u, c);
            }
        }
        let sols: Vec<SparseVec> = sys
            .kernel()
            .into_iter()
            .map(|k| {
                SparseVec::from_pairs(k.entries().iter().flat_map(|(u, coef)| {
                    let (a, g) = unknowns[*u];
                    g.entries().iter().map(move |(idx, val)| (a * stride * n + idx, coef * val))
                }))
            })
            .collect();
        let basis = echelon_basis(new_len, sols);
        match parity {
            Parity::Even => out.even = basis,
            Parity::Odd => out.odd = basis,
        }
    }
    out
}

/// `𝔤_1, …, 𝔤_k` of `g0 ⊆ gl(V)`.
pub fn cartan_prolongation(v: SuperDim, g0: &SubSuperalgebra, k: usize) -> Result<ProlongationTower, BergerError> {
    if g0.ambient() != v {
        return Err(BergerError::DimMismatch { expected: v, got: g0.ambient() });
    }
    if k == 0 {
        return Err(BergerError::ZeroOrder);
    }
    let n = v.total();
    let base = LinearSolutionSpace {
        ambient: format!("g_0 on {v}"),
        even: echelon_basis(n * n, g0.basis(Parity::Even).iter().map(matrix_tensor).collect()),
        odd: echelon_basis(n * n, g0.basis(Parity::Odd).iter().map(matrix_tensor).collect()),
    };
    let mut levels = vec![base];
    for j in 0..k {
        let next = next_level(v, j, &levels[j]);
        levels.push(next);
    }
    Ok(ProlongationTower { v, levels })
}

#[derive(Clone, Debug, Serialize)]
pub struct SpencerReport {
    pub r: SuperDim,
    pub g1: SuperDim,
    pub g2: SuperDim,
    /// `V* ⊗ 𝔤_1`.
    pub domain: SuperDim,
    pub kernel: SuperDim,
    pub image: SuperDim,
    /// Every `R_Ψ` lies in `R(𝔤)`.
    pub image_in_r: bool,
    /// The kernel is exactly the image of `𝔤_2`.
    pub kernel_is_g2: bool,
    pub exactness_ok: bool,
    /// `dim R(𝔤) − dim image`, `None` if the image is not inside `R(𝔤)`.
    pub h22: Option<SuperDim>,
}

/// Map `V* ⊗ 𝔤_1 → R(𝔤)`, `R_Ψ(x, y) = Ψ(x)(y) − (−1)^{|x||y|} Ψ(y)(x)`,
/// checked for exactness at `V* ⊗ 𝔤_1` against `𝔤_2`.
pub fn spencer_rank_identity(g: &SubSuperalgebra, r: &LinearSolutionSpace<CurvatureElement>) -> SpencerReport {
    let v = g.ambient();
    let n = v.total();
    let tower = cartan_prolongation(v, g, 2).expect("ambient matches");
    let g1 = tower.level(1);
    let g2 = tower.level(2);
    let pairs = stored_pairs(v);
    let slots = slot_table(v);
    let g1_stride = n * n; // first-index stride of 𝔤_1 tensors
    let mut image_in_r = true;
    let mut kernel_is_g2 = true;
    let mut kernel_dim = [0usize; 2];
    let mut image_dim = [0usize; 2];
    let mut domain_dim = [0usize; 2];
    // 𝔤_1 coordinates, for embedding 𝔤_2
    let mut g1_ech: [Echelon; 2] = [Echelon::new(n * n * n), Echelon::new(n * n * n)];
    for p in [Parity::Even, Parity::Odd] {
        for t in g1.part(p) {
            g1_ech[p.bit() as usize].insert(t);
        }
    }
    for parity in [Parity::Even, Parity::Odd] {
        // domain basis ε^c ⊗ α_k with |c| + |α_k| = parity
        let mut dom: Vec<(usize, Parity, usize)> = Vec::new();
        for c in 0..n {
            let p = Parity::from_bool((parity.bit() ^ v.parity(c)) == 1);
            for k in 0..g1.part(p).len() {
                dom.push((c, p, k));
            }
        }
        domain_dim[parity.bit() as usize] = dom.len();
        let mut sys = Assembler::new(dom.len());
        let mut images = Vec::with_capacity(dom.len());
        for (u, &(c, p, k)) in dom.iter().enumerate() {
            // Ψ(e_x) = δ_{xc} α; α(y) is the matrix M[d][z] = T_α[y, z, d]
            let alpha = &g1.part(p)[k];
            let mut stored = vec![SuperMatrix::zero(v); pairs.len()];
            for (idx, val) in alpha.entries() {
                let y = idx / g1_stride;
                let z = (idx / n) % n;
                let d = idx % n;
                // R(e_c, e_y) gets α(y), R(e_y, e_c) gets −(−1)^{|y||c|} α(y);
                // only stored pairs are filled, the rest is implied
                let s_yc = Scalar::sign(v.parity(c) & v.parity(y) == 1);
                for (x1, x2, coef) in [(c, y, val.clone()), (y, c, -&(&s_yc * val))] {
                    if x1 <= x2 {
                        if let Some(s) = slots[x1][x2] {
                            let cur = stored[s].get(d, z).clone();
                            stored[s].set(d, z, cur + coef);
                        }
                    }
                }
            }
            for (s, m) in stored.iter().enumerate() {
                for (e, val) in m.entries().iter().enumerate() {
                    sys.add(s * n * n + e, u, val.clone());
                }
            }
            images.push(CurvatureElement::from_stored(v, parity, stored));
        }
        for im in &images {
            if !im.satisfies_constraints(g) {
                image_in_r = false;
            }
        }
        let ker = sys.kernel();
        kernel_dim[parity.bit() as usize] = ker.len();
        image_dim[parity.bit() as usize] = dom.len() - ker.len();
        // embed 𝔤_2: ψ ↦ Σ_c ε^c ⊗ ψ(e_c)
        let index: std::collections::HashMap<(usize, Parity, usize), usize> =
            dom.iter().enumerate().map(|(u, &key)| (key, u)).collect();
        let mut embedded = Echelon::new(dom.len());
        for psi in g2.part(parity) {
            let mut pairs_out = Vec::new();
            for c in 0..n {
                let slice = SparseVec::from_pairs(
                    psi.entries()
                        .iter()
                        .filter(|(idx, _)| idx / (n * n * n) == c)
                        .map(|(idx, val)| (idx % (n * n * n), val.clone())),
                );
                if slice.is_zero() {
                    continue;
                }
                let p = Parity::from_bool((parity.bit() ^ v.parity(c)) == 1);
                let coords = g1_ech[p.bit() as usize].coordinates(&slice).expect("g_2 values lie in g_1");
                for (k, x) in coords.into_iter().enumerate() {
                    if !x.is_zero() {
                        pairs_out.push((index[&(c, p, k)], x));
                    }
                }
            }
            embedded.insert(&SparseVec::from_pairs(pairs_out));
        }
        let mut ker_ech = Echelon::new(dom.len());
        for k in &ker {
            ker_ech.insert(k);
        }
        if ker_ech.basis() != embedded.basis() {
            kernel_is_g2 = false;
        }
    }
    let rd = r.graded_dim();
    let h22 = if image_in_r && image_dim[0] <= rd.p && image_dim[1] <= rd.q {
        Some(SuperDim::new(rd.p - image_dim[0], rd.q - image_dim[1]))
    } else {
        None
    };
    SpencerReport {
        r: rd,
        g1: g1.graded_dim(),
        g2: g2.graded_dim(),
        domain: SuperDim::new(domain_dim[0], domain_dim[1]),
        kernel: SuperDim::new(kernel_dim[0], kernel_dim[1]),
        image: SuperDim::new(image_dim[0], image_dim[1]),
        image_in_r,
        kernel_is_g2,
        exactness_ok: image_in_r && kernel_is_g2,
        h22,
    }
}
