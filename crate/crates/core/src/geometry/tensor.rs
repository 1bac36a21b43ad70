//! Induced action of `gl(V)` on mixed tensor powers `V^{⊗r} ⊗ (V*)^{⊗s}`.

use crate::scalar::Scalar;
use crate::superlin::{SuperDim, SuperMatrix};

/// Basis of `V^{⊗r} ⊗ (V*)^{⊗s}` as index tuples (first `r` entries are
/// `e_i`, the remaining `s` are `ε^j`), ordered with all even tensors first
/// and lexicographically inside each parity.
pub fn tensor_basis(dim: SuperDim, r: usize, s: usize) -> Vec<Vec<usize>> {
    let n = dim.total();
    let k = r + s;
    let total = n.pow(k as u32);
    let mut even = Vec::new();
    let mut odd = Vec::new();
    for idx in 0..total {
        let mut t = vec![0; k];
        let mut x = idx;
        for slot in (0..k).rev() {
            t[slot] = x % n;
            x /= n;
        }
        let p = t.iter().map(|&i| dim.parity(i)).sum::<u8>() & 1;
        if p == 0 {
            even.push(t);
        } else {
            odd.push(t);
        }
    }
    even.extend(odd);
    even
}

/// Graded dimension of `V^{⊗r} ⊗ (V*)^{⊗s}`.
pub fn tensor_space_dim(dim: SuperDim, r: usize, s: usize) -> SuperDim {
    let basis = tensor_basis(dim, r, s);
    let even = basis.iter().take_while(|t| t.iter().map(|&i| dim.parity(i)).sum::<u8>() & 1 == 0).count();
    SuperDim::new(even, basis.len() - even)
}

/// Position of a tensor tuple in [`tensor_basis`].
pub fn tensor_index(dim: SuperDim, r: usize, s: usize) -> impl Fn(&[usize]) -> usize {
    let basis = tensor_basis(dim, r, s);
    let map: std::collections::HashMap<Vec<usize>, usize> =
        basis.into_iter().enumerate().map(|(i, t)| (t, i)).collect();
    move |t: &[usize]| map[t]
}

/// Derivation action of a homogeneous `A`:
/// `A(t_1 ⊗ … ⊗ t_k) = Σ_i (−1)^{|A|(|t_1|+…+|t_{i−1}|)} t_1 ⊗ … ⊗ A t_i ⊗ … ⊗ t_k`,
/// with `A e_c = Σ_b A[b][c] e_b` and `A ε^b = −Σ_c (−1)^{|A||b|} A[b][c] ε^c`.
///
/// Panics if `A` is not homogeneous.
pub fn tensor_extension(a: &SuperMatrix, r: usize, s: usize) -> SuperMatrix {
    let dim = a.dim();
    let pa = a.parity().expect("tensor_extension needs a homogeneous matrix").bit();
    let n = dim.total();
    let basis = tensor_basis(dim, r, s);
    let index = tensor_index(dim, r, s);
    let out_dim = tensor_space_dim(dim, r, s);
    let mut m = SuperMatrix::zero(out_dim);
    for (col, t) in basis.iter().enumerate() {
        let mut left = 0u8;
        for slot in 0..t.len() {
            let i = t[slot];
            let mut u = t.clone();
            let koszul = pa & left == 1;
            for j in 0..n {
                let (coef, target) = if slot < r {
                    (a.get(j, i).clone(), j)
                } else {
                    let c = a.get(i, j);
                    let neg = pa & dim.parity(i) == 1;
                    (if neg { c.clone() } else { -c }, j)
                };
                if coef.is_zero() {
                    continue;
                }
                u[slot] = target;
                let row = index(&u);
                let v = if koszul { -coef } else { coef };
                let cur = m.get(row, col).clone();
                m.set(row, col, &cur + &v);
            }
            left ^= dim.parity(i);
        }
    }
    m
}

/// Vector of a `(0,2)`-tensor `Σ (−1)^{|b||c|} g_{bc} ε^b ⊗ ε^c` whose
/// evaluation on `(e_b, e_c)` is `g_{bc}`.
pub fn form_as_tensor(g: &SuperMatrix) -> Vec<Scalar> {
    let dim = g.dim();
    let basis = tensor_basis(dim, 0, 2);
    basis
        .iter()
        .map(|t| {
            let v = g.get(t[0], t[1]);
            if dim.parity(t[0]) & dim.parity(t[1]) == 1 {
                -v
            } else {
                v.clone()
            }
        })
        .collect()
}
