//! Brute-force prolongation dimensions from one global constraint matrix,
//! kept separate from the recursive tower as a cross-check.

use super::Assembler;
use crate::linalg::{kernel, SparseVec};
use crate::parity::Parity;
use crate::superlin::{SubSuperalgebra, SuperDim};

fn digits(mut idx: usize, n: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for k in (0..len).rev() {
        out[k] = idx % n;
        idx /= n;
    }
    out
}

fn number(ds: &[usize], n: usize) -> usize {
    ds.iter().fold(0, |acc, &d| acc * n + d)
}

/// Graded dimensions of `𝔤_1, …, 𝔤_k`, each counted as `#unknowns − rank`.
///
/// The unknowns of level `j` are all components `T[a_1, …, a_{j+1}, d]` of
/// the right parity. Constraints: the graded swap symmetry of every pair of
/// adjacent arguments, and for every fixed `a_1, …, a_j` the matrix
/// `M[d][c] = T[a_1, …, a_j, c, d]` is killed by every functional that
/// annihilates `𝔤_0`.
pub fn naive_prolongation_dims(g0: &SubSuperalgebra, k: usize) -> Vec<SuperDim> {
    let dim = g0.ambient();
    let n = dim.total();
    let basis: Vec<SparseVec> = g0.homogeneous_basis().iter().map(|(_, m)| m.to_vec()).collect();
    let annihilator = kernel(n * n, basis);
    (1..=k)
        .map(|j| {
            let args = j + 1;
            let mut counts = [0usize; 2];
            for parity in [Parity::Even, Parity::Odd] {
                // unknown columns: components whose output parity matches
                let total = n.pow(args as u32 + 1);
                let mut col = vec![usize::MAX; total];
                let mut ncols = 0;
                for (idx, slot) in col.iter_mut().enumerate() {
                    let ds = digits(idx, n, args + 1);
                    let p = ds.iter().map(|&x| dim.parity(x)).fold(parity.bit(), |a, b| a ^ b);
                    // parity(T) + Σ|a_i| + |d| must vanish
                    if p == 0 {
                        *slot = ncols;
                        ncols += 1;
                    }
                }
                let mut sys = Assembler::new(ncols);
                let mut row = 0usize;
                for idx in 0..total {
                    if col[idx] == usize::MAX {
                        continue;
                    }
                    let ds = digits(idx, n, args + 1);
                    for pos in 0..args - 1 {
                        let (x, y) = (ds[pos], ds[pos + 1]);
                        if x > y {
                            continue;
                        }
                        let mut sw = ds.clone();
                        sw.swap(pos, pos + 1);
                        let odd = dim.parity(x) & dim.parity(y) == 1;
                        sys.add(row, col[idx], crate::scalar::Scalar::one());
                        sys.add(row, col[number(&sw, n)], -crate::scalar::Scalar::sign(odd));
                        row += 1;
                    }
                }
                let prefixes = n.pow(j as u32);
                for pre in 0..prefixes {
                    for ell in &annihilator {
                        for (e, val) in ell.entries() {
                            let (d, c) = (e / n, e % n);
                            let idx = (pre * n + c) * n + d;
                            if col[idx] != usize::MAX {
                                sys.add(row, col[idx], val.clone());
                            }
                        }
                        row += 1;
                    }
                }
                counts[parity.bit() as usize] = sys.kernel().len();
            }
            SuperDim::new(counts[0], counts[1])
        })
        .collect()
}
