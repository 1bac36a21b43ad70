//! Search for nondegenerate invariant subspaces of a metric holonomy algebra.

use serde::Serialize;

use super::{invariant_vectors, test_invariant_subspace};
use crate::linalg::{intersect, kernel, rank, span_basis, Echelon, SparseVec};
use crate::scalar::Scalar;
use crate::superlin::{bracket_with, SubSuperalgebra, SuperMatrix};

const POOL_CAP: usize = 200;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Decomposability {
    /// The associative envelope of the algebra is all of `End(V)`, so no
    /// proper subspace at all is invariant.
    WeaklyIrreducible { envelope_dim: usize },
    /// `witness` and its `g`-orthogonal `complement` are both invariant and
    /// nondegenerate.
    Decomposable { witness: Vec<Vec<Scalar>>, complement: Vec<Vec<Scalar>> },
    /// Neither outcome could be certified from the candidate pool.
    Inconclusive { candidates_tested: usize },
}

/// Dimension of the unital associative algebra generated by `h`.
pub fn associative_envelope(h: &SubSuperalgebra) -> usize {
    let dim = h.ambient();
    let n = dim.total();
    let gens: Vec<SuperMatrix> = h.homogeneous_basis().into_iter().map(|(_, m)| m).collect();
    let mut e = Echelon::new(n * n);
    let mut queue = vec![SuperMatrix::identity(dim)];
    e.insert(&queue[0].to_vec());
    let mut head = 0;
    while head < queue.len() && e.rank() < n * n {
        let a = queue[head].clone();
        head += 1;
        for g in &gens {
            let p = g.mul(&a);
            if e.insert(&p.to_vec()).is_some() {
                queue.push(p);
            }
        }
    }
    e.rank()
}

fn dense(n: usize, basis: &[SparseVec]) -> Vec<Vec<Scalar>> {
    basis.iter().map(|v| v.to_dense(n)).collect()
}

fn pairing(g: &SuperMatrix, u: &[Scalar], v: &[Scalar]) -> Scalar {
    let gv = g.apply(v);
    u.iter().zip(&gv).fold(Scalar::zero(), |acc, (a, b)| &acc + &(a * b))
}

fn nondegenerate(g: &SuperMatrix, w: &[Vec<Scalar>]) -> bool {
    let k = w.len();
    let rows: Vec<SparseVec> =
        w.iter().map(|u| SparseVec::from_dense(&w.iter().map(|v| pairing(g, u, v)).collect::<Vec<_>>())).collect();
    rank(k, &rows) == k
}

fn orthogonal(g: &SuperMatrix, w: &[SparseVec]) -> Vec<SparseVec> {
    let n = g.size();
    let rows = w.iter().map(|u| {
        let u = u.to_dense(n);
        SparseVec::from_dense(&(0..n).map(|c| (0..n).fold(Scalar::zero(), |acc, r| &acc + &(&u[r] * g.get(r, c)))).collect::<Vec<_>>())
    });
    span_basis(n, &kernel(n, rows))
}

fn kernel_and_image(a: &SuperMatrix) -> (Vec<SparseVec>, Vec<SparseVec>) {
    let n = a.size();
    let rows: Vec<SparseVec> = (0..n).map(|r| SparseVec::from_dense(&(0..n).map(|c| a.get(r, c).clone()).collect::<Vec<_>>())).collect();
    let ker = span_basis(n, &kernel(n, rows));
    let cols: Vec<SparseVec> = (0..n).map(|c| SparseVec::from_dense(&a.column(c))).collect();
    (ker, span_basis(n, &cols))
}

/// Looks for a nondegenerate invariant graded subspace of `(V, g)`.
///
/// Candidates are kernels and images of basis elements and their pairwise
/// brackets, the common kernel and lines and planes inside it, the
/// `g`-orthogonal complements of all of these, and pairwise sums and
/// intersections, at most 200 in total.
pub fn decomposability_certificate(h: &SubSuperalgebra, g: &SuperMatrix) -> Decomposability {
    let n = h.ambient().total();
    let envelope_dim = associative_envelope(h);
    if envelope_dim == n * n {
        return Decomposability::WeaklyIrreducible { envelope_dim };
    }
    let mut pool: Vec<Vec<SparseVec>> = Vec::new();
    let add = |pool: &mut Vec<Vec<SparseVec>>, s: Vec<SparseVec>| {
        if !s.is_empty() && s.len() < n && pool.len() < POOL_CAP && !pool.contains(&s) {
            pool.push(s);
        }
    };
    let basis = h.homogeneous_basis();
    let mut ops: Vec<SuperMatrix> = basis.iter().map(|(_, m)| m.clone()).collect();
    for (i, (pa, a)) in basis.iter().enumerate() {
        for (pb, b) in &basis[i + 1..] {
            let br = bracket_with(a, *pa, b, *pb);
            if !br.is_zero() {
                ops.push(br);
            }
        }
    }
    for a in &ops {
        let (k, im) = kernel_and_image(a);
        add(&mut pool, k);
        add(&mut pool, im);
    }
    let inv: Vec<SparseVec> = invariant_vectors(h).iter().map(|(_, v)| SparseVec::from_dense(v)).collect();
    add(&mut pool, span_basis(n, &inv));
    for i in 0..inv.len() {
        add(&mut pool, span_basis(n, &inv[i..=i]));
        for j in i + 1..inv.len() {
            add(&mut pool, span_basis(n, &[inv[i].clone(), inv[j].clone()]));
        }
    }
    let seeds = pool.clone();
    for s in &seeds {
        add(&mut pool, orthogonal(g, s));
    }
    let seeds = pool.clone();
    for (i, a) in seeds.iter().enumerate() {
        for b in &seeds[i + 1..] {
            let sum: Vec<SparseVec> = a.iter().chain(b).cloned().collect();
            add(&mut pool, span_basis(n, &sum));
            add(&mut pool, intersect(n, a, b));
        }
    }
    for w in &pool {
        let wd = dense(n, w);
        if !test_invariant_subspace(h, &wd) || !nondegenerate(g, &wd) {
            continue;
        }
        let comp = orthogonal(g, w);
        let cd = dense(n, &comp);
        if test_invariant_subspace(h, &cd) && nondegenerate(g, &cd) {
            return Decomposability::Decomposable { witness: wd, complement: cd };
        }
    }
    Decomposability::Inconclusive { candidates_tested: pool.len() }
}
