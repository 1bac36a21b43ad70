//! Sparse exact linear algebra: row echelon forms, kernels, spans.
//!
//! Every solver in the crate (stabilizers, curvature spaces, prolongations,
//! section reconstruction) funnels through [`Echelon`] and [`kernel`], so the
//! canonical reduced row echelon form defined here is what makes subspace
//! equality bit-exact.

use std::collections::BTreeMap;

use crate::scalar::Scalar;

/// Sparse vector: strictly increasing indices, no stored zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct SparseVec {
    entries: Vec<(usize, Scalar)>,
}

impl SparseVec {
    pub fn new() -> Self {
        SparseVec { entries: Vec::new() }
    }

    /// Builds from arbitrary `(index, value)` pairs, summing duplicates.
    pub fn from_pairs<I: IntoIterator<Item = (usize, Scalar)>>(pairs: I) -> Self {
        let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
        for (k, v) in pairs {
            if v.is_zero() {
                continue;
            }
            match acc.get_mut(&k) {
                Some(x) => *x += &v,
                None => {
                    acc.insert(k, v);
                }
            }
        }
        SparseVec { entries: acc.into_iter().filter(|(_, v)| !v.is_zero()).collect() }
    }

    pub fn from_dense(values: &[Scalar]) -> Self {
        SparseVec {
            entries: values
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(k, v)| (k, v.clone()))
                .collect(),
        }
    }

    pub fn to_dense(&self, len: usize) -> Vec<Scalar> {
        let mut out = vec![Scalar::zero(); len];
        for (k, v) in &self.entries {
            out[*k] = v.clone();
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(usize, Scalar)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, k: usize) -> Scalar {
        match self.entries.binary_search_by_key(&k, |(i, _)| *i) {
            Ok(pos) => self.entries[pos].1.clone(),
            Err(_) => Scalar::zero(),
        }
    }

    pub fn leading(&self) -> Option<(usize, &Scalar)> {
        self.entries.first().map(|(k, v)| (*k, v))
    }

    pub fn scale(&self, c: &Scalar) -> SparseVec {
        if c.is_zero() {
            return SparseVec::new();
        }
        SparseVec { entries: self.entries.iter().map(|(k, v)| (*k, v * c)).collect() }
    }

    /// `self + c·other`.
    pub fn axpy(&self, c: &Scalar, other: &SparseVec) -> SparseVec {
        if c.is_zero() {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.entries, &other.entries);
        while i < a.len() || j < b.len() {
            if j >= b.len() || (i < a.len() && a[i].0 < b[j].0) {
                out.push(a[i].clone());
                i += 1;
            } else if i >= a.len() || b[j].0 < a[i].0 {
                out.push((b[j].0, &b[j].1 * c));
                j += 1;
            } else {
                let v = &a[i].1 + &(&b[j].1 * c);
                if !v.is_zero() {
                    out.push((a[i].0, v));
                }
                i += 1;
                j += 1;
            }
        }
        SparseVec { entries: out }
    }

    pub fn add(&self, other: &SparseVec) -> SparseVec {
        self.axpy(&Scalar::one(), other)
    }

    pub fn sub(&self, other: &SparseVec) -> SparseVec {
        self.axpy(&Scalar::from_int(-1), other)
    }

    pub fn dot(&self, other: &SparseVec) -> Scalar {
        let mut acc = Scalar::zero();
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.entries, &other.entries);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc += &(&a[i].1 * &b[j].1);
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }

    /// Restriction to the indices where `keep` is true.
    pub fn filter(&self, keep: impl Fn(usize) -> bool) -> SparseVec {
        SparseVec { entries: self.entries.iter().filter(|(k, _)| keep(*k)).cloned().collect() }
    }

    pub fn map_indices(&self, f: impl Fn(usize) -> usize) -> SparseVec {
        SparseVec::from_pairs(self.entries.iter().map(|(k, v)| (f(*k), v.clone())))
    }
}

/// Incrementally built row echelon form.
///
/// Rows are kept with unit pivots; [`Echelon::reduce_fully`] brings the form
/// to the unique reduced row echelon form.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    ncols: usize,
    rows: Vec<SparseVec>,
    pivot_row: BTreeMap<usize, usize>,
    fully_reduced: bool,
}

impl Echelon {
    pub fn new(ncols: usize) -> Self {
        Echelon { ncols, rows: Vec::new(), pivot_row: BTreeMap::new(), fully_reduced: true }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivot_row.keys().copied()
    }

    /// Remainder of `v` after elimination against the stored rows.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        if self.rows.is_empty() || v.is_zero() {
            return v.clone();
        }
        let mut acc: BTreeMap<usize, Scalar> = v.entries.iter().cloned().collect();
        let mut cursor = 0usize;
        loop {
            let next = acc
                .range(cursor..)
                .find(|(k, _)| self.pivot_row.contains_key(k))
                .map(|(k, c)| (*k, c.clone()));
            let Some((col, coef)) = next else { break };
            let row = &self.rows[self.pivot_row[&col]];
            for (k, x) in &row.entries {
                let delta = x * &coef;
                let remove = match acc.get_mut(k) {
                    Some(slot) => {
                        *slot -= &delta;
                        slot.is_zero()
                    }
                    None => {
                        acc.insert(*k, -delta);
                        false
                    }
                };
                if remove {
                    acc.remove(k);
                }
            }
            cursor = col + 1;
        }
        SparseVec { entries: acc.into_iter().collect() }
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).is_zero()
    }

    /// Adds `v` to the span. Returns the normalized new row when `v` was
    /// independent of the stored rows.
    pub fn insert(&mut self, v: &SparseVec) -> Option<SparseVec> {
        let r = self.reduce(v);
        let (pivot, lead) = r.leading()?;
        let inv = lead.inv().expect("nonzero pivot");
        let r = r.scale(&inv);
        self.pivot_row.insert(pivot, self.rows.len());
        self.rows.push(r.clone());
        self.fully_reduced = false;
        Some(r)
    }

    /// Back-substitution to the reduced row echelon form; rows end up sorted
    /// by pivot column.
    pub fn reduce_fully(&mut self) {
        if self.fully_reduced {
            return;
        }
        let mut order: Vec<(usize, usize)> = self.pivot_row.iter().map(|(c, r)| (*c, *r)).collect();
        order.sort();
        let mut rows: Vec<SparseVec> = order.iter().map(|(_, r)| self.rows[*r].clone()).collect();
        // eliminate from the bottom up
        for i in (0..rows.len()).rev() {
            let (pc, _) = rows[i].leading().map(|(k, v)| (k, v.clone())).unwrap();
            let pivot_row = rows[i].clone();
            for row in rows.iter_mut().take(i) {
                let c = row.get(pc);
                if !c.is_zero() {
                    *row = row.axpy(&-c, &pivot_row);
                }
            }
        }
        self.pivot_row = rows.iter().enumerate().map(|(i, r)| (r.leading().unwrap().0, i)).collect();
        self.rows = rows;
        self.fully_reduced = true;
    }

    /// Reduced row echelon basis (sorted by pivot).
    pub fn basis(&mut self) -> Vec<SparseVec> {
        self.reduce_fully();
        self.rows.clone()
    }

    /// Rows in their current (possibly unreduced) form.
    pub fn rows(&self) -> &[SparseVec] {
        &self.rows
    }

    /// Coordinates of `v` in the reduced basis, `None` if `v` is not in the span.
    pub fn coordinates(&mut self, v: &SparseVec) -> Option<Vec<Scalar>> {
        self.reduce_fully();
        if !self.contains(v) {
            return None;
        }
        Some(self.rows.iter().map(|r| v.get(r.leading().unwrap().0)).collect())
    }
}

/// Reduced row echelon basis of the span of `vectors`.
pub fn span_basis(ncols: usize, vectors: &[SparseVec]) -> Vec<SparseVec> {
    let mut e = Echelon::new(ncols);
    for v in vectors {
        e.insert(v);
    }
    e.basis()
}

/// Canonical basis of the null space `{x : row·x = 0 for all rows}`.
///
/// For each free column `f` the basis vector has a 1 at `f` and the negated
/// pivot-row entries at the pivot columns, so the basis is itself in reduced
/// echelon form with respect to the reversed pivot roles and is unique.
pub fn kernel(ncols: usize, rows: impl IntoIterator<Item = SparseVec>) -> Vec<SparseVec> {
    let mut e = Echelon::new(ncols);
    for r in rows {
        e.insert(&r);
    }
    kernel_of(&mut e)
}

pub fn kernel_of(e: &mut Echelon) -> Vec<SparseVec> {
    e.reduce_fully();
    let ncols = e.ncols;
    let pivots: Vec<usize> = e.pivots().collect();
    let is_pivot: Vec<bool> = {
        let mut b = vec![false; ncols];
        for &p in &pivots {
            b[p] = true;
        }
        b
    };
    // column -> list of (pivot column, entry) for rows with nonzero entry in column
    let mut by_col: BTreeMap<usize, Vec<(usize, Scalar)>> = BTreeMap::new();
    for row in &e.rows {
        let pc = row.leading().unwrap().0;
        for (k, v) in row.entries.iter().skip(1) {
            by_col.entry(*k).or_default().push((pc, v.clone()));
        }
    }
    (0..ncols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut pairs = vec![(f, Scalar::one())];
            if let Some(list) = by_col.get(&f) {
                pairs.extend(list.iter().map(|(pc, v)| (*pc, -v)));
            }
            SparseVec::from_pairs(pairs)
        })
        .collect()
}

/// Rank of a set of rows.
pub fn rank(ncols: usize, rows: &[SparseVec]) -> usize {
    let mut e = Echelon::new(ncols);
    for r in rows {
        e.insert(r);
    }
    e.rank()
}

/// Intersection of two subspaces given by spanning sets.
pub fn intersect(ncols: usize, a: &[SparseVec], b: &[SparseVec]) -> Vec<SparseVec> {
    // x = Σ s_i a_i = Σ t_j b_j  ⇔  (s, t) in kernel of [a^T | -b^T]
    let na = a.len();
    let nb = b.len();
    let mut cols: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); ncols];
    for (i, v) in a.iter().enumerate() {
        for (k, x) in v.entries() {
            cols[*k].push((i, x.clone()));
        }
    }
    for (j, v) in b.iter().enumerate() {
        for (k, x) in v.entries() {
            cols[*k].push((na + j, -x));
        }
    }
    let rows = cols.into_iter().map(SparseVec::from_pairs);
    let ker = kernel(na + nb, rows);
    let vecs: Vec<SparseVec> = ker
        .iter()
        .map(|st| {
            let mut acc = SparseVec::new();
            for (i, c) in st.entries() {
                if *i < na {
                    acc = acc.axpy(c, &a[*i]);
                }
            }
            acc
        })
        .collect();
    span_basis(ncols, &vecs)
}

/// Dense Gauss-Jordan inverse; `None` if singular.
pub fn dense_inverse(m: &[Vec<Scalar>]) -> Option<Vec<Vec<Scalar>>> {
    let n = m.len();
    let mut a: Vec<Vec<Scalar>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        let inv = a[col][col].inv()?;
        for x in a[col].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in 0..2 * n {
                    let t = &f * &a[col][c];
                    a[r][c] -= &t;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Solves `M x = b` for one particular solution, if any.
pub fn solve_particular(ncols: usize, rows: &[SparseVec], rhs: &[Scalar]) -> Option<Vec<Scalar>> {
    // augment with the right-hand side as an extra column and eliminate
    let mut e = Echelon::new(ncols + 1);
    for (r, b) in rows.iter().zip(rhs) {
        let mut pairs: Vec<(usize, Scalar)> = r.entries().to_vec();
        pairs.push((ncols, b.clone()));
        e.insert(&SparseVec::from_pairs(pairs));
    }
    e.reduce_fully();
    let mut x = vec![Scalar::zero(); ncols];
    for row in e.rows() {
        let (lead, c) = row.leading()?;
        if lead == ncols {
            return None;
        }
        let c = c.clone();
        x[lead] = &row.get(ncols) / &c;
    }
    Some(x)
}
