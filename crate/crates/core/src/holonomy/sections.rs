//! Parallel sections from a value at one point: exact polynomial body plus
//! the odd-coefficient recursion.

use std::collections::{BTreeMap, HashMap};

use super::{infinitesimal_holonomy, HolonomyError};
use crate::geometry::{is_parallel, ConnectionData};
use crate::linalg::{solve_particular, SparseVec};
use crate::parity::Parity;
use crate::scalar::Scalar;
use crate::superfunc::{Monomial, OddSet, Polynomial, Superfunction};

/// Components `X^A` of a section `X = X^A e_A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectionData {
    pub comps: Vec<Superfunction>,
}

impl SectionData {
    pub fn value(&self, x: &[Scalar]) -> Vec<Scalar> {
        self.comps.iter().map(|f| f.value(x)).collect()
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.comps.iter().map(|f| f.to_string()).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SectionOutcome {
    Exact(SectionData),
    /// No polynomial body of degree at most `max_degree` solves the body
    /// transport equation; the body would need numerical transport.
    NeedsNumeric { max_degree: u32 },
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SectionError {
    #[error(transparent)]
    Point(#[from] HolonomyError),
    #[error("fiber value has {got} components, expected {expected}")]
    ValueDimension { expected: usize, got: usize },
    #[error("value is not annihilated by the holonomy algebra (generator {index} acts nontrivially), so no parallel section has it")]
    NotAnnihilated { index: usize },
    #[error("reconstructed section fails the parallel-section equation")]
    Inconsistent,
}

/// Exact test of `∂_a X^A + (−1)^{|a||X^B|} X^B Γ^A_{aB} = 0` for all `a`.
pub fn check_parallel(conn: &ConnectionData, x: &SectionData) -> bool {
    x.comps.len() == conn.chart().r() && is_parallel(conn, &x.comps)
}

/// Parallel section with value `v` at `x`.
///
/// The value is first tested against the holonomy algebra at `x` (order cap
/// `cap`). The body is then solved exactly with a polynomial ansatz of
/// degree at most `max_degree`, and the odd coefficients follow from the
/// `ξ`-direction equations one odd degree at a time.
pub fn reconstruct_parallel_section(
    conn: &ConnectionData,
    x: &[Scalar],
    v: &[Scalar],
    max_degree: u32,
    cap: usize,
) -> Result<SectionOutcome, SectionError> {
    let ch = conn.chart();
    if v.len() != ch.r() {
        return Err(SectionError::ValueDimension { expected: ch.r(), got: v.len() });
    }
    let hol = infinitesimal_holonomy(conn, x, cap)?;
    for (index, (_, a)) in hol.algebra.homogeneous_basis().iter().enumerate() {
        if a.apply(v).iter().any(|c| !c.is_zero()) {
            return Err(SectionError::NotAnnihilated { index });
        }
    }
    let body = match (0..=max_degree).find_map(|d| solve_body(conn, x, v, d)) {
        Some(b) => b,
        None => return Ok(SectionOutcome::NeedsNumeric { max_degree }),
    };
    let comps = odd_recursion(conn, body);
    let section = SectionData { comps };
    if !check_parallel(conn, &section) {
        return Err(SectionError::Inconsistent);
    }
    Ok(SectionOutcome::Exact(section))
}

/// Solves `∂_i X̃^A + X̃^B Γ̃^A_{iB} = 0`, `X̃(x) = v` with polynomials of
/// degree at most `deg`.
fn solve_body(conn: &ConnectionData, x: &[Scalar], v: &[Scalar], deg: u32) -> Option<Vec<Polynomial>> {
    let ch = conn.chart();
    let (n, r) = (ch.sig.n, ch.r());
    let monos = Monomial::all_up_to(n, deg);
    let nm = monos.len();
    let bodies: Vec<Vec<Vec<Polynomial>>> = (0..n)
        .map(|i| (0..r).map(|b| (0..r).map(|a| conn.gamma(i, b, a).body()).collect()).collect())
        .collect();
    // equations: value rows first, then (i, A, monomial) rows
    let mut eq_ids: HashMap<(usize, usize, Monomial), usize> = HashMap::new();
    let mut rows: Vec<Vec<(usize, Scalar)>> = (0..r).map(|_| Vec::new()).collect();
    let mut rhs: Vec<Scalar> = v.to_vec();
    let mut push = |rows: &mut Vec<Vec<(usize, Scalar)>>, rhs: &mut Vec<Scalar>, key, u, c: Scalar| {
        let id = *eq_ids.entry(key).or_insert_with(|| {
            rows.push(Vec::new());
            rhs.push(Scalar::zero());
            rows.len() - 1
        });
        rows[id].push((u, c));
    };
    for b in 0..r {
        for (k, m) in monos.iter().enumerate() {
            let u = b * nm + k;
            rows[b].push((u, m.eval(x)));
            let unit = {
                let mut p = Polynomial::zero();
                p.add_term(m.clone(), Scalar::one());
                p
            };
            for i in 0..n {
                for (dm, c) in unit.partial(i).terms() {
                    push(&mut rows, &mut rhs, (i, b, dm.clone()), u, c.clone());
                }
                for a in 0..r {
                    let g = &bodies[i][b][a];
                    if g.is_zero() {
                        continue;
                    }
                    for (pm, c) in unit.mul(g).terms() {
                        push(&mut rows, &mut rhs, (i, a, pm.clone()), u, c.clone());
                    }
                }
            }
        }
    }
    let rows: Vec<SparseVec> = rows.into_iter().map(SparseVec::from_pairs).collect();
    let sol = solve_particular(r * nm, &rows, &rhs)?;
    Some(
        (0..r)
            .map(|b| {
                let mut p = Polynomial::zero();
                for (k, m) in monos.iter().enumerate() {
                    p.add_term(m.clone(), sol[b * nm + k].clone());
                }
                p
            })
            .collect(),
    )
}

/// Fills odd coefficients: for `|I| = k + 1` with smallest index `α`,
/// `X^A_I` is the `ξ^{I∖α}` coefficient of `−Σ_B (−1)^{|X^B|} X^B Γ^A_{αB}`
/// evaluated on the terms of odd degree at most `k`.
fn odd_recursion(conn: &ConnectionData, body: Vec<Polynomial>) -> Vec<Superfunction> {
    let ch = conn.chart();
    let sig = ch.sig;
    let (n, m, r) = (sig.n, sig.m, ch.r());
    let mut x: Vec<Superfunction> = body
        .into_iter()
        .map(|p| Superfunction::from_terms(sig, BTreeMap::from([(OddSet::EMPTY, p)])))
        .collect();
    for k in 0..m as u32 {
        let mut rhs: Vec<Vec<Superfunction>> = Vec::with_capacity(m);
        for alpha in 0..m {
            let a = n + alpha;
            rhs.push(
                (0..r)
                    .map(|aa| {
                        let mut acc = Superfunction::zero(sig);
                        for (b, xb) in x.iter().enumerate() {
                            let g = conn.gamma(a, b, aa);
                            if g.is_zero() || xb.is_zero() {
                                continue;
                            }
                            acc = acc.sub(&xb.part(Parity::Even).mul(g)).add(&xb.part(Parity::Odd).mul(g));
                        }
                        acc
                    })
                    .collect(),
            );
        }
        for set in (0..1u32 << m).map(OddSet).filter(|s| s.len() == k + 1) {
            let alpha = set.indices().next().unwrap() - 1;
            let rest = OddSet(set.0 & !(1 << alpha));
            for aa in 0..r {
                if let Some(p) = rhs[alpha][aa].term(rest) {
                    for (mono, c) in p.terms() {
                        x[aa].add_term(set, mono.clone(), c.clone());
                    }
                }
            }
        }
    }
    x
}
