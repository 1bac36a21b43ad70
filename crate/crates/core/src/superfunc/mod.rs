//! Superfunctions on a coordinate chart `(x^1..x^n, ξ^1..ξ^m)`.
//!
//! A superfunction is `Σ_I f_I(x) ξ^I` where `I` runs over increasing subsets
//! of `{1..m}` and every `f_I` is a polynomial with exact coefficients. The
//! product carries the sign of the permutation that merges two sorted odd
//! index sets, and `∂/∂ξ^α` is the left derivative.

mod parse;

use std::cell::Cell;
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use parse::{parse_superfunction, ParseError};

use crate::parity::Parity;
use crate::scalar::{Field, Scalar};

/// Dimension `n|m` and ground field of a chart.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChartSignature {
    pub n: usize,
    pub m: usize,
    #[serde(default)]
    pub field: Field,
}

impl ChartSignature {
    pub fn new(n: usize, m: usize) -> Self {
        ChartSignature { n, m, field: Field::Rational }
    }

    pub fn gaussian(n: usize, m: usize) -> Self {
        ChartSignature { n, m, field: Field::GaussianRational }
    }

    /// Number of coordinates `n + m`.
    pub fn dim(&self) -> usize {
        self.n + self.m
    }

    /// Parity of coordinate `a` (0-based over `x` then `ξ`).
    pub fn coord_parity(&self, a: usize) -> u8 {
        u8::from(a >= self.n)
    }
}

/// Errors raised by superfunction arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SfError {
    #[error("signature mismatch: {0:?} vs {1:?}")]
    SignatureMismatch(ChartSignature, ChartSignature),
    #[error("coordinate index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("point has {got} coordinates, chart has {expected} even coordinates")]
    PointLength { got: usize, expected: usize },
}

/// Increasing subset of `{1..m}` stored as a bitmask (bit `k-1` for `ξ^k`).
///
/// Ordered lexicographically as an increasing sequence, so `∅ < {1} < {1,2} < {2}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct OddSet(pub u32);

impl OddSet {
    pub const EMPTY: OddSet = OddSet(0);

    pub fn single(alpha: usize) -> Self {
        OddSet(1 << (alpha - 1))
    }

    pub fn len(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, alpha: usize) -> bool {
        self.0 & (1 << (alpha - 1)) != 0
    }

    /// Members in increasing order (1-based).
    pub fn indices(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..32).filter(move |k| bits & (1 << k) != 0).map(|k| k + 1)
    }

    pub fn parity(self) -> u8 {
        (self.len() & 1) as u8
    }

    /// Sign of the shuffle sorting the concatenation `I·J`; `None` if they overlap.
    pub fn merge_sign(i: OddSet, j: OddSet) -> Option<bool> {
        if i.0 & j.0 != 0 {
            return None;
        }
        let mut odd = false;
        let mut rest = j.0;
        while rest != 0 {
            let k = rest.trailing_zeros();
            rest &= rest - 1;
            let above = if k >= 31 { 0 } else { i.0 & !((1u32 << (k + 1)) - 1) };
            odd ^= above.count_ones() & 1 == 1;
        }
        Some(odd)
    }
}

impl Ord for OddSet {
    fn cmp(&self, other: &Self) -> Ordering {
        let mut a = self.0;
        let mut b = other.0;
        loop {
            match (a == 0, b == 0) {
                (true, true) => return Ordering::Equal,
                (true, false) => return Ordering::Less,
                (false, true) => return Ordering::Greater,
                _ => {}
            }
            let ka = a.trailing_zeros();
            let kb = b.trailing_zeros();
            if ka != kb {
                return ka.cmp(&kb);
            }
            a &= a - 1;
            b &= b - 1;
        }
    }
}

impl PartialOrd for OddSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Exponent vector of an even monomial, graded by total degree; within a
/// degree `x1` sorts before `x2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    pub fn var(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn eval(&self, point: &[Scalar]) -> Scalar {
        let mut acc = Scalar::one();
        for (e, x) in self.0.iter().zip(point) {
            if *e > 0 {
                acc = &acc * &x.pow(*e);
            }
        }
        acc
    }

    /// All exponent vectors in `n` variables of total degree at most `d`.
    pub fn all_up_to(n: usize, d: u32) -> Vec<Monomial> {
        fn rec(n: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
            if cur.len() == n {
                out.push(Monomial(cur.clone()));
                return;
            }
            for e in 0..=left {
                cur.push(e);
                rec(n, left - e, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(n, d, &mut Vec::new(), &mut out);
        out.sort();
        out
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Polynomial in the even coordinates; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, Scalar>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial { terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: Scalar) -> Self {
        let mut p = Polynomial::zero();
        p.add_term(Monomial::one(n), c);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, mono: &Monomial) -> Scalar {
        self.terms.get(mono).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn add_term(&mut self, mono: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&mono) {
            Some(x) => {
                *x += &c;
                if x.is_zero() {
                    self.terms.remove(&mono);
                }
            }
            None => {
                self.terms.insert(mono, c);
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Polynomial, c: &Scalar) {
        for (m, v) in &other.terms {
            self.add_term(m.clone(), v * c);
        }
    }

    pub fn scale(&self, c: &Scalar) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial { terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect() }
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (ma, a) in &self.terms {
            for (mb, b) in &other.terms {
                out.add_term(ma.mul(mb), a * b);
            }
        }
        out
    }

    /// `∂/∂x^i` (0-based).
    pub fn partial(&self, i: usize) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, v) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2.0[i] -= 1;
            out.add_term(m2, v * &Scalar::from_int(e as i64));
        }
        out
    }

    pub fn eval(&self, point: &[Scalar]) -> Scalar {
        let mut acc = Scalar::zero();
        for (m, v) in &self.terms {
            acc += &(v * &m.eval(point));
        }
        acc
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }
}

/// Parity classification of a superfunction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SfParity {
    Even,
    Odd,
    Mixed,
    Zero,
}

/// Element of `O(U)[ξ^1..ξ^m]` with polynomial coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Superfunction {
    sig: ChartSignature,
    terms: BTreeMap<OddSet, Polynomial>,
}

impl Superfunction {
    pub fn zero(sig: ChartSignature) -> Self {
        Superfunction { sig, terms: BTreeMap::new() }
    }

    pub fn constant(sig: ChartSignature, c: Scalar) -> Self {
        let mut f = Superfunction::zero(sig);
        f.add_term(OddSet::EMPTY, Monomial::one(sig.n), c);
        f
    }

    pub fn one(sig: ChartSignature) -> Self {
        Superfunction::constant(sig, Scalar::one())
    }

    /// Even coordinate `x^i` (1-based).
    pub fn x(sig: ChartSignature, i: usize) -> Self {
        let mut f = Superfunction::zero(sig);
        f.add_term(OddSet::EMPTY, Monomial::var(sig.n, i - 1), Scalar::one());
        f
    }

    /// Odd coordinate `ξ^α` (1-based).
    pub fn xi(sig: ChartSignature, alpha: usize) -> Self {
        let mut f = Superfunction::zero(sig);
        f.add_term(OddSet::single(alpha), Monomial::one(sig.n), Scalar::one());
        f
    }

    /// Single term `c·x^mono·ξ^set`.
    pub fn monomial(sig: ChartSignature, set: OddSet, mono: Monomial, c: Scalar) -> Self {
        let mut f = Superfunction::zero(sig);
        f.add_term(set, mono, c);
        f
    }

    pub fn from_terms(sig: ChartSignature, terms: BTreeMap<OddSet, Polynomial>) -> Self {
        Superfunction { sig, terms: terms.into_iter().filter(|(_, p)| !p.is_zero()).collect() }
    }

    pub fn sig(&self) -> ChartSignature {
        self.sig
    }

    pub fn terms(&self) -> impl Iterator<Item = (&OddSet, &Polynomial)> {
        self.terms.iter()
    }

    pub fn term(&self, set: OddSet) -> Option<&Polynomial> {
        self.terms.get(&set)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, set: OddSet, mono: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let p = self.terms.entry(set).or_default();
        p.add_term(mono, c);
        if p.is_zero() {
            self.terms.remove(&set);
        }
    }

    fn add_poly(&mut self, set: OddSet, poly: &Polynomial, c: &Scalar) {
        let p = self.terms.entry(set).or_default();
        p.add_scaled(poly, c);
        if p.is_zero() {
            self.terms.remove(&set);
        }
    }

    /// `self += c·other`.
    pub fn add_scaled(&mut self, other: &Superfunction, c: &Scalar) {
        debug_assert_eq!(self.sig.dim(), other.sig.dim());
        for (s, p) in &other.terms {
            self.add_poly(*s, p, c);
        }
    }

    pub fn add(&self, other: &Superfunction) -> Superfunction {
        let mut out = self.clone();
        out.add_scaled(other, &Scalar::one());
        out
    }

    pub fn sub(&self, other: &Superfunction) -> Superfunction {
        let mut out = self.clone();
        out.add_scaled(other, &Scalar::from_int(-1));
        out
    }

    pub fn neg(&self) -> Superfunction {
        self.scale(&Scalar::from_int(-1))
    }

    pub fn scale(&self, c: &Scalar) -> Superfunction {
        if c.is_zero() {
            return Superfunction::zero(self.sig);
        }
        Superfunction { sig: self.sig, terms: self.terms.iter().map(|(s, p)| (*s, p.scale(c))).collect() }
    }

    /// Supercommutative product.
    pub fn mul(&self, other: &Superfunction) -> Superfunction {
        debug_assert_eq!(self.sig.dim(), other.sig.dim(), "signature mismatch in mul");
        let mut out = Superfunction::zero(self.sig);
        if self.is_zero() || other.is_zero() {
            return out;
        }
        for (i, p) in &self.terms {
            for (j, q) in &other.terms {
                let Some(neg) = OddSet::merge_sign(*i, *j) else { continue };
                let neg = neg && !MUL_SIGN_MUTATION.with(Cell::get);
                let prod = p.mul(q);
                out.add_poly(OddSet(i.0 | j.0), &prod, &Scalar::sign(neg));
            }
        }
        out
    }

    /// Left partial derivative by coordinate `a` (0-based over `x` then `ξ`).
    pub fn partial0(&self, a: usize) -> Superfunction {
        let mut out = Superfunction::zero(self.sig);
        if a < self.sig.n {
            for (s, p) in &self.terms {
                let d = p.partial(a);
                if !d.is_zero() {
                    out.terms.insert(*s, d);
                }
            }
        } else {
            let bit = 1u32 << (a - self.sig.n);
            for (s, p) in &self.terms {
                if s.0 & bit == 0 {
                    continue;
                }
                let before = (s.0 & (bit - 1)).count_ones();
                let c = Scalar::sign(before & 1 == 1);
                out.add_poly(OddSet(s.0 & !bit), p, &c);
            }
        }
        out
    }

    /// Value `f̃(x)` of the body at a point.
    pub fn value(&self, point: &[Scalar]) -> Scalar {
        match self.terms.get(&OddSet::EMPTY) {
            Some(p) => p.eval(point),
            None => Scalar::zero(),
        }
    }

    /// Body polynomial `f_∅`.
    pub fn body(&self) -> Polynomial {
        self.terms.get(&OddSet::EMPTY).cloned().unwrap_or_default()
    }

    pub fn parity(&self) -> SfParity {
        let mut even = false;
        let mut odd = false;
        for s in self.terms.keys() {
            if s.len() % 2 == 0 {
                even = true;
            } else {
                odd = true;
            }
        }
        match (even, odd) {
            (false, false) => SfParity::Zero,
            (true, false) => SfParity::Even,
            (false, true) => SfParity::Odd,
            (true, true) => SfParity::Mixed,
        }
    }

    /// True if zero or homogeneous of parity `p`.
    pub fn has_parity(&self, p: Parity) -> bool {
        self.terms.keys().all(|s| s.parity() == p.bit())
    }

    /// Component of parity `p`.
    pub fn part(&self, p: Parity) -> Superfunction {
        Superfunction {
            sig: self.sig,
            terms: self.terms.iter().filter(|(s, _)| s.parity() == p.bit()).map(|(s, q)| (*s, q.clone())).collect(),
        }
    }

    /// Largest even-coordinate degree among all terms.
    pub fn degree(&self) -> u32 {
        self.terms.values().map(Polynomial::degree).max().unwrap_or(0)
    }

    /// Largest power of the odd generators among all terms.
    pub fn odd_degree(&self) -> u32 {
        self.terms.keys().map(|s| s.len()).max().unwrap_or(0)
    }

    /// Rewrites the chart signature (same `n`, `m`), e.g. to widen the field.
    pub fn with_sig(mut self, sig: ChartSignature) -> Self {
        assert_eq!((sig.n, sig.m), (self.sig.n, self.sig.m));
        self.sig = sig;
        self
    }

    /// Embeds into a larger chart by shifting coordinates: even coordinate
    /// `i` goes to `even_offset + i`, odd `α` to `odd_offset + α`.
    pub fn embed(&self, sig: ChartSignature, even_offset: usize, odd_offset: usize) -> Superfunction {
        let mut out = Superfunction::zero(sig);
        for (s, p) in &self.terms {
            let set = OddSet(s.0 << odd_offset);
            for (mono, c) in p.terms() {
                let mut e = vec![0; sig.n];
                e[even_offset..even_offset + mono.0.len()].copy_from_slice(&mono.0);
                out.add_term(set, Monomial(e), c.clone());
            }
        }
        out
    }

    /// True if every coefficient lies in `field`.
    pub fn in_field(&self, field: Field) -> bool {
        self.terms.values().all(|p| p.terms().all(|(_, c)| field.contains(c)))
    }
}

impl fmt::Display for Superfunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", parse::print(self))
    }
}

impl fmt::Debug for Superfunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Superfunction({})", parse::print(self))
    }
}

thread_local! {
    static MUL_SIGN_MUTATION: Cell<bool> = const { Cell::new(false) };
}

/// Runs `f` with the reordering sign of [`Superfunction::mul`] dropped on
/// the current thread. Only the self-test uses this, to confirm that its
/// corpus notices a corrupted product.
#[doc(hidden)]
pub fn with_mul_sign_mutation<R>(f: impl FnOnce() -> R) -> R {
    struct Reset;
    impl Drop for Reset {
        fn drop(&mut self) {
            MUL_SIGN_MUTATION.with(|m| m.set(false));
        }
    }
    MUL_SIGN_MUTATION.with(|m| m.set(true));
    let _reset = Reset;
    f()
}

/// Product with signature check.
pub fn sf_mul(f: &Superfunction, g: &Superfunction) -> Result<Superfunction, SfError> {
    if f.sig != g.sig {
        return Err(SfError::SignatureMismatch(f.sig, g.sig));
    }
    Ok(f.mul(g))
}

/// Left partial derivative by coordinate `a` in `1..=n+m`.
pub fn sf_partial(f: &Superfunction, a: usize) -> Result<Superfunction, SfError> {
    let max = f.sig.dim();
    if a == 0 || a > max {
        return Err(SfError::IndexOutOfRange { index: a, max });
    }
    Ok(f.partial0(a - 1))
}

pub fn sf_value(f: &Superfunction, point: &[Scalar]) -> Result<Scalar, SfError> {
    if point.len() != f.sig.n {
        return Err(SfError::PointLength { got: point.len(), expected: f.sig.n });
    }
    Ok(f.value(point))
}

pub fn sf_parity(f: &Superfunction) -> SfParity {
    f.parity()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(n: usize, m: usize) -> ChartSignature {
        ChartSignature::new(n, m)
    }

    fn p(s: &str, sg: ChartSignature) -> Superfunction {
        parse_superfunction(s, sg).unwrap()
    }

    #[test]
    fn odd_set_order() {
        let mut v = vec![OddSet(0b010), OddSet(0b011), OddSet(0), OddSet(0b001), OddSet(0b101)];
        v.sort();
        assert_eq!(v, vec![OddSet(0), OddSet(0b001), OddSet(0b011), OddSet(0b101), OddSet(0b010)]);
    }

    #[test]
    fn products() {
        let s = sig(0, 2);
        let x1 = Superfunction::xi(s, 1);
        let x2 = Superfunction::xi(s, 2);
        assert_eq!(x1.mul(&x2), p("xi1*xi2", s));
        assert!(x1.mul(&x2).mul(&x1).is_zero());
        assert_eq!(x2.mul(&x1), p("xi1*xi2", s).neg());
    }

    #[test]
    fn merge_sign_brute_force() {
        // inversion count of the concatenated sequence
        for i in 0u32..16 {
            for j in 0u32..16 {
                let got = OddSet::merge_sign(OddSet(i), OddSet(j));
                if i & j != 0 {
                    assert!(got.is_none());
                    continue;
                }
                let seq: Vec<usize> = OddSet(i).indices().chain(OddSet(j).indices()).collect();
                let mut inv = 0;
                for a in 0..seq.len() {
                    for b in a + 1..seq.len() {
                        if seq[a] > seq[b] {
                            inv += 1;
                        }
                    }
                }
                assert_eq!(got, Some(inv % 2 == 1));
            }
        }
    }

    #[test]
    fn partials() {
        let s = sig(1, 2);
        let f = p("xi1*xi2", s);
        assert_eq!(sf_partial(&f, 2).unwrap(), p("xi2", s));
        assert_eq!(sf_partial(&f, 3).unwrap(), p("-xi1", s));
        let g = p("x1^2*xi1", s);
        assert_eq!(sf_partial(&g, 1).unwrap(), p("2*x1*xi1", s));
        assert!(sf_partial(&g, 4).is_err());
    }

    #[test]
    fn values_and_parity() {
        let s = sig(1, 2);
        assert_eq!(p("x1^2 + x1*xi1", s).value(&[Scalar::from_int(3)]), Scalar::from_int(9));
        assert!(p("xi1*xi2", s).value(&[Scalar::from_int(5)]).is_zero());
        assert_eq!(p("1/2*x1", s).value(&[Scalar::ratio(1, 3)]), Scalar::ratio(1, 6));
        assert_eq!(p("x1 + xi1*xi2", s).parity(), SfParity::Even);
        assert_eq!(p("xi1", s).parity(), SfParity::Odd);
        assert_eq!(p("x1 + xi1", s).parity(), SfParity::Mixed);
        assert_eq!(p("0", s).parity(), SfParity::Zero);
    }

    #[test]
    fn embedding_shifts_coordinates() {
        let small = sig(1, 1);
        let big = sig(3, 2);
        let f = p("x1*xi1", small);
        assert_eq!(f.embed(big, 2, 1), p("x3*xi2", big));
    }
}
