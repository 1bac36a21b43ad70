//! Seeded random generators shared by unit, property and acceptance tests.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

use crate::geometry::{Chart, ConnectionData, SfMatrix};
use crate::parity::Parity;
use crate::scalar::Scalar;
use crate::superfunc::{ChartSignature, Monomial, OddSet, Superfunction};
use crate::superlin::{SuperDim, SuperMatrix};

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn small_int(rng: &mut TestRng) -> Scalar {
    let mut v = 0;
    while v == 0 {
        v = rng.gen_range(-3..=3);
    }
    Scalar::from_int(v)
}

/// Random homogeneous superfunction with at most `terms` terms, body degree
/// at most `deg`.
pub fn superfunction(rng: &mut TestRng, sig: ChartSignature, parity: Parity, terms: usize, deg: u32) -> Superfunction {
    let mut f = Superfunction::zero(sig);
    let sets: Vec<OddSet> = (0..1u32 << sig.m).map(OddSet).filter(|s| s.parity() == parity.bit()).collect();
    if sets.is_empty() {
        return f;
    }
    let count = rng.gen_range(0..=terms);
    for _ in 0..count {
        let set = sets[rng.gen_range(0..sets.len())];
        let mut e = vec![0u32; sig.n];
        let d = rng.gen_range(0..=deg);
        for _ in 0..d {
            if sig.n > 0 {
                e[rng.gen_range(0..sig.n)] += 1;
            }
        }
        f.add_term(set, Monomial(e), small_int(rng));
    }
    f
}

/// Random connection; each component is nonzero with probability `density`.
pub fn connection(rng: &mut TestRng, chart: Chart, density: f64, terms: usize, deg: u32) -> ConnectionData {
    let mut c = ConnectionData::zero(chart);
    for a in 0..chart.d() {
        for b in 0..chart.r() {
            for aa in 0..chart.r() {
                if rng.gen_bool(density) {
                    let p = Parity::from_bool(c.expected_parity(a, b, aa) == 1);
                    let f = superfunction(rng, chart.sig, p, terms, deg);
                    c.set(a, b, aa, f);
                }
            }
        }
    }
    c
}

/// Random torsion-free tangent connection: `Γ^c_{ab} = G^c_{ab} + (−1)^{|a||b|} G^c_{ba}`.
pub fn torsion_free_connection(rng: &mut TestRng, sig: ChartSignature, density: f64, terms: usize, deg: u32) -> ConnectionData {
    let chart = Chart::tangent(sig);
    let raw = connection(rng, chart, density, terms, deg);
    ConnectionData::from_fn(chart, |a, b, c| {
        let mut f = raw.gamma(a, b, c).clone();
        let neg = sig.coord_parity(a) & sig.coord_parity(b) == 1;
        f.add_scaled(raw.gamma(b, a, c), &Scalar::sign(neg));
        f
    })
    .expect("symmetrized connection keeps parities")
}

/// Random homogeneous matrix with small integer entries.
pub fn matrix(rng: &mut TestRng, dim: SuperDim, parity: Parity, density: f64) -> SuperMatrix {
    let mut m = SuperMatrix::zero(dim);
    for r in 0..dim.total() {
        for c in 0..dim.total() {
            if dim.parity(r) ^ dim.parity(c) == parity.bit() && rng.gen_bool(density) {
                m.set(r, c, small_int(rng));
            }
        }
    }
    m
}

/// Random even invertible gauge matrix `K = I + U + N` with `U` strictly
/// upper triangular polynomial (even entries) and `N` odd-nilpotent entries,
/// `K[D][C]` of parity `|D| + |C|`.
pub fn gauge_matrix(rng: &mut TestRng, sig: ChartSignature, rank: SuperDim, terms: usize, deg: u32) -> SfMatrix {
    let r = rank.total();
    SfMatrix::from_fn(sig, r, |d, c| {
        let p = Parity::from_bool(rank.parity(d) ^ rank.parity(c) == 1);
        let mut f = if d == c { Superfunction::one(sig) } else { Superfunction::zero(sig) };
        let g = superfunction(rng, sig, p, terms, deg);
        if d < c {
            f = f.add(&g);
        } else {
            // keep only the nilpotent part on and below the diagonal
            let nil = Superfunction::from_terms(
                sig,
                g.terms().filter(|(s, _)| !s.is_empty()).map(|(s, p)| (*s, p.clone())).collect(),
            );
            f = f.add(&nil);
        }
        f
    })
}

/// Holomorphic and antiholomorphic coordinate functions handed to a Kähler
/// potential: `z[k] = x_{2k+1} + i x_{2k+2}`, `t[k] = ξ_{2k+1} + i ξ_{2k+2}`.
pub struct ComplexCoords {
    pub z: Vec<Superfunction>,
    pub zb: Vec<Superfunction>,
    pub t: Vec<Superfunction>,
    pub tb: Vec<Superfunction>,
}

/// Kähler metric on ℝ^{2a|2b} (over ℚ(i)) from a potential `K` via
/// `g(∂_A, ∂_B̄) = ∂_A ∂_B̄ K` in the complex frame, expressed in the real
/// coordinate frame. Returns the metric and the constant complex structure
/// `J` (`J∂_{x_{2k+1}} = ∂_{x_{2k+2}}`, same on odd pairs).
pub fn kahler_metric(
    a: usize,
    b: usize,
    potential: &dyn Fn(&ComplexCoords) -> Superfunction,
) -> (crate::geometry::MetricData, SuperMatrix) {
    let sig = ChartSignature::gaussian(2 * a, 2 * b);
    let d = sig.dim();
    let p = |t: String| crate::superfunc::parse_superfunction(&t, sig).unwrap();
    let coords = ComplexCoords {
        z: (0..a).map(|k| p(format!("x{} + i*x{}", 2 * k + 1, 2 * k + 2))).collect(),
        zb: (0..a).map(|k| p(format!("x{} - i*x{}", 2 * k + 1, 2 * k + 2))).collect(),
        t: (0..b).map(|k| p(format!("xi{} + i*xi{}", 2 * k + 1, 2 * k + 2))).collect(),
        tb: (0..b).map(|k| p(format!("xi{} - i*xi{}", 2 * k + 1, 2 * k + 2))).collect(),
    };
    let k = potential(&coords);
    let half = Scalar::ratio(1, 2);
    let hi = &half * &Scalar::i();
    let i = Scalar::i();
    // complex frame (∂_w, ∂_w̄) per coordinate pair, in terms of real partials,
    // and real partials in terms of the complex frame
    let mut frame: Vec<Vec<(usize, Scalar)>> = Vec::new();
    let mut real: Vec<Vec<(usize, Scalar)>> = Vec::new();
    for pair in 0..d / 2 {
        let (r0, r1) = (2 * pair, 2 * pair + 1);
        frame.push(vec![(r0, half.clone()), (r1, -hi.clone())]);
        frame.push(vec![(r0, half.clone()), (r1, hi.clone())]);
        real.push(vec![(r0, Scalar::one()), (r1, Scalar::one())]);
        real.push(vec![(r0, i.clone()), (r1, -i.clone())]);
    }
    let parity = |c: usize| sig.coord_parity(c);
    let dc = |f: &Superfunction, c: usize| {
        let mut acc = Superfunction::zero(sig);
        for (r, s) in &frame[c] {
            acc.add_scaled(&f.partial0(*r), s);
        }
        acc
    };
    let gc = |x: usize, y: usize| -> Superfunction {
        match (x % 2, y % 2) {
            (0, 1) => dc(&dc(&k, y), x),
            (1, 0) => dc(&dc(&k, x), y).scale(&Scalar::sign(parity(x) & parity(y) == 1)),
            _ => Superfunction::zero(sig),
        }
    };
    let g = SfMatrix::from_fn(sig, d, |r, s| {
        let mut acc = Superfunction::zero(sig);
        for (x, cx) in &real[r] {
            for (y, cy) in &real[s] {
                acc.add_scaled(&gc(*x, *y), &(cx * cy));
            }
        }
        acc
    });
    let mut j = SuperMatrix::zero(SuperDim::new(2 * a, 2 * b));
    for pair in 0..d / 2 {
        j.set(2 * pair + 1, 2 * pair, Scalar::one());
        j.set(2 * pair, 2 * pair + 1, Scalar::from_int(-1));
    }
    (crate::geometry::MetricData::new(sig, g).expect("kähler metric"), j)
}

/// `∇_{∂ξ} ∂ξ = ξ ∂ξ` on ℝ^{0|1}.
pub fn odd_line() -> ConnectionData {
    let sig = ChartSignature::new(0, 1);
    let mut c = ConnectionData::zero(Chart::tangent(sig));
    c.set(0, 0, 0, Superfunction::xi(sig, 1));
    c.validate().expect("odd Christoffel symbol");
    c
}

/// Walker metric `[[f, 1], [1, 0]]` on ℝ^{2|0}.
pub fn walker_metric(f: &str) -> crate::geometry::MetricData {
    let sig = ChartSignature::new(2, 0);
    let mut map = std::collections::BTreeMap::new();
    map.insert("1,1".to_string(), f.to_string());
    map.insert("1,2".to_string(), "1".to_string());
    map.insert("2,1".to_string(), "1".to_string());
    crate::geometry::MetricData::from_map(sig, &map).expect("walker metric")
}

/// Block sum `g1 ⊕ g2` on disjoint coordinates: even coordinates of `g1`
/// first, then those of `g2`; odd coordinates likewise.
pub fn product_metric(g1: &crate::geometry::MetricData, g2: &crate::geometry::MetricData) -> crate::geometry::MetricData {
    let (s1, s2) = (g1.sig(), g2.sig());
    let sig = ChartSignature { n: s1.n + s2.n, m: s1.m + s2.m, field: s1.field.join(s2.field) };
    // position of a coordinate of factor k in the product chart
    let pos = |k: usize, a: usize| -> usize {
        match (k, a < [s1.n, s2.n][k]) {
            (0, true) => a,
            (0, false) => s1.n + s2.n + (a - s1.n),
            (_, true) => s1.n + a,
            (_, false) => s1.n + s2.n + s1.m + (a - s2.n),
        }
    };
    let mut g = SfMatrix::zero(sig, sig.dim());
    for (k, (gk, sk)) in [(g1, s1), (g2, s2)].into_iter().enumerate() {
        let (eo, oo) = if k == 0 { (0, 0) } else { (s1.n, s1.m) };
        for a in 0..sk.dim() {
            for b in 0..sk.dim() {
                g.set(pos(k, a), pos(k, b), gk.get(a, b).embed(sig, eo, oo));
            }
        }
    }
    crate::geometry::MetricData::new(sig, g).expect("product metric")
}

/// Kähler test metrics with their complex structures: one on ℝ^{2|4} that
/// is not Ricci-flat, and a Ricci-flat but non-flat one on ℝ^{4|4}.
pub fn kahler_examples() -> Vec<(crate::geometry::MetricData, SuperMatrix)> {
    vec![
        kahler_metric(1, 2, &|c| {
            let w = c.z[0].mul(&c.zb[0]);
            let phi = w.add(&c.z[0].mul(&w));
            w.add(&c.t[0].mul(&c.tb[1])).add(&c.t[1].mul(&c.tb[0])).add(&c.t[0].mul(&c.tb[0]).mul(&phi))
        }),
        kahler_metric(2, 2, &|c| {
            let w = c.z[0].mul(&c.zb[0]);
            c.z[0]
                .mul(&c.zb[1])
                .add(&c.z[1].mul(&c.zb[0]))
                .add(&w.mul(&w))
                .add(&c.t[0].mul(&c.tb[1]))
                .add(&c.t[1].mul(&c.tb[0]))
                .add(&c.t[0].mul(&c.tb[0]).mul(&w))
        }),
    ]
}
