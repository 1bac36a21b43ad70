//! Bundled regression corpus: worked examples, table rows and a few hundred
//! randomized identity checks. Failures are report content, never errors.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use serde::Serialize;
use serde_json::json;

use super::{run_problem, Overrides};
use crate::berger::{analyze_algebra, cartan_prolongation, naive_prolongation_dims, pi_adjoint_test};
use crate::geometry::{check_first_bianchi, check_second_bianchi, gauge_connection, levi_civita, ricci};
use crate::holonomy::{
    check_parallel, classify_geometry, decomposability_certificate, default_cap, flatness_certificate,
    infinitesimal_holonomy, numeric_parallel_transport, reconstruct_parallel_section, square_loop, Candidate,
    Decomposability, FloatMatrix, SectionError, SectionOutcome,
};
use crate::linalg::{Echelon, SparseVec};
use crate::parity::Parity;
use crate::scalar::Scalar;
use crate::superfunc::{with_mul_sign_mutation, ChartSignature, Superfunction};
use crate::superlin::{bracket_with, classical_superalgebra, supertrace, ClassicalName, SuperDim, SuperMatrix};
use crate::testing;

#[derive(Clone, Debug, Serialize)]
pub struct CaseResult {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub millis: u128,
}

#[derive(Clone, Debug, Serialize)]
pub struct SelftestReport {
    pub mutated: bool,
    pub passed: usize,
    pub failed: usize,
    pub runtime_ms: u128,
    pub cases: Vec<CaseResult>,
}

impl SelftestReport {
    pub fn all_pass(&self) -> bool {
        self.failed == 0
    }

    pub fn case(&self, name: &str) -> Option<&CaseResult> {
        self.cases.iter().find(|c| c.name == name)
    }
}

type Case = (&'static str, fn() -> Result<String, String>);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

pub const CASES: &[Case] = &[
    ("supercommutativity", supercommutativity),
    ("leibniz", leibniz),
    ("jacobi", jacobi),
    ("supertrace_of_bracket", supertrace_of_bracket),
    ("echelon_idempotence", echelon_idempotence),
    ("odd_line_example", odd_line_example),
    ("odd_line_sections_rejected", odd_line_sections_rejected),
    ("zero_connection_report", zero_connection_report),
    ("pure_gauge_flatness", pure_gauge_flatness),
    ("torsion_free_bianchi", torsion_free_bianchi),
    ("berger_rows", berger_rows),
    ("prolongation_cosp22", prolongation_cosp22),
    ("pi_adjoint_sl2", pi_adjoint_sl2),
    ("spencer_gl11", spencer_gl11),
    ("kahler_special_cut", kahler_special_cut),
    ("product_decomposition", product_decomposition),
    ("square_loop_order", square_loop_order),
];

/// Runs the corpus, optionally with the product sign corrupted.
pub fn selftest(mutate: bool) -> SelftestReport {
    let start = Instant::now();
    let hook = std::panic::take_hook();
    std::panic::set_hook(Box::new(|_| {}));
    let mut cases = Vec::new();
    for &(name, f) in CASES {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(|| if mutate { with_mul_sign_mutation(f) } else { f() }));
        let (pass, detail) = match outcome {
            Ok(Ok(d)) => (true, d),
            Ok(Err(d)) => (false, d),
            Err(p) => {
                let msg = p
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                (false, format!("panicked: {msg}"))
            }
        };
        cases.push(CaseResult { name, pass, detail, millis: t.elapsed().as_millis() });
    }
    std::panic::set_hook(hook);
    let passed = cases.iter().filter(|c| c.pass).count();
    SelftestReport { mutated: mutate, passed, failed: cases.len() - passed, runtime_ms: start.elapsed().as_millis(), cases }
}

fn random_pair(rng: &mut testing::TestRng, sig: ChartSignature) -> ((Parity, Superfunction), (Parity, Superfunction)) {
    let mut one = || {
        let p = Parity::from_bool(rand::Rng::gen_bool(rng, 0.5));
        (p, testing::superfunction(rng, sig, p, 4, 2))
    };
    (one(), one())
}

fn supercommutativity() -> Result<String, String> {
    let sig = ChartSignature::new(2, 3);
    let mut rng = testing::rng(101);
    let n = 200;
    for i in 0..n {
        let ((pf, f), (pg, g)) = random_pair(&mut rng, sig);
        let s = Scalar::sign(pf.is_odd() && pg.is_odd());
        check(f.mul(&g) == g.mul(&f).scale(&s), || format!("sample {i}: fg ≠ ±gf for f = {f}, g = {g}"))?;
    }
    Ok(format!("{n} samples"))
}

fn leibniz() -> Result<String, String> {
    let sig = ChartSignature::new(2, 3);
    let mut rng = testing::rng(102);
    let n = 100;
    for i in 0..n {
        let ((pf, f), (_, g)) = random_pair(&mut rng, sig);
        for a in 0..sig.dim() {
            let odd_a = sig.coord_parity(a) == 1;
            let lhs = f.mul(&g).partial0(a);
            let rhs = f.partial0(a).mul(&g).add(&f.mul(&g.partial0(a)).scale(&Scalar::sign(odd_a && pf.is_odd())));
            check(lhs == rhs, || format!("sample {i}, coordinate {}", a + 1))?;
        }
    }
    Ok(format!("{n} samples"))
}

fn random_homogeneous(rng: &mut testing::TestRng, dim: SuperDim) -> (Parity, SuperMatrix) {
    let p = Parity::from_bool(rand::Rng::gen_bool(rng, 0.5));
    (p, testing::matrix(rng, dim, p, 0.6))
}

fn jacobi() -> Result<String, String> {
    let dim = SuperDim::new(2, 2);
    let mut rng = testing::rng(103);
    let n = 100;
    for i in 0..n {
        let (pa, a) = random_homogeneous(&mut rng, dim);
        let (pb, b) = random_homogeneous(&mut rng, dim);
        let (pc, c) = random_homogeneous(&mut rng, dim);
        // [a,[b,c]] = [[a,b],c] + (−1)^{|a||b|}[b,[a,c]]
        let lhs = bracket_with(&a, pa, &bracket_with(&b, pb, &c, pc), pb + pc);
        let r1 = bracket_with(&bracket_with(&a, pa, &b, pb), pa + pb, &c, pc);
        let r2 = bracket_with(&b, pb, &bracket_with(&a, pa, &c, pc), pa + pc);
        let rhs = r1.add(&r2.scale(&Scalar::sign(pa.is_odd() && pb.is_odd())));
        check(lhs == rhs, || format!("sample {i}"))?;
    }
    Ok(format!("{n} samples"))
}

fn supertrace_of_bracket() -> Result<String, String> {
    let dim = SuperDim::new(2, 3);
    let mut rng = testing::rng(104);
    let n = 100;
    for i in 0..n {
        let (pa, a) = random_homogeneous(&mut rng, dim);
        let (pb, b) = random_homogeneous(&mut rng, dim);
        check(supertrace(&bracket_with(&a, pa, &b, pb)).is_zero(), || format!("sample {i}"))?;
    }
    Ok(format!("{n} samples"))
}

fn echelon_idempotence() -> Result<String, String> {
    let mut rng = testing::rng(105);
    let n = 50;
    for i in 0..n {
        let vecs: Vec<SparseVec> = (0..6)
            .map(|_| SparseVec::from_dense(&(0..8).map(|_| testing::small_int(&mut rng)).collect::<Vec<_>>()))
            .collect();
        let mut e = Echelon::new(8);
        for v in &vecs {
            e.insert(v);
        }
        let basis = e.basis().to_vec();
        let mut again = Echelon::new(8);
        for v in &basis {
            again.insert(v);
        }
        check(again.basis() == basis.as_slice() && vecs.iter().all(|v| e.contains(v)), || format!("sample {i}"))?;
    }
    Ok(format!("{n} samples"))
}

fn odd_line_example() -> Result<String, String> {
    let t = Instant::now();
    let problem = json!({
        "kind": "connection",
        "name": "odd line",
        "chart": {"n": 0, "m": 1},
        "gamma": {"1,1,1": "xi1"},
        "expect": {
            "/results/holonomy/dim": {"p": 1, "q": 0},
            "/results/holonomy/equals_gl": true,
            "/results/flat": false,
            "/results/curvature/witness/value": "2",
        }
    });
    let report = run_problem(&problem, Overrides::default()).map_err(|e| format!("{e:?}"))?;
    let order = report.json["results"]["holonomy"]["stabilized_at_order"].as_u64();
    check(report.ok(), || report.to_pretty())?;
    check(order.is_some_and(|o| o <= 1), || format!("stabilized at {order:?}"))?;
    let ms = t.elapsed().as_millis();
    check(ms < 1000, || format!("{ms} ms"))?;
    Ok(format!("{ms} ms"))
}

fn odd_line_sections_rejected() -> Result<String, String> {
    let c = testing::odd_line();
    for v in [1, -2, 5] {
        let out = reconstruct_parallel_section(&c, &[], &[Scalar::from_int(v)], 3, 4);
        check(matches!(out, Err(SectionError::NotAnnihilated { .. })), || format!("v = {v}: {out:?}"))?;
    }
    Ok("3 values".into())
}

fn zero_connection_report() -> Result<String, String> {
    let problem = json!({
        "kind": "connection",
        "chart": {"n": 2, "m": 1},
        "gamma": {},
        "expect": {"/results/holonomy/dim": {"p": 0, "q": 0}, "/results/flat": true, "/status/certified": true},
    });
    let report = run_problem(&problem, Overrides::default()).map_err(|e| format!("{e:?}"))?;
    check(report.ok(), || report.to_pretty())?;
    Ok(String::new())
}

fn pure_gauge_flatness() -> Result<String, String> {
    let mut rng = testing::rng(106);
    let shapes = [(1, 1, 1, 1), (2, 1, 1, 1), (1, 2, 2, 1), (2, 2, 2, 2)];
    for &(n, m, p, q) in &shapes {
        let sig = ChartSignature::new(n, m);
        let rank = SuperDim::new(p, q);
        let k = testing::gauge_matrix(&mut rng, sig, rank, 2, 2);
        let conn = gauge_connection(sig, rank, &k).map_err(|e| e.to_string())?;
        check(flatness_certificate(&conn).is_flat(), || format!("{n}|{m} rank {rank}: not flat"))?;
        let x = vec![Scalar::one(); n];
        let h = infinitesimal_holonomy(&conn, &x, default_cap(&conn)).map_err(|e| e.to_string())?;
        check(h.algebra.is_zero(), || format!("{n}|{m}: holonomy {}", h.dim()))?;
        let v: Vec<Scalar> = (0..rank.total()).map(|i| k.get(i, 0).value(&x)).collect();
        match reconstruct_parallel_section(&conn, &x, &v, 4, 4).map_err(|e| e.to_string())? {
            SectionOutcome::Exact(sec) => check(check_parallel(&conn, &sec), || "section not parallel".into())?,
            SectionOutcome::NeedsNumeric { .. } => return Err("polynomial section not found".into()),
        }
        let mut bumped = conn.clone();
        let f = bumped.gamma(0, 0, 0).add(&Superfunction::x(sig, 1));
        bumped.set(0, 0, 0, f);
        check(!flatness_certificate(&bumped).is_flat(), || format!("{n}|{m}: perturbation still flat"))?;
    }
    Ok(format!("{} connections", shapes.len()))
}

fn torsion_free_bianchi() -> Result<String, String> {
    let mut rng = testing::rng(107);
    for i in 0..4 {
        let sig = ChartSignature::new(1 + i % 2, 1 + i / 2);
        let conn = testing::torsion_free_connection(&mut rng, sig, 0.5, 2, 1);
        check(check_first_bianchi(&conn) == Ok(true), || format!("sample {i}: first identity"))?;
        check(check_second_bianchi(&conn) == Ok(true), || format!("sample {i}: second identity"))?;
    }
    let c = testing::odd_line();
    check(check_first_bianchi(&c) == Ok(false), || "torsionful odd line passes".into())?;
    Ok("4 samples".into())
}

fn berger_rows() -> Result<String, String> {
    for (name, p, q, expect) in [
        (ClassicalName::Gl, 1, 1, true),
        (ClassicalName::Osp, 2, 2, true),
        (ClassicalName::Gl, 1, 0, false),
        (ClassicalName::Gl, 0, 1, false),
    ] {
        let g = classical_superalgebra(name, p, q).map_err(|e| e.to_string())?;
        let r = analyze_algebra(&g);
        check(r.is_berger == expect, || format!("{name:?}({p}|{q}): is_berger = {}", r.is_berger))?;
    }
    Ok("4 rows".into())
}

fn prolongation_cosp22() -> Result<String, String> {
    let g = classical_superalgebra(ClassicalName::Cosp, 2, 2).map_err(|e| e.to_string())?;
    let tower = cartan_prolongation(g.ambient(), &g, 2).map_err(|e| e.to_string())?;
    let dims = tower.dims();
    check(dims[1] == SuperDim::new(2, 2) && dims[2] == SuperDim::new(0, 0), || format!("{dims:?}"))?;
    check(naive_prolongation_dims(&g, 2) == dims[1..], || "naive enumerator disagrees".into())?;
    Ok(String::new())
}

fn pi_adjoint_sl2() -> Result<String, String> {
    let g = classical_superalgebra(ClassicalName::Sl, 2, 0).map_err(|e| e.to_string())?;
    let r = pi_adjoint_test(&g).map_err(|e| e.to_string())?;
    check(r.holds(), || format!("{r:?}"))?;
    Ok(String::new())
}

fn spencer_gl11() -> Result<String, String> {
    let g = classical_superalgebra(ClassicalName::Gl, 1, 1).map_err(|e| e.to_string())?;
    let r = analyze_algebra(&g);
    check(r.exactness_ok && r.dims.h22_derived == Some(SuperDim::new(0, 0)), || format!("{r:?}"))?;
    Ok(String::new())
}

fn kahler_special_cut() -> Result<String, String> {
    for (i, (g, j)) in testing::kahler_examples().into_iter().enumerate() {
        let conn = levi_civita(&g).map_err(|e| e.to_string())?;
        let x = vec![Scalar::zero(); g.sig().n];
        let h = infinitesimal_holonomy(&conn, &x, default_cap(&conn)).map_err(|e| e.to_string())?;
        let gx = SuperMatrix::from_rows(g.chart().rank, g.value(&x));
        let cls = classify_geometry(&h.algebra, &[Candidate::special_unitary("special", &gx, &j)]);
        let flat = ricci(&conn).map_err(|e| e.to_string())?.is_zero();
        check(cls[0].contained == flat, || format!("example {i}: contained = {}, ricci flat = {flat}", cls[0].contained))?;
    }
    Ok("2 metrics".into())
}

fn product_decomposition() -> Result<String, String> {
    let g = testing::product_metric(&testing::walker_metric("x1*x2^2 + 3*x2"), &testing::walker_metric("x2^3 + x1*x2"));
    let conn = levi_civita(&g).map_err(|e| e.to_string())?;
    let x = vec![Scalar::zero(); 4];
    let h = infinitesimal_holonomy(&conn, &x, default_cap(&conn)).map_err(|e| e.to_string())?;
    let gx = SuperMatrix::from_rows(g.chart().rank, g.value(&x));
    match decomposability_certificate(&h.algebra, &gx) {
        Decomposability::Decomposable { witness, complement } => Ok(format!("{}+{}", witness.len(), complement.len())),
        other => Err(format!("{other:?}")),
    }
}

fn square_loop_order() -> Result<String, String> {
    let g = testing::walker_metric("x1*x2^2 + 3*x2");
    let conn = levi_civita(&g).map_err(|e| e.to_string())?;
    let xs = [Scalar::ratio(3, 10), Scalar::ratio(-1, 5)];
    let x = [0.3, -0.2];
    let r = crate::geometry::curvature(&conn).matrix_at(0, 1, &xs, conn.chart().rank);
    let rf = FloatMatrix::from_fn(2, 2, |i, j| r.get(i, j).to_f64());
    let mut errs = Vec::new();
    for eps in [0.1, 0.05, 0.025] {
        let t = numeric_parallel_transport(&conn, &square_loop(&x, 0, 1, eps), 400).map_err(|e| e.to_string())?;
        errs.push((t.matrix - (FloatMatrix::identity(2, 2) - &rf * (eps * eps))).amax());
    }
    let order = ((errs[0] / errs[2]).ln() / 4f64.ln()).abs();
    check(order >= 2.7, || format!("observed order {order:.3}"))?;
    Ok(format!("order {order:.3}"))
}
