//! Batch front end: problem files in, deterministic report JSON out.
//!
//! Reports use `serde_json`'s sorted maps and print every exact scalar as a
//! string, so identical inputs give byte-identical output. Wall-clock timing
//! is left out of problem reports for the same reason; only the self-test
//! records it.

mod schema;
pub mod selftest;
mod tables;

use serde_json::{json, Map, Value};

pub use schema::{escape_token, parse_problem, validate, CandidateSpec, ProblemFile, ProblemKind, SchemaError};
pub use tables::{table_rows, TableFamily};

use crate::berger::{analyze_algebra, cartan_prolongation, naive_prolongation_dims, pi_adjoint_test};
use crate::geometry::{
    check_first_bianchi, check_second_bianchi, curvature, levi_civita, ricci, torsion, validate_metric, ConnectionData,
    GeometryError, MetricData,
};
use crate::holonomy::{
    associative_envelope, classify_geometry, conjugated_generators, decomposability_certificate, default_cap,
    infinitesimal_holonomy, invariant_vectors, reconstruct_parallel_section, span_residual, Candidate,
    Decomposability, HolonomyStatus, SectionOutcome, TransportError,
};
use crate::scalar::Scalar;
use crate::superlin::{StructureTensor, SubSuperalgebra, SuperMatrix};
use schema::{Common, NamedAlgebra, Validated};

/// Command-line overrides applied on top of a problem's `options`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Overrides {
    pub cap_order: Option<usize>,
    pub transport_steps: Option<usize>,
}

/// Distance below which float generators count as inside the exact algebra.
pub const TRANSPORT_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct Report {
    pub json: Value,
}

impl Report {
    /// No pipeline error and no failed assertion.
    pub fn ok(&self) -> bool {
        self.json["ok"] == Value::Bool(true)
    }

    pub fn to_pretty(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.json).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn errors(&self) -> Vec<String> {
        self.json["errors"].as_array().map(|a| a.iter().filter_map(|e| e.as_str().map(str::to_owned)).collect()).unwrap_or_default()
    }

    /// Short human-readable digest for terminals.
    pub fn summary(&self) -> String {
        let j = &self.json;
        let mut out = format!("{} `{}`: ", j["kind"].as_str().unwrap_or("?"), j["name"].as_str().unwrap_or(""));
        let r = &j["results"];
        if let Some(h) = r.get("holonomy") {
            out.push_str(&format!(
                "hol dim {}|{} ({}), flat={}",
                h["dim"]["p"], h["dim"]["q"], h["status"].as_str().unwrap_or("?"), r["flat"]
            ));
        } else if let Some(h) = r.get("holds") {
            out.push_str(&format!("holds={h}, g1={}, g2={}", r["g1"], r["g2"]));
        } else if let Some(b) = r.get("is_berger") {
            out.push_str(&format!("is_berger={b}, H22_derived={}", r["dims"]["H22_derived"]));
        } else if let Some(d) = r.get("dims") {
            out.push_str(&format!("dims={d}"));
        }
        let failed = j["assertions"].as_array().map(|a| a.iter().filter(|x| x["pass"] != true).count()).unwrap_or(0);
        out.push_str(&format!("; errors={}, failed assertions={failed}", self.errors().len()));
        out
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ProblemError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("schema errors:\n{}", .0.iter().map(|e| format!("  {e}")).collect::<Vec<_>>().join("\n"))]
    Schema(Vec<SchemaError>),
}

pub fn run_problem_str(text: &str, overrides: Overrides) -> Result<Report, ProblemError> {
    let value: Value = serde_json::from_str(text)?;
    run_problem(&value, overrides).map_err(ProblemError::Schema)
}

/// Validates and runs one problem. Schema problems are returned as errors;
/// everything after validation ends up inside the report.
pub fn run_problem(input: &Value, overrides: Overrides) -> Result<Report, Vec<SchemaError>> {
    let pf = parse_problem(input)?;
    let validated = validate(&pf)?;
    let mut ctx = Ctx::default();
    let results = match validated {
        Validated::Connection { conn, mut common } => {
            apply(&mut common, overrides);
            connection_pipeline(&mut ctx, &conn, &common, None)
        }
        Validated::Metric { metric, mut common } => {
            apply(&mut common, overrides);
            metric_pipeline(&mut ctx, &metric, &common)
        }
        Validated::Algebra { algebra } => algebra_pipeline(&algebra),
        Validated::Prolongation { algebra, order } => prolongation_pipeline(&algebra, order),
        Validated::PiAdjoint { algebra } => pi_pipeline(&mut ctx, &algebra),
    };
    let exact_kind = matches!(pf.kind, ProblemKind::Algebra | ProblemKind::Prolongation | ProblemKind::PiAdjoint);
    let status = json!({
        "certified": ctx.errors.is_empty() && (exact_kind || ctx.holonomy == Some(HolonomyStatus::Certified)),
        "capped": ctx.holonomy == Some(HolonomyStatus::Capped),
        "inconclusive": ctx.inconclusive || ctx.holonomy == Some(HolonomyStatus::Plateau),
        "needs_numeric": ctx.needs_numeric,
    });
    let mut report = Map::new();
    report.insert("kind".into(), json!(pf.kind.to_string()));
    report.insert("name".into(), json!(pf.name.clone().unwrap_or_default()));
    report.insert("input".into(), input.clone());
    report.insert("results".into(), results);
    report.insert("status".into(), status);
    report.insert("errors".into(), json!(ctx.errors));
    let view = Value::Object(report.clone());
    let assertions: Vec<Value> = pf
        .expect
        .iter()
        .map(|(ptr, expected)| {
            let actual = view.pointer(ptr).cloned();
            let pass = actual.as_ref() == Some(expected);
            json!({"pointer": ptr, "expected": expected, "actual": actual, "pass": pass})
        })
        .collect();
    let ok = ctx.errors.is_empty() && assertions.iter().all(|a| a["pass"] == true);
    report.insert("assertions".into(), Value::Array(assertions));
    report.insert("ok".into(), json!(ok));
    Ok(Report { json: Value::Object(report) })
}

fn apply(common: &mut Common, o: Overrides) {
    if o.cap_order.is_some() {
        common.cap = o.cap_order;
    }
    if o.transport_steps.is_some() {
        common.steps = o.transport_steps;
    }
}

#[derive(Default)]
struct Ctx {
    errors: Vec<String>,
    holonomy: Option<HolonomyStatus>,
    inconclusive: bool,
    needs_numeric: bool,
}

fn strings(v: &[Scalar]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn component_map(keys: impl Iterator<Item = (Vec<usize>, String)>) -> Map<String, Value> {
    keys.map(|(k, v)| (k.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(","), Value::String(v))).collect()
}

/// Result of a tangent-only operation: `null` on a general sheaf.
fn tangent_only<T>(r: Result<T, GeometryError>, f: impl FnOnce(T) -> Value) -> Value {
    match r {
        Ok(t) => f(t),
        Err(_) => Value::Null,
    }
}

fn metric_matrix(g: &MetricData, x: &[Scalar]) -> SuperMatrix {
    SuperMatrix::from_rows(g.chart().rank, g.value(x))
}

fn connection_pipeline(ctx: &mut Ctx, conn: &ConnectionData, common: &Common, metric: Option<&MetricData>) -> Value {
    let ch = conn.chart();
    let (d, r) = (ch.d(), ch.r());
    let x = &common.point;
    let mut out = Map::new();

    let rt = curvature(conn);
    let mut comps = Vec::new();
    for b in 0..r {
        for a in 0..d {
            for bb in 0..d {
                for aa in 0..r {
                    let f = rt.get(b, a, bb, aa);
                    if !f.is_zero() {
                        comps.push((vec![b, a, bb, aa], f.to_string()));
                    }
                }
            }
        }
    }
    let witness = rt.first_nonzero().map(|(b, a, bb, aa)| {
        json!({"B": b + 1, "a": a + 1, "b": bb + 1, "A": aa + 1, "value": rt.get(b, a, bb, aa).to_string()})
    });
    out.insert(
        "curvature".into(),
        json!({"zero": rt.is_zero(), "witness": witness, "components": component_map(comps.into_iter())}),
    );
    out.insert("flat".into(), json!(rt.is_zero()));
    out.insert(
        "torsion".into(),
        tangent_only(torsion(conn), |t| {
            let mut comps = Vec::new();
            for a in 0..d {
                for b in 0..d {
                    for c in 0..d {
                        if !t.get(a, b, c).is_zero() {
                            comps.push((vec![a, b, c], t.get(a, b, c).to_string()));
                        }
                    }
                }
            }
            json!({"zero": t.is_zero(), "components": component_map(comps.into_iter())})
        }),
    );
    out.insert(
        "bianchi".into(),
        json!({
            "first": tangent_only(check_first_bianchi(conn), Value::Bool),
            "second": tangent_only(check_second_bianchi(conn), Value::Bool),
        }),
    );
    out.insert(
        "ricci".into(),
        tangent_only(ricci(conn), |ric| {
            let mut comps = Vec::new();
            for a in 0..d {
                for b in 0..d {
                    if !ric.get(a, b).is_zero() {
                        comps.push((vec![a, b], ric.get(a, b).to_string()));
                    }
                }
            }
            json!({"zero": ric.is_zero(), "components": component_map(comps.into_iter())})
        }),
    );

    let cap = common.cap.unwrap_or_else(|| default_cap(conn));
    let hol = match infinitesimal_holonomy(conn, x, cap) {
        Ok(h) => h,
        Err(e) => {
            ctx.errors.push(format!("holonomy: {e}"));
            return Value::Object(out);
        }
    };
    ctx.holonomy = Some(hol.status);
    let full = SubSuperalgebra::full(ch.rank);
    let generators: Vec<Value> = hol
        .generator_log
        .iter()
        .map(|g| json!({"order": g.order, "slots": g.slots.iter().map(|s| s + 1).collect::<Vec<_>>(), "matrix": g.matrix.to_strings()}))
        .collect();
    out.insert(
        "holonomy".into(),
        json!({
            "dim": hol.dim(),
            "status": hol.status,
            "stabilized_at_order": hol.stabilized_at_order,
            "cap_order": cap,
            "equals_gl": hol.algebra.same_as(&full),
            "algebra": hol.algebra.to_json(),
            "generators": generators,
        }),
    );
    let invariants = invariant_vectors(&hol.algebra);
    out.insert(
        "invariants".into(),
        Value::Array(invariants.iter().map(|(p, v)| json!({"parity": p, "vector": strings(v)})).collect()),
    );

    // parallel sections through each invariant vector
    let mut sections = Vec::new();
    for (_, v) in &invariants {
        let entry = match reconstruct_parallel_section(conn, x, v, 4, cap) {
            Ok(SectionOutcome::Exact(sec)) => json!({"value": strings(v), "status": "exact", "section": sec.to_strings()}),
            Ok(SectionOutcome::NeedsNumeric { max_degree }) => {
                ctx.needs_numeric = true;
                json!({"value": strings(v), "status": "needs_numeric", "max_degree": max_degree})
            }
            Err(e) => json!({"value": strings(v), "status": "failed", "reason": e.to_string()}),
        };
        sections.push(entry);
    }
    out.insert("parallel_sections".into(), Value::Array(sections));

    let mut candidates: Vec<Candidate> = Vec::new();
    if let Some(g) = metric {
        if !common.candidates.iter().any(|c| c.name == "metric") {
            let gx = metric_matrix(g, x);
            if let Ok(t) = StructureTensor::form(gx) {
                candidates.push(Candidate::stabilizer("metric", &t));
            }
        }
    }
    for c in &common.candidates {
        let cand = match (&c.form, &c.j) {
            (Some(f), Some(j)) => Some(Candidate::special_unitary(c.name.clone(), f, j)),
            (Some(f), None) => StructureTensor::form(f.clone()).ok().map(|t| Candidate::stabilizer(c.name.clone(), &t)),
            (None, Some(j)) => StructureTensor::endomorphism(j.clone()).ok().map(|t| Candidate::stabilizer(c.name.clone(), &t)),
            (None, None) => None,
        };
        match cand {
            Some(c) => candidates.push(c),
            None => ctx.errors.push(format!("candidate `{}` is not a valid structure tensor", c.name)),
        }
    }
    out.insert("classification".into(), json!(classify_geometry(&hol.algebra, &candidates)));

    let n = ch.rank.total();
    let envelope = associative_envelope(&hol.algebra);
    let decomposition = match metric {
        Some(g) => {
            let cert = decomposability_certificate(&hol.algebra, &metric_matrix(g, x));
            if matches!(cert, Decomposability::Inconclusive { .. }) {
                ctx.inconclusive = true;
            }
            json!(cert)
        }
        None if n > 0 && envelope == n * n => json!({"status": "weakly_irreducible", "envelope_dim": envelope}),
        None => json!({"status": "needs_metric", "envelope_dim": envelope}),
    };
    out.insert("decomposability".into(), decomposition);

    if let Some(steps) = common.steps {
        out.insert("transport".into(), transport_check(conn, &hol.algebra, x, steps));
    }
    Value::Object(out)
}

/// Float cross-check: curvature derivatives transported back to `x` along
/// straight segments must stay in the exact algebra.
fn transport_check(conn: &ConnectionData, h: &SubSuperalgebra, x: &[Scalar], steps: usize) -> Value {
    let n = conn.chart().sig.n;
    if n == 0 {
        return json!({"status": "skipped", "reason": "no even directions"});
    }
    let xf: Vec<f64> = x.iter().map(Scalar::to_f64).collect();
    let mut paths = vec![vec![xf.clone()]];
    for i in 0..n {
        for step in [0.25, -0.25] {
            let mut y = xf.clone();
            y[i] += step;
            paths.push(vec![xf.clone(), y]);
        }
    }
    match conjugated_generators(conn, &xf, &paths, 1, steps) {
        Ok(gens) => {
            let residual = span_residual(h, &gens);
            json!({
                "status": "numeric",
                "paths": paths.len(),
                "generators": gens.len(),
                "residual": residual,
                "within_tolerance": residual < TRANSPORT_TOLERANCE,
            })
        }
        Err(TransportError::NonReal) => json!({"status": "skipped", "reason": TransportError::NonReal.to_string()}),
        Err(e) => json!({"status": "failed", "reason": e.to_string()}),
    }
}

fn metric_pipeline(ctx: &mut Ctx, g: &MetricData, common: &Common) -> Value {
    let report = validate_metric(g, &common.point);
    let mut out = Map::new();
    out.insert("metric".into(), json!(report));
    if !report.valid {
        ctx.errors.push(format!("metric is invalid: {}", report.failures.join("; ")));
        return Value::Object(out);
    }
    let conn = match levi_civita(g) {
        Ok(c) => c,
        Err(e) => {
            ctx.errors.push(format!("levi-civita: {e}"));
            return Value::Object(out);
        }
    };
    out.insert("levi_civita".into(), json!(conn.to_map()));
    if let Value::Object(rest) = connection_pipeline(ctx, &conn, common, Some(g)) {
        out.extend(rest);
    }
    Value::Object(out)
}

fn algebra_pipeline(a: &NamedAlgebra) -> Value {
    let report = analyze_algebra(&a.algebra);
    let mut v = json!(report);
    v["algebra"] = json!(a.label);
    v
}

fn prolongation_pipeline(a: &NamedAlgebra, order: usize) -> Value {
    let tower = cartan_prolongation(a.algebra.ambient(), &a.algebra, order).expect("validated order and dimension");
    let dims: Vec<_> = tower.dims().into_iter().skip(1).collect();
    let naive = naive_prolongation_dims(&a.algebra, order);
    json!({
        "algebra": a.label,
        "rep": a.algebra.ambient(),
        "algebra_dim": a.algebra.graded_dim(),
        "order": order,
        "dims": dims,
        "naive_dims": naive,
        "oracle_agrees": dims == naive,
    })
}

fn pi_pipeline(ctx: &mut Ctx, a: &NamedAlgebra) -> Value {
    match pi_adjoint_test(&a.algebra) {
        Ok(rep) => {
            let mut v = json!(rep);
            v["holds"] = json!(rep.holds());
            v["algebra"] = json!(a.label);
            v
        }
        Err(e) => {
            ctx.errors.push(e.to_string());
            json!({"algebra": a.label})
        }
    }
}

#[cfg(test)]
mod tests;
