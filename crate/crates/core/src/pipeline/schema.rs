//! Problem files: typed shape, strict deserialization and the semantic checks
//! that need more than one field. Every error carries a JSON pointer.

use std::collections::BTreeMap;
use std::fmt;

use serde::Deserialize;
use serde_json::Value;

use crate::geometry::{Chart, ConnectionData, GeometryError, MetricData};
use crate::scalar::Scalar;
use crate::superfunc::ChartSignature;
use crate::superlin::{classical_superalgebra, ClassicalName, SubSuperalgebra, SuperDim, SuperMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    Connection,
    Metric,
    Algebra,
    Prolongation,
    PiAdjoint,
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ProblemKind::Connection => "connection",
            ProblemKind::Metric => "metric",
            ProblemKind::Algebra => "algebra",
            ProblemKind::Prolongation => "prolongation",
            ProblemKind::PiAdjoint => "pi_adjoint",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub kind: ProblemKind,
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub chart: Option<ChartSignature>,
    /// Fiber rank of a connection on a general sheaf; tangent when absent.
    #[serde(default)]
    pub rank: Option<SuperDim>,
    /// `Γ^A_{aB}` under keys `"a,B,A"`, 1-based.
    #[serde(default)]
    pub gamma: Option<BTreeMap<String, String>>,
    /// `g_{ab}` under keys `"a,b"`, 1-based.
    #[serde(default)]
    pub g: Option<BTreeMap<String, String>>,
    #[serde(default)]
    pub algebra: Option<AlgebraSpec>,
    #[serde(default)]
    pub order: Option<usize>,
    #[serde(default)]
    pub options: Options,
    /// Report JSON pointer → expected value.
    #[serde(default)]
    pub expect: BTreeMap<String, Value>,
}

/// Either a classical family member or an explicit generator list.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraSpec {
    #[serde(default)]
    pub classical: Option<ClassicalName>,
    #[serde(default)]
    pub p: Option<usize>,
    #[serde(default)]
    pub q: Option<usize>,
    #[serde(default)]
    pub dim: Option<SuperDim>,
    #[serde(default)]
    pub generators: Option<Vec<Vec<Vec<Scalar>>>>,
    /// Close the generator span under the bracket instead of requiring it
    /// to be closed already.
    #[serde(default)]
    pub closure: bool,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    /// Base point (even coordinates); the origin when absent.
    #[serde(default)]
    pub point: Option<Vec<Scalar>>,
    #[serde(default)]
    pub cap_order: Option<usize>,
    /// RK4 steps per path segment; transport validation runs only when set.
    #[serde(default)]
    pub transport_steps: Option<usize>,
    #[serde(default)]
    pub candidates: Vec<CandidateSpec>,
}

/// `form` alone: stabilizer of a bilinear form. `j` alone: stabilizer of an
/// endomorphism. Both: the special-unitary cut of the pair.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CandidateSpec {
    pub name: String,
    #[serde(default)]
    pub form: Option<Vec<Vec<Scalar>>>,
    #[serde(default)]
    pub j: Option<Vec<Vec<Scalar>>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemaError {
    pub pointer: String,
    pub message: String,
}

impl fmt::Display for SchemaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let at = if self.pointer.is_empty() { "/" } else { &self.pointer };
        write!(f, "{at}: {}", self.message)
    }
}

impl SchemaError {
    fn new(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        SchemaError { pointer: pointer.into(), message: message.into() }
    }
}

/// Escapes one reference token (`~` → `~0`, `/` → `~1`).
pub fn escape_token(s: &str) -> String {
    s.replace('~', "~0").replace('/', "~1")
}

fn pointer_of(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        out.push('/');
        match seg {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } | Segment::Enum { variant: key } => out.push_str(&escape_token(key)),
            Segment::Unknown => out.push('?'),
        }
    }
    out
}

pub fn parse_problem(value: &Value) -> Result<ProblemFile, Vec<SchemaError>> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let pointer = pointer_of(e.path());
        vec![SchemaError::new(pointer, e.into_inner().to_string())]
    })
}

/// Everything a pipeline needs, already built and cross-checked.
pub enum Validated {
    Connection { conn: ConnectionData, common: Common },
    Metric { metric: MetricData, common: Common },
    Algebra { algebra: NamedAlgebra },
    Prolongation { algebra: NamedAlgebra, order: usize },
    PiAdjoint { algebra: NamedAlgebra },
}

pub struct Common {
    pub point: Vec<Scalar>,
    pub cap: Option<usize>,
    pub steps: Option<usize>,
    pub candidates: Vec<ValidCandidate>,
}

pub struct ValidCandidate {
    pub name: String,
    pub form: Option<SuperMatrix>,
    pub j: Option<SuperMatrix>,
}

pub struct NamedAlgebra {
    pub label: String,
    pub algebra: SubSuperalgebra,
}

fn geometry_pointer(field: &str, e: &GeometryError) -> String {
    match e {
        GeometryError::Parse { key, .. } | GeometryError::Parity { key, .. } => format!("/{field}/{}", escape_token(key)),
        GeometryError::BadKey(key) | GeometryError::KeyOutOfRange(key) => format!("/{field}/{}", escape_token(key)),
        _ => format!("/{field}"),
    }
}

fn square_matrix(rows: &[Vec<Scalar>], dim: SuperDim, pointer: &str, errs: &mut Vec<SchemaError>) -> Option<SuperMatrix> {
    let n = dim.total();
    if rows.len() != n {
        errs.push(SchemaError::new(pointer, format!("expected {n} rows, got {}", rows.len())));
        return None;
    }
    for (i, r) in rows.iter().enumerate() {
        if r.len() != n {
            errs.push(SchemaError::new(format!("{pointer}/{i}"), format!("expected {n} entries, got {}", r.len())));
            return None;
        }
    }
    Some(SuperMatrix::from_rows(dim, rows.to_vec()))
}

fn field_fits(sig: ChartSignature, s: &Scalar) -> bool {
    sig.field == crate::scalar::Field::GaussianRational || s.is_real()
}

fn validate_algebra(spec: &AlgebraSpec, errs: &mut Vec<SchemaError>) -> Option<NamedAlgebra> {
    match (&spec.classical, &spec.generators) {
        (Some(name), None) => {
            if spec.dim.is_some() || spec.closure {
                errs.push(SchemaError::new("/algebra", "`dim` and `closure` only apply to generator lists"));
                return None;
            }
            let (Some(p), Some(q)) = (spec.p, spec.q) else {
                errs.push(SchemaError::new("/algebra", "classical algebras need `p` and `q`"));
                return None;
            };
            match classical_superalgebra(*name, p, q) {
                Ok(algebra) => {
                    let tag = serde_json::to_value(name).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default();
                    Some(NamedAlgebra { label: format!("{tag}({p}|{q})"), algebra })
                }
                Err(e) => {
                    errs.push(SchemaError::new("/algebra", e.to_string()));
                    None
                }
            }
        }
        (None, Some(gens)) => {
            if spec.p.is_some() || spec.q.is_some() {
                errs.push(SchemaError::new("/algebra", "`p` and `q` only apply to classical algebras; use `dim`"));
                return None;
            }
            let Some(dim) = spec.dim else {
                errs.push(SchemaError::new("/algebra/dim", "generator lists need `dim`"));
                return None;
            };
            let before = errs.len();
            let mats: Vec<SuperMatrix> = gens
                .iter()
                .enumerate()
                .filter_map(|(i, m)| square_matrix(m, dim, &format!("/algebra/generators/{i}"), errs))
                .collect();
            if errs.len() > before {
                return None;
            }
            let span = SubSuperalgebra::span(dim, &mats);
            let algebra = if spec.closure {
                span.closure_with(&[])
            } else if span.is_closed() {
                span
            } else {
                errs.push(SchemaError::new("/algebra/generators", "span is not closed under the bracket (set `closure`)"));
                return None;
            };
            Some(NamedAlgebra { label: format!("custom({dim})"), algebra })
        }
        _ => {
            errs.push(SchemaError::new("/algebra", "give exactly one of `classical` or `generators`"));
            None
        }
    }
}

fn unused(pf: &ProblemFile, errs: &mut Vec<SchemaError>, allowed: &[&str]) {
    let present = [
        ("chart", pf.chart.is_some()),
        ("rank", pf.rank.is_some()),
        ("gamma", pf.gamma.is_some()),
        ("g", pf.g.is_some()),
        ("algebra", pf.algebra.is_some()),
        ("order", pf.order.is_some()),
    ];
    for (field, here) in present {
        if here && !allowed.contains(&field) {
            errs.push(SchemaError::new(format!("/{field}"), format!("not used by kind `{}`", pf.kind)));
        }
    }
    let o = &pf.options;
    if !allowed.contains(&"options")
        && (o.point.is_some() || o.cap_order.is_some() || o.transport_steps.is_some() || !o.candidates.is_empty())
    {
        errs.push(SchemaError::new("/options", format!("not used by kind `{}`", pf.kind)));
    }
}

fn validate_common(pf: &ProblemFile, sig: ChartSignature, rank: SuperDim, errs: &mut Vec<SchemaError>) -> Common {
    let o = &pf.options;
    let point = match &o.point {
        None => vec![Scalar::zero(); sig.n],
        Some(p) => {
            if p.len() != sig.n {
                errs.push(SchemaError::new("/options/point", format!("expected {} even coordinates, got {}", sig.n, p.len())));
            }
            for (i, s) in p.iter().enumerate() {
                if !field_fits(sig, s) {
                    errs.push(SchemaError::new(format!("/options/point/{i}"), "not in the chart's field"));
                }
            }
            p.clone()
        }
    };
    if o.transport_steps == Some(0) {
        errs.push(SchemaError::new("/options/transport_steps", "must be positive"));
    }
    let mut candidates = Vec::new();
    for (i, c) in o.candidates.iter().enumerate() {
        let base = format!("/options/candidates/{i}");
        if c.form.is_none() && c.j.is_none() {
            errs.push(SchemaError::new(base, "needs `form`, `j` or both"));
            continue;
        }
        let form = c.form.as_ref().and_then(|m| square_matrix(m, rank, &format!("{base}/form"), errs));
        let j = c.j.as_ref().and_then(|m| square_matrix(m, rank, &format!("{base}/j"), errs));
        for (what, m) in [("form", &form), ("j", &j)] {
            if let Some(m) = m {
                if m.parity().is_none() {
                    errs.push(SchemaError::new(format!("{base}/{what}"), "must be homogeneous"));
                }
            }
        }
        candidates.push(ValidCandidate { name: c.name.clone(), form, j });
    }
    Common { point, cap: o.cap_order, steps: o.transport_steps, candidates }
}

/// Cross-field checks and construction of the pipeline inputs.
pub fn validate(pf: &ProblemFile) -> Result<Validated, Vec<SchemaError>> {
    let mut errs = Vec::new();
    for key in pf.expect.keys() {
        if !key.is_empty() && !key.starts_with('/') {
            errs.push(SchemaError::new(format!("/expect/{}", escape_token(key)), "not a JSON pointer"));
        }
    }
    let out = match pf.kind {
        ProblemKind::Connection | ProblemKind::Metric => {
            let metric = pf.kind == ProblemKind::Metric;
            if metric {
                unused(pf, &mut errs, &["chart", "g", "options"]);
            } else {
                unused(pf, &mut errs, &["chart", "rank", "gamma", "options"]);
            }
            let field = if metric { "g" } else { "gamma" };
            let entries = if metric { pf.g.as_ref() } else { pf.gamma.as_ref() };
            match (pf.chart, entries) {
                (None, _) => {
                    errs.push(SchemaError::new("/chart", "required"));
                    None
                }
                (_, None) => {
                    errs.push(SchemaError::new(format!("/{field}"), "required"));
                    None
                }
                (Some(sig), Some(map)) => {
                    let chart = match pf.rank {
                        Some(r) => Chart::bundle(sig, r),
                        None => Chart::tangent(sig),
                    };
                    let common = validate_common(pf, sig, chart.rank, &mut errs);
                    if metric {
                        match MetricData::from_map(sig, map) {
                            Ok(metric) => Some(Validated::Metric { metric, common }),
                            Err(e) => {
                                errs.push(SchemaError::new(geometry_pointer(field, &e), e.to_string()));
                                None
                            }
                        }
                    } else {
                        match ConnectionData::from_map(chart, map) {
                            Ok(conn) => Some(Validated::Connection { conn, common }),
                            Err(e) => {
                                errs.push(SchemaError::new(geometry_pointer(field, &e), e.to_string()));
                                None
                            }
                        }
                    }
                }
            }
        }
        ProblemKind::Algebra | ProblemKind::Prolongation | ProblemKind::PiAdjoint => {
            let prolong = pf.kind == ProblemKind::Prolongation;
            unused(pf, &mut errs, if prolong { &["algebra", "order"] } else { &["algebra"] });
            let algebra = match &pf.algebra {
                Some(spec) => validate_algebra(spec, &mut errs),
                None => {
                    errs.push(SchemaError::new("/algebra", "required"));
                    None
                }
            };
            let order = if prolong {
                match pf.order {
                    Some(k) if k >= 1 => Some(k),
                    Some(_) => {
                        errs.push(SchemaError::new("/order", "must be at least 1"));
                        None
                    }
                    None => {
                        errs.push(SchemaError::new("/order", "required"));
                        None
                    }
                }
            } else {
                Some(0)
            };
            match (algebra, order) {
                (Some(algebra), Some(order)) => Some(match pf.kind {
                    ProblemKind::Algebra => Validated::Algebra { algebra },
                    ProblemKind::Prolongation => Validated::Prolongation { algebra, order },
                    _ => Validated::PiAdjoint { algebra },
                }),
                _ => None,
            }
        }
    };
    match out {
        Some(v) if errs.is_empty() => Ok(v),
        _ => Err(errs),
    }
}
