//! Table-row certificates for whole classical families.

use serde_json::{json, Value};

use crate::berger::analyze_algebra;
use crate::superlin::{classical_superalgebra, ClassicalName};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableFamily {
    Gl,
    Sl,
    Osp,
    Pe,
    Spe,
    Q,
}

impl std::str::FromStr for TableFamily {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "gl" => TableFamily::Gl,
            "sl" => TableFamily::Sl,
            "osp" => TableFamily::Osp,
            "pe" => TableFamily::Pe,
            "spe" => TableFamily::Spe,
            "q" => TableFamily::Q,
            other => return Err(format!("unknown family `{other}` (gl, sl, osp, pe, spe, q)")),
        })
    }
}

impl TableFamily {
    fn classical(self) -> ClassicalName {
        match self {
            TableFamily::Gl => ClassicalName::Gl,
            TableFamily::Sl => ClassicalName::Sl,
            TableFamily::Osp => ClassicalName::Osp,
            TableFamily::Pe => ClassicalName::Pe,
            TableFamily::Spe => ClassicalName::Spe,
            TableFamily::Q => ClassicalName::Q,
        }
    }

    fn tag(self) -> &'static str {
        match self {
            TableFamily::Gl => "gl",
            TableFamily::Sl => "sl",
            TableFamily::Osp => "osp",
            TableFamily::Pe => "pe",
            TableFamily::Spe => "spe",
            TableFamily::Q => "q",
        }
    }

    /// Standard representations `p|q` with `1 ≤ p + q ≤ max_dim` that the
    /// family admits.
    pub fn sizes(self, max_dim: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for total in 1..=max_dim {
            for p in (0..=total).rev() {
                let q = total - p;
                let ok = match self {
                    TableFamily::Gl | TableFamily::Sl => true,
                    TableFamily::Osp => q % 2 == 0,
                    TableFamily::Pe | TableFamily::Spe | TableFamily::Q => p == q,
                };
                if ok {
                    out.push((p, q));
                }
            }
        }
        out
    }
}

/// One Berger report per admissible size, smallest first.
pub fn table_rows(family: TableFamily, max_dim: usize) -> Value {
    let rows: Vec<Value> = family
        .sizes(max_dim)
        .into_iter()
        .map(|(p, q)| {
            let g = classical_superalgebra(family.classical(), p, q).expect("admissible size");
            let mut row = json!(analyze_algebra(&g));
            row["algebra"] = json!(format!("{}({p}|{q})", family.tag()));
            row
        })
        .collect();
    json!({"family": family.tag(), "max_dim": max_dim, "rows": rows})
}
