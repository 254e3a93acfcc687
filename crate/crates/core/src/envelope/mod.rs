//! Inductive construction of K-theoretic stable envelopes on a GKM model
//! and an independent checker for their defining properties.

mod verify;

pub use verify::{verify_stab, Check, VerifyReport};

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exact_algebra::{fmt_q, parse_poly, parse_q, LaurentPoly, Q};
use crate::gkm_model::{attracting_decomposition, degree_polytope, normalization, AttractingData, GKMModel};
use crate::lattice_geometry::{Chamber, PartialOrder};
use crate::toric_interpolation::{solve_residues, Binomial, PivotOrder};

#[derive(Clone, Debug)]
pub struct StabOptions {
    /// Slope coefficient; defaults to the model's.
    pub slope: Option<Q>,
    /// Total order refining the chamber order, listed from the bottom.
    pub order: Option<Vec<usize>>,
    pub pivot: PivotOrder,
}

impl Default for StabOptions {
    fn default() -> Self {
        StabOptions { slope: None, order: None, pivot: PivotOrder::Natural }
    }
}

/// Restrictions of stable envelopes: `entries[j][i] = Stab(F_i)|_{F_j}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabMatrix {
    pub model: GKMModel,
    pub chamber: Chamber,
    pub slope: Q,
    pub order: Vec<usize>,
    pub entries: Vec<Vec<LaurentPoly>>,
    pub warnings: Vec<String>,
}

/// Refinement by `<L, sigma>`, then by index.
pub fn default_refinement(model: &GKMModel, c: &Chamber, order: &PartialOrder) -> Vec<usize> {
    order.refine_by(|k| (c.pairing(&model.ring, &model.points[k].ample), k))
}

pub fn compute_stab(model: &GKMModel, c: &Chamber, slope: Option<Q>, order: Option<Vec<usize>>) -> Result<StabMatrix> {
    compute_stab_with(model, c, &StabOptions { slope, order, pivot: PivotOrder::Natural })
}

pub fn compute_stab_with(model: &GKMModel, c: &Chamber, opts: &StabOptions) -> Result<StabMatrix> {
    let data = attracting_decomposition(model, c)?;
    let po = model.ample_order(c)?;
    let slope = match opts.slope {
        Some(s) => s,
        None => model.default_slope()?,
    };
    let refined = match &opts.order {
        Some(o) => {
            if !po.is_extension(o) {
                return Err(Error::Refinement(format!(
                    "{} is not a linear extension of the chamber order",
                    o.iter().map(|&k| model.points[k].name.as_str()).collect::<Vec<_>>().join(" < ")
                )));
            }
            o.clone()
        }
        None => default_refinement(model, c, &po),
    };
    let n = model.len();
    let columns: Vec<Result<(Vec<LaurentPoly>, Vec<String>)>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..n)
            .map(|i| {
                let (data, po, refined) = (&data, &po, &refined);
                scope.spawn(move || column(model, data, po, refined, i, slope, &opts.pivot))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("column worker panicked")).collect()
    });
    let mut entries = vec![vec![LaurentPoly::zero(&model.ring); n]; n];
    let mut warnings = Vec::new();
    for (i, col) in columns.into_iter().enumerate() {
        let (col, w) = col?;
        for (j, e) in col.into_iter().enumerate() {
            entries[j][i] = e;
        }
        warnings.extend(w);
    }
    Ok(StabMatrix { model: model.clone(), chamber: c.clone(), slope, order: refined, entries, warnings })
}

/// Column `i`, filled downward along the refined order: each entry is
/// pinned by its congruences along repelling edges towards points already
/// done, lifted into its degree window.
fn column(
    model: &GKMModel,
    data: &AttractingData,
    po: &PartialOrder,
    refined: &[usize],
    i: usize,
    slope: Q,
    pivot: &PivotOrder,
) -> Result<(Vec<LaurentPoly>, Vec<String>)> {
    let ring = &model.ring;
    let n = model.len();
    let mut col = vec![LaurentPoly::zero(ring); n];
    let mut warnings = Vec::new();
    col[i] = normalization(model, data, i)?;
    let names = |j: usize| format!("({}, {})", model.points[j].name, model.points[i].name);
    for &j in refined.iter().rev() {
        if !po.less(j, i) {
            continue;
        }
        let mut factors = Vec::new();
        let mut residues = Vec::new();
        for w in &data.points[j].n_neg {
            factors.push(Binomial::koszul(ring, w)?);
            let res = model
                .edges_at(j)
                .find(|(ew, _)| ew == w)
                .map(|(_, k)| col[k].clone())
                .unwrap_or_else(|| LaurentPoly::zero(ring));
            residues.push(res);
        }
        let win = degree_polytope(model, po, j, i, slope)?;
        let pts = win.lattice_points();
        if pts.is_empty() {
            if residues.iter().any(|r| !r.is_zero()) {
                return Err(Error::Infeasible(format!("empty degree window at {} with nonzero residues", names(j))));
            }
            continue;
        }
        let (f, free) = solve_residues(ring, &pts, &factors, &residues, pivot).map_err(|e| match e {
            Error::Infeasible(m) => Error::Infeasible(format!("{}: {m}", names(j))),
            other => other,
        })?;
        if free > 0 {
            warnings.push(format!(
                "non-generic slope at {}: {free} free direction(s), a pinned representative was chosen",
                names(j)
            ));
        }
        col[j] = f;
    }
    Ok((col, warnings))
}

impl StabMatrix {
    pub fn names(&self) -> Vec<String> {
        self.model.names()
    }

    pub fn column(&self, i: usize) -> Vec<&LaurentPoly> {
        self.entries.iter().map(|row| &row[i]).collect()
    }

    pub fn to_json(&self) -> Value {
        let names = self.names();
        let entries: Vec<Vec<String>> =
            self.entries.iter().map(|row| row.iter().map(|e| e.to_string()).collect()).collect();
        json!({
            "schema": 1,
            "kind": "stab_matrix",
            "model": self.model.to_json(),
            "chamber": self.chamber.sigma,
            "slope": fmt_q(&self.slope),
            "order": self.order.iter().map(|&k| names[k].clone()).collect::<Vec<_>>(),
            "points": names,
            "entries": entries,
            "warnings": self.warnings,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let schema = |p: &str, m: &str| Error::Schema { pointer: p.into(), message: m.into() };
        if v.get("kind").and_then(Value::as_str) != Some("stab_matrix") {
            return Err(schema("/kind", "expected \"stab_matrix\""));
        }
        let model = GKMModel::from_json(v.get("model").ok_or_else(|| schema("/model", "missing field"))?).map_err(|e| match e {
            Error::Schema { pointer, message } => Error::Schema { pointer: format!("/model{pointer}"), message },
            other => other,
        })?;
        let sigma: Vec<i64> = v
            .get("chamber")
            .and_then(Value::as_array)
            .and_then(|a| a.iter().map(Value::as_i64).collect())
            .ok_or_else(|| schema("/chamber", "expected an array of integers"))?;
        let slope = parse_q(v.get("slope").and_then(Value::as_str).ok_or_else(|| schema("/slope", "expected a string"))?)
            .map_err(|e| schema("/slope", &e.to_string()))?;
        let order: Vec<usize> = v
            .get("order")
            .and_then(Value::as_array)
            .ok_or_else(|| schema("/order", "expected an array"))?
            .iter()
            .enumerate()
            .map(|(k, x)| x.as_str().and_then(|s| model.index(s)).ok_or_else(|| schema(&format!("/order/{k}"), "unknown fixed point")))
            .collect::<Result<_>>()?;
        let n = model.len();
        let rows = v.get("entries").and_then(Value::as_array).ok_or_else(|| schema("/entries", "expected an array"))?;
        if rows.len() != n {
            return Err(schema("/entries", "wrong number of rows"));
        }
        let mut entries = Vec::with_capacity(n);
        for (j, row) in rows.iter().enumerate() {
            let row = row.as_array().filter(|r| r.len() == n).ok_or_else(|| schema(&format!("/entries/{j}"), "wrong row length"))?;
            let mut out = Vec::with_capacity(n);
            for (i, e) in row.iter().enumerate() {
                let at = format!("/entries/{j}/{i}");
                let s = e.as_str().ok_or_else(|| schema(&at, "expected a string"))?;
                out.push(parse_poly(&model.ring, s).map_err(|e| schema(&at, &e.to_string()))?);
            }
            entries.push(out);
        }
        let warnings = v
            .get("warnings")
            .and_then(Value::as_array)
            .map(|a| a.iter().filter_map(|x| x.as_str().map(str::to_string)).collect())
            .unwrap_or_default();
        Ok(StabMatrix { model, chamber: Chamber::new(sigma), slope, order, entries, warnings })
    }

    /// Aligned plain-text table, rows = restriction point, columns = class.
    pub fn to_text(&self) -> String {
        let names = self.names();
        let n = names.len();
        let cells: Vec<Vec<String>> = self.entries.iter().map(|r| r.iter().map(|e| e.to_string()).collect()).collect();
        let first = names.iter().map(|s| s.len()).max().unwrap_or(0);
        let widths: Vec<usize> =
            (0..n).map(|i| cells.iter().map(|r| r[i].len()).chain([names[i].len()]).max().unwrap_or(0)).collect();
        let mut out = String::new();
        out.push_str(&format!(
            "chamber {:?}, slope {}, order {}\n",
            self.chamber.sigma,
            fmt_q(&self.slope),
            self.order.iter().map(|&k| names[k].as_str()).collect::<Vec<_>>().join(" < ")
        ));
        let line = |label: &str, row: &[String]| {
            let mut s = format!("{label:<first$}");
            for (c, w) in row.iter().zip(&widths) {
                s.push_str(&format!("  {c:<w$}"));
            }
            s.trim_end().to_string() + "\n"
        };
        out.push_str(&line("", &names));
        for (j, r) in cells.iter().enumerate() {
            out.push_str(&line(&names[j], r));
        }
        for w in &self.warnings {
            out.push_str(&format!("warning: {w}\n"));
        }
        out
    }
}
