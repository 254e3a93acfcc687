use itertools::Itertools;
use serde_json::{json, Value};

use super::StabMatrix;
use crate::exact_algebra::{koszul_from_weights, newton_polytope, q, restrict_to_subtorus, LaurentPoly, Ring, Q};
use crate::gkm_model::{attracting_decomposition, normalization, GKMModel};
use crate::lattice_geometry::{Chamber, ShiftedPolytope};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Check {
    pub failures: Vec<String>,
}

impl Check {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VerifyReport {
    pub triangular: Check,
    pub diagonal: Check,
    pub windows: Check,
    pub divisibility: Check,
    /// Problems that prevent the checks from running at all.
    pub setup: Vec<String>,
}

impl VerifyReport {
    pub fn pass(&self) -> bool {
        self.setup.is_empty()
            && self.triangular.pass()
            && self.diagonal.pass()
            && self.windows.pass()
            && self.divisibility.pass()
    }

    pub fn checks(&self) -> [(&'static str, &Check); 4] {
        [
            ("triangularity", &self.triangular),
            ("diagonal normalization", &self.diagonal),
            ("degree windows", &self.windows),
            ("edge divisibility", &self.divisibility),
        ]
    }

    pub fn to_json(&self) -> Value {
        let checks: Vec<Value> = self
            .checks()
            .iter()
            .map(|(name, c)| json!({"check": name, "pass": c.pass(), "failures": c.failures}))
            .collect();
        json!({"schema": 1, "kind": "verify_report", "pass": self.pass(), "setup": self.setup, "checks": checks})
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in &self.setup {
            out.push_str(&format!("error: {e}\n"));
        }
        for (name, c) in self.checks() {
            out.push_str(&format!("{}: {name}\n", if c.pass() { "PASS" } else { "FAIL" }));
            for f in &c.failures {
                out.push_str(&format!("  {f}\n"));
            }
        }
        out
    }
}

/// Sign vectors in `{-1, 0, 1}^r` up to overall sign, zero excluded.
fn rank_one_directions(r: usize) -> Vec<Vec<i64>> {
    (0..r)
        .map(|_| [-1i64, 0, 1])
        .multi_cartesian_product()
        .filter(|v| v.iter().find(|x| **x != 0).is_some_and(|x| *x > 0))
        .collect()
}

/// Rechecks the defining properties of a stable envelope matrix from the
/// model data alone: support, normalization, degree windows (also after
/// every rank-one projection of A), and GKM divisibility along edges.
pub fn verify_stab(s: &StabMatrix, model: &GKMModel, c: &Chamber, slope: Q) -> VerifyReport {
    let mut rep = VerifyReport::default();
    let ring = &model.ring;
    let n = model.len();
    if s.entries.len() != n || s.entries.iter().any(|r| r.len() != n) {
        rep.setup.push(format!("matrix is not {n}x{n}"));
        return rep;
    }
    let (order, data) = match (model.ample_order(c), attracting_decomposition(model, c)) {
        (Ok(o), Ok(d)) => (o, d),
        (Err(e), _) | (_, Err(e)) => {
            rep.setup.push(e.to_string());
            return rep;
        }
    };
    let name = |k: usize| model.points[k].name.as_str();
    let e = |j: usize, i: usize| &s.entries[j][i];

    for (j, i) in (0..n).cartesian_product(0..n) {
        if !order.le(j, i) && !e(j, i).is_zero() {
            rep.triangular.failures.push(format!("entry ({}, {}) should vanish: {}", name(j), name(i), e(j, i)));
        }
    }

    for i in 0..n {
        match normalization(model, &data, i) {
            Ok(d) if &d == e(i, i) => {}
            Ok(d) => rep.diagonal.failures.push(format!("at {}: expected {d}, found {}", name(i), e(i, i))),
            Err(err) => rep.diagonal.failures.push(format!("at {}: {err}", name(i))),
        }
    }

    // rank-one target ring: one A-coordinate, the rest copied
    let non_a = ring.non_a_indices();
    let ai = ring.a_indices();
    let mut tnames = vec!["x".to_string()];
    tnames.extend(non_a.iter().map(|&k| ring.names()[k].clone()));
    let target = Ring::from_strings(tnames, vec!["x".to_string()]).expect("valid target ring");
    let dirs = rank_one_directions(ai.len());
    for (j, i) in (0..n).cartesian_product(0..n) {
        let f = e(j, i);
        if f.is_zero() || !order.le(j, i) {
            continue;
        }
        let base = match model.polarization(j).and_then(|p| newton_polytope(&koszul_from_weights(ring, p)?)) {
            Ok(b) => b,
            Err(err) => {
                rep.windows.failures.push(format!("window at ({}, {}): {err}", name(j), name(i)));
                continue;
            }
        };
        let win = ShiftedPolytope::new(base, model.slope_shift(j, i, slope)).polytope();
        let newt = newton_polytope(f).expect("nonzero");
        if !win.contains_polytope(&newt) {
            rep.windows.failures.push(format!("entry ({}, {}) leaves its degree window", name(j), name(i)));
            continue;
        }
        for xi in &dirs {
            let mut m = vec![vec![0i64; ring.dim()]];
            for (&k, &x) in ai.iter().zip(xi) {
                m[0][k] = x;
            }
            for &k in &non_a {
                let mut row = vec![0i64; ring.dim()];
                row[k] = 1;
                m.push(row);
            }
            let g = restrict_to_subtorus(f, &target, &m);
            if g.is_zero() {
                continue;
            }
            let xq: Vec<Q> = xi.iter().map(|&x| q(x)).collect();
            let (lo, hi) = win.support_interval(&xq);
            let outside = g.terms().keys().any(|w| w.0[0] < lo || w.0[0] > hi);
            if outside {
                rep.windows.failures.push(format!(
                    "entry ({}, {}) leaves its window along the cocharacter {:?}",
                    name(j),
                    name(i),
                    xi
                ));
            }
        }
    }

    for edge in &model.edges {
        let koszul = LaurentPoly::one(ring).sub(&LaurentPoly::monomial(ring, edge.weight.neg()));
        for i in 0..n {
            let d = e(edge.a, i).sub(e(edge.b, i));
            if d.div_exact(&koszul).is_none() {
                rep.divisibility.failures.push(format!(
                    "column {}: restrictions to {} and {} differ by a non-multiple of {koszul}",
                    name(i),
                    name(edge.a),
                    name(edge.b)
                ));
            }
        }
    }
    rep
}
