//! GKM input models: isolated fixed points with tangent weights, a
//! polarization, an ample weight, and the weighted edge graph of
//! one-dimensional orbits. Per-point calculus lives in [`attracting`].

mod attracting;
mod builtins;
mod json;

pub use attracting::{
    attracting_decomposition, attractive_check, degree_polytope, limit_polarization, normalization,
    normalization_from, resonant_locus, AttractingData, AttractiveReport, Obstruction, PointData,
    StabDegreeWindow,
};

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::exact_algebra::{Ring, RingRef, Weight, Q};
use crate::lattice_geometry::{ample_order, Chamber, OrderEdge, PartialOrder};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedPoint {
    pub name: String,
    pub tangent: Vec<Weight>,
    pub polarization: Option<Vec<Weight>>,
    pub ample: Weight,
}

/// A one-dimensional orbit joining `a` and `b`; `weight` is its tangent
/// weight at `a` (the weight at `b` is the inverse character).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub weight: Weight,
}

impl Edge {
    pub fn weight_at(&self, p: usize) -> Weight {
        if p == self.a {
            self.weight.clone()
        } else {
            self.weight.neg()
        }
    }

    pub fn other(&self, p: usize) -> usize {
        if p == self.a {
            self.b
        } else {
            self.a
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GKMModel {
    pub ring: RingRef,
    pub points: Vec<FixedPoint>,
    pub edges: Vec<Edge>,
    /// Coefficient `s` of the slope bundle `s * ample`, if declared.
    pub slope: Option<Q>,
}

impl GKMModel {
    /// Builds and validates a model; edges are given as
    /// `(point, point, label)` and oriented against the tangent data.
    pub fn new(
        ring: RingRef,
        points: Vec<FixedPoint>,
        edges: &[(usize, usize, Weight)],
        slope: Option<Q>,
    ) -> Result<Self> {
        let mut m = GKMModel { ring, points, edges: Vec::new(), slope };
        m.check_points()?;
        for (k, (a, b, w)) in edges.iter().enumerate() {
            let e = m.orient_edge(*a, *b, w).map_err(|e| match e {
                Error::NotGkm(msg) => Error::Schema { pointer: format!("/edges/{k}"), message: msg },
                other => other,
            })?;
            m.edges.push(e);
        }
        Ok(m)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.points.iter().position(|p| p.name == name)
    }

    pub fn names(&self) -> Vec<String> {
        self.points.iter().map(|p| p.name.clone()).collect()
    }

    pub fn a_rank(&self) -> usize {
        self.ring.a_indices().len()
    }

    pub fn has_polarization(&self) -> bool {
        self.points.iter().all(|p| p.polarization.is_some())
    }

    pub fn polarization(&self, p: usize) -> Result<&[Weight]> {
        self.points[p]
            .polarization
            .as_deref()
            .ok_or_else(|| Error::Invalid(format!("fixed point {} has no polarization", self.points[p].name)))
    }

    /// Edges incident to `p`, with the weight at `p` and the far endpoint.
    pub fn edges_at(&self, p: usize) -> impl Iterator<Item = (Weight, usize)> + '_ {
        self.edges
            .iter()
            .filter(move |e| e.a == p || e.b == p)
            .map(move |e| (e.weight_at(p), e.other(p)))
    }

    pub fn ample_order(&self, c: &Chamber) -> Result<PartialOrder> {
        let oe: Vec<OrderEdge<'_>> =
            self.edges.iter().map(|e| OrderEdge { a: e.a, b: e.b, weight: &e.weight }).collect();
        let ample: Vec<Weight> = self.points.iter().map(|p| p.ample.clone()).collect();
        ample_order(&self.ring, self.len(), &oe, &ample, &self.names(), c)
    }

    /// Declared slope, or `1/(2 n!)` for `n` fixed points.
    pub fn default_slope(&self) -> Result<Q> {
        if let Some(s) = self.slope {
            return Ok(s);
        }
        let mut f: i64 = 2;
        for k in 2..=self.len() as i64 {
            f = f
                .checked_mul(k)
                .ok_or_else(|| Error::Unsupported("too many fixed points for the default slope".into()))?;
        }
        Ok(Q::new(1, f))
    }

    fn check_points(&self) -> Result<()> {
        if self.points.is_empty() {
            return Err(Error::Schema { pointer: "/fixed_points".into(), message: "no fixed points".into() });
        }
        let n = self.ring.dim();
        for (k, p) in self.points.iter().enumerate() {
            let at = |field: &str| format!("/fixed_points/{k}/{field}");
            if self.points[..k].iter().any(|o| o.name == p.name) {
                return Err(Error::Schema { pointer: at("name"), message: format!("duplicate name '{}'", p.name) });
            }
            for (i, w) in p.tangent.iter().enumerate() {
                if w.dim() != n {
                    return Err(Error::Schema { pointer: format!("{}/{i}", at("tangent")), message: "wrong arity".into() });
                }
                if self.ring.vanishes_on_a(w) {
                    return Err(Error::Schema {
                        pointer: format!("{}/{i}", at("tangent")),
                        message: format!("weight {} is trivial on A; fixed points must be isolated", self.ring.fmt_monomial(w)),
                    });
                }
            }
            if let Some(pol) = &p.polarization {
                if !self.polarization_consistent(&p.tangent, pol) {
                    return Err(Error::InconsistentPolarization(format!(
                        "{}: T^1/2 + (T^1/2)^dual differs from the tangent weights on A",
                        p.name
                    )));
                }
            }
        }
        Ok(())
    }

    fn polarization_consistent(&self, tangent: &[Weight], pol: &[Weight]) -> bool {
        let mut count: BTreeMap<Vec<Q>, i64> = BTreeMap::new();
        for w in tangent {
            *count.entry(self.ring.a_part(w)).or_default() += 1;
        }
        for w in pol {
            let a = self.ring.a_part(w);
            let neg: Vec<Q> = a.iter().map(|x| -x).collect();
            *count.entry(a).or_default() -= 1;
            *count.entry(neg).or_default() -= 1;
        }
        count.values().all(|&c| c == 0)
    }

    /// Finds the tangent weight at `a` realizing the edge labelled `label`:
    /// an exact match of `±label` first, then a unique match up to a twist
    /// by characters trivial on A.
    fn orient_edge(&self, a: usize, b: usize, label: &Weight) -> Result<Edge> {
        let (pa, pb) = (&self.points[a], &self.points[b]);
        if a == b {
            return Err(Error::NotGkm(format!("edge from {} to itself", pa.name)));
        }
        for w in [label.clone(), label.neg()] {
            if pa.tangent.contains(&w) && pb.tangent.contains(&w.neg()) {
                return Ok(Edge { a, b, weight: w });
            }
        }
        let la = self.ring.a_part(label);
        let cands: Vec<&Weight> = pa
            .tangent
            .iter()
            .filter(|w| {
                let wa = self.ring.a_part(w);
                (wa == la || wa.iter().zip(&la).all(|(x, y)| *x == -*y)) && pb.tangent.contains(&w.neg())
            })
            .collect();
        match cands.as_slice() {
            [w] => Ok(Edge { a, b, weight: (*w).clone() }),
            [] => Err(Error::NotGkm(format!(
                "edge {}-{} with weight {}: no matching pair of inverse tangent weights",
                pa.name,
                pb.name,
                self.ring.fmt_monomial(label)
            ))),
            _ => Err(Error::NotGkm(format!(
                "edge {}-{} with weight {} matches several tangent directions",
                pa.name,
                pb.name,
                self.ring.fmt_monomial(label)
            ))),
        }
    }

    /// Product of two models over a torus whose coordinates are the union
    /// of both; coordinates outside A may be shared, A-coordinates may not.
    pub fn product(&self, other: &GKMModel) -> Result<GKMModel> {
        let (r1, r2) = (&self.ring, &other.ring);
        let mut names: Vec<String> = r1.names().to_vec();
        let mut a_names: Vec<String> = r1.a_indices().iter().map(|&i| r1.names()[i].clone()).collect();
        for (i, nm) in r2.names().iter().enumerate() {
            match r1.index(nm) {
                Some(j) if r1.is_a(j) || r2.is_a(i) => {
                    return Err(Error::Invalid(format!("coordinate '{nm}' belongs to A in a factor and is shared")))
                }
                Some(_) => {}
                None => {
                    names.push(nm.clone());
                    if r2.is_a(i) {
                        a_names.push(nm.clone());
                    }
                }
            }
        }
        let ring = Ring::from_strings(names, a_names)?;
        let emb = |src: &RingRef, w: &Weight| {
            let mut v = Weight::zero(ring.dim());
            for (i, nm) in src.names().iter().enumerate() {
                v.0[ring.index(nm).unwrap()] += w.0[i];
            }
            v
        };
        let n2 = other.len();
        let mut points = Vec::new();
        for p in &self.points {
            for p2 in &other.points {
                let tangent = p.tangent.iter().map(|w| emb(r1, w)).chain(p2.tangent.iter().map(|w| emb(r2, w))).collect();
                let polarization = match (&p.polarization, &p2.polarization) {
                    (Some(x), Some(y)) => Some(x.iter().map(|w| emb(r1, w)).chain(y.iter().map(|w| emb(r2, w))).collect()),
                    _ => None,
                };
                points.push(FixedPoint {
                    name: format!("{}x{}", p.name, p2.name),
                    tangent,
                    polarization,
                    ample: emb(r1, &p.ample).add(&emb(r2, &p2.ample)),
                });
            }
        }
        let mut edges = Vec::new();
        for e in &self.edges {
            for k in 0..n2 {
                edges.push((e.a * n2 + k, e.b * n2 + k, emb(r1, &e.weight)));
            }
        }
        for e in &other.edges {
            for k in 0..self.len() {
                edges.push((k * n2 + e.a, k * n2 + e.b, emb(r2, &e.weight)));
            }
        }
        GKMModel::new(ring, points, &edges, None)
    }

    /// The connected component through `p` of the fixed locus of the
    /// subtorus generated by the cocharacter `face`, as a model of its own
    /// (tangent data and polarization cut down to the `face`-fixed weights),
    /// with the indices of its points in `self`.
    pub fn fixed_submodel(&self, face: &Chamber, p: usize) -> Result<(GKMModel, Vec<usize>)> {
        let fixed = |w: &Weight| face.pairing(&self.ring, w) == Q::from_integer(0);
        let mut comp = vec![p];
        let mut k = 0;
        while k < comp.len() {
            for (w, o) in self.edges_at(comp[k]) {
                if fixed(&w) && !comp.contains(&o) {
                    comp.push(o);
                }
            }
            k += 1;
        }
        comp.sort();
        let points = comp
            .iter()
            .map(|&k| {
                let fp = &self.points[k];
                FixedPoint {
                    name: fp.name.clone(),
                    tangent: fp.tangent.iter().filter(|w| fixed(w)).cloned().collect(),
                    polarization: fp.polarization.as_ref().map(|v| v.iter().filter(|w| fixed(w)).cloned().collect()),
                    ample: fp.ample.clone(),
                }
            })
            .collect();
        let edges: Vec<(usize, usize, Weight)> = self
            .edges
            .iter()
            .filter(|e| fixed(&e.weight) && comp.contains(&e.a))
            .map(|e| {
                let pos = |x: usize| comp.iter().position(|&c| c == x).unwrap();
                (pos(e.a), pos(e.b), e.weight.clone())
            })
            .collect();
        Ok((GKMModel::new(self.ring.clone(), points, &edges, self.slope)?, comp))
    }

    /// `ample` restricted to A, as exact rationals in A-coordinates.
    pub fn ample_a(&self, p: usize) -> Vec<Q> {
        self.ring.a_part(&self.points[p].ample)
    }

    /// Slope difference `s (L_j - L_i)` on A.
    pub fn slope_shift(&self, j: usize, i: usize, s: Q) -> Vec<Q> {
        self.ample_a(j).iter().zip(self.ample_a(i)).map(|(x, y)| (x - y) * s).collect()
    }
}

#[cfg(test)]
mod tests;
