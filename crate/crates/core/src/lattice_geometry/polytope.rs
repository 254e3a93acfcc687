use itertools::Itertools;
use num_traits::{One, Zero};

use super::linalg::{dot, dot_i, nullspace, primitive, rref};
use crate::error::{Error, Result};
use crate::exact_algebra::{fmt_q, Q};

/// Supporting half-space `<normal, x> <= offset`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HalfSpace {
    pub normal: Vec<i64>,
    pub offset: Q,
}

/// Convex hull of finitely many rational points, kept both as vertices and
/// as an affine hull plus facet inequalities inside it.
#[derive(Clone, Debug)]
pub struct LatticePolytope {
    ambient: usize,
    vertices: Vec<Vec<Q>>,
    /// `<e, x> = c` cutting out the affine hull.
    equations: Vec<(Vec<i64>, Q)>,
    facets: Vec<HalfSpace>,
    /// Coordinates that parametrize the affine hull injectively.
    pivots: Vec<usize>,
    base: Vec<Q>,
    /// Directions spanning the hull, in rref form on the pivot coordinates.
    directions: Vec<Vec<Q>>,
}

impl PartialEq for LatticePolytope {
    fn eq(&self, o: &Self) -> bool {
        self.ambient == o.ambient && self.vertices == o.vertices
    }
}

impl Eq for LatticePolytope {}

impl LatticePolytope {
    pub fn hull(points: Vec<Vec<Q>>) -> Self {
        assert!(!points.is_empty(), "hull of no points");
        let ambient = points[0].len();
        let mut pts = points;
        pts.sort();
        pts.dedup();
        let base = pts[0].clone();
        let mut dirs: Vec<Vec<Q>> = pts[1..]
            .iter()
            .map(|p| p.iter().zip(&base).map(|(a, b)| a - b).collect())
            .collect();
        let pivots = if dirs.is_empty() { Vec::new() } else { rref(&mut dirs) };
        dirs.truncate(pivots.len());
        let k = pivots.len();
        let equations = if k == ambient {
            Vec::new()
        } else {
            let ns = if dirs.is_empty() {
                (0..ambient)
                    .map(|i| (0..ambient).map(|j| if i == j { Q::one() } else { Q::zero() }).collect())
                    .collect()
            } else {
                nullspace(&dirs, ambient)
            };
            ns.iter()
                .map(|e| {
                    let ei = primitive(e);
                    let c = dot_i(&ei, &base);
                    (ei, c)
                })
                .collect()
        };
        let proj: Vec<Vec<Q>> = pts
            .iter()
            .map(|p| pivots.iter().map(|&i| p[i] - base[i]).collect())
            .collect();
        let facets_local = facets_full_dim(&proj, k);
        let facets: Vec<HalfSpace> = facets_local
            .iter()
            .map(|(n, c)| {
                let mut normal = vec![0i64; ambient];
                for (j, &i) in pivots.iter().enumerate() {
                    normal[i] = n[j];
                }
                let offset = c + dot_i(&normal, &base);
                HalfSpace { normal, offset }
            })
            .collect();
        let vertices: Vec<Vec<Q>> = if k == 0 {
            vec![base.clone()]
        } else {
            pts.iter()
                .filter(|p| {
                    let tight: Vec<Vec<Q>> = facets
                        .iter()
                        .filter(|f| dot_i(&f.normal, p) == f.offset)
                        .map(|f| pivots.iter().map(|&i| Q::from_integer(f.normal[i])).collect())
                        .collect();
                    super::linalg::rank(&tight) == k
                })
                .cloned()
                .collect()
        };
        let mut facets = facets;
        facets.sort_by(|a, b| (&a.normal, a.offset).cmp(&(&b.normal, b.offset)));
        LatticePolytope { ambient, vertices, equations, facets, pivots, base, directions: dirs }
    }

    pub fn point(p: Vec<Q>) -> Self {
        Self::hull(vec![p])
    }

    /// Segment or box helper for tests and examples.
    pub fn from_int_points(pts: &[Vec<i64>]) -> Self {
        Self::hull(pts.iter().map(|p| p.iter().map(|&x| Q::from_integer(x)).collect()).collect())
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.dim() == self.ambient
    }

    pub fn vertices(&self) -> &[Vec<Q>] {
        &self.vertices
    }

    pub fn facets(&self) -> &[HalfSpace] {
        &self.facets
    }

    pub fn equations(&self) -> &[(Vec<i64>, Q)] {
        &self.equations
    }

    pub fn contains(&self, x: &[Q]) -> bool {
        self.equations.iter().all(|(e, c)| dot_i(e, x) == *c)
            && self.facets.iter().all(|f| dot_i(&f.normal, x) <= f.offset)
    }

    /// True if `x` lies in the relative interior.
    pub fn contains_interior(&self, x: &[Q]) -> bool {
        self.equations.iter().all(|(e, c)| dot_i(e, x) == *c)
            && self.facets.iter().all(|f| dot_i(&f.normal, x) < f.offset)
    }

    pub fn contains_polytope(&self, o: &LatticePolytope) -> bool {
        o.vertices.iter().all(|v| self.contains(v))
    }

    pub fn translate(&self, t: &[Q]) -> Self {
        Self::hull(self.vertices.iter().map(|v| v.iter().zip(t).map(|(a, b)| a + b).collect()).collect())
    }

    pub fn minkowski_sum(&self, o: &Self) -> Self {
        let pts = self
            .vertices
            .iter()
            .cartesian_product(o.vertices.iter())
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
            .collect();
        Self::hull(pts)
    }

    /// Range of the linear functional `xi` on the polytope.
    pub fn support_interval(&self, xi: &[Q]) -> (Q, Q) {
        let vals: Vec<Q> = self.vertices.iter().map(|v| dot(xi, v)).collect();
        (*vals.iter().min().unwrap(), *vals.iter().max().unwrap())
    }

    /// The unique point of the affine hull with the given pivot coordinates.
    fn lift(&self, y: &[Q]) -> Vec<Q> {
        let mut x = self.base.clone();
        for (r, d) in self.directions.iter().enumerate() {
            let t = y[r] - self.base[self.pivots[r]];
            for (xi, di) in x.iter_mut().zip(d) {
                *xi += t * di;
            }
        }
        x
    }

    /// Integer points of `self + shift`, sorted.
    pub fn lattice_points_shifted(&self, shift: &[Q]) -> Vec<Vec<i64>> {
        let moved = self.translate(shift);
        let piv = &moved.pivots;
        let mut ranges = Vec::new();
        for &i in piv {
            let lo = moved.vertices.iter().map(|v| v[i]).min().unwrap().ceil().to_integer();
            let hi = moved.vertices.iter().map(|v| v[i]).max().unwrap().floor().to_integer();
            if lo > hi {
                return Vec::new();
            }
            ranges.push(lo..=hi);
        }
        let mut out = Vec::new();
        if piv.is_empty() {
            let v = &moved.vertices[0];
            if v.iter().all(|x| x.is_integer()) {
                out.push(v.iter().map(|x| x.to_integer()).collect());
            }
            return out;
        }
        for y in ranges.into_iter().multi_cartesian_product() {
            let yq: Vec<Q> = y.iter().map(|&v| Q::from_integer(v)).collect();
            let x = moved.lift(&yq);
            if x.iter().all(|c| c.is_integer()) && moved.contains(&x) {
                out.push(x.iter().map(|c| c.to_integer()).collect());
            }
        }
        out.sort();
        out
    }

    pub fn lattice_points(&self) -> Vec<Vec<i64>> {
        self.lattice_points_shifted(&vec![Q::zero(); self.ambient])
    }

    /// Tangent cone at the face spanned by `face` (a subset of vertices).
    pub fn tangent_cone(&self, face: &[Vec<Q>]) -> Result<Cone> {
        if face.is_empty() {
            return Err(Error::Invalid("empty face".into()));
        }
        if !face.iter().all(|f| self.vertices.contains(f)) {
            return Err(Error::Invalid("face contains a non-vertex".into()));
        }
        let tight: Vec<&HalfSpace> = self
            .facets
            .iter()
            .filter(|f| face.iter().all(|p| dot_i(&f.normal, p) == f.offset))
            .collect();
        let on_face: Vec<&Vec<Q>> = self
            .vertices
            .iter()
            .filter(|v| tight.iter().all(|f| dot_i(&f.normal, v) == f.offset))
            .collect();
        if on_face.len() != face.len() {
            return Err(Error::Invalid("vertex subset is not a face".into()));
        }
        Ok(Cone {
            ambient: self.ambient,
            equations: self.equations.iter().map(|(e, _)| e.clone()).collect(),
            inequalities: tight.iter().map(|f| f.normal.clone()).collect(),
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.vertices
                .iter()
                .map(|v| serde_json::Value::Array(v.iter().map(|x| fmt_q(x).into()).collect()))
                .collect(),
        )
    }
}

/// Cone `{v : <e, v> = 0, <n, v> <= 0}` of directions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cone {
    pub ambient: usize,
    pub equations: Vec<Vec<i64>>,
    pub inequalities: Vec<Vec<i64>>,
}

impl Cone {
    pub fn contains(&self, v: &[Q]) -> bool {
        self.equations.iter().all(|e| dot_i(e, v).is_zero())
            && self.inequalities.iter().all(|n| dot_i(n, v) <= Q::zero())
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.equations.is_empty()
    }

    pub fn is_whole_space(&self) -> bool {
        self.equations.is_empty() && self.inequalities.is_empty()
    }
}

/// Facets of a full-dimensional point set in `Q^k` as primitive integer
/// normals with offsets: `<n, x> <= c`.
fn facets_full_dim(pts: &[Vec<Q>], k: usize) -> Vec<(Vec<i64>, Q)> {
    let mut out: Vec<(Vec<i64>, Q)> = Vec::new();
    if k == 0 {
        return out;
    }
    for combo in (0..pts.len()).combinations(k) {
        let p0 = &pts[combo[0]];
        let rows: Vec<Vec<Q>> = combo[1..]
            .iter()
            .map(|&i| pts[i].iter().zip(p0).map(|(a, b)| a - b).collect())
            .collect();
        let ns = if rows.is_empty() {
            vec![vec![Q::one()]]
        } else {
            nullspace(&rows, k)
        };
        if ns.len() != 1 {
            continue;
        }
        let n = primitive(&ns[0]);
        let c = dot_i(&n, p0);
        let vals: Vec<Q> = pts.iter().map(|p| dot_i(&n, p)).collect();
        let (le, ge) = (vals.iter().all(|v| *v <= c), vals.iter().all(|v| *v >= c));
        let cand = if le {
            Some((n, c))
        } else if ge {
            Some((n.iter().map(|x| -x).collect(), -c))
        } else {
            None
        };
        if let Some(f) = cand {
            if !out.contains(&f) {
                out.push(f);
            }
        }
    }
    out
}

pub fn fmt_point(p: &[Q]) -> String {
    format!("({})", p.iter().map(fmt_q).collect::<Vec<_>>().join(","))
}
