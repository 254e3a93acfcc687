//! Cells of the periodic arrangement `{μ_i(x) ∈ Z}` in rank one and two.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};

use super::convex::{frac, is_int};
use crate::error::{Error, Result};
use crate::exact_algebra::{q, Q};
use crate::lattice_geometry::linalg::dot_i;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub dim: usize,
    /// Vertices of the closure; cyclically ordered for polygons.
    pub vertices: Vec<Vec<Q>>,
    /// A point in the relative interior (average of the vertices).
    pub point: Vec<Q>,
    /// Indices of the weights taking a constant integer value on the cell.
    pub integral: Vec<usize>,
}

impl Cell {
    fn new(dim: usize, vertices: Vec<Vec<Q>>, weights: &[Vec<i64>]) -> Self {
        let point = average(&vertices);
        let integral = (0..weights.len())
            .filter(|&i| {
                let v0 = dot_i(&weights[i], &vertices[0]);
                is_int(&v0) && vertices.iter().all(|v| dot_i(&weights[i], v) == v0)
            })
            .collect();
        Cell { dim, vertices, point, integral }
    }

    /// Representative modulo `Z^r`: the point reduced into `[0,1)^r`.
    pub fn key(&self) -> Vec<Q> {
        self.point.iter().map(|x| frac(*x)).collect()
    }
}

/// All cells whose interior point lies in `[lo, hi)^r`, with face relations.
#[derive(Clone, Debug)]
pub struct Complex {
    pub rank: usize,
    pub cells: Vec<Cell>,
    /// `faces[c]`: indices of the lower-dimensional cells in the closure of `c`.
    pub faces: Vec<Vec<usize>>,
}

pub(crate) fn average(pts: &[Vec<Q>]) -> Vec<Q> {
    let n = q(pts.len() as i64);
    let r = pts[0].len();
    (0..r).map(|k| pts.iter().map(|p| p[k]).sum::<Q>() / n).collect()
}

fn in_box(p: &[Q], lo: i64, hi: i64) -> bool {
    p.iter().all(|x| *x >= q(lo) && *x < q(hi))
}

impl Complex {
    pub fn build(weights: &[Vec<i64>], lo: i64, hi: i64) -> Result<Self> {
        let rank = weights.first().map(Vec::len).ok_or_else(|| Error::DegenerateQ("no weights".into()))?;
        match rank {
            1 => Ok(Self::build_rank1(weights, lo, hi)),
            2 => Self::build_rank2(weights, lo, hi),
            r => Err(Error::Unsupported(format!("periodic arrangements of rank {r}; only ranks 1 and 2 are handled"))),
        }
    }

    fn build_rank1(weights: &[Vec<i64>], lo: i64, hi: i64) -> Self {
        let mut pts: BTreeSet<Q> = BTreeSet::new();
        for w in weights {
            let c = w[0].abs();
            for k in (lo - 1) * c..=(hi + 1) * c {
                pts.insert(Q::new(k, c));
            }
        }
        let pts: Vec<Q> = pts.into_iter().collect();
        let mut cells = Vec::new();
        let mut faces = Vec::new();
        let mut index: BTreeMap<Q, usize> = BTreeMap::new();
        for p in &pts {
            index.insert(*p, cells.len());
            cells.push(Cell::new(0, vec![vec![*p]], weights));
            faces.push(Vec::new());
        }
        for w in pts.windows(2) {
            cells.push(Cell::new(1, vec![vec![w[0]], vec![w[1]]], weights));
            faces.push(vec![index[&w[0]], index[&w[1]]]);
        }
        Complex { rank: 1, cells, faces }
    }

    fn build_rank2(weights: &[Vec<i64>], lo: i64, hi: i64) -> Result<Self> {
        let w = weights;
        // largest coordinate of a unit parallelogram of two independent weights,
        // which bounds the diameter of every region
        let mut reach = Q::one();
        let mut pairs = Vec::new();
        for i in 0..w.len() {
            for j in i + 1..w.len() {
                let d = w[i][0] * w[j][1] - w[i][1] * w[j][0];
                if d != 0 {
                    pairs.push((i, j, d));
                    let inv = |a: i64, b: i64| [q(w[j][1] * a - w[i][1] * b) / q(d), q(-w[j][0] * a + w[i][0] * b) / q(d)];
                    for (a, b) in [(1, 0), (0, 1), (1, 1)] {
                        for x in inv(a, b) {
                            reach = reach.max(x.abs());
                        }
                    }
                }
            }
        }
        if pairs.is_empty() {
            return Err(Error::DegenerateQ("the weights do not span a rank-2 space".into()));
        }
        let margin = (q(2) * reach).ceil().to_integer() + 1;
        let (blo, bhi) = (lo - margin, hi + margin);
        let inside = |p: &[Q]| p.iter().all(|x| *x >= q(blo) && *x <= q(bhi));

        let mut verts: BTreeSet<Vec<Q>> = BTreeSet::new();
        for &(i, j, d) in &pairs {
            let range = |k: usize| {
                let vals = [blo, bhi].iter().flat_map(|&x| [blo, bhi].map(move |y| w[k][0] * x + w[k][1] * y)).collect::<Vec<_>>();
                (*vals.iter().min().unwrap(), *vals.iter().max().unwrap())
            };
            let (ai, bi) = range(i);
            let (aj, bj) = range(j);
            for a in ai..=bi {
                for b in aj..=bj {
                    let x = q(w[j][1] * a - w[i][1] * b) / q(d);
                    let y = q(-w[j][0] * a + w[i][0] * b) / q(d);
                    let p = vec![x, y];
                    if inside(&p) {
                        verts.insert(p);
                    }
                }
            }
        }

        // edges: walk along each line through each vertex to the next vertex
        let mut edges: BTreeSet<(Vec<Q>, Vec<Q>)> = BTreeSet::new();
        for v in &verts {
            for wi in w {
                if !is_int(&dot_i(wi, v)) {
                    continue;
                }
                for s in [1i64, -1] {
                    let d = [q(-s * wi[1]), q(s * wi[0])];
                    let mut t: Option<Q> = None;
                    for wj in w {
                        let rate = dot_i(wj, &d);
                        if rate.is_zero() {
                            continue;
                        }
                        let val = dot_i(wj, v);
                        let tj = if rate > Q::zero() {
                            (val.floor() + q(1) - val) / rate
                        } else {
                            (val - (val.ceil() - q(1))) / (-rate)
                        };
                        t = Some(t.map_or(tj, |t0: Q| t0.min(tj)));
                    }
                    let t = t.expect("spanning weights cross every line");
                    let u = vec![v[0] + t * d[0], v[1] + t * d[1]];
                    if inside(&u) {
                        let (a, b) = if *v < u { (v.clone(), u) } else { (u, v.clone()) };
                        edges.insert((a, b));
                    }
                }
            }
        }

        // regions: sample both sides of every edge
        let mut regions: BTreeSet<Vec<i64>> = BTreeSet::new();
        for (a, b) in &edges {
            let m = average(&[a.clone(), b.clone()]);
            let normal = w.iter().find(|wi| is_int(&dot_i(wi, &m))).expect("edge lies on a line");
            let nq = [q(normal[0]), q(normal[1])];
            let mut eps = Q::one();
            for wj in w {
                let val = dot_i(wj, &m);
                let rate = dot_i(wj, &nq).abs();
                if !rate.is_zero() {
                    let dist = if is_int(&val) { q(1) } else { frac(val).min(q(1) - frac(val)) };
                    eps = eps.min(dist / (q(2) * rate));
                }
            }
            for s in [1i64, -1] {
                let p = [m[0] + q(s) * eps * nq[0], m[1] + q(s) * eps * nq[1]];
                let f: Vec<i64> = w.iter().map(|wj| dot_i(wj, &p).floor().to_integer()).collect();
                regions.insert(f);
            }
        }

        let mut cells = Vec::new();
        let mut faces = Vec::new();
        let mut vindex: BTreeMap<Vec<Q>, usize> = BTreeMap::new();
        let near = |p: &[Q]| p.iter().all(|x| *x >= q(lo - margin) && *x < q(hi + margin));
        for v in &verts {
            if near(v) {
                vindex.insert(v.clone(), cells.len());
                cells.push(Cell::new(0, vec![v.clone()], w));
                faces.push(Vec::new());
            }
        }
        let mut eindex: BTreeMap<(Vec<Q>, Vec<Q>), usize> = BTreeMap::new();
        for (a, b) in &edges {
            if let (Some(&ia), Some(&ib)) = (vindex.get(a), vindex.get(b)) {
                eindex.insert((a.clone(), b.clone()), cells.len());
                cells.push(Cell::new(1, vec![a.clone(), b.clone()], w));
                faces.push(vec![ia, ib]);
            }
        }
        for f in &regions {
            let poly: Vec<Vec<Q>> = verts
                .iter()
                .filter(|v| w.iter().zip(f).all(|(wj, fj)| {
                    let x = dot_i(wj, v);
                    x >= q(*fj) && x <= q(fj + 1)
                }))
                .cloned()
                .collect();
            if poly.len() < 3 {
                continue;
            }
            let poly = order_polygon(poly);
            let c = Cell::new(2, poly.clone(), w);
            if !in_box(&c.point, lo - 1, hi + 1) {
                continue;
            }
            let mut fc: Vec<usize> = poly.iter().filter_map(|v| vindex.get(v).copied()).collect();
            for k in 0..poly.len() {
                let (a, b) = (&poly[k], &poly[(k + 1) % poly.len()]);
                let key = if a < b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
                if let Some(&e) = eindex.get(&key) {
                    fc.push(e);
                }
            }
            cells.push(c);
            faces.push(fc);
        }

        // keep cells near the window together with everything in their closure
        let keep: Vec<bool> = cells.iter().map(|c| in_box(&c.point, lo - 1, hi + 1)).collect();
        let mut needed = keep.clone();
        for (c, f) in faces.iter().enumerate() {
            if keep[c] {
                for &k in f {
                    needed[k] = true;
                }
            }
        }
        let mut remap = vec![usize::MAX; cells.len()];
        let mut out_cells = Vec::new();
        for (c, cell) in cells.iter().enumerate() {
            if needed[c] {
                remap[c] = out_cells.len();
                out_cells.push(cell.clone());
            }
        }
        let out_faces = faces
            .iter()
            .enumerate()
            .filter(|(c, _)| needed[*c])
            .map(|(_, f)| f.iter().filter(|k| needed[**k]).map(|k| remap[*k]).collect())
            .collect();
        Ok(Complex { rank: 2, cells: out_cells, faces: out_faces })
    }

    /// Cells whose interior point lies in `[0,1)^r`, i.e. one per orbit.
    pub fn fundamental(&self) -> Vec<usize> {
        (0..self.cells.len()).filter(|&c| in_box(&self.cells[c].point, 0, 1)).collect()
    }

    /// Index of the fundamental representative of each cell's orbit.
    pub fn representatives(&self) -> Vec<Option<usize>> {
        let reps: BTreeMap<Vec<Q>, usize> = self.fundamental().into_iter().map(|c| (self.cells[c].key(), c)).collect();
        self.cells.iter().map(|c| reps.get(&c.key()).copied()).collect()
    }

    pub fn find_point(&self, p: &[Q]) -> Option<usize> {
        self.cells.iter().position(|c| c.point == p)
    }
}

/// Counterclockwise order around the vertex average, starting from the
/// lexicographically smallest vertex.
pub fn order_polygon(mut pts: Vec<Vec<Q>>) -> Vec<Vec<Q>> {
    pts.sort();
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let c = average(&pts);
    let half = |p: &Vec<Q>| {
        let (dx, dy) = (p[0] - c[0], p[1] - c[1]);
        // upper half-plane first, measured from the positive x axis
        if dy > Q::zero() || (dy.is_zero() && dx > Q::zero()) {
            0
        } else {
            1
        }
    };
    pts.sort_by(|a, b| {
        let (ha, hb) = (half(a), half(b));
        if ha != hb {
            return ha.cmp(&hb);
        }
        let cross = (a[0] - c[0]) * (b[1] - c[1]) - (a[1] - c[1]) * (b[0] - c[0]);
        Q::zero().cmp(&cross)
    });
    let start = pts.iter().enumerate().min_by(|x, y| x.1.cmp(y.1)).map(|(k, _)| k).unwrap_or(0);
    pts.rotate_left(start);
    pts
}

/// Shoelace area of a cyclically ordered polygon.
pub fn polygon_area(pts: &[Vec<Q>]) -> Q {
    let n = pts.len();
    let mut s = Q::zero();
    for k in 0..n {
        let (a, b) = (&pts[k], &pts[(k + 1) % n]);
        s += a[0] * b[1] - a[1] * b[0];
    }
    (s / q(2)).abs()
}
