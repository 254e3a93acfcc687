use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Value};

use super::cells::{order_polygon, polygon_area, Cell, Complex};
use super::convex::{frac, PeriodicConvexFunction};
use crate::error::Result;
use crate::exact_algebra::{fmt_q, q, Q};
use crate::lattice_geometry::linalg::dot_i;
use crate::lattice_geometry::LatticePolytope;

/// A cell of the dual tiling of `a*`: the set of gradients of `Q` along a
/// stratum of the periodic fan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tile {
    pub dim: usize,
    /// Ordered vertices (counterclockwise for polygons).
    pub vertices: Vec<Vec<Q>>,
    /// Full-dimensional volume; zero for lower-dimensional tiles.
    pub volume: Q,
    /// The dual stratum in `a`, as its representative in `[0,1)^r`.
    pub stratum: Cell,
}

#[derive(Clone, Debug)]
pub struct Tessellation {
    pub function: PeriodicConvexFunction,
    pub gram: Vec<Vec<i64>>,
    pub det: i64,
    /// `M` such that `q = (q^{1/M})^M` makes every facet of the Legendre
    /// transform meet `char(A) + (1/M) Z` in a lattice projecting isomorphically.
    pub base_change: i64,
    pub tiles: Vec<Tile>,
}

/// Subdifferential of `Q` along `cell`: a zonotope spanned by the weights
/// that are integral there.
pub fn dual_tile(f: &PeriodicConvexFunction, cell: &Cell) -> Vec<Vec<Q>> {
    let r = f.rank();
    let x = &cell.point;
    let mut base: Vec<Q> = f.shift().to_vec();
    let mut gens: Vec<(Vec<Q>, Vec<Q>)> = Vec::new();
    for (i, (w, m)) in f.weights().iter().zip(f.multiplicities()).enumerate() {
        let v = dot_i(w, x);
        let mw: Vec<Q> = w.iter().map(|c| q(c * m)).collect();
        if cell.integral.contains(&i) {
            gens.push((mw.iter().map(|c| c * (v - q(1))).collect(), mw.iter().map(|c| c * v).collect()));
        } else {
            for k in 0..r {
                base[k] += mw[k] * v.floor();
            }
        }
    }
    let mut corners = vec![base];
    for (lo, hi) in gens {
        corners = corners
            .iter()
            .flat_map(|c| {
                [&lo, &hi].map(|g| c.iter().zip(g.iter()).map(|(a, b)| a + b).collect::<Vec<Q>>())
            })
            .collect();
    }
    let hull = LatticePolytope::hull(corners);
    let mut verts = hull.vertices().to_vec();
    if hull.dim() == 2 {
        verts = order_polygon(verts);
    } else {
        verts.sort();
    }
    verts
}

fn volume(verts: &[Vec<Q>], dim: usize, rank: usize) -> Q {
    match (dim == rank, rank) {
        (true, 1) => verts.iter().map(|v| v[0]).max().unwrap() - verts.iter().map(|v| v[0]).min().unwrap(),
        (true, 2) => polygon_area(verts),
        _ => Q::zero(),
    }
}

pub fn legendre_dual_tessellation(f: &PeriodicConvexFunction) -> Result<Tessellation> {
    let gram = f.gram_matrix()?;
    let det = determinant(&gram);
    let complex = Complex::build(f.weights(), 0, 1)?;
    let r = f.rank();
    let mut tiles = Vec::new();
    let mut m = 1i64;
    for c in complex.fundamental() {
        let cell = complex.cells[c].clone();
        if cell.dim == 0 {
            let p = &cell.point;
            for x in p.iter().chain([f.eval(p)].iter()) {
                m = m.lcm(x.denom());
            }
        }
        let verts = dual_tile(f, &cell);
        let dim = r - cell.dim;
        tiles.push(Tile { volume: volume(&verts, dim, r), dim, vertices: verts, stratum: cell });
    }
    tiles.sort_by(|a, b| (b.dim, &a.stratum.point).cmp(&(a.dim, &b.stratum.point)));
    Ok(Tessellation { function: f.clone(), gram, det, base_change: m, tiles })
}

fn determinant(g: &[Vec<i64>]) -> i64 {
    match g.len() {
        1 => g[0][0],
        2 => g[0][0] * g[1][1] - g[0][1] * g[1][0],
        _ => {
            let m: Vec<Vec<Q>> = g.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect();
            crate::lattice_geometry::linalg::det(&m).to_integer()
        }
    }
}

impl Tessellation {
    pub fn rank(&self) -> usize {
        self.function.rank()
    }

    /// Number of tiles of each dimension `0..=r`, from the arrangement side.
    pub fn counts(&self) -> Vec<usize> {
        let mut c = vec![0; self.rank() + 1];
        for t in &self.tiles {
            c[t.dim] += 1;
        }
        c
    }

    /// Same counts recomputed from the top-dimensional tiles alone, by
    /// collecting their faces modulo the period lattice `G Z^r`.
    pub fn counts_from_tiles(&self) -> Vec<usize> {
        let r = self.rank();
        let ginv = inverse(&self.gram);
        let key = |y: &[Q]| -> Vec<Q> {
            ginv.iter().map(|row| frac(row.iter().zip(y).map(|(a, b)| a * b).sum())).collect()
        };
        let mut seen: Vec<BTreeSet<Vec<Q>>> = vec![BTreeSet::new(); r + 1];
        for t in self.tiles.iter().filter(|t| t.dim == r) {
            let v = &t.vertices;
            seen[r].insert(key(&super::cells::average(v)));
            for p in v {
                seen[0].insert(key(p));
            }
            if r == 2 {
                for k in 0..v.len() {
                    let mid = super::cells::average(&[v[k].clone(), v[(k + 1) % v.len()].clone()]);
                    seen[1].insert(key(&mid));
                }
            }
        }
        seen.iter().map(BTreeSet::len).collect()
    }

    pub fn total_volume(&self) -> Q {
        self.tiles.iter().map(|t| t.volume).sum()
    }

    pub fn to_json(&self) -> Value {
        let f = &self.function;
        let pt = |p: &[Q]| p.iter().map(fmt_q).collect::<Vec<_>>();
        let tiles: Vec<Value> = self
            .tiles
            .iter()
            .map(|t| {
                json!({
                    "dim": t.dim,
                    "vertices": t.vertices.iter().map(|v| pt(v)).collect::<Vec<_>>(),
                    "volume": fmt_q(&t.volume),
                    "stratum": {
                        "dim": t.stratum.dim,
                        "point": pt(&t.stratum.point),
                        "vertices": t.stratum.vertices.iter().map(|v| pt(v)).collect::<Vec<_>>(),
                        "integral": t.stratum.integral.iter().map(|&i| f.fmt_weight(&f.weights()[i])).collect::<Vec<_>>(),
                    },
                })
            })
            .collect();
        json!({
            "schema": 1,
            "kind": "tessellation",
            "function": f.describe(),
            "coordinates": f.vars(),
            "weights": f.weights().iter().zip(f.multiplicities()).map(|(w, m)| json!({"weight": f.fmt_weight(w), "multiplicity": m})).collect::<Vec<_>>(),
            "shift": pt(f.shift()),
            "gram": self.gram,
            "det": self.det,
            "base_change": self.base_change,
            "counts": {"arrangement": self.counts(), "legendre": self.counts_from_tiles()},
            "total_volume": fmt_q(&self.total_volume()),
            "tiles": tiles,
        })
    }

    pub fn to_text(&self) -> String {
        let f = &self.function;
        let mut s = String::new();
        let _ = writeln!(s, "Q = {}", f.describe());
        let _ = writeln!(s, "gram {:?}, det {}, base change M = {}", self.gram, self.det, self.base_change);
        let _ = writeln!(s, "tiles by dimension {:?} (recounted from tiles: {:?})", self.counts(), self.counts_from_tiles());
        for t in &self.tiles {
            let verts: Vec<String> = t.vertices.iter().map(|v| crate::lattice_geometry::fmt_point(v)).collect();
            let _ = writeln!(
                s,
                "  dim {} tile [{}] volume {} <- stratum of dim {} at {}",
                t.dim,
                verts.join(", "),
                fmt_q(&t.volume),
                t.stratum.dim,
                crate::lattice_geometry::fmt_point(&t.stratum.point)
            );
        }
        s
    }

    /// Two panels with a fixed view box: the fan over the unit cell of `a`
    /// on the left, the dual tiles in `a*` on the right. Colors encode the
    /// dimension of the stratum of the fan.
    pub fn to_svg(&self) -> Result<String> {
        const COLORS: [&str; 3] = ["#b3261e", "#1f5f99", "#dbe9f6"];
        let r = self.rank();
        let meta = json!({"schema": 1, "gram": self.gram, "det": self.det, "base_change": self.base_change, "counts": self.counts()});
        let mut s = String::new();
        let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 640 320" width="640" height="320">"#);
        let _ = writeln!(s, "<title>{}</title>", escape(&self.function.describe()));
        let _ = writeln!(s, "<metadata>{}</metadata>", escape(&meta.to_string()));
        let _ = writeln!(s, r#"<rect x="0" y="0" width="640" height="320" fill="white"/>"#);

        // left: the fan over [0,1]^r
        let to_left = |p: &[Q]| -> (f64, f64) {
            let x = 20.0 + 280.0 * p[0].to_f64().unwrap_or(0.0);
            let y = if r == 1 { 160.0 } else { 300.0 - 280.0 * p[1].to_f64().unwrap_or(0.0) };
            (x, y)
        };
        let _ = writeln!(s, r#"<defs><clipPath id="cell"><rect x="20" y="20" width="280" height="280"/></clipPath></defs>"#);
        let _ = writeln!(s, r#"<g id="fan" clip-path="url(#cell)">"#);
        let complex = Complex::build(self.function.weights(), -1, 2)?;
        let mut order: Vec<&Cell> = complex.cells.iter().collect();
        order.sort_by(|a, b| (b.dim, &a.point).cmp(&(a.dim, &b.point)));
        for c in order {
            let pts: Vec<(f64, f64)> = c.vertices.iter().map(|v| to_left(v)).collect();
            emit_cell(&mut s, c.dim, &pts, COLORS[c.dim.min(2)]);
        }
        let _ = writeln!(s, "</g>");
        let _ = writeln!(s, r#"<rect x="20" y="20" width="280" height="280" fill="none" stroke="black" stroke-width="0.5"/>"#);

        // right: the tiles, scaled to their bounding box
        let all: Vec<&Vec<Q>> = self.tiles.iter().flat_map(|t| t.vertices.iter()).collect();
        let coord = |k: usize| -> (f64, f64) {
            let vals: Vec<f64> = all.iter().map(|v| v.get(k).and_then(|x| x.to_f64()).unwrap_or(0.0)).collect();
            (vals.iter().cloned().fold(f64::INFINITY, f64::min), vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max))
        };
        let (x0, x1) = coord(0);
        let (y0, y1) = if r == 2 { coord(1) } else { (0.0, 0.0) };
        let span = (x1 - x0).max(y1 - y0).max(1e-9);
        let scale = 280.0 / span;
        let to_right = |p: &[Q]| -> (f64, f64) {
            let x = 340.0 + scale * (p[0].to_f64().unwrap_or(0.0) - x0);
            let y = if r == 1 { 160.0 } else { 300.0 - scale * (p[1].to_f64().unwrap_or(0.0) - y0) };
            (x, y)
        };
        let _ = writeln!(s, r#"<g id="tiles">"#);
        for t in &self.tiles {
            let pts: Vec<(f64, f64)> = t.vertices.iter().map(|v| to_right(v)).collect();
            emit_cell(&mut s, t.dim, &pts, COLORS[t.stratum.dim.min(2)]);
        }
        let _ = writeln!(s, "</g>");
        let _ = writeln!(s, "</svg>");
        Ok(s)
    }
}

fn emit_cell(s: &mut String, dim: usize, pts: &[(f64, f64)], color: &str) {
    match dim {
        0 => {
            let _ = writeln!(s, r#"<circle cx="{:.3}" cy="{:.3}" r="3" fill="{color}"/>"#, pts[0].0, pts[0].1);
        }
        1 => {
            let _ = writeln!(
                s,
                r#"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="{color}" stroke-width="2"/>"#,
                pts[0].0, pts[0].1, pts[pts.len() - 1].0, pts[pts.len() - 1].1
            );
        }
        _ => {
            let p: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.3},{y:.3}")).collect();
            let _ = writeln!(s, r##"<polygon points="{}" fill="{color}" stroke="#555" stroke-width="0.5"/>"##, p.join(" "));
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn inverse(g: &[Vec<i64>]) -> Vec<Vec<Q>> {
    match g.len() {
        1 => vec![vec![Q::new(1, g[0][0])]],
        _ => {
            let d = q(determinant(g));
            vec![vec![q(g[1][1]) / d, q(-g[0][1]) / d], vec![q(-g[1][0]) / d, q(g[0][0]) / d]]
        }
    }
}
