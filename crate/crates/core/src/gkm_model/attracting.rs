use std::collections::BTreeMap;

use num_traits::Zero;

use super::GKMModel;
use crate::error::{Error, Result};
use crate::exact_algebra::{koszul_from_weights, newton_polytope, q, LaurentPoly, RingRef, ThetaClass, Weight, Q};
use crate::lattice_geometry::linalg::{integer_kernel, primitive, rank};
use crate::lattice_geometry::{chamber_split, Chamber, LatticePolytope, PartialOrder, ShiftedPolytope, Side};

/// Chamber buckets at one fixed point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointData {
    /// Attracting tangent weights `N_{>0}`.
    pub n_pos: Vec<Weight>,
    /// Repelling tangent weights `N_{<0}`.
    pub n_neg: Vec<Weight>,
    pub t_pos: Vec<Weight>,
    pub t_neg: Vec<Weight>,
    /// `N_{<0} - T^{1/2}_{<0} - (T^{1/2}_{>0})^dual`, trivial on A.
    pub delta_upsilon: ThetaClass,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttractingData {
    pub chamber: Chamber,
    pub points: Vec<PointData>,
}

/// Whether a formal combination of characters restricts to zero on A.
fn vanishes_on_a(ring: &RingRef, c: &ThetaClass) -> bool {
    let mut by_a: BTreeMap<Vec<Q>, i64> = BTreeMap::new();
    for (w, n) in c.terms() {
        *by_a.entry(ring.a_part(w)).or_default() += n;
    }
    by_a.values().all(|&n| n == 0)
}

pub fn attracting_decomposition(model: &GKMModel, c: &Chamber) -> Result<AttractingData> {
    let ring = &model.ring;
    c.validate(ring)?;
    let mut points = Vec::with_capacity(model.len());
    for (k, p) in model.points.iter().enumerate() {
        let pol = model.polarization(k)?;
        let n = chamber_split(ring, &p.tangent, c)?;
        let t = chamber_split(ring, pol, c)?;
        let du = ThetaClass::from_weights(ring, &n.repelling)
            .sub(&ThetaClass::from_weights(ring, &t.repelling))
            .sub(&ThetaClass::from_weights(ring, &t.attracting).dual());
        if !vanishes_on_a(ring, &du) {
            return Err(Error::InconsistentPolarization(format!(
                "{}: N_<0 - T^1/2_<0 - (T^1/2_>0)^dual is nonzero on A",
                p.name
            )));
        }
        points.push(PointData {
            n_pos: n.attracting,
            n_neg: n.repelling,
            t_pos: t.attracting,
            t_neg: t.repelling,
            delta_upsilon: du,
        });
    }
    Ok(AttractingData { chamber: c.clone(), points })
}

/// `(-1)^{rk V_{>0}} (det N_{<0} / det V)^{1/2} Π_{w ∈ N_{<0}} (1 - a^{-w})`
/// for a possibly virtual polarization `V`.
pub fn normalization_from(
    ring: &RingRef,
    n_neg: &[Weight],
    polarization: &ThetaClass,
    c: &Chamber,
    label: &str,
) -> Result<LaurentPoly> {
    let mut rk_pos = 0i64;
    let mut det = Weight::zero(ring.dim());
    for w in n_neg {
        det = det.add(w);
    }
    for (w, n) in polarization.terms() {
        if c.side(ring, w)? == Side::Attracting {
            rk_pos += n;
        }
        det = det.sub(&w.scale(q(*n)));
    }
    let root = det.scale(Q::new(1, 2));
    let ok = root.0.iter().enumerate().all(|(i, e)| {
        if ring.is_a(i) {
            e.is_integer()
        } else {
            (*e * q(2)).is_integer()
        }
    });
    if !ok {
        return Err(Error::NonSquare(format!("{label}: {}", ring.fmt_monomial(&det))));
    }
    let sign = if rk_pos.rem_euclid(2) == 0 { 1 } else { -1 };
    Ok(LaurentPoly::term(ring, sign, root).mul(&koszul_from_weights(ring, n_neg)?))
}

/// Diagonal restriction of the stable envelope at fixed point `p`.
pub fn normalization(model: &GKMModel, data: &AttractingData, p: usize) -> Result<LaurentPoly> {
    let pol = ThetaClass::from_weights(&model.ring, model.polarization(p)?);
    normalization_from(&model.ring, &data.points[p].n_neg, &pol, &data.chamber, &model.points[p].name)
}

/// The window `deg_A Λ•(T^{1/2})^dual|_{F_j} + s (L_j - L_i)` for the
/// entry of the stable envelope of `F_i` at `F_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabDegreeWindow {
    pub j: usize,
    pub i: usize,
    pub window: ShiftedPolytope,
}

impl StabDegreeWindow {
    pub fn polytope(&self) -> LatticePolytope {
        self.window.polytope()
    }

    pub fn lattice_points(&self) -> Vec<Vec<i64>> {
        self.window.lattice_points()
    }

    /// Integral shifts lose uniqueness.
    pub fn is_generic(&self) -> bool {
        !self.window.shift_is_integral()
    }

    /// Range of the window under a cocharacter `xi` of A.
    pub fn projection(&self, xi: &[i64]) -> (Q, Q) {
        let xq: Vec<Q> = xi.iter().map(|&x| q(x)).collect();
        self.polytope().support_interval(&xq)
    }
}

pub fn degree_polytope(model: &GKMModel, order: &PartialOrder, j: usize, i: usize, slope: Q) -> Result<StabDegreeWindow> {
    if !order.le(j, i) {
        return Err(Error::Incomparable(model.points[j].name.clone(), model.points[i].name.clone()));
    }
    let ring = &model.ring;
    let base = newton_polytope(&koszul_from_weights(ring, model.polarization(j)?)?)?;
    Ok(StabDegreeWindow { j, i, window: ShiftedPolytope::new(base, model.slope_shift(j, i, slope)) })
}

/// `V_{=0} + V_{>0} - (V_{>0})^dual`, with sides taken along the
/// (possibly non-generic) cocharacter of the face. Repelling terms drop out.
pub fn limit_polarization(v: &ThetaClass, face: &Chamber) -> ThetaClass {
    let ring = v.ring().clone();
    let mut out = ThetaClass::zero(&ring);
    for (w, n) in v.terms() {
        let p = face.pairing(&ring, w);
        if p.is_zero() {
            out.add_weight(w.clone(), *n);
        } else if p > Q::zero() {
            out.add_weight(w.clone(), *n);
            out.add_weight(w.neg(), -n);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Obstruction {
    /// Edge whose weight cuts out the codimension-one subtorus `A'`.
    pub edge: (usize, usize),
    /// Cocharacter basis of `A'` in full torus coordinates.
    pub subtorus: Vec<Vec<i64>>,
    pub first: usize,
    pub second: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AttractiveReport {
    /// Points where the supplied class has the wrong degree on A.
    pub pointwise: Vec<usize>,
    pub obstructions: Vec<Obstruction>,
}

impl AttractiveReport {
    pub fn ok(&self) -> bool {
        self.pointwise.is_empty() && self.obstructions.is_empty()
    }

    pub fn describe(&self, model: &GKMModel) -> Vec<String> {
        let nm = |k: usize| model.points[k].name.as_str();
        let mut out: Vec<String> = self
            .pointwise
            .iter()
            .map(|&p| format!("degree of S on A differs from deg Θ(N_<0) at {}", nm(p)))
            .collect();
        for o in &self.obstructions {
            out.push(format!(
                "obstruction on the subtorus orthogonal to edge {}-{}: deg Θ(N_<0) differs between {} and {}",
                nm(o.edge.0),
                nm(o.edge.1),
                nm(o.first),
                nm(o.second)
            ));
        }
        out
    }
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    parent[x] = r;
    r
}

/// Degree checks for a candidate attractive class `s` (one theta class per
/// fixed point) and, independently of `s`, the subtorus obstruction: for
/// every edge the quadratic forms `deg Θ(N_{<0})` restricted to the kernel
/// `A'` of its weight must agree on each connected component of `X^{A'}`.
pub fn attractive_check(model: &GKMModel, s: Option<&[ThetaClass]>, c: &Chamber) -> Result<AttractiveReport> {
    let ring = &model.ring;
    c.validate(ring)?;
    let ai = ring.a_indices();
    let mut nneg = Vec::with_capacity(model.len());
    for p in &model.points {
        nneg.push(ThetaClass::from_weights(ring, &chamber_split(ring, &p.tangent, c)?.repelling));
    }
    let mut report = AttractiveReport::default();
    if let Some(s) = s {
        for (k, sk) in s.iter().enumerate() {
            if sk.theta_degree(&ai) != nneg[k].theta_degree(&ai) {
                report.pointwise.push(k);
            }
        }
    }
    let mut seen_lines: Vec<Vec<i64>> = Vec::new();
    for e in &model.edges {
        let wa = primitive(&ring.a_part(&e.weight));
        let line = if wa.iter().find(|x| **x != 0).is_some_and(|x| *x < 0) { wa.iter().map(|x| -x).collect() } else { wa };
        if seen_lines.contains(&line) {
            continue;
        }
        seen_lines.push(line.clone());
        let basis: Vec<Vec<i64>> = integer_kernel(&line)
            .into_iter()
            .map(|b| {
                let mut full = vec![0i64; ring.dim()];
                for (&i, x) in ai.iter().zip(b) {
                    full[i] = x;
                }
                full
            })
            .collect();
        let mut parent: Vec<usize> = (0..model.len()).collect();
        let lq: Vec<Q> = line.iter().map(|&x| q(x)).collect();
        for f in &model.edges {
            if rank(&[lq.clone(), ring.a_part(&f.weight)]) == 1 {
                let (x, y) = (find(&mut parent, f.a), find(&mut parent, f.b));
                parent[x] = y;
            }
        }
        let forms: Vec<Vec<Vec<Q>>> = nneg.iter().map(|t| t.degree_on(&basis)).collect();
        for p in 0..model.len() {
            for r in p + 1..model.len() {
                if find(&mut parent, p) == find(&mut parent, r)
                    && forms[p] != forms[r]
                    && !report.obstructions.iter().any(|o| (o.first, o.second) == (p, r))
                {
                    report.obstructions.push(Obstruction { edge: (e.a, e.b), subtorus: basis.clone(), first: p, second: r });
                }
            }
        }
    }
    Ok(report)
}

/// Kähler parameter values where the interpolation for
/// `S = Θ(T^{1/2}) ⊗ U(L, z)` can lose uniqueness, as characters of the
/// torus outside A. For a comparable pair the differences of `L` and of the
/// degree vectors of `δυ = Σ_u (u - 1) D_u` must be collinear on A; the
/// pair then contributes `z = Π u^{β_u/α}`. The unit character is added
/// once some pair resonates.
pub fn resonant_locus(model: &GKMModel, c: &Chamber) -> Result<Vec<Weight>> {
    let ring = &model.ring;
    let data = attracting_decomposition(model, c)?;
    let order = model.ample_order(c)?;
    let nu: Vec<BTreeMap<Weight, Vec<Q>>> = data.points.iter().map(|d| degree_vectors(ring, &d.delta_upsilon)).collect();
    let mut out: Vec<Weight> = Vec::new();
    for j in 0..model.len() {
        for i in 0..model.len() {
            if !order.less(j, i) {
                continue;
            }
            let dl: Vec<Q> = model.ample_a(j).iter().zip(model.ample_a(i)).map(|(x, y)| x - y).collect();
            let k = dl.iter().position(|x| !x.is_zero()).expect("comparable points have distinct ample weights");
            let mut z = Weight::zero(ring.dim());
            let mut dependent = true;
            let us: std::collections::BTreeSet<&Weight> = nu[j].keys().chain(nu[i].keys()).collect();
            let zero_a = vec![Q::zero(); dl.len()];
            for u in us {
                let a = nu[j].get(u).unwrap_or(&zero_a);
                let b = nu[i].get(u).unwrap_or(&zero_a);
                let du: Vec<Q> = a.iter().zip(b).map(|(x, y)| x - y).collect();
                let beta = du[k] / dl[k];
                if du.iter().zip(&dl).any(|(x, y)| *x != beta * y) {
                    dependent = false;
                    break;
                }
                z = z.add(&u.scale(beta));
            }
            if dependent && !out.contains(&z) {
                out.push(z);
            }
        }
    }
    let unit = Weight::zero(ring.dim());
    if !out.is_empty() && !out.contains(&unit) {
        out.push(unit);
    }
    out.sort();
    Ok(out)
}

/// For `δυ` trivial on A, the map `u ↦ Σ n w_A` over terms whose part
/// outside A is the nontrivial character `u`.
fn degree_vectors(ring: &RingRef, du: &ThetaClass) -> BTreeMap<Weight, Vec<Q>> {
    let na = ring.non_a_indices();
    let mut out: BTreeMap<Weight, Vec<Q>> = BTreeMap::new();
    for (w, n) in du.terms() {
        let mut u = Weight::zero(ring.dim());
        for &i in &na {
            u.0[i] = w.0[i];
        }
        if u.is_zero() {
            continue;
        }
        let e = out.entry(u).or_insert_with(|| vec![Q::zero(); ring.a_indices().len()]);
        for (x, y) in e.iter_mut().zip(ring.a_part(w)) {
            *x += y * q(*n);
        }
    }
    out.retain(|_, v| v.iter().any(|x| !x.is_zero()));
    out
}
