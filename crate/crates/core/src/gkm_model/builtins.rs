use super::{FixedPoint, GKMModel};
use crate::error::{Error, Result};
use crate::exact_algebra::{Ring, Weight};

impl GKMModel {
    /// `T*P^{n-1}` with `A` the diagonal torus of `GL(n)` and `h` scaling
    /// the cotangent fibers. At `F_k` the tangent weights are `a_i/a_k`
    /// (base) and `a_k/(h a_i)` (fiber); the polarization is the base part
    /// and `O(1)` restricts to `a_k^{-1}`.
    pub fn tstar_pn(n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::Invalid("n must be at least 1".into()));
        }
        let mut names: Vec<String> = (1..=n).map(|i| format!("a{i}")).collect();
        let a_names = names.clone();
        names.push("h".into());
        let ring = Ring::from_strings(names, a_names)?;
        let d = ring.dim();
        let h = n;
        let base = |i: usize, k: usize| {
            let mut w = Weight::zero(d);
            w.0[i] += 1;
            w.0[k] -= 1;
            w
        };
        let mut points = Vec::new();
        for k in 0..n {
            let pol: Vec<Weight> = (0..n).filter(|&i| i != k).map(|i| base(i, k)).collect();
            let mut tangent = pol.clone();
            for i in (0..n).filter(|&i| i != k) {
                let mut w = base(k, i);
                w.0[h] -= 1;
                tangent.push(w);
            }
            let mut ample = Weight::zero(d);
            ample.0[k] -= 1;
            points.push(FixedPoint { name: format!("F{}", k + 1), tangent, polarization: Some(pol), ample });
        }
        let mut edges = Vec::new();
        for k in 0..n {
            for l in k + 1..n {
                edges.push((k, l, base(l, k)));
            }
        }
        GKMModel::new(ring, points, &edges, None)
    }

    /// `P^2` with the maximal torus of `PGL(3)` and no polarization.
    pub fn p2() -> Result<Self> {
        let ring = Ring::new(&["a1", "a2", "a3"], &["a1", "a2", "a3"])?;
        let base = |i: usize, k: usize| {
            let mut w = Weight::zero(3);
            w.0[i] += 1;
            w.0[k] -= 1;
            w
        };
        let points = (0..3)
            .map(|k| {
                let mut ample = Weight::zero(3);
                ample.0[k] -= 1;
                FixedPoint {
                    name: format!("F{}", k + 1),
                    tangent: (0..3).filter(|&i| i != k).map(|i| base(i, k)).collect(),
                    polarization: None,
                    ample,
                }
            })
            .collect();
        let edges = vec![(0, 1, base(1, 0)), (0, 2, base(2, 0)), (1, 2, base(2, 1))];
        GKMModel::new(ring, points, &edges, None)
    }

    /// A single isolated fixed point with rank-1 `A`.
    pub fn single_point() -> Result<Self> {
        let ring = Ring::new(&["a", "h"], &["a"])?;
        let p = FixedPoint { name: "F".into(), tangent: vec![], polarization: Some(vec![]), ample: Weight::zero(2) };
        GKMModel::new(ring, vec![p], &[], None)
    }

    /// Names of the generators accepted by [`GKMModel::builtin`].
    pub const BUILTINS: &'static [&'static str] = &["tstar-pn", "p2", "point", "tstar-p1xp1", "tstar-p1xp2"];

    pub fn builtin(name: &str, n: Option<usize>) -> Result<Self> {
        match name {
            "tstar-pn" => Self::tstar_pn(n.ok_or_else(|| Error::Invalid("tstar-pn needs --n".into()))?),
            "p2" => Self::p2(),
            "point" => Self::single_point(),
            "tstar-p1xp1" => Self::tstar_pn(2)?.product(&Self::tstar_pn_named(2, "b")?),
            "tstar-p1xp2" => Self::tstar_pn(2)?.product(&Self::tstar_pn_named(3, "b")?),
            _ => Err(Error::Invalid(format!("unknown builtin '{name}'; expected one of {}", Self::BUILTINS.join(", ")))),
        }
    }

    /// [`GKMModel::tstar_pn`] with A-coordinates renamed to `{prefix}1..`
    /// and fixed points to `G1..`, for use as a second product factor.
    pub fn tstar_pn_named(n: usize, prefix: &str) -> Result<Self> {
        let m = Self::tstar_pn(n)?;
        let mut names: Vec<String> = (1..=n).map(|i| format!("{prefix}{i}")).collect();
        let a = names.clone();
        names.push("h".into());
        let ring = Ring::from_strings(names, a)?;
        let points = m
            .points
            .into_iter()
            .enumerate()
            .map(|(k, p)| FixedPoint { name: format!("G{}", k + 1), ..p })
            .collect();
        let edges: Vec<_> = m.edges.into_iter().map(|e| (e.a, e.b, e.weight)).collect();
        GKMModel::new(ring, points, &edges, None)
    }
}
