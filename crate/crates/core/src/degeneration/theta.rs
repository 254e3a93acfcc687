use std::fmt::Write as _;

use num_traits::Zero;
use serde_json::{json, Value};

use crate::envelope::compute_stab;
use crate::error::{Error, Result};
use crate::exact_algebra::{fmt_q, parse_weight, q, qr, LaurentPoly, Ring, RingRef, TruncatedQSeries, Weight, Q};
use crate::gkm_model::GKMModel;
use crate::lattice_geometry::Chamber;

/// The ring `Z[a^{±1/2}]` used by the standalone theta checks.
pub fn theta_ring() -> RingRef {
    Ring::new(&["a"], &["a"]).expect("valid ring")
}

/// `θ₀ = Σ_k a^k q^{𝕢(k)}` modulo `q^n`, in the variable `var` of `ring`.
pub fn theta0_in(ring: &RingRef, var: usize, n: Q) -> TruncatedQSeries {
    let mut s = TruncatedQSeries::zero(ring, n);
    // 𝕢(k) = k(k-1)/2 on integers, symmetric under k -> 1-k
    let mut k: i64 = 1;
    loop {
        let e = q(k * (k - 1) / 2);
        if e >= n {
            break;
        }
        for j in [k, 1 - k] {
            s.add_coeff(e, &LaurentPoly::monomial(ring, Weight::unit(ring.dim(), var).scale(q(j))));
        }
        k += 1;
    }
    s
}

pub fn theta0(n: i64) -> TruncatedQSeries {
    theta0_in(&theta_ring(), 0, q(n))
}

/// `θ(q^f a^w)` for `0 <= f < 1`, modulo `q^prec`.
fn theta_frac(ring: &RingRef, f: Q, w: &Weight, prec: Q) -> TruncatedQSeries {
    let one = LaurentPoly::one(ring);
    let m = LaurentPoly::monomial(ring, w.clone());
    let minv = LaurentPoly::monomial(ring, w.neg());
    let inner = prec + q(1);
    let mut prod = TruncatedQSeries::constant(one.clone(), inner);
    let mut n = 1i64;
    while q(n) - f < inner {
        for (e, c) in [(q(n) + f, &m), (q(n) - f, &minv)] {
            let mut factor = TruncatedQSeries::constant(one.clone(), inner);
            factor.add_coeff(e, &c.neg());
            prod = prod.mul(&factor);
        }
        n += 1;
    }
    let half = w.scale(qr(1, 2));
    let mut pre = TruncatedQSeries::zero(ring, inner + q(1));
    pre.add_coeff(f / q(2), &LaurentPoly::monomial(ring, half.clone()));
    pre.add_coeff(-f / q(2), &LaurentPoly::monomial(ring, half.neg()).neg());
    pre.mul(&prod).truncate(prec)
}

/// `θ(q^ν a^w)` modulo `q^n`, where `θ(x) = (x^{1/2} - x^{-1/2}) Π_{k≥1}(1 - q^k x)(1 - q^k/x)`.
/// Integer parts of `ν` are moved out with `θ(qx) = -q^{-1/2} x^{-1} θ(x)`.
pub fn theta_odd_shifted(ring: &RingRef, nu: Q, w: &Weight, n: Q) -> TruncatedQSeries {
    let m = nu.floor();
    let f = nu - m;
    let mi = m.to_integer();
    let e = -(m * m) / q(2) - m * f;
    let base = theta_frac(ring, f, w, n - e.min(Q::zero()) + q(1));
    let sign = if mi % 2 == 0 { 1 } else { -1 };
    let pre = LaurentPoly::term(ring, sign, w.scale(-m));
    base.mul_poly(&pre).shift_q(e).truncate(n)
}

/// `θ(a^w)` modulo `q^n`.
pub fn theta_odd(ring: &RingRef, w: &Weight, n: i64) -> TruncatedQSeries {
    theta_odd_shifted(ring, Q::zero(), w, q(n))
}

/// `f₃² + f₂³ − f₁f₂f₃` (or with `+f₁f₂f₃`) for `f₁ = t+s, f₂ = ts, f₃ = t²s`.
pub fn tate_cubic(perturbed: bool) -> LaurentPoly {
    let r = Ring::new(&["t", "s"], &["t", "s"]).expect("valid ring");
    let t = LaurentPoly::monomial(&r, Weight::from_ints(&[1, 0]));
    let s = LaurentPoly::monomial(&r, Weight::from_ints(&[0, 1]));
    let f1 = t.add(&s);
    let f2 = t.mul(&s);
    let f3 = t.mul(&t).mul(&s);
    let cross = f1.mul(&f2).mul(&f3);
    let base = f3.pow(2).add(&f2.pow(3));
    if perturbed {
        base.add(&cross)
    } else {
        base.sub(&cross)
    }
}

/// The cubic vanishes identically, its perturbation does not, and the
/// values at `t = 1, s = 2` are `4 + 8 - 12 = 0`.
pub fn tate_cubic_check() -> bool {
    let (t, s) = (1i64, 2i64);
    let (f1, f2, f3) = (t + s, t * s, t * t * s);
    tate_cubic(false).is_zero() && !tate_cubic(true).is_zero() && f3 * f3 + f2 * f2 * f2 - f1 * f2 * f3 == 0
}

/// Truncated theta series and the residuals of their functional equations.
#[derive(Clone, Debug)]
pub struct ThetaCheck {
    pub n: i64,
    pub theta0: TruncatedQSeries,
    /// `θ₀(qa) - a^{-1} θ₀(a)` modulo `q^n`.
    pub residual_theta0: TruncatedQSeries,
    pub theta_odd: TruncatedQSeries,
    /// `θ(qa) + q^{-1/2} a^{-1} θ(a)` modulo `q^n`.
    pub residual_quasi: TruncatedQSeries,
    /// `θ(a^{-1}) + θ(a)` modulo `q^n`.
    pub residual_odd: TruncatedQSeries,
    pub tate: bool,
}

/// Enough extra precision that the substitution `a -> qa` is exact below `q^n`.
fn margin(n: i64) -> i64 {
    n + (2.0 * n as f64).sqrt().ceil() as i64 + 3
}

pub fn theta_check(n: i64) -> Result<ThetaCheck> {
    if n <= 0 {
        return Err(Error::Invalid("the truncation order must be positive".into()));
    }
    let r = theta_ring();
    let nq = q(n);
    let big = q(margin(n));
    let a = Weight::unit(1, 0);
    let ainv = LaurentPoly::monomial(&r, a.neg());

    let t0 = theta0_in(&r, 0, big);
    let lhs = t0.scale_variable(0, q(1), nq);
    let residual_theta0 = lhs.sub(&t0.mul_poly(&ainv).truncate(nq)).truncate(nq);

    let th = theta_odd_shifted(&r, Q::zero(), &a, big);
    let lhs = th.scale_variable(0, q(1), nq);
    let rhs = th.mul_poly(&ainv).shift_q(qr(-1, 2)).neg().truncate(nq);
    let residual_quasi = lhs.sub(&rhs).truncate(nq);
    let residual_odd = theta_odd(&r, &a.neg(), n).add(&th.truncate(nq)).truncate(nq);

    Ok(ThetaCheck {
        n,
        theta0: t0.truncate(nq),
        residual_theta0,
        theta_odd: th.truncate(nq),
        residual_quasi,
        residual_odd,
        tate: tate_cubic_check(),
    })
}

impl ThetaCheck {
    pub fn pass(&self) -> bool {
        self.residual_theta0.is_zero() && self.residual_quasi.is_zero() && self.residual_odd.is_zero() && self.tate
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "theta0 mod q^{} = {}", self.n, self.theta0);
        let _ = writeln!(s, "theta(a) mod q^{} = {}", self.n, self.theta_odd);
        let _ = writeln!(s, "residual theta0(qa) - a^-1 theta0(a): {}", self.residual_theta0);
        let _ = writeln!(s, "residual theta(qa) + q^-1/2 a^-1 theta(a): {}", self.residual_quasi);
        let _ = writeln!(s, "residual theta(1/a) + theta(a): {}", self.residual_odd);
        let _ = writeln!(s, "tate cubic: {}", if self.tate { "vanishes" } else { "FAILS" });
        let _ = writeln!(s, "{}", if self.pass() { "PASS" } else { "FAIL" });
        s
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": 1,
            "kind": "theta_check",
            "truncation": self.n,
            "theta0": series_json(&self.theta0),
            "theta_odd": series_json(&self.theta_odd),
            "residuals": {
                "theta0_quasi_periodicity": series_json(&self.residual_theta0),
                "theta_quasi_periodicity": series_json(&self.residual_quasi),
                "theta_oddness": series_json(&self.residual_odd),
            },
            "tate_cubic": self.tate,
            "pass": self.pass(),
        })
    }
}

/// `{exponent: coefficient}`, exponents in increasing order.
pub fn series_json(s: &TruncatedQSeries) -> Value {
    json!({
        "precision": fmt_q(&s.prec()),
        "terms": s.coeffs().iter().map(|(e, c)| json!([fmt_q(e), c.to_string()])).collect::<Vec<_>>(),
    })
}

/// The rank-one elliptic stable envelope of `T*P¹`, over the ring of the
/// model extended by the Kähler variable `z = q^ν ζ`.
#[derive(Clone, Debug)]
pub struct EllipticMatrix {
    pub model: GKMModel,
    pub ring: RingRef,
    pub slope: Q,
    pub nu: Q,
    pub zeta: Weight,
    pub n: i64,
    /// `entries[i][j]` is the class attached to `F_j` restricted to `F_i`.
    pub entries: Vec<Vec<TruncatedQSeries>>,
}

fn check_tstar_p1(model: &GKMModel) -> Result<()> {
    let mut reference = GKMModel::tstar_pn(2)?;
    reference.slope = model.slope;
    if *model != reference {
        return Err(Error::Unsupported("the elliptic envelope is implemented for the builtin T*P^1 only".into()));
    }
    Ok(())
}

/// Entries, with `x = a₁/a₂`:
/// `E₁₁ = x^{1/2} θ(1/x)`, `E₂₂ = -x^{-1/2} θ(1/(ħx))`, `E₂₁ = 0`,
/// `E₁₂ = -θ(1/ħ) x^{-1/2} θ(z/(ħx)) / θ(z/ħ)`, and `ν = 1 - slope`.
pub fn elliptic_stab_rank1(model: &GKMModel, slope: Option<Q>, zeta: Option<&str>, n: i64) -> Result<EllipticMatrix> {
    check_tstar_p1(model)?;
    if n < 8 {
        return Err(Error::Invalid(format!("truncation {n} is below the minimum 8")));
    }
    let slope = match slope {
        Some(s) => s,
        None => model.default_slope()?,
    };
    let mut names: Vec<String> = model.ring.names().to_vec();
    names.push("z".into());
    let ring = Ring::from_strings(names, vec!["a1".into(), "a2".into()])?;
    let zeta = parse_weight(&ring, zeta.unwrap_or("z"))?;
    if !zeta.0[0].is_zero() || !zeta.0[1].is_zero() {
        return Err(Error::Invalid("the Kahler parameter must not involve a1, a2".into()));
    }
    let nu = q(1) - slope;
    let hw = Weight::unit(4, 2);
    if nu.is_integer() && (zeta.is_zero() || zeta == hw) {
        return Err(Error::Resonant(format!("z = q^{} {} lies on the resonant locus", fmt_q(&nu), ring.fmt_monomial(&zeta))));
    }
    let nq = q(n);
    let x = Weight::from_ints(&[1, -1, 0, 0]);
    let mono = |w: Weight| LaurentPoly::monomial(&ring, w);
    let half = qr(1, 2);

    let e11 = theta_odd_shifted(&ring, Q::zero(), &x.neg(), nq).mul_poly(&mono(x.scale(half)));
    let e22 = theta_odd_shifted(&ring, Q::zero(), &x.add(&hw).neg(), nq).mul_poly(&mono(x.scale(-half))).neg();

    // θ(q^ν ζ/(ħx)) / θ(q^ν ζ/ħ) = x^m θ(q^f ζ/(ħx)) / θ(q^f ζ/ħ), ν = m + f
    let m = nu.floor();
    let f = nu - m;
    let zh = zeta.sub(&hw);
    let num = theta_odd_shifted(&ring, f, &zh.sub(&x), nq + q(2));
    let den = theta_odd_shifted(&ring, f, &zh, nq + q(2));
    let ratio = num.mul(&den.inverse()?).mul_poly(&mono(x.scale(m)));
    let e12 = theta_odd_shifted(&ring, Q::zero(), &hw.neg(), nq + q(2))
        .mul(&ratio)
        .mul_poly(&mono(x.scale(-half)))
        .neg()
        .truncate(nq);
    if e12.prec() < nq {
        return Err(Error::Invalid("lost precision in the off-diagonal entry".into()));
    }
    let zero = TruncatedQSeries::zero(&ring, nq);
    Ok(EllipticMatrix {
        model: model.clone(),
        ring: ring.clone(),
        slope,
        nu,
        zeta,
        n,
        entries: vec![vec![e11.truncate(nq), e12], vec![zero, e22.truncate(nq)]],
    })
}

impl EllipticMatrix {
    pub fn x(&self) -> Weight {
        Weight::from_ints(&[1, -1, 0, 0])
    }

    /// `E(qx) = c · E(x)` entrywise: `(sign, q-exponent, monomial)`.
    pub fn multiplier(&self, i: usize, j: usize) -> Option<(i64, Q, Weight)> {
        let xi = self.x().neg();
        let hi = Weight::unit(4, 2).neg();
        match (i, j) {
            (0, 0) => Some((-1, Q::zero(), xi)),
            (1, 1) => Some((-1, q(-1), xi.add(&hi))),
            (0, 1) => Some((-1, self.nu - q(1), xi.add(&hi).add(&self.zeta))),
            _ => None,
        }
    }

    /// The order below which `a₁ -> q a₁` is determined by the stored terms.
    pub fn safe_order(&self) -> Q {
        q(2 * self.n - margin(self.n))
    }

    /// Compares `E(qx)` with the multiplier times `E(x)` modulo `q^upto`.
    pub fn quasi_periodic(&self, upto: Q) -> bool {
        (0..2).all(|i| {
            (0..2).all(|j| match self.multiplier(i, j) {
                None => self.entries[i][j].is_zero(),
                Some((sign, e, w)) => {
                    let lhs = self.entries[i][j].scale_variable(0, q(1), upto);
                    let rhs = self.entries[i][j].mul_poly(&LaurentPoly::term(&self.ring, sign, w)).shift_q(e).truncate(upto);
                    lhs.equal_up_to(&rhs, upto)
                }
            })
        })
    }

    /// Substitutes `a₁ = a₂ · ħ^k` into an entry.
    pub fn specialize(&self, i: usize, j: usize, k: i64) -> TruncatedQSeries {
        let s = &self.entries[i][j];
        let mut r = TruncatedQSeries::zero(&self.ring, s.prec());
        for (e, c) in s.coeffs() {
            let mapped = c.map_exponents(&self.ring, |w| {
                let mut v = w.clone();
                let a = v.0[0];
                v.0[0] = Q::zero();
                v.0[1] += a;
                v.0[2] += a * q(k);
                v
            });
            r.add_coeff(*e, &mapped);
        }
        r
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": 1,
            "kind": "elliptic_stab",
            "model": "tstar-pn",
            "n": 2,
            "slope": fmt_q(&self.slope),
            "nu": fmt_q(&self.nu),
            "zeta": self.ring.fmt_monomial(&self.zeta),
            "truncation": self.n,
            "entries": self.entries.iter().map(|row| row.iter().map(series_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }
}

/// The `q⁰` part of an elliptic matrix next to the K-theoretic envelope.
#[derive(Clone, Debug)]
pub struct NodalLimit {
    pub slope: Q,
    pub limit: Vec<Vec<LaurentPoly>>,
    pub stab: Vec<Vec<LaurentPoly>>,
    /// `limit = monomial · stab` when such a signed monomial exists.
    pub monomial: Option<LaurentPoly>,
}

pub fn nodal_limit(e: &EllipticMatrix) -> Result<NodalLimit> {
    let model = &e.model;
    let mut limit = Vec::new();
    for (i, row) in e.entries.iter().enumerate() {
        let mut out = Vec::new();
        for (j, s) in row.iter().enumerate() {
            if !s.is_zero() && s.valuation() < Q::zero() {
                return Err(Error::NoLimit(format!("entry ({},{}) has q-valuation {}", i + 1, j + 1, fmt_q(&s.valuation()))));
            }
            let c = s.coeff(&Q::zero());
            if c.terms().keys().any(|w| !w.0[3].is_zero()) {
                return Err(Error::NoLimit(format!("the q^0 part of entry ({},{}) depends on z", i + 1, j + 1)));
            }
            out.push(c.map_exponents(&model.ring, |w| Weight(w.0[..3].to_vec())));
        }
        limit.push(out);
    }
    let stab = compute_stab(model, &Chamber::standard(2), Some(e.slope), None)?.entries;
    let monomial = common_monomial(&limit, &stab);
    Ok(NodalLimit { slope: e.slope, limit, stab, monomial })
}

fn common_monomial(a: &[Vec<LaurentPoly>], b: &[Vec<LaurentPoly>]) -> Option<LaurentPoly> {
    let mut found: Option<(i64, Weight)> = None;
    for (ra, rb) in a.iter().zip(b) {
        for (x, y) in ra.iter().zip(rb) {
            if x.is_zero() || y.is_zero() {
                if x.is_zero() != y.is_zero() {
                    return None;
                }
                continue;
            }
            let (wx, cx) = x.terms().iter().next().map(|(w, c)| (w.clone(), *c))?;
            let (wy, cy) = y.terms().iter().next().map(|(w, c)| (w.clone(), *c))?;
            if cx != cy && cx != -cy {
                return None;
            }
            let cand = (cx / cy, wx.sub(&wy));
            if found.as_ref().is_some_and(|f| *f != cand) {
                return None;
            }
            found = Some(cand);
        }
    }
    let (c, w) = found?;
    let ring = a[0][0].ring().clone();
    let m = LaurentPoly::term(&ring, c, w);
    let ok = a.iter().zip(b).all(|(ra, rb)| ra.iter().zip(rb).all(|(x, y)| *x == y.mul(&m)));
    ok.then_some(m)
}

impl NodalLimit {
    pub fn agrees(&self) -> bool {
        self.monomial.is_some()
    }

    pub fn monomial_is_one(&self) -> bool {
        self.monomial.as_ref().is_some_and(|m| m.as_monomial().is_some_and(|(c, w)| c == 1 && w.is_zero()))
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "slope {}", fmt_q(&self.slope));
        for (name, m) in [("q^0 part", &self.limit), ("stab", &self.stab)] {
            let _ = writeln!(s, "{name}:");
            for row in m {
                let _ = writeln!(s, "  {}", row.iter().map(|p| p.to_string()).collect::<Vec<_>>().join("  |  "));
            }
        }
        match &self.monomial {
            Some(m) => {
                let _ = writeln!(s, "agree up to the monomial {m}");
            }
            None => {
                let _ = writeln!(s, "DISAGREE");
            }
        }
        s
    }

    pub fn to_json(&self) -> Value {
        let mat = |m: &Vec<Vec<LaurentPoly>>| m.iter().map(|r| r.iter().map(|p| p.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>();
        json!({
            "schema": 1,
            "kind": "nodal_limit",
            "slope": fmt_q(&self.slope),
            "limit": mat(&self.limit),
            "stab": mat(&self.stab),
            "monomial": self.monomial.as_ref().map(|m| m.to_string()),
            "agrees": self.agrees(),
        })
    }
}
