//! Brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::rngs::StdRng;
use rand::Rng;

use stabforge::exact_algebra::{LaurentPoly, RingRef, Weight, Q};
use stabforge::lattice_geometry::LatticePolytope;

pub type BigQ = BigRational;

pub fn big(n: i64) -> BigQ {
    BigQ::from_integer(BigInt::from(n))
}

pub fn bigq(x: &Q) -> BigQ {
    BigQ::new(BigInt::from(*x.numer()), BigInt::from(*x.denom()))
}

fn pow(t: &BigQ, k: i64) -> BigQ {
    let mut out = BigQ::one();
    for _ in 0..k.abs() {
        out *= t;
    }
    if k < 0 {
        out.recip()
    } else {
        out
    }
}

/// Evaluates every non-A variable at `t²`, so `h^{k/2}` becomes `t^k`, and
/// collects coefficients by A-exponent.
pub fn specialize(p: &LaurentPoly, t: &BigQ) -> BTreeMap<Vec<i64>, BigQ> {
    let ring = p.ring();
    let a = ring.a_indices();
    let rest = ring.non_a_indices();
    let mut out: BTreeMap<Vec<i64>, BigQ> = BTreeMap::new();
    for (w, &c) in p.terms() {
        let key: Vec<i64> = a.iter().map(|&i| {
            assert!(w.0[i].is_integer(), "fractional A-exponent");
            w.0[i].to_integer()
        }).collect();
        let mut v = big(c);
        for &i in &rest {
            let twice = w.0[i] * Q::from_integer(2);
            assert!(twice.is_integer(), "exponent finer than 1/2");
            v *= pow(t, twice.to_integer());
        }
        *out.entry(key).or_insert_with(BigQ::zero) += v;
    }
    out.retain(|_, v| !v.is_zero());
    out
}

/// Row echelon form over the rationals. Returns the rank and, when the
/// system is consistent, one solution with free variables set to zero.
pub fn solve(mut m: Vec<Vec<BigQ>>, mut rhs: Vec<BigQ>, cols: usize) -> (usize, Option<Vec<BigQ>>) {
    let rows = m.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        rhs.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        rhs[r] *= &inv;
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for k in c..cols {
                    let d = &f * &m[r][k];
                    m[i][k] -= d;
                }
                let d = &f * &rhs[r];
                rhs[i] -= d;
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    if rhs[r..].iter().any(|x| !x.is_zero()) {
        return (r, None);
    }
    let mut x = vec![BigQ::zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = rhs[i].clone();
    }
    (r, Some(x))
}

fn boxed(lo: &[i64], hi: &[i64]) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for (l, h) in lo.iter().zip(hi) {
        out = out.into_iter().flat_map(|v| (*l..=*h).map(move |x| {
            let mut w = v.clone();
            w.push(x);
            w
        })).collect();
    }
    out
}

fn bbox<'a>(pts: impl IntoIterator<Item = &'a Vec<i64>>, r: usize) -> (Vec<i64>, Vec<i64>) {
    let mut lo = vec![i64::MAX; r];
    let mut hi = vec![i64::MIN; r];
    for p in pts {
        for k in 0..r {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    (lo, hi)
}

pub struct DenseInterpolation {
    /// Dimension of `{f on the window : f = P g}`.
    pub kernel_dim: usize,
    /// The `f`-part of some solution of `f - P g = target`.
    pub f: Option<BTreeMap<Vec<i64>, BigQ>>,
}

/// Solves `f - P g = target` with `f` on `window` and `g` on a box large
/// enough to hold any quotient, after the specialization `h^{1/2} = t`.
pub fn dense_interpolation(p: &LaurentPoly, target: &LaurentPoly, window: &[Vec<i64>], t: &BigQ) -> DenseInterpolation {
    let r = p.ring().a_indices().len();
    let ps = specialize(p, t);
    let ts = specialize(target, t);
    let (plo, phi) = bbox(ps.keys(), r);
    let (mut lo, mut hi) = bbox(window.iter().chain(ts.keys()), r);
    if window.is_empty() && ts.is_empty() {
        lo = vec![0; r];
        hi = vec![0; r];
    }
    let glo: Vec<i64> = (0..r).map(|k| lo[k] - phi[k]).collect();
    let ghi: Vec<i64> = (0..r).map(|k| hi[k] - plo[k]).collect();
    let gpts = boxed(&glo, &ghi);
    let rlo: Vec<i64> = (0..r).map(|k| glo[k] + plo[k]).collect();
    let rhi: Vec<i64> = (0..r).map(|k| ghi[k] + phi[k]).collect();
    let rpts = boxed(&rlo, &rhi);
    let row_of: BTreeMap<&Vec<i64>, usize> = rpts.iter().enumerate().map(|(i, p)| (p, i)).collect();

    let nf = window.len();
    let cols = nf + gpts.len();
    let mut m = vec![vec![BigQ::zero(); cols]; rpts.len()];
    for (j, mu) in window.iter().enumerate() {
        m[row_of[mu]][j] = big(1);
    }
    for (j, nu) in gpts.iter().enumerate() {
        for (e, c) in &ps {
            let mu: Vec<i64> = nu.iter().zip(e).map(|(a, b)| a + b).collect();
            m[row_of[&mu]][nf + j] = -c.clone();
        }
    }
    let mut rhs = vec![BigQ::zero(); rpts.len()];
    for (e, c) in &ts {
        rhs[row_of[e]] = c.clone();
    }
    // multiplication by P is injective, so every null vector has a nonzero f-part
    let (rank, sol) = solve(m, rhs, cols);
    let f = sol.map(|x| window.iter().cloned().zip(x).filter(|(_, v)| !v.is_zero()).collect());
    DenseInterpolation { kernel_dim: cols - rank, f }
}

/// Integral `μ` with `μ + Δ ⊆ Δ + λ`, found by scanning a box around `λ`.
pub fn torvan_sections(delta: &LatticePolytope, lambda: &[Q]) -> Vec<Vec<i64>> {
    let shifted = delta.translate(lambda);
    let lo: Vec<i64> = lambda.iter().map(|x| x.floor().to_integer() - 2).collect();
    let hi: Vec<i64> = lambda.iter().map(|x| x.ceil().to_integer() + 2).collect();
    boxed(&lo, &hi)
        .into_iter()
        .filter(|mu| {
            delta.vertices().iter().all(|v| {
                let p: Vec<Q> = v.iter().zip(mu).map(|(x, m)| x + Q::from_integer(*m)).collect();
                shifted.contains(&p)
            })
        })
        .collect()
}

pub fn random_q(rng: &mut StdRng, span: i64, max_den: i64) -> Q {
    let d = rng.gen_range(1..=max_den);
    Q::new(rng.gen_range(-span * d..=span * d), d)
}

pub fn random_unit(rng: &mut StdRng, ring: &RingRef, a_exp: &[i64]) -> (Weight, i64) {
    let mut w = Weight::zero(ring.dim());
    for (k, &i) in ring.a_indices().iter().enumerate() {
        w.0[i] = Q::from_integer(a_exp[k]);
    }
    for i in ring.non_a_indices() {
        w.0[i] = Q::new(rng.gen_range(-3..=3), 2);
    }
    (w, if rng.gen_bool(0.5) { 1 } else { -1 })
}

pub fn is_zero_map(m: &BTreeMap<Vec<i64>, BigQ>) -> bool {
    m.values().all(|v| v.is_zero())
}

pub fn abs_max(m: &BTreeMap<Vec<i64>, BigQ>) -> BigQ {
    m.values().map(|v| v.abs()).fold(BigQ::zero(), |a, b| if b > a { b } else { a })
}
