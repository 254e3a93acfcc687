use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use super::weight::{Q, RingRef, Weight};
use crate::error::{Error, Result};

pub(crate) fn cadd(a: i64, b: i64) -> i64 {
    a.checked_add(b).expect("coefficient overflow")
}

pub(crate) fn cmul(a: i64, b: i64) -> i64 {
    a.checked_mul(b).expect("coefficient overflow")
}

/// Exact Laurent polynomial with integer coefficients and rational exponents.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    ring: RingRef,
    terms: BTreeMap<Weight, i64>,
}

impl LaurentPoly {
    pub fn zero(ring: &RingRef) -> Self {
        LaurentPoly { ring: ring.clone(), terms: BTreeMap::new() }
    }

    pub fn one(ring: &RingRef) -> Self {
        Self::constant(ring, 1)
    }

    pub fn constant(ring: &RingRef, c: i64) -> Self {
        Self::term(ring, c, Weight::zero(ring.dim()))
    }

    pub fn monomial(ring: &RingRef, w: Weight) -> Self {
        Self::term(ring, 1, w)
    }

    pub fn term(ring: &RingRef, c: i64, w: Weight) -> Self {
        assert_eq!(w.dim(), ring.dim(), "weight dimension mismatch");
        let mut terms = BTreeMap::new();
        if c != 0 {
            terms.insert(w, c);
        }
        LaurentPoly { ring: ring.clone(), terms }
    }

    pub fn from_terms(ring: &RingRef, it: impl IntoIterator<Item = (Weight, i64)>) -> Self {
        let mut p = Self::zero(ring);
        for (w, c) in it {
            p.add_term(w, c);
        }
        p
    }

    pub fn ring(&self) -> &RingRef {
        &self.ring
    }

    pub fn terms(&self) -> &BTreeMap<Weight, i64> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, w: &Weight) -> i64 {
        self.terms.get(w).copied().unwrap_or(0)
    }

    pub fn add_term(&mut self, w: Weight, c: i64) {
        if c == 0 {
            return;
        }
        assert_eq!(w.dim(), self.ring.dim(), "weight dimension mismatch");
        match self.terms.entry(w) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = cadd(*o.get(), c);
                if s == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    fn check_ring(&self, o: &Self) {
        assert!(
            std::sync::Arc::ptr_eq(&self.ring, &o.ring) || *self.ring == *o.ring,
            "ring mismatch"
        );
    }

    pub fn add(&self, o: &Self) -> Self {
        self.check_ring(o);
        let mut r = self.clone();
        for (w, c) in &o.terms {
            r.add_term(w.clone(), *c);
        }
        r
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.check_ring(o);
        let mut r = self.clone();
        for (w, c) in &o.terms {
            r.add_term(w.clone(), -c);
        }
        r
    }

    pub fn neg(&self) -> Self {
        self.scale(-1)
    }

    pub fn scale(&self, k: i64) -> Self {
        if k == 0 {
            return Self::zero(&self.ring);
        }
        LaurentPoly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(w, c)| (w.clone(), cmul(*c, k))).collect(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.check_ring(o);
        let mut acc: BTreeMap<Weight, i64> = BTreeMap::new();
        for (w1, c1) in &self.terms {
            for (w2, c2) in &o.terms {
                let e = acc.entry(w1.add(w2)).or_insert(0);
                *e = cadd(*e, cmul(*c1, *c2));
            }
        }
        acc.retain(|_, c| *c != 0);
        LaurentPoly { ring: self.ring.clone(), terms: acc }
    }

    /// Multiplies by the monomial `a^w`.
    pub fn shift(&self, w: &Weight) -> Self {
        LaurentPoly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(v, c)| (v.add(w), *c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut r = Self::one(&self.ring);
        for _ in 0..k {
            r = r.mul(self);
        }
        r
    }

    pub fn as_monomial(&self) -> Option<(i64, &Weight)> {
        if self.terms.len() == 1 {
            let (w, c) = self.terms.iter().next().unwrap();
            Some((*c, w))
        } else {
            None
        }
    }

    /// Units of the coefficient ring are `±(monomial)`; returns the inverse.
    pub fn unit_inverse(&self) -> Option<Self> {
        let (c, w) = self.as_monomial()?;
        if c.abs() != 1 {
            return None;
        }
        Some(Self::term(&self.ring, c, w.neg()))
    }

    /// Unit of `Z[h^{±1/2}]` in the sense of the coefficient ring: a signed
    /// monomial with no A-dependence.
    pub fn is_coefficient_unit(&self) -> bool {
        match self.as_monomial() {
            Some((c, w)) => c.abs() == 1 && self.ring.vanishes_on_a(w),
            None => false,
        }
    }

    /// Pushes every exponent vector through `map`, landing in `target`.
    pub fn map_exponents(&self, target: &RingRef, map: impl Fn(&Weight) -> Weight) -> Self {
        let mut r = Self::zero(target);
        for (w, c) in &self.terms {
            r.add_term(map(w), *c);
        }
        r
    }

    /// Applies the involution `a^w -> a^{-w}`.
    pub fn dual(&self) -> Self {
        self.map_exponents(&self.ring.clone(), |w| w.neg())
    }

    pub fn max_term(&self) -> Option<(&Weight, i64)> {
        self.terms.iter().next_back().map(|(w, c)| (w, *c))
    }

    /// Groups terms by their A-exponent; each value only carries non-A exponents.
    pub fn split_by_a(&self) -> BTreeMap<Vec<Q>, LaurentPoly> {
        let ai = self.ring.a_indices();
        let mut out: BTreeMap<Vec<Q>, LaurentPoly> = BTreeMap::new();
        for (w, c) in &self.terms {
            let key = w.select(&ai);
            let mut rest = w.clone();
            for &i in &ai {
                rest.0[i] = Q::zero();
            }
            out.entry(key).or_insert_with(|| LaurentPoly::zero(&self.ring)).add_term(rest, *c);
        }
        out
    }

    /// Exact division by repeatedly cancelling the leading term. Gives up as
    /// soon as a quotient term would leave the box forced by Newton polytope
    /// additivity, or a coefficient does not divide.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        self.check_ring(d);
        let (lw, lc) = d.max_term().map(|(w, c)| (w.clone(), c))?;
        if self.is_zero() {
            return Some(Self::zero(&self.ring));
        }
        let (dmin, _) = bbox(d);
        let (smin, _) = bbox(self);
        let floor: Vec<Q> = smin.iter().zip(&dmin).map(|(a, b)| a - b).collect();
        let mut rem = self.clone();
        let mut quo = Self::zero(&self.ring);
        while let Some((w, c)) = rem.max_term().map(|(w, c)| (w.clone(), c)) {
            if c % lc != 0 {
                return None;
            }
            let qw = w.sub(&lw);
            if qw.0.iter().zip(&floor).any(|(a, b)| a < b) {
                return None;
            }
            let t = Self::term(&self.ring, c / lc, qw);
            rem = rem.sub(&t.mul(d));
            quo = quo.add(&t);
        }
        Some(quo)
    }

    pub fn divides(&self, d: &Self) -> bool {
        self.div_exact(d).is_some()
    }

    /// Substitutes a rational value for coordinate `i`: only valid when the
    /// result is again a Laurent polynomial, i.e. for `value = 1`.
    pub fn specialize_to_one(&self, i: usize) -> Self {
        self.map_exponents(&self.ring.clone(), |w| {
            let mut v = w.clone();
            v.0[i] = Q::zero();
            v
        })
    }

    pub fn to_string_canonical(&self) -> String {
        format!("{self}")
    }
}

fn bbox(p: &LaurentPoly) -> (Vec<Q>, Vec<Q>) {
    let n = p.ring.dim();
    let mut lo = vec![Q::zero(); n];
    let mut hi = vec![Q::zero(); n];
    for (k, w) in p.terms.keys().enumerate() {
        for i in 0..n {
            if k == 0 || w.0[i] < lo[i] {
                lo[i] = w.0[i];
            }
            if k == 0 || w.0[i] > hi[i] {
                hi[i] = w.0[i];
            }
        }
    }
    (lo, hi)
}

impl fmt::Display for LaurentPoly {
    /// Terms in decreasing canonical order, e.g. `a1^2*h^-1/2 - 3*a2 + 1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (w, c)) in self.terms.iter().rev().enumerate() {
            let neg = *c < 0;
            let a = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            let m = self.ring.fmt_monomial(w);
            if w.is_zero() {
                write!(f, "{a}")?;
            } else if a == 1 {
                write!(f, "{m}")?;
            } else {
                write!(f, "{a}*{m}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({self})")
    }
}

impl std::ops::Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, o: &LaurentPoly) -> LaurentPoly {
        LaurentPoly::add(self, o)
    }
}

impl std::ops::Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, o: &LaurentPoly) -> LaurentPoly {
        LaurentPoly::sub(self, o)
    }
}

impl std::ops::Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, o: &LaurentPoly) -> LaurentPoly {
        LaurentPoly::mul(self, o)
    }
}

impl std::ops::Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly::neg(self)
    }
}

/// `1 - a^{-w}` for each weight, multiplied together.
pub fn koszul_from_weights(ring: &RingRef, weights: &[Weight]) -> Result<LaurentPoly> {
    let mut p = LaurentPoly::one(ring);
    for w in weights {
        if ring.vanishes_on_a(w) {
            return Err(Error::FixedDirection(ring.fmt_monomial(w)));
        }
        let f = LaurentPoly::one(ring).sub(&LaurentPoly::monomial(ring, w.neg()));
        p = p.mul(&f);
    }
    Ok(p)
}

/// Exponent image under an integral linear map `M` (rows = target coordinates).
pub fn restrict_to_subtorus(p: &LaurentPoly, target: &RingRef, m: &[Vec<i64>]) -> LaurentPoly {
    p.map_exponents(target, |w| {
        Weight(
            m.iter()
                .map(|row| {
                    row.iter()
                        .zip(&w.0)
                        .fold(Q::zero(), |acc, (r, x)| acc + x * Q::from_integer(*r))
                })
                .collect(),
        )
    })
}

