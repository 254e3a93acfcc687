use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use super::laurent::LaurentPoly;
use super::weight::{fmt_q, RingRef, Q};
use crate::error::{Error, Result};

/// Power series in `q` with rational exponents, known modulo `q^prec`.
#[derive(Clone, PartialEq, Eq)]
pub struct TruncatedQSeries {
    ring: RingRef,
    coeffs: BTreeMap<Q, LaurentPoly>,
    prec: Q,
}

impl TruncatedQSeries {
    pub fn zero(ring: &RingRef, prec: Q) -> Self {
        TruncatedQSeries { ring: ring.clone(), coeffs: BTreeMap::new(), prec }
    }

    /// `c * q^e`, known to precision `prec`.
    pub fn term(c: LaurentPoly, e: Q, prec: Q) -> Self {
        let mut s = Self::zero(c.ring(), prec);
        s.add_coeff(e, &c);
        s
    }

    pub fn constant(c: LaurentPoly, prec: Q) -> Self {
        Self::term(c, Q::zero(), prec)
    }

    pub fn ring(&self) -> &RingRef {
        &self.ring
    }

    pub fn prec(&self) -> Q {
        self.prec
    }

    pub fn coeffs(&self) -> &BTreeMap<Q, LaurentPoly> {
        &self.coeffs
    }

    pub fn coeff(&self, e: &Q) -> LaurentPoly {
        self.coeffs.get(e).cloned().unwrap_or_else(|| LaurentPoly::zero(&self.ring))
    }

    /// Adds `c q^e`; silently dropped beyond the precision.
    pub fn add_coeff(&mut self, e: Q, c: &LaurentPoly) {
        if e >= self.prec || c.is_zero() {
            return;
        }
        let cur = self.coeffs.remove(&e).unwrap_or_else(|| LaurentPoly::zero(&self.ring));
        let s = cur.add(c);
        if !s.is_zero() {
            self.coeffs.insert(e, s);
        }
    }

    /// Smallest exponent carrying a nonzero coefficient; the precision if none.
    pub fn valuation(&self) -> Q {
        self.coeffs.keys().next().copied().unwrap_or(self.prec)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn truncate(&self, prec: Q) -> Self {
        let p = if prec < self.prec { prec } else { self.prec };
        TruncatedQSeries {
            ring: self.ring.clone(),
            coeffs: self.coeffs.iter().filter(|(e, _)| **e < p).map(|(e, c)| (*e, c.clone())).collect(),
            prec: p,
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let p = self.prec.min(o.prec);
        let mut r = self.truncate(p);
        for (e, c) in &o.coeffs {
            r.add_coeff(*e, c);
        }
        r
    }

    pub fn neg(&self) -> Self {
        TruncatedQSeries {
            ring: self.ring.clone(),
            coeffs: self.coeffs.iter().map(|(e, c)| (*e, c.neg())).collect(),
            prec: self.prec,
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    /// For power series the product is known to the smaller precision; with
    /// negative valuations it is `min(p1 + v2, p2 + v1)`.
    pub fn mul(&self, o: &Self) -> Self {
        let (v1, v2) = (self.valuation(), o.valuation());
        let p = if v1 >= Q::zero() && v2 >= Q::zero() {
            self.prec.min(o.prec)
        } else {
            (self.prec + v2).min(o.prec + v1)
        };
        let mut r = Self::zero(&self.ring, p);
        for (e1, c1) in &self.coeffs {
            for (e2, c2) in &o.coeffs {
                let e = e1 + e2;
                if e < p {
                    r.add_coeff(e, &c1.mul(c2));
                }
            }
        }
        r
    }

    pub fn mul_poly(&self, c: &LaurentPoly) -> Self {
        let mut r = Self::zero(&self.ring, self.prec);
        for (e, x) in &self.coeffs {
            r.add_coeff(*e, &x.mul(c));
        }
        r
    }

    /// Multiplies by `q^k`, shifting the precision along.
    pub fn shift_q(&self, k: Q) -> Self {
        TruncatedQSeries {
            ring: self.ring.clone(),
            coeffs: self.coeffs.iter().map(|(e, c)| (e + k, c.clone())).collect(),
            prec: self.prec + k,
        }
    }

    /// Inverse of a series whose leading coefficient is a signed monomial.
    pub fn inverse(&self) -> Result<Self> {
        let v = self.valuation();
        let lead = self
            .coeffs
            .get(&v)
            .ok_or_else(|| Error::Invalid("inverse of a series with no known terms".into()))?;
        let u = lead.unit_inverse().ok_or_else(|| {
            Error::NoLimit(format!("leading coefficient {lead} is not invertible"))
        })?;
        // self = lead q^v g with g(0) = 1; solve g * inv = 1 term by term on the
        // grid (1/D)Z holding every exponent of g
        let g = self.shift_q(-v).mul_poly(&u);
        let p = g.prec;
        let d = g.max_denominator().max(1);
        let steps = ((p * Q::from_integer(d)).ceil()).to_integer();
        let at = |k: i64| Q::new(k, d);
        let mut inv: Vec<LaurentPoly> = Vec::new();
        for k in 0..steps.max(0) {
            let mut c = if k == 0 { LaurentPoly::one(&self.ring) } else { LaurentPoly::zero(&self.ring) };
            for (e, gc) in g.coeffs.range(at(1)..at(k + 1)) {
                let j = (*e * Q::from_integer(d)).to_integer();
                c = c.sub(&gc.mul(&inv[(k - j) as usize]));
            }
            inv.push(c);
        }
        let mut acc = Self::zero(&self.ring, p);
        for (k, c) in inv.iter().enumerate() {
            acc.add_coeff(at(k as i64), c);
        }
        Ok(acc.mul_poly(&u).shift_q(-v))
    }

    pub fn scale_variable(&self, var: usize, by: Q, prec: Q) -> Self {
        let mut r = Self::zero(&self.ring, prec);
        for (e, c) in &self.coeffs {
            for (w, k) in c.terms() {
                let term = LaurentPoly::term(&self.ring, *k, w.clone());
                r.add_coeff(e + by * w.0[var], &term);
            }
        }
        r
    }

    pub fn equal_up_to(&self, o: &Self, n: Q) -> bool {
        self.truncate(n).coeffs == o.truncate(n).coeffs
    }

    pub fn max_denominator(&self) -> i64 {
        super::weight::lcm_denoms(self.coeffs.keys())
    }
}

impl fmt::Display for TruncatedQSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (e, c)) in self.coeffs.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            if e.is_zero() {
                write!(f, "({c})")?;
            } else {
                write!(f, "({c})*q^{}", fmt_q(e))?;
            }
        }
        if !self.coeffs.is_empty() {
            write!(f, " + ")?;
        }
        write!(f, "O(q^{})", fmt_q(&self.prec))
    }
}

impl fmt::Debug for TruncatedQSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruncatedQSeries({self})")
    }
}
