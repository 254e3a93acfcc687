//! The field Q(t), where `t` is a fixed root of the single equivariant
//! parameter outside A (so `h = t^D`). Linear systems over the coefficient
//! ring are solved here and pulled back.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::laurent::LaurentPoly;
use super::weight::{lcm_denoms, RingRef, Weight, Q};
use crate::error::{Error, Result};

fn br(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Dense polynomial, coefficients from degree 0 upward, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UPoly(pub Vec<BigRational>);

impl UPoly {
    pub fn zero() -> Self {
        UPoly(Vec::new())
    }

    pub fn constant(c: BigRational) -> Self {
        let mut p = UPoly(vec![c]);
        p.trim();
        p
    }

    pub fn monomial(k: usize) -> Self {
        let mut v = vec![BigRational::zero(); k + 1];
        v[k] = BigRational::one();
        UPoly(v)
    }

    fn trim(&mut self) {
        while self.0.last().is_some_and(|c| c.is_zero()) {
            self.0.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn deg(&self) -> isize {
        self.0.len() as isize - 1
    }

    fn lead(&self) -> &BigRational {
        self.0.last().expect("zero polynomial")
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.0.len().max(o.0.len());
        let mut v = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.0.get(i).cloned().unwrap_or_else(BigRational::zero);
            let b = o.0.get(i).cloned().unwrap_or_else(BigRational::zero);
            v.push(a + b);
        }
        let mut p = UPoly(v);
        p.trim();
        p
    }

    pub fn neg(&self) -> Self {
        UPoly(self.0.iter().map(|c| -c).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut v = vec![BigRational::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.0.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        let mut p = UPoly(v);
        p.trim();
        p
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut p = UPoly(self.0.iter().map(|x| x * c).collect());
        p.trim();
        p
    }

    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let mut r = self.clone();
        if r.deg() < d.deg() {
            return (Self::zero(), r);
        }
        let dl = d.lead().clone();
        let dd = d.0.len() - 1;
        let mut qv = vec![BigRational::zero(); r.0.len() - dd];
        while !r.is_zero() && r.deg() >= d.deg() {
            let k = r.0.len() - 1 - dd;
            let c = r.lead() / &dl;
            for (i, b) in d.0.iter().enumerate() {
                let t = &c * b;
                r.0[k + i] -= t;
            }
            qv[k] = c;
            r.trim();
        }
        let mut qp = UPoly(qv);
        qp.trim();
        (qp, r)
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let l = self.lead().clone();
        self.scale(&(BigRational::one() / l))
    }

    pub fn gcd(a: &Self, b: &Self) -> Self {
        let (mut x, mut y) = (a.clone(), b.clone());
        while !y.is_zero() {
            let (_, r) = x.divrem(&y);
            x = y;
            y = r;
        }
        x.monic()
    }

    fn low_zeros(&self) -> usize {
        self.0.iter().take_while(|c| c.is_zero()).count()
    }
}

/// Element of Q(t) in lowest terms with monic denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatFunc {
    num: UPoly,
    den: UPoly,
}

impl RatFunc {
    pub fn zero() -> Self {
        RatFunc { num: UPoly::zero(), den: UPoly::constant(BigRational::one()) }
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        RatFunc { num: UPoly::constant(br(n)), den: UPoly::constant(BigRational::one()) }
    }

    /// `c * t^k` for any integer `k`.
    pub fn monomial(c: i64, k: i64) -> Self {
        if k >= 0 {
            Self::new(UPoly::monomial(k as usize).scale(&br(c)), UPoly::constant(BigRational::one()))
        } else {
            Self::new(UPoly::constant(br(c)), UPoly::monomial((-k) as usize))
        }
    }

    pub fn new(num: UPoly, den: UPoly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return Self::zero();
        }
        let g = UPoly::gcd(&num, &den);
        let (n, _) = num.divrem(&g);
        let (d, _) = den.divrem(&g);
        let l = d.0.last().unwrap().clone();
        let inv = BigRational::one() / l;
        RatFunc { num: n.scale(&inv), den: d.scale(&inv) }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.den == o.den {
            return Self::new(self.num.add(&o.num), self.den.clone());
        }
        Self::new(self.num.mul(&o.den).add(&o.num.mul(&self.den)), self.den.mul(&o.den))
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        RatFunc { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        Self::new(self.num.mul(&o.num), self.den.mul(&o.den))
    }

    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero");
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, o: &Self) -> Self {
        self.mul(&o.inv())
    }

    /// If this is an integral Laurent polynomial in `t`, returns its terms
    /// as `(exponent, coefficient)`.
    pub fn as_laurent(&self) -> Option<Vec<(i64, i64)>> {
        let shift = self.den.low_zeros();
        if self.den.0.len() != shift + 1 {
            return None;
        }
        let mut out = Vec::new();
        for (i, c) in self.num.0.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !c.is_integer() {
                return None;
            }
            out.push((i as i64 - shift as i64, c.to_integer().to_i64()?));
        }
        Some(out)
    }

    pub fn is_integral_laurent(&self) -> bool {
        self.as_laurent().is_some()
    }

    pub fn abs_size(&self) -> usize {
        self.num.0.len() + self.den.0.len()
    }

    /// `±t^k`, the units of the coefficient ring.
    pub fn is_unit_monomial(&self) -> bool {
        matches!(self.as_laurent().as_deref(), Some([(_, c)]) if c.abs() == 1)
    }
}

/// Identification of the non-A coordinate of a ring with a power of `t`.
#[derive(Clone, Debug)]
pub struct TParam {
    pub ring: RingRef,
    pub index: Option<usize>,
    pub denom: i64,
}

impl TParam {
    /// At most one coordinate outside A may appear; `denom` is chosen so
    /// every exponent used by `polys` becomes an integer power of `t`.
    pub fn for_polys<'a>(ring: &RingRef, polys: impl IntoIterator<Item = &'a LaurentPoly>) -> Result<Self> {
        let non_a = ring.non_a_indices();
        let mut used: Option<usize> = None;
        let mut exps: Vec<Q> = Vec::new();
        for p in polys {
            for w in p.terms().keys() {
                for &i in &non_a {
                    if !w.0[i].is_zero() {
                        if used.is_some_and(|u| u != i) {
                            return Err(Error::Unsupported(
                                "coefficients in more than one equivariant parameter outside A".into(),
                            ));
                        }
                        used = Some(i);
                        exps.push(w.0[i]);
                    }
                }
            }
        }
        Ok(TParam { ring: ring.clone(), index: used, denom: lcm_denoms(exps.iter()) })
    }

    /// Converts an A-free polynomial to Q(t).
    pub fn to_rat(&self, p: &LaurentPoly) -> RatFunc {
        let mut acc = RatFunc::zero();
        for (w, c) in p.terms() {
            let k = match self.index {
                Some(i) => {
                    let e = w.0[i] * Q::from_integer(self.denom);
                    assert!(e.is_integer(), "exponent outside the t-lattice");
                    e.to_integer()
                }
                None => 0,
            };
            acc = acc.add(&RatFunc::monomial(*c, k));
        }
        acc
    }

    /// Pulls an element of Q(t) back to an A-free Laurent polynomial times `a^shift`.
    pub fn from_rat(&self, r: &RatFunc, shift: &Weight) -> Option<LaurentPoly> {
        let terms = r.as_laurent()?;
        let mut p = LaurentPoly::zero(&self.ring);
        for (k, c) in terms {
            let mut w = shift.clone();
            match self.index {
                Some(i) => w.0[i] += Q::new(k, self.denom),
                None if k != 0 => return None,
                None => {}
            }
            p.add_term(w, c);
        }
        Some(p)
    }
}
