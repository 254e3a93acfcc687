//! Text syntax for characters and Laurent polynomials.
//!
//! Accepted forms include `a2/a1`, `a1/(h*a2)`, `a1^-1`, `h^-1/2`,
//! `1 - a1*a2^-1`, `-3*h^1/2*a1 + 2`. An exponent written `p/q` directly after
//! `^` is read as a single rational.

use num_traits::{One, Zero};

use super::laurent::LaurentPoly;
use super::weight::{q, Q, RingRef, Weight};
use crate::error::{Error, Result};

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    ring: &'a RingRef,
    src: &'a str,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Parse(format!("{msg} at offset {} in '{}'", self.pos, self.src)))
    }

    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.pos).copied()
    }

    fn digits(&mut self) -> Option<i64> {
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        std::str::from_utf8(&self.s[start..self.pos]).ok()?.parse().ok()
    }

    fn expr(&mut self) -> Result<LaurentPoly> {
        let mut acc = LaurentPoly::zero(self.ring);
        let mut first = true;
        loop {
            let sign = match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    1
                }
                Some(b'-') => {
                    self.pos += 1;
                    -1
                }
                _ if first => 1,
                _ => break,
            };
            first = false;
            let t = self.term()?;
            acc = if sign > 0 { acc.add(&t) } else { acc.sub(&t) };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<LaurentPoly> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    let f = self.power()?;
                    acc = acc.mul(&f);
                }
                Some(b'/') => {
                    self.pos += 1;
                    let f = self.power()?;
                    let Some(inv) = f.unit_inverse() else {
                        return self.err("division by a non-monomial");
                    };
                    acc = acc.mul(&inv);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn exponent(&mut self) -> Result<Q> {
        self.ws();
        if self.peek() == Some(b'(') {
            self.pos += 1;
            let e = self.exponent()?;
            if self.peek() != Some(b')') {
                return self.err("expected ')'");
            }
            self.pos += 1;
            return Ok(e);
        }
        let mut sign = 1;
        match self.s.get(self.pos) {
            Some(b'-') => {
                sign = -1;
                self.pos += 1;
            }
            Some(b'+') => self.pos += 1,
            _ => {}
        }
        let Some(n) = self.digits() else {
            return self.err("expected exponent");
        };
        let mut e = q(sign * n);
        if self.s.get(self.pos) == Some(&b'/')
            && self.s.get(self.pos + 1).is_some_and(|c| c.is_ascii_digit())
        {
            self.pos += 1;
            let d = self.digits().unwrap();
            if d == 0 {
                return self.err("zero denominator");
            }
            e = Q::new(sign * n, d);
        }
        Ok(e)
    }

    fn power(&mut self) -> Result<LaurentPoly> {
        let base = self.atom()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        let e = self.exponent()?;
        if let Some((c, w)) = base.as_monomial() {
            if c == 1 {
                return Ok(LaurentPoly::monomial(self.ring, w.scale(e)));
            }
            if c == -1 && e.is_integer() {
                let sign = if e.to_integer() % 2 == 0 { 1 } else { -1 };
                return Ok(LaurentPoly::term(self.ring, sign, w.scale(e)));
            }
        }
        if e.is_integer() && e >= Q::zero() {
            return Ok(base.pow(e.to_integer() as u32));
        }
        if e.is_integer() {
            if let Some(inv) = base.unit_inverse() {
                return Ok(inv.pow((-e.to_integer()) as u32));
            }
        }
        self.err("unsupported power")
    }

    fn atom(&mut self) -> Result<LaurentPoly> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return self.err("expected ')'");
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.digits().unwrap();
                Ok(LaurentPoly::constant(self.ring, n))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.s.len()
                    && (self.s[self.pos].is_ascii_alphanumeric() || self.s[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
                let w = self.ring.var(name)?;
                Ok(LaurentPoly::monomial(self.ring, w))
            }
            _ => self.err("unexpected token"),
        }
    }
}

pub fn parse_poly(ring: &RingRef, src: &str) -> Result<LaurentPoly> {
    let mut p = Parser { s: src.as_bytes(), pos: 0, ring, src };
    if p.peek().is_none() {
        return Err(Error::Parse("empty expression".into()));
    }
    let r = p.expr()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(r)
}

/// Parses a single character such as `a1/(h*a2)`; the coefficient must be 1.
pub fn parse_weight(ring: &RingRef, src: &str) -> Result<Weight> {
    let p = parse_poly(ring, src)?;
    match p.as_monomial() {
        Some((c, w)) if c.is_one() => Ok(w.clone()),
        _ => Err(Error::Parse(format!("'{src}' is not a character"))),
    }
}
