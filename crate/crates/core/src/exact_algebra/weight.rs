use std::cmp::Ordering;
use std::fmt::Write as _;
use std::sync::Arc;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar used for exponents, slopes and polytope coordinates.
pub type Q = Ratio<i64>;

pub fn q(n: i64) -> Q {
    Q::from_integer(n)
}

pub fn qr(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

/// Parses `3`, `-2/5`, `+1/2`.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let s = s.strip_prefix('+').unwrap_or(s);
    let bad = || Error::Parse(format!("cannot parse rational '{s}'"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: i64 = n.trim().parse().map_err(|_| bad())?;
            let d: i64 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
        None => Ok(q(s.parse().map_err(|_| bad())?)),
    }
}

pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn lcm_denoms<'a>(it: impl IntoIterator<Item = &'a Q>) -> i64 {
    it.into_iter().fold(1i64, |acc, x| acc.lcm(x.denom()))
}

/// A character of the ambient torus, as a vector of rational exponents.
///
/// Ordering is graded lexicographic: total degree first, then coordinates
/// left to right.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Weight(pub Vec<Q>);

impl Weight {
    pub fn zero(n: usize) -> Self {
        Weight(vec![Q::zero(); n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut w = Self::zero(n);
        w.0[i] = Q::one();
        w
    }

    pub fn from_ints(v: &[i64]) -> Self {
        Weight(v.iter().map(|&x| q(x)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|x| x.is_zero())
    }

    pub fn degree(&self) -> Q {
        self.0.iter().fold(Q::zero(), |a, b| a + b)
    }

    pub fn add(&self, o: &Weight) -> Weight {
        Weight(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, o: &Weight) -> Weight {
        Weight(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> Weight {
        Weight(self.0.iter().map(|a| -a).collect())
    }

    pub fn scale(&self, c: Q) -> Weight {
        Weight(self.0.iter().map(|a| a * c).collect())
    }

    pub fn pair(&self, sigma: &[i64]) -> Q {
        self.0.iter().zip(sigma).fold(Q::zero(), |acc, (a, &s)| acc + a * q(s))
    }

    pub fn is_integral(&self) -> bool {
        self.0.iter().all(|x| x.is_integer())
    }

    pub fn select(&self, idx: &[usize]) -> Vec<Q> {
        idx.iter().map(|&i| self.0[i]).collect()
    }
}

impl Ord for Weight {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Weight {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Named torus coordinates, with the subset spanning the subtorus A marked.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ring {
    names: Vec<String>,
    in_a: Vec<bool>,
}

pub type RingRef = Arc<Ring>;

impl Ring {
    pub fn new(names: &[&str], a_names: &[&str]) -> Result<RingRef> {
        let names: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        let a: Vec<String> = a_names.iter().map(|s| s.to_string()).collect();
        Self::from_strings(names, a)
    }

    pub fn from_strings(names: Vec<String>, a_names: Vec<String>) -> Result<RingRef> {
        for (i, n) in names.iter().enumerate() {
            if !is_ident(n) {
                return Err(Error::Parse(format!("bad coordinate name '{n}'")));
            }
            if names[..i].contains(n) {
                return Err(Error::Parse(format!("duplicate coordinate '{n}'")));
            }
        }
        for a in &a_names {
            if !names.contains(a) {
                return Err(Error::Parse(format!("A-coordinate '{a}' is not a torus coordinate")));
            }
        }
        let in_a = names.iter().map(|n| a_names.contains(n)).collect();
        Ok(Arc::new(Ring { names, in_a }))
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn is_a(&self, i: usize) -> bool {
        self.in_a[i]
    }

    pub fn a_indices(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.in_a[i]).collect()
    }

    pub fn non_a_indices(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&i| !self.in_a[i]).collect()
    }

    pub fn a_part(&self, w: &Weight) -> Vec<Q> {
        w.select(&self.a_indices())
    }

    /// The weight with its A-components kept and everything else zeroed.
    pub fn a_weight(&self, w: &Weight) -> Weight {
        Weight(
            w.0.iter()
                .enumerate()
                .map(|(i, x)| if self.in_a[i] { *x } else { Q::zero() })
                .collect(),
        )
    }

    pub fn vanishes_on_a(&self, w: &Weight) -> bool {
        self.a_indices().iter().all(|&i| w.0[i].is_zero())
    }

    pub fn var(&self, name: &str) -> Result<Weight> {
        let i = self
            .index(name)
            .ok_or_else(|| Error::Parse(format!("unknown coordinate '{name}'")))?;
        Ok(Weight::unit(self.dim(), i))
    }

    /// `a1^2*h^-1/2`; the trivial character prints as `1`.
    pub fn fmt_monomial(&self, w: &Weight) -> String {
        let mut out = String::new();
        for (i, e) in w.0.iter().enumerate() {
            if e.is_zero() {
                continue;
            }
            if !out.is_empty() {
                out.push('*');
            }
            out.push_str(&self.names[i]);
            if !e.is_one() {
                let _ = write!(out, "^{}", fmt_q(e));
            }
        }
        if out.is_empty() {
            out.push('1');
        }
        out
    }
}

fn is_ident(s: &str) -> bool {
    let mut ch = s.chars();
    matches!(ch.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && ch.all(|c| c.is_ascii_alphanumeric() || c == '_')
}
