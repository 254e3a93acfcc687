use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact_algebra::{Q, RingRef, Weight};

/// A chamber of the real cocharacter space of A, given by a generic
/// integral cocharacter `sigma` indexed by the A-coordinates. A weight `w`
/// is attracting when `a^w -> 0` along `sigma`, i.e. `<w, sigma> > 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chamber {
    pub sigma: Vec<i64>,
    pub defining: Vec<Weight>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Attracting,
    Repelling,
    Fixed,
}

impl Chamber {
    pub fn new(sigma: Vec<i64>) -> Self {
        Chamber { sigma, defining: Vec::new() }
    }

    /// `(n, n-1, ..., 1)`: makes `a_i/a_j -> 0` for `i < j`.
    pub fn standard(n: usize) -> Self {
        Self::new((1..=n as i64).rev().collect())
    }

    pub fn opposite(&self) -> Self {
        Chamber {
            sigma: self.sigma.iter().map(|s| -s).collect(),
            defining: self.defining.clone(),
        }
    }

    /// Chamber from a permutation `p`: coordinate `p[k]` gets the k-th largest value.
    pub fn from_permutation(perm: &[usize]) -> Self {
        let n = perm.len();
        let mut sigma = vec![0i64; n];
        for (k, &i) in perm.iter().enumerate() {
            sigma[i] = (n - k) as i64;
        }
        Self::new(sigma)
    }

    pub fn pairing(&self, ring: &RingRef, w: &Weight) -> Q {
        ring.a_indices()
            .iter()
            .zip(&self.sigma)
            .fold(Q::zero(), |acc, (&i, &s)| acc + w.0[i] * Q::from_integer(s))
    }

    pub fn side(&self, ring: &RingRef, w: &Weight) -> Result<Side> {
        if ring.vanishes_on_a(w) {
            return Ok(Side::Fixed);
        }
        let p = self.pairing(ring, w);
        if p > Q::zero() {
            Ok(Side::Attracting)
        } else if p < Q::zero() {
            Ok(Side::Repelling)
        } else {
            Err(Error::NonGenericChamber(ring.fmt_monomial(w)))
        }
    }

    /// Checks that `sigma` has the right length and is generic for the defining weights.
    pub fn validate(&self, ring: &RingRef) -> Result<()> {
        if self.sigma.len() != ring.a_indices().len() {
            return Err(Error::Invalid(format!(
                "chamber has {} entries but A has rank {}",
                self.sigma.len(),
                ring.a_indices().len()
            )));
        }
        for w in &self.defining {
            self.side(ring, w)?;
        }
        Ok(())
    }
}

/// Multisets of attracting, repelling and A-fixed weights.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Split {
    pub attracting: Vec<Weight>,
    pub repelling: Vec<Weight>,
    pub fixed: Vec<Weight>,
}

pub fn chamber_split(ring: &RingRef, weights: &[Weight], c: &Chamber) -> Result<Split> {
    let mut s = Split::default();
    for w in weights {
        match c.side(ring, w)? {
            Side::Attracting => s.attracting.push(w.clone()),
            Side::Repelling => s.repelling.push(w.clone()),
            Side::Fixed => s.fixed.push(w.clone()),
        }
    }
    Ok(s)
}

/// A partial order on `0..n` stored as its transitive closure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialOrder {
    less: Vec<Vec<bool>>,
}

impl PartialOrder {
    /// Transitive closure of the relations `lo < hi`.
    pub fn from_relations(n: usize, rel: &[(usize, usize)]) -> Result<Self> {
        let mut less = vec![vec![false; n]; n];
        for &(lo, hi) in rel {
            less[lo][hi] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if less[i][k] {
                    for j in 0..n {
                        if less[k][j] {
                            less[i][j] = true;
                        }
                    }
                }
            }
        }
        if (0..n).any(|i| less[i][i]) {
            return Err(Error::Invalid("attracting edges form a cycle".into()));
        }
        Ok(PartialOrder { less })
    }

    pub fn len(&self) -> usize {
        self.less.len()
    }

    pub fn is_empty(&self) -> bool {
        self.less.is_empty()
    }

    pub fn less(&self, a: usize, b: usize) -> bool {
        self.less[a][b]
    }

    pub fn le(&self, a: usize, b: usize) -> bool {
        a == b || self.less[a][b]
    }

    pub fn comparable(&self, a: usize, b: usize) -> bool {
        self.le(a, b) || self.le(b, a)
    }

    pub fn reversed(&self) -> Self {
        let n = self.len();
        PartialOrder { less: (0..n).map(|i| (0..n).map(|j| self.less[j][i]).collect()).collect() }
    }

    /// Linear extension, increasing; ties broken by `key` then index.
    pub fn refine_by<K: Ord>(&self, key: impl Fn(usize) -> K) -> Vec<usize> {
        let n = self.len();
        let mut done = vec![false; n];
        let mut out = Vec::with_capacity(n);
        while out.len() < n {
            let next = (0..n)
                .filter(|&i| !done[i] && (0..n).all(|j| done[j] || !self.less[j][i]))
                .min_by(|&a, &b| key(a).cmp(&key(b)).then(a.cmp(&b)))
                .expect("acyclic order has a minimal element");
            done[next] = true;
            out.push(next);
        }
        out
    }

    /// True when `order` (increasing) is a linear extension.
    pub fn is_extension(&self, order: &[usize]) -> bool {
        let n = self.len();
        if order.len() != n {
            return false;
        }
        let mut pos = vec![usize::MAX; n];
        for (k, &i) in order.iter().enumerate() {
            if i >= n || pos[i] != usize::MAX {
                return false;
            }
            pos[i] = k;
        }
        (0..n).all(|a| (0..n).all(|b| !self.less[a][b] || pos[a] < pos[b]))
    }

    /// All linear extensions (small n only).
    pub fn linear_extensions(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut out = Vec::new();
        let mut cur = Vec::new();
        let mut used = vec![false; n];
        self.ext_rec(&mut cur, &mut used, &mut out);
        out
    }

    fn ext_rec(&self, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        let n = self.len();
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in 0..n {
            if !used[i] && (0..n).all(|j| used[j] || !self.less[j][i]) {
                used[i] = true;
                cur.push(i);
                self.ext_rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
}

/// Edge `(a, b, w)` with `w` the tangent weight at `a` pointing to `b`.
pub struct OrderEdge<'a> {
    pub a: usize,
    pub b: usize,
    pub weight: &'a Weight,
}

/// Order generated by attracting edges: if `w` attracts at `a` then `b < a`.
/// Validated against the ample weights: along every such edge the ample
/// weight difference `L_a - L_b` must pair positively with `sigma`.
pub fn ample_order(
    ring: &RingRef,
    n: usize,
    edges: &[OrderEdge<'_>],
    ample: &[Weight],
    names: &[String],
    c: &Chamber,
) -> Result<PartialOrder> {
    let mut rel = Vec::new();
    for e in edges {
        let (lo, hi) = match c.side(ring, e.weight)? {
            Side::Attracting => (e.b, e.a),
            Side::Repelling => (e.a, e.b),
            Side::Fixed => {
                return Err(Error::NotGkm(format!(
                    "edge {}-{} has an A-fixed weight",
                    names[e.a], names[e.b]
                )))
            }
        };
        let diff = ample[hi].sub(&ample[lo]);
        if c.pairing(ring, &diff) <= Q::zero() {
            return Err(Error::NonAmple(format!("{}-{}", names[lo], names[hi])));
        }
        rel.push((lo, hi));
    }
    PartialOrder::from_relations(n, &rel)
}
