use std::collections::BTreeMap;

use num_traits::Zero;

use super::weight::{q, RingRef, Weight, Q};

/// Formal integer combination of characters, standing for `Θ(Σ n_μ a^μ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaClass {
    ring: RingRef,
    terms: BTreeMap<Weight, i64>,
}

impl ThetaClass {
    pub fn zero(ring: &RingRef) -> Self {
        ThetaClass { ring: ring.clone(), terms: BTreeMap::new() }
    }

    pub fn from_weights(ring: &RingRef, ws: &[Weight]) -> Self {
        let mut c = Self::zero(ring);
        for w in ws {
            c.add_weight(w.clone(), 1);
        }
        c
    }

    pub fn ring(&self) -> &RingRef {
        &self.ring
    }

    pub fn terms(&self) -> &BTreeMap<Weight, i64> {
        &self.terms
    }

    pub fn add_weight(&mut self, w: Weight, n: i64) {
        let e = self.terms.entry(w.clone()).or_insert(0);
        *e += n;
        if *e == 0 {
            self.terms.remove(&w);
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (w, n) in &o.terms {
            r.add_weight(w.clone(), *n);
        }
        r
    }

    pub fn neg(&self) -> Self {
        ThetaClass {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(w, n)| (w.clone(), -n)).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn dual(&self) -> Self {
        let mut r = Self::zero(&self.ring);
        for (w, n) in &self.terms {
            r.add_weight(w.neg(), *n);
        }
        r
    }

    pub fn rank(&self) -> i64 {
        self.terms.values().sum()
    }

    /// `𝒰(V, z) = Θ((z - 1)(V - rk V))`, with `z` the character `z_weight`.
    pub fn kahler(v: &ThetaClass, z_weight: &Weight) -> Self {
        let ring = v.ring.clone();
        let n = ring.dim();
        let mut r = Self::zero(&ring);
        for (w, m) in &v.terms {
            r.add_weight(w.add(z_weight), *m);
            r.add_weight(w.clone(), -m);
        }
        let rk = v.rank();
        r.add_weight(z_weight.clone(), -rk);
        r.add_weight(Weight::zero(n), rk);
        r
    }

    /// `Σ n_μ μ⊗μ` restricted to the given coordinates.
    pub fn theta_degree(&self, coords: &[usize]) -> Vec<Vec<Q>> {
        let k = coords.len();
        let mut m = vec![vec![Q::zero(); k]; k];
        for (w, n) in &self.terms {
            for (i, &ci) in coords.iter().enumerate() {
                for (j, &cj) in coords.iter().enumerate() {
                    m[i][j] += w.0[ci] * w.0[cj] * q(*n);
                }
            }
        }
        m
    }

    /// The same form pulled back along cocharacters `basis` (full coordinates).
    pub fn degree_on(&self, basis: &[Vec<i64>]) -> Vec<Vec<Q>> {
        let k = basis.len();
        let mut m = vec![vec![Q::zero(); k]; k];
        for (w, n) in &self.terms {
            let p: Vec<Q> = basis.iter().map(|b| w.pair(b)).collect();
            for i in 0..k {
                for j in 0..k {
                    m[i][j] += p[i] * p[j] * q(*n);
                }
            }
        }
        m
    }
}
