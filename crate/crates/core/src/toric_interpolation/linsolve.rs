//! Gaussian elimination over Q(t) with a caller-chosen pivot column order.

use crate::exact_algebra::RatFunc;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PivotOrder {
    Natural,
    Reversed,
    /// Explicit column priority; must be a permutation of the unknowns.
    Custom(Vec<usize>),
}

impl PivotOrder {
    fn columns(&self, n: usize) -> Vec<usize> {
        match self {
            PivotOrder::Natural => (0..n).collect(),
            PivotOrder::Reversed => (0..n).rev().collect(),
            PivotOrder::Custom(p) => {
                assert_eq!(p.len(), n, "pivot order must permute all unknowns");
                p.clone()
            }
        }
    }
}

pub struct Solution {
    /// One solution, with every free unknown set to zero.
    pub x: Vec<RatFunc>,
    /// Basis of the homogeneous solution space.
    pub kernel: Vec<Vec<RatFunc>>,
}

/// Solves `A x = b`; `None` if inconsistent.
pub fn solve(a: &[Vec<RatFunc>], b: &[RatFunc], n: usize, order: &PivotOrder) -> Option<Solution> {
    let cols = order.columns(n);
    let mut m: Vec<Vec<RatFunc>> = a.to_vec();
    let mut rhs: Vec<RatFunc> = b.to_vec();
    let rows = m.len();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut r = 0;
    for &c in &cols {
        if r == rows {
            break;
        }
        // smallest entry as pivot keeps intermediate rational functions small
        let Some(p) = (r..rows)
            .filter(|&i| !m[i][c].is_zero())
            .min_by_key(|&i| m[i][c].abs_size())
        else {
            continue;
        };
        m.swap(r, p);
        rhs.swap(r, p);
        let inv = m[r][c].inv();
        for j in 0..n {
            if !m[r][j].is_zero() {
                m[r][j] = m[r][j].mul(&inv);
            }
        }
        rhs[r] = rhs[r].mul(&inv);
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..n {
                    if !m[r][j].is_zero() {
                        let t = m[r][j].mul(&f);
                        m[i][j] = m[i][j].sub(&t);
                    }
                }
                let t = rhs[r].mul(&f);
                rhs[i] = rhs[i].sub(&t);
            }
        }
        pivots.push((r, c));
        r += 1;
    }
    if rhs[r..].iter().any(|x| !x.is_zero()) {
        return None;
    }
    let mut x = vec![RatFunc::zero(); n];
    for &(row, c) in &pivots {
        x[c] = rhs[row].clone();
    }
    let pivot_cols: Vec<usize> = pivots.iter().map(|p| p.1).collect();
    let kernel = (0..n)
        .filter(|c| !pivot_cols.contains(c))
        .map(|free| {
            let mut v = vec![RatFunc::zero(); n];
            v[free] = RatFunc::one();
            for &(row, c) in &pivots {
                v[c] = m[row][free].neg();
            }
            v
        })
        .collect();
    Some(Solution { x, kernel })
}
