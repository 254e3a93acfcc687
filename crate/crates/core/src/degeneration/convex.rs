use num_integer::Integer;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact_algebra::{fmt_q, q, Q};
use crate::lattice_geometry::linalg;

/// `q(x) = x⌊x⌋ − ½⌊x⌋(⌊x⌋+1)`: convex, piecewise linear with slope `k` on
/// `[k, k+1]`, zero on `[0, 1]`.
pub fn qfun(x: Q) -> Q {
    let f = x.floor();
    x * f - f * (f + q(1)) / q(2)
}

/// `max_x (αx − q(x))`. The maximum is attained at the integer `k` with
/// `α ∈ [k−1, k]`, so a window of three integers around `α` suffices.
pub fn legendre_qfun(alpha: Q) -> Q {
    let c = alpha.ceil();
    [c - q(1), c, c + q(1)].into_iter().map(|k| alpha * k - qfun(k)).max().expect("nonempty")
}

/// `Σ m_i q(μ_i(x)) + λ(x)` on `a = Q^r`, with integral weights `μ_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodicConvexFunction {
    vars: Vec<String>,
    weights: Vec<Vec<i64>>,
    mult: Vec<i64>,
    shift: Vec<Q>,
}

impl PeriodicConvexFunction {
    /// Repeated weights are merged by adding multiplicities.
    pub fn new(vars: Vec<String>, weights: &[(Vec<i64>, i64)], shift: Vec<Q>) -> Result<Self> {
        let r = vars.len();
        if r == 0 {
            return Err(Error::Invalid("at least one coordinate is required".into()));
        }
        if shift.len() != r {
            return Err(Error::Invalid(format!("shift has {} entries, expected {r}", shift.len())));
        }
        let mut ws: Vec<Vec<i64>> = Vec::new();
        let mut mult: Vec<i64> = Vec::new();
        for (w, m) in weights {
            if w.len() != r {
                return Err(Error::Invalid(format!("weight {w:?} has the wrong length")));
            }
            if w.iter().all(|x| *x == 0) {
                return Err(Error::Invalid("zero weight".into()));
            }
            if *m <= 0 {
                return Err(Error::Invalid(format!("multiplicity {m} is not positive")));
            }
            match ws.iter().position(|x| x == w) {
                Some(k) => mult[k] += m,
                None => {
                    ws.push(w.clone());
                    mult.push(*m);
                }
            }
        }
        Ok(PeriodicConvexFunction { vars, weights: ws, mult, shift })
    }

    /// Parses a comma-separated list of integral linear forms such as
    /// `"2x, y, x-y"`. Coordinates are ordered by first appearance.
    pub fn parse(src: &str) -> Result<Self> {
        let (vars, forms) = parse_linear_forms(src, None)?;
        let r = vars.len();
        Self::new(vars, &forms.into_iter().map(|w| (w, 1)).collect::<Vec<_>>(), vec![Q::zero(); r])
    }

    pub fn with_shift(mut self, shift: Vec<Q>) -> Result<Self> {
        if shift.len() != self.rank() {
            return Err(Error::Invalid(format!("shift has {} entries, expected {}", shift.len(), self.rank())));
        }
        self.shift = shift;
        Ok(self)
    }

    pub fn rank(&self) -> usize {
        self.vars.len()
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn weights(&self) -> &[Vec<i64>] {
        &self.weights
    }

    pub fn multiplicities(&self) -> &[i64] {
        &self.mult
    }

    pub fn shift(&self) -> &[Q] {
        &self.shift
    }

    pub fn pair(w: &[i64], x: &[Q]) -> Q {
        linalg::dot_i(w, x)
    }

    pub fn eval(&self, x: &[Q]) -> Q {
        let mut s = linalg::dot(&self.shift, x);
        for (w, m) in self.weights.iter().zip(&self.mult) {
            s += q(*m) * qfun(Self::pair(w, x));
        }
        s
    }

    /// Matrix of `σ ↦ σ^∨`, i.e. of the quadratic form `Σ m_i μ_i²`.
    pub fn gram_matrix(&self) -> Result<Vec<Vec<i64>>> {
        let pairs: Vec<(Vec<i64>, i64)> = self.weights.iter().cloned().zip(self.mult.iter().copied()).collect();
        gram_matrix(self.rank(), &pairs)
    }

    pub fn sigma_dual(&self, sigma: &[i64]) -> Result<Vec<i64>> {
        let g = self.gram_matrix()?;
        Ok(g.iter().map(|row| row.iter().zip(sigma).map(|(a, b)| a * b).sum()).collect())
    }

    pub fn fmt_weight(&self, w: &[i64]) -> String {
        fmt_linear_form(&self.vars, w)
    }

    pub fn describe(&self) -> String {
        let mut parts: Vec<String> = self
            .weights
            .iter()
            .zip(&self.mult)
            .map(|(w, m)| if *m == 1 { format!("q({})", self.fmt_weight(w)) } else { format!("{m} q({})", self.fmt_weight(w)) })
            .collect();
        if self.shift.iter().any(|x| !x.is_zero()) {
            parts.push(format!("<({}), x>", self.shift.iter().map(fmt_q).collect::<Vec<_>>().join(", ")));
        }
        parts.join(" + ")
    }
}

pub fn gram_matrix(rank: usize, weights: &[(Vec<i64>, i64)]) -> Result<Vec<Vec<i64>>> {
    let mut g = vec![vec![0i64; rank]; rank];
    for (w, m) in weights {
        if w.len() != rank {
            return Err(Error::Invalid(format!("weight {w:?} has the wrong length")));
        }
        for i in 0..rank {
            for j in 0..rank {
                g[i][j] += m * w[i] * w[j];
            }
        }
    }
    let rows: Vec<Vec<Q>> = weights.iter().map(|(w, _)| w.iter().map(|&x| q(x)).collect()).collect();
    if linalg::rank(&rows) < rank {
        return Err(Error::DegenerateQ(format!("the weights span a space of dimension {} < {rank}", linalg::rank(&rows))));
    }
    Ok(g)
}

pub fn fmt_linear_form(vars: &[String], w: &[i64]) -> String {
    let mut s = String::new();
    for (v, &c) in vars.iter().zip(w) {
        if c == 0 {
            continue;
        }
        let sign = if c < 0 { "-" } else if s.is_empty() { "" } else { "+" };
        let mag = c.abs();
        if mag == 1 {
            s.push_str(&format!("{sign}{v}"));
        } else {
            s.push_str(&format!("{sign}{mag}{v}"));
        }
    }
    if s.is_empty() {
        "0".into()
    } else {
        s
    }
}

/// Parses `"2x, y, x-y"`-style lists. With `vars` given, unknown names are
/// rejected; otherwise coordinates are collected in order of appearance.
pub fn parse_linear_forms(src: &str, vars: Option<&[String]>) -> Result<(Vec<String>, Vec<Vec<i64>>)> {
    let mut names: Vec<String> = vars.map(|v| v.to_vec()).unwrap_or_default();
    let mut raw: Vec<Vec<(String, i64)>> = Vec::new();
    for item in src.split(',') {
        let item: String = item.chars().filter(|c| !c.is_whitespace()).collect();
        if item.is_empty() {
            return Err(Error::Parse(format!("empty linear form in {src:?}")));
        }
        raw.push(parse_one_form(&item)?);
        for (v, _) in raw.last().expect("just pushed") {
            if !names.contains(v) {
                if vars.is_some() {
                    return Err(Error::Parse(format!("unknown coordinate {v:?}")));
                }
                names.push(v.clone());
            }
        }
    }
    let forms = raw
        .into_iter()
        .map(|terms| {
            let mut w = vec![0i64; names.len()];
            for (v, c) in terms {
                let k = names.iter().position(|n| *n == v).expect("collected");
                w[k] += c;
            }
            w
        })
        .collect();
    Ok((names, forms))
}

fn parse_one_form(s: &str) -> Result<Vec<(String, i64)>> {
    let bytes: Vec<char> = s.chars().collect();
    let mut i = 0;
    let mut out = Vec::new();
    while i < bytes.len() {
        let mut sign = 1i64;
        if bytes[i] == '+' || bytes[i] == '-' {
            if bytes[i] == '-' {
                sign = -1;
            }
            i += 1;
        } else if !out.is_empty() {
            return Err(Error::Parse(format!("expected '+' or '-' in {s:?}")));
        }
        let start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        let coeff: i64 = if i > start {
            bytes[start..i].iter().collect::<String>().parse().map_err(|_| Error::Parse(format!("bad coefficient in {s:?}")))?
        } else {
            1
        };
        if i < bytes.len() && bytes[i] == '*' {
            i += 1;
        }
        let vstart = i;
        if i >= bytes.len() || !bytes[i].is_ascii_alphabetic() {
            return Err(Error::Parse(format!("expected a coordinate name in {s:?}")));
        }
        while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == '_') {
            i += 1;
        }
        out.push((bytes[vstart..i].iter().collect(), sign * coeff));
    }
    Ok(out)
}

/// Row Hermite normal form of the lattice spanned by `gens`; zero rows dropped.
pub fn hnf(gens: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let Some(n) = gens.first().map(Vec::len) else { return Vec::new() };
    let mut rows: Vec<Vec<i64>> = gens.iter().filter(|r| r.iter().any(|x| *x != 0)).cloned().collect();
    let mut out: Vec<Vec<i64>> = Vec::new();
    for col in 0..n {
        loop {
            let nz: Vec<usize> = (0..rows.len()).filter(|&k| rows[k][col] != 0).collect();
            if nz.len() <= 1 {
                break;
            }
            let piv = *nz.iter().min_by_key(|&&k| rows[k][col].abs()).expect("nonempty");
            let p = rows[piv].clone();
            for &k in &nz {
                if k != piv {
                    let f = Integer::div_floor(&rows[k][col], &p[col]);
                    for (x, y) in rows[k].iter_mut().zip(&p) {
                        *x -= f * y;
                    }
                }
            }
        }
        if let Some(k) = (0..rows.len()).find(|&k| rows[k][col] != 0) {
            let mut r = rows.remove(k);
            if r[col] < 0 {
                r.iter_mut().for_each(|x| *x = -*x);
            }
            for o in out.iter_mut() {
                let f = Integer::div_floor(&o[col], &r[col]);
                for (x, y) in o.iter_mut().zip(&r) {
                    *x -= f * y;
                }
            }
            out.push(r);
        }
        rows.retain(|r| r.iter().any(|x| *x != 0));
    }
    out
}

/// Membership of an integer vector in the lattice with HNF basis `basis`.
pub fn lattice_contains(basis: &[Vec<i64>], v: &[i64]) -> bool {
    let mut v = v.to_vec();
    for b in basis {
        let col = b.iter().position(|x| *x != 0).expect("nonzero row");
        if v[col] % b[col] != 0 {
            return false;
        }
        let f = v[col] / b[col];
        for (x, y) in v.iter_mut().zip(b) {
            *x -= f * y;
        }
    }
    v.iter().all(|x| *x == 0)
}

/// Coordinates of `v` in the (rational) row basis `basis`, if integral.
pub fn coords_in(basis: &[Vec<i64>], v: &[i64]) -> Option<Vec<i64>> {
    let k = basis.len();
    let n = v.len();
    // solve c * B = v over Q via the augmented transposed system
    let mut m: Vec<Vec<Q>> = (0..n).map(|j| (0..k).map(|i| q(basis[i][j])).chain([q(v[j])]).collect()).collect();
    let piv = linalg::rref(&mut m);
    if piv.contains(&k) {
        return None;
    }
    let mut c = vec![Q::zero(); k];
    for (r, &p) in piv.iter().enumerate() {
        c[p] = m[r][k];
    }
    let check: Vec<Q> = (0..n).map(|j| (0..k).map(|i| c[i] * q(basis[i][j])).sum()).collect();
    if check.iter().zip(v).any(|(a, b)| *a != q(*b)) || c.iter().any(|x| !x.is_integer()) {
        return None;
    }
    Some(c.iter().map(|x| x.to_integer()).collect())
}

pub(crate) fn frac(x: Q) -> Q {
    x - x.floor()
}

pub(crate) fn is_int(x: &Q) -> bool {
    x.is_integer()
}
