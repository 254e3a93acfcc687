use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use num_traits::Zero;
use serde_json::{json, Value};

use super::cells::{Cell, Complex};
use super::convex::{coords_in, fmt_linear_form, hnf, is_int, lattice_contains, parse_linear_forms, PeriodicConvexFunction};
use crate::error::{Error, Result};
use crate::exact_algebra::{fmt_q, q, Weight, Q};
use crate::gkm_model::GKMModel;
use crate::lattice_geometry::linalg::{self, dot_i};

/// A subgroup `Γ ⊂ A` of the inertia lattice, given by the characters
/// vanishing on it, together with the components of `X^Γ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgroup {
    pub name: String,
    /// HNF basis of `Γ^⊥`.
    pub perp: Vec<Vec<i64>>,
    /// Each component of `X^Γ` as the set of atoms it contains.
    pub components: Vec<BTreeSet<usize>>,
}

/// Inertia data for a torus action: a periodic fan, a set of atoms (pieces
/// of `X`, usually the components of `X^A`) and subgroups with the
/// components of their fixed loci expressed through atoms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InertiaData {
    pub function: PeriodicConvexFunction,
    pub atoms: Vec<String>,
    /// Weights of the bundle `V` at each atom, with multiplicities.
    pub atom_weights: Vec<Vec<(Vec<i64>, i64)>>,
    pub subgroups: Vec<Subgroup>,
}

impl InertiaData {
    pub fn new(
        function: PeriodicConvexFunction,
        atoms: Vec<String>,
        atom_weights: Option<Vec<Vec<(Vec<i64>, i64)>>>,
        subgroups: Vec<Subgroup>,
    ) -> Result<Self> {
        let r = function.rank();
        if BTreeSet::from_iter(&atoms).len() != atoms.len() {
            return Err(Error::Invalid("atom names must be distinct".into()));
        }
        let default: Vec<(Vec<i64>, i64)> =
            function.weights().iter().cloned().zip(function.multiplicities().iter().copied()).collect();
        let atom_weights = atom_weights.unwrap_or_else(|| vec![default; atoms.len()]);
        if atom_weights.len() != atoms.len() {
            return Err(Error::Invalid("one weight list per atom is required".into()));
        }
        for (a, ws) in atom_weights.iter().enumerate() {
            for (w, _) in ws {
                let neg: Vec<i64> = w.iter().map(|x| -x).collect();
                if !function.weights().iter().any(|f| *f == *w || *f == neg) {
                    return Err(Error::Invalid(format!(
                        "weight {} at {} is not a wall of the periodic fan",
                        fmt_linear_form(function.vars(), w),
                        atoms[a]
                    )));
                }
            }
        }
        let mut seen_names = BTreeSet::new();
        for g in &subgroups {
            if !seen_names.insert(&g.name) {
                return Err(Error::Invalid(format!("duplicate subgroup {}", g.name)));
            }
            if g.perp.iter().any(|p| p.len() != r) {
                return Err(Error::Invalid(format!("perp of {} has the wrong rank", g.name)));
            }
            let mut used = BTreeSet::new();
            for c in &g.components {
                if c.is_empty() || c.iter().any(|a| *a >= atoms.len()) {
                    return Err(Error::Invalid(format!("bad component in {}", g.name)));
                }
                if c.iter().any(|a| !used.insert(*a)) {
                    return Err(Error::Refinement(format!("components of X^{} overlap", g.name)));
                }
            }
        }
        let data = InertiaData { function, atoms, atom_weights, subgroups };
        for (i, small) in data.subgroups.iter().enumerate() {
            for (j, big) in data.subgroups.iter().enumerate() {
                if i == j || !data.contained(i, j) {
                    continue;
                }
                if data.contained(j, i) {
                    return Err(Error::Invalid(format!("subgroups {} and {} coincide", small.name, big.name)));
                }
                // X^big ⊂ X^small, so every component of X^big sits inside one of X^small
                for c in &big.components {
                    if !small.components.iter().any(|d| c.is_subset(d)) {
                        return Err(Error::Refinement(format!(
                            "component {} of X^{} is not contained in a component of X^{}",
                            data.fmt_atoms(c),
                            big.name,
                            small.name
                        )));
                    }
                }
            }
        }
        Ok(data)
    }

    pub fn rank(&self) -> usize {
        self.function.rank()
    }

    /// `Γ_i ⊆ Γ_j`, i.e. `Γ_j^⊥ ⊆ Γ_i^⊥`.
    pub fn contained(&self, i: usize, j: usize) -> bool {
        let (gi, gj) = (&self.subgroups[i], &self.subgroups[j]);
        gj.perp.iter().all(|v| lattice_contains(&gi.perp, v))
    }

    pub fn subgroup_dim(&self, i: usize) -> usize {
        self.rank() - self.subgroups[i].perp.len()
    }

    /// The whole torus, if listed.
    pub fn top(&self) -> Option<usize> {
        self.subgroups.iter().position(|g| g.perp.is_empty())
    }

    fn fmt_atoms(&self, c: &BTreeSet<usize>) -> String {
        format!("{{{}}}", c.iter().map(|a| self.atoms[*a].as_str()).collect::<Vec<_>>().join(", "))
    }

    /// The example with `Γ = {1, μ_2, T}` in rank one: `X` connected, `X^{μ_2}`
    /// with two components that split into two and three fixed points.
    pub fn example_mu2() -> Self {
        let f = PeriodicConvexFunction::parse("x, 2x").expect("valid");
        let atoms: Vec<String> = (1..=5).map(|k| format!("p{k}")).collect();
        let set = |v: &[usize]| v.iter().copied().collect::<BTreeSet<usize>>();
        let subgroups = vec![
            Subgroup { name: "T".into(), perp: vec![], components: (0..5).map(|k| set(&[k])).collect() },
            Subgroup { name: "mu2".into(), perp: vec![vec![2]], components: vec![set(&[0, 1]), set(&[2, 3, 4])] },
            Subgroup { name: "1".into(), perp: vec![vec![1]], components: vec![set(&[0, 1, 2, 3, 4])] },
        ];
        InertiaData::new(f, atoms, None, subgroups).expect("consistent example")
    }

    /// A free rank-one action: no fixed points, trivial inertia.
    pub fn example_free() -> Self {
        let f = PeriodicConvexFunction::parse("x").expect("valid");
        let subgroups = vec![
            Subgroup { name: "T".into(), perp: vec![], components: vec![] },
            Subgroup { name: "1".into(), perp: vec![vec![1]], components: vec![BTreeSet::from([0])] },
        ];
        InertiaData::new(f, vec!["X".into()], None, subgroups).expect("consistent example")
    }

    /// Inertia data of a GKM model with `V = TX`, in a basis of the lattice
    /// spanned by the `A`-parts of the tangent weights (rank at most two).
    pub fn from_model(model: &GKMModel) -> Result<Self> {
        let coords = ModelCoords::new(model)?;
        let r = coords.basis.len();
        let vars: Vec<String> = (1..=r).map(|k| format!("u{k}")).collect();
        let mut fan: Vec<Vec<i64>> = Vec::new();
        let mut atom_weights = Vec::new();
        for p in &model.points {
            let mut ws = Vec::new();
            for t in &p.tangent {
                let c = coords.int_coords(t)?;
                let canon = if c.iter().find(|x| **x != 0).is_some_and(|x| *x < 0) { c.iter().map(|x| -x).collect() } else { c.clone() };
                if !fan.contains(&canon) {
                    fan.push(canon);
                }
                ws.push((c, 1));
            }
            atom_weights.push(ws);
        }
        let function = PeriodicConvexFunction::new(vars, &fan.iter().map(|w| (w.clone(), 1)).collect::<Vec<_>>(), vec![Q::zero(); r])?;
        let complex = Complex::build(function.weights(), 0, 1)?;
        let mut lattices: Vec<Vec<Vec<i64>>> = vec![vec![]];
        for c in complex.fundamental() {
            let l = exp_perp(&function, &complex.cells[c]);
            if !lattices.contains(&l) {
                lattices.push(l);
            }
        }
        let edge_coords: Vec<(usize, usize, Vec<i64>)> =
            model.edges.iter().map(|e| Ok((e.a, e.b, coords.int_coords(&e.weight)?))).collect::<Result<_>>()?;
        let mut subgroups = Vec::new();
        for l in lattices {
            // components of X^Γ: fixed points joined by edges whose weight is trivial on Γ
            let mut parent: Vec<usize> = (0..model.len()).collect();
            fn find(p: &mut Vec<usize>, x: usize) -> usize {
                let mut x = x;
                while p[x] != x {
                    p[x] = p[p[x]];
                    x = p[x];
                }
                x
            }
            for (a, b, w) in &edge_coords {
                if lattice_contains(&l, w) {
                    let (ra, rb) = (find(&mut parent, *a), find(&mut parent, *b));
                    parent[ra] = rb;
                }
            }
            let mut comps: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
            for k in 0..model.len() {
                let root = find(&mut parent, k);
                comps.entry(root).or_default().insert(k);
            }
            let name = if l.is_empty() {
                "T".to_string()
            } else if l.len() == r && l.iter().enumerate().all(|(k, row)| row[k] == 1) {
                "1".to_string()
            } else {
                format!("ker({})", l.iter().map(|row| coords.fmt(row, model)).collect::<Vec<_>>().join(", "))
            };
            subgroups.push(Subgroup { name, perp: l, components: comps.into_values().collect() });
        }
        InertiaData::new(function, model.names(), Some(atom_weights), subgroups)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_json(&v)
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let schema = |p: &str, m: String| Error::Schema { pointer: p.into(), message: m };
        let strings = |p: &str, x: Option<&Value>| -> Result<Vec<String>> {
            x.and_then(Value::as_array)
                .ok_or_else(|| schema(p, "expected an array of strings".into()))?
                .iter()
                .enumerate()
                .map(|(k, s)| s.as_str().map(str::to_string).ok_or_else(|| schema(&format!("{p}/{k}"), "expected a string".into())))
                .collect()
        };
        let weights = strings("/weights", v.get("weights"))?;
        let given_vars = match v.get("coordinates") {
            Some(c) => Some(strings("/coordinates", Some(c))?),
            None => None,
        };
        let (vars, forms) = parse_linear_forms(&weights.join(","), given_vars.as_deref()).map_err(|e| schema("/weights", e.to_string()))?;
        let r = vars.len();
        let shift = match v.get("shift") {
            Some(s) => strings("/shift", Some(s))?
                .iter()
                .enumerate()
                .map(|(k, x)| crate::exact_algebra::parse_q(x).map_err(|e| schema(&format!("/shift/{k}"), e.to_string())))
                .collect::<Result<Vec<Q>>>()?,
            None => vec![Q::zero(); r],
        };
        let function = PeriodicConvexFunction::new(vars.clone(), &forms.into_iter().map(|w| (w, 1)).collect::<Vec<_>>(), shift)
            .map_err(|e| schema("/weights", e.to_string()))?;
        let atoms = strings("/atoms", v.get("atoms"))?;
        let atom_index = |p: &str, s: &str| atoms.iter().position(|a| a == s).ok_or_else(|| schema(p, format!("unknown atom {s:?}")));
        let atom_weights = match v.get("atom_weights") {
            None => None,
            Some(aw) => {
                let obj = aw.as_object().ok_or_else(|| schema("/atom_weights", "expected an object".into()))?;
                let mut out = vec![Vec::new(); atoms.len()];
                for (name, ws) in obj {
                    let p = format!("/atom_weights/{name}");
                    let k = atom_index(&p, name)?;
                    let list = strings(&p, Some(ws))?;
                    let (_, forms) = parse_linear_forms(&list.join(","), Some(&vars)).map_err(|e| schema(&p, e.to_string()))?;
                    out[k] = forms.into_iter().map(|w| (w, 1)).collect();
                }
                Some(out)
            }
        };
        let subs = v.get("subgroups").and_then(Value::as_array).ok_or_else(|| schema("/subgroups", "expected an array".into()))?;
        let mut subgroups = Vec::new();
        for (k, s) in subs.iter().enumerate() {
            let p = format!("/subgroups/{k}");
            let name = s.get("name").and_then(Value::as_str).ok_or_else(|| schema(&format!("{p}/name"), "expected a string".into()))?;
            let perp_s = strings(&format!("{p}/perp"), s.get("perp"))?;
            let perp = if perp_s.is_empty() {
                vec![]
            } else {
                parse_linear_forms(&perp_s.join(","), Some(&vars)).map_err(|e| schema(&format!("{p}/perp"), e.to_string()))?.1
            };
            let comps = s.get("components").and_then(Value::as_array).ok_or_else(|| schema(&format!("{p}/components"), "expected an array".into()))?;
            let mut components = Vec::new();
            for (j, c) in comps.iter().enumerate() {
                let cp = format!("{p}/components/{j}");
                let names = strings(&cp, Some(c))?;
                components.push(names.iter().map(|n| atom_index(&cp, n)).collect::<Result<BTreeSet<usize>>>()?);
            }
            subgroups.push(Subgroup { name: name.into(), perp: hnf(&perp), components });
        }
        InertiaData::new(function, atoms, atom_weights, subgroups)
    }

    pub fn to_json(&self) -> Value {
        let f = &self.function;
        let vars = f.vars();
        json!({
            "schema": 1,
            "kind": "inertia",
            "coordinates": vars,
            "weights": f.weights().iter().map(|w| fmt_linear_form(vars, w)).collect::<Vec<_>>(),
            "atoms": self.atoms,
            "atom_weights": self.atoms.iter().zip(&self.atom_weights).map(|(a, ws)| {
                (a.clone(), Value::from(ws.iter().flat_map(|(w, m)| std::iter::repeat_n(fmt_linear_form(vars, w), *m as usize)).collect::<Vec<_>>()))
            }).collect::<serde_json::Map<_, _>>(),
            "subgroups": self.subgroups.iter().map(|g| json!({
                "name": g.name,
                "perp": g.perp.iter().map(|w| fmt_linear_form(vars, w)).collect::<Vec<_>>(),
                "components": g.components.iter().map(|c| c.iter().map(|a| self.atoms[*a].clone()).collect::<Vec<_>>()).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// `exp(η)^⊥`, spanned by the weights integral on `η`.
fn exp_perp(f: &PeriodicConvexFunction, cell: &Cell) -> Vec<Vec<i64>> {
    let gens: Vec<Vec<i64>> = cell.integral.iter().map(|&i| f.weights()[i].clone()).collect();
    hnf(&gens)
}

/// `η ⊆ log Γ`: every character in `Γ^⊥` is a constant integer on `η`.
fn inside_log(perp: &[Vec<i64>], cell: &Cell) -> bool {
    perp.iter().all(|l| {
        let v0 = dot_i(l, &cell.vertices[0]);
        is_int(&v0) && cell.vertices.iter().all(|v| dot_i(l, v) == v0)
    })
}

struct ModelCoords {
    a_idx: Vec<usize>,
    basis: Vec<Vec<i64>>,
}

impl ModelCoords {
    fn new(model: &GKMModel) -> Result<Self> {
        let a_idx = model.ring.a_indices();
        let mut all = Vec::new();
        for p in &model.points {
            for t in &p.tangent {
                all.push(Self::a_int(&a_idx, t)?);
            }
        }
        let basis = hnf(&all);
        if basis.is_empty() {
            return Err(Error::DegenerateQ("no tangent weight is nontrivial on A".into()));
        }
        Ok(ModelCoords { a_idx, basis })
    }

    fn a_int(a_idx: &[usize], w: &Weight) -> Result<Vec<i64>> {
        a_idx
            .iter()
            .map(|&k| {
                let x = w.0[k];
                if x.is_integer() {
                    Ok(x.to_integer())
                } else {
                    Err(Error::Unsupported(format!("fractional A-weight {}", fmt_q(&x))))
                }
            })
            .collect()
    }

    fn int_coords(&self, w: &Weight) -> Result<Vec<i64>> {
        let a = Self::a_int(&self.a_idx, w)?;
        coords_in(&self.basis, &a).ok_or_else(|| Error::Invalid("weight outside the tangent lattice".into()))
    }

    fn q_coords(&self, w: &Weight) -> Result<Vec<Q>> {
        let k = self.basis.len();
        let a: Vec<Q> = self.a_idx.iter().map(|&i| w.0[i]).collect();
        let mut m: Vec<Vec<Q>> =
            (0..a.len()).map(|j| (0..k).map(|i| q(self.basis[i][j])).chain([a[j]]).collect()).collect();
        let piv = linalg::rref(&mut m);
        if piv.contains(&k) {
            return Err(Error::Invalid("class outside the span of the tangent weights".into()));
        }
        let mut c = vec![Q::zero(); k];
        for (r, &p) in piv.iter().enumerate() {
            c[p] = m[r][k];
        }
        Ok(c)
    }

    fn fmt(&self, c: &[i64], model: &GKMModel) -> String {
        let mut w = Weight::zero(model.ring.dim());
        for (ci, b) in c.iter().zip(&self.basis) {
            for (k, &i) in self.a_idx.iter().enumerate() {
                w.0[i] += q(ci * b[k]);
            }
        }
        model.ring.fmt_monomial(&w)
    }
}

/// `K_{Γ,η,i} = Spec K_{Γ/exp(dη)}(F_i)` with `F_i` a component of `X^η`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FloorStratum {
    pub subgroup: usize,
    /// Index into [`FloorPlan::cells`].
    pub cell: usize,
    /// Component of `X^{exp η}`, as a set of atoms.
    pub atoms: BTreeSet<usize>,
    pub dim: usize,
    /// The stratum this one coincides with once the support of
    /// `K_Γ(F_i)` is taken into account; itself for most strata.
    pub reduced: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryBundle {
    pub cell: usize,
    /// One character per atom.
    pub lambda: Vec<Vec<Q>>,
}

#[derive(Clone, Debug)]
pub struct FloorPlan {
    pub inertia: InertiaData,
    /// Strata of the periodic fan in `[0,1)^r`.
    pub cells: Vec<Cell>,
    /// For each cell, the subgroup `exp(η)`.
    pub exp_subgroup: Vec<usize>,
    pub strata: Vec<FloorStratum>,
    /// `(s, t)` with `η_s` in the closure of `η_t`, same subgroup, and the
    /// component of `t` inside that of `s`.
    pub adjacency: Vec<(usize, usize)>,
    pub boundary: Vec<BoundaryBundle>,
    /// Violations of the cocycle and boundary-bundle identities; empty when consistent.
    pub cocycle_failures: Vec<String>,
}

pub fn nodal_floors(data: &InertiaData) -> Result<FloorPlan> {
    let f = &data.function;
    let r = f.rank();
    let complex = Complex::build(f.weights(), -1, 2)?;
    let fundamental = complex.fundamental();
    let reps = complex.representatives();
    let local: BTreeMap<usize, usize> = fundamental.iter().enumerate().map(|(k, c)| (*c, k)).collect();
    let cells: Vec<Cell> = fundamental.iter().map(|&c| complex.cells[c].clone()).collect();

    let mut exp_subgroup = Vec::new();
    for c in &cells {
        let l = exp_perp(f, c);
        let g = data.subgroups.iter().position(|g| g.perp == l).ok_or_else(|| {
            Error::Refinement(format!(
                "no subgroup with perp lattice [{}] for the stratum at {}",
                l.iter().map(|w| fmt_linear_form(f.vars(), w)).collect::<Vec<_>>().join(", "),
                crate::lattice_geometry::fmt_point(&c.point)
            ))
        })?;
        exp_subgroup.push(g);
    }

    let mut strata = Vec::new();
    let mut index: BTreeMap<(usize, usize, Vec<usize>), usize> = BTreeMap::new();
    for (g, sg) in data.subgroups.iter().enumerate() {
        for (k, c) in cells.iter().enumerate() {
            if !inside_log(&sg.perp, c) {
                continue;
            }
            for comp in &data.subgroups[exp_subgroup[k]].components {
                index.insert((g, k, comp.iter().copied().collect()), strata.len());
                strata.push(FloorStratum {
                    subgroup: g,
                    cell: k,
                    atoms: comp.clone(),
                    dim: data.subgroup_dim(g) - c.dim,
                    reduced: usize::MAX,
                });
            }
        }
    }
    // the support of K_Γ(F) is the union of the subgroups of Γ with fixed points on F
    let mut keep = vec![true; strata.len()];
    for s in 0..strata.len() {
        let st = &strata[s];
        let best = (0..data.subgroups.len())
            .filter(|&h| data.contained(h, st.subgroup) && inside_log(&data.subgroups[h].perp, &cells[st.cell]))
            .filter(|&h| data.subgroups[h].components.iter().any(|c| c.is_subset(&st.atoms)))
            .max_by(|&a, &b| {
                (data.subgroup_dim(a), data.contained(b, a), std::cmp::Reverse(a)).cmp(&(
                    data.subgroup_dim(b),
                    data.contained(a, b),
                    std::cmp::Reverse(b),
                ))
            });
        match best {
            Some(h) => strata[s].reduced = index[&(h, st.cell, st.atoms.iter().copied().collect())],
            None => keep[s] = false,
        }
    }
    // drop strata with empty support and renumber
    let mut renum = vec![usize::MAX; strata.len()];
    let mut kept = Vec::new();
    for (s, st) in strata.iter().enumerate() {
        if keep[s] {
            renum[s] = kept.len();
            kept.push(st.clone());
        }
    }
    for st in kept.iter_mut() {
        st.reduced = renum[st.reduced];
    }
    let strata = kept;

    let mut adjacency = Vec::new();
    for (s, a) in strata.iter().enumerate() {
        for (t, b) in strata.iter().enumerate() {
            if a.subgroup != b.subgroup || a.cell == b.cell && s == t {
                continue;
            }
            let face = complex.faces[fundamental[b.cell]].iter().any(|&fc| reps[fc] == Some(fundamental[a.cell]));
            if face && b.atoms.is_subset(&a.atoms) {
                adjacency.push((s, t));
            }
        }
    }

    let (lambda, failures) = boundary_bundles(data, &complex)?;
    let boundary = local
        .iter()
        .map(|(&c, &k)| BoundaryBundle { cell: k, lambda: lambda[c].clone().unwrap_or_default() })
        .collect::<Vec<_>>();
    let mut boundary = boundary;
    boundary.sort_by_key(|b| b.cell);
    let _ = r;
    Ok(FloorPlan { inertia: data.clone(), cells, exp_subgroup, strata, adjacency, boundary, cocycle_failures: failures })
}

/// `det δ_{η,η'}` at every atom: the weights of `V` integral on `η` that
/// increase from `η` into `η'`.
pub fn det_delta(data: &InertiaData, eta: &Cell, eta2: &Cell) -> Vec<Vec<Q>> {
    let r = data.rank();
    let d: Vec<Q> = eta2.point.iter().zip(&eta.point).map(|(a, b)| a - b).collect();
    data.atom_weights
        .iter()
        .map(|ws| {
            let mut acc = vec![Q::zero(); r];
            for (w, m) in ws {
                let v0 = dot_i(w, &eta.vertices[0]);
                let constant = is_int(&v0) && eta.vertices.iter().all(|v| dot_i(w, v) == v0);
                if constant && dot_i(w, &d) > Q::zero() {
                    for k in 0..r {
                        acc[k] += q(w[k] * m);
                    }
                }
            }
            acc
        })
        .collect()
}

type Lambdas = Vec<Option<Vec<Vec<Q>>>>;

/// Solves `det δ_{η,η'} = λ_η − λ_{η'}` by propagation from the origin,
/// then re-checks it on every incidence and the cocycle rule on every
/// chain `η → η' → η''`.
fn boundary_bundles(data: &InertiaData, complex: &Complex) -> Result<(Lambdas, Vec<String>)> {
    let n = complex.cells.len();
    let r = data.rank();
    let zero = vec![q(0); r];
    let origin = complex.find_point(&zero).ok_or_else(|| Error::Invalid("the origin is not a stratum".into()))?;
    let mut nbrs: Vec<Vec<(usize, bool)>> = vec![Vec::new(); n];
    for (c, fs) in complex.faces.iter().enumerate() {
        for &f in fs {
            nbrs[f].push((c, true));
            nbrs[c].push((f, false));
        }
    }
    let sub = |a: &[Vec<Q>], b: &[Vec<Q>], sign: i64| -> Vec<Vec<Q>> {
        a.iter().zip(b).map(|(x, y)| x.iter().zip(y).map(|(u, v)| u + q(sign) * v).collect()).collect()
    };
    let mut lambda: Lambdas = vec![None; n];
    lambda[origin] = Some(vec![zero.clone(); data.atoms.len()]);
    let mut queue = VecDeque::from([origin]);
    while let Some(c) = queue.pop_front() {
        let lc = lambda[c].clone().expect("assigned");
        for &(o, up) in &nbrs[c] {
            if lambda[o].is_some() {
                continue;
            }
            // up: c is a face of o, so λ_o = λ_c − δ(c, o); otherwise λ_o = λ_c + δ(o, c)
            let val = if up {
                sub(&lc, &det_delta(data, &complex.cells[c], &complex.cells[o]), -1)
            } else {
                sub(&lc, &det_delta(data, &complex.cells[o], &complex.cells[c]), 1)
            };
            lambda[o] = Some(val);
            queue.push_back(o);
        }
    }
    let mut failures = Vec::new();
    for (c, fs) in complex.faces.iter().enumerate() {
        for &f in fs {
            if let (Some(lf), Some(lc)) = (&lambda[f], &lambda[c]) {
                let d = det_delta(data, &complex.cells[f], &complex.cells[c]);
                if sub(lf, lc, -1) != d {
                    failures.push(format!(
                        "boundary bundles disagree between {} and {}",
                        crate::lattice_geometry::fmt_point(&complex.cells[f].point),
                        crate::lattice_geometry::fmt_point(&complex.cells[c].point)
                    ));
                }
            }
            for &g in &complex.faces[f] {
                let (a, b, c2) = (&complex.cells[g], &complex.cells[f], &complex.cells[c]);
                let lhs = det_delta(data, a, c2);
                let rhs = sub(&det_delta(data, a, b), &det_delta(data, b, c2), 1);
                if lhs != rhs {
                    failures.push(format!(
                        "cocycle fails on {} -> {} -> {}",
                        crate::lattice_geometry::fmt_point(&a.point),
                        crate::lattice_geometry::fmt_point(&b.point),
                        crate::lattice_geometry::fmt_point(&c2.point)
                    ));
                }
            }
        }
    }
    Ok((lambda, failures))
}

impl FloorPlan {
    /// Strata counted by dimension `0..=r` for one subgroup, skipping strata
    /// that coincide with one of a smaller subgroup.
    pub fn counts(&self, subgroup: usize) -> Vec<usize> {
        let mut c = vec![0; self.inertia.rank() + 1];
        for (s, st) in self.strata.iter().enumerate() {
            if st.subgroup == subgroup && st.reduced == s {
                c[st.dim] += 1;
            }
        }
        c
    }

    /// Strata that are not identified with another one.
    pub fn distinct_strata(&self) -> Vec<usize> {
        (0..self.strata.len()).filter(|&s| self.strata[s].reduced == s).collect()
    }

    /// For each atom fixed by the whole torus, the strata over the torus that contain it.
    pub fn floors(&self) -> Vec<(usize, Vec<usize>)> {
        let Some(top) = self.inertia.top() else { return Vec::new() };
        let fixed: BTreeSet<usize> = self.inertia.subgroups[top].components.iter().flatten().copied().collect();
        fixed
            .into_iter()
            .map(|a| {
                let ss = (0..self.strata.len())
                    .filter(|&s| self.strata[s].subgroup == top && self.strata[s].reduced == s && self.strata[s].atoms.contains(&a))
                    .collect();
                (a, ss)
            })
            .collect()
    }

    /// Strata shared by the floors of all the given atoms.
    pub fn shared(&self, atoms: &[usize]) -> Vec<usize> {
        let floors = self.floors();
        let sets: Vec<BTreeSet<usize>> = atoms
            .iter()
            .filter_map(|a| floors.iter().find(|(b, _)| b == a).map(|(_, ss)| ss.iter().copied().collect()))
            .collect();
        if sets.len() != atoms.len() || sets.is_empty() {
            return Vec::new();
        }
        let mut it = sets.into_iter();
        let first = it.next().expect("nonempty");
        it.fold(first, |acc, s| acc.intersection(&s).copied().collect()).into_iter().collect()
    }

    fn stratum_label(&self, s: usize) -> String {
        let st = &self.strata[s];
        let d = &self.inertia;
        format!(
            "K[{}, {}, {}]",
            d.subgroups[st.subgroup].name,
            crate::lattice_geometry::fmt_point(&self.cells[st.cell].point),
            d.fmt_atoms(&st.atoms)
        )
    }

    pub fn to_json(&self) -> Value {
        let d = &self.inertia;
        let vars = d.function.vars();
        let pt = |p: &[Q]| p.iter().map(fmt_q).collect::<Vec<_>>();
        let counts: serde_json::Map<String, Value> =
            d.subgroups.iter().enumerate().map(|(g, sg)| (sg.name.clone(), json!(self.counts(g)))).collect();
        json!({
            "schema": 1,
            "kind": "floor_plan",
            "inertia": d.to_json(),
            "cells": self.cells.iter().zip(&self.exp_subgroup).map(|(c, g)| json!({
                "dim": c.dim,
                "point": pt(&c.point),
                "exp": d.subgroups[*g].name,
            })).collect::<Vec<_>>(),
            "strata": self.strata.iter().enumerate().map(|(s, st)| json!({
                "label": self.stratum_label(s),
                "subgroup": d.subgroups[st.subgroup].name,
                "cell": st.cell,
                "component": st.atoms.iter().map(|a| d.atoms[*a].clone()).collect::<Vec<_>>(),
                "dim": st.dim,
                "same_as": if st.reduced == s { Value::Null } else { json!(st.reduced) },
            })).collect::<Vec<_>>(),
            "counts": counts,
            "distinct_strata": self.distinct_strata().len(),
            "adjacency": self.adjacency,
            "floors": self.floors().iter().map(|(a, ss)| json!({"atom": d.atoms[*a], "strata": ss})).collect::<Vec<_>>(),
            "boundary_bundles": self.boundary.iter().map(|b| json!({
                "cell": b.cell,
                "lambda": d.atoms.iter().zip(&b.lambda).map(|(a, l)| (a.clone(), Value::from(fmt_character(vars, l)))).collect::<serde_json::Map<_, _>>(),
            })).collect::<Vec<_>>(),
            "cocycle_ok": self.cocycle_failures.is_empty(),
            "cocycle_failures": self.cocycle_failures,
        })
    }

    pub fn to_text(&self) -> String {
        let d = &self.inertia;
        let mut s = String::new();
        for (g, sg) in d.subgroups.iter().enumerate() {
            let _ = writeln!(s, "subgroup {}: strata by dimension {:?}", sg.name, self.counts(g));
        }
        let _ = writeln!(s, "distinct strata: {}", self.distinct_strata().len());
        for (k, st) in self.strata.iter().enumerate() {
            let same = if st.reduced == k { String::new() } else { format!(" = {}", self.stratum_label(st.reduced)) };
            let _ = writeln!(s, "  {} dim {}{}", self.stratum_label(k), st.dim, same);
        }
        for (a, ss) in self.floors() {
            let _ = writeln!(s, "floor {}: {} strata", d.atoms[a], ss.len());
        }
        let _ = writeln!(
            s,
            "boundary bundles: {}",
            if self.cocycle_failures.is_empty() { "cocycle condition holds" } else { "cocycle condition FAILS" }
        );
        for f in &self.cocycle_failures {
            let _ = writeln!(s, "  {f}");
        }
        s
    }
}

fn fmt_character(vars: &[String], l: &[Q]) -> String {
    if l.iter().all(|x| x.is_integer()) {
        fmt_linear_form(vars, &l.iter().map(|x| x.to_integer()).collect::<Vec<_>>())
    } else {
        format!("({})", l.iter().map(fmt_q).collect::<Vec<_>>().join(", "))
    }
}

/// One tessellation per fixed point, from its tangent weights and the
/// fractional shift `s (L_k − L_0)`.
pub fn floor_tessellations(model: &GKMModel, slope: Option<Q>) -> Result<Vec<super::Tessellation>> {
    let coords = ModelCoords::new(model)?;
    let r = coords.basis.len();
    let s = match slope {
        Some(s) => s,
        None => model.default_slope()?,
    };
    let vars: Vec<String> = (1..=r).map(|k| format!("u{k}")).collect();
    let l0 = &model.points[0].ample;
    model
        .points
        .iter()
        .map(|p| {
            let ws: Vec<(Vec<i64>, i64)> = p.tangent.iter().map(|t| Ok((coords.int_coords(t)?, 1))).collect::<Result<_>>()?;
            let shift: Vec<Q> = coords.q_coords(&p.ample.sub(l0))?.into_iter().map(|x| x * s).collect();
            let f = PeriodicConvexFunction::new(vars.clone(), &ws, shift)?;
            super::legendre_dual_tessellation(&f)
        })
        .collect()
}
