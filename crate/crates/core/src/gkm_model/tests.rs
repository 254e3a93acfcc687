use itertools::Itertools;
use proptest::prelude::*;
use serde_json::json;

use super::*;
use crate::exact_algebra::{parse_poly, parse_weight, q, qr, LaurentPoly, ThetaClass, Weight};
use crate::lattice_geometry::Chamber;

fn w(m: &GKMModel, s: &str) -> Weight {
    parse_weight(&m.ring, s).unwrap()
}

fn poly(m: &GKMModel, s: &str) -> LaurentPoly {
    parse_poly(&m.ring, s).unwrap()
}

/// `(h^{-1} - 1) Σ a_k/a_i` over `i` below `k`, where `F_i < F_k` exactly
/// when `sigma_i > sigma_k`.
fn delta_upsilon_oracle(m: &GKMModel, sigma: &[i64], k: usize) -> ThetaClass {
    let mut c = ThetaClass::zero(&m.ring);
    for i in 0..sigma.len() {
        if sigma[i] > sigma[k] {
            let base = w(m, &format!("a{}/a{}", k + 1, i + 1));
            c.add_weight(base.sub(&w(m, "h")), 1);
            c.add_weight(base, -1);
        }
    }
    c
}

#[test]
fn delta_upsilon_matches_formula_in_every_chamber() {
    for n in 1..=4 {
        let m = GKMModel::tstar_pn(n).unwrap();
        for perm in (0..n).permutations(n) {
            let c = Chamber::from_permutation(&perm);
            let d = attracting_decomposition(&m, &c).unwrap();
            for k in 0..n {
                assert_eq!(d.points[k].delta_upsilon, delta_upsilon_oracle(&m, &c.sigma, k), "n={n} perm={perm:?} k={k}");
            }
        }
    }
    // the minimal point has no shift
    let m = GKMModel::tstar_pn(3).unwrap();
    let d = attracting_decomposition(&m, &Chamber::standard(3)).unwrap();
    assert!(d.points[0].delta_upsilon.terms().is_empty());
}

#[test]
fn normalization_examples() {
    let m = GKMModel::tstar_pn(2).unwrap();
    let d = attracting_decomposition(&m, &Chamber::standard(2)).unwrap();
    assert_eq!(normalization(&m, &d, 0).unwrap(), poly(&m, "1 - a1/a2"));
    assert_eq!(normalization(&m, &d, 1).unwrap(), poly(&m, "-h^-1/2*a2/a1*(1 - h*a1/a2)"));
    let pt = GKMModel::single_point().unwrap();
    let d = attracting_decomposition(&pt, &Chamber::standard(1)).unwrap();
    assert_eq!(normalization(&pt, &d, 0).unwrap(), LaurentPoly::one(&pt.ring));
}

#[test]
fn normalization_rejects_odd_radicand() {
    let r = crate::exact_algebra::Ring::new(&["a", "h"], &["a"]).unwrap();
    let n_neg = vec![parse_weight(&r, "a^-1").unwrap()];
    let pol = ThetaClass::zero(&r);
    let err = normalization_from(&r, &n_neg, &pol, &Chamber::new(vec![1]), "F");
    assert!(matches!(err, Err(crate::Error::NonSquare(_))));
}

#[test]
fn json_round_trip_and_schema_errors() {
    for m in [GKMModel::tstar_pn(3).unwrap(), GKMModel::p2().unwrap(), GKMModel::builtin("tstar-p1xp1", None).unwrap()] {
        assert_eq!(GKMModel::from_json(&m.to_json()).unwrap(), m);
    }
    let good = json!({
        "torus": ["a1", "a2", "h"], "A": ["a1", "a2"],
        "fixed_points": [
            {"name": "F1", "tangent": ["a2/a1", "a1/(h*a2)"], "polarization": ["a2/a1"], "ample": "a1^-1", "slope_coeff": "2/5"},
            {"name": "F2", "tangent": ["a1/a2", "a2/(h*a1)"], "polarization": ["a1/a2"], "ample": "a2^-1", "slope_coeff": "2/5"}
        ],
        "edges": [["F1", "F2", "a1/a2"]]
    });
    let m = GKMModel::from_json(&good).unwrap();
    assert_eq!(m.slope, Some(qr(2, 5)));
    assert_eq!(m.edges[0].weight, w(&m, "a2/a1"));
    assert_eq!(m, {
        let mut t = GKMModel::tstar_pn(2).unwrap();
        t.slope = Some(qr(2, 5));
        t
    });

    let pointer_of = |v: serde_json::Value| match GKMModel::from_json(&v) {
        Err(crate::Error::Schema { pointer, .. }) => pointer,
        other => panic!("expected schema error, got {other:?}"),
    };
    let mut v = good.clone();
    v["fixed_points"][1].as_object_mut().unwrap().remove("ample");
    assert_eq!(pointer_of(v), "/fixed_points/1/ample");
    let mut v = good.clone();
    v["fixed_points"][0]["tangent"][1] = json!("a1/(h*b)");
    assert_eq!(pointer_of(v), "/fixed_points/0/tangent/1");
    let mut v = good.clone();
    v["edges"][0][1] = json!("F3");
    assert_eq!(pointer_of(v), "/edges/0");
    let mut v = good.clone();
    v["edges"][0][2] = json!("a1^2/a2");
    assert_eq!(pointer_of(v), "/edges/0");
    let mut v = good.clone();
    v["fixed_points"][1]["slope_coeff"] = json!("1/3");
    assert_eq!(pointer_of(v), "/fixed_points/1/slope_coeff");
    let mut v = good.clone();
    v["fixed_points"][0]["tangent"][0] = json!("h");
    assert_eq!(pointer_of(v), "/fixed_points/0/tangent/0");
    let mut v = good;
    v["fixed_points"][0]["polarization"] = json!(["a1/(h*a2)", "a2/a1"]);
    assert!(matches!(GKMModel::from_json(&v), Err(crate::Error::InconsistentPolarization(_))));
}

#[test]
fn edge_label_may_differ_by_a_trivial_twist() {
    let m = GKMModel::tstar_pn(2).unwrap();
    let mut v = m.to_json();
    v["edges"][0][2] = json!("a2/(h*a1)");
    // a2/(h a1) is a fiber weight at F2 but its inverse is not tangent at F1,
    // so the label resolves to the base direction
    assert_eq!(GKMModel::from_json(&v).unwrap(), m);
}

#[test]
fn degree_windows() {
    let m = GKMModel::tstar_pn(2).unwrap();
    let c = Chamber::standard(2);
    let order = m.ample_order(&c).unwrap();
    let s = qr(1, 3);
    let win = degree_polytope(&m, &order, 0, 1, s).unwrap();
    let base = crate::lattice_geometry::LatticePolytope::from_int_points(&[vec![0, 0], vec![1, -1]]);
    assert_eq!(win.window.base, base);
    assert_eq!(win.window.shift, vec![-s, s]);
    assert!(win.is_generic());
    assert_eq!(win.lattice_points(), vec![vec![0, 0]]);
    // projection to the cocharacter (1,0)
    assert_eq!(win.projection(&[1, 0]), (-s, q(1) - s));

    let diag = degree_polytope(&m, &order, 1, 1, s).unwrap();
    assert_eq!(diag.window.shift, vec![q(0), q(0)]);
    assert!(!degree_polytope(&m, &order, 0, 1, q(2)).unwrap().is_generic());
    assert!(matches!(degree_polytope(&m, &order, 1, 0, s), Err(crate::Error::Incomparable(..))));

    let prod = GKMModel::builtin("tstar-p1xp1", None).unwrap();
    let order = prod.ample_order(&Chamber::new(vec![4, 3, 2, 1])).unwrap();
    // F1xG2 and F2xG1 are incomparable
    assert!(matches!(degree_polytope(&prod, &order, 1, 2, s), Err(crate::Error::Incomparable(..))));
}

#[test]
fn attractive_check_examples() {
    for n in 2..=3 {
        let m = GKMModel::tstar_pn(n).unwrap();
        let s: Vec<ThetaClass> = (0..n).map(|k| ThetaClass::from_weights(&m.ring, m.polarization(k).unwrap())).collect();
        for perm in (0..n).permutations(n) {
            let c = Chamber::from_permutation(&perm);
            assert!(attractive_check(&m, Some(&s), &c).unwrap().ok());
            // the dual class is attractive for the opposite chamber
            let dual: Vec<ThetaClass> = s.iter().map(|t| t.dual()).collect();
            assert!(attractive_check(&m, Some(&dual), &c.opposite()).unwrap().ok());
        }
    }

    let p2 = GKMModel::p2().unwrap();
    let rep = attractive_check(&p2, None, &Chamber::standard(3)).unwrap();
    assert!(!rep.ok());
    assert_eq!(rep.obstructions.len(), 1);
    let o = &rep.obstructions[0];
    assert_eq!((o.first, o.second), (0, 2));
    assert_eq!(o.edge, (0, 2));
    assert!(rep.describe(&p2)[0].contains("F1 and F3"));

    // rank one: only the pointwise degree matters
    let m = GKMModel::from_json(&json!({
        "torus": ["a", "h"], "A": ["a"],
        "fixed_points": [
            {"name": "F1", "tangent": ["a", "a^-1*h^-1"], "polarization": ["a"], "ample": "a"},
            {"name": "F2", "tangent": ["a^-1", "a*h^-1"], "polarization": ["a^-1"], "ample": "1"}
        ],
        "edges": [["F1", "F2", "a"]]
    }))
    .unwrap();
    let s: Vec<ThetaClass> = (0..2).map(|k| ThetaClass::from_weights(&m.ring, m.polarization(k).unwrap())).collect();
    assert!(attractive_check(&m, Some(&s), &Chamber::new(vec![1])).unwrap().ok());
    let t = GKMModel::tstar_pn(2).unwrap();
    let wrong = vec![ThetaClass::zero(&t.ring), ThetaClass::zero(&t.ring)];
    let rep = attractive_check(&t, Some(&wrong), &Chamber::standard(2)).unwrap();
    assert_eq!(rep.pointwise, vec![0, 1]);
}

#[test]
fn limit_polarization_examples() {
    let m = GKMModel::tstar_pn(2).unwrap();
    let c = Chamber::standard(2);
    let at = |k: usize| ThetaClass::from_weights(&m.ring, m.polarization(k).unwrap());
    // F1: the polarization is repelling and drops out
    assert!(limit_polarization(&at(0), &c).terms().is_empty());
    // F2: attracting, replaced by w - w^dual
    let mut expect = ThetaClass::zero(&m.ring);
    expect.add_weight(w(&m, "a1/a2"), 1);
    expect.add_weight(w(&m, "a2/a1"), -1);
    assert_eq!(limit_polarization(&at(1), &c), expect);
    // a face containing everything fixes the class
    let v = at(1).add(&ThetaClass::from_weights(&m.ring, &[w(&m, "h*a1/a2")]));
    assert_eq!(limit_polarization(&v, &Chamber::new(vec![1, 1])), v);
}

/// Terms of `p` of minimal pairing with `face`.
fn initial_form(p: &LaurentPoly, face: &Chamber) -> LaurentPoly {
    let r = p.ring().clone();
    let min = p.terms().keys().map(|w| face.pairing(&r, w)).min().unwrap();
    LaurentPoly::from_terms(&r, p.terms().iter().filter(|(w, _)| face.pairing(&r, w) == min).map(|(w, c)| (w.clone(), *c)))
}

#[test]
fn normalization_leading_term_along_faces() {
    let m = GKMModel::tstar_pn(3).unwrap();
    let c = Chamber::standard(3);
    let d = attracting_decomposition(&m, &c).unwrap();
    for face in [vec![1, 0, 0], vec![1, 1, 0], vec![1, 1, 1]] {
        let face = Chamber::new(face);
        for k in 0..3 {
            let full = initial_form(&normalization(&m, &d, k).unwrap(), &face);
            let n_neg: Vec<Weight> =
                d.points[k].n_neg.iter().filter(|w| face.pairing(&m.ring, w) == q(0)).cloned().collect();
            let vlim = limit_polarization(&ThetaClass::from_weights(&m.ring, m.polarization(k).unwrap()), &face);
            let lim = normalization_from(&m.ring, &n_neg, &vlim, &c, "F").unwrap();
            // equal up to a unit of the coefficient ring
            let ratio = full.div_exact(&lim).unwrap();
            assert!(ratio.is_coefficient_unit(), "face {:?} point {k}: ratio {ratio}", face.sigma);
        }
    }
}

#[test]
fn resonance_for_cotangent_projective_spaces() {
    for n in 2..=5 {
        let m = GKMModel::tstar_pn(n).unwrap();
        let got: Vec<String> = resonant_locus(&m, &Chamber::standard(n)).unwrap().iter().map(|z| m.ring.fmt_monomial(z)).collect();
        let expect: Vec<String> =
            (0..n).map(|k| match k { 0 => "1".to_string(), 1 => "h".to_string(), _ => format!("h^{k}") }).collect();
        assert_eq!(got, expect);
    }
    let pt = GKMModel::single_point().unwrap();
    assert!(resonant_locus(&pt, &Chamber::standard(1)).unwrap().is_empty());

    // an ample weight whose differences are independent of the shift
    let mut v = GKMModel::tstar_pn(2).unwrap().to_json();
    v["fixed_points"][0]["ample"] = json!("1");
    v["fixed_points"][1]["ample"] = json!("a1");
    let m = GKMModel::from_json(&v).unwrap();
    assert!(resonant_locus(&m, &Chamber::standard(2)).unwrap().is_empty());
}

#[test]
fn product_model_has_partial_order() {
    let m = GKMModel::builtin("tstar-p1xp2", None).unwrap();
    assert_eq!(m.len(), 6);
    assert_eq!(m.edges.len(), 3 + 2 * 3);
    let order = m.ample_order(&Chamber::new(vec![5, 4, 3, 2, 1])).unwrap();
    assert!(order.linear_extensions().len() > 1);
    assert!(attracting_decomposition(&m, &Chamber::new(vec![5, 4, 3, 2, 1])).is_ok());
}

fn chamber_strategy(n: usize) -> impl Strategy<Value = Chamber> {
    prop::collection::vec(-20i64..=20, n)
        .prop_filter("generic", |s| s.iter().all_unique())
        .prop_map(Chamber::new)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn splitting_identity_and_duality((n, c) in (2usize..=4).prop_flat_map(|n| (Just(n), chamber_strategy(n)))) {
        let m = GKMModel::tstar_pn(n).unwrap();
        let d = attracting_decomposition(&m, &c).unwrap();
        let e = attracting_decomposition(&m, &c.opposite()).unwrap();
        for k in 0..n {
            let p = &d.points[k];
            // N_{<0} = T_{<0} + (T_{>0})^dual + δυ, exactly
            let rhs = ThetaClass::from_weights(&m.ring, &p.t_neg)
                .add(&ThetaClass::from_weights(&m.ring, &p.t_pos).dual())
                .add(&p.delta_upsilon);
            prop_assert_eq!(ThetaClass::from_weights(&m.ring, &p.n_neg), rhs);
            prop_assert_eq!(&e.points[k].n_pos, &p.n_neg);
            prop_assert_eq!(&e.points[k].t_neg, &p.t_pos);
            prop_assert_eq!(
                p.delta_upsilon.clone(),
                delta_upsilon_oracle(&m, &c.sigma, k)
            );
        }
    }

    #[test]
    fn limit_of_polarization_is_polarization(
        ws in prop::collection::vec((-2i64..=2, -2i64..=2, -1i64..=1), 0..6),
        face in prop::collection::vec(-2i64..=2, 2),
    ) {
        let r = crate::exact_algebra::Ring::new(&["a1", "a2", "h"], &["a1", "a2"]).unwrap();
        let v = ThetaClass::from_weights(&r, &ws.iter().map(|&(x, y, h)| Weight(vec![q(x), q(y), q(h)])).collect::<Vec<_>>());
        let face = Chamber::new(face);
        let lim = limit_polarization(&v, &face);
        let tx = v.add(&v.dual());
        let mut fixed = ThetaClass::zero(&r);
        for (wt, n) in tx.terms() {
            if face.pairing(&r, wt) == q(0) {
                fixed.add_weight(wt.clone(), *n);
            }
        }
        prop_assert_eq!(lim.add(&lim.dual()), fixed);
    }
}
