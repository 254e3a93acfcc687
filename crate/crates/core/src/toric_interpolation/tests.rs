use proptest::prelude::*;

use super::*;
use crate::exact_algebra::{parse_poly, q, qr, Ring};

fn ring1() -> RingRef {
    Ring::new(&["a", "h"], &["a"]).unwrap()
}

fn ring2() -> RingRef {
    Ring::new(&["a1", "a2", "h"], &["a1", "a2"]).unwrap()
}

fn problem(r: &RingRef, p: &str, lambda: Vec<Q>, target: &str) -> InterpolationProblem {
    let p = parse_poly(r, p).unwrap();
    InterpolationProblem {
        delta: newton_polytope(&p).unwrap(),
        lambda,
        p,
        target: parse_poly(r, target).unwrap(),
    }
}

#[test]
fn nondegeneracy_examples() {
    let r = ring1();
    let seg = LatticePolytope::from_int_points(&[vec![-1], vec![0]]);
    assert!(is_nondegenerate(&parse_poly(&r, "1 - h/a").unwrap(), &seg));
    assert!(!is_nondegenerate(&parse_poly(&r, "1 - 2/a").unwrap(), &seg));
    assert!(!is_nondegenerate(&parse_poly(&r, "1 - h/a + 1/a").unwrap(), &seg));
    // Koszul polynomials always qualify
    let r2 = ring2();
    let k = parse_poly(&r2, "(1 - a1/a2)*(1 - h*a2/a1)*(1 - h^-1/2*a2)").unwrap();
    assert!(is_nondegenerate(&k, &newton_polytope(&k).unwrap()));
}

#[test]
fn constant_target_in_half_shifted_window() {
    let r = ring1();
    let prob = problem(&r, "1 - h^-1/a", vec![qr(1, 2)], "3*h^2 - h^-1/2");
    let sol = interpolate(&prob).unwrap();
    assert_eq!(sol.f, parse_poly(&r, "3*h^2 - h^-1/2").unwrap());
    assert!(sol.kernel.is_none() && !sol.non_generic);
}

#[test]
fn integral_shift_has_kernel_generated_by_p() {
    let r = ring1();
    let prob = problem(&r, "1 - h^-1/a", vec![q(0)], "0");
    let sol = interpolate(&prob).unwrap();
    assert!(sol.f.is_zero());
    assert_eq!(sol.kernel.unwrap(), prob.p);
    assert!(sol.non_generic);

    let prob = problem(&r, "1 - h^-1/a", vec![q(2)], "a^5");
    let sol = interpolate(&prob).unwrap();
    assert_eq!(sol.kernel.clone().unwrap(), prob.p.shift(&a_weight(&r, &[2])));
    assert!(sol.f.sub(&prob.target).divides(&prob.p));
}

#[test]
fn reduction_of_high_power() {
    // a = h^-1 in the quotient, so a^3 reduces to h^-3
    let r = ring1();
    let prob = problem(&r, "1 - h^-1/a", vec![qr(1, 3)], "a^3");
    assert_eq!(interpolate(&prob).unwrap().f, parse_poly(&r, "h^-3").unwrap());
}

#[test]
fn degenerate_polynomial_is_rejected() {
    let r = ring1();
    let prob = problem(&r, "1 - 2/a", vec![qr(1, 2)], "1");
    assert!(matches!(interpolate(&prob), Err(crate::Error::Degenerate(_))));
}

#[test]
fn rank_two_recovers_planted_section() {
    // in rank two only classes of bounded degree lift, so plant one
    let r = ring2();
    let mut prob = problem(&r, "(1 - h*a1)*(1 - a2)*(1 - h^-1*a1/a2)", vec![qr(1, 3), qr(-1, 4)], "0");
    let window = prob.delta.lattice_points_shifted(&prob.lambda);
    assert_eq!(window.len(), 3);
    let planted = LaurentPoly::from_terms(
        &r,
        window.iter().zip([2, -1, 5]).map(|(mu, c)| (a_weight(&r, mu), c)),
    );
    let g = parse_poly(&r, "a1^2*a2^-1 + 7 - h*a2^2").unwrap();
    prob.target = planted.add(&prob.p.mul(&g));
    let sol = interpolate(&prob).unwrap();
    assert_eq!(sol.f, planted);
}

#[test]
fn residue_solver_matches_direct_solver() {
    let r = ring2();
    let ws = ["a1^-1*h^-1", "a2^-1", "a2*a1^-1*h"];
    let factors: Vec<Binomial> =
        ws.iter().map(|s| Binomial::koszul(&r, &crate::exact_algebra::parse_weight(&r, s).unwrap()).unwrap()).collect();
    let p = factors.iter().fold(LaurentPoly::one(&r), |acc, f| acc.mul(&f.poly()));
    let lambda = vec![qr(1, 5), qr(2, 3)];
    let delta = newton_polytope(&p).unwrap();
    let window = delta.lattice_points_shifted(&lambda);
    let planted = LaurentPoly::from_terms(&r, window.iter().enumerate().map(|(j, mu)| (a_weight(&r, mu), j as i64 - 1)));
    let target = planted.add(&p.mul(&parse_poly(&r, "a1^3 - 2*h*a2 + a1*a2^-2").unwrap()));
    let prob = InterpolationProblem { delta, lambda, p, target: target.clone() };
    let direct = interpolate(&prob).unwrap();
    assert_eq!(direct.f, planted);
    let residues = vec![target; factors.len()];
    let (via_residues, free) = solve_residues(&r, &window, &factors, &residues, &PivotOrder::Natural).unwrap();
    assert_eq!(free, 0);
    assert_eq!(via_residues, direct.f);
}

#[test]
fn parallel_factors_with_common_zero_are_rejected() {
    let r = ring1();
    let w = |s: &str| crate::exact_algebra::parse_weight(&r, s).unwrap();
    // 1 - a and 1 - a^2 vanish together at a = 1
    let fs = vec![Binomial::koszul(&r, &w("a^-1")).unwrap(), Binomial::koszul(&r, &w("a^-2")).unwrap()];
    let one = LaurentPoly::one(&r);
    let err = solve_residues(&r, &[vec![0], vec![1], vec![2]], &fs, &[one.clone(), one], &PivotOrder::Natural);
    assert!(matches!(err, Err(crate::Error::NotGkm(_))));
    assert!(matches!(Binomial::koszul(&r, &w("h")), Err(crate::Error::FixedDirection(_))));
}

#[test]
fn toric_vanishing_examples() {
    let unit = LatticePolytope::from_int_points(&[vec![0], vec![1]]);
    assert_eq!(shifted_cohomology(&unit, &[q(0)]).unwrap(), Cohomology::OneDimensional(vec![0]));
    assert_eq!(shifted_cohomology(&unit, &[qr(1, 3)]).unwrap(), Cohomology::Zero);
    let tri = LatticePolytope::from_int_points(&[vec![0, 0], vec![1, 0], vec![0, 1]]);
    assert_eq!(shifted_cohomology(&tri, &[qr(1, 2), qr(1, 2)]).unwrap(), Cohomology::Zero);
    let flat = LatticePolytope::from_int_points(&[vec![0, 0], vec![1, 1]]);
    assert!(matches!(shifted_cohomology(&flat, &[q(0), q(0)]), Err(crate::Error::DegeneratePolytope(_))));

    // the triangle verdict agrees with the kernel of reduction mod a P with that polytope
    let r = ring2();
    let p = parse_poly(&r, "1 - h*a1 - a2").unwrap();
    assert_eq!(newton_polytope(&p).unwrap(), tri);
    for (lam, expect_kernel) in [(vec![qr(1, 2), qr(1, 2)], false), (vec![q(1), q(-2)], true)] {
        let prob = InterpolationProblem { delta: tri.clone(), lambda: lam.clone(), p: p.clone(), target: LaurentPoly::zero(&r) };
        let sol = interpolate(&prob).unwrap();
        assert_eq!(sol.kernel.is_some(), expect_kernel);
        assert_eq!(
            matches!(shifted_cohomology(&tri, &lam).unwrap(), Cohomology::OneDimensional(_)),
            expect_kernel
        );
    }
}

fn unit_coeff() -> impl Strategy<Value = (i64, i64)> {
    (prop::bool::ANY, -2i64..=2).prop_map(|(s, k)| (if s { 1 } else { -1 }, k))
}

/// Random nondegenerate rank-1 polynomial of width `d`.
fn rank1_instance() -> impl Strategy<Value = (LaurentPoly, Vec<Q>, LaurentPoly)> {
    (
        1usize..=3,
        -2i64..=1,
        unit_coeff(),
        unit_coeff(),
        prop::collection::vec((-2i64..=2, -2i64..=2), 2),
        (-9i64..=9, 1i64..=5),
        prop::collection::vec((-4i64..=4, -2i64..=2, -3i64..=3), 0..5),
    )
        .prop_map(|(d, lo, (s0, k0), (s1, k1), mid, (ln, ld), tgt)| {
            let r = ring1();
            let t = |e: i64, hh: i64| Weight(vec![q(e), qr(hh, 2)]);
            let mut terms = vec![(t(lo, k0), s0), (t(lo + d as i64, k1), s1)];
            for (j, (c, hh)) in mid.into_iter().enumerate().take(d - 1) {
                terms.push((t(lo + 1 + j as i64, hh), c));
            }
            let p = LaurentPoly::from_terms(&r, terms);
            let target = LaurentPoly::from_terms(&r, tgt.into_iter().map(|(e, hh, c)| (t(e, hh), c)));
            (p, vec![qr(ln, ld)], target)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pivot_order_does_not_matter(inst in rank1_instance(), seed in any::<u64>()) {
        let (p, lambda, target) = inst;
        prop_assume!(!lambda[0].is_integer());
        let prob = InterpolationProblem { delta: newton_polytope(&p).unwrap(), lambda, p, target };
        let a = interpolate_with(&prob, &PivotOrder::Natural).unwrap();
        let b = interpolate_with(&prob, &PivotOrder::Reversed).unwrap();
        let n = prob.delta.lattice_points_shifted(&prob.lambda).len();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut s = seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let c = interpolate_with(&prob, &PivotOrder::Custom(perm)).unwrap();
        prop_assert_eq!(&a.f, &b.f);
        prop_assert_eq!(&a.f, &c.f);
        prop_assert!(a.f.sub(&prob.target).divides(&prob.p));
    }

    #[test]
    fn kernel_law(inst in rank1_instance(), shift in -3i64..=3, c in -2i64..=2, hc in -2i64..=2) {
        let (p, _, target) = inst;
        let prob = InterpolationProblem { delta: newton_polytope(&p).unwrap(), lambda: vec![q(shift)], p, target };
        let sol = interpolate(&prob).unwrap();
        let r = prob.p.ring().clone();
        let kernel = sol.kernel.clone().unwrap();
        prop_assert_eq!(&kernel, &prob.p.shift(&a_weight(&r, &[shift])));
        // every f0 + c*a^lambda*P solves the same problem
        let g = sol.f.add(&kernel.mul(&LaurentPoly::term(&r, c, Weight(vec![q(0), qr(hc, 2)]))));
        prop_assert!(g.sub(&prob.target).divides(&prob.p));
        if !g.is_zero() {
            let win = prob.delta.translate(&prob.lambda);
            prop_assert!(win.contains_polytope(&newton_polytope(&g).unwrap()));
        }
    }
}
