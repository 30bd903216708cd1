//! Property tests of the algebraic layer and invariants of flows and jets.

use ballgen_core::cauchy::second_derivative_along;
use ballgen_core::cert::{estimate_dilation, shift_by_hbeta};
use ballgen_core::corpus::{
    contraction, cubic_self_map_generator, example_6_1, example_6_1_quad, example_6_2, example_6_2_quad, h_beta, heisenberg,
    unitary_rotation,
};
use ballgen_core::flow::{flow, flow_at, julia_monotonicity};
use ballgen_core::geometry::ball_sample;
use ballgen_core::jet::{jet_at_e1, pair, quadratic_truncation};
use ballgen_core::jet_criteria::check_group_conditions;
use ballgen_core::poly::MultiPoly;
use ballgen_core::{Complex64, CxVec, RationalField};
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn coeff() -> impl Strategy<Value = Complex64> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b)| c(a, b))
}

fn poly2() -> impl Strategy<Value = MultiPoly> {
    prop::collection::vec(((0u32..3, 0u32..3), coeff()), 0..6)
        .prop_map(|terms| MultiPoly::from_terms(2, terms.into_iter().map(|((a, b), c)| (vec![a, b], c))))
}

fn point2() -> impl Strategy<Value = [Complex64; 2]> {
    (coeff(), coeff()).prop_map(|(a, b)| [a * 0.4, b * 0.4])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn products_and_sums_evaluate_pointwise(p in poly2(), q in poly2(), z in point2()) {
        let prod = (&p * &q).eval(&z);
        prop_assert!((prod - p.eval(&z) * q.eval(&z)).norm() <= 1e-10 * (1.0 + prod.norm()));
        let sum = (&p + &q).eval(&z);
        prop_assert!((sum - p.eval(&z) - q.eval(&z)).norm() <= 1e-12 * (1.0 + sum.norm()));
    }

    #[test]
    fn recentering_preserves_values(p in poly2(), z in point2(), center in point2()) {
        let moved = p.shifted(&center);
        let x = [z[0] - center[0], z[1] - center[1]];
        let a = moved.eval(&x);
        prop_assert!((a - p.eval(&z)).norm() <= 1e-10 * (1.0 + a.norm()));
    }

    #[test]
    fn series_quotient_times_denominator(p in poly2(), d0 in coeff(), q in poly2()) {
        prop_assume!(d0.norm() > 0.5);
        let den = &MultiPoly::constant(2, d0) + &(&q * &MultiPoly::var(2, 0));
        let quot = MultiPoly::series_div(&p, &den, 3).unwrap();
        let back = (&quot * &den).truncate(3);
        let want = p.truncate(3);
        let diff = &back - &want;
        prop_assert!(diff.max_abs_coeff() <= 1e-9 * (1.0 + want.max_abs_coeff()));
    }

    #[test]
    fn h_beta_jets_are_group_jets(beta in -3.0..3.0f64, n in 2usize..5) {
        let v = check_group_conditions(&jet_at_e1(&h_beta(n, beta), 3).unwrap(), -beta, 1e-12).unwrap();
        prop_assert!(v.is_group());
    }
}

#[test]
fn quadratic_truncation_keeps_the_jet() {
    for field in [example_6_1(), example_6_2(), h_beta(3, 0.7)] {
        let jet = jet_at_e1(&field, 2).unwrap();
        let quad = quadratic_truncation(&jet).unwrap();
        let again = jet_at_e1(&quad, 2).unwrap();
        assert_eq!(again.t, jet.t);
        for (k, v) in &jet.q2 {
            assert!((again.q2[k] - v).norm() < 1e-14);
        }
    }
    let q = example_6_1_quad().evaluate(&CxVec::from_real(&[0.0, 1.0])).unwrap();
    assert!((q[0] - c(1.0, 0.0)).norm() < 1e-15 && (q[1] - c(-15.0 / 16.0, 0.0)).norm() < 1e-15);
}

#[test]
fn second_derivative_normalization_matches_cauchy() {
    let fields = [example_6_1(), example_6_2(), example_6_1_quad(), example_6_2_quad(), h_beta(2, 1.3), cubic_self_map_generator(2)];
    for field in fields {
        let jet = jet_at_e1(&field, 3).unwrap();
        let from_jet = jet.derivative(0, &pair(2, 0, 0));
        let cauchy = second_derivative_along(&field, &CxVec::e1(2), 0, 0.5, 64).unwrap()[0];
        assert!((from_jet - cauchy).norm() <= 1e-8, "{}: {from_jet} vs {cauchy}", field.label());
    }
}

fn generators() -> Vec<RationalField> {
    vec![
        h_beta(2, 1.0),
        h_beta(2, -1.0),
        example_6_1(),
        example_6_2(),
        contraction(2, 0.75),
        unitary_rotation(&[vec![c(0.0, 0.8)]]),
        heisenberg(&[c(0.4, -0.3)]),
        cubic_self_map_generator(2),
        RationalField::zero(2),
    ]
}

#[test]
fn tighter_tolerance_reduces_endpoint_error() {
    let z0 = CxVec::from_re_im(&[0.3, 0.1, 0.2, -0.3]);
    for field in generators() {
        let reference = flow_at(&field, &z0, 2.0, 1e-12).unwrap();
        let coarse = flow_at(&field, &z0, 2.0, 1e-6).unwrap().distance(&reference);
        let fine = flow_at(&field, &z0, 2.0, 1e-7).unwrap().distance(&reference);
        if coarse <= 1e-13 {
            continue;
        }
        assert!(fine <= coarse / 2.0, "{}: {coarse:e} -> {fine:e}", field.label());
    }
}

#[test]
fn generator_flows_stay_in_the_ball() {
    for field in generators() {
        for z0 in ball_sample(2, 8, 21, 0.9) {
            let traj = flow(&field, &z0, 5.0, 1e-9).unwrap();
            assert!(!traj.exited, "{} left the ball from {z0:?}", field.label());
            assert!(traj.points.iter().all(|p| p.norm() < 1.0));
        }
    }
}

#[test]
fn horospheres_contract_at_the_estimated_rate() {
    let grid: Vec<f64> = [0.25, 0.5, 1.0, 1.5, 2.0].to_vec();
    for field in generators() {
        let beta = estimate_dilation(&field).unwrap().beta;
        for z0 in ball_sample(2, 4, 8, 0.8) {
            let r = julia_monotonicity(&field, &z0, beta, &grid, 1e-6).unwrap();
            assert!(r.passed(), "{} beta {beta}: {r:?}", field.label());
        }
    }
}

#[test]
fn shifting_by_h_beta_moves_the_dilation() {
    for b in [-1.0, 0.5] {
        let shifted = shift_by_hbeta(&example_6_2(), b);
        let est = estimate_dilation(&shifted).unwrap();
        assert!((est.radial - (-1.0 - b)).abs() < 1e-6, "{est:?}");
    }
}
