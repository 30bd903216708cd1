//! Identities linking the ball and its geodesic slices, checked on seeded
//! random polynomial fields.

use ballgen_core::corpus::{h_beta, random_polynomial_field};
use ballgen_core::geometry::{
    ball_sample, disc_expression, disc_pairing, generator_expression, poisson, poisson_disc, poisson_pairing, seeded_rng,
};
use ballgen_core::slice::{geodesic, projection, retraction, slice_reduce, SliceParam};
use ballgen_core::{Complex64, CxVec};
use rand::Rng;

fn random_slice<R: Rng>(rng: &mut R, dim: usize) -> SliceParam {
    let alpha = rng.gen_range(0.05..=1.0);
    let dir: Vec<Complex64> = (1..dim).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    SliceParam::from_alpha(alpha, &dir).unwrap()
}

fn random_disc_point<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::from_polar(0.95 * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..std::f64::consts::TAU))
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

#[test]
fn poisson_on_geodesics_scales_by_alpha_squared() {
    let mut rng = seeded_rng(1, 0);
    for _ in 0..200 {
        let v = random_slice(&mut rng, 3);
        let zeta = random_disc_point(&mut rng);
        let lhs = poisson(&geodesic(&v, zeta)).unwrap();
        let rhs = poisson_disc(zeta).unwrap() / (v.alpha() * v.alpha());
        assert!(close(lhs, rhs, 1e-10), "{lhs} {rhs}");
    }
}

#[test]
fn generator_expression_agrees_with_its_slice() {
    let mut rng = seeded_rng(2, 0);
    for _ in 0..50 {
        let dim = rng.gen_range(2..=3);
        let field = random_polynomial_field(&mut rng, dim, 3, 1.0);
        for _ in 0..10 {
            let v = random_slice(&mut rng, dim);
            for _ in 0..20 {
                let zeta = random_disc_point(&mut rng);
                let ball = generator_expression(&field, &geodesic(&v, zeta)).unwrap();
                let disc = disc_expression(zeta, slice_reduce(&field, &v, zeta).unwrap());
                assert!(close(ball, disc, 1e-10), "{ball} {disc}");
            }
        }
    }
}

#[test]
fn poisson_pairing_agrees_with_its_slice() {
    let mut rng = seeded_rng(3, 0);
    for _ in 0..50 {
        let dim = rng.gen_range(2..=3);
        let field = random_polynomial_field(&mut rng, dim, 3, 1.0);
        for _ in 0..10 {
            let v = random_slice(&mut rng, dim);
            let a2 = v.alpha() * v.alpha();
            for _ in 0..20 {
                let zeta = random_disc_point(&mut rng);
                let delta = rng.gen_range(-2.0..=2.0);
                let z = geodesic(&v, zeta);
                let g = slice_reduce(&field, &v, zeta).unwrap();
                let disc = disc_pairing(zeta, g) + delta * poisson_disc(zeta).unwrap();
                let ball = a2 * (poisson_pairing(&field, &z).unwrap() + delta * poisson(&z).unwrap());
                assert!(close(disc, ball, 1e-10), "{disc} {ball}");
            }
        }
    }
}

#[test]
fn slices_of_h_beta_and_shift_linearity() {
    let mut rng = seeded_rng(4, 0);
    let field = random_polynomial_field(&mut rng, 3, 3, 1.0);
    for b in [-2.0, -1.0, 0.0, 1.0, 2.0] {
        let h = h_beta(3, b);
        let shifted = field.add(&h).unwrap();
        for _ in 0..10 {
            let v = random_slice(&mut rng, 3);
            for _ in 0..20 {
                let zeta = random_disc_point(&mut rng);
                let expected = (1.0 - zeta * zeta) * (b / 2.0);
                assert!((slice_reduce(&h, &v, zeta).unwrap() - expected).norm() <= 1e-12);
                let lin = slice_reduce(&shifted, &v, zeta).unwrap() - slice_reduce(&field, &v, zeta).unwrap();
                assert!((lin - expected).norm() <= 1e-10);
            }
        }
    }
}

#[test]
fn retraction_is_idempotent_and_projection_inverts_geodesic() {
    let mut rng = seeded_rng(5, 0);
    for z in ball_sample(3, 100, 6, 0.9) {
        let v = random_slice(&mut rng, 3);
        let Ok(once) = retraction(&v, &z) else { continue };
        let twice = retraction(&v, &once).unwrap();
        assert!(once.distance(&twice) <= 1e-12 * (1.0 + once.norm()));
    }
    for _ in 0..100 {
        let v = random_slice(&mut rng, 2);
        let zeta = random_disc_point(&mut rng);
        assert!((projection(&v, &geodesic(&v, zeta)).unwrap() - zeta).norm() <= 1e-13);
        let on_disc = geodesic(&v, zeta);
        assert!(retraction(&v, &on_disc).unwrap().distance(&on_disc) <= 1e-13);
    }
    assert_eq!(projection(&SliceParam::e1(2), &CxVec::from_re_im(&[0.3, 0.2, 0.1, 0.4])).unwrap(), Complex64::new(0.3, 0.2));
}
