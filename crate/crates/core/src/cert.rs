//! Sampled certification of the generator property, of the boundary null
//! point structure at `e_1`, and of group generation.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::corpus::h_beta;
use crate::cvec::CxVec;
use crate::error::{Error, Result};
use crate::extrapolate::settled_limit;
use crate::field::RationalField;
use crate::geometry::{generator_expression_with, poisson, poisson_pairing_with, stratified_ball_sample, ApproachCurve, Stratified, Stratum};
use crate::report::{argmax, CertReport, Witness};
use crate::slice::{disc_group_check, slice_dilation_estimate, v_grid, Slice, SliceParam};

/// Evaluates `violation(z, G(z))` on the stratified sample and keeps the
/// maximum overall and per stratum.
fn sampled_ball_max<F>(check_id: &str, field: &RationalField, samples: usize, seed: u64, tol: f64, violation: F) -> Result<CertReport>
where
    F: Fn(&CxVec, &CxVec) -> Result<f64> + Sync,
{
    let points = stratified_ball_sample(field.dim(), samples, seed);
    let results: Vec<Result<f64>> = points
        .par_iter()
        .map(|p| {
            let g = field.evaluate(&p.point)?;
            violation(&p.point, &g)
        })
        .collect();
    // first error in sample order, independent of scheduling
    let values: Vec<f64> = results.into_iter().collect::<Result<_>>()?;
    let best = argmax(&values).expect("nonempty sample");
    let mut report = CertReport::from_max(check_id, values[best], Some(Witness::Ball(points[best].point.clone())), points.len(), tol, seed);
    add_stratum_maxima(&mut report, &points, &values);
    Ok(report)
}

fn add_stratum_maxima(report: &mut CertReport, points: &[Stratified<CxVec>], values: &[f64]) {
    let mut bulk = f64::NEG_INFINITY;
    let mut shells = f64::NEG_INFINITY;
    let mut near = f64::NEG_INFINITY;
    for (p, &v) in points.iter().zip(values) {
        match p.stratum {
            Stratum::Bulk => bulk = bulk.max(v),
            Stratum::NearE1 => near = near.max(v),
            Stratum::Shell(k) => {
                shells = shells.max(v);
                let key = format!("max_shell_{k}");
                let e = report.extras.entry(key).or_insert(f64::NEG_INFINITY);
                *e = e.max(v);
            }
        }
    }
    report.extras.insert("max_bulk".into(), bulk);
    report.extras.insert("max_shells".into(), shells);
    if near > f64::NEG_INFINITY {
        report.extras.insert("max_near_e1".into(), near);
    }
}

/// Largest sampled value of
/// `Re<G(z), z>/(1 - |z|^2) - Re(G_1(z)/(1 - z_1)) - beta/2`.
/// A pass is consistent with `G` generating a semigroup with boundary
/// regular null point `e_1` and dilation at most `beta`.
pub fn certify_generator(field: &RationalField, beta: f64, samples: usize, seed: u64, tol: f64) -> Result<CertReport> {
    sampled_ball_max("generator", field, samples, seed, tol, |z, g| Ok(generator_expression_with(z, g) - beta / 2.0))
}

/// `du_z . G(z) + beta u(z)` divided by `max(1, |u(z)|)`. The sign is that
/// of the unscaled quantity; the scaling keeps the tolerance meaningful near
/// `e_1`, where `|u|` is large.
fn scaled_poisson_residual(z: &CxVec, g: &CxVec, beta: f64) -> Result<f64> {
    let u = poisson(z)?;
    Ok((poisson_pairing_with(z, g) + beta * u) / u.abs().max(1.0))
}

/// Largest sampled value of `du_z . G(z) + beta u(z)`, relative to
/// `max(1, |u(z)|)`.
pub fn certify_poisson(field: &RationalField, beta: f64, samples: usize, seed: u64, tol: f64) -> Result<CertReport> {
    sampled_ball_max("poisson", field, samples, seed, tol, |z, g| scaled_poisson_residual(z, g, beta))
}

/// Largest sampled `|du_z . G(z) + beta u(z)|` on the ball, relative to
/// `max(1, |u(z)|)`, and of the same identity for every slice of the v-grid.
pub fn certify_group(field: &RationalField, beta: f64, samples: usize, seed: u64, tol: f64) -> Result<CertReport> {
    let mut report = sampled_ball_max("group", field, samples, seed, tol, |z, g| Ok(scaled_poisson_residual(z, g, beta)?.abs()))?;
    let ball_max = report.max_violation;
    let grid = v_grid(field.dim(), seed);
    let per_slice = (samples / grid.len()).clamp(64, 400);
    let slices: Vec<Result<CertReport>> = grid
        .par_iter()
        .map(|v| disc_group_check(&Slice { field, v: v.clone() }, beta, per_slice, seed, tol))
        .collect();
    let slices: Vec<CertReport> = slices.into_iter().collect::<Result<_>>()?;
    let slice_values: Vec<f64> = slices.iter().map(|r| r.max_violation).collect();
    let worst = argmax(&slice_values).expect("grid is nonempty");
    let slice_max = slice_values[worst];
    report.extras.insert("ball_max".into(), ball_max);
    report.extras.insert("slice_max".into(), slice_max);
    report.samples_used += per_slice * grid.len();
    if slice_max > ball_max {
        let w = slices[worst].witness.clone();
        report = CertReport { max_violation: slice_max, ..report };
        if report.max_violation > tol {
            report.witness = w;
        }
    }
    report.verdict = if report.max_violation <= tol { crate::report::Verdict::Pass } else { crate::report::Verdict::Fail };
    if report.verdict == crate::report::Verdict::Pass && field.is_zero() {
        report.flags.push("trivial_group".into());
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DirectionDilation {
    pub v: SliceParam,
    pub beta_v: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DilationEstimate {
    /// `max(radial, sup of per-direction values)`.
    pub beta: f64,
    /// Limit of `<G(r e_1), e_1>/(r - 1)` as `r -> 1`.
    pub radial: f64,
    pub per_direction: Vec<DirectionDilation>,
    /// Largest extrapolation residual among all estimates.
    pub grid_residual: f64,
}

impl DilationEstimate {
    /// Value for the `e_1` slice, which must agree with the radial limit.
    pub fn e1_direction(&self) -> Option<f64> {
        self.per_direction.iter().find(|d| d.v.alpha() == 1.0).map(|d| d.beta_v)
    }
}

/// Checks `G(r e_1) -> 0` along the default radial grid: the norm at the
/// finest point is below `1e-3` and the last five norms do not increase.
pub fn check_radial_decay(field: &RationalField) -> Result<()> {
    let curve = ApproachCurve::radial();
    let norms: Vec<f64> = curve
        .grid()
        .iter()
        .map(|&t| Ok(field.evaluate(&curve.point(t, field.dim()))?.norm()))
        .collect::<Result<_>>()?;
    let finest = *norms.last().expect("grid is nonempty");
    let tail = &norms[norms.len() - 5..];
    let monotone = tail.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9) + 1e-14);
    if finest >= 1e-3 || !monotone {
        return Err(Error::NotANullPoint { finest_norm: finest });
    }
    Ok(())
}

/// Dilation at `e_1`: the radial limit plus slice dilations over the
/// v-grid.
pub fn estimate_dilation(field: &RationalField) -> Result<DilationEstimate> {
    check_radial_decay(field)?;
    let n = field.dim();
    let curve = ApproachCurve::radial();
    let ts = curve.grid();
    let quotients: Vec<Complex64> = ts
        .iter()
        .map(|&t| Ok(field.evaluate(&curve.point(t, n))?[0] / (-t)))
        .collect::<Result<_>>()?;
    let radial = settled_limit("radial dilation", &ts, &quotients)?;
    let grid = v_grid(n, 0);
    let estimates: Vec<Result<DirectionDilation>> = grid
        .par_iter()
        .map(|v| {
            let est = slice_dilation_estimate(field, v)?;
            Ok(DirectionDilation { v: v.clone(), beta_v: est.value.re, residual: est.residual })
        })
        .collect();
    let per_direction: Vec<DirectionDilation> = estimates.into_iter().collect::<Result<_>>()?;
    let sup = per_direction.iter().map(|d| d.beta_v).fold(f64::NEG_INFINITY, f64::max);
    let grid_residual = per_direction.iter().map(|d| d.residual).fold(radial.residual, f64::max);
    Ok(DilationEstimate { beta: radial.value.re.max(sup), radial: radial.value.re, per_direction, grid_residual })
}

/// `G + H_b`; shifts the dilation at `e_1` by `-b`.
pub fn shift_by_hbeta(field: &RationalField, b: f64) -> RationalField {
    let label = format!("{}+h-beta:{b}", field.label());
    field.add(&h_beta(field.dim(), b)).expect("same dimension").with_label(label)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{contraction, example_4_2, example_6_1, example_6_1_quad, example_6_2};
    use crate::field::RationalField;
    use crate::poly::MultiPoly;

    #[test]
    fn example_6_1_is_a_generator_and_its_truncation_is_not() {
        let r = certify_generator(&example_6_1(), 0.0, 20000, 7, 1e-9).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(r.extras["max_shells"] <= 1e-9);
        let r = certify_generator(&example_6_1_quad(), 0.0, 20000, 7, 1e-9).unwrap();
        assert!(!r.passed());
        assert!(r.max_violation >= 4e-3);
        let Some(Witness::Ball(w)) = &r.witness else { panic!("missing witness") };
        // witness close to the boundary point (1/sqrt2, -1/sqrt2)
        assert!(w[0].re > 0.5 && w[1].re < -0.5, "{w:?}");
    }

    #[test]
    fn h_beta_with_matching_bound() {
        for beta in [-2.0, -1.0, 0.5, 2.0] {
            let h = h_beta(2, beta);
            assert!(certify_generator(&h, -beta, 5000, 3, 1e-9).unwrap().passed());
            assert!(certify_poisson(&h, -beta, 5000, 3, 1e-9).unwrap().passed());
            assert!(certify_group(&h, -beta, 5000, 3, 1e-9).unwrap().passed());
            assert!(!certify_generator(&h, -beta - 0.1, 5000, 3, 1e-9).unwrap().passed());
        }
    }

    #[test]
    fn poisson_thresholds_for_h1() {
        let h1 = h_beta(2, 1.0);
        let neg = h1.neg();
        // du . (-H_1) = -u, so -u + b u <= 0 iff b >= 1
        assert!(certify_poisson(&neg, 1.0, 4000, 1, 1e-9).unwrap().passed());
        assert!(!certify_poisson(&neg, 0.9, 4000, 1, 1e-9).unwrap().passed());
        // du . H_1 = u, so u + b u <= 0 iff b >= -1
        assert!(certify_poisson(&h1, -1.0, 4000, 1, 1e-9).unwrap().passed());
        assert!(!certify_poisson(&h1, -1.1, 4000, 1, 1e-9).unwrap().passed());
    }

    #[test]
    fn zero_field_is_the_trivial_group() {
        let z = RationalField::zero(2);
        let r = certify_poisson(&z, 0.0, 1000, 1, 1e-12).unwrap();
        assert!(r.passed() && r.max_violation == 0.0);
        let g = certify_group(&z, 0.0, 1000, 1, 1e-12).unwrap();
        assert!(g.passed());
        assert_eq!(g.flags, vec!["trivial_group".to_string()]);
    }

    #[test]
    fn example_6_1_is_not_a_group() {
        let r = certify_group(&example_6_1(), -1.0, 4000, 1, 1e-9).unwrap();
        assert!(!r.passed());
    }

    #[test]
    fn dilations() {
        let est = estimate_dilation(&h_beta(2, 1.0)).unwrap();
        assert!((est.beta + 1.0).abs() < 1e-9 && (est.radial + 1.0).abs() < 1e-9);
        let est = estimate_dilation(&example_4_2()).unwrap();
        assert!(est.beta.abs() <= 1e-6, "{}", est.beta);
        for d in &est.per_direction {
            let a = d.v.alpha();
            assert!((d.beta_v - (1.0 - 1.0 / (a * a))).abs() < 1e-6);
        }
        let est = estimate_dilation(&example_6_1()).unwrap();
        assert!((est.beta + 1.0).abs() < 1e-9);
        assert!((est.e1_direction().unwrap() - est.radial).abs() < 1e-6);
        let est = estimate_dilation(&shift_by_hbeta(&h_beta(2, 1.0), 2.0)).unwrap();
        assert!((est.beta + 3.0).abs() < 1e-9);
    }

    #[test]
    fn non_null_point_is_rejected() {
        let g = RationalField::polynomial("const", vec![MultiPoly::one(2), MultiPoly::zero(2)]);
        assert!(matches!(estimate_dilation(&g), Err(Error::NotANullPoint { .. })));
    }

    #[test]
    fn self_map_generator_half_contraction() {
        // f(z) = ((1 + z1)/2, 0) gives G = ((1 - z1)/2, -z2)
        let half = Complex64::new(0.5, 0.0);
        let f = RationalField::polynomial(
            "f",
            vec![&MultiPoly::constant(2, half) + &MultiPoly::var(2, 0).scale(&half), MultiPoly::zero(2)],
        );
        let g = RationalField::from_self_map(&f).unwrap();
        let est = estimate_dilation(&g).unwrap();
        assert!((est.radial + 0.5).abs() < 1e-9);
        assert!(certify_generator(&g, -0.5, 10000, 5, 1e-9).unwrap().passed());
        assert!(!certify_generator(&g, -0.6, 10000, 5, 1e-9).unwrap().passed());
    }

    #[test]
    fn cone_sums_stay_generators() {
        let a = contraction(2, 0.75);
        let b = h_beta(2, 2.0);
        let sum = a.add(&b).unwrap();
        // dilations add: -1 + -2
        assert!(certify_generator(&sum, -3.0, 8000, 2, 1e-9).unwrap().passed());
        assert!(certify_generator(&example_6_2(), 0.0, 8000, 2, 1e-9).unwrap().passed());
    }

    #[test]
    fn shift_round_trip() {
        let g = example_6_1();
        let back = shift_by_hbeta(&shift_by_hbeta(&g, 1.25), -1.25);
        for (a, b) in back.components().iter().zip(g.components()) {
            assert_eq!(a.denominator, b.denominator);
            assert_eq!(a.numerator, b.numerator);
        }
        let z = shift_by_hbeta(&RationalField::zero(2), 0.5);
        assert_eq!(z.components()[0].numerator, h_beta(2, 0.5).components()[0].numerator);
    }
}
