//! Numerical probes of boundary behavior at `e_1`: boundedness in Korányi
//! regions, angular limits along approach curves, and equality of slice
//! dilations.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::cauchy::{derivative_matrix, koranyi_delta, CauchyOptions};
use crate::cert::estimate_dilation;
use crate::cvec::CxVec;
use crate::error::Result;
use crate::extrapolate::settled_limit;
use crate::field::RationalField;
use crate::geometry::{koranyi_sample, ApproachCurve, KoranyiRegion, SHELLS};

/// Fitted exponents at or below this count as bounded.
pub const BOUNDED_SLOPE: f64 = 0.05;
pub const GROWTH_R_SQUARED: f64 = 0.9;
/// Estimates along different curves agreeing within this are consistent.
pub const CURVE_AGREEMENT: f64 = 1e-4;
pub const SLICE_AGREEMENT: f64 = 1e-5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Bounded,
    Growing,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeReport {
    pub quantity_id: String,
    /// Amplitude of the sampled Korányi region, for shell probes.
    pub amplitude: Option<f64>,
    pub sup_observed: f64,
    /// Sup per shell `|1 - z_1| ~ 10^{-k}`, `k = 1..6`.
    pub shell_sups: Vec<f64>,
    pub trend: Trend,
    /// Slope of `log sup` against `log 1/|1 - z_1|`.
    pub growth_exponent: Option<f64>,
    pub r_squared: Option<f64>,
    pub curve: Option<String>,
    pub limit_estimate: Option<[f64; 2]>,
    pub limit_residual: Option<f64>,
    /// For limit probes: all curves agree; for the slice probe: every
    /// deviation is within tolerance.
    pub consistent: Option<bool>,
    /// Estimates of open questions; never part of a verdict.
    pub report_only: bool,
    /// `(alpha, max |beta_v - beta|)` pairs for the slice probe.
    pub profile: Vec<[f64; 2]>,
    pub note: Option<String>,
}

impl ProbeReport {
    fn new(quantity_id: impl Into<String>) -> Self {
        ProbeReport {
            quantity_id: quantity_id.into(),
            amplitude: None,
            sup_observed: 0.0,
            shell_sups: Vec::new(),
            trend: Trend::Inconclusive,
            growth_exponent: None,
            r_squared: None,
            curve: None,
            limit_estimate: None,
            limit_residual: None,
            consistent: None,
            report_only: false,
            profile: Vec::new(),
            note: None,
        }
    }

    pub fn limit(&self) -> Option<Complex64> {
        self.limit_estimate.map(|[re, im]| Complex64::new(re, im))
    }
}

fn one_minus_z1(z: &CxVec) -> Complex64 {
    Complex64::new(1.0, 0.0) - z[0]
}

/// Least-squares slope and `R^2` of `y` against `x`.
fn fit_line(x: &[f64], y: &[f64]) -> (f64, f64) {
    let m = x.len() as f64;
    let mx = x.iter().sum::<f64>() / m;
    let my = y.iter().sum::<f64>() / m;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, r2)
}

/// Trend of per-shell sups against the mean `log 1/|1 - z_1|` of each shell.
fn classify(report: &mut ProbeReport, depth: &[f64]) {
    let sups = &report.shell_sups;
    report.sup_observed = sups.iter().cloned().fold(0.0, f64::max);
    if report.sup_observed <= 1e-14 {
        report.trend = Trend::Bounded;
        report.growth_exponent = Some(0.0);
        report.r_squared = Some(1.0);
        return;
    }
    let (x, y): (Vec<f64>, Vec<f64>) = depth.iter().zip(sups).filter(|(_, s)| **s > 0.0).map(|(d, s)| (*d, s.ln())).unzip();
    if x.len() < 3 {
        report.note = Some("too few shells with nonzero values".into());
        return;
    }
    let (slope, r2) = fit_line(&x, &y);
    report.growth_exponent = Some(slope);
    report.r_squared = Some(r2);
    report.trend = if slope <= BOUNDED_SLOPE {
        Trend::Bounded
    } else if r2 >= GROWTH_R_SQUARED {
        Trend::Growing
    } else {
        Trend::Inconclusive
    };
}

type Quantities<'a> = Vec<(&'static str, Box<dyn Fn(&CxVec) -> Result<f64> + Sync + 'a>)>;

/// Evaluates each quantity over Korányi shells of closeness `10^{-k}`.
fn shell_probe(field: &RationalField, amplitude: f64, samples: usize, seed: u64, quantities: &Quantities) -> Result<Vec<ProbeReport>> {
    let region = KoranyiRegion::new(amplitude);
    let per_shell = (samples / SHELLS as usize).max(1);
    let shells: Vec<Result<(f64, Vec<f64>)>> = (1..=SHELLS)
        .into_par_iter()
        .map(|k| {
            let closeness = 10f64.powi(-(k as i32));
            let pts = koranyi_sample(&region, field.dim(), per_shell, seed.wrapping_add(k as u64 * 0x9E37_79B9), closeness)?;
            let depth = pts.iter().map(|z| -one_minus_z1(z).norm().ln()).sum::<f64>() / pts.len() as f64;
            let mut sups = vec![0.0f64; quantities.len()];
            for z in &pts {
                for (i, (_, q)) in quantities.iter().enumerate() {
                    sups[i] = sups[i].max(q(z)?);
                }
            }
            Ok((depth, sups))
        })
        .collect();
    let shells: Vec<(f64, Vec<f64>)> = shells.into_iter().collect::<Result<_>>()?;
    let depth: Vec<f64> = shells.iter().map(|s| s.0).collect();
    Ok(quantities
        .iter()
        .enumerate()
        .map(|(i, (id, _))| {
            let mut r = ProbeReport::new(*id);
            r.amplitude = Some(amplitude);
            r.shell_sups = shells.iter().map(|s| s.1[i]).collect();
            classify(&mut r, &depth);
            r
        })
        .collect())
}

/// `|<G,e_1>|/|z_1 - 1|` (`hyp_star`) and `max_j |<G,e_j>|/|z_1 - 1|^{1/2}`
/// (`hyp_star_star`) over Korányi shells.
pub fn probe_hypothesis(field: &RationalField, amplitude: f64, samples: usize, seed: u64) -> Result<Vec<ProbeReport>> {
    let mut q: Quantities = vec![(
        "hyp_star",
        Box::new(|z: &CxVec| Ok(field.evaluate(z)?[0].norm() / one_minus_z1(z).norm())),
    )];
    if field.dim() > 1 {
        q.push((
            "hyp_star_star",
            Box::new(|z: &CxVec| {
                let g = field.evaluate(z)?;
                Ok(g.tail().iter().map(|c| c.norm()).fold(0.0, f64::max) / one_minus_z1(z).norm().sqrt())
            }),
        ));
    }
    shell_probe(field, amplitude, samples, seed, &q)
}

/// Cauchy radii adapted to the point's own Korányi amplitude, nested in the
/// region of twice that amplitude.
fn jacobian(field: &RationalField, z: &CxVec) -> Result<nalgebra::DMatrix<Complex64>> {
    let amp = KoranyiRegion::amplitude_of(z).max(1.0);
    derivative_matrix(field, z, &CauchyOptions::koranyi(koranyi_delta(amp, 2.0 * amp)))
}

/// Entries of `dG_z` over Korányi shells: `dG_11`, `dG_kh` (largest
/// `|<dG_z(e_h), e_k>|`, `h, k >= 2`), `dG_j1_over_sqrt`
/// (`|<dG_z(e_j), e_1>|/|1 - z_1|^{1/2}`) and `sqrt_dG_1j`
/// (`|1 - z_1|^{1/2} |<dG_z(e_1), e_j>|`).
pub fn probe_derivative_bounds(field: &RationalField, amplitude: f64, samples: usize, seed: u64) -> Result<Vec<ProbeReport>> {
    let n = field.dim();
    let region = KoranyiRegion::new(amplitude);
    let per_shell = (samples / SHELLS as usize).max(1);
    let shells: Vec<Result<(f64, [f64; 4])>> = (1..=SHELLS)
        .into_par_iter()
        .map(|k| {
            let closeness = 10f64.powi(-(k as i32));
            let pts = koranyi_sample(&region, n, per_shell, seed.wrapping_add(k as u64 * 0x9E37_79B9), closeness)?;
            let depth = pts.iter().map(|z| -one_minus_z1(z).norm().ln()).sum::<f64>() / pts.len() as f64;
            let mut sups = [0.0f64; 4];
            for z in &pts {
                let d = jacobian(field, z)?;
                let s = one_minus_z1(z).norm().sqrt();
                sups[0] = sups[0].max(d[(0, 0)].norm());
                for a in 1..n {
                    for b in 1..n {
                        sups[1] = sups[1].max(d[(a, b)].norm());
                    }
                    sups[2] = sups[2].max(d[(0, a)].norm() / s);
                    sups[3] = sups[3].max(d[(a, 0)].norm() * s);
                }
            }
            Ok((depth, sups))
        })
        .collect();
    let shells: Vec<(f64, [f64; 4])> = shells.into_iter().collect::<Result<_>>()?;
    let depth: Vec<f64> = shells.iter().map(|s| s.0).collect();
    let ids = ["dG_11", "dG_kh", "dG_j1_over_sqrt", "sqrt_dG_1j"];
    let count = if n > 1 { 4 } else { 1 };
    Ok(ids[..count]
        .iter()
        .enumerate()
        .map(|(i, id)| {
            let mut r = ProbeReport::new(*id);
            r.amplitude = Some(amplitude);
            r.shell_sups = shells.iter().map(|s| s.1[i]).collect();
            classify(&mut r, &depth);
            r
        })
        .collect())
}

type CurveQuantity<'a> = Box<dyn Fn(&CxVec) -> Result<Complex64> + Sync + 'a>;

/// Richardson limit of each quantity along each curve. Failures are
/// recorded in the report rather than returned. `sqrt_abscissa`
/// extrapolates in `t^{1/2}` instead of `t`.
fn curve_limits(field: &RationalField, quantities: Vec<(String, CurveQuantity)>, sqrt_abscissa: bool) -> Vec<ProbeReport> {
    let curves = ApproachCurve::defaults(field.dim());
    let mut out = Vec::new();
    for (id, q) in &quantities {
        let mut group: Vec<ProbeReport> = curves
            .par_iter()
            .map(|curve| {
                let mut r = ProbeReport::new(id.clone());
                r.curve = Some(curve.name());
                let ts = curve.grid();
                let values: Result<Vec<Complex64>> = ts.iter().map(|&t| q(&curve.point(t, field.dim()))).collect();
                let abscissa: Vec<f64> = if sqrt_abscissa { ts.iter().map(|t| t.sqrt()).collect() } else { ts.clone() };
                match values.and_then(|v| {
                    r.sup_observed = v.iter().map(|c| c.norm()).fold(0.0, f64::max);
                    settled_limit(id, &abscissa, &v)
                }) {
                    Ok(est) => {
                        r.limit_estimate = Some([est.value.re, est.value.im]);
                        r.limit_residual = Some(est.residual);
                    }
                    Err(e) => r.note = Some(e.to_string()),
                }
                r
            })
            .collect();
        let estimates: Vec<Complex64> = group.iter().filter_map(|r| r.limit()).collect();
        let consistent = estimates.len() == group.len()
            && estimates.iter().all(|a| estimates.iter().all(|b| (a - b).norm() <= CURVE_AGREEMENT));
        for r in &mut group {
            r.consistent = Some(consistent);
        }
        out.extend(group);
    }
    out
}

/// Angular limits of `<G,e_1>/(z_1 - 1)` (`limit_2`), `<dG_z(e_1), e_1>`
/// (`limit_3`) and `<dG_z(e_j), e_1>` (`limit_4_j`) along the default
/// curves. When `beta_hint` is given, the note records the largest
/// distance of the `limit_2`/`limit_3` estimates from it.
///
/// The limits are only meaningful when both hypothesis quantities are
/// bounded; otherwise every report is marked inconclusive.
pub fn probe_limits(field: &RationalField, beta_hint: Option<f64>, seed: u64) -> Result<Vec<ProbeReport>> {
    let n = field.dim();
    let hypothesis = probe_hypothesis(field, 2.0, 300, seed)?;
    let bounded = hypothesis.iter().all(|r| r.trend == Trend::Bounded);
    let mut q: Vec<(String, CurveQuantity)> = vec![
        ("limit_2".into(), Box::new(|z: &CxVec| Ok(field.evaluate(z)?[0] / (z[0] - 1.0)))),
        ("limit_3".into(), Box::new(|z: &CxVec| Ok(jacobian(field, z)?[(0, 0)]))),
    ];
    for j in 1..n {
        q.push((format!("limit_4_{}", j + 1), Box::new(move |z: &CxVec| Ok(jacobian(field, z)?[(0, j)]))));
    }
    let mut reports = curve_limits(field, q, false);
    for r in &mut reports {
        if !bounded {
            r.trend = Trend::Inconclusive;
            r.consistent = None;
            r.note = Some("hypothesis quantities are not bounded; limits are not asserted".into());
            continue;
        }
        r.trend = Trend::Bounded;
        if let (Some(beta), Some(est), false) = (beta_hint, r.limit(), r.quantity_id.starts_with("limit_4")) {
            r.note = Some(format!("distance from dilation hint: {:.3e}", (est - beta).norm()));
        }
    }
    Ok(reports)
}

/// Report-only estimates of `<G,e_j>/(1 - z_1)^{1/2}` and
/// `(1 - z_1)^{1/2} <dG_z(e_1), e_j>` along the default curves.
pub fn probe_open_limits(field: &RationalField) -> Vec<ProbeReport> {
    let n = field.dim();
    let mut q: Vec<(String, CurveQuantity)> = Vec::new();
    for j in 1..n {
        q.push((format!("open_value_{}", j + 1), Box::new(move |z: &CxVec| Ok(field.evaluate(z)?[j] / one_minus_z1(z).sqrt()))));
        q.push((format!("open_derivative_{}", j + 1), Box::new(move |z: &CxVec| Ok(jacobian(field, z)?[(j, 0)] * one_minus_z1(z).sqrt()))));
    }
    let mut reports = curve_limits(field, q, true);
    for r in &mut reports {
        r.report_only = true;
    }
    reports
}

/// Largest `|beta_v - beta|` over the v-grid, where `beta` is the radial
/// dilation, with the per-`alpha` profile.
pub fn probe_slice_dilation_equality(field: &RationalField) -> Result<ProbeReport> {
    let est = estimate_dilation(field)?;
    let mut r = ProbeReport::new("slice_dilation_equality");
    let mut profile: Vec<[f64; 2]> = Vec::new();
    for d in &est.per_direction {
        let dev = (d.beta_v - est.radial).abs();
        match profile.iter_mut().find(|p| p[0] == d.v.alpha()) {
            Some(p) => p[1] = p[1].max(dev),
            None => profile.push([d.v.alpha(), dev]),
        }
    }
    profile.sort_by(|a, b| a[0].total_cmp(&b[0]));
    r.sup_observed = profile.iter().map(|p| p[1]).fold(0.0, f64::max);
    r.limit_estimate = Some([est.radial, 0.0]);
    r.limit_residual = Some(est.grid_residual);
    r.consistent = Some(r.sup_observed <= SLICE_AGREEMENT);
    r.trend = Trend::Bounded;
    r.profile = profile;
    if r.consistent == Some(false) {
        r.note = Some("slice dilations differ from the radial dilation".into());
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{example_4_2, example_6_1, h_beta};
    use crate::poly::MultiPoly;

    fn find<'a>(reports: &'a [ProbeReport], id: &str) -> &'a ProbeReport {
        reports.iter().find(|r| r.quantity_id == id).unwrap()
    }

    #[test]
    fn hypothesis_on_corpus() {
        let r = probe_hypothesis(&example_4_2(), 2.0, 120, 1).unwrap();
        assert_eq!(find(&r, "hyp_star").sup_observed, 0.0);
        assert_eq!(find(&r, "hyp_star").trend, Trend::Bounded);
        assert_eq!(find(&r, "hyp_star_star").trend, Trend::Growing);
        let r = probe_hypothesis(&h_beta(2, 1.0), 2.0, 120, 1).unwrap();
        assert!(r.iter().all(|p| p.trend == Trend::Bounded), "{r:?}");
        assert!(find(&r, "hyp_star").sup_observed <= 1.0 + 1e-12);
        let r = probe_hypothesis(&example_6_1(), 2.0, 120, 1).unwrap();
        assert!((find(&r, "hyp_star").sup_observed - 1.0).abs() < 1e-12);
    }

    #[test]
    fn derivative_growth_of_example_4_2() {
        let r = probe_derivative_bounds(&example_4_2(), 2.0, 60, 3).unwrap();
        let kh = find(&r, "dG_kh");
        assert_eq!(kh.trend, Trend::Growing);
        assert!(kh.growth_exponent.unwrap() >= 0.9, "{kh:?}");
        let r = probe_derivative_bounds(&h_beta(2, 1.0), 2.0, 60, 3).unwrap();
        assert!(r.iter().all(|p| p.trend == Trend::Bounded), "{r:?}");
        let r = probe_derivative_bounds(&RationalField::zero(2), 2.0, 60, 3).unwrap();
        assert!(r.iter().all(|p| p.sup_observed == 0.0));
    }

    #[test]
    fn limits_of_h_beta() {
        let beta = 1.5;
        let r = probe_limits(&h_beta(2, beta), Some(-beta), 0).unwrap();
        assert_eq!(r.len(), 15);
        for p in &r {
            let target = if p.quantity_id == "limit_4_2" { 0.0 } else { -beta };
            assert!((p.limit().unwrap() - target).norm() < 1e-6, "{p:?}");
            assert_eq!(p.consistent, Some(true));
        }
        let r = probe_limits(&example_4_2(), None, 0).unwrap();
        assert!(r.iter().all(|p| p.trend == Trend::Inconclusive));
    }

    #[test]
    fn open_limits_are_report_only() {
        let f = RationalField::polynomial("half", vec![MultiPoly::zero(2), MultiPoly::var(2, 1).scale(&Complex64::new(-0.5, 0.0))]);
        let r = probe_open_limits(&f);
        assert!(r.iter().all(|p| p.report_only));
        for p in &r {
            if let Some(l) = p.limit() {
                assert!(l.norm() < 1e-4, "{p:?}");
            }
        }
        assert!(probe_open_limits(&h_beta(2, 1.0)).iter().all(|p| p.limit().is_none_or(|l| l.norm() < 1e-4)));
    }

    #[test]
    fn slice_equality() {
        let r = probe_slice_dilation_equality(&example_6_1()).unwrap();
        assert!(r.sup_observed <= 1e-5 && r.consistent == Some(true), "{r:?}");
        let r = probe_slice_dilation_equality(&example_4_2()).unwrap();
        assert_eq!(r.consistent, Some(false));
        for [alpha, dev] in &r.profile {
            assert!((dev - (1.0 / (alpha * alpha) - 1.0)).abs() < 1e-6, "{alpha} {dev}");
        }
        assert!(probe_slice_dilation_equality(&h_beta(2, 2.0)).unwrap().sup_observed < 1e-9);
    }
}
