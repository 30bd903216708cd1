//! Integration of `dz/dt = G(z)` inside the ball, semigroup and group laws,
//! Julia's horosphere inequality and the linear-fractional test.

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::cvec::CxVec;
use crate::error::{Error, Result};
use crate::field::RationalField;
use crate::geometry::{ball_sample, poisson};
use crate::report::{argmax, CertReport, Verdict, Witness};

/// Steps whose endpoint reaches this norm are rejected.
pub const BALL_GUARD: f64 = 1.0 - 1e-13;
pub const MIN_STEP: f64 = 1e-14;
const MAX_STEPS: usize = 2_000_000;

// Dormand–Prince 5(4) tableau.
// The field is autonomous, so the stage times are not needed.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
// Dense output weights of the fourth-order interpolant.
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

type State = Vec<Complex64>;

fn combine(y: &[Complex64], h: f64, terms: &[(f64, &State)]) -> State {
    let mut out = y.to_vec();
    for (c, k) in terms {
        if *c == 0.0 {
            continue;
        }
        for (o, ki) in out.iter_mut().zip(k.iter()) {
            *o += ki * (h * c);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
struct DenseSegment {
    t0: f64,
    h: f64,
    coeffs: [State; 5],
}

impl DenseSegment {
    fn eval(&self, t: f64) -> State {
        let s = (t - self.t0) / self.h;
        let s1 = 1.0 - s;
        let [r1, r2, r3, r4, r5] = &self.coeffs;
        (0..r1.len()).map(|i| r1[i] + (r2[i] + (r3[i] + (r4[i] + r5[i] * s1) * s) * s1) * s).collect()
    }
}

/// Accepted steps of an integration. `step_errors[k]` is the scaled error
/// estimate of the step ending at `times[k]` (0 for the initial point).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlowTrajectory {
    pub times: Vec<f64>,
    pub points: Vec<CxVec>,
    pub step_errors: Vec<f64>,
    /// Set when the trajectory could not be continued inside the ball (or
    /// the field's domain) up to the requested time.
    pub exited: bool,
    #[serde(skip)]
    dense: Vec<DenseSegment>,
}

impl FlowTrajectory {
    pub fn end_time(&self) -> f64 {
        *self.times.last().expect("trajectory has an initial point")
    }

    pub fn end_point(&self) -> &CxVec {
        self.points.last().expect("trajectory has an initial point")
    }

    /// Dense-output value at `t`, if `t` lies within the integrated range.
    pub fn at(&self, t: f64) -> Option<CxVec> {
        if t < 0.0 || t > self.end_time() {
            return None;
        }
        if t == 0.0 {
            return Some(self.points[0].clone());
        }
        let idx = self.dense.partition_point(|seg| seg.t0 + seg.h < t);
        let seg = self.dense.get(idx).or_else(|| self.dense.last())?;
        Some(CxVec(seg.eval(t)))
    }

    /// CSV with columns `t, re_z1, im_z1, ..., re_zn, im_zn, step_error`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let map_io = |e: csv::Error| Error::Validation(format!("csv output failed: {e}"));
        let mut w = csv::Writer::from_writer(out);
        let n = self.points[0].dim();
        let mut header = vec!["t".to_string()];
        for k in 1..=n {
            header.push(format!("re_z{k}"));
            header.push(format!("im_z{k}"));
        }
        header.push("step_error".into());
        w.write_record(&header).map_err(map_io)?;
        for ((t, p), e) in self.times.iter().zip(&self.points).zip(&self.step_errors) {
            let mut row = vec![t.to_string()];
            for c in p.as_slice() {
                row.push(c.re.to_string());
                row.push(c.im.to_string());
            }
            row.push(e.to_string());
            w.write_record(&row).map_err(map_io)?;
        }
        w.flush().map_err(|e| Error::Validation(format!("csv output failed: {e}")))?;
        Ok(())
    }
}

enum Rejection {
    Accuracy,
    Boundary,
}

/// Integrates `dz/dt = G(z)` from `z0` up to time `t_end` with an adaptive
/// Dormand–Prince 5(4) pair (mixed absolute/relative tolerance `tol`).
pub fn flow(field: &RationalField, z0: &CxVec, t_end: f64, tol: f64) -> Result<FlowTrajectory> {
    if z0.dim() != field.dim() {
        return Err(Error::DimensionMismatch { expected: field.dim(), got: z0.dim() });
    }
    if z0.norm() >= 1.0 {
        return Err(Error::domain("initial point must lie in the open ball", z0.as_slice()));
    }
    if !(t_end > 0.0) {
        return Err(Error::PreconditionFailed(format!("flow horizon {t_end} must be positive")));
    }
    let f = |y: &State| -> Result<State> { Ok(field.evaluate(&CxVec(y.clone()))?.0) };

    let mut traj = FlowTrajectory { times: vec![0.0], points: vec![z0.clone()], step_errors: vec![0.0], exited: false, dense: Vec::new() };
    let mut t = 0.0;
    let mut y: State = z0.0.clone();
    let mut k1 = f(&y)?;
    let mut h = t_end.min(0.01);
    let mut err_old: f64 = 1e-4;
    let mut last_rejection = Rejection::Accuracy;

    for _ in 0..MAX_STEPS {
        if t >= t_end {
            return Ok(traj);
        }
        if h < MIN_STEP {
            return match last_rejection {
                Rejection::Boundary => {
                    traj.exited = true;
                    Ok(traj)
                }
                Rejection::Accuracy => Err(Error::StepFailure { t }),
            };
        }
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }
        let stages = (|| -> Result<(State, State, State, State, State)> {
            let k2 = f(&combine(&y, h, &[(A21, &k1)]))?;
            let k3 = f(&combine(&y, h, &[(A31, &k1), (A32, &k2)]))?;
            let k4 = f(&combine(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]))?;
            let k5 = f(&combine(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]))?;
            let k6 = f(&combine(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]))?;
            let y_new = combine(&y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
            Ok((k3, k4, k5, k6, y_new))
        })();
        let Ok((k3, k4, k5, k6, y_new)) = stages else {
            // a stage left the field's domain
            last_rejection = Rejection::Boundary;
            h *= 0.5;
            continue;
        };
        let norm_new: f64 = y_new.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm_new >= BALL_GUARD {
            last_rejection = Rejection::Boundary;
            h *= 0.5;
            continue;
        }
        let Ok(k7) = f(&y_new) else {
            last_rejection = Rejection::Boundary;
            h *= 0.5;
            continue;
        };
        let mut sum = 0.0;
        for i in 0..y.len() {
            let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * h;
            let scale = tol + tol * y[i].norm().max(y_new[i].norm());
            sum += (e.norm() / scale).powi(2);
        }
        let err = (sum / y.len() as f64).sqrt();
        let fac11 = err.powf(0.17);
        if err <= 1.0 {
            let fac = (fac11 / err_old.powf(0.04) / 0.9).clamp(0.1, 5.0);
            err_old = err.max(1e-4);
            let r2: State = y_new.iter().zip(&y).map(|(a, b)| a - b).collect();
            let r3: State = k1.iter().zip(&r2).map(|(k, d)| k * h - d).collect();
            let r4: State = (0..y.len()).map(|i| r2[i] - k7[i] * h - r3[i]).collect();
            let r5: State = (0..y.len())
                .map(|i| (k1[i] * D1 + k3[i] * D3 + k4[i] * D4 + k5[i] * D5 + k6[i] * D6 + k7[i] * D7) * h)
                .collect();
            traj.dense.push(DenseSegment { t0: t, h, coeffs: [y.clone(), r2, r3, r4, r5] });
            t = if last { t_end } else { t + h };
            y = y_new;
            k1 = k7;
            traj.times.push(t);
            traj.points.push(CxVec(y.clone()));
            traj.step_errors.push(err * tol);
            h /= fac;
        } else {
            last_rejection = Rejection::Accuracy;
            h /= (fac11 / 0.9).min(5.0);
        }
    }
    Err(Error::StepFailure { t })
}

/// Endpoint of the flow at time `t`.
pub fn flow_at(field: &RationalField, z0: &CxVec, t: f64, tol: f64) -> Result<CxVec> {
    let traj = flow(field, z0, t, tol)?;
    if traj.exited {
        return Err(Error::PreconditionFailed(format!("trajectory left the ball before t = {t}")));
    }
    Ok(traj.end_point().clone())
}

/// `|phi_{t+s}(z0) - phi_t(phi_s(z0))|`.
pub fn semigroup_residual(field: &RationalField, z0: &CxVec, t: f64, s: f64, tol: f64) -> Result<f64> {
    let direct = flow_at(field, z0, t + s, tol)?;
    let mid = flow_at(field, z0, s, tol)?;
    let composed = flow_at(field, &mid, t, tol)?;
    Ok(direct.distance(&composed))
}

fn integration_tol(check_tol: f64) -> f64 {
    (check_tol * 1e-3).clamp(1e-13, 1e-10)
}

/// Largest `u(phi_t(z0)) - e^{-t beta} u(z0)` over `t_grid`. Also records
/// the largest absolute deviation, which vanishes for groups.
pub fn julia_monotonicity(field: &RationalField, z0: &CxVec, beta: f64, t_grid: &[f64], tol: f64) -> Result<CertReport> {
    let horizon = t_grid.iter().cloned().fold(0.0, f64::max);
    let u0 = poisson(z0)?;
    if horizon <= 0.0 {
        return Ok(CertReport::from_max("julia", f64::NEG_INFINITY, None, 0, tol, 0).with_extra("max_abs_deviation", 0.0));
    }
    let traj = flow(field, z0, horizon, integration_tol(tol))?;
    let mut values = Vec::with_capacity(t_grid.len());
    let mut max_abs: f64 = 0.0;
    let mut points = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let z = traj.at(t);
        let v = match &z {
            Some(z) => {
                let d = poisson(z)? - (-t * beta).exp() * u0;
                max_abs = max_abs.max(d.abs());
                d
            }
            None => f64::INFINITY,
        };
        values.push(v);
        points.push(z);
    }
    let best = argmax(&values).expect("nonempty grid");
    let witness = points[best].clone().map(Witness::Ball);
    let mut report = CertReport::from_max("julia", values[best], witness, t_grid.len(), tol, 0).with_extra("max_abs_deviation", max_abs);
    if traj.exited {
        report.flags.push("exited".into());
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroupInverse {
    /// `|phi^{-G}_t(phi^G_t(z0)) - z0|`, absent when the forward flow left
    /// the ball.
    pub residual: Option<f64>,
    pub forward_exited: bool,
    /// Whether the flow of `-G` from `z0` leaves the ball before time `t`.
    pub backward_exited: bool,
}

pub fn group_inverse_residual(field: &RationalField, z0: &CxVec, t: f64, tol: f64) -> Result<GroupInverse> {
    let neg = field.neg();
    let forward = flow(field, z0, t, tol)?;
    let backward = flow(&neg, z0, t, tol)?;
    let residual = if forward.exited {
        None
    } else {
        let back = flow(&neg, forward.end_point(), t, tol)?;
        if back.exited {
            None
        } else {
            Some(back.end_point().distance(z0))
        }
    };
    Ok(GroupInverse { residual, forward_exited: forward.exited, backward_exited: backward.exited })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LftFit {
    /// RMS over samples of `|(A z + b)/(<z,c> + 1) - phi_t(z)|`.
    pub rms_residual: f64,
    /// RMS of the multiplied-through (linear) residual.
    pub linearized_rms: f64,
    /// Condition number of the least-squares matrix.
    pub condition: f64,
    pub samples: usize,
}

/// Fits `z -> (A z + b)/(<z, c> + 1)` to `{(z_i, phi_t(z_i))}` by linear least
/// squares on `w (<z,c> + 1) = A z + b`.
pub fn lft_fit_residual(field: &RationalField, t: f64, sample_count: usize, seed: u64, tol: f64) -> Result<LftFit> {
    let n = field.dim();
    let starts = ball_sample(n, sample_count, seed, 0.7);
    let images: Vec<Result<CxVec>> = starts.par_iter().map(|z| flow_at(field, z, t, tol)).collect();
    let images: Vec<CxVec> = images.into_iter().collect::<Result<_>>()?;
    let unknowns = n * n + 2 * n;
    let rows = n * starts.len();
    let mut m = DMatrix::<Complex64>::zeros(rows, unknowns);
    let mut rhs = DVector::<Complex64>::zeros(rows);
    for (s, (z, w)) in starts.iter().zip(&images).enumerate() {
        for i in 0..n {
            let r = s * n + i;
            for j in 0..n {
                m[(r, i * n + j)] = z[j];
            }
            m[(r, n * n + i)] = Complex64::new(1.0, 0.0);
            for k in 0..n {
                m[(r, n * n + n + k)] = -w[i] * z[k];
            }
            rhs[r] = w[i];
        }
    }
    let svd = m.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if condition * condition > 1e12 {
        return Err(Error::IllConditioned { condition: condition * condition });
    }
    let x = svd.solve(&rhs, 0.0).map_err(|e| Error::PreconditionFailed(e.to_string()))?;
    let lin = &m * &x - &rhs;
    let linearized_rms = (lin.iter().map(|c| c.norm_sqr()).sum::<f64>() / starts.len() as f64).sqrt();
    let mut sq = 0.0;
    for (z, w) in starts.iter().zip(&images) {
        let mut den = Complex64::new(1.0, 0.0);
        for k in 0..n {
            den += x[n * n + n + k] * z[k];
        }
        for i in 0..n {
            let mut num = x[n * n + i];
            for j in 0..n {
                num += x[i * n + j] * z[j];
            }
            sq += (num / den - w[i]).norm_sqr();
        }
    }
    Ok(LftFit { rms_residual: (sq / starts.len() as f64).sqrt(), linearized_rms, condition, samples: starts.len() })
}

/// Report form of [`julia_monotonicity`] over several starting points.
pub fn julia_over_points(field: &RationalField, starts: &[CxVec], beta: f64, t_grid: &[f64], tol: f64) -> Result<CertReport> {
    let reports: Vec<Result<CertReport>> = starts.par_iter().map(|z| julia_monotonicity(field, z, beta, t_grid, tol)).collect();
    let reports: Vec<CertReport> = reports.into_iter().collect::<Result<_>>()?;
    let values: Vec<f64> = reports.iter().map(|r| r.max_violation).collect();
    let best = argmax(&values).expect("nonempty start set");
    let max_abs = reports.iter().map(|r| r.extras["max_abs_deviation"]).fold(0.0, f64::max);
    let mut out = reports[best].clone();
    out.samples_used = starts.len() * t_grid.len();
    out.extras.insert("max_abs_deviation".into(), max_abs);
    out.verdict = if out.max_violation <= tol { Verdict::Pass } else { Verdict::Fail };
    if out.verdict == Verdict::Pass {
        out.witness = None;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{example_6_1, example_6_2, h_beta};
    use crate::poly::MultiPoly;

    fn minus_identity(n: usize) -> RationalField {
        RationalField::identity(n).neg()
    }

    #[test]
    fn zero_field_is_stationary() {
        let z0 = CxVec::from_re_im(&[0.3, 0.1, -0.2, 0.0]);
        let traj = flow(&RationalField::zero(2), &z0, 2.0, 1e-10).unwrap();
        assert!(traj.points.iter().all(|p| *p == z0));
        assert_eq!(traj.end_time(), 2.0);
        assert_eq!(semigroup_residual(&RationalField::zero(2), &z0, 0.5, 0.5, 1e-10).unwrap(), 0.0);
        let h0 = flow(&h_beta(2, 0.0), &z0, 1.0, 1e-10).unwrap();
        assert_eq!(*h0.end_point(), z0);
    }

    #[test]
    fn linear_decay_matches_closed_form() {
        let g = minus_identity(1);
        let z0 = CxVec::from_re_im(&[0.5, 0.3]);
        let traj = flow(&g, &z0, 3.0, 1e-10).unwrap();
        for &t in &traj.times {
            let exact = z0.scale(Complex64::new((-t).exp(), 0.0));
            assert!(traj.at(t).unwrap().distance(&exact) < 1e-9);
        }
        // dense output between steps
        for k in 0..30 {
            let t = 0.1 * k as f64 + 0.037;
            let exact = z0.scale(Complex64::new((-t).exp(), 0.0));
            assert!(traj.at(t).unwrap().distance(&exact) < 1e-8, "t = {t}");
        }
    }

    #[test]
    fn h1_semigroup_and_group_laws() {
        let h = h_beta(2, 1.0);
        let z0 = CxVec::zeros(2);
        assert!(semigroup_residual(&h, &z0, 1.0, 1.0, 1e-10).unwrap() <= 1e-6);
        let inv = group_inverse_residual(&h, &CxVec::from_re_im(&[0.2, 0.1, -0.4, 0.3]), 1.0, 1e-10).unwrap();
        assert!(inv.residual.unwrap() <= 1e-6 && !inv.backward_exited);
    }

    #[test]
    fn julia_equality_for_h_beta() {
        let h = h_beta(2, 1.0);
        let grid: Vec<f64> = (1..=10).map(|k| 0.2 * k as f64).collect();
        let r = julia_monotonicity(&h, &CxVec::from_re_im(&[0.1, 0.4, 0.3, -0.2]), -1.0, &grid, 1e-6).unwrap();
        assert!(r.passed() && r.extras["max_abs_deviation"] <= 1e-6, "{r:?}");
        let r = julia_monotonicity(&example_6_1(), &CxVec::from_real(&[0.3, 0.5]), -1.0, &grid, 1e-6).unwrap();
        assert!(r.passed() && r.max_violation < -1e-4, "{r:?}");
    }

    #[test]
    fn reversed_example_6_2_leaves_the_ball() {
        let inv = group_inverse_residual(&example_6_2(), &CxVec::from_real(&[0.5, 0.2]), 2.0, 1e-9).unwrap();
        assert!(inv.backward_exited);
        let traj = flow(&example_6_2().neg(), &CxVec::from_real(&[0.5, 0.2]), 2.0, 1e-9).unwrap();
        assert!(traj.exited && traj.end_point().norm() < 1.0 && traj.end_time() < 2.0);
    }

    #[test]
    fn lft_fits() {
        let fit = lft_fit_residual(&h_beta(2, 1.0), 1.0, 48, 3, 1e-12).unwrap();
        assert!(fit.rms_residual <= 1e-8, "{fit:?}");
        let fit = lft_fit_residual(&minus_identity(2), 1.0, 48, 3, 1e-13).unwrap();
        assert!(fit.rms_residual <= 1e-10, "{fit:?}");
        let fit = lft_fit_residual(&crate::corpus::example_6_2_quad(), 1.0, 48, 3, 1e-12).unwrap();
        assert!(fit.rms_residual > 1e-4, "{fit:?}");
    }

    #[test]
    fn csv_columns() {
        let traj = flow(&minus_identity(2), &CxVec::from_real(&[0.1, 0.2]), 0.5, 1e-8).unwrap();
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "t,re_z1,im_z1,re_z2,im_z2,step_error");
        assert_eq!(lines.count(), traj.times.len());
    }

    #[test]
    fn bad_inputs() {
        let g = RationalField::polynomial("c", vec![MultiPoly::one(1)]);
        assert!(flow(&g, &CxVec::from_real(&[1.0]), 1.0, 1e-8).is_err());
        assert!(flow(&g, &CxVec::from_real(&[0.0]), 0.0, 1e-8).is_err());
        // constant field pushes the point out of the ball
        let traj = flow(&g, &CxVec::from_real(&[0.0]), 5.0, 1e-8).unwrap();
        assert!(traj.exited);
    }
}
