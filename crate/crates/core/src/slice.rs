//! Complex geodesics through `e_1` and the reduction of a ball field to a
//! disc field along them.
//!
//! For `v` with `<v, e_1> = alpha > 0` the geodesic is
//! `phi_v(zeta) = alpha (zeta - 1) v + e_1`, and the slice of `G` is the
//! push-forward of `G` along the holomorphic projection onto that disc.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::cvec::CxVec;
use crate::error::{Error, Result};
use crate::extrapolate::{settled_limit, LimitEstimate};
use crate::field::RationalField;
use crate::geometry::{disc_expression, disc_pairing, poisson_disc, seeded_rng, stratified_disc_sample, ApproachCurve};
use crate::report::{argmax, CertReport, Witness};

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A unit vector `v` with `<v, e_1> = alpha` real and positive.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SliceParam {
    v: CxVec,
    alpha: f64,
}

impl SliceParam {
    pub fn new(v: CxVec) -> Result<Self> {
        if (v.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidSlice(format!("|v| = {} is not 1", v.norm())));
        }
        if v[0].im.abs() > 1e-12 || v[0].re <= 0.0 {
            return Err(Error::InvalidSlice(format!("<v, e1> = {} is not real and positive", v[0])));
        }
        let alpha = v[0].re;
        let mut v = v;
        v[0] = Complex64::new(alpha, 0.0);
        Ok(SliceParam { v, alpha })
    }

    /// `v = (alpha, sqrt(1 - alpha^2) d / |d|)` for a nonzero `d` in C^{n-1}.
    pub fn from_alpha(alpha: f64, direction: &[Complex64]) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidSlice(format!("alpha = {alpha} is outside (0, 1]")));
        }
        let norm: f64 = direction.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let mut v = CxVec::zeros(direction.len() + 1);
        v[0] = Complex64::new(alpha, 0.0);
        if alpha < 1.0 {
            if norm == 0.0 {
                return Err(Error::InvalidSlice("transversal direction is zero".into()));
            }
            let s = (1.0 - alpha * alpha).sqrt() / norm;
            for (k, d) in direction.iter().enumerate() {
                v[k + 1] = d * s;
            }
        }
        Ok(SliceParam { v, alpha })
    }

    pub fn e1(dim: usize) -> Self {
        SliceParam { v: CxVec::e1(dim), alpha: 1.0 }
    }

    pub fn v(&self) -> &CxVec {
        &self.v
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn dim(&self) -> usize {
        self.v.dim()
    }

    /// `<z'', v''>`.
    fn tail_inner(&self, z: &CxVec) -> Complex64 {
        z.tail().iter().zip(self.v.tail()).map(|(a, b)| a * b.conj()).sum()
    }
}

/// `phi_v(zeta) = alpha (zeta - 1) v + e_1`.
pub fn geodesic(v: &SliceParam, zeta: Complex64) -> CxVec {
    let mut z = v.v.scale((zeta - ONE) * v.alpha);
    z[0] += ONE;
    z
}

fn retraction_denominator(v: &SliceParam, z: &CxVec) -> Complex64 {
    let a = v.alpha;
    ONE + v.tail_inner(z) / a + (ONE - z[0]) * ((1.0 - a * a) / (a * a))
}

/// Holomorphic retraction of the ball onto the geodesic disc of `v`.
pub fn retraction(v: &SliceParam, z: &CxVec) -> Result<CxVec> {
    let a = v.alpha;
    let den = retraction_denominator(v, z);
    if den.norm() < 1e-14 {
        return Err(Error::domain("retraction denominator vanishes", z.as_slice()));
    }
    let mut out = CxVec::zeros(z.dim());
    out[0] = (z[0] + v.tail_inner(z) / a + (ONE - z[0]) * ((1.0 - a * a) / (a * a))) / den;
    let tail_scale = -(ONE - z[0]) / (den * a);
    for k in 1..z.dim() {
        out[k] = v.v[k] * tail_scale;
    }
    Ok(out)
}

/// `alpha <z, v> / (1 - z_1 + alpha <z, v>)`, the disc coordinate of the
/// retraction: `projection(v, geodesic(v, zeta)) = zeta`.
pub fn projection(v: &SliceParam, z: &CxVec) -> Result<Complex64> {
    let num = z.inner(&v.v) * v.alpha;
    let den = ONE - z[0] + num;
    if den.norm() < 1e-14 {
        return Err(Error::domain("projection denominator vanishes", z.as_slice()));
    }
    Ok(num / den)
}

/// Differential of [`projection`] at `z` applied to `w`.
pub fn projection_differential(v: &SliceParam, z: &CxVec, w: &CxVec) -> Result<Complex64> {
    let num = z.inner(&v.v) * v.alpha;
    let den = ONE - z[0] + num;
    if den.norm() < 1e-14 {
        return Err(Error::domain("projection denominator vanishes", z.as_slice()));
    }
    let dnum = w.inner(&v.v) * v.alpha;
    let dden = dnum - w[0];
    Ok((dnum * den - num * dden) / (den * den))
}

/// Slice of `field` along `v`, from the value `w = G(phi_v(zeta))`:
/// `(1/alpha^2) zeta w_1 - ((zeta - 1)/alpha) <w, v>`.
pub fn slice_value(v: &SliceParam, zeta: Complex64, w: &CxVec) -> Complex64 {
    let a = v.alpha;
    zeta * w[0] / (a * a) - (zeta - ONE) * w.inner(&v.v) / a
}

pub fn slice_reduce(field: &RationalField, v: &SliceParam, zeta: Complex64) -> Result<Complex64> {
    let w = field.evaluate(&geodesic(v, zeta))?;
    Ok(slice_value(v, zeta, &w))
}

/// A holomorphic function on the disc, sampled pointwise.
pub trait DiscField: Sync {
    fn eval_disc(&self, zeta: Complex64) -> Result<Complex64>;
}

impl<F: Fn(Complex64) -> Result<Complex64> + Sync> DiscField for F {
    fn eval_disc(&self, zeta: Complex64) -> Result<Complex64> {
        self(zeta)
    }
}

/// The slice of a ball field along `v`, as a [`DiscField`].
pub struct Slice<'a> {
    pub field: &'a RationalField,
    pub v: SliceParam,
}

impl DiscField for Slice<'_> {
    fn eval_disc(&self, zeta: Complex64) -> Result<Complex64> {
        slice_reduce(self.field, &self.v, zeta)
    }
}

fn sampled_max<F>(check_id: &str, samples: usize, seed: u64, tol: f64, violation: F) -> Result<CertReport>
where
    F: Fn(Complex64) -> Result<f64> + Sync,
{
    let points = stratified_disc_sample(samples, seed);
    let values: Vec<f64> = points.par_iter().map(|p| violation(p.point)).collect::<Result<_>>()?;
    let best = argmax(&values).expect("nonempty sample");
    Ok(CertReport::from_max(check_id, values[best], Some(Witness::disc(points[best].point)), points.len(), tol, seed))
}

/// Largest value of `Re(g conj(zeta))/(1 - |zeta|^2) - Re(g/(1 - zeta)) - beta/2`
/// over seeded disc samples: the one-variable generator criterion.
pub fn disc_generator_check(g: &dyn DiscField, beta: f64, samples: usize, seed: u64, tol: f64) -> Result<CertReport> {
    sampled_max("disc_generator", samples, seed, tol, |zeta| Ok(disc_expression(zeta, g.eval_disc(zeta)?) - beta / 2.0))
}

/// Checks `Re p >= 0` for `p(zeta) = g(zeta)/(1 - zeta)^2`, the Berkson–Porta
/// factor with Denjoy–Wolff point 1. Reports `max(-Re p)` as the violation.
pub fn berkson_porta_residual(g: &dyn DiscField, samples: usize, seed: u64, tol: f64) -> Result<CertReport> {
    sampled_max("berkson_porta", samples, seed, tol, |zeta| {
        let d = ONE - zeta;
        Ok(-(g.eval_disc(zeta)? / (d * d)).re)
    })
}

/// Largest `|du_D . g + beta u_D|` over disc samples, relative to
/// `max(1, |u_D|)`.
pub fn disc_group_check(g: &dyn DiscField, beta: f64, samples: usize, seed: u64, tol: f64) -> Result<CertReport> {
    sampled_max("disc_group", samples, seed, tol, |zeta| {
        let u = poisson_disc(zeta)?;
        Ok((disc_pairing(zeta, g.eval_disc(zeta)?) + beta * u).abs() / u.abs().max(1.0))
    })
}

/// Limit of `g_v(r)/(r - 1)` as `r -> 1`, with its extrapolation residual.
pub fn slice_dilation_estimate(field: &RationalField, v: &SliceParam) -> Result<LimitEstimate> {
    let curve = ApproachCurve::radial();
    let ts = curve.grid();
    let values: Vec<Complex64> = ts
        .iter()
        .map(|&t| {
            let r = 1.0 - t;
            Ok(slice_reduce(field, v, Complex64::new(r, 0.0))? / (r - 1.0))
        })
        .collect::<Result<_>>()?;
    settled_limit(&format!("slice dilation (alpha = {})", v.alpha), &ts, &values)
}

/// Dilation `beta_v` of the slice along `v` at 1.
pub fn slice_dilation(field: &RationalField, v: &SliceParam) -> Result<f64> {
    Ok(slice_dilation_estimate(field, v)?.value.re)
}

pub const GRID_ALPHAS: [f64; 6] = [0.1, 0.25, 0.5, 0.75, 0.9, 1.0];
pub const GRID_DIRECTIONS: usize = 16;

/// Slice directions: every `alpha` of [`GRID_ALPHAS`] below 1 combined with
/// 16 seeded transversal directions, plus `e_1` itself.
pub fn v_grid(dim: usize, seed: u64) -> Vec<SliceParam> {
    let mut out = Vec::new();
    if dim > 1 {
        let mut rng = seeded_rng(seed, 7);
        let dirs: Vec<Vec<Complex64>> = (0..GRID_DIRECTIONS)
            .map(|_| {
                use rand_distr::{Distribution, StandardNormal};
                (0..dim - 1)
                    .map(|_| {
                        let re: f64 = StandardNormal.sample(&mut rng);
                        let im: f64 = StandardNormal.sample(&mut rng);
                        Complex64::new(re, im)
                    })
                    .collect()
            })
            .collect();
        for &alpha in GRID_ALPHAS.iter().filter(|&&a| a < 1.0) {
            for d in &dirs {
                out.push(SliceParam::from_alpha(alpha, d).expect("grid direction is nonzero"));
            }
        }
    }
    out.push(SliceParam::e1(dim));
    out
}
