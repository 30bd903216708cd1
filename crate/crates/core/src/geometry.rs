//! Boundary geometry at `e_1`: the pluricomplex Poisson kernel, horospheres,
//! Korányi regions, seeded samplers and approach curves.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::cvec::CxVec;
use crate::error::{Error, Result};
use crate::field::RationalField;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `u(z) = -(1 - ||z||^2) / |1 - z_1|^2`, negative on the ball.
pub fn poisson(z: &CxVec) -> Result<f64> {
    let gap = 1.0 - z.norm_sqr();
    if gap <= 0.0 {
        return Err(Error::domain("Poisson kernel needs a point of the open ball", z.as_slice()));
    }
    Ok(-gap / (ONE - z[0]).norm_sqr())
}

/// Disc Poisson kernel `u_D(zeta) = -(1 - |zeta|^2) / |1 - zeta|^2`.
pub fn poisson_disc(zeta: Complex64) -> Result<f64> {
    let gap = 1.0 - zeta.norm_sqr();
    if gap <= 0.0 {
        return Err(Error::domain("disc Poisson kernel needs |zeta| < 1", &[zeta]));
    }
    Ok(-gap / (ONE - zeta).norm_sqr())
}

/// `du_z . w` for a tangent vector `w` (the real differential applied to `w`).
pub fn poisson_pairing_with(z: &CxVec, w: &CxVec) -> f64 {
    let d = ONE - z[0];
    let dn = d.norm_sqr();
    -2.0 * (w[0] / d).re * (1.0 - z.norm_sqr()) / dn + 2.0 * w.inner(z).re / dn
}

/// `du_z . G(z)`.
pub fn poisson_pairing(field: &RationalField, z: &CxVec) -> Result<f64> {
    poisson(z)?;
    let g = field.evaluate(z)?;
    Ok(poisson_pairing_with(z, &g))
}

/// `Re<w, z> / (1 - ||z||^2) - Re(w_1 / (1 - z_1))`. Bounded above by
/// `beta/2` on the ball exactly when `G` generates a semigroup with
/// boundary null point `e_1` and dilation at most `beta`.
pub fn generator_expression_with(z: &CxVec, w: &CxVec) -> f64 {
    w.inner(z).re / (1.0 - z.norm_sqr()) - (w[0] / (ONE - z[0])).re
}

pub fn generator_expression(field: &RationalField, z: &CxVec) -> Result<f64> {
    poisson(z)?;
    let g = field.evaluate(z)?;
    Ok(generator_expression_with(z, &g))
}

/// One-variable form of [`generator_expression_with`].
pub fn disc_expression(zeta: Complex64, g: Complex64) -> f64 {
    (g * zeta.conj()).re / (1.0 - zeta.norm_sqr()) - (g / (ONE - zeta)).re
}

/// One-variable form of [`poisson_pairing_with`].
pub fn disc_pairing(zeta: Complex64, g: Complex64) -> f64 {
    let d = ONE - zeta;
    let dn = d.norm_sqr();
    -2.0 * (g / d).re * (1.0 - zeta.norm_sqr()) / dn + 2.0 * (g * zeta.conj()).re / dn
}

/// `K(e_1, R) = { |1 - z_1| <= (R/2)(1 - ||z||^2) }`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KoranyiRegion {
    pub amplitude: f64,
}

impl KoranyiRegion {
    pub fn new(amplitude: f64) -> Self {
        KoranyiRegion { amplitude }
    }

    pub fn contains(&self, z: &CxVec) -> bool {
        let gap = 1.0 - z.norm_sqr();
        gap > 0.0 && (ONE - z[0]).norm() <= self.amplitude / 2.0 * gap
    }

    /// Smallest amplitude whose region contains `z`.
    pub fn amplitude_of(z: &CxVec) -> f64 {
        2.0 * (ONE - z[0]).norm() / (1.0 - z.norm_sqr())
    }
}

/// `E(e_1, R) = { u(z) < -1/R }`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Horosphere {
    pub radius: f64,
}

impl Horosphere {
    pub fn contains(&self, z: &CxVec) -> bool {
        poisson(z).is_ok_and(|u| u < -1.0 / self.radius)
    }
}

/// Seeded generator shared by every sampler, so streams are reproducible
/// across platforms.
pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn gaussian_vec(rng: &mut ChaCha8Rng, n: usize) -> CxVec {
    CxVec((0..n).map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect())
}

fn unit_vec(rng: &mut ChaCha8Rng, n: usize) -> CxVec {
    loop {
        let g = gaussian_vec(rng, n);
        let norm = g.norm();
        if norm > 1e-12 {
            return &g * (1.0 / norm);
        }
    }
}

fn ball_point(rng: &mut ChaCha8Rng, n: usize, radius: f64) -> CxVec {
    let dir = unit_vec(rng, n);
    let u: f64 = rng.gen();
    &dir * (radius * u.powf(1.0 / (2 * n) as f64))
}

/// Uniform points on the unit sphere of C^n.
pub fn boundary_sample(dim: usize, count: usize, seed: u64) -> Vec<CxVec> {
    let mut rng = seeded_rng(seed, 1);
    (0..count).map(|_| unit_vec(&mut rng, dim)).collect()
}

/// Uniform points in the ball of the given radius.
pub fn ball_sample(dim: usize, count: usize, seed: u64, radius: f64) -> Vec<CxVec> {
    let mut rng = seeded_rng(seed, 2);
    (0..count).map(|_| ball_point(&mut rng, dim, radius)).collect()
}

/// Number of near-boundary shells, at distances `10^-1 ... 10^-6`.
pub const SHELLS: u32 = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stratum {
    Bulk,
    /// Sphere of radius `1 - 10^-k`.
    Shell(u32),
    /// Geodesic discs through `e_1`, close to `e_1`.
    NearE1,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Stratified<P> {
    pub point: P,
    pub stratum: Stratum,
}

/// Sizes of the bulk, per-shell and near-`e_1` strata.
fn strata_sizes(count: usize) -> (usize, usize, usize) {
    let bulk = (count / 4).max(1);
    let near = count / 4;
    let per_shell = count.saturating_sub(bulk + near).div_ceil(SHELLS as usize).max(1);
    (bulk, per_shell, near)
}

/// `e_1 + alpha (zeta - 1) v` with `alpha` log-uniform in `[0.1, 1]`, a
/// uniform transversal direction and `|1 - zeta|` log-uniform in
/// `[10^-4, 1]`. Tangential approaches to `e_1` are where uniform shells are
/// thinnest.
fn near_e1_point(rng: &mut ChaCha8Rng, n: usize) -> CxVec {
    let alpha = if n > 1 { 10f64.powf(-rng.gen::<f64>()) } else { 1.0 };
    let s = 10f64.powf(-4.0 * rng.gen::<f64>());
    let theta = (2.0 * rng.gen::<f64>() - 1.0) * 0.9 * (s / 2.0).acos();
    let step = -Complex64::from_polar(s, theta) * alpha;
    let mut z = CxVec::zeros(n);
    z[0] = ONE + step * alpha;
    if n > 1 {
        let dir = unit_vec(rng, n - 1);
        let scale = step * (1.0 - alpha * alpha).sqrt();
        for k in 1..n {
            z[k] = dir[k - 1] * scale;
        }
    }
    z
}

/// A quarter of the samples uniform in the ball, a quarter near `e_1` on
/// geodesic discs, the rest split evenly over spheres of radius
/// `1 - 10^-k`, `k = 1..6`.
pub fn stratified_ball_sample(dim: usize, count: usize, seed: u64) -> Vec<Stratified<CxVec>> {
    let (bulk, per_shell, near) = strata_sizes(count);
    let mut rng = seeded_rng(seed, 3);
    let mut out: Vec<_> = (0..bulk).map(|_| Stratified { point: ball_point(&mut rng, dim, 1.0), stratum: Stratum::Bulk }).collect();
    for k in 1..=SHELLS {
        let r = 1.0 - 10f64.powi(-(k as i32));
        for _ in 0..per_shell {
            out.push(Stratified { point: &unit_vec(&mut rng, dim) * r, stratum: Stratum::Shell(k) });
        }
    }
    for _ in 0..near {
        out.push(Stratified { point: near_e1_point(&mut rng, dim), stratum: Stratum::NearE1 });
    }
    out
}

/// Disc analogue of [`stratified_ball_sample`].
pub fn stratified_disc_sample(count: usize, seed: u64) -> Vec<Stratified<Complex64>> {
    stratified_ball_sample(1, count, seed).into_iter().map(|s| Stratified { point: s.point[0], stratum: s.stratum }).collect()
}

/// Seeded points of `K(e_1, R)` with `closeness / 10 <= |1 - z_1| <= closeness`
/// (the upper bound shrinks when the region is thinner than `closeness`).
pub fn koranyi_sample(region: &KoranyiRegion, dim: usize, count: usize, seed: u64, closeness: f64) -> Result<Vec<CxVec>> {
    let r = region.amplitude;
    // cos(theta) >= 1/R + s/2 must be satisfiable
    let s_max = 2.0 * (1.0 - 1.0 / r) * (1.0 - 1e-9);
    if !(r >= 1.0) || s_max <= 0.0 {
        return Err(Error::EmptyRegion(format!("Korányi region of amplitude {r} has no interior points")));
    }
    if !(closeness > 0.0 && closeness <= 1.0) {
        return Err(Error::PreconditionFailed(format!("closeness {closeness} must lie in (0, 1]")));
    }
    let s_hi = closeness.min(s_max);
    let s_lo = (closeness / 10.0).min(s_hi / 10.0);
    let mut rng = seeded_rng(seed, 4);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut accepted = None;
        for _attempt in 0..100 {
            let s = (s_lo.ln() + rng.gen::<f64>() * (s_hi.ln() - s_lo.ln())).exp();
            let theta_max = (1.0 / r + s / 2.0).min(1.0).acos();
            let theta = (2.0 * rng.gen::<f64>() - 1.0) * theta_max;
            let budget = 2.0 * s * theta.cos() - s * s - 2.0 * s / r;
            let mut z = CxVec::zeros(dim);
            z[0] = ONE - Complex64::from_polar(s, theta);
            if dim > 1 && budget > 0.0 {
                let tail = ball_point(&mut rng, dim - 1, (budget * (1.0 - 1e-12)).sqrt());
                z.0[1..].copy_from_slice(tail.as_slice());
            }
            if region.contains(&z) {
                accepted = Some(z);
                break;
            }
        }
        match accepted {
            Some(z) => out.push(z),
            None => return Err(Error::EmptyRegion(format!("no admissible point found at closeness {closeness}"))),
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum CurveKind {
    Radial,
    Nontangential { theta: f64 },
    /// `(1 - t e^{i theta}) e_1 + t^{(1+gamma)/2 + 1/4} u` with `u` orthogonal
    /// to `e_1`.
    Restricted { theta: f64, direction: CxVec, gamma: f64 },
}

/// A curve ending at `e_1`, sampled on `t_k = t0 * ratio^k`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ApproachCurve {
    pub kind: CurveKind,
    pub t0: f64,
    pub ratio: f64,
    pub steps: usize,
}

pub const DEFAULT_GAMMA: f64 = 0.5;

impl ApproachCurve {
    fn with_kind(kind: CurveKind) -> Self {
        ApproachCurve { kind, t0: 0.2, ratio: 0.5, steps: 20 }
    }

    pub fn radial() -> Self {
        Self::with_kind(CurveKind::Radial)
    }

    pub fn nontangential(theta: f64) -> Result<Self> {
        if theta.abs() > std::f64::consts::FRAC_PI_3 + 1e-15 {
            return Err(Error::PreconditionFailed(format!("approach angle {theta} exceeds pi/3")));
        }
        Ok(Self::with_kind(CurveKind::Nontangential { theta }))
    }

    pub fn restricted(theta: f64, direction: CxVec, gamma: f64) -> Result<Self> {
        if theta.abs() > std::f64::consts::FRAC_PI_3 + 1e-15 {
            return Err(Error::PreconditionFailed(format!("approach angle {theta} exceeds pi/3")));
        }
        if direction.dim() < 2 || direction[0].norm() != 0.0 {
            return Err(Error::PreconditionFailed("restricted direction must be orthogonal to e1".into()));
        }
        Ok(Self::with_kind(CurveKind::Restricted { theta, direction, gamma }))
    }

    pub fn name(&self) -> String {
        match &self.kind {
            CurveKind::Radial => "radial".into(),
            CurveKind::Nontangential { theta } => format!("nontangential({theta:.4})"),
            CurveKind::Restricted { theta, .. } => format!("restricted({theta:.4})"),
        }
    }

    pub fn grid(&self) -> Vec<f64> {
        (0..self.steps).map(|k| self.t0 * self.ratio.powi(k as i32)).collect()
    }

    pub fn point(&self, t: f64, dim: usize) -> CxVec {
        let mut z = CxVec::zeros(dim);
        match &self.kind {
            CurveKind::Radial => z[0] = Complex64::new(1.0 - t, 0.0),
            CurveKind::Nontangential { theta } => z[0] = ONE - Complex64::from_polar(t, *theta),
            CurveKind::Restricted { theta, direction, gamma } => {
                z[0] = ONE - Complex64::from_polar(t, *theta);
                let scale = t.powf((1.0 + gamma) / 2.0 + 0.25);
                for k in 1..dim {
                    z[k] = direction[k] * scale;
                }
            }
        }
        z
    }

    /// The five default curves: radial, nontangential at `theta = +-pi/4`,
    /// and two restricted curves (omitted in dimension 1).
    pub fn defaults(dim: usize) -> Vec<ApproachCurve> {
        let quarter = std::f64::consts::FRAC_PI_4;
        let mut out = vec![
            Self::radial(),
            Self::nontangential(quarter).expect("valid angle"),
            Self::nontangential(-quarter).expect("valid angle"),
        ];
        if dim > 1 {
            let mut u = CxVec::zeros(dim);
            u[1] = Complex64::new(0.5, 0.0);
            out.push(Self::restricted(0.0, u, DEFAULT_GAMMA).expect("valid curve"));
            let mut w = CxVec::zeros(dim);
            w[1] = Complex64::new(0.0, 0.5);
            out.push(Self::restricted(-quarter, w, DEFAULT_GAMMA).expect("valid curve"));
        }
        out
    }
}

/// `||z - <z,e_1> e_1||^2 / (1 - |<z,e_1>|^2)`, which tends to 0 along
/// restricted approach curves.
pub fn tangential_ratio(z: &CxVec) -> f64 {
    let tail: f64 = z.tail().iter().map(|c| c.norm_sqr()).sum();
    tail / (1.0 - z[0].norm_sqr())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::h_beta;

    #[test]
    fn poisson_values() {
        assert_eq!(poisson(&CxVec::zeros(2)).unwrap(), -1.0);
        assert_eq!(poisson(&CxVec::from_real(&[0.5, 0.0])).unwrap(), -3.0);
        assert!(poisson(&CxVec::e1(2)).is_err());
        assert!(poisson(&CxVec::from_real(&[0.8, 0.8])).is_err());
    }

    #[test]
    fn poisson_blows_up_radially() {
        let mut prev = f64::INFINITY;
        for k in 1..8 {
            let t = 10f64.powi(-k);
            let u = poisson(&CxVec::from_real(&[1.0 - t, 0.0])).unwrap();
            assert!(u < prev);
            prev = u;
            // u t = -(2 - t), up to cancellation in 1 - |z|^2
            assert!((u * t + (2.0 - t)).abs() < 1e-15 / t);
        }
    }

    #[test]
    fn zero_field_pairs_to_zero() {
        let z = CxVec::from_re_im(&[0.2, 0.1, -0.3, 0.4]);
        assert_eq!(poisson_pairing(&RationalField::zero(2), &z).unwrap(), 0.0);
    }

    #[test]
    fn h_beta_pairing_is_beta_times_poisson() {
        for (i, z) in ball_sample(3, 200, 5, 0.999).iter().enumerate() {
            let beta = -2.0 + 0.02 * i as f64;
            let p = poisson_pairing(&h_beta(3, beta), z).unwrap();
            assert!((p - beta * poisson(z).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn koranyi_samples_are_members_and_deterministic() {
        let region = KoranyiRegion::new(2.0);
        for k in 1..=6 {
            let c = 10f64.powi(-k);
            let pts = koranyi_sample(&region, 3, 100, 11, c).unwrap();
            assert_eq!(pts, koranyi_sample(&region, 3, 100, 11, c).unwrap());
            for p in &pts {
                assert!(region.contains(p));
                assert!((ONE - p[0]).norm() <= c * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn koranyi_amplitude_one_is_empty() {
        let r = koranyi_sample(&KoranyiRegion::new(1.0), 2, 10, 1, 0.1);
        assert!(matches!(r, Err(Error::EmptyRegion(_))));
    }

    #[test]
    fn boundary_points_have_unit_norm() {
        let pts = boundary_sample(3, 500, 9);
        assert!(pts.iter().all(|p| (p.norm() - 1.0).abs() < 1e-15));
        assert_eq!(pts, boundary_sample(3, 500, 9));
        assert!(boundary_sample(1, 50, 2).iter().all(|p| p.dim() == 1 && (p[0].norm() - 1.0).abs() < 1e-15));
    }

    #[test]
    fn stratified_counts() {
        let s = stratified_ball_sample(2, 20000, 1);
        assert_eq!(s.iter().filter(|p| p.stratum == Stratum::Bulk).count(), 5000);
        assert_eq!(s.iter().filter(|p| p.stratum == Stratum::Shell(6)).count(), 1667);
        let near: Vec<&CxVec> = s.iter().filter(|p| p.stratum == Stratum::NearE1).map(|p| &p.point).collect();
        assert_eq!(near.len(), 5000);
        assert!(s.iter().all(|p| p.point.norm() < 1.0));
        assert!(near.iter().any(|z| (ONE - z[0]).norm() < 1e-5));
        // the near stratum of the disc sample lies in the right half plane around 1
        assert!(stratified_disc_sample(400, 3).iter().filter(|p| p.stratum == Stratum::NearE1).all(|p| p.point.re > 0.0));
    }

    #[test]
    fn restricted_curve_ratio_decreases() {
        for curve in ApproachCurve::defaults(3).into_iter().skip(3) {
            let ratios: Vec<f64> = curve.grid().iter().map(|&t| tangential_ratio(&curve.point(t, 3))).collect();
            assert!(ratios.windows(2).all(|w| w[1] < w[0]));
            assert!(*ratios.last().unwrap() < 1e-2);
        }
    }

    #[test]
    fn horosphere_membership() {
        let h = Horosphere { radius: 1.0 };
        assert!(h.contains(&CxVec::from_real(&[0.5, 0.0])));
        assert!(!h.contains(&CxVec::from_real(&[-0.5, 0.0])));
    }
}
