//! Derivatives by Cauchy integrals, discretized with the periodic trapezoid
//! rule (spectrally accurate for functions holomorphic near the circle).

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::cvec::CxVec;
use crate::error::{Error, Result};
use crate::field::RationalField;

pub const DEFAULT_NODES: usize = 64;

/// Per-direction circle radii.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RadiusScheme {
    /// `scale * (1 - ||z||)` in every direction.
    Uniform { scale: f64 },
    /// `delta |1 - z_1|` along `e_1` and `delta |1 - z_1|^{1/2}` along the
    /// other axes, for points in a Korányi region.
    Koranyi { delta: f64 },
    /// The same fixed radius in every direction.
    Fixed { radius: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CauchyOptions {
    pub nodes: usize,
    pub scheme: RadiusScheme,
}

impl Default for CauchyOptions {
    fn default() -> Self {
        CauchyOptions { nodes: DEFAULT_NODES, scheme: RadiusScheme::Uniform { scale: 0.5 } }
    }
}

impl CauchyOptions {
    pub fn koranyi(delta: f64) -> Self {
        CauchyOptions { nodes: DEFAULT_NODES, scheme: RadiusScheme::Koranyi { delta } }
    }

    pub fn fixed(radius: f64) -> Self {
        CauchyOptions { nodes: DEFAULT_NODES, scheme: RadiusScheme::Fixed { radius } }
    }
}

/// Radius factor for Korányi-interior points: `(1/3)(1/R - 1/R')`, for a point
/// of a region of amplitude `R` nested in one of amplitude `R' > R`.
pub fn koranyi_delta(amplitude: f64, outer_amplitude: f64) -> f64 {
    (1.0 / amplitude - 1.0 / outer_amplitude) / 3.0
}

fn radii(z: &CxVec, scheme: RadiusScheme) -> Result<Vec<f64>> {
    let n = z.dim();
    let r = match scheme {
        RadiusScheme::Uniform { scale } => {
            let dist = 1.0 - z.norm();
            if dist <= 0.0 {
                return Err(Error::domain("uniform Cauchy radius needs an interior point", z.as_slice()));
            }
            vec![scale * dist; n]
        }
        RadiusScheme::Koranyi { delta } => {
            let s = (Complex64::new(1.0, 0.0) - z[0]).norm();
            let mut r = vec![delta * s.sqrt(); n];
            r[0] = delta * s;
            r
        }
        RadiusScheme::Fixed { radius } => vec![radius; n],
    };
    if r.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::domain("Cauchy radius is not positive", z.as_slice()));
    }
    Ok(r)
}

/// Taylor coefficient of order `k` of `f` at 0 from `nodes` samples on the
/// circle of radius `radius`: `(1/M) sum f(r w_m) conj(w_m)^k / r^k`.
pub fn taylor_coefficient<F>(f: F, radius: f64, order: u32, nodes: usize) -> Result<CxVec>
where
    F: Fn(Complex64) -> Result<CxVec>,
{
    let mut acc: Option<CxVec> = None;
    for m in 0..nodes {
        let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * m as f64 / nodes as f64);
        let val = f(w * radius)?.scale(w.conj().powu(order));
        acc = Some(match acc {
            None => val,
            Some(a) => &a + &val,
        });
    }
    let acc = acc.expect("at least one node");
    Ok(&acc * (1.0 / (nodes as f64 * radius.powi(order as i32))))
}

/// Full complex Jacobian `dG_z`: column `j` approximates
/// `(1/2 pi i) oint G(z + zeta e_j) / zeta^2 dzeta`.
pub fn derivative_matrix(field: &RationalField, z: &CxVec, opts: &CauchyOptions) -> Result<DMatrix<Complex64>> {
    let n = field.dim();
    if z.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: z.dim() });
    }
    let r = radii(z, opts.scheme)?;
    let mut out = DMatrix::zeros(n, n);
    for j in 0..n {
        let col = taylor_coefficient(
            |zeta| {
                let mut p = z.clone();
                p[j] += zeta;
                field.evaluate(&p)
            },
            r[j],
            1,
            opts.nodes,
        )?;
        for k in 0..n {
            out[(k, j)] = col[k];
        }
    }
    Ok(out)
}

/// `d^2 G / d z_j^2` at `z` on a circle of the given radius.
pub fn second_derivative_along(field: &RationalField, z: &CxVec, j: usize, radius: f64, nodes: usize) -> Result<CxVec> {
    let coeff = taylor_coefficient(
        |zeta| {
            let mut p = z.clone();
            p[j] += zeta;
            field.evaluate(&p)
        },
        radius,
        2,
        nodes,
    )?;
    Ok(&coeff * 2.0)
}
