//! Coefficient types. Floating coefficients are `Complex64`; the exact
//! mode uses complex rationals so structural checks need no tolerance.

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{Num, ToPrimitive, Zero};

pub type ExactComplex = Complex<BigRational>;

pub trait Scalar: Clone + Debug + PartialEq + Send + Sync + Num + Neg<Output = Self> + 'static {
    type Real: Clone + Debug + PartialOrd + Num + Neg<Output = Self::Real> + Send + Sync;

    /// True when arithmetic is exact and comparisons need no tolerance.
    const EXACT: bool;

    /// Exact conversion from a finite double (binary fractions are rationals).
    fn from_c64(c: Complex64) -> Self;
    fn to_c64(&self) -> Complex64;
    fn from_real(r: Self::Real) -> Self;
    fn re(&self) -> Self::Real;
    fn im(&self) -> Self::Real;
    fn conj(&self) -> Self;
    fn abs_sqr(&self) -> Self::Real;
    fn real_to_f64(r: &Self::Real) -> f64;
    fn real_from_f64(x: f64) -> Self::Real;

    /// Whether a value should be treated as zero when it is about to be
    /// used as a divisor.
    fn is_negligible(&self) -> bool;

    fn from_i64(k: i64) -> Self {
        Self::from_c64(Complex64::new(k as f64, 0.0))
    }
}

impl Scalar for Complex64 {
    type Real = f64;
    const EXACT: bool = false;

    fn from_c64(c: Complex64) -> Self {
        c
    }
    fn to_c64(&self) -> Complex64 {
        *self
    }
    fn from_real(r: f64) -> Self {
        Complex64::new(r, 0.0)
    }
    fn re(&self) -> f64 {
        self.re
    }
    fn im(&self) -> f64 {
        self.im
    }
    fn conj(&self) -> Self {
        Complex::conj(self)
    }
    fn abs_sqr(&self) -> f64 {
        self.norm_sqr()
    }
    fn real_to_f64(r: &f64) -> f64 {
        *r
    }
    fn real_from_f64(x: f64) -> f64 {
        x
    }
    fn is_negligible(&self) -> bool {
        self.norm() < 1e-14
    }
}

fn rational_from_f64(x: f64) -> BigRational {
    BigRational::from_float(x).expect("coefficient must be finite")
}

fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Fall back to a quotient of truncated integers for huge operands.
        let n: &BigInt = r.numer();
        let d: &BigInt = r.denom();
        n.to_f64().unwrap_or(f64::NAN) / d.to_f64().unwrap_or(f64::NAN)
    })
}

impl Scalar for ExactComplex {
    type Real = BigRational;
    const EXACT: bool = true;

    fn from_c64(c: Complex64) -> Self {
        Complex::new(rational_from_f64(c.re), rational_from_f64(c.im))
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(rational_to_f64(&self.re), rational_to_f64(&self.im))
    }
    fn from_real(r: BigRational) -> Self {
        Complex::new(r, BigRational::zero())
    }
    fn re(&self) -> BigRational {
        self.re.clone()
    }
    fn im(&self) -> BigRational {
        self.im.clone()
    }
    fn conj(&self) -> Self {
        Complex::new(self.re.clone(), -self.im.clone())
    }
    fn abs_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }
    fn real_to_f64(r: &BigRational) -> f64 {
        rational_to_f64(r)
    }
    fn real_from_f64(x: f64) -> BigRational {
        rational_from_f64(x)
    }
    fn is_negligible(&self) -> bool {
        self.is_zero()
    }
}
