//! Points and tangent vectors in C^n.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A vector in C^n. Inner products are linear in the first slot:
/// `<z, w> = sum z_k conj(w_k)`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct CxVec(pub Vec<Complex64>);

impl CxVec {
    pub fn new(entries: Vec<Complex64>) -> Self {
        CxVec(entries)
    }

    pub fn zeros(n: usize) -> Self {
        CxVec(vec![Complex64::new(0.0, 0.0); n])
    }

    pub fn basis(n: usize, k: usize) -> Self {
        let mut v = Self::zeros(n);
        v.0[k] = Complex64::new(1.0, 0.0);
        v
    }

    pub fn e1(n: usize) -> Self {
        Self::basis(n, 0)
    }

    /// Builds a vector from interleaved `[re, im, re, im, ...]` values.
    pub fn from_re_im(parts: &[f64]) -> Self {
        CxVec(
            parts
                .chunks(2)
                .map(|p| Complex64::new(p[0], *p.get(1).unwrap_or(&0.0)))
                .collect(),
        )
    }

    pub fn from_real(parts: &[f64]) -> Self {
        CxVec(parts.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn inner(&self, other: &CxVec) -> Complex64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a * b.conj())
            .sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// The tail `(z_2, ..., z_n)`.
    pub fn tail(&self) -> &[Complex64] {
        &self.0[1..]
    }

    pub fn scale(&self, c: Complex64) -> CxVec {
        CxVec(self.0.iter().map(|x| x * c).collect())
    }

    pub fn distance(&self, other: &CxVec) -> f64 {
        (self - other).norm()
    }

    pub fn to_pairs(&self) -> Vec<[f64; 2]> {
        self.0.iter().map(|c| [c.re, c.im]).collect()
    }
}

impl Index<usize> for CxVec {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for CxVec {
    fn index_mut(&mut self, i: usize) -> &mut Complex64 {
        &mut self.0[i]
    }
}

impl<'a> Add<&'a CxVec> for &'a CxVec {
    type Output = CxVec;
    fn add(self, rhs: &CxVec) -> CxVec {
        CxVec(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl<'a> Sub<&'a CxVec> for &'a CxVec {
    type Output = CxVec;
    fn sub(self, rhs: &CxVec) -> CxVec {
        CxVec(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Mul<f64> for &CxVec {
    type Output = CxVec;
    fn mul(self, rhs: f64) -> CxVec {
        CxVec(self.0.iter().map(|a| a * rhs).collect())
    }
}

impl Neg for &CxVec {
    type Output = CxVec;
    fn neg(self) -> CxVec {
        CxVec(self.0.iter().map(|a| -a).collect())
    }
}

impl From<Vec<Complex64>> for CxVec {
    fn from(v: Vec<Complex64>) -> Self {
        CxVec(v)
    }
}

impl Serialize for CxVec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_pairs().serialize(s)
    }
}

impl<'de> Deserialize<'de> for CxVec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(CxVec(pairs.into_iter().map(|[re, im]| Complex64::new(re, im)).collect()))
    }
}
