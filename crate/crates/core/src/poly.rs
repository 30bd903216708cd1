//! Sparse multivariate polynomials over a [`Scalar`] coefficient ring.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::scalar::Scalar;

pub type Exponent = Vec<u32>;

/// Polynomial `sum c_I z^I` in `dim` variables. Zero coefficients are never
/// stored, so structural equality is coefficient equality.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiPoly<C: Scalar = Complex64> {
    dim: usize,
    terms: BTreeMap<Exponent, C>,
}

fn total(e: &[u32]) -> u32 {
    e.iter().sum()
}

impl<C: Scalar> MultiPoly<C> {
    pub fn zero(dim: usize) -> Self {
        MultiPoly { dim, terms: BTreeMap::new() }
    }

    pub fn constant(dim: usize, c: C) -> Self {
        Self::monomial(vec![0; dim], c)
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, C::one())
    }

    /// The coordinate function `z_k` (0-based).
    pub fn var(dim: usize, k: usize) -> Self {
        let mut e = vec![0; dim];
        e[k] = 1;
        Self::monomial(e, C::one())
    }

    pub fn monomial(exponent: Exponent, c: C) -> Self {
        let mut p = Self::zero(exponent.len());
        p.add_term(exponent, c);
        p
    }

    /// Sums repeated exponents and drops zeros.
    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (Exponent, C)>) -> Self {
        let mut p = Self::zero(dim);
        for (e, c) in terms {
            assert_eq!(e.len(), dim, "exponent length must equal the dimension");
            p.add_term(e, c);
        }
        p
    }

    pub fn add_term(&mut self, exponent: Exponent, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&exponent) {
            Some(old) => {
                let sum = old + c;
                if !sum.is_zero() {
                    self.terms.insert(exponent, sum);
                }
            }
            None => {
                self.terms.insert(exponent, c);
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &C)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exponent: &[u32]) -> C {
        self.terms.get(exponent).cloned().unwrap_or_else(C::zero)
    }

    pub fn constant_term(&self) -> C {
        self.coeff(&vec![0; self.dim])
    }

    /// Whether the polynomial is a constant (possibly zero).
    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| total(e) == 0)
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| total(e)).max()
    }

    pub fn scale(&self, c: &C) -> Self {
        Self::from_terms(self.dim, self.terms.iter().map(|(e, x)| (e.clone(), x.clone() * c.clone())))
    }

    pub fn homogeneous_part(&self, degree: u32) -> Self {
        MultiPoly {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| total(e) == degree)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Drops every term of total degree above `max_degree`.
    pub fn truncate(&self, max_degree: u32) -> Self {
        MultiPoly {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| total(e) <= max_degree)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    fn mul_truncated(&self, other: &Self, max_degree: Option<u32>) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut out = Self::zero(self.dim);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Exponent = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                if max_degree.is_some_and(|m| total(&e) > m) {
                    continue;
                }
                out.add_term(e, ca.clone() * cb.clone());
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one(self.dim);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Partial derivative with respect to `z_k` (0-based).
    pub fn partial(&self, k: usize) -> Self {
        let mut out = Self::zero(self.dim);
        for (e, c) in &self.terms {
            if e[k] == 0 {
                continue;
            }
            let mut d = e.clone();
            d[k] -= 1;
            out.add_term(d, c.clone() * C::from_i64(e[k] as i64));
        }
        out
    }

    /// Re-expands around `center`: returns `q` with `q(x) = p(center + x)`.
    pub fn shifted(&self, center: &[C]) -> Self {
        assert_eq!(center.len(), self.dim);
        let max_exp: Vec<u32> = (0..self.dim)
            .map(|k| self.terms.keys().map(|e| e[k]).max().unwrap_or(0))
            .collect();
        // binomial expansions of (c_k + x_k)^p as univariate coefficient lists
        let expansions: Vec<Vec<Vec<C>>> = (0..self.dim)
            .map(|k| {
                let mut rows: Vec<Vec<C>> = vec![vec![C::one()]];
                for p in 1..=max_exp[k] as usize {
                    let prev = &rows[p - 1];
                    let mut row = vec![C::zero(); p + 1];
                    for (j, c) in prev.iter().enumerate() {
                        row[j] = row[j].clone() + c.clone() * center[k].clone();
                        row[j + 1] = row[j + 1].clone() + c.clone();
                    }
                    rows.push(row);
                }
                rows
            })
            .collect();
        let mut out = Self::zero(self.dim);
        for (e, c) in &self.terms {
            let mut partial: Vec<(Exponent, C)> = vec![(vec![0; self.dim], c.clone())];
            for k in 0..self.dim {
                let row = &expansions[k][e[k] as usize];
                let mut next = Vec::with_capacity(partial.len() * row.len());
                for (pe, pc) in &partial {
                    for (j, rc) in row.iter().enumerate() {
                        if rc.is_zero() {
                            continue;
                        }
                        let mut ne = pe.clone();
                        ne[k] = j as u32;
                        next.push((ne, pc.clone() * rc.clone()));
                    }
                }
                partial = next;
            }
            for (pe, pc) in partial {
                out.add_term(pe, pc);
            }
        }
        out
    }

    /// Power-series quotient `num / den` modulo terms of degree above
    /// `order`. Returns `None` when the constant term of `den` is negligible.
    pub fn series_div(num: &Self, den: &Self, order: u32) -> Option<Self> {
        let d0 = den.constant_term();
        if d0.is_negligible() {
            return None;
        }
        let dim = num.dim;
        let mut q = Self::zero(dim);
        for degree in 0..=order {
            // q_d = (num_d - sum_{j>=1} den_j q_{d-j}) / d0
            let mut rhs = num.homogeneous_part(degree);
            for j in 1..=degree {
                let dj = den.homogeneous_part(j);
                if dj.is_zero() {
                    continue;
                }
                let qd = q.homogeneous_part(degree - j);
                rhs = &rhs - &(&dj * &qd);
            }
            for (e, c) in rhs.terms {
                q.add_term(e, c / d0.clone());
            }
        }
        Some(q)
    }

    pub fn map_coeffs<D: Scalar>(&self, f: impl Fn(&C) -> D) -> MultiPoly<D> {
        MultiPoly::from_terms(self.dim, self.terms.iter().map(|(e, c)| (e.clone(), f(c))))
    }

    /// Evaluates at `z`; powers are cached per variable.
    pub fn eval(&self, z: &[C]) -> C {
        assert_eq!(z.len(), self.dim);
        let mut powers: Vec<Vec<C>> = z.iter().map(|x| vec![C::one(), x.clone()]).collect();
        let mut acc = C::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (k, &p) in e.iter().enumerate() {
                if p == 0 {
                    continue;
                }
                let table = &mut powers[k];
                while table.len() <= p as usize {
                    let next = table[table.len() - 1].clone() * z[k].clone();
                    table.push(next);
                }
                term = term * table[p as usize].clone();
            }
            acc = acc + term;
        }
        acc
    }
}

impl MultiPoly<Complex64> {
    /// Largest coefficient modulus, 0 for the zero polynomial.
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

impl<'a, C: Scalar> Add<&'a MultiPoly<C>> for &'a MultiPoly<C> {
    type Output = MultiPoly<C>;
    fn add(self, rhs: &MultiPoly<C>) -> MultiPoly<C> {
        assert_eq!(self.dim, rhs.dim);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl<'a, C: Scalar> Sub<&'a MultiPoly<C>> for &'a MultiPoly<C> {
    type Output = MultiPoly<C>;
    fn sub(self, rhs: &MultiPoly<C>) -> MultiPoly<C> {
        assert_eq!(self.dim, rhs.dim);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }
}

impl<'a, C: Scalar> Mul<&'a MultiPoly<C>> for &'a MultiPoly<C> {
    type Output = MultiPoly<C>;
    fn mul(self, rhs: &MultiPoly<C>) -> MultiPoly<C> {
        self.mul_truncated(rhs, None)
    }
}

impl<C: Scalar> Neg for &MultiPoly<C> {
    type Output = MultiPoly<C>;
    fn neg(self) -> MultiPoly<C> {
        MultiPoly {
            dim: self.dim,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c.clone())).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ExactComplex;
    use num_rational::BigRational;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn canonical_form_drops_cancelled_terms() {
        let x = MultiPoly::<Complex64>::var(2, 0);
        let p = &(&x + &x) - &x.scale(&c(2.0, 0.0));
        assert!(p.is_zero());
        assert_eq!(p, MultiPoly::zero(2));
    }

    #[test]
    fn shift_matches_evaluation() {
        let p = MultiPoly::from_terms(
            2,
            vec![(vec![2, 1], c(1.0, -2.0)), (vec![0, 3], c(0.5, 0.0)), (vec![1, 0], c(0.0, 1.0))],
        );
        let center = [c(1.0, 0.0), c(-0.3, 0.2)];
        let q = p.shifted(&center);
        let x = [c(0.1, 0.05), c(-0.2, 0.4)];
        let moved = [center[0] + x[0], center[1] + x[1]];
        assert!((q.eval(&x) - p.eval(&moved)).norm() < 1e-14);
    }

    #[test]
    fn series_division_inverts_geometric_series() {
        // 1 / (1 - x) = 1 + x + x^2 + x^3 + ...
        let one = MultiPoly::<ExactComplex>::one(1);
        let den = &one - &MultiPoly::var(1, 0);
        let q = MultiPoly::series_div(&one, &den, 3).unwrap();
        for k in 0..=3 {
            assert_eq!(q.coeff(&[k]), ExactComplex::new(BigRational::from_integer(1.into()), BigRational::from_integer(0.into())));
        }
        assert_eq!(q.len(), 4);
    }

    #[test]
    fn series_division_requires_unit_constant_term() {
        let x = MultiPoly::<Complex64>::var(1, 0);
        assert!(MultiPoly::series_div(&x, &x, 2).is_none());
    }

    #[test]
    fn partial_derivative_of_monomial() {
        let p = MultiPoly::monomial(vec![3, 2], c(2.0, 0.0));
        let d = p.partial(0);
        assert_eq!(d.coeff(&[2, 2]), c(6.0, 0.0));
        assert_eq!(d.len(), 1);
    }
}
