//! Taylor data of a rational field at `e_1`, up to total degree 3.
//!
//! Coordinates are `x = z - e_1`. Exponents are full length-`n` multi-indices
//! `(i_1, J)`; component indices are 0-based (component 0 is the `e_1`
//! direction).

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::corpus::exponents_of_degree;
use crate::error::{Error, Result};
use crate::field::{EvalDomain, RationalField};
use crate::poly::{Exponent, MultiPoly};
use crate::scalar::{ExactComplex, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct Jet<C: Scalar = Complex64> {
    dim: usize,
    order: usize,
    label: String,
    /// `G(e_1)`; zero for every field with a boundary null point at `e_1`.
    pub value: Vec<C>,
    /// `t[k][j]`: coefficient of `x_j` in component `k`.
    pub t: Vec<Vec<C>>,
    /// Degree-2 coefficients keyed by `(component, exponent)`; dense.
    pub q2: BTreeMap<(usize, Exponent), C>,
    /// Degree-3 coefficients of the first component; dense.
    pub q3_first: BTreeMap<Exponent, C>,
}

pub type ExactJet = Jet<ExactComplex>;

fn unit(dim: usize, k: usize) -> Exponent {
    let mut e = vec![0; dim];
    e[k] = 1;
    e
}

/// `e_a + e_b` as an exponent.
pub fn pair(dim: usize, a: usize, b: usize) -> Exponent {
    let mut e = vec![0; dim];
    e[a] += 1;
    e[b] += 1;
    e
}

fn factorial(k: u32) -> i64 {
    (1..=k as i64).product()
}

impl<C: Scalar> Jet<C> {
    /// The zero jet of the given order.
    pub fn zero(dim: usize, order: usize) -> Self {
        let mut q2 = BTreeMap::new();
        if order >= 2 {
            for k in 0..dim {
                for e in exponents_of_degree(dim, 2) {
                    q2.insert((k, e), C::zero());
                }
            }
        }
        let q3_first = if order >= 3 {
            exponents_of_degree(dim, 3).into_iter().map(|e| (e, C::zero())).collect()
        } else {
            BTreeMap::new()
        };
        Jet {
            dim,
            order,
            label: String::from("zero"),
            value: vec![C::zero(); dim],
            t: vec![vec![C::zero(); dim]; dim],
            q2,
            q3_first,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn require_order(&self, need: usize) -> Result<()> {
        if self.order < need {
            return Err(Error::JetOrderTooLow { have: self.order, need });
        }
        Ok(())
    }

    /// The dilation read off the jet: `Re T[0][0]`.
    pub fn beta(&self) -> f64 {
        C::real_to_f64(&self.t[0][0].re())
    }

    pub fn q2_at(&self, component: usize, exponent: &[u32]) -> C {
        self.q2.get(&(component, exponent.to_vec())).cloned().unwrap_or_else(C::zero)
    }

    pub fn q3_at(&self, exponent: &[u32]) -> C {
        self.q3_first.get(exponent).cloned().unwrap_or_else(C::zero)
    }

    /// Coefficient of `x_a x_b` in component `k`.
    pub fn q2_pair(&self, k: usize, a: usize, b: usize) -> C {
        self.q2_at(k, &pair(self.dim, a, b))
    }

    /// Partial derivative `d^I G_k (e_1)` for `|I| <= 3`, converting the
    /// stored Taylor coefficient with `I!`. This is the only place where
    /// coefficients and derivatives are related.
    pub fn derivative(&self, component: usize, exponent: &[u32]) -> C {
        let degree: u32 = exponent.iter().sum();
        let coeff = match degree {
            0 => self.value[component].clone(),
            1 => {
                let j = exponent.iter().position(|&p| p == 1).expect("degree-1 exponent");
                self.t[component][j].clone()
            }
            2 => self.q2_at(component, exponent),
            3 if component == 0 => self.q3_at(exponent),
            _ => panic!("derivative of order {degree} for component {component} is not stored"),
        };
        let weight: i64 = exponent.iter().map(|&p| factorial(p)).product();
        coeff * C::from_i64(weight)
    }

    /// Homogeneous degree-2 part of component `k` evaluated at `v`.
    pub fn q2_eval(&self, k: usize, v: &[C]) -> C {
        let mut acc = C::zero();
        for ((comp, e), c) in &self.q2 {
            if *comp == k {
                acc = acc + c.clone() * monomial_value(e, v);
            }
        }
        acc
    }

    /// Homogeneous degree-3 part of the first component evaluated at `v`.
    pub fn q3_eval(&self, v: &[C]) -> C {
        let mut acc = C::zero();
        for (e, c) in &self.q3_first {
            acc = acc + c.clone() * monomial_value(e, v);
        }
        acc
    }

    /// Jet of `G + H_b`.
    pub fn shift_by_hbeta(&self, b: f64) -> Self {
        let mut out = self.clone();
        let full = C::from_c64(Complex64::new(b, 0.0));
        let half = C::from_c64(Complex64::new(b / 2.0, 0.0));
        out.t[0][0] = out.t[0][0].clone() - full;
        for k in 1..self.dim {
            out.t[k][k] = out.t[k][k].clone() - half.clone();
        }
        if self.order >= 2 {
            let key = (0, pair(self.dim, 0, 0));
            let old = out.q2[&key].clone();
            out.q2.insert(key, old - half.clone());
            for k in 1..self.dim {
                let key = (k, pair(self.dim, 0, k));
                let old = out.q2[&key].clone();
                out.q2.insert(key, old - half.clone());
            }
        }
        out
    }

    pub fn to_float(&self) -> Jet {
        Jet {
            dim: self.dim,
            order: self.order,
            label: self.label.clone(),
            value: self.value.iter().map(|c| c.to_c64()).collect(),
            t: self.t.iter().map(|row| row.iter().map(|c| c.to_c64()).collect()).collect(),
            q2: self.q2.iter().map(|(k, c)| (k.clone(), c.to_c64())).collect(),
            q3_first: self.q3_first.iter().map(|(k, c)| (k.clone(), c.to_c64())).collect(),
        }
    }

    pub fn to_exact(&self) -> ExactJet {
        let conv = |c: &C| ExactComplex::from_c64(c.to_c64());
        Jet {
            dim: self.dim,
            order: self.order,
            label: self.label.clone(),
            value: self.value.iter().map(conv).collect(),
            t: self.t.iter().map(|row| row.iter().map(conv).collect()).collect(),
            q2: self.q2.iter().map(|(k, c)| (k.clone(), conv(c))).collect(),
            q3_first: self.q3_first.iter().map(|(k, c)| (k.clone(), conv(c))).collect(),
        }
    }

    /// Component `k` of the truncated expansion as a polynomial in `x`.
    fn component_in_x(&self, k: usize, max_degree: u32) -> MultiPoly<C> {
        let mut p = MultiPoly::constant(self.dim, self.value[k].clone());
        for j in 0..self.dim {
            p.add_term(unit(self.dim, j), self.t[k][j].clone());
        }
        if max_degree >= 2 {
            for ((comp, e), c) in &self.q2 {
                if *comp == k {
                    p.add_term(e.clone(), c.clone());
                }
            }
        }
        if max_degree >= 3 && k == 0 {
            for (e, c) in &self.q3_first {
                p.add_term(e.clone(), c.clone());
            }
        }
        p
    }
}

fn monomial_value<C: Scalar>(e: &[u32], v: &[C]) -> C {
    let mut acc = C::one();
    for (k, &p) in e.iter().enumerate() {
        for _ in 0..p {
            acc = acc * v[k].clone();
        }
    }
    acc
}

/// Taylor expansion of `field` at `e_1` up to total degree `order` (1..=3),
/// computed by re-centering numerators and denominators and dividing the
/// power series.
pub fn jet_at_e1<C: Scalar>(field: &RationalField<C>, order: usize) -> Result<Jet<C>> {
    assert!((1..=3).contains(&order), "jet order must be 1, 2 or 3");
    let n = field.dim();
    let mut center = vec![C::zero(); n];
    center[0] = C::one();
    let mut jet = Jet::zero(n, order).with_label(field.label());
    for (k, comp) in field.components().iter().enumerate() {
        let num = comp.numerator.shifted(&center);
        let den = comp.denominator.shifted(&center);
        let series = MultiPoly::series_div(&num, &den, order as u32).ok_or(Error::NotSmoothAtE1 { component: k + 1 })?;
        jet.value[k] = series.constant_term();
        for j in 0..n {
            jet.t[k][j] = series.coeff(&unit(n, j));
        }
        if order >= 2 {
            for e in exponents_of_degree(n, 2) {
                let c = series.coeff(&e);
                jet.q2.insert((k, e), c);
            }
        }
        if order >= 3 && k == 0 {
            for e in exponents_of_degree(n, 3) {
                let c = series.coeff(&e);
                jet.q3_first.insert(e, c);
            }
        }
    }
    Ok(jet)
}

/// The polynomial field `G(e_1) + T(z - e_1) + Q_2(z - e_1)` in standard
/// coordinates.
pub fn quadratic_truncation<C: Scalar>(jet: &Jet<C>) -> Result<RationalField<C>> {
    jet.require_order(2)?;
    let mut back = vec![C::zero(); jet.dim];
    back[0] = -C::one();
    let comps = (0..jet.dim).map(|k| jet.component_in_x(k, 2).shifted(&back)).collect();
    Ok(RationalField::polynomial(format!("{}-quad", jet.label), comps).with_domain(EvalDomain::Unrestricted))
}

#[derive(Serialize)]
struct JetEntry {
    component: usize,
    exponent: Vec<u32>,
    value: [f64; 2],
}

#[derive(Serialize)]
struct JetView {
    dim: usize,
    order: usize,
    beta: f64,
    value: Vec<[f64; 2]>,
    t: Vec<Vec<[f64; 2]>>,
    q2: Vec<JetEntry>,
    q3_first: Vec<JetEntry>,
}

impl<C: Scalar> Serialize for Jet<C> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let pair = |c: &C| {
            let z = c.to_c64();
            [z.re, z.im]
        };
        JetView {
            dim: self.dim,
            order: self.order,
            beta: self.beta(),
            value: self.value.iter().map(pair).collect(),
            t: self.t.iter().map(|row| row.iter().map(pair).collect()).collect(),
            q2: self
                .q2
                .iter()
                .map(|((k, e), c)| JetEntry { component: *k + 1, exponent: e.clone(), value: pair(c) })
                .collect(),
            q3_first: self
                .q3_first
                .iter()
                .map(|(e, c)| JetEntry { component: 1, exponent: e.clone(), value: pair(c) })
                .collect(),
        }
        .serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{example_4_2, example_6_1, example_6_1_quad, example_6_2, example_6_2_quad, h_beta};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn h_beta_jet_matches_expansion() {
        for beta in [-2.0, 0.5, 3.0] {
            let jet = jet_at_e1(&h_beta(3, beta), 3).unwrap();
            assert_eq!(jet.t[0][0], c(-beta));
            assert_eq!(jet.t[1][1], c(-beta / 2.0));
            assert_eq!(jet.t[2][2], c(-beta / 2.0));
            assert_eq!(jet.t[0][1], c(0.0));
            assert_eq!(jet.q2_pair(0, 0, 0), c(-beta / 2.0));
            assert_eq!(jet.q2_pair(1, 0, 1), c(-beta / 2.0));
            assert_eq!(jet.q2_pair(2, 0, 2), c(-beta / 2.0));
            let nonzero = jet.q2.values().filter(|v| v.norm() > 0.0).count();
            assert_eq!(nonzero, 3);
            assert!(jet.q3_first.values().all(|v| v.norm() == 0.0));
            assert_eq!(jet.beta(), -beta);
        }
    }

    #[test]
    fn example_6_1_first_component_is_affine() {
        let jet = jet_at_e1(&example_6_1(), 3).unwrap();
        assert_eq!(jet.t[0][0], c(-1.0));
        assert_eq!(jet.t[0][1], c(0.0));
        assert!(jet.q2.iter().filter(|((comp, _), _)| *comp == 0).all(|(_, v)| v.norm() == 0.0));
        assert!(jet.q3_first.values().all(|v| v.norm() == 0.0));
        // -5 z2 / (8 - 4 z2) = -(5/8) z2 - (5/16) z2^2 - ...
        assert_eq!(jet.t[1][1], c(-5.0 / 8.0));
        assert_eq!(jet.q2_pair(1, 1, 1), c(-5.0 / 16.0));
    }

    #[test]
    fn example_4_2_is_not_smooth() {
        assert_eq!(jet_at_e1(&example_4_2(), 3), Err(Error::NotSmoothAtE1 { component: 2 }));
    }

    #[test]
    fn truncations_reproduce_the_quadratic_examples() {
        for (full, quad) in [(example_6_1(), example_6_1_quad()), (example_6_2(), example_6_2_quad())] {
            let t = quadratic_truncation(&jet_at_e1(&full, 2).unwrap()).unwrap();
            for (a, b) in t.components().iter().zip(quad.components()) {
                assert_eq!(a.numerator, b.numerator);
                assert_eq!(a.denominator, b.denominator);
            }
        }
    }

    #[test]
    fn truncation_keeps_a_value_at_e1() {
        // G(z) = (z1^2 + 3, i z2), not vanishing at e1
        let z1 = MultiPoly::var(2, 0);
        let g = RationalField::polynomial(
            "g",
            vec![&(&z1 * &z1) + &MultiPoly::constant(2, c(3.0)), MultiPoly::var(2, 1).scale(&Complex64::new(0.0, 1.0))],
        );
        let t = quadratic_truncation(&jet_at_e1(&g, 3).unwrap()).unwrap();
        for (a, b) in t.components().iter().zip(g.components()) {
            assert_eq!(a.numerator, b.numerator);
        }
    }

    #[test]
    fn exact_jet_of_rational_component() {
        let jet = jet_at_e1(&example_6_1().to_exact(), 3).unwrap();
        let f = jet.to_float();
        assert_eq!(f.t[1][1], c(-0.625));
        assert_eq!(f.q2_pair(1, 1, 1), c(-0.3125));
    }

    #[test]
    fn jet_shift_matches_shifted_field() {
        let g = example_6_1();
        let shifted_field = g.add(&h_beta(2, -1.0)).unwrap();
        let a = jet_at_e1(&shifted_field, 3).unwrap();
        let b = jet_at_e1(&g, 3).unwrap().shift_by_hbeta(-1.0);
        assert_eq!(a.t, b.t);
        assert_eq!(a.q2, b.q2);
        assert_eq!(a.q3_first, b.q3_first);
        assert_eq!(b.beta(), 0.0);
    }

    #[test]
    fn derivative_conversion_uses_factorials() {
        let jet = jet_at_e1(&h_beta(2, 1.0), 3).unwrap();
        assert_eq!(jet.derivative(0, &[2, 0]), c(-1.0));
        assert_eq!(jet.derivative(1, &[1, 1]), c(-0.5));
        assert_eq!(jet.derivative(0, &[1, 0]), c(-1.0));
    }
}
