//! Rational holomorphic vector fields on the ball.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cvec::CxVec;
use crate::error::{Error, Result};
use crate::poly::MultiPoly;
use crate::scalar::{ExactComplex, Scalar};

/// Smallest denominator modulus accepted during evaluation.
pub const DENOMINATOR_FLOOR: f64 = 1e-14;

/// Where a field may be evaluated. Every denominator is assumed nonvanishing
/// there; evaluation still checks each denominator at the point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum EvalDomain {
    Unrestricted,
    /// Open ball `||z|| < radius` around the origin.
    Ball { radius: f64 },
}

impl EvalDomain {
    pub fn contains(&self, z: &CxVec) -> bool {
        match self {
            EvalDomain::Unrestricted => true,
            EvalDomain::Ball { radius } => z.norm() < *radius,
        }
    }

    fn intersect(self, other: EvalDomain) -> EvalDomain {
        match (self, other) {
            (EvalDomain::Unrestricted, d) | (d, EvalDomain::Unrestricted) => d,
            (EvalDomain::Ball { radius: a }, EvalDomain::Ball { radius: b }) => {
                EvalDomain::Ball { radius: a.min(b) }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Component<C: Scalar = Complex64> {
    pub numerator: MultiPoly<C>,
    pub denominator: MultiPoly<C>,
}

impl<C: Scalar> Component<C> {
    pub fn polynomial(numerator: MultiPoly<C>) -> Self {
        let dim = numerator.dim();
        Component { numerator, denominator: MultiPoly::one(dim) }
    }

    fn add(&self, other: &Self) -> Self {
        let (n1, d1, n2, d2) = (&self.numerator, &self.denominator, &other.numerator, &other.denominator);
        if d1 == d2 {
            return Component { numerator: n1 + n2, denominator: d1.clone() };
        }
        if d2.is_constant() {
            let inv = C::one() / d2.constant_term();
            return Component { numerator: n1 + &(d1 * &n2.scale(&inv)), denominator: d1.clone() };
        }
        if d1.is_constant() {
            let inv = C::one() / d1.constant_term();
            return Component { numerator: &(d2 * &n1.scale(&inv)) + n2, denominator: d2.clone() };
        }
        Component { numerator: &(n1 * d2) + &(n2 * d1), denominator: d1 * d2 }
    }
}

/// `G = (N_1/D_1, ..., N_n/D_n)` with polynomial numerators and denominators
/// in standard coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalField<C: Scalar = Complex64> {
    dim: usize,
    components: Vec<Component<C>>,
    label: String,
    domain: EvalDomain,
    declared_singularities: Vec<String>,
}

pub type ExactField = RationalField<ExactComplex>;

impl<C: Scalar> RationalField<C> {
    pub fn new(label: impl Into<String>, components: Vec<Component<C>>, domain: EvalDomain) -> Result<Self> {
        let dim = components.len();
        if dim == 0 {
            return Err(Error::Validation("a field needs at least one component".into()));
        }
        for (k, comp) in components.iter().enumerate() {
            for p in [&comp.numerator, &comp.denominator] {
                if p.dim() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, got: p.dim() });
                }
            }
            if comp.denominator.is_zero() {
                return Err(Error::Validation(format!("component {} has a zero denominator", k + 1)));
            }
        }
        Ok(RationalField { dim, components, label: label.into(), domain, declared_singularities: Vec::new() })
    }

    /// Polynomial field with unit denominators, evaluable everywhere.
    pub fn polynomial(label: impl Into<String>, numerators: Vec<MultiPoly<C>>) -> Self {
        let comps = numerators.into_iter().map(Component::polynomial).collect();
        Self::new(label, comps, EvalDomain::Unrestricted).expect("polynomial field components must share a dimension")
    }

    pub fn zero(dim: usize) -> Self {
        Self::polynomial(format!("zero:{dim}"), vec![MultiPoly::zero(dim); dim])
    }

    pub fn identity(dim: usize) -> Self {
        Self::polynomial("identity", (0..dim).map(|k| MultiPoly::var(dim, k)).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn components(&self) -> &[Component<C>] {
        &self.components
    }

    pub fn domain(&self) -> EvalDomain {
        self.domain
    }

    pub fn declared_singularities(&self) -> &[String] {
        &self.declared_singularities
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn with_domain(mut self, domain: EvalDomain) -> Self {
        self.domain = domain;
        self
    }

    pub fn with_singularities(mut self, notes: Vec<String>) -> Self {
        self.declared_singularities = notes;
        self
    }

    pub fn is_polynomial(&self) -> bool {
        self.components.iter().all(|c| c.denominator.is_constant())
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| c.numerator.is_zero())
    }

    /// Componentwise sum; the evaluation domain is the intersection.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        let comps = self.components.iter().zip(&other.components).map(|(a, b)| a.add(b)).collect();
        Ok(RationalField {
            dim: self.dim,
            components: comps,
            label: format!("{}+{}", self.label, other.label),
            domain: self.domain.intersect(other.domain),
            declared_singularities: [self.declared_singularities.clone(), other.declared_singularities.clone()].concat(),
        })
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = self.clone();
        for comp in &mut out.components {
            comp.numerator = comp.numerator.scale(c);
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&-C::one()).with_label(format!("-({})", self.label))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Ok(self.add(&other.neg())?.with_label(format!("{}-{}", self.label, other.label)))
    }

    /// `z -> f(z) - z`, the generator attached to a self-map `f`.
    pub fn from_self_map(f: &Self) -> Result<Self> {
        let g = f.sub(&Self::identity(f.dim))?;
        Ok(g.with_label(format!("{}-id", f.label)))
    }

    pub fn map_coeffs<D: Scalar>(&self, conv: impl Fn(&C) -> D) -> RationalField<D> {
        RationalField {
            dim: self.dim,
            components: self
                .components
                .iter()
                .map(|c| Component { numerator: c.numerator.map_coeffs(&conv), denominator: c.denominator.map_coeffs(&conv) })
                .collect(),
            label: self.label.clone(),
            domain: self.domain,
            declared_singularities: self.declared_singularities.clone(),
        }
    }

    pub fn to_exact(&self) -> ExactField {
        self.map_coeffs(|c| ExactComplex::from_c64(c.to_c64()))
    }

    pub fn to_float(&self) -> RationalField {
        self.map_coeffs(|c| c.to_c64())
    }
}

impl RationalField {
    /// Componentwise `N_k(z) / D_k(z)`.
    pub fn evaluate(&self, z: &CxVec) -> Result<CxVec> {
        if z.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: z.dim() });
        }
        if !self.domain.contains(z) {
            return Err(Error::domain(format!("point outside the domain of {}", self.label), z.as_slice()));
        }
        let mut out = Vec::with_capacity(self.dim);
        for (k, comp) in self.components.iter().enumerate() {
            let den = comp.denominator.eval(z.as_slice());
            if den.norm() < DENOMINATOR_FLOOR {
                return Err(Error::domain(format!("denominator of component {} vanishes", k + 1), z.as_slice()));
            }
            out.push(comp.numerator.eval(z.as_slice()) / den);
        }
        Ok(CxVec(out))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn identity_minus_itself_is_zero() {
        let id = RationalField::<Complex64>::identity(3);
        let g = RationalField::from_self_map(&id).unwrap();
        assert!(g.is_zero());
    }

    #[test]
    fn self_map_subtracts_componentwise() {
        // f(z) = (z1, z2/2)
        let f = RationalField::polynomial("f", vec![MultiPoly::var(2, 0), MultiPoly::var(2, 1).scale(&c(0.5))]);
        let g = RationalField::from_self_map(&f).unwrap();
        assert!(g.components()[0].numerator.is_zero());
        assert_eq!(g.components()[1].numerator, MultiPoly::var(2, 1).scale(&c(-0.5)));
    }

    #[test]
    fn vanishing_denominator_is_a_domain_error() {
        // 1 / (1 - z1)
        let den = &MultiPoly::one(1) - &MultiPoly::var(1, 0);
        let g = RationalField::new("pole", vec![Component { numerator: MultiPoly::one(1), denominator: den }], EvalDomain::Unrestricted)
            .unwrap();
        assert!(matches!(g.evaluate(&CxVec::from_real(&[1.0])), Err(Error::Domain { .. })));
        assert!(matches!(g.evaluate(&CxVec::from_real(&[0.5, 0.0])), Err(Error::DimensionMismatch { .. })));
        assert_eq!(g.evaluate(&CxVec::from_real(&[0.5])).unwrap()[0], c(2.0));
    }

    #[test]
    fn sum_with_rational_component_keeps_denominator() {
        let den = &MultiPoly::constant(1, c(2.0)) - &MultiPoly::var(1, 0);
        let a = RationalField::new("a", vec![Component { numerator: MultiPoly::var(1, 0), denominator: den.clone() }], EvalDomain::Unrestricted)
            .unwrap();
        let b = RationalField::polynomial("b", vec![MultiPoly::constant(1, c(3.0))]);
        let s = a.add(&b).unwrap();
        assert_eq!(s.components()[0].denominator, den);
        let z = CxVec::from_real(&[0.25]);
        let expect = 0.25 / 1.75 + 3.0;
        assert!((s.evaluate(&z).unwrap()[0] - c(expect)).norm() < 1e-15);
    }

    #[test]
    fn zero_denominator_is_rejected() {
        let r = RationalField::new(
            "bad",
            vec![Component { numerator: MultiPoly::<Complex64>::one(1), denominator: MultiPoly::zero(1) }],
            EvalDomain::Unrestricted,
        );
        assert!(matches!(r, Err(Error::Validation(_))));
    }
}
