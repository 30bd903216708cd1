//! JSON field description files.
//!
//! ```json
//! {
//!   "dimension": 2,
//!   "label": "example",
//!   "components": [
//!     { "numerator": [ { "coeff": [1, 0], "exponents": [0, 0] },
//!                      { "coeff": ["-1/2", 0], "exponents": [2, 0] } ] },
//!     { "numerator": [ { "coeff": [-0.5, 0], "exponents": [1, 1] } ],
//!       "denominator": [ { "coeff": [1, 0], "exponents": [0, 0] } ] }
//!   ],
//!   "domain_radius": 2.0
//! }
//! ```
//!
//! Coefficient parts are numbers or `"p/q"` strings. A missing denominator
//! means 1. A missing `domain_radius` means the field may be evaluated
//! anywhere its denominators do not vanish.

use std::path::Path;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Component, EvalDomain, ExactField, RationalField};
use crate::poly::MultiPoly;
use crate::scalar::{ExactComplex, Scalar};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoeffPart {
    Number(f64),
    Text(String),
}

impl CoeffPart {
    fn to_rational(&self) -> Result<BigRational> {
        match self {
            CoeffPart::Number(x) => BigRational::from_float(*x).ok_or_else(|| Error::Validation(format!("coefficient {x} is not finite"))),
            CoeffPart::Text(s) => {
                let t = s.trim();
                BigRational::from_str(t)
                    .or_else(|_| BigInt::from_str(t).map(BigRational::from_integer))
                    .map_err(|_| Error::Validation(format!("cannot read coefficient {s:?}; expected a number or \"p/q\"")))
            }
        }
    }

    fn to_f64(&self) -> Result<f64> {
        match self {
            CoeffPart::Number(x) => Ok(*x),
            CoeffPart::Text(_) => Ok(self.to_rational()?.to_f64().unwrap_or(f64::NAN)),
        }
    }

    fn from_rational(r: &BigRational) -> Self {
        if r.is_integer() {
            CoeffPart::Text(r.numer().to_string())
        } else {
            CoeffPart::Text(format!("{}/{}", r.numer(), r.denom()))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub coeff: [CoeffPart; 2],
    pub exponents: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentSpec {
    pub numerator: Vec<TermSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub denominator: Option<Vec<TermSpec>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpecFile {
    pub dimension: usize,
    #[serde(default)]
    pub label: String,
    pub components: Vec<ComponentSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub declared_singularities: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain_radius: Option<f64>,
}

fn exponents(term: &TermSpec, dim: usize) -> Result<Vec<u32>> {
    if term.exponents.len() != dim {
        return Err(Error::Validation(format!("exponent list {:?} has length {}, expected {dim}", term.exponents, term.exponents.len())));
    }
    term.exponents
        .iter()
        .map(|&e| u32::try_from(e).map_err(|_| Error::Validation(format!("exponent {e} must be a nonnegative integer"))))
        .collect()
}

impl FieldSpecFile {
    fn build<C: Scalar>(&self, coeff: impl Fn(&[CoeffPart; 2]) -> Result<C>) -> Result<RationalField<C>> {
        let n = self.dimension;
        if n == 0 {
            return Err(Error::Validation("dimension must be positive".into()));
        }
        if self.components.len() != n {
            return Err(Error::Validation(format!("{} components given for dimension {n}", self.components.len())));
        }
        let poly = |terms: &[TermSpec]| -> Result<MultiPoly<C>> {
            let mut p = MultiPoly::zero(n);
            for t in terms {
                p.add_term(exponents(t, n)?, coeff(&t.coeff)?);
            }
            Ok(p)
        };
        let comps = self
            .components
            .iter()
            .map(|c| {
                let numerator = poly(&c.numerator)?;
                let denominator = match &c.denominator {
                    Some(d) => poly(d)?,
                    None => MultiPoly::one(n),
                };
                Ok(Component { numerator, denominator })
            })
            .collect::<Result<Vec<_>>>()?;
        let domain = match self.domain_radius {
            None => EvalDomain::Unrestricted,
            Some(r) if r > 0.0 && r.is_finite() => EvalDomain::Ball { radius: r },
            Some(r) => return Err(Error::Validation(format!("domain radius {r} must be positive"))),
        };
        let label = if self.label.is_empty() { "field".to_string() } else { self.label.clone() };
        Ok(RationalField::new(label, comps, domain)?.with_singularities(self.declared_singularities.clone()))
    }

    pub fn to_field(&self) -> Result<RationalField> {
        self.build(|[re, im]| {
            let c = Complex64::new(re.to_f64()?, im.to_f64()?);
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::Validation("coefficient is not finite".into()));
            }
            Ok(c)
        })
    }

    /// Exact coefficients; decimal numbers are taken at their exact binary
    /// value.
    pub fn to_exact_field(&self) -> Result<ExactField> {
        self.build(|[re, im]| Ok(Complex::new(re.to_rational()?, im.to_rational()?)))
    }

    fn from_parts<C: Scalar>(field: &RationalField<C>, coeff: impl Fn(&C) -> [CoeffPart; 2]) -> Self {
        let terms = |p: &MultiPoly<C>| -> Vec<TermSpec> {
            p.terms().map(|(e, c)| TermSpec { coeff: coeff(c), exponents: e.iter().map(|&x| x as i64).collect() }).collect()
        };
        FieldSpecFile {
            dimension: field.dim(),
            label: field.label().to_string(),
            components: field
                .components()
                .iter()
                .map(|c| ComponentSpec { numerator: terms(&c.numerator), denominator: Some(terms(&c.denominator)) })
                .collect(),
            declared_singularities: field.declared_singularities().to_vec(),
            domain_radius: match field.domain() {
                EvalDomain::Unrestricted => None,
                EvalDomain::Ball { radius } => Some(radius),
            },
        }
    }

    pub fn from_field(field: &RationalField) -> Self {
        Self::from_parts(field, |c| [CoeffPart::Number(c.re), CoeffPart::Number(c.im)])
    }

    pub fn from_exact_field(field: &ExactField) -> Self {
        Self::from_parts(field, |c: &ExactComplex| [CoeffPart::from_rational(&c.re), CoeffPart::from_rational(&c.im)])
    }
}

fn parse_description(text: &str) -> Result<FieldSpecFile> {
    serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), column: e.column(), message: e.to_string() })
}

pub fn parse_field_str(text: &str) -> Result<RationalField> {
    parse_description(text)?.to_field()
}

pub fn parse_exact_field_str(text: &str) -> Result<ExactField> {
    parse_description(text)?.to_exact_field()
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Validation(format!("cannot read {}: {e}", path.display())))
}

pub fn parse_field(path: &Path) -> Result<RationalField> {
    parse_field_str(&read(path)?)
}

pub fn parse_exact_field(path: &Path) -> Result<ExactField> {
    parse_exact_field_str(&read(path)?)
}

pub fn serialize_field(field: &RationalField) -> String {
    serde_json::to_string_pretty(&FieldSpecFile::from_field(field)).expect("field specs always serialize")
}

pub fn serialize_exact_field(field: &ExactField) -> String {
    serde_json::to_string_pretty(&FieldSpecFile::from_exact_field(field)).expect("field specs always serialize")
}
