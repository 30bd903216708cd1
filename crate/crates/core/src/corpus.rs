//! Built-in fields: the hyperbolic generators `H_beta`, the worked examples
//! and a few families used to exercise the checks.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::field::{Component, EvalDomain, RationalField};
use crate::poly::MultiPoly;

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn var(dim: usize, k: usize) -> MultiPoly {
    MultiPoly::var(dim, k)
}

fn one_minus_z1(dim: usize) -> MultiPoly {
    &MultiPoly::one(dim) - &var(dim, 0)
}

/// `H_beta(z) = (beta/2)(e_1 - z_1 z)`: a group of hyperbolic automorphisms
/// with boundary regular null point `e_1` and dilation `-beta`.
pub fn h_beta(dim: usize, beta: f64) -> RationalField {
    let half = re(beta / 2.0);
    let z1 = var(dim, 0);
    let mut comps = vec![(&MultiPoly::one(dim) - &(&z1 * &z1)).scale(&half)];
    for k in 1..dim {
        comps.push((&z1 * &var(dim, k)).scale(&-half));
    }
    RationalField::polynomial(format!("h-beta:{beta}"), comps)
}

/// `G(z1, z2) = (0, -z2 / (1 - z1))`: a generator whose slices have
/// dilations `1 - 1/alpha^2` while the radial dilation is 0.
pub fn example_4_2() -> RationalField {
    let comps = vec![
        Component::polynomial(MultiPoly::zero(2)),
        Component { numerator: var(2, 1).scale(&re(-1.0)), denominator: one_minus_z1(2) },
    ];
    RationalField::new("example-4.2", comps, EvalDomain::Ball { radius: 1.0 })
        .expect("valid field")
        .with_singularities(vec!["z1 = 1".into()])
}

/// `-(z1 - 1, c z2 / (d - z2))` with numerator `-c z2`.
fn decoupled_rational(label: &str, c: f64, d: f64) -> RationalField {
    let comps = vec![
        Component::polynomial(one_minus_z1(2)),
        Component {
            numerator: var(2, 1).scale(&re(-c)),
            denominator: &MultiPoly::constant(2, re(d)) - &var(2, 1),
        },
    ];
    RationalField::new(label, comps, EvalDomain::Ball { radius: d })
        .expect("valid field")
        .with_singularities(vec![format!("z2 = {d}")])
}

/// `-(z1 - 1, a z2 (1 + z2/2))`.
fn decoupled_quadratic(label: &str, a: f64) -> RationalField {
    let z2 = var(2, 1);
    let second = &z2.scale(&re(-a)) + &(&z2 * &z2).scale(&re(-a / 2.0));
    RationalField::polynomial(label, vec![one_minus_z1(2), second])
}

/// `F(z) = -(z1 - 1, 5 z2 / (4 (2 - z2)))`.
pub fn example_6_1() -> RationalField {
    let comps = vec![
        Component::polynomial(one_minus_z1(2)),
        Component {
            numerator: var(2, 1).scale(&re(-5.0)),
            denominator: &MultiPoly::constant(2, re(8.0)) - &var(2, 1).scale(&re(4.0)),
        },
    ];
    RationalField::new("example-6.1", comps, EvalDomain::Ball { radius: 2.0 })
        .expect("valid field")
        .with_singularities(vec!["z2 = 2".into()])
}

/// Quadratic truncation of [`example_6_1`] at `e_1`: `-(z1 - 1, (5 z2/8)(1 + z2/2))`.
pub fn example_6_1_quad() -> RationalField {
    decoupled_quadratic("example-6.1-quad", 5.0 / 8.0)
}

/// `F(z) = -(z1 - 1, 3 z2 / (2 - z2))`.
pub fn example_6_2() -> RationalField {
    decoupled_rational("example-6.2", 3.0, 2.0)
}

/// Quadratic truncation of [`example_6_2`]: `-(z1 - 1, (3 z2/2)(1 + z2/2))`.
pub fn example_6_2_quad() -> RationalField {
    decoupled_quadratic("example-6.2-quad", 1.5)
}

/// Parabolic automorphism generator fixing `e_1`, built from the translation
/// `w' -> w' + i t b` in Siegel coordinates. Dimension is `1 + b.len()`.
pub fn heisenberg(b: &[Complex64]) -> RationalField {
    let dim = 1 + b.len();
    let i = Complex64::new(0.0, 1.0);
    let one_minus = one_minus_z1(dim);
    // <z', b> = sum z_k conj(b_k)
    let mut pairing = MultiPoly::zero(dim);
    for (k, bk) in b.iter().enumerate() {
        pairing = &pairing + &var(dim, k + 1).scale(&bk.conj());
    }
    let mut comps = vec![(&one_minus * &pairing).scale(&i)];
    for (k, bk) in b.iter().enumerate() {
        let lin = one_minus.scale(&(-i * bk));
        let quad = (&var(dim, k + 1) * &pairing).scale(&-i);
        comps.push(&lin + &quad);
    }
    RationalField::polynomial("heisenberg", comps)
}

/// `G(z) = (0, A z'')` for an anti-Hermitian `(n-1) x (n-1)` matrix `A`:
/// a one-parameter group of unitary rotations fixing `e_1`.
pub fn unitary_rotation(a: &[Vec<Complex64>]) -> RationalField {
    let dim = 1 + a.len();
    let mut comps = vec![MultiPoly::zero(dim)];
    for row in a {
        let mut p = MultiPoly::zero(dim);
        for (j, ajk) in row.iter().enumerate() {
            p = &p + &var(dim, j + 1).scale(ajk);
        }
        comps.push(p);
    }
    RationalField::polynomial("rotation", comps)
}

/// `G(z) = (1 - z1, -c z2, ..., -c zn)`; a generator with dilation `-1`
/// whenever `c >= 1/2`.
pub fn contraction(dim: usize, c: f64) -> RationalField {
    let mut comps = vec![one_minus_z1(dim)];
    for k in 1..dim {
        comps.push(var(dim, k).scale(&re(-c)));
    }
    RationalField::polynomial(format!("contraction:{c}"), comps)
}

/// `f(z) - z` for the self-map `f(z) = (z1^3, z1^2 z2, ..., z1^2 zn)`.
pub fn cubic_self_map_generator(dim: usize) -> RationalField {
    let z1 = var(dim, 0);
    let z1sq = &z1 * &z1;
    let mut comps = vec![&(&z1sq * &z1) - &z1];
    for k in 1..dim {
        comps.push(&(&z1sq * &var(dim, k)) - &var(dim, k));
    }
    RationalField::polynomial("cubic-self-map", comps)
}

/// Polynomial field with every monomial of degree `<= max_degree` present
/// and coefficients uniform in the square `[-scale, scale]^2`.
pub fn random_polynomial_field<R: Rng>(rng: &mut R, dim: usize, max_degree: u32, scale: f64) -> RationalField {
    let exps = exponents_up_to(dim, max_degree);
    let comps = (0..dim)
        .map(|_| {
            MultiPoly::from_terms(
                dim,
                exps.iter().map(|e| {
                    (e.clone(), Complex64::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale)))
                }),
            )
        })
        .collect();
    RationalField::polynomial("random", comps)
}

/// All exponents in `dim` variables of total degree `<= max_degree`, in
/// lexicographic order.
pub fn exponents_up_to(dim: usize, max_degree: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; dim];
    fn rec(k: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if k == cur.len() {
            out.push(cur.clone());
            return;
        }
        for p in 0..=left {
            cur[k] = p;
            rec(k + 1, left - p, cur, out);
        }
        cur[k] = 0;
    }
    rec(0, max_degree, &mut cur, &mut out);
    out
}

/// Exponents of total degree exactly `degree`.
pub fn exponents_of_degree(dim: usize, degree: u32) -> Vec<Vec<u32>> {
    exponents_up_to(dim, degree).into_iter().filter(|e| e.iter().sum::<u32>() == degree).collect()
}

/// Names accepted by [`builtin_example`]; parametrized names show a sample
/// parameter.
pub fn builtin_names() -> Vec<&'static str> {
    vec![
        "example-4.2",
        "h-beta:<beta>[:<n>]",
        "example-6.1",
        "example-6.1-quad",
        "example-6.2",
        "example-6.2-quad",
        "zero:<n>",
    ]
}

/// Looks up a built-in field by name.
pub fn builtin_example(name: &str) -> Result<RationalField> {
    let unknown = || Error::UnknownExample(name.to_string());
    match name {
        "example-4.2" => return Ok(example_4_2()),
        "example-6.1" => return Ok(example_6_1()),
        "example-6.1-quad" => return Ok(example_6_1_quad()),
        "example-6.2" => return Ok(example_6_2()),
        "example-6.2-quad" => return Ok(example_6_2_quad()),
        _ => {}
    }
    if let Some(rest) = name.strip_prefix("h-beta:") {
        let mut parts = rest.split(':');
        let beta: f64 = parts.next().and_then(|s| s.parse().ok()).ok_or_else(unknown)?;
        let dim: usize = match parts.next() {
            Some(s) => s.parse().map_err(|_| unknown())?,
            None => 2,
        };
        if parts.next().is_some() || dim == 0 || !beta.is_finite() {
            return Err(unknown());
        }
        return Ok(h_beta(dim, beta).with_label(name));
    }
    if let Some(rest) = name.strip_prefix("zero:") {
        let dim: usize = rest.parse().map_err(|_| unknown())?;
        if dim == 0 {
            return Err(unknown());
        }
        return Ok(RationalField::zero(dim));
    }
    Err(unknown())
}
