//! The acceptance suite: eleven numbered criteria with pinned tolerances.

use std::collections::BTreeMap;
use std::ops::{Add, Mul};

use ballgen_core::cert::{certify_generator, certify_poisson, estimate_dilation};
use ballgen_core::corpus::{
    builtin_example, contraction, cubic_self_map_generator, example_4_2, example_6_1, example_6_1_quad, example_6_2, example_6_2_quad, h_beta,
    heisenberg, random_polynomial_field, unitary_rotation,
};
use ballgen_core::flow::{group_inverse_residual, julia_monotonicity, lft_fit_residual, semigroup_residual};
use ballgen_core::geometry::{
    ball_sample, disc_expression, disc_pairing, generator_expression, poisson, poisson_disc, poisson_pairing, seeded_rng,
};
use ballgen_core::jet::{jet_at_e1, Jet};
use ballgen_core::jet_criteria::{check_group_conditions, check_structure_ledger, mutation_harness};
use ballgen_core::probe::{probe_derivative_bounds, probe_hypothesis, probe_limits, Trend};
use ballgen_core::report::Witness;
use ballgen_core::slice::{disc_generator_check, geodesic, slice_dilation, slice_reduce, v_grid, Slice, SliceParam};
use ballgen_core::{Complex64, CxVec, RationalField, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct CriterionOutcome {
    pub number: usize,
    pub key: String,
    pub passed: bool,
    pub measured: BTreeMap<String, f64>,
    pub detail: String,
}

struct Record {
    measured: BTreeMap<String, f64>,
    notes: Vec<String>,
    passed: bool,
}

impl Record {
    fn new() -> Self {
        Record { measured: BTreeMap::new(), notes: Vec::new(), passed: true }
    }

    fn value(&mut self, key: &str, v: f64) {
        self.measured.insert(key.to_string(), v);
    }

    fn require(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.passed = false;
            self.notes.push(what.into());
        }
    }

    /// Keeps the running maximum under `key`.
    fn max(&mut self, key: &str, v: f64) {
        let e = self.measured.entry(key.to_string()).or_insert(f64::NEG_INFINITY);
        *e = e.max(v);
    }
}

pub const KEYS: [&str; 11] = [
    "quadratic-truncation-counterexample",
    "rational-generators-certify",
    "h-beta-slices-and-pairing",
    "slice-dilations-differ-from-radial",
    "geodesic-slice-identities",
    "flow-laws",
    "jet-group-conditions",
    "structure-ledger",
    "linear-fractional-flow-test",
    "generator-poisson-equivalence",
    "boundary-probe-coherence",
];

/// Runs criterion `number` (1-based).
pub fn run(number: usize) -> CriterionOutcome {
    let mut rec = Record::new();
    let result = match number {
        1 => quadratic_truncation_counterexample(&mut rec),
        2 => rational_generators_certify(&mut rec),
        3 => h_beta_slices_and_pairing(&mut rec),
        4 => slice_dilations_differ_from_radial(&mut rec),
        5 => geodesic_slice_identities(&mut rec),
        6 => flow_laws(&mut rec),
        7 => jet_group_conditions(&mut rec),
        8 => structure_ledger(&mut rec),
        9 => linear_fractional_flow_test(&mut rec),
        10 => generator_poisson_equivalence(&mut rec),
        11 => boundary_probe_coherence(&mut rec),
        _ => panic!("no criterion {number}"),
    };
    if let Err(e) = result {
        rec.require(false, format!("computation failed: {e}"));
    }
    CriterionOutcome {
        number,
        key: KEYS[number - 1].to_string(),
        passed: rec.passed,
        measured: rec.measured,
        detail: if rec.notes.is_empty() { "ok".into() } else { rec.notes.join("; ") },
    }
}

pub fn run_all() -> Vec<CriterionOutcome> {
    (1..=KEYS.len()).map(run).collect()
}

/// One line per criterion: `PASS  3 h-beta-slices-and-pairing  detail`.
pub fn line(o: &CriterionOutcome) -> String {
    format!("{} {:>2} {:<38} {}", if o.passed { "PASS" } else { "FAIL" }, o.number, o.key, o.detail)
}

pub fn table(outcomes: &[CriterionOutcome]) -> String {
    let mut out: Vec<String> = outcomes.iter().map(line).collect();
    let passed = outcomes.iter().filter(|o| o.passed).count();
    out.push(format!("{passed}/{} criteria passed", outcomes.len()));
    out.join("\n")
}

/// `a + b sqrt(2)` with rational `a`, `b`.
#[derive(Clone, Debug, PartialEq)]
struct QuadSqrt2 {
    a: BigRational,
    b: BigRational,
}

impl QuadSqrt2 {
    fn rational(a: BigRational) -> Self {
        QuadSqrt2 { a, b: BigRational::zero() }
    }

    fn to_f64(&self) -> f64 {
        self.a.to_f64().unwrap() + self.b.to_f64().unwrap() * std::f64::consts::SQRT_2
    }
}

impl Add for QuadSqrt2 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        QuadSqrt2 { a: self.a + o.a, b: self.b + o.b }
    }
}

impl Mul for QuadSqrt2 {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let two = BigRational::from_integer(BigInt::from(2));
        QuadSqrt2 { a: &self.a * &o.a + two * &self.b * &o.b, b: &self.a * &o.b + &self.b * &o.a }
    }
}

fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// `Re<F(z), z>` for a polynomial field at a real point, exactly.
fn exact_real_pairing(field: &RationalField, z: &[QuadSqrt2]) -> QuadSqrt2 {
    let exact = field.to_exact();
    let mut total = QuadSqrt2::rational(BigRational::zero());
    for (k, comp) in exact.components().iter().enumerate() {
        assert!(comp.denominator.is_constant(), "polynomial field expected");
        let den = comp.denominator.constant_term().re;
        for (e, c) in comp.numerator.terms() {
            let mut term = QuadSqrt2::rational(&c.re / &den);
            for (j, &p) in e.iter().enumerate() {
                for _ in 0..p {
                    term = term * z[j].clone();
                }
            }
            total = total + term * z[k].clone();
        }
    }
    total
}

fn quadratic_truncation_counterexample(rec: &mut Record) -> Result<()> {
    let half_root = QuadSqrt2 { a: BigRational::zero(), b: ratio(1, 2) };
    let z = [half_root.clone(), QuadSqrt2 { a: BigRational::zero(), b: ratio(-1, 2) }];
    let value = exact_real_pairing(&example_6_1_quad(), &z);
    let expected = QuadSqrt2 { a: ratio(-13, 16), b: ratio(37, 64) };
    rec.require(value == expected, format!("exact value {} + {} sqrt2", value.a, value.b));
    rec.value("boundary_value", value.to_f64());
    rec.require((value.to_f64() - 0.005).abs() <= 1e-3, "boundary value not within 1e-3 of 0.005");
    let report = certify_generator(&example_6_1_quad(), 0.0, 20_000, 7, 1e-8)?;
    rec.value("max_violation", report.max_violation);
    rec.require(!report.passed(), "certification of the truncation passed");
    rec.require(report.max_violation >= 4e-3, "witness violation below 4e-3");
    if let Some(Witness::Ball(w)) = &report.witness {
        let target = CxVec::from_real(&[std::f64::consts::FRAC_1_SQRT_2, -std::f64::consts::FRAC_1_SQRT_2]);
        rec.value("witness_distance_to_diagonal", w.scale(Complex64::new(1.0 / w.norm(), 0.0)).distance(&target));
    }
    Ok(())
}

fn rational_generators_certify(rec: &mut Record) -> Result<()> {
    for field in [example_6_1(), example_6_2()] {
        let report = certify_generator(&field, 0.0, 20_000, 42, 1e-9)?;
        let shells = report.extras["max_shells"];
        rec.value(&format!("{}_max_shells", field.label()), shells);
        rec.require(report.passed(), format!("{} failed with violation {:e}", field.label(), report.max_violation));
        rec.require(shells <= 1e-9, format!("{} shell violation {shells:e}", field.label()));
    }
    Ok(())
}

fn random_slice<R: Rng>(rng: &mut R, dim: usize) -> Result<SliceParam> {
    let alpha = rng.gen_range(0.05..=1.0);
    let dir: Vec<Complex64> = (1..dim).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    SliceParam::from_alpha(alpha, &dir)
}

fn random_disc_point<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::from_polar(0.95 * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..std::f64::consts::TAU))
}

fn h_beta_slices_and_pairing(rec: &mut Record) -> Result<()> {
    let mut rng = seeded_rng(3, 0);
    let slices: Vec<SliceParam> = (0..10).map(|_| random_slice(&mut rng, 3)).collect::<Result<_>>()?;
    let zetas: Vec<Complex64> = (0..100).map(|_| random_disc_point(&mut rng)).collect();
    let points = ball_sample(3, 1000, 3, 0.95);
    for b in [-2.0, -1.0, 0.0, 1.0, 2.0] {
        let h = h_beta(3, b);
        for v in &slices {
            for &zeta in &zetas {
                let dev = (slice_reduce(&h, v, zeta)? - (1.0 - zeta * zeta) * (b / 2.0)).norm();
                rec.max("slice_deviation", dev);
            }
        }
        for z in &points {
            rec.max("pairing_deviation", (poisson_pairing(&h, z)? - b * poisson(z)?).abs());
        }
    }
    let slice_dev = rec.measured["slice_deviation"];
    let pairing_dev = rec.measured["pairing_deviation"];
    rec.require(slice_dev <= 1e-12, format!("slice deviation {slice_dev:e}"));
    rec.require(pairing_dev <= 1e-9, format!("pairing deviation {pairing_dev:e}"));
    Ok(())
}

fn slice_dilations_differ_from_radial(rec: &mut Record) -> Result<()> {
    let field = example_4_2();
    let est = estimate_dilation(&field)?;
    rec.value("dilation", est.beta);
    rec.require(est.beta.abs() <= 1e-6, format!("dilation {:e}", est.beta));
    for alpha in [0.25, 0.5, 0.75, 1.0] {
        let got = slice_dilation(&field, &SliceParam::from_alpha(alpha, &[Complex64::new(1.0, 0.0)])?)?;
        let dev = (got - (1.0 - 1.0 / (alpha * alpha))).abs();
        rec.max("slice_dilation_deviation", dev);
        rec.require(dev <= 1e-6, format!("slice dilation at alpha {alpha} off by {dev:e}"));
    }
    let hyp = probe_hypothesis(&field, 2.0, 1200, 42)?;
    let star = hyp.iter().find(|r| r.quantity_id == "hyp_star").expect("first hypothesis quantity");
    rec.value("hyp_star_sup", star.sup_observed);
    rec.require(star.sup_observed == 0.0, "first hypothesis quantity is not identically 0");
    let deriv = probe_derivative_bounds(&field, 2.0, 1200, 42)?;
    let entry = deriv.iter().find(|r| r.quantity_id == "dG_kh").expect("transverse derivative entry");
    let exponent = entry.growth_exponent.unwrap_or(f64::NAN);
    rec.value("growth_exponent", exponent);
    rec.require(entry.trend == Trend::Growing, format!("derivative trend {:?}", entry.trend));
    rec.require(exponent >= 0.9, format!("growth exponent {exponent}"));
    Ok(())
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

fn geodesic_slice_identities(rec: &mut Record) -> Result<()> {
    let mut rng = seeded_rng(5, 0);
    let mut failures = 0usize;
    let mut checks = 0usize;
    for _ in 0..50 {
        let dim = rng.gen_range(2..=3);
        let field = random_polynomial_field(&mut rng, dim, 3, 1.0);
        for _ in 0..10 {
            let v = random_slice(&mut rng, dim)?;
            let a2 = v.alpha() * v.alpha();
            for _ in 0..20 {
                let zeta = random_disc_point(&mut rng);
                let z = geodesic(&v, zeta);
                let g = slice_reduce(&field, &v, zeta)?;
                let u = poisson(&z)?;
                let u_disc = poisson_disc(zeta)?;
                let mut ok = close(u, u_disc / a2, 1e-10);
                ok &= close(generator_expression(&field, &z)?, disc_expression(zeta, g), 1e-10);
                let pairing = poisson_pairing(&field, &z)?;
                for delta in [-2.0, 0.0, 2.0] {
                    ok &= close(disc_pairing(zeta, g) + delta * u_disc, a2 * (pairing + delta * u), 1e-10);
                }
                checks += 1;
                failures += usize::from(!ok);
            }
        }
    }
    rec.value("points_checked", checks as f64);
    rec.value("points_failed", failures as f64);
    rec.require(failures == 0, format!("{failures} of {checks} points violate an identity"));
    Ok(())
}

fn flow_laws(rec: &mut Record) -> Result<()> {
    let field = builtin_example("h-beta:1")?;
    let tol = 1e-10;
    for z in ball_sample(2, 10, 6, 0.8) {
        for (t, s) in [(0.5, 0.5), (1.0, 1.0)] {
            rec.max("semigroup_residual", semigroup_residual(&field, &z, t, s, tol)?);
        }
        let julia = julia_monotonicity(&field, &z, -1.0, &[0.5, 1.0, 2.0], 1e-6)?;
        rec.max("julia_deviation", julia.extras["max_abs_deviation"]);
        let inverse = group_inverse_residual(&field, &z, 1.0, tol)?;
        rec.max("group_inverse_residual", inverse.residual.unwrap_or(f64::INFINITY));
    }
    for key in ["semigroup_residual", "julia_deviation", "group_inverse_residual"] {
        let v = rec.measured[key];
        rec.require(v <= 1e-6, format!("{key} {v:e}"));
    }
    Ok(())
}

fn jet3(field: &RationalField) -> Result<Jet> {
    jet_at_e1(field, 3)
}

fn jet_group_conditions(rec: &mut Record) -> Result<()> {
    for b in [-1.0, 1.0] {
        let verdict = check_group_conditions(&jet3(&h_beta(2, b))?, -b, 1e-12)?;
        let worst = verdict.residuals.values().fold(0.0f64, |m, r| m.max(r.abs()));
        rec.max("h_beta_max_residual", worst);
        rec.require(verdict.is_group(), format!("h-beta:{b} not recognised as a group"));
    }
    let worst = rec.measured["h_beta_max_residual"];
    rec.require(worst <= 1e-12, format!("group residual {worst:e}"));
    let verdict = check_group_conditions(&jet3(&example_6_1())?, -1.0, 1e-12)?;
    let first = verdict.residuals["cond1"].abs();
    rec.value("example_6_1_first_residual", first);
    rec.require(!verdict.is_group(), "example-6.1 accepted as a group");
    rec.require((first - 0.125).abs() <= 1e-10, format!("first condition residual {first}"));
    Ok(())
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn structure_ledger(rec: &mut Record) -> Result<()> {
    let groups = [
        h_beta(2, 1.0),
        h_beta(3, -1.0),
        h_beta(3, 2.0),
        unitary_rotation(&[vec![c(0.0, 0.5), c(1.0, 0.2)], vec![c(-1.0, 0.2), c(0.0, 0.0)]]),
        heisenberg(&[c(0.3, 0.1)]),
        heisenberg(&[c(0.3, 0.1), c(-0.2, 0.4)]),
        RationalField::zero(3),
    ];
    let mut failing = Vec::new();
    for field in &groups {
        let jet = jet3(field)?;
        let shifted = jet.shift_by_hbeta(jet.beta());
        let float_ok = check_structure_ledger(&shifted, 1e-9)?.iter().all(|i| i.passed);
        let exact_jet = jet_at_e1(&field.to_exact(), 3)?;
        let exact_ok = check_structure_ledger(&exact_jet.shift_by_hbeta(exact_jet.beta()), 0.0)?.iter().all(|i| i.passed);
        if !(float_ok && exact_ok) {
            failing.push(field.label().to_string());
        }
    }
    rec.value("groups_checked", groups.len() as f64);
    rec.require(failing.is_empty(), format!("ledger failures for {}", failing.join(", ")));
    let bases = vec![
        jet3(&h_beta(3, 1.0))?.shift_by_hbeta(-1.0),
        jet3(&groups[3])?,
        jet3(&groups[5])?,
    ];
    let outcomes = mutation_harness(&bases, 100, 1e-2, 3, 1e-9)?;
    let hits = outcomes.iter().filter(|o| o.detected).count();
    rec.value("mutations_detected", hits as f64);
    rec.require(hits >= 95, format!("{hits}/100 mutations detected"));
    Ok(())
}

fn linear_fractional_flow_test(rec: &mut Record) -> Result<()> {
    let group = lft_fit_residual(&builtin_example("h-beta:1")?, 1.0, 48, 42, 1e-12)?;
    let truncation = lft_fit_residual(&example_6_2_quad(), 1.0, 48, 42, 1e-12)?;
    rec.value("h_beta_residual", group.rms_residual);
    rec.value("truncation_residual", truncation.rms_residual);
    rec.require(group.rms_residual <= 1e-8, format!("h-beta:1 residual {:e}", group.rms_residual));
    let floor = group.rms_residual.max(1e-8);
    rec.value("ratio_to_floor", truncation.rms_residual / floor);
    rec.require(truncation.rms_residual >= 1e3 * floor, format!("truncation residual {:e}", truncation.rms_residual));
    Ok(())
}

/// Seeded candidates of degree at most 3: combinations of known generators,
/// small perturbations of them and unstructured polynomials.
fn equivalence_candidates() -> Vec<(RationalField, f64)> {
    let mut rng = seeded_rng(10, 0);
    let mut out = Vec::new();
    for i in 0..50 {
        let dim = 2 + i % 2;
        let beta = [-1.0, 0.0, 1.0][i % 3];
        let b = rng.gen_range(-1.5..1.5);
        let mut field = h_beta(dim, b);
        if rng.gen_bool(0.5) {
            let rows: Vec<Vec<Complex64>> = (1..dim)
                .map(|j| (1..dim).map(|k| if j == k { c(0.0, rng.gen_range(-1.0..1.0)) } else { c(0.0, 0.0) }).collect())
                .collect();
            field = field.add(&unitary_rotation(&rows)).unwrap();
        }
        match i % 5 {
            0 => field = field.add(&heisenberg(&vec![c(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)); dim - 1])).unwrap(),
            1 => field = field.add(&contraction(dim, rng.gen_range(0.5..1.5))).unwrap(),
            2 => field = field.add(&cubic_self_map_generator(dim).scale(&c(rng.gen_range(0.1..1.0), 0.0))).unwrap(),
            3 => field = field.add(&random_polynomial_field(&mut rng, dim, 3, 0.05)).unwrap(),
            _ => field = random_polynomial_field(&mut rng, dim, 3, 0.5),
        }
        out.push((field.with_label(format!("candidate-{i}")), beta));
    }
    out
}

fn generator_poisson_equivalence(rec: &mut Record) -> Result<()> {
    let mut agree = 0usize;
    let mut passing = 0usize;
    let mut slice_failures = Vec::new();
    let tol = 1e-8;
    for (field, beta) in equivalence_candidates() {
        let by_generator = certify_generator(&field, beta, 4000, 11, tol)?;
        let by_poisson = certify_poisson(&field, beta, 4000, 11, tol)?;
        if by_generator.passed() == by_poisson.passed() {
            agree += 1;
        } else {
            rec.notes.push(format!("{} verdicts disagree", field.label()));
        }
        if by_generator.passed() {
            passing += 1;
            for v in v_grid(field.dim(), 11) {
                let disc = disc_generator_check(&Slice { field: &field, v }, beta, 300, 11, tol)?;
                rec.max("slice_max_violation", disc.max_violation);
                if !disc.passed() {
                    slice_failures.push(field.label().to_string());
                    break;
                }
            }
        }
    }
    rec.value("agreements", agree as f64);
    rec.value("passing_candidates", passing as f64);
    rec.require(agree == 50, format!("{agree}/50 verdicts agree"));
    rec.require(slice_failures.is_empty(), format!("slice check failed for {}", slice_failures.join(", ")));
    Ok(())
}

fn boundary_probe_coherence(rec: &mut Record) -> Result<()> {
    let corpus = ["h-beta:1", "h-beta:-1", "example-6.1", "example-6.2", "example-6.1-quad", "example-6.2-quad", "zero:2", "example-4.2"];
    let mut probed = Vec::new();
    for name in corpus {
        let field = builtin_example(name)?;
        let hyp = probe_hypothesis(&field, 2.0, 1200, 42)?;
        if !hyp.iter().all(|r| r.trend == Trend::Bounded) {
            continue;
        }
        let beta = estimate_dilation(&field)?.beta;
        for r in probe_limits(&field, Some(beta), 42)? {
            let Some(est) = r.limit() else {
                rec.require(false, format!("{name}: no limit for {} along {}", r.quantity_id, r.curve.clone().unwrap_or_default()));
                continue;
            };
            if r.quantity_id.starts_with("limit_4") {
                rec.max("transverse_limit_magnitude", est.norm());
                rec.require(est.norm() <= 1e-4, format!("{name}: {} has magnitude {:e}", r.quantity_id, est.norm()));
            } else {
                let dev = (est - beta).norm();
                rec.max("dilation_deviation", dev);
                rec.require(dev <= 1e-4, format!("{name}: {} off the dilation by {dev:e}", r.quantity_id));
            }
        }
        probed.push(name);
    }
    rec.value("fields_probed", probed.len() as f64);
    rec.require(probed.len() >= 5, format!("only {} corpus fields satisfy the hypothesis", probed.len()));
    Ok(())
}
