//! Group and rigidity criteria read off the degree-3 jet at `e_1`, the
//! structural ledger of a dilation-0 jet, and slice jets.
//!
//! Indices are 0-based: component 0 and variable 0 are the `e_1` direction,
//! `y_k` below means the variable `k >= 1`.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::Zero;
use rand::Rng;
use serde::Serialize;

use crate::corpus::exponents_of_degree;
use crate::error::{Error, Result};
use crate::geometry::seeded_rng;
use crate::jet::{pair, Jet};
use crate::poly::Exponent;
use crate::scalar::Scalar;
use crate::slice::SliceParam;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupVerdict {
    Group,
    NotGroup,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroVerdict {
    IdenticallyZero,
    Nonzero,
    NotApplicable,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LedgerItem {
    pub id: String,
    pub passed: bool,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JetVerdict {
    pub beta: f64,
    pub tolerance: f64,
    /// `cond1` .. `cond4`, the largest residual of each group condition.
    pub residuals: BTreeMap<String, f64>,
    pub group_verdict: GroupVerdict,
    pub zero_verdict: ZeroVerdict,
    pub structure_ledger: Vec<LedgerItem>,
}

impl JetVerdict {
    pub fn is_group(&self) -> bool {
        self.group_verdict == GroupVerdict::Group
    }

    pub fn ledger_passed(&self) -> bool {
        self.structure_ledger.iter().all(|i| i.passed)
    }

    pub fn failing_items(&self) -> BTreeSet<String> {
        failing(&self.structure_ledger)
    }
}

fn failing(items: &[LedgerItem]) -> BTreeSet<String> {
    items.iter().filter(|i| !i.passed).map(|i| i.id.clone()).collect()
}

fn unit(dim: usize, k: usize) -> Exponent {
    let mut e = vec![0; dim];
    e[k] = 1;
    e
}

fn triple(dim: usize) -> Exponent {
    let mut e = vec![0; dim];
    e[0] = 3;
    e
}

/// Residuals of the four group conditions for a field with dilation `beta`.
///
/// 1. `Re <dG/dz_k(e_1), e_k> = beta/2` for `k >= 1`;
/// 2. `Re <d^2G/dz_1^2(e_1), e_1> = beta` and, for `k >= 1`,
///    `Re <d^2G/dz_1 dz_k(e_1), e_k> = beta/2`;
/// 3. `<d^2G/dz_1 dz_k(e_1), e_h> = 0` for `1 <= k < h`;
/// 4. `Re <d^3G/dz_1^3(e_1), e_1> = 0`.
///
/// When all hold, the zero verdict is filled in as well.
pub fn check_group_conditions<C: Scalar>(jet: &Jet<C>, beta: f64, tol: f64) -> Result<JetVerdict> {
    jet.require_order(3)?;
    let n = jet.dim();
    let d = |k: usize, e: &[u32]| jet.derivative(k, e).to_c64();
    let mut cond1: f64 = 0.0;
    let mut cond2 = (d(0, &pair(n, 0, 0)).re - beta).abs();
    let mut cond3: f64 = 0.0;
    for k in 1..n {
        cond1 = cond1.max((d(k, &unit(n, k)).re - beta / 2.0).abs());
        cond2 = cond2.max((d(k, &pair(n, 0, k)).re - beta / 2.0).abs());
        for h in k + 1..n {
            cond3 = cond3.max(d(h, &pair(n, 0, k)).norm());
        }
    }
    let cond4 = d(0, &triple(n)).re.abs();
    let residuals: BTreeMap<String, f64> =
        [("cond1", cond1), ("cond2", cond2), ("cond3", cond3), ("cond4", cond4)].into_iter().map(|(k, v)| (k.to_string(), v)).collect();
    let group = residuals.values().all(|&r| r <= tol);
    let mut verdict = JetVerdict {
        beta,
        tolerance: tol,
        residuals,
        group_verdict: if group { GroupVerdict::Group } else { GroupVerdict::NotGroup },
        zero_verdict: ZeroVerdict::NotApplicable,
        structure_ledger: Vec::new(),
    };
    if group {
        verdict.zero_verdict = zero_decision(jet, beta, tol);
    }
    Ok(verdict)
}

/// For a group generator: zero iff the dilation, the whole linear part and
/// `<d^2G/dz_1^2(e_1), e_1>` vanish.
fn zero_decision<C: Scalar>(jet: &Jet<C>, beta: f64, tol: f64) -> ZeroVerdict {
    let n = jet.dim();
    let linear = jet.t.iter().flatten().map(|c| c.to_c64().norm()).fold(0.0, f64::max);
    let curvature = jet.derivative(0, &pair(n, 0, 0)).to_c64().norm();
    if beta.abs() <= tol && linear <= tol && curvature <= tol {
        ZeroVerdict::IdenticallyZero
    } else {
        ZeroVerdict::Nonzero
    }
}

/// Decides whether a group generator is identically zero.
pub fn check_rigidity<C: Scalar>(jet: &Jet<C>, beta: f64, tol: f64) -> Result<JetVerdict> {
    let verdict = check_group_conditions(jet, beta, tol)?;
    if !verdict.is_group() {
        return Err(Error::PreconditionFailed("rigidity applies only to jets satisfying the group conditions".into()));
    }
    Ok(verdict)
}

pub const LEDGER_ITEMS: [&str; 10] = [
    "re_q1_20_nonneg",
    "re_skk_bound",
    "re_diagonal_zero",
    "s_anti_hermitian",
    "q1_0J_zero",
    "q1_1ek_eq_qh_0ekeh",
    "qh_0ekel_zero",
    "qk_1ek_imag_real",
    "qtilde_hermitian_psd",
    "q3_shape",
];

struct Judge {
    tol: f64,
}

impl Judge {
    fn item(&self, id: &str, passed: bool, residual: f64) -> LedgerItem {
        LedgerItem { id: id.into(), passed, residual }
    }

    /// All values vanish.
    fn zeros<C: Scalar>(&self, id: &str, values: Vec<C>) -> LedgerItem {
        let mut sum = C::Real::zero();
        for v in &values {
            sum = sum + v.abs_sqr();
        }
        let residual = C::real_to_f64(&sum).sqrt();
        let passed = if C::EXACT { sum == C::Real::zero() } else { residual <= self.tol };
        self.item(id, passed, residual)
    }

    /// All values are `>= 0`.
    fn nonneg<C: Scalar>(&self, id: &str, values: Vec<C::Real>) -> LedgerItem {
        let residual = values.iter().map(|x| (-C::real_to_f64(x)).max(0.0)).fold(0.0, f64::max);
        let passed = if C::EXACT { values.iter().all(|x| *x >= C::Real::zero()) } else { residual <= self.tol };
        self.item(id, passed, residual)
    }
}

/// Structural relations satisfied by the jet of every generator with a
/// boundary regular null point of dilation 0 at `e_1`. The first two items
/// hold unconditionally; the rest are implied when `re_diagonal_zero`
/// (`Re q^1_{2,0} = Re s_kk = 0`) holds.
///
/// In exact mode every verdict is decided without tolerance, except that
/// residuals are still reported as doubles.
pub fn check_structure_ledger<C: Scalar>(jet: &Jet<C>, tol: f64) -> Result<Vec<LedgerItem>> {
    jet.require_order(3)?;
    let n = jet.dim();
    let judge = Judge { tol };
    let q = |k: usize, e: &[u32]| jet.q2_at(k, e);
    let s = |k: usize, j: usize| jet.t[k][j].clone();
    let y_pairs: Vec<Exponent> = exponents_of_degree(n, 2).into_iter().filter(|e| e[0] == 0).collect();
    let q1_20 = q(0, &pair(n, 0, 0));
    let mut items = Vec::new();

    items.push(judge.nonneg::<C>("re_q1_20_nonneg", vec![q1_20.re()]));

    // Re s_kk <= -|q^1_{0,2e_k}|
    {
        let mut residual: f64 = 0.0;
        let mut exact_ok = true;
        for k in 1..n {
            let re_s = s(k, k).re();
            let bound = q(0, &pair(n, k, k));
            residual = residual.max((C::real_to_f64(&re_s) + C::real_to_f64(&bound.abs_sqr()).sqrt()).max(0.0));
            exact_ok &= re_s <= C::Real::zero() && re_s.clone() * re_s >= bound.abs_sqr();
        }
        let passed = if C::EXACT { exact_ok } else { residual <= tol };
        items.push(judge.item("re_skk_bound", passed, residual));
    }

    let mut cond = vec![C::from_real(q1_20.re())];
    cond.extend((1..n).map(|k| C::from_real(s(k, k).re())));
    items.push(judge.zeros("re_diagonal_zero", cond));

    let mut skew = Vec::new();
    for k in 1..n {
        for j in 1..n {
            skew.push(s(k, j) + s(j, k).conj());
        }
    }
    items.push(judge.zeros("s_anti_hermitian", skew));

    items.push(judge.zeros("q1_0J_zero", y_pairs.iter().map(|e| q(0, e)).collect()));

    let mut diffs = Vec::new();
    for k in 1..n {
        for h in 1..n {
            diffs.push(q(0, &pair(n, 0, k)) - q(h, &pair(n, k, h)));
        }
    }
    items.push(judge.zeros("q1_1ek_eq_qh_0ekeh", diffs));

    let mut off = Vec::new();
    for h in 1..n {
        for e in &y_pairs {
            if e[h] == 0 {
                off.push(q(h, e));
            }
        }
    }
    items.push(judge.zeros("qh_0ekel_zero", off));

    {
        let mut imag = vec![C::from_real(q1_20.im())];
        let mut re = Vec::new();
        for k in 1..n {
            let c = q(k, &pair(n, 0, k));
            imag.push(C::from_real(c.im()));
            re.push(c.re());
        }
        let a = judge.zeros("qk_1ek_imag_real", imag);
        let b = judge.nonneg::<C>("qk_1ek_imag_real", re);
        items.push(judge.item("qk_1ek_imag_real", a.passed && b.passed, a.residual.max(b.residual)));
    }

    items.push(qtilde_item(jet, tol));

    {
        let mut outside = Vec::new();
        for e in exponents_of_degree(n, 3) {
            if e[0] <= 1 {
                outside.push(jet.q3_at(&e));
            }
        }
        let delta = jet.q3_at(&triple(n));
        outside.push(C::from_real(delta.im()));
        let a = judge.zeros("q3_shape", outside);
        let b = judge.nonneg::<C>("q3_shape", vec![-delta.re()]);
        items.push(judge.item("q3_shape", a.passed && b.passed, a.residual.max(b.residual)));
    }
    Ok(items)
}

/// `Q~ = (q^k_{1,e_h})_{h,k >= 1}` is Hermitian and positive semidefinite.
fn qtilde_item<C: Scalar>(jet: &Jet<C>, tol: f64) -> LedgerItem {
    let n = jet.dim();
    let m = n - 1;
    let entry = |h: usize, k: usize| jet.q2_at(k + 1, &pair(n, 0, h + 1));
    let mut herm_sq = C::Real::zero();
    for h in 0..m {
        for k in 0..m {
            herm_sq = herm_sq + (entry(h, k) - entry(k, h).conj()).abs_sqr();
        }
    }
    let herm = C::real_to_f64(&herm_sq).sqrt();
    // floating PSD test on the Hermitian part
    let sym = DMatrix::<Complex64>::from_fn(m, m, |h, k| (entry(h, k).to_c64() + entry(k, h).to_c64().conj()) * 0.5);
    let trace: f64 = (0..m).map(|i| sym[(i, i)].re).sum();
    let min_eig = if m == 0 { 0.0 } else { sym.clone().symmetric_eigen().eigenvalues.min() };
    let floor = -1e-9 * (1.0 + trace.abs());
    let residual = herm.max((-min_eig).max(0.0));
    let passed = if C::EXACT {
        herm_sq == C::Real::zero() && exact_psd(&(0..m).map(|h| (0..m).map(|k| entry(h, k)).collect()).collect::<Vec<Vec<C>>>())
    } else {
        herm <= tol && min_eig >= floor
    };
    LedgerItem { id: "qtilde_hermitian_psd".into(), passed, residual }
}

/// A Hermitian matrix is PSD iff all its principal minors are `>= 0`.
fn exact_psd<C: Scalar>(a: &[Vec<C>]) -> bool {
    let m = a.len();
    (1u32..(1u32 << m)).all(|mask| {
        let idx: Vec<usize> = (0..m).filter(|i| mask & (1 << i) != 0).collect();
        let sub: Vec<Vec<C>> = idx.iter().map(|&i| idx.iter().map(|&j| a[i][j].clone()).collect()).collect();
        determinant(&sub).re() >= C::Real::zero()
    })
}

fn determinant<C: Scalar>(a: &[Vec<C>]) -> C {
    match a.len() {
        0 => C::one(),
        1 => a[0][0].clone(),
        m => {
            let mut acc = C::zero();
            for j in 0..m {
                let minor: Vec<Vec<C>> = a[1..].iter().map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, x)| x.clone()).collect()).collect();
                let term = a[0][j].clone() * determinant(&minor);
                acc = if j % 2 == 0 { acc + term } else { acc - term };
            }
            acc
        }
    }
}

/// Group conditions, zero verdict, and the ledger of the jet shifted to
/// dilation 0 by adding `H_beta`.
pub fn analyze_jet<C: Scalar>(jet: &Jet<C>, beta: f64, tol: f64) -> Result<JetVerdict> {
    let mut verdict = check_group_conditions(jet, beta, tol)?;
    verdict.structure_ledger = check_structure_ledger(&jet.shift_by_hbeta(beta), tol)?;
    Ok(verdict)
}

/// Coefficients of `(zeta - 1)^2` and `(zeta - 1)^3` in the slice reduction
/// of a dilation-0 field along `v`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SliceJet {
    pub a_v: Complex64,
    pub b_v: Complex64,
}

pub fn slice_jet(jet: &Jet, v: &SliceParam, tol: f64) -> Result<SliceJet> {
    jet.require_order(3)?;
    let n = jet.dim();
    if v.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: v.dim() });
    }
    let t11 = jet.t[0][0].norm();
    if t11 > tol {
        return Err(Error::NotShifted { t11 });
    }
    if jet.t[0][1..].iter().any(|c| c.norm() > tol) {
        return Err(Error::PreconditionFailed("first row of the linear part must vanish".into()));
    }
    let vv = v.v().as_slice();
    let alpha = v.alpha();
    let mut t_pair = Complex64::new(0.0, 0.0);
    let mut q2_pair = Complex64::new(0.0, 0.0);
    for k in 1..n {
        let tv: Complex64 = (0..n).map(|j| jet.t[k][j] * vv[j]).sum();
        t_pair += tv * vv[k].conj();
        q2_pair += jet.q2_eval(k, vv) * vv[k].conj();
    }
    let q2_first = jet.q2_eval(0, vv);
    let q3_first = jet.q3_eval(vv);
    Ok(SliceJet {
        a_v: q2_first - t_pair,
        b_v: q2_first * (1.0 - alpha * alpha) + q3_first * alpha - q2_pair * alpha,
    })
}

/// A coefficient position of a jet.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum JetSlot {
    Linear { component: usize, variable: usize },
    Quadratic { component: usize, exponent: Exponent },
    Cubic { exponent: Exponent },
}

impl JetSlot {
    pub fn add(&self, jet: &mut Jet, delta: Complex64) {
        match self {
            JetSlot::Linear { component, variable } => jet.t[*component][*variable] += delta,
            JetSlot::Quadratic { component, exponent } => {
                *jet.q2.get_mut(&(*component, exponent.clone())).expect("dense jet") += delta;
            }
            JetSlot::Cubic { exponent } => *jet.q3_first.get_mut(exponent).expect("dense jet") += delta,
        }
    }
}

/// Every slot read by some ledger item, with the items that read it.
pub fn ledger_slots(dim: usize) -> Vec<(JetSlot, BTreeSet<&'static str>)> {
    let n = dim;
    let mut out = Vec::new();
    let set = |ids: &[&'static str]| ids.iter().copied().collect::<BTreeSet<_>>();
    for k in 1..n {
        for j in 1..n {
            let ids = if j == k { set(&["re_skk_bound", "re_diagonal_zero", "s_anti_hermitian"]) } else { set(&["s_anti_hermitian"]) };
            out.push((JetSlot::Linear { component: k, variable: j }, ids));
        }
    }
    for e in exponents_of_degree(n, 2) {
        for comp in 0..n {
            let ids = if comp == 0 {
                if e[0] == 2 {
                    set(&["re_q1_20_nonneg", "re_diagonal_zero", "qk_1ek_imag_real"])
                } else if e[0] == 1 {
                    set(&["q1_1ek_eq_qh_0ekeh"])
                } else if e.contains(&2) {
                    set(&["q1_0J_zero", "re_skk_bound"])
                } else {
                    set(&["q1_0J_zero"])
                }
            } else if e[0] == 2 {
                continue;
            } else if e[0] == 1 {
                if e[comp] == 1 {
                    set(&["qtilde_hermitian_psd", "qk_1ek_imag_real"])
                } else {
                    set(&["qtilde_hermitian_psd"])
                }
            } else if e[comp] > 0 {
                set(&["q1_1ek_eq_qh_0ekeh"])
            } else {
                set(&["qh_0ekel_zero"])
            };
            out.push((JetSlot::Quadratic { component: comp, exponent: e.clone() }, ids));
        }
    }
    for e in exponents_of_degree(n, 3) {
        if e[0] == 2 {
            continue;
        }
        out.push((JetSlot::Cubic { exponent: e }, set(&["q3_shape"])));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MutationOutcome {
    pub base: String,
    pub slot: JetSlot,
    pub expected: BTreeSet<String>,
    pub failing: BTreeSet<String>,
    /// Some item failed and every failing item reads the mutated slot.
    pub detected: bool,
}

/// Perturbs one referenced slot of a randomly chosen base jet by
/// `magnitude * e^{i theta}` per trial and records which ledger items fail.
/// The bases must pass the ledger unperturbed.
pub fn mutation_harness(bases: &[Jet], trials: usize, magnitude: f64, seed: u64, tol: f64) -> Result<Vec<MutationOutcome>> {
    let mut rng = seeded_rng(seed, 0);
    let mut out = Vec::with_capacity(trials);
    for base in bases {
        let clean = check_structure_ledger(base, tol)?;
        if !failing(&clean).is_empty() {
            return Err(Error::PreconditionFailed(format!("base jet {} fails the ledger", base.label())));
        }
    }
    for _ in 0..trials {
        let base = &bases[rng.gen_range(0..bases.len())];
        let slots = ledger_slots(base.dim());
        let (slot, expected) = &slots[rng.gen_range(0..slots.len())];
        let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let mut jet = base.clone();
        slot.add(&mut jet, Complex64::from_polar(magnitude, theta));
        let failing = failing(&check_structure_ledger(&jet, tol)?);
        let expected: BTreeSet<String> = expected.iter().map(|s| s.to_string()).collect();
        let detected = !failing.is_empty() && failing.is_subset(&expected);
        out.push(MutationOutcome { base: base.label().to_string(), slot: slot.clone(), expected, failing, detected });
    }
    Ok(out)
}
