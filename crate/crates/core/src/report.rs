//! Verdict records shared by every sampled check.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::cvec::CxVec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Witness {
    Ball(CxVec),
    Disc([f64; 2]),
}

impl Witness {
    pub fn disc(zeta: Complex64) -> Self {
        Witness::Disc([zeta.re, zeta.im])
    }
}

/// Outcome of a sampled inequality or identity check. A pass means no
/// violation above `tolerance` was found among `samples_used` points drawn
/// with `seed`; it is not a proof.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertReport {
    pub check_id: String,
    pub verdict: Verdict,
    pub max_violation: f64,
    pub witness: Option<Witness>,
    pub samples_used: usize,
    pub tolerance: f64,
    pub seed: u64,
    pub extras: BTreeMap<String, f64>,
    pub flags: Vec<String>,
}

impl CertReport {
    /// Builds a report from the largest violation found and where it occurred.
    /// The witness is kept only for failing checks.
    pub fn from_max(
        check_id: impl Into<String>,
        max_violation: f64,
        witness: Option<Witness>,
        samples_used: usize,
        tolerance: f64,
        seed: u64,
    ) -> Self {
        let verdict = if max_violation <= tolerance { Verdict::Pass } else { Verdict::Fail };
        CertReport {
            check_id: check_id.into(),
            verdict,
            max_violation,
            witness: if verdict == Verdict::Fail { witness } else { None },
            samples_used,
            tolerance,
            seed,
            extras: BTreeMap::new(),
            flags: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn with_extra(mut self, key: &str, value: f64) -> Self {
        self.extras.insert(key.to_string(), value);
        self
    }
}

/// Index of the largest value; ties go to the smallest index, so the result
/// does not depend on how the values were computed in parallel.
pub fn argmax(values: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &v) in values.iter().enumerate() {
        if v.is_nan() {
            continue;
        }
        if best.is_none_or(|b| v > values[b]) {
            best = Some(i);
        }
    }
    best
}
