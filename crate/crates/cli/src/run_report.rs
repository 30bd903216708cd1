use ballgen_core::cert::DilationEstimate;
use ballgen_core::flow::{GroupInverse, LftFit};
use ballgen_core::jet_criteria::JetVerdict;
use ballgen_core::probe::ProbeReport;
use ballgen_core::report::CertReport;
use ballgen_core::field_file::FieldSpecFile;
use serde::Serialize;

use crate::acceptance::CriterionOutcome;

#[derive(Clone, Debug, Serialize)]
pub struct SliceSummary {
    pub alpha: f64,
    pub v: Vec<[f64; 2]>,
    pub slice_dilation: Option<f64>,
    pub dilation_error: Option<String>,
    pub generator: CertReport,
    pub berkson_porta: CertReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct FlowSummary {
    pub start: Vec<[f64; 2]>,
    pub end_time: f64,
    pub end_point: Vec<[f64; 2]>,
    pub steps: usize,
    pub exited: bool,
    /// Distance between `phi_{t/2}(phi_{t/2}(z))` and `phi_t(z)`.
    pub semigroup_residual: Option<f64>,
    pub group_inverse: GroupInverse,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Payload {
    Cert(CertReport),
    Probe(ProbeReport),
    Jet(JetVerdict),
    Dilation(DilationEstimate),
    Slice(SliceSummary),
    Flow(FlowSummary),
    Lft(LftFit),
    Criterion(CriterionOutcome),
    Examples { names: Vec<String> },
    Field(FieldSpecFile),
}

/// Everything a command produced. Apart from `wall_clock_seconds`, the
/// report is a function of the arguments alone.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub tool_version: String,
    pub command: String,
    pub field_label: Option<String>,
    pub seed: u64,
    pub tolerance: f64,
    pub passed: bool,
    pub error: Option<String>,
    pub payloads: Vec<Payload>,
    pub wall_clock_seconds: f64,
}

impl RunReport {
    pub fn new(command: &str, field_label: Option<String>, seed: u64, tolerance: f64) -> Self {
        RunReport {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            field_label,
            seed,
            tolerance,
            passed: true,
            error: None,
            payloads: Vec::new(),
            wall_clock_seconds: 0.0,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }

    /// The serialized report with the wall-clock field zeroed, for
    /// reproducibility comparisons.
    pub fn payload_json(&self) -> String {
        RunReport { wall_clock_seconds: 0.0, ..self.clone() }.to_json()
    }
}
