use std::path::PathBuf;
use std::time::Instant;

use ballgen_core::cert::{certify_generator, certify_group, certify_poisson, estimate_dilation};
use ballgen_core::corpus::{builtin_example, builtin_names};
use ballgen_core::flow::{flow, group_inverse_residual, julia_monotonicity, lft_fit_residual, semigroup_residual};
use ballgen_core::jet::jet_at_e1;
use ballgen_core::jet_criteria::analyze_jet;
use ballgen_core::probe::{
    probe_derivative_bounds, probe_hypothesis, probe_limits, probe_open_limits, probe_slice_dilation_equality, Trend,
};
use ballgen_core::slice::{berkson_porta_residual, disc_generator_check, slice_dilation, v_grid, Slice, SliceParam};
use ballgen_core::field_file::{parse_exact_field, parse_field, FieldSpecFile};
use ballgen_core::field::ExactField;
use ballgen_core::{Complex64, CxVec, Error, RationalField};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::acceptance;
use crate::run_report::{FlowSummary, Payload, RunReport, SliceSummary};

#[derive(Debug, Parser)]
#[command(name = "ballgen", version, about = "Checks for infinitesimal generators on the unit ball with a boundary null point at e1")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// JSON field description
    #[arg(short = 'f', long, global = true, value_name = "PATH")]
    pub field: Option<PathBuf>,
    /// Built-in field (see `ballgen examples`)
    #[arg(short = 'e', long, global = true, value_name = "NAME")]
    pub example: Option<String>,
    /// Dilation bound or expected dilation
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    /// Sample count; each command has its own default
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol: f64,
    /// Korányi region amplitude for the boundary probes
    #[arg(long, global = true, default_value_t = 2.0)]
    pub amplitude: f64,
    /// Write the JSON report here instead of standard output
    #[arg(short = 'o', long, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,
    /// Flow horizon
    #[arg(long, global = true, default_value_t = 2.0)]
    pub time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CertMode {
    /// `Re<G,z>/(1-|z|^2) - Re(G_1/(1-z_1)) <= beta/2`
    Generator,
    /// `du.G + beta u <= 0`
    Poisson,
    /// `du.G + beta u = 0` on the ball and on every slice
    Group,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sampled check of the generator inequality at dilation bound --beta (default 0)
    Certify {
        #[arg(long, value_enum, default_value_t = CertMode::Generator)]
        mode: CertMode,
    },
    /// Estimate the dilation at e1 radially and along the slice grid
    Dilation,
    /// Slice the field along complex geodesics through e1 and check each disc field
    Slice {
        /// Use the single slice with this alpha and direction e2 instead of the grid
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Integrate the flow from --start up to --time
    Flow {
        /// Starting point as re,im pairs (default 0.3+0.1i, 0.2, 0.2, ...)
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        start: Option<Vec<f64>>,
        /// Write the trajectory as CSV
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
    },
    /// Third-order jet at e1: group conditions and structure ledger
    Jets {
        /// Compute the jet in exact rational arithmetic
        #[arg(long)]
        exact: bool,
    },
    /// Boundary behaviour probes on Korányi regions and approach curves
    Jwc,
    /// Fit a linear fractional map to the time --time flow
    LftTest,
    /// List built-in fields, or print one as a field description
    Examples,
    /// Run the full acceptance suite
    VerifyPaper,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Certify { .. } => "certify",
            Command::Dilation => "dilation",
            Command::Slice { .. } => "slice",
            Command::Flow { .. } => "flow",
            Command::Jets { .. } => "jets",
            Command::Jwc => "jwc",
            Command::LftTest => "lft-test",
            Command::Examples => "examples",
            Command::VerifyPaper => "verify-paper",
        }
    }
}

/// Why a command produced no report.
#[derive(Debug)]
pub enum Failure {
    /// Bad arguments or an unreadable field; exit status 2.
    Usage(String),
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "{m}"),
        }
    }
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn load_field(common: &CommonArgs) -> Result<RationalField, Failure> {
    match (&common.field, &common.example) {
        (Some(_), Some(_)) => Err(usage("give either --field or --example, not both")),
        (None, None) => Err(usage("a field is required: pass --field PATH or --example NAME")),
        (Some(path), None) => parse_field(path).map_err(usage),
        (None, Some(name)) => builtin_example(name).map_err(usage),
    }
}

fn load_exact_field(common: &CommonArgs) -> Result<ExactField, Failure> {
    match &common.field {
        Some(path) if common.example.is_none() => parse_exact_field(path).map_err(usage),
        _ => load_field(common).map(|f| f.to_exact()),
    }
}

fn default_start(dim: usize) -> CxVec {
    let mut parts = vec![0.3, 0.1];
    for _ in 1..dim {
        parts.extend([0.2, 0.0]);
    }
    CxVec::from_re_im(&parts)
}

/// Runs a parsed command. `Ok` carries the report whether or not its checks
/// passed; numerical breakdowns are recorded in the report as failures.
pub fn execute(cli: &Cli) -> Result<RunReport, Failure> {
    let started = Instant::now();
    let common = &cli.common;
    if !(common.tol > 0.0 && common.tol.is_finite()) {
        return Err(usage("--tol must be a positive number"));
    }
    if common.samples == Some(0) {
        return Err(usage("--samples must be positive"));
    }
    let needs_field = !matches!(cli.command, Command::VerifyPaper | Command::Examples) || common.example.is_some() || common.field.is_some();
    let field = if needs_field { Some(load_field(common)?) } else { None };
    let mut report = RunReport::new(cli.command.name(), field.as_ref().map(|f| f.label().to_string()), common.seed, common.tol);
    let outcome = match (&cli.command, &field) {
        (Command::VerifyPaper, _) => Ok(verify(&mut report)),
        (Command::Examples, f) => {
            report.payloads.push(Payload::Examples { names: builtin_names().into_iter().map(String::from).collect() });
            if let Some(f) = f {
                report.payloads.push(Payload::Field(FieldSpecFile::from_field(f)));
            }
            Ok(true)
        }
        (Command::Jets { exact }, Some(f)) => {
            let exact_field = if *exact { Some(load_exact_field(common)?) } else { None };
            jets(f, exact_field.as_ref(), common, &mut report)
        }
        (Command::Flow { start, csv }, Some(f)) => {
            let z0 = match start {
                None => default_start(f.dim()),
                Some(parts) if parts.len() == 2 * f.dim() => CxVec::from_re_im(parts),
                Some(parts) => return Err(usage(format!("--start needs {} numbers (re,im per coordinate), got {}", 2 * f.dim(), parts.len()))),
            };
            if z0.norm() >= 1.0 {
                return Err(usage("--start must lie in the open unit ball"));
            }
            run_flow(f, &z0, csv.as_ref(), common, &mut report)
        }
        (cmd, Some(f)) => run_on_field(cmd, f, common, &mut report),
        (_, None) => unreachable!("field loaded for every field command"),
    };
    match outcome {
        Ok(passed) => report.passed = passed,
        Err(e) => {
            report.passed = false;
            report.error = Some(e.to_string());
        }
    }
    report.wall_clock_seconds = started.elapsed().as_secs_f64();
    Ok(report)
}

fn run_on_field(cmd: &Command, f: &RationalField, common: &CommonArgs, report: &mut RunReport) -> Result<bool, Error> {
    let beta = common.beta.unwrap_or(0.0);
    match cmd {
        Command::Certify { mode } => {
            let samples = common.samples.unwrap_or(10_000);
            let check = match mode {
                CertMode::Generator => certify_generator,
                CertMode::Poisson => certify_poisson,
                CertMode::Group => certify_group,
            };
            let r = check(f, beta, samples, common.seed, common.tol)?;
            let passed = r.passed();
            report.payloads.push(Payload::Cert(r));
            Ok(passed)
        }
        Command::Dilation => {
            let est = estimate_dilation(f)?;
            let passed = common.beta.is_none_or(|b| est.beta <= b + common.tol.max(1e-6));
            report.payloads.push(Payload::Dilation(est));
            Ok(passed)
        }
        Command::Slice { alpha } => {
            let grid = match alpha {
                Some(a) => {
                    let mut dir = vec![Complex64::new(0.0, 0.0); f.dim() - 1];
                    if let Some(d) = dir.first_mut() {
                        *d = Complex64::new(1.0, 0.0);
                    }
                    vec![SliceParam::from_alpha(*a, &dir)?]
                }
                None => v_grid(f.dim(), common.seed),
            };
            let per_slice = common.samples.unwrap_or(10_000).div_ceil(grid.len()).max(16);
            let mut passed = true;
            for v in grid {
                let disc = Slice { field: f, v: v.clone() };
                let generator = disc_generator_check(&disc, beta, per_slice, common.seed, common.tol)?;
                let berkson_porta = berkson_porta_residual(&disc, per_slice, common.seed, common.tol)?;
                passed &= generator.passed() && berkson_porta.passed();
                let (slice_dilation, dilation_error) = match slice_dilation(f, &v) {
                    Ok(b) => (Some(b), None),
                    Err(e) => (None, Some(e.to_string())),
                };
                report.payloads.push(Payload::Slice(SliceSummary {
                    alpha: v.alpha(),
                    v: v.v().to_pairs(),
                    slice_dilation,
                    dilation_error,
                    generator,
                    berkson_porta,
                }));
            }
            Ok(passed)
        }
        Command::Jwc => {
            let samples = common.samples.unwrap_or(1200);
            let hypothesis = probe_hypothesis(f, common.amplitude, samples, common.seed)?;
            let bounded = hypothesis.iter().all(|r| r.trend == Trend::Bounded);
            report.payloads.extend(hypothesis.into_iter().map(Payload::Probe));
            let derivative = probe_derivative_bounds(f, common.amplitude, samples, common.seed)?;
            report.payloads.extend(derivative.into_iter().map(Payload::Probe));
            let estimate = estimate_dilation(f).ok();
            let limits = probe_limits(f, estimate.as_ref().map(|e| e.beta), common.seed)?;
            let mut passed = limits.iter().all(|r| r.consistent != Some(false));
            report.payloads.extend(limits.into_iter().map(Payload::Probe));
            report.payloads.extend(probe_open_limits(f).into_iter().map(Payload::Probe));
            if estimate.is_some() {
                let slices = probe_slice_dilation_equality(f)?;
                passed &= slices.consistent != Some(false);
                report.payloads.push(Payload::Probe(slices));
            }
            // Without the boundedness hypothesis the probes describe the field
            // but assert nothing.
            Ok(passed || !bounded)
        }
        Command::LftTest => {
            let fit = lft_fit_residual(f, common.time, common.samples.unwrap_or(48), common.seed, 1e-12)?;
            let passed = fit.rms_residual <= common.tol;
            report.payloads.push(Payload::Lft(fit));
            Ok(passed)
        }
        Command::Flow { .. } | Command::Jets { .. } | Command::Examples | Command::VerifyPaper => unreachable!("handled by execute"),
    }
}

fn jets(f: &RationalField, exact: Option<&ExactField>, common: &CommonArgs, report: &mut RunReport) -> Result<bool, Error> {
    let verdict = match exact {
        Some(e) => {
            let jet = jet_at_e1(e, 3)?;
            analyze_jet(&jet, common.beta.unwrap_or_else(|| jet.beta()), common.tol)?
        }
        None => {
            let jet = jet_at_e1(f, 3)?;
            analyze_jet(&jet, common.beta.unwrap_or_else(|| jet.beta()), common.tol)?
        }
    };
    let passed = verdict.is_group();
    report.payloads.push(Payload::Jet(verdict));
    Ok(passed)
}

fn run_flow(f: &RationalField, z0: &CxVec, csv: Option<&PathBuf>, common: &CommonArgs, report: &mut RunReport) -> Result<bool, Error> {
    let t = common.time;
    let traj = flow(f, z0, t, common.tol)?;
    if let Some(path) = csv {
        let file = std::fs::File::create(path).map_err(|e| Error::PreconditionFailed(format!("cannot write {}: {e}", path.display())))?;
        traj.write_csv(std::io::BufWriter::new(file))?;
    }
    let semigroup = if traj.exited { None } else { Some(semigroup_residual(f, z0, t / 2.0, t / 2.0, common.tol)?) };
    let group_inverse = group_inverse_residual(f, z0, t, common.tol)?;
    let mut passed = !traj.exited;
    report.payloads.push(Payload::Flow(FlowSummary {
        start: z0.to_pairs(),
        end_time: traj.end_time(),
        end_point: traj.end_point().to_pairs(),
        steps: traj.times.len().saturating_sub(1),
        exited: traj.exited,
        semigroup_residual: semigroup,
        group_inverse,
    }));
    if let Some(beta) = common.beta {
        let grid: Vec<f64> = (1..=8).map(|k| t * k as f64 / 8.0).collect();
        let julia = julia_monotonicity(f, z0, beta, &grid, common.tol)?;
        passed &= julia.passed();
        report.payloads.push(Payload::Cert(julia));
    }
    Ok(passed)
}

fn verify(report: &mut RunReport) -> bool {
    let outcomes = acceptance::run_all();
    eprintln!("{}", acceptance::table(&outcomes));
    let passed = outcomes.iter().all(|o| o.passed);
    report.payloads.extend(outcomes.into_iter().map(Payload::Criterion));
    passed
}
