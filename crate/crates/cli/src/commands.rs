use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use platoon_core::analysis::{
    properness_root_check, stability_region_boundary, sweep_grid, Certificate, SweepPoint, VerdictMethod,
};
use platoon_core::dynamics::{delay_steps, discretize};
use platoon_core::simulator;
use platoon_core::spacing::{is_proper, is_string_stable, solvability_check};
use platoon_core::{Execution, InputHistory, Predictor, SpacingPolicy, StabilityVerdict, VehicleParams, VehicleState};
use thiserror::Error;

use crate::csv;
use crate::scenario::Scenario;

/// Largest prediction discrepancy accepted by `predict-demo`.
pub const PREDICTION_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad arguments or input files.
    #[error("{0}")]
    Usage(String),
    /// Failure while running a valid request.
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

/// Result of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Affirmative,
    Negative,
}

impl Outcome {
    pub fn exit_code(self) -> u8 {
        match self {
            Outcome::Affirmative => 0,
            Outcome::Negative => 1,
        }
    }

    fn from_bool(ok: bool) -> Self {
        if ok {
            Outcome::Affirmative
        } else {
            Outcome::Negative
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "platoon",
    version,
    about = "Simulate and analyse delayed spacing policies for vehicle platoons"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a scenario file and write the trajectories as CSV.
    Simulate {
        scenario: PathBuf,
        /// Output file; standard output if omitted.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Report properness, string stability and solvability of a policy.
    Analyze(PolicyArgs),
    /// Write the extended-policy properness boundary as CSV.
    Region {
        /// Delay in s; repeat for a family of curves.
        #[arg(long, required = true)]
        phi: Vec<f64>,
        #[arg(long, default_value_t = 200)]
        points: usize,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Write |T(i omega)| on a logarithmic grid as CSV.
    Sweep {
        #[command(flatten)]
        policy: PolicyArgs,
        #[arg(long, default_value_t = 1e-3)]
        omega_min: f64,
        #[arg(long, default_value_t = 1e2)]
        omega_max: f64,
        #[arg(long, default_value_t = 400)]
        points: usize,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Compare the delay-horizon prediction with stepping the model.
    PredictDemo {
        /// Whitespace-separated inputs, oldest first, one per delay sample.
        inputs: PathBuf,
        #[arg(long, default_value_t = 0.067)]
        tau: f64,
        #[arg(long)]
        phi: f64,
        #[arg(long, default_value_t = simulator::DEFAULT_TS)]
        ts: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Dc,
    Dch,
    Ext,
}

#[derive(Debug, Clone, Args)]
pub struct PolicyArgs {
    #[arg(value_enum)]
    pub kind: Kind,
    /// Velocity headway h_v in s.
    #[arg(long)]
    pub hv: Option<f64>,
    /// Acceleration headway h_a in s^2.
    #[arg(long)]
    pub ha: Option<f64>,
    /// Engine lag in s.
    #[arg(long, default_value_t = 0.067)]
    pub tau: f64,
    /// Actuation delay in s.
    #[arg(long)]
    pub phi: f64,
}

impl PolicyArgs {
    pub fn build(&self) -> Result<(SpacingPolicy, VehicleParams), CliError> {
        let usage = |e: platoon_core::Error| CliError::Usage(e.to_string());
        let need = |v: Option<f64>, flag: &str| {
            v.ok_or_else(|| CliError::Usage(format!("{flag} is required for this policy")))
        };
        let policy = match self.kind {
            Kind::Dc => SpacingPolicy::delayed_constant(),
            Kind::Dch => SpacingPolicy::delayed_constant_headway(need(self.hv, "--hv")?).map_err(usage)?,
            Kind::Ext => {
                SpacingPolicy::delayed_extended(need(self.hv, "--hv")?, need(self.ha, "--ha")?).map_err(usage)?
            }
        };
        let params = VehicleParams::new(self.tau, self.phi).map_err(usage)?;
        Ok((policy, params))
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    match path {
        Some(p) => {
            let f = File::create(p).map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", p.display())))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
    }
}

fn io_err(e: io::Error) -> CliError {
    CliError::Runtime(format!("write failed: {e}"))
}

pub fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Simulate { scenario, out } => simulate(&scenario, out.as_deref()),
        Command::Analyze(args) => analyze(&args, &mut io::stdout().lock()),
        Command::Region { phi, points, out } => region(&phi, points, out.as_deref()),
        Command::Sweep {
            policy,
            omega_min,
            omega_max,
            points,
            out,
        } => sweep(&policy, omega_min, omega_max, points, out.as_deref()),
        Command::PredictDemo { inputs, tau, phi, ts } => predict_demo(&inputs, tau, phi, ts, &mut io::stdout().lock()),
    }
}

pub fn simulate(scenario: &Path, out: Option<&Path>) -> Result<Outcome, CliError> {
    let s = Scenario::from_path(scenario).map_err(|e| CliError::Usage(format!("{}: {e}", scenario.display())))?;
    let log = simulator::run(&s.config, &s.leader).map_err(|e| CliError::Runtime(format!("simulation failed {e}")))?;
    let mut w = output(out)?;
    csv::write_trajectory(&mut w, &log).map_err(io_err)?;
    w.flush().map_err(io_err)?;
    Ok(Outcome::Affirmative)
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn describe(cert: &Certificate) -> String {
    match cert {
        Certificate::RightmostRoot(z) => format!("rightmost root {:.6e} {:+.6e}i", z.re, z.im),
        Certificate::PeakMagnitude { omega, magnitude } => {
            format!("peak |T| = {magnitude:.9} at omega = {omega:.6e} rad/s")
        }
        Certificate::InequalityMargins { margins, omega } => {
            let mut parts: Vec<String> = margins
                .iter()
                .map(|m| format!("{} = {:.6e}", m.name, m.value))
                .collect();
            if let Some(w) = omega {
                parts.push(format!("witness omega = {w:.9}"));
            }
            if parts.is_empty() {
                "holds for all parameters".into()
            } else {
                parts.join(", ")
            }
        }
    }
}

fn verdict_line(v: &StabilityVerdict) -> String {
    let method = match v.method {
        VerdictMethod::ClosedForm => "closed form",
        VerdictMethod::Sweep => "sweep",
        VerdictMethod::RootSearch => "root search",
    };
    format!("{} ({method}; {})", yes_no(v.stable), describe(&v.certificate))
}

pub fn analyze<W: Write>(args: &PolicyArgs, w: &mut W) -> Result<Outcome, CliError> {
    let (policy, params) = args.build()?;
    let solv = solvability_check(&policy.rows());
    let proper = is_proper(&policy, &params);
    let stable = is_string_stable(&policy, &params);
    let mut report = vec![
        format!(
            "policy: {} (h_v = {} s, h_a = {} s^2)",
            policy.kind.name(),
            policy.h_v,
            policy.h_a
        ),
        format!("vehicle: tau = {} s, phi = {} s", params.tau, params.phi),
        format!("relative degrees: rho = {}, rho_bar = {}", solv.rho, solv.rho_bar),
        format!("solvable: {} ({})", yes_no(solv.solvable), solv.reason),
        format!("proper: {}", verdict_line(&proper)),
    ];
    report.push(match properness_root_check(&policy, &params) {
        Ok(v) => format!("proper (root check): {}", verdict_line(&v)),
        Err(e) => format!("proper (root check): not applicable ({e})"),
    });
    report.push(format!("string-stable: {}", verdict_line(&stable)));
    for line in report {
        writeln!(w, "{line}").map_err(io_err)?;
    }
    Ok(Outcome::from_bool(proper.stable && stable.stable))
}

pub fn region(phis: &[f64], points: usize, out: Option<&Path>) -> Result<Outcome, CliError> {
    let mut curves = Vec::with_capacity(phis.len());
    for &phi in phis {
        curves.push((
            phi,
            stability_region_boundary(phi, points).map_err(|e| CliError::Usage(e.to_string()))?,
        ));
    }
    let mut w = output(out)?;
    if let [(_, curve)] = curves.as_slice() {
        csv::write_table(
            &mut w,
            &["hv_over_ha", "one_over_ha"],
            curve.iter().map(|&(x, y)| vec![x, y]),
        )
    } else {
        let rows = curves
            .iter()
            .flat_map(|(phi, c)| c.iter().map(move |&(x, y)| vec![*phi, x, y]));
        csv::write_table(&mut w, &["phi", "hv_over_ha", "one_over_ha"], rows)
    }
    .map_err(io_err)?;
    w.flush().map_err(io_err)?;
    Ok(Outcome::Affirmative)
}

pub fn sweep(
    args: &PolicyArgs,
    omega_min: f64,
    omega_max: f64,
    points: usize,
    out: Option<&Path>,
) -> Result<Outcome, CliError> {
    let (policy, params) = args.build()?;
    if !(omega_min > 0.0) || !(omega_max > omega_min) || !omega_max.is_finite() {
        return Err(CliError::Usage(format!(
            "need 0 < omega_min < omega_max, got {omega_min}, {omega_max}"
        )));
    }
    let grid = sweep_grid(&policy, &params, omega_min, omega_max, points, Execution::default());
    let peak = grid.iter().copied().fold(
        SweepPoint {
            omega: omega_min,
            magnitude: f64::NEG_INFINITY,
        },
        |best, p| {
            if p.magnitude > best.magnitude {
                p
            } else {
                best
            }
        },
    );
    let mut w = output(out)?;
    csv::write_table(
        &mut w,
        &["omega", "magnitude"],
        grid.iter().map(|p| vec![p.omega, p.magnitude]),
    )
    .map_err(io_err)?;
    w.flush().map_err(io_err)?;
    drop(w);
    let summary = format!(
        "peak_omega,peak_magnitude\n{},{}",
        csv::format_value(peak.omega),
        csv::format_value(peak.magnitude)
    );
    // keep the CSV stream clean when it goes to standard output
    if out.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(Outcome::Affirmative)
}

pub fn predict_demo<W: Write>(inputs: &Path, tau: f64, phi: f64, ts: f64, w: &mut W) -> Result<Outcome, CliError> {
    let usage = |e: platoon_core::Error| CliError::Usage(e.to_string());
    let params = VehicleParams::new(tau, phi).map_err(usage)?;
    let d = delay_steps(phi, ts).map_err(usage)?;
    let text = std::fs::read_to_string(inputs)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", inputs.display())))?;
    let mut u = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        for field in line.split('#').next().unwrap_or("").split_whitespace() {
            let x: f64 = field
                .parse()
                .map_err(|_| CliError::Usage(format!("{}:{}: not a number: `{field}`", inputs.display(), idx + 1)))?;
            u.push(x);
        }
    }
    if u.len() != d {
        return Err(CliError::Usage(format!(
            "phi / Ts = {d} samples, but {} lists {} inputs",
            inputs.display(),
            u.len()
        )));
    }
    let model = discretize(&params, ts).map_err(usage)?;
    let x0 = VehicleState::default();
    let history = InputHistory::from_recent(u.iter().rev().copied().collect(), ts);
    let predicted = Predictor::new(model.clone())
        .predict(&x0, &history)
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    let simulated = u.iter().fold(x0, |x, &uk| model.step(&x, uk));
    let gap = predicted.max_abs_diff(&simulated);
    let fmt = |s: &VehicleState| format!("q = {:.16e}, v = {:.16e}, a = {:.16e}", s.q, s.v, s.a);
    writeln!(w, "delay: {d} samples").map_err(io_err)?;
    writeln!(w, "predicted: {}", fmt(&predicted)).map_err(io_err)?;
    writeln!(w, "simulated: {}", fmt(&simulated)).map_err(io_err)?;
    writeln!(w, "max discrepancy: {gap:.3e}").map_err(io_err)?;
    Ok(Outcome::from_bool(gap <= PREDICTION_TOLERANCE))
}
