mod output;
mod plan;
mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use cocycle_lab::bounds::BoundReport;
use cocycle_lab::cocycle::ModelParams;
use cocycle_lab::engine::{
    le_estimate, le_profile, spectrum_membership, LeProfile, ProfileConfig, Regime, Sampling, SegmentKind,
};
use cocycle_lab::oracles::Suite;
use cocycle_lab::{golden_mean, LabError, Tolerances};

use output::Table;

#[derive(Parser)]
#[command(name = "cocycle-lab", version, about = "Lyapunov exponents and lower bounds for the generalized Harper cocycle")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "COCYCLE_LAB_WORKERS")]
    workers: Option<usize>,
    /// Override a tolerance knob, e.g. `--tolerance slope=0.05`.
    #[arg(long = "tolerance", value_name = "KEY=VAL", global = true)]
    tolerance: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct Model {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    a1: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    a2: f64,
    #[arg(long = "E", default_value_t = 0.0, allow_negative_numbers = true)]
    energy: f64,
    /// Rotation number (default: golden mean).
    #[arg(long)]
    alpha: Option<f64>,
}

#[derive(Args, Clone, Copy)]
struct Orbit {
    #[arg(long, default_value_t = 100_000)]
    n: usize,
    #[arg(long, default_value_t = 256)]
    phases: usize,
    #[arg(long = "phase-offset", default_value_t = 0.0, allow_negative_numbers = true)]
    phase_offset: f64,
}

#[derive(Args, Clone, Copy)]
struct Grid {
    /// Upper end of the ε window (default: 3ε₀ when defined, else 1).
    #[arg(long = "eps-max")]
    eps_max: Option<f64>,
    #[arg(long = "eps-steps", default_value_t = 24)]
    eps_steps: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Phase-averaged Lyapunov exponent at one imaginary shift.
    Le {
        #[command(flatten)]
        model: Model,
        #[command(flatten)]
        orbit: Orbit,
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
    },
    /// The graph ε ↦ L(ε) with slopes and the regime label.
    Profile {
        #[command(flatten)]
        model: Model,
        #[command(flatten)]
        orbit: Orbit,
        #[command(flatten)]
        grid: Grid,
        /// CSV destination (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Closed-form lower bounds, optionally against a measured exponent.
    Bounds {
        #[command(flatten)]
        model: Model,
        #[command(flatten)]
        orbit: Orbit,
        #[arg(long)]
        measure: bool,
    },
    /// Bound checks over a parameter grid read from a config file.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Brute-force oracle suites.
    Verify {
        /// lemma31, ellipse, jensen, quantization or all.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        orbit: Orbit,
    },
    /// Regime and spectrum membership over an energy range.
    SpectrumScan {
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        a1: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        a2: f64,
        /// `min:max:count` or a comma-separated list.
        #[arg(long = "E", allow_hyphen_values = true)]
        energy: String,
        #[arg(long)]
        alpha: Option<f64>,
        #[command(flatten)]
        orbit: Orbit,
        #[command(flatten)]
        grid: Grid,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Error with the exit code it maps to.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<LabError> for Failure {
    fn from(e: LabError) -> Self {
        Failure::usage(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self {
            code: 4,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    if let Some(w) = cli.workers {
        if w == 0 {
            return Err(Failure::usage("--workers must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .map_err(|e| Failure::usage(e.to_string()))?;
    }
    let mut tol = Tolerances::default();
    for kv in &cli.tolerance {
        tol.apply(kv)?;
    }
    match cli.command {
        Command::Le { model, orbit, eps } => cmd_le(model, orbit, eps),
        Command::Profile {
            model,
            orbit,
            grid,
            out,
        } => cmd_profile(model, orbit, grid, out, &tol),
        Command::Bounds { model, orbit, measure } => cmd_bounds(model, orbit, measure, &tol),
        Command::Sweep { config, out } => sweep::cmd_sweep(&config, &out, &cli.tolerance),
        Command::Verify { suite, seed, orbit } => cmd_verify(&suite, seed, orbit, &tol),
        Command::SpectrumScan {
            a1,
            a2,
            energy,
            alpha,
            orbit,
            grid,
            out,
        } => cmd_spectrum_scan(a1, a2, &energy, alpha, orbit, grid, out, &tol),
    }
}

pub(crate) fn check_alpha(alpha: f64) {
    if let Some(q) = (1..=1000u32).find(|&q| {
        let x = alpha * q as f64;
        (x - x.round()).abs() < 1e-12 * q as f64
    }) {
        eprintln!(
            "warning: alpha = {alpha} is rational with denominator {q}; lower bounds assume irrational alpha"
        );
    }
}

fn params(model: Model) -> Result<ModelParams<f64>, Failure> {
    let alpha = model.alpha.unwrap_or_else(golden_mean);
    let p = ModelParams::new(model.a1, model.a2, model.energy, alpha)?;
    check_alpha(alpha);
    Ok(p)
}

fn sampling(orbit: Orbit) -> Result<Sampling<f64>, Failure> {
    if orbit.n == 0 || orbit.phases == 0 {
        return Err(Failure::usage("--n and --phases must be positive"));
    }
    if !orbit.phase_offset.is_finite() {
        return Err(Failure::usage("--phase-offset must be finite"));
    }
    Ok(Sampling::new(orbit.n, orbit.phases).offset(orbit.phase_offset))
}

fn print_json<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct LeOutput {
    a1: f64,
    a2: f64,
    #[serde(rename = "E")]
    energy: f64,
    alpha: f64,
    eps: f64,
    value: f64,
    std_error: f64,
    n: usize,
    #[serde(rename = "K")]
    phases: usize,
}

fn cmd_le(model: Model, orbit: Orbit, eps: f64) -> Result<u8, Failure> {
    let p = params(model)?;
    if !(eps.is_finite() && eps >= 0.0) {
        return Err(Failure::usage("--eps must be finite and nonnegative"));
    }
    let est = le_estimate(&p, eps, &sampling(orbit)?);
    print_json(&LeOutput {
        a1: p.a1,
        a2: p.a2,
        energy: p.energy,
        alpha: p.alpha,
        eps,
        value: est.value,
        std_error: est.std_error,
        n: est.orbit_length,
        phases: est.phase_count,
    });
    Ok(0)
}

fn profile_config(p: &ModelParams<f64>, orbit: Orbit, grid: Grid, tol: &Tolerances) -> Result<ProfileConfig<f64>, Failure> {
    let eps_max = grid
        .eps_max
        .unwrap_or_else(|| ProfileConfig::default_eps_max(p));
    Ok(ProfileConfig::new(eps_max, grid.eps_steps, sampling(orbit)?).tolerances(*tol))
}

fn profile_table(prof: &LeProfile<f64>) -> Table {
    let mut t = Table::new(&["eps", "le", "stdError", "slopeOver2pi", "acceleration"]);
    for (i, node) in prof.le_values.iter().enumerate() {
        let seg = prof.segments.get(i);
        t.row(vec![
            node.eps.to_string(),
            node.value.to_string(),
            node.std_error.to_string(),
            seg.map(|s| s.slope_over_2pi.to_string()).unwrap_or_default(),
            seg.filter(|s| s.kind == SegmentKind::Quantized)
                .and_then(|s| s.acceleration)
                .map(|a| a.to_string())
                .unwrap_or_default(),
        ]);
    }
    t
}

fn cmd_profile(model: Model, orbit: Orbit, grid: Grid, out: Option<PathBuf>, tol: &Tolerances) -> Result<u8, Failure> {
    let p = params(model)?;
    let prof = le_profile(&p, &profile_config(&p, orbit, grid, tol)?)?;
    let table = profile_table(&prof);
    match out {
        Some(path) => output::write_atomic(&path, table.render().as_bytes())?,
        None => print!("{}", table.render()),
    }
    let pattern: Vec<String> = prof.acceleration_pattern().iter().map(|k| k.to_string()).collect();
    eprintln!("accelerations: [{}]", pattern.join(", "));
    for b in prof.breakpoints() {
        eprintln!("breakpoint: eps = {b}");
    }
    if let Some(onset) = prof.asymptote_onset {
        eprintln!("asymptote reached at eps = {onset}");
    }
    let membership = spectrum_membership(&prof);
    eprintln!("regime: {} membership: {}", prof.regime, membership);
    Ok(if prof.regime == Regime::Unresolved { 3 } else { 0 })
}

fn cmd_bounds(model: Model, orbit: Orbit, measure: bool, tol: &Tolerances) -> Result<u8, Failure> {
    let p = params(model)?;
    let measured = if measure {
        Some(le_estimate(&p, 0.0, &sampling(orbit)?))
    } else {
        None
    };
    let report = BoundReport::new(&p, measured.as_ref(), tol);
    print_json(&report);
    Ok(if report.satisfied == Some(false) { 1 } else { 0 })
}

#[derive(Serialize)]
struct SuiteLine<'a> {
    suite: &'a str,
    report: &'a cocycle_lab::oracles::OracleReport,
}

fn cmd_verify(suite: &str, seed: u64, orbit: Orbit, tol: &Tolerances) -> Result<u8, Failure> {
    let suites: Vec<Suite> = if suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![suite.parse()?]
    };
    let sampling = sampling(orbit)?;
    let mut failed = false;
    for s in suites {
        for r in s.run(seed, sampling, tol)? {
            let line = SuiteLine {
                suite: s.name(),
                report: &r,
            };
            println!("{}", serde_json::to_string(&line).expect("serializable"));
            if !r.passed {
                failed = true;
                let input: Vec<String> = r.worst_case_input.iter().map(|(k, v)| format!("{k}={v}")).collect();
                eprintln!(
                    "FAILED {} / {}: margin {} at {}",
                    s.name(),
                    r.name,
                    r.worst_case_margin,
                    input.join(" ")
                );
            }
        }
    }
    Ok(u8::from(failed))
}

#[allow(clippy::too_many_arguments)]
fn cmd_spectrum_scan(
    a1: f64,
    a2: f64,
    energy: &str,
    alpha: Option<f64>,
    orbit: Orbit,
    grid: Grid,
    out: Option<PathBuf>,
    tol: &Tolerances,
) -> Result<u8, Failure> {
    let energies = plan::parse_values(energy).map_err(|m| Failure::usage(format!("--E: {m}")))?;
    let base = params(Model {
        a1,
        a2,
        energy: 0.0,
        alpha,
    })?;
    let mut t = Table::new(&["E", "le0", "regime", "membership"]);
    for e in energies {
        let p = base.with_energy(e);
        let prof = le_profile(&p, &profile_config(&p, orbit, grid, tol)?)?;
        t.row(vec![
            e.to_string(),
            prof.le0().value.to_string(),
            prof.regime.to_string(),
            spectrum_membership(&prof).to_string(),
        ]);
    }
    match out {
        Some(path) => output::write_atomic(&path, t.render().as_bytes())?,
        None => print!("{}", t.render()),
    }
    Ok(0)
}
