//! Command line front end: simulation, verification, Cauchy matching,
//! benchmarking and trajectory export.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rodsim::analytic::{cauchy_round_trip, seeded_family, CauchySpec};
use rodsim::reduction::{verification_report, VerificationGrid};
use rodsim::scenario::{benchmark_stability, simulate, OutputFormat, ScenarioConfig, Trajectory};
use rodsim::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NUMERICAL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "rodsim", version, about = "Planar Kirchhoff rod simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a cilium, or a carpet when the config holds several rods.
    Simulate {
        config: PathBuf,
        /// Trajectory file; overrides the config's output path.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Overrides the config's output format.
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Check a random solution family against the kinematic system and the
    /// reduction chain, printing a JSON report.
    VerifySolution {
        /// Nodes per axis.
        #[arg(long, default_value_t = 33)]
        grid: usize,
        /// Time spacing.
        #[arg(long, default_value_t = 1.0 / 32.0)]
        dt: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Start time of the sampled window.
        #[arg(long, default_value_t = 0.0)]
        t0: f64,
    },
    /// Build the family matching boundary data from a JSON spec and report
    /// how well it reproduces the data.
    MatchCauchy { spec: PathBuf },
    /// Find both stability thresholds and time both schemes.
    Benchmark { config: PathBuf },
    /// Convert a trajectory file.
    Export {
        trajectory: PathBuf,
        #[arg(long, value_enum)]
        format: Format,
        /// Destination; standard output when absent.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

/// Failure carrying its exit status.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_numerical() { EXIT_NUMERICAL } else { EXIT_INPUT };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn read_failure(path: &Path, e: Error) -> Failure {
    Failure {
        code: if e.is_numerical() { EXIT_NUMERICAL } else { EXIT_INPUT },
        message: format!("{}: {e}", path.display()),
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    writeln!(out, "{text}").map_err(|e| Failure {
        code: EXIT_INPUT,
        message: format!("cannot write output: {e}"),
    })
}

fn write_trajectory(
    t: &Trajectory,
    path: Option<&Path>,
    format: OutputFormat,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    match path {
        Some(p) => t.write(p, format).map_err(|e| read_failure(p, e)),
        None => emit(out, t.render(format)?.trim_end()),
    }
}

fn simulate_cmd(
    config: &Path,
    output: Option<PathBuf>,
    format: Option<Format>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), Failure> {
    let cfg = ScenarioConfig::load(config).map_err(|e| read_failure(config, e))?;
    let path = output.or_else(|| cfg.output.path.as_ref().map(PathBuf::from));
    let format = format.map_or(cfg.output.format, OutputFormat::from);
    let outcome = simulate(&cfg)?;
    write_trajectory(&outcome.trajectory, path.as_deref(), format, out)?;
    if let Some(f) = outcome.failure {
        let _ = writeln!(
            err,
            "{} frames written before the failure",
            outcome.trajectory.frames.len()
        );
        return Err(Failure {
            code: if f.error.is_numerical() { EXIT_NUMERICAL } else { EXIT_INPUT },
            message: f.to_string(),
        });
    }
    Ok(())
}

fn verify_cmd(grid: usize, dt: f64, seed: u64, t0: f64, out: &mut dyn Write) -> Result<(), Failure> {
    let grid = VerificationGrid::unit(grid, grid, dt)?;
    let report = verification_report(&seeded_family(seed), grid, t0)?;
    emit(out, &serde_json::to_string_pretty(&report).map_err(Error::from)?)?;
    if report.passed {
        Ok(())
    } else {
        Err(Failure {
            code: EXIT_NUMERICAL,
            message: "residuals exceed their thresholds".into(),
        })
    }
}

fn match_cmd(spec: &Path, out: &mut dyn Write) -> Result<(), Failure> {
    let text = std::fs::read_to_string(spec).map_err(|e| read_failure(spec, e.into()))?;
    let parsed: CauchySpec = serde_json::from_str(&text).map_err(|e| read_failure(spec, e.into()))?;
    emit(out, &serde_json::to_string_pretty(&cauchy_round_trip(&parsed)?).map_err(Error::from)?)
}

fn benchmark_cmd(config: &Path, out: &mut dyn Write) -> Result<(), Failure> {
    let cfg = ScenarioConfig::load(config).map_err(|e| read_failure(config, e))?;
    emit(out, &serde_json::to_string_pretty(&benchmark_stability(&cfg)?).map_err(Error::from)?)
}

fn export_cmd(trajectory: &Path, format: Format, output: Option<PathBuf>, out: &mut dyn Write) -> Result<(), Failure> {
    let t = Trajectory::read(trajectory).map_err(|e| read_failure(trajectory, e))?;
    write_trajectory(&t, output.as_deref(), format.into(), out)
}

/// Parses `args` (program name first) and runs the command, returning the
/// exit status: 0 on success, 1 on numerical failure, 2 on bad input.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Simulate { config, output, format } => simulate_cmd(&config, output, format, out, err),
        Command::VerifySolution { grid, dt, seed, t0 } => verify_cmd(grid, dt, seed, t0, out),
        Command::MatchCauchy { spec } => match_cmd(&spec, out),
        Command::Benchmark { config } => benchmark_cmd(&config, out),
        Command::Export {
            trajectory,
            format,
            output,
        } => export_cmd(&trajectory, format, output, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}
