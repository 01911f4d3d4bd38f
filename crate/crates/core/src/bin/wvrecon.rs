//! `wvrecon`: exact and Monte Carlo weak-value reconstruction runs.
//!
//! Exit codes: 0 success, 1 I/O, 2 configuration, 3 numerical support,
//! 4 reconstruction failed.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use wvrecon::grid::{make_grid, GridSpec};
use wvrecon::io::write_wigner_csv;
use wvrecon::pipeline::{run_exact, run_monte_carlo, sweep, RunConfig, RunOutcome, SweepAxis};
use wvrecon::state::{realize_state, StateDescriptor};
use wvrecon::wigner::wigner;
use wvrecon::Error;

#[derive(Parser)]
#[command(
    name = "wvrecon",
    version,
    about = "Weak-value reconstruction of single-mode states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reconstruct from exact postselection statistics.
    Exact(RunArgs),
    /// Reconstruct from simulated homodyne records.
    Mc {
        #[command(flatten)]
        run: RunArgs,
        /// Also write every (P, x) record.
        #[arg(long)]
        emit_records: bool,
    },
    /// Repeat a run over a list of parameter values.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum)]
        axis: Axis,
        /// Comma-separated; accepts `pi/4`-style fractions.
        #[arg(long, value_delimiter = ',', value_parser = parse_value)]
        values: Vec<f64>,
    },
    /// Export the Wigner function of a state descriptor.
    Wigner {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = -8.0, allow_hyphen_values = true)]
        p_min: f64,
        #[arg(long, default_value_t = 8.0)]
        p_max: f64,
        #[arg(long, default_value_t = 256)]
        p_points: usize,
        #[arg(long, default_value_t = 4)]
        x_stride: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Axis {
    Theta,
    #[value(alias = "n_runs")]
    NRuns,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, value_parser = parse_value)]
    theta: Option<f64>,
    #[arg(long)]
    n_runs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    bin_width: Option<f64>,
    #[arg(long, value_parser = parse_value, allow_hyphen_values = true)]
    rotation_angle: Option<f64>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

impl RunArgs {
    fn load(&self) -> Result<RunConfig, Error> {
        let mut c = RunConfig::from_file(&self.config)?;
        if let Some(v) = self.theta {
            c.theta = v;
        }
        if let Some(v) = self.n_runs {
            c.n_runs = v;
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if let Some(v) = self.bin_width {
            c.bin_width = v;
        }
        if let Some(v) = self.rotation_angle {
            c.rotation_angle = v;
        }
        if let Some(v) = &self.output_dir {
            c.output_dir = v.clone();
        }
        Ok(c)
    }
}

/// Parses a float, `pi`, or `pi/<n>`, optionally prefixed by a multiplier (`3pi/4`).
fn parse_value(s: &str) -> Result<f64, String> {
    let s = s.trim();
    if let Ok(v) = s.parse::<f64>() {
        return Ok(v);
    }
    let lower = s.to_ascii_lowercase();
    let (num, den) = match lower.split_once('/') {
        Some((a, b)) => (a, b.parse::<f64>().map_err(|e| format!("{s}: {e}"))?),
        None => (lower.as_str(), 1.0),
    };
    let factor = match num.strip_suffix("pi") {
        Some("") | Some("+") => 1.0,
        Some("-") => -1.0,
        Some(m) => m.parse::<f64>().map_err(|e| format!("{s}: {e}"))?,
        None => return Err(format!("cannot parse `{s}`")),
    };
    Ok(factor * std::f64::consts::PI / den)
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_)
        | Error::InvalidGrid(_)
        | Error::InvalidDescriptor(_)
        | Error::InvalidParameter(_)
        | Error::Json(_) => 2,
        Error::SupportOverflow { .. } => 3,
        Error::NothingToReconstruct | Error::EmptyBin { .. } => 4,
        Error::Io(_) | Error::Mismatch => 1,
    }
}

fn report(outcome: &RunOutcome) -> u8 {
    let s = &outcome.summary;
    println!(
        "delta = {:.6}  segments = {}  failed = {}  gaps = {}  -> {}",
        s.delta,
        s.segments,
        s.failed,
        outcome.manifest.gap_count,
        outcome.manifest.config.output_dir.display()
    );
    if s.failed {
        4
    } else {
        0
    }
}

fn execute(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Exact(args) => Ok(report(&run_exact(&args.load()?)?)),
        Command::Mc { run, emit_records } => {
            let mut config = run.load()?;
            config.emit_records |= emit_records;
            Ok(report(&run_monte_carlo(&config)?))
        }
        Command::Sweep { run, axis, values } => {
            let config = run.load()?;
            let axis = match axis {
                Axis::Theta => SweepAxis::Theta,
                Axis::NRuns => SweepAxis::NRuns,
            };
            let rows = sweep(&config, axis, &values)?;
            for r in &rows {
                match (&r.delta, &r.error) {
                    (Some(d), _) => println!(
                        "{} = {:<12} delta = {d:.6}  segments = {}  failed = {}",
                        axis.label(),
                        r.axis_value,
                        r.segments.unwrap_or(0),
                        r.failed
                    ),
                    (None, Some(e)) => {
                        println!("{} = {:<12} error: {e}", axis.label(), r.axis_value)
                    }
                    _ => {}
                }
            }
            Ok(0)
        }
        Command::Wigner {
            state,
            out,
            p_min,
            p_max,
            p_points,
            x_stride,
        } => {
            let text = std::fs::read_to_string(&state)?;
            let descriptor: StateDescriptor = serde_json::from_str(&text)
                .map_err(|e| Error::Config(format!("{}: {e}", state.display())))?;
            let grid = GridSpec::default();
            let p_axis = make_grid(p_min, p_max, p_points)?;
            let psi = realize_state(&descriptor, &grid)?.psi;
            let w = wigner(&psi, &p_axis)?.decimate_x(x_stride)?;
            write_wigner_csv(&out, &w)?;
            println!(
                "integral = {:.6}  min = {:.6}  -> {}",
                w.integral(),
                w.min(),
                out.display()
            );
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    if let Some(n) = std::env::var("WVRECON_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
