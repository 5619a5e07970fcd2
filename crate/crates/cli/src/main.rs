//! `icncap`: sweeps, fits, plots and self-checks for the cache-network
//! capacity laboratory.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use icncap::experiments::{
    emit_plot, fit_report, run_sweep, validate_suite, CsvTable, PlotKind, Settings,
};
use icncap::topology::Topology;
use icncap::Error;

const OK: u8 = 0;
const PARAMETER: u8 = 1;
const IO: u8 = 2;
const CHECK_FAILED: u8 = 3;

#[derive(Parser)]
#[command(name = "icncap", version, about = "Throughput capacity of cache-enabled wireless networks")]
#[command(after_help = "Exit codes: 0 success, 1 parameter error, 2 I/O error, 3 failed self-check (validate).")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate analytics and simulation over a range of n, lambda/mu or rho
    /// and write one CSV row per point per scenario.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Swept quantity: n, ratio or rho [default: n]
        #[arg(long)]
        axis: Option<String>,
        /// Comma-separated, strictly increasing axis values [default: the base value]
        #[arg(long)]
        points: Option<String>,
        /// Synchronized request epochs per point for load columns [default: 20]
        #[arg(long)]
        epochs: Option<usize>,
        /// Worker threads [default: all cores]
        #[arg(long)]
        workers: Option<usize>,
        /// Also render the sweep to this SVG file
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Fit scaling exponents to a sweep CSV.
    Fit {
        /// Sweep CSV to read
        input: PathBuf,
        /// Write the report here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render a sweep CSV as an SVG plot.
    Plot {
        /// Sweep CSV to read
        input: PathBuf,
        /// gamma-vs-n, gamma-vs-ratio or traffic-vs-ratio
        #[arg(long, default_value = "gamma-vs-n")]
        kind: String,
        /// Output SVG path
        #[arg(long, default_value = "plot.svg")]
        out: PathBuf,
    },
    /// Run the self-check suite; exits with 3 if any check fails.
    Validate {
        #[command(flatten)]
        common: Common,
    },
    /// Print node coordinates (and cells) of the configured topology.
    DumpTopology {
        #[command(flatten)]
        common: Common,
    },
}

/// Settings shared by the simulating subcommands. Flags override values read
/// from `--config`.
#[derive(Args)]
struct Common {
    /// Flat key=value file; keys match the long flag names
    #[arg(long)]
    config: Option<PathBuf>,
    /// Scenario(s): grid-pathwise|i, grid-flooding|ii, random-cell|iii, comma-separated, or all [default: grid-pathwise]
    #[arg(long)]
    scenario: Option<String>,
    /// Number of nodes; a perfect square for grid scenarios [default: 10000]
    #[arg(long)]
    n: Option<usize>,
    /// Request rate of a node lacking the content [default: 7]
    #[arg(long)]
    lambda: Option<f64>,
    /// Expiry rate of a cached copy [default: 1]
    #[arg(long)]
    mu: Option<f64>,
    /// Sets lambda = ratio * mu; conflicts with --lambda
    #[arg(long)]
    ratio: Option<f64>,
    /// Monte Carlo trials per point [default: 1000]
    #[arg(long)]
    trials: Option<usize>,
    /// Base random seed [default: 1]
    #[arg(long)]
    seed: Option<u64>,
    /// Output file [default: stdout]
    #[arg(long)]
    out: Option<PathBuf>,
    /// Random-cell placement: idealized or empirical [default: idealized]
    #[arg(long)]
    mode: Option<String>,
}

impl Common {
    fn settings(&self) -> Result<Settings, Error> {
        let mut s = match &self.config {
            Some(path) => Settings::load(path)?,
            None => Settings::default(),
        };
        let mut flags = Settings::default();
        if let Some(v) = &self.scenario {
            flags.set("scenario", v);
        }
        if let Some(v) = self.n {
            flags.set("n", v);
        }
        // An explicit rate on the command line replaces a file's choice
        // between lambda and ratio.
        if self.lambda.is_some() || self.ratio.is_some() {
            s = s.without(&["lambda", "ratio"]);
        }
        if let Some(v) = self.lambda {
            flags.set("lambda", v);
        }
        if let Some(v) = self.ratio {
            flags.set("ratio", v);
        }
        if let Some(v) = self.mu {
            flags.set("mu", v);
        }
        if let Some(v) = self.trials {
            flags.set("trials", v);
        }
        if let Some(v) = self.seed {
            flags.set("seed", v);
        }
        if let Some(v) = &self.out {
            flags.set("out", v.display());
        }
        if let Some(v) = &self.mode {
            flags.set("mode", v);
        }
        Ok(s.overlay(&flags))
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Io { .. } => IO,
        _ => PARAMETER,
    }
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Io {
            path: path.clone(),
            source: e,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| Error::Io {
                    path: "<stdout>".into(),
                    source: e,
                })
        }
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Sweep {
            common,
            axis,
            points,
            epochs,
            workers,
            plot,
        } => {
            let mut s = common.settings()?;
            for (key, value) in [
                ("axis", axis),
                ("points", points),
                ("epochs", epochs.map(|e| e.to_string())),
                ("workers", workers.map(|w| w.to_string())),
                ("plot", plot.map(|p| p.display().to_string())),
            ] {
                if let Some(v) = value {
                    s.set(key, v);
                }
            }
            let mut spec = s.sweep_spec()?;
            spec.workers = s.workers()?;
            let to_stdout = spec.csv.is_none();
            let table = run_sweep(&spec)?;
            if to_stdout {
                emit(None, &table.to_csv()?)?;
            }
        }
        Command::Fit { input, out } => {
            let report = fit_report(&CsvTable::load(&input)?)?;
            emit(out.as_ref(), &report.to_string())?;
        }
        Command::Plot { input, kind, out } => {
            let kind: PlotKind = kind.parse()?;
            emit_plot(&CsvTable::load(&input)?, kind, &out)?;
        }
        Command::Validate { common } => {
            let s = common.settings()?;
            let cfg = s.scenario_config()?;
            cfg.validate()?;
            let checks = validate_suite(&cfg)?;
            let mut text = String::new();
            for c in &checks {
                let verdict = if c.passed { "PASS" } else { "FAIL" };
                text += &format!("{verdict}  {:<44} {}\n", c.name, c.detail);
            }
            emit(s.out().as_ref(), &text)?;
            if checks.iter().any(|c| !c.passed) {
                return Ok(CHECK_FAILED);
            }
        }
        Command::DumpTopology { common } => {
            let s = common.settings()?;
            let cfg = s.scenario_config()?;
            let topology = Topology::for_config(&cfg)?;
            let mut buf = Vec::new();
            topology.dump(&mut buf).expect("writing to memory");
            emit(s.out().as_ref(), &String::from_utf8_lossy(&buf))?;
        }
    }
    Ok(OK)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { PARAMETER } else { OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("icncap: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
