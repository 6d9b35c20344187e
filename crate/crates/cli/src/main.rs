mod commands;
mod config;
mod failure;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use cavity_ghz::hilbert::Sign;
use cavity_ghz::protocol::{EprVariant, GhzMode};
use clap::{Args, Parser, Subcommand};

use commands::Format;
use config::{load_config, Overrides, RunConfig, DEFAULT_CONVERGENCE_DIM, DEFAULT_DIM};
use failure::Failure;

/// Cavity-QED Bell/GHZ preparation and the single-run GHZ test.
#[derive(Parser)]
#[command(name = "cavity-ghz", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Prepare one of the four Bell states.
    PrepareEpr {
        #[command(flatten)]
        common: Common,
        /// phi+, phi-, psi+ or psi-.
        #[arg(long)]
        variant: Option<EprVariant>,
    },
    /// Prepare an atomic or atom-cavity GHZ state.
    PrepareGhz {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        ghz: GhzArgs,
    },
    /// Run the GHZ test over many seeded shots.
    GhzTest {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        ghz: GhzArgs,
    },
    /// Probe excitation probability against interaction time.
    ProbeSweep {
        #[command(flatten)]
        common: Common,
        /// Largest g·t in the sweep (default: twice the optimal time).
        #[arg(long)]
        gt_max: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Distance between the exact and large-detuning propagators.
    DispersiveConvergence {
        #[command(flatten)]
        common: Common,
        /// Detuning ratios Δ/g, comma separated, each at least 10.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        delta_over_g: Option<Vec<f64>>,
        /// Fixed dispersive phase g²t/Δ.
        #[arg(long)]
        dispersive_phi: Option<f64>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
}

#[derive(Args)]
struct Common {
    /// Real coherent amplitude of the cavity (and of each injection).
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    /// Fock-space truncation.
    #[arg(long)]
    dim: Option<usize>,
    /// Number of independent GHZ-test runs.
    #[arg(long)]
    shots: Option<u64>,
    /// Base seed; each shot draws from its own stream of this seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Resonant probe g·t (default: optimal for the injected field).
    #[arg(long, allow_negative_numbers = true)]
    gt: Option<f64>,
    /// Conditional phase of each cascade atom.
    #[arg(long, allow_negative_numbers = true)]
    phi: Option<f64>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
    /// `key = value` configuration file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct GhzArgs {
    /// + or -.
    #[arg(long, allow_hyphen_values = true)]
    sign: Option<Sign>,
    /// atomic or hybrid.
    #[arg(long)]
    mode: Option<GhzMode>,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            alpha: self.alpha,
            dim: self.dim,
            shots: self.shots,
            seed: self.seed,
            gt: self.gt,
            phi: self.phi,
            output: self.output.clone(),
            ..Overrides::default()
        }
    }

    fn resolve(&self, extra: Overrides, default_dim: usize) -> Result<RunConfig, Failure> {
        let flags = extra.or(self.overrides());
        let file = match &self.config {
            Some(path) => load_config(path)?,
            None => Overrides::default(),
        };
        RunConfig::resolve(flags.or(file), default_dim)
    }
}

fn ghz_overrides(g: &GhzArgs) -> Overrides {
    Overrides {
        sign: g.sign,
        mode: g.mode,
        ..Overrides::default()
    }
}

fn run(cli: Cli) -> Result<(String, Option<PathBuf>), Failure> {
    let (cfg, text) = match cli.command {
        Command::PrepareEpr { common, variant } => {
            let cfg = common.resolve(Overrides { variant, ..Overrides::default() }, DEFAULT_DIM)?;
            let text = commands::prepare_epr_report(&cfg)?;
            (cfg, text)
        }
        Command::PrepareGhz { common, ghz } => {
            let cfg = common.resolve(ghz_overrides(&ghz), DEFAULT_DIM)?;
            let text = commands::prepare_ghz_report(&cfg)?;
            (cfg, text)
        }
        Command::GhzTest { common, ghz } => {
            let cfg = common.resolve(ghz_overrides(&ghz), DEFAULT_DIM)?;
            let text = commands::ghz_test_report(&cfg)?;
            (cfg, text)
        }
        Command::ProbeSweep { common, gt_max, points, format } => {
            let cfg = common.resolve(Overrides { gt_max, points, ..Overrides::default() }, DEFAULT_DIM)?;
            let text = commands::probe_sweep_report(&cfg, format)?;
            (cfg, text)
        }
        Command::DispersiveConvergence { common, delta_over_g, dispersive_phi, format } => {
            let extra = Overrides { delta_over_g, dispersive_phi, ..Overrides::default() };
            let cfg = common.resolve(extra, DEFAULT_CONVERGENCE_DIM)?;
            let text = commands::dispersive_convergence_report(&cfg, format)?;
            (cfg, text)
        }
    };
    Ok((text, cfg.output))
}

fn emit(text: &str, output: Option<PathBuf>) -> Result<(), Failure> {
    match output {
        Some(path) => std::fs::write(&path, text).map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Io(e.to_string())),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli).and_then(|(text, output)| emit(&text, output)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.code())
        }
    }
}
