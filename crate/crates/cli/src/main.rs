//! `sirnc` — command-line front end for the compliance-structured epidemic
//! model: simulation, optimal control, equilibrium analysis, built-in
//! scenarios, and parameter sweeps.
//!
//! Exit codes: 0 success; 1 usage or configuration errors (including
//! malformed config files and unknown scenario names); 2 runtime failures
//! (diverging integration, or non-convergence under `--strict`).

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::DfeFilter;

/// Errors surfaced to the user, tagged with their exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad configuration or usage; exits 1.
    Config(String),
    /// Error from the model library; exit code depends on the variant.
    Core(sirnc::Error),
    /// Output problems; exits 2.
    Io(String),
    /// `--strict` was set and the sweep hit its iteration cap; exits 2.
    Unconverged(usize),
}

impl CliError {
    fn config(msg: String) -> Self {
        Self::Config(msg)
    }

    fn io(msg: String) -> Self {
        Self::Io(msg)
    }

    fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) => 1,
            Self::Core(e) => match e {
                sirnc::Error::NonFiniteState { .. } | sirnc::Error::NegativityBreach { .. } => 2,
                _ => 1,
            },
            Self::Io(_) | Self::Unconverged(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Config(msg) => write!(f, "config error {msg}"),
            Self::Core(e) => write!(f, "{e}"),
            Self::Io(msg) => write!(f, "{msg}"),
            Self::Unconverged(iters) => {
                write!(f, "sweep did not converge within {iters} iterations (--strict)")
            }
        }
    }
}

impl From<sirnc::Error> for CliError {
    fn from(e: sirnc::Error) -> Self {
        Self::Core(e)
    }
}

/// Constant control values overriding the config's `control` section.
#[derive(Debug, Default, Args)]
pub struct ControlOverrides {
    /// Constant transmission-reduction control in [0, 1].
    #[arg(long)]
    alpha: Option<f64>,
    /// Constant treatment control in [0, eta_bar].
    #[arg(long)]
    eta: Option<f64>,
    /// Constant noncompliance-suppression control in [0, mu_bar].
    #[arg(long)]
    mu: Option<f64>,
    /// Constant compliance-promotion control in [0, nu_bar].
    #[arg(long)]
    nu: Option<f64>,
}

/// Flags pinning individual controls to zero for the whole solve.
#[derive(Debug, Default, Args)]
pub struct MaskFlags {
    /// Disable the transmission-reduction control alpha.
    #[arg(long)]
    mask_alpha: bool,
    /// Disable the treatment control eta.
    #[arg(long)]
    mask_eta: bool,
    /// Disable the noncompliance-suppression control mu.
    #[arg(long)]
    mask_mu: bool,
    /// Disable the compliance-promotion control nu.
    #[arg(long)]
    mask_nu: bool,
}

impl MaskFlags {
    fn apply_to(&self, mut mask: sirnc::solver::ControlMask) -> sirnc::solver::ControlMask {
        mask.alpha &= !self.mask_alpha;
        mask.eta &= !self.mask_eta;
        mask.mu &= !self.mask_mu;
        mask.nu &= !self.mask_nu;
        mask
    }
}

#[derive(Parser)]
#[command(
    name = "sirnc",
    version,
    about = "Epidemic control with noncompliance spreading as a social contagion",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the model under constant controls and write a trajectory CSV.
    Simulate {
        /// JSON run configuration.
        #[arg(long)]
        config: PathBuf,
        /// Destination CSV file.
        #[arg(long)]
        output: PathBuf,
        #[command(flatten)]
        controls: ControlOverrides,
        /// Write the effective configuration (after overrides) to this path.
        #[arg(long)]
        dump_config: Option<PathBuf>,
    },
    /// Solve the optimal-control problem; write trajectory CSV and summary JSON.
    Optimize {
        /// JSON run configuration.
        #[arg(long)]
        config: PathBuf,
        /// Destination CSV file (state, control, and adjoint columns).
        #[arg(long)]
        output: PathBuf,
        /// Destination JSON summary (costs, reduction, convergence).
        #[arg(long)]
        summary: PathBuf,
        /// Exit with code 2 when the sweep hits its iteration cap.
        #[arg(long)]
        strict: bool,
        #[command(flatten)]
        masks: MaskFlags,
        /// Write the effective configuration to this path.
        #[arg(long)]
        dump_config: Option<PathBuf>,
    },
    /// Report disease-free equilibria, reproductive ratios, and stability.
    Analyze {
        /// JSON run configuration (its `control` section is the frozen control).
        #[arg(long)]
        config: PathBuf,
        /// Restrict the report to one equilibrium kind.
        #[arg(long, default_value = "all")]
        dfe: DfeFilter,
        /// Also write the JSON report to this path.
        #[arg(long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        controls: ControlOverrides,
        /// Write the effective configuration to this path.
        #[arg(long)]
        dump_config: Option<PathBuf>,
    },
    /// Run a built-in scenario (S1, S2, or S3) with optional adjustments.
    Scenario {
        /// Scenario name: S1, S2, or S3.
        id: String,
        /// Override the infection cost weight c1.
        #[arg(long)]
        c1: Option<f64>,
        /// Override the noncompliance cost weight c2.
        #[arg(long)]
        c2: Option<f64>,
        /// Override the noncompliant inflow fraction xi.
        #[arg(long)]
        xi: Option<f64>,
        #[command(flatten)]
        masks: MaskFlags,
        /// Directory for the trajectory CSV and summary JSON.
        #[arg(long)]
        outdir: PathBuf,
        /// Exit with code 2 when the sweep hits its iteration cap.
        #[arg(long)]
        strict: bool,
    },
    /// Rerun a scenario once per value of one knob (c1, c2, or xi).
    Sweep {
        /// Scenario name: S1, S2, or S3.
        id: String,
        /// Knob to vary: c1, c2, or xi.
        knob: String,
        /// Comma-separated knob values, e.g. `0,0.25,0.5,1`.
        values: String,
        #[command(flatten)]
        masks: MaskFlags,
        /// Directory for per-run CSVs and the aggregate JSON.
        #[arg(long)]
        outdir: PathBuf,
        /// Size of the thread pool running the sweep entries.
        #[arg(long)]
        jobs: Option<usize>,
    },
}

impl clap::builder::ValueParserFactory for DfeFilter {
    type Parser = clap::builder::ValueParser;

    fn value_parser() -> Self::Parser {
        clap::builder::ValueParser::new(|s: &str| s.parse::<DfeFilter>())
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate { config, output, controls, dump_config } => {
            commands::cmd_simulate(&config, &controls, &output, dump_config.as_deref())
        }
        Command::Optimize { config, output, summary, strict, masks, dump_config } => {
            commands::cmd_optimize(
                &config,
                &masks,
                &output,
                &summary,
                strict,
                dump_config.as_deref(),
            )
        }
        Command::Analyze { config, dfe, output, controls, dump_config } => {
            commands::cmd_analyze(
                &config,
                &controls,
                dfe,
                output.as_deref(),
                dump_config.as_deref(),
            )
        }
        Command::Scenario { id, c1, c2, xi, masks, outdir, strict } => {
            commands::cmd_scenario(&id, c1, c2, xi, &masks, &outdir, strict)
        }
        Command::Sweep { id, knob, values, masks, outdir, jobs } => {
            commands::cmd_sweep(&id, &knob, &values, &masks, &outdir, jobs)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successes; anything else is a
            // usage error and exits 1.
            let code = if e.exit_code() == 0 { 0 } else { 1 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
