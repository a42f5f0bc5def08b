//! `tasim`: metric sweeps, simulation runs and oracle cross-checks as CSV.

mod commands;
mod rows;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "tasim", version, about = "Shadowing-based transmit antenna selection over Generalized-K links")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand. Anything given here overrides the
/// scenario file; the file wins otherwise.
#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Scenario JSON file.
    #[arg(long)]
    pub config: PathBuf,
    /// SNR sweep in dB as START:STOP:STEP, or a single value.
    #[arg(long = "snr-db", value_name = "START:STOP:STEP", allow_hyphen_values = true)]
    pub snr_db: Option<String>,
    /// Comma-separated methods: closed, asymptotic, oracle, mc.
    #[arg(long = "method", alias = "methods", value_delimiter = ',', default_value = "closed")]
    pub method: Vec<String>,
    /// bpsk, bfsk, pam:M, psk:M or qam:M.
    #[arg(long)]
    pub modulation: Option<String>,
    /// Outage threshold in dB relative to unit power.
    #[arg(long = "gamma-th-db", default_value_t = 0.0, allow_hyphen_values = true)]
    pub gamma_th_db: f64,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Feedback bit-error probability.
    #[arg(long)]
    pub pe: Option<f64>,
    /// Shadowing power correlation.
    #[arg(long)]
    pub rho: Option<f64>,
    /// ssi or random.
    #[arg(long)]
    pub policy: Option<String>,
    /// Monte Carlo chunk count; results depend on it, thread count does not.
    #[arg(long)]
    pub partitions: Option<usize>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Outage probability P(γ < γ_th).
    Outage(Common),
    /// Average symbol error probability.
    Sep(Common),
    /// Moments of the received SNR and the amount of fading.
    Moments {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_value = "1,2")]
        orders: Vec<u32>,
    },
    /// Moment generating function E[e^{−sγ}].
    Mgf {
        #[command(flatten)]
        common: Common,
        #[arg(long = "s", value_delimiter = ',', default_value = "0,0.1,1,10")]
        s: Vec<f64>,
    },
    /// Probability that each antenna is selected.
    Selprob(Common),
    /// Monte Carlo outage and SEP.
    Simulate(Common),
    /// Cross-check every closed form against its quadrature oracle.
    Validate {
        #[command(flatten)]
        common: Common,
        /// Negative control: flip the sign of one expansion coefficient.
        #[arg(long = "corrupt-kappa-sign", hide = true)]
        corrupt_kappa_sign: Option<usize>,
    },
}

/// Failure classes and their exit codes.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
    Validation(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Validation(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Numerical(m) | CliError::Validation(m) => m,
        }
    }
}

impl From<tasim_core::Error> for CliError {
    fn from(e: tasim_core::Error) -> Self {
        use tasim_core::Error as E;
        match e {
            E::NumericalFailure { .. } | E::Pole { .. } => CliError::Numerical(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

fn init_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("TASIM_THREADS") {
        let n: usize = v.parse().map_err(|_| CliError::Config(format!("TASIM_THREADS={v:?} is not a count")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = init_threads().and_then(|_| match cli.command {
        Command::Outage(c) => commands::outage(&c),
        Command::Sep(c) => commands::sep(&c),
        Command::Moments { common, orders } => commands::moments(&common, &orders),
        Command::Mgf { common, s } => commands::mgf(&common, &s),
        Command::Selprob(c) => commands::selprob(&c),
        Command::Simulate(c) => commands::simulate(&c),
        Command::Validate { common, corrupt_kappa_sign } => commands::validate(&common, corrupt_kappa_sign),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tasim: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
