use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};
use spinprobe_cli::{execute, Command, RunConfig};

#[derive(Parser)]
#[command(name = "spinprobe", version, about = "Spin detector response tables as CSV")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand)]
enum Sub {
    /// Radial functions and smearing profile on a radius grid
    Orbital,
    /// Response functionals over the gap grid (or at --gap)
    Response,
    /// Flip probability over gaps for each Gaussian width in --t-list
    PflipSweep,
    /// Closed-form against extrapolated adiabatic rate
    Rate,
    /// Spin and Unruh-DeWitt models side by side
    UdwCompare,
    /// Closed forms against quadrature
    Oracle {
        #[arg(value_enum, default_value_t = OracleKind::Angular)]
        kind: OracleKind,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleKind {
    Angular,
}

#[derive(Args)]
struct Opts {
    /// Nuclear charge
    #[arg(long = "Z", global = true)]
    z: Option<String>,
    /// Principal quantum number (only 1 is supported)
    #[arg(long, global = true)]
    n0: Option<String>,
    /// Fine-structure constant
    #[arg(long, global = true)]
    alpha: Option<String>,
    /// spin | udw-amplitude | udw-derivative
    #[arg(long, global = true)]
    coupling: Option<String>,
    /// Spin charge q; Unruh-DeWitt models use q/2π
    #[arg(long, global = true)]
    charge: Option<String>,
    /// Energy gap in units of 1/a0
    #[arg(long, global = true, allow_hyphen_values = true)]
    gap: Option<String>,
    /// gaussian:T=<v> or window:<a>,<b>
    #[arg(long, global = true, allow_hyphen_values = true)]
    switching: Option<String>,
    /// <min>:<max>:<steps>[:log]
    #[arg(long, global = true, allow_hyphen_values = true)]
    grid: Option<String>,
    /// Comma-separated Gaussian widths
    #[arg(long = "t-list", global = true)]
    t_list: Option<String>,
    /// Relative quadrature tolerance
    #[arg(long, global = true)]
    tol: Option<String>,
    /// Random seed
    #[arg(long, global = true)]
    seed: Option<String>,
    /// Number of random draws
    #[arg(long, global = true)]
    draws: Option<String>,
    /// Initial Bloch vector x,y,z
    #[arg(long, global = true, allow_hyphen_values = true)]
    bloch: Option<String>,
    /// ground | excited
    #[arg(long, global = true)]
    initial: Option<String>,
    /// Output CSV path (stdout if absent)
    #[arg(long, global = true)]
    out: Option<String>,
    /// key = value file; flags take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

impl Opts {
    fn flags(&self) -> BTreeMap<String, String> {
        let pairs = [
            ("Z", &self.z),
            ("n0", &self.n0),
            ("alpha", &self.alpha),
            ("coupling", &self.coupling),
            ("charge", &self.charge),
            ("gap", &self.gap),
            ("switching", &self.switching),
            ("grid", &self.grid),
            ("t-list", &self.t_list),
            ("tol", &self.tol),
            ("seed", &self.seed),
            ("draws", &self.draws),
            ("bloch", &self.bloch),
            ("initial", &self.initial),
            ("out", &self.out),
        ];
        pairs
            .into_iter()
            .filter_map(|(k, v)| v.clone().map(|v| (k.to_string(), v)))
            .collect()
    }
}

fn run(cli: Cli) -> Result<usize> {
    let command = match cli.command {
        Sub::Orbital => Command::Orbital,
        Sub::Response => Command::Response,
        Sub::PflipSweep => Command::PflipSweep,
        Sub::Rate => Command::Rate,
        Sub::UdwCompare => Command::UdwCompare,
        Sub::Oracle {
            kind: OracleKind::Angular,
        } => Command::Oracle,
    };
    let cfg = RunConfig::resolve(command, cli.opts.config.as_deref(), &cli.opts.flags())?;
    let outcome = execute(&cfg)?;
    if cfg.out.is_none() {
        std::io::stdout().write_all(outcome.csv.as_bytes())?;
    }
    if outcome.failures > 0 {
        log::error!("{} row(s) failed their check", outcome.failures);
    }
    Ok(outcome.failures)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(0) => ExitCode::SUCCESS,
        Ok(_) => ExitCode::FAILURE,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
