use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use kdvbh::cli::{execute, Extras};
use kdvbh::config::{parse_bidegree, parse_windows, Command, ConfigError, Format, RunConfig, DEFAULT_MAX_D};
use kdvbh_core::algebra::Bidegree;
use kdvbh_core::cohomeng::Target;
use kdvbh_core::linwin::Window;

/// Bihamiltonian cohomology of the dispersionless KdV pencil, in exact
/// arithmetic over polynomial windows.
#[derive(Parser)]
#[command(name = "kdvbh", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Check the pencil identities, variational exactness and the homotopy.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Replace D2 by a non-differential (negative control).
        #[arg(long, hide = true)]
        corrupt_d2: bool,
    },
    /// Spectral-sequence pages of the KdV subcomplexes.
    Pages {
        #[command(flatten)]
        common: Common,
    },
    /// Windowed cohomology reports.
    Bh {
        #[command(flatten)]
        common: Common,
        /// H_lambda_A, H_lambda_F, BH_A, BH_F or H_D1_A (repeatable).
        #[arg(long = "target", value_parser = parse_target)]
        targets: Vec<Target>,
    },
    /// The full acceptance battery.
    Acceptance {
        #[command(flatten)]
        common: Common,
    },
    /// Export an operator matrix as triplets.
    Matrix {
        #[command(flatten)]
        common: Common,
        /// D1, D2, Dlambda or dtot.
        #[arg(long, default_value = "D1")]
        operator: String,
    },
}

#[derive(Args)]
struct Common {
    /// Largest standard degree.
    #[arg(long, default_value_t = DEFAULT_MAX_D)]
    max_d: u32,
    /// Window ladder `N1:L1,N2:L2,...`, strictly increasing.
    #[arg(long, value_parser = parse_ladder)]
    windows: Option<Ladder>,
    /// Restrict to the bidegree `p,d` (repeatable).
    #[arg(long = "bidegree", value_parser = parse_bidegree)]
    bidegrees: Vec<Bidegree>,
    #[arg(long, default_value = "json", value_parser = parse_format)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone)]
struct Ladder(Vec<Window>);

fn parse_ladder(s: &str) -> Result<Ladder, ConfigError> {
    parse_windows(s).map(Ladder)
}

fn parse_target(s: &str) -> Result<Target, ConfigError> {
    Target::from_name(s).ok_or_else(|| ConfigError(format!("unknown target `{s}`")))
}

fn parse_format(s: &str) -> Result<Format, ConfigError> {
    s.parse()
}

impl Common {
    fn config(self, command: Command) -> RunConfig {
        let mut cfg = RunConfig::new(command);
        cfg.max_d = self.max_d;
        if let Some(w) = self.windows {
            cfg.ladder = w.0;
        }
        cfg.bidegrees = self.bidegrees;
        cfg.format = self.format;
        cfg.out = self.out;
        cfg
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut extras = Extras::default();
    let cfg = match cli.command {
        Sub::Verify { common, corrupt_d2 } => {
            extras.corrupt_d2 = corrupt_d2;
            common.config(Command::Verify)
        }
        Sub::Pages { common } => common.config(Command::Pages),
        Sub::Bh { common, targets } => {
            extras.targets = targets;
            common.config(Command::Bh)
        }
        Sub::Acceptance { common } => common.config(Command::Acceptance),
        Sub::Matrix { common, operator } => {
            extras.operator = operator;
            common.config(Command::Matrix)
        }
    };
    let outcome = match execute(&cfg, &extras) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("kdvbh: {e:#}");
            return ExitCode::from(2);
        }
    };
    let written = match &cfg.out {
        Some(path) => std::fs::write(path, &outcome.rendered),
        None => std::io::stdout().write_all(outcome.rendered.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("kdvbh: cannot write report: {e}");
        return ExitCode::from(2);
    }
    if outcome.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
