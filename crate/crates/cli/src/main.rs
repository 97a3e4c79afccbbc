use clap::{Args, Parser, Subcommand};
use gnw_cli::output::emit;
use gnw_cli::sweep::sweep_csv;
use gnw_cli::verify::{all_pass, verification_csv};
use gnw_cli::{
    figure_svg, run_selftest, run_suite, run_sweep, with_threads, CliError, ExitCode, FigureKind,
    Suite, SweepParam,
};
use gnw_core::{parse_config, ScenarioConfig};
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "gnw", version, about = "Graphical Nadaraya-Watson experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the configured master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; results do not depend on this.
    #[arg(long)]
    threads: Option<usize>,
    /// Override the configured replication count.
    #[arg(long)]
    replications: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite and write `check_name,theory_value,empirical_value,slack,verdict`.
    Verify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        suite: Suite,
        #[command(flatten)]
        common: Common,
    },
    /// Sweep one parameter and tabulate MISE against the bounds.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        param: SweepParam,
        /// Comma-separated, increasing values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Draw an SVG figure.
    Figure {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        kind: FigureKind,
        #[command(flatten)]
        common: Common,
    },
    /// Exhaustive decoupling checks for n = 1..=max-n.
    Selftest {
        #[arg(long, default_value_t = 12)]
        max_n: usize,
        #[command(flatten)]
        common: Common,
    },
}

fn load(path: &PathBuf, common: &Common) -> Result<ScenarioConfig, CliError> {
    let mut cfg = parse_config(path)?;
    if let Some(seed) = common.seed {
        cfg.master_seed = seed;
    }
    if let Some(r) = common.replications {
        cfg.replications = r;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Verify {
            config,
            suite,
            common,
        } => {
            let cfg = load(&config, &common)?;
            let rows = with_threads(common.threads, || run_suite(&cfg, suite))??;
            emit(common.out.as_deref(), &verification_csv(&rows))?;
            Ok(verdict(all_pass(&rows)))
        }
        Command::Sweep {
            config,
            param,
            values,
            common,
        } => {
            let cfg = load(&config, &common)?;
            let rows = with_threads(common.threads, || run_sweep(&cfg, param, &values))??;
            emit(common.out.as_deref(), &sweep_csv(&rows))?;
            Ok(ExitCode::Pass)
        }
        Command::Figure {
            config,
            kind,
            common,
        } => {
            let cfg = load(&config, &common)?;
            let svg = with_threads(common.threads, || figure_svg(&cfg, kind, cfg.master_seed))??;
            emit(common.out.as_deref(), &svg)?;
            Ok(ExitCode::Pass)
        }
        Command::Selftest { max_n, common } => {
            let rows = with_threads(common.threads, || run_selftest(max_n))??;
            emit(common.out.as_deref(), &verification_csv(&rows))?;
            Ok(verdict(all_pass(&rows)))
        }
    }
}

fn verdict(pass: bool) -> ExitCode {
    if pass {
        ExitCode::Pass
    } else {
        ExitCode::VerificationFailure
    }
}

fn main() {
    let code = match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("gnw: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code as i32);
}
