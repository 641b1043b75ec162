use std::io::{self, Write};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::Value;

mod commands;
mod output;
mod verify;

use output::{Emitter, Format};

pub const DEFAULT_SEED: u64 = 20_130_717;

#[derive(Parser, Debug)]
#[command(
    name = "eulermean",
    version,
    about = "Exact and simulated laws for the number of i.i.d. values above their mean"
)]
struct Cli {
    /// Master seed for every simulation.
    #[arg(long, global = true, env = "EULERMEAN_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,

    /// Monte Carlo sample count (command-specific default).
    #[arg(long, global = true)]
    samples: Option<u64>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Significant digits for floating-point output.
    #[arg(long, global = true, default_value_t = 17, value_parser = clap::value_parser!(u8).range(1..=17))]
    precision: u8,

    /// Worker threads for sampling (defaults to all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Eulerian number <n,k>, or the whole row n.
    Eulerian {
        n: usize,
        #[arg(allow_hyphen_values = true)]
        k: Option<i64>,
    },
    /// Exact PMF of the above-mean count or of the floor of a uniform sum.
    Pmf { law: Law, n: usize },
    /// Exact CDF P(W_n <= k).
    Cdf {
        law: CdfLaw,
        n: usize,
        k: usize,
        /// Also evaluate through the exponential residue formula.
        #[arg(long)]
        via_lp: bool,
    },
    /// P(sum a_i X_i >= sum b_j Y_j) for i.i.d. standard exponentials.
    Lp {
        #[arg(long, num_args = 1.., value_name = "A")]
        a: Vec<String>,
        #[arg(long, num_args = 1.., value_name = "B")]
        b: Vec<String>,
        /// Exact rational arithmetic; accepts integers, p/q and decimals.
        #[arg(long)]
        exact: bool,
        /// Evaluate even when two a coefficients are closer than --min-separation.
        #[arg(long)]
        allow_ill_conditioned: bool,
        #[arg(long, default_value_t = eulermean::lp::DEFAULT_MIN_SEPARATION)]
        min_separation: f64,
        /// Add a Monte Carlo estimate using --samples draws.
        #[arg(long)]
        simulate: bool,
    },
    /// Stable-gap laws.
    #[command(subcommand)]
    Levy(LevyCommand),
    /// Known masses of W_n for i.i.d. normal values (n = 4 or 5).
    NormalCase {
        n: usize,
        /// Add Monte Carlo frequencies using --samples draws.
        #[arg(long)]
        simulate: bool,
    },
    /// Approval-voting strategy.
    #[command(subcommand)]
    Vote(VoteCommand),
    /// Simulate the above-mean count (or floor sum) and compare with the known law.
    Sample {
        #[arg(long, default_value = "uniform")]
        model: eulermean::UtilityModel,
        #[arg(short = 'n', long = "n")]
        n: usize,
        #[arg(long, value_enum, default_value_t = Statistic::Wn)]
        statistic: Statistic,
    },
    /// Run the verification suite; exits 0 only if every check passes.
    Verify {
        /// Cap every Monte Carlo check at 100000 samples.
        #[arg(long)]
        quick: bool,
    },
}

#[derive(Subcommand, Debug)]
enum LevyCommand {
    /// P(W_n <= k) for Lévy gaps.
    Cdf { n: usize, k: usize },
    /// Limit CDF (and density) of W_n / n at x.
    Limit { x: f64 },
}

#[derive(Subcommand, Debug)]
enum VoteCommand {
    /// Approve exactly the candidates above the mean utility.
    Optimal {
        #[arg(long, num_args = 2.., required = true, allow_negative_numbers = true)]
        utilities: Vec<f64>,
    },
    /// Expected gain p n sum_j I_j (U_j - mean) of a ballot.
    Gain {
        #[arg(long, num_args = 2.., required = true, allow_negative_numbers = true)]
        utilities: Vec<f64>,
        /// 1-based indices of approved candidates.
        #[arg(long, num_args = 0..)]
        approve: Vec<usize>,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
    },
    /// Three-candidate polarized electorate with 2m other voters.
    Polarized {
        #[arg(long, default_value_t = 500)]
        m: u64,
        /// Approved candidates, e.g. AB, A, - (none).
        #[arg(long, num_args = 1.., required = true)]
        ballot: Vec<eulermean::ScenarioBallot>,
        #[arg(long, num_args = 3, default_values_t = [10.0, 6.0, 0.0], allow_negative_numbers = true)]
        utilities: Vec<f64>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Law {
    Wn,
    Floorsum,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CdfLaw {
    Wn,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Statistic {
    Wn,
    Floorsum,
}

pub struct Ctx {
    pub seed: u64,
    pub samples: Option<u64>,
    pub emit: Emitter,
}

impl Ctx {
    pub fn samples_or(&self, default: u64) -> Result<u64> {
        let n = self.samples.unwrap_or(default);
        if n == 0 {
            bail!("--samples must be at least 1");
        }
        Ok(n)
    }
}

fn dispatch(cli: Cli) -> Result<(Value, bool)> {
    let ctx = Ctx {
        seed: cli.seed,
        samples: cli.samples,
        emit: Emitter {
            precision: cli.precision as usize,
        },
    };
    let report = match cli.command {
        Command::Eulerian { n, k } => commands::eulerian(n, k),
        Command::Pmf { law, n } => commands::pmf(&ctx, law, n)?,
        Command::Cdf { law: CdfLaw::Wn, n, k, via_lp } => commands::cdf(&ctx, n, k, via_lp)?,
        Command::Lp {
            a,
            b,
            exact,
            allow_ill_conditioned,
            min_separation,
            simulate,
        } => commands::lp(&ctx, &a, &b, exact, allow_ill_conditioned, min_separation, simulate)?,
        Command::Levy(LevyCommand::Cdf { n, k }) => commands::levy_cdf(&ctx, n, k)?,
        Command::Levy(LevyCommand::Limit { x }) => commands::levy_limit(&ctx, x)?,
        Command::NormalCase { n, simulate } => commands::normal_case(&ctx, n, simulate)?,
        Command::Vote(VoteCommand::Optimal { utilities }) => commands::vote_optimal(&ctx, &utilities)?,
        Command::Vote(VoteCommand::Gain { utilities, approve, p }) => {
            commands::vote_gain(&ctx, &utilities, &approve, p)?
        }
        Command::Vote(VoteCommand::Polarized { m, ballot, utilities }) => {
            commands::vote_polarized(&ctx, m, &ballot, &utilities)?
        }
        Command::Sample { model, n, statistic } => commands::sample(&ctx, model, n, statistic)?,
        Command::Verify { quick } => {
            let report = verify::run(&ctx, quick)?;
            let ok = report.all_passed();
            return Ok((report.to_json(&ctx.emit, ctx.seed, quick), ok));
        }
    };
    Ok((report, true))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: cannot start thread pool: {e}");
            return ExitCode::FAILURE;
        }
    }
    let format = cli.format;
    let result = dispatch(cli).and_then(|(report, ok)| {
        let stdout = io::stdout();
        let mut out = stdout.lock();
        output::write_report(&mut out, &report, format).context("writing report")?;
        out.flush()?;
        Ok(ok)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
