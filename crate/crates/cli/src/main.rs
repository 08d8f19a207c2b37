mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{CliError, Format, RunConfig};

/// Exact Baernstein-type norms, their renormings, duals and probes.
#[derive(Parser, Debug)]
#[command(name = "baernstein", version, about)]
struct Cli {
    #[command(flatten)]
    common: Common,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// JSON run configuration; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Family spec as inline JSON or a file path.
    #[arg(long, global = true)]
    family: Option<String>,

    /// Ordinal index, for `renorm` or as shorthand for a transfinite family with `--depth`.
    #[arg(long, global = true)]
    alpha: Option<String>,

    /// Superscript k.
    #[arg(long, global = true)]
    k: Option<u32>,

    /// Branch length for the transfinite shorthand.
    #[arg(long, global = true)]
    depth: Option<usize>,

    /// Force order-separated blocks.
    #[arg(long, global = true)]
    ordered: bool,

    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Support guard for norm evaluations.
    #[arg(long, global = true)]
    max_support: Option<usize>,

    /// Ground-set guard for membership and trace queries.
    #[arg(long, global = true)]
    max_ground: Option<usize>,

    /// Newton-step budget of the dual solver.
    #[arg(long, global = true)]
    max_iterations: Option<usize>,

    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for batch work.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Decimal places in presentation fields.
    #[arg(long, global = true)]
    digits: Option<usize>,

    /// Write the artifact here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Squared norm with an optimal certificate.
    Norm {
        #[arg(long)]
        vector: String,
        /// Use exhaustive enumeration instead of the subset DP.
        #[arg(long)]
        bruteforce: bool,
    },
    /// Certified bracket of the dual norm.
    Dualnorm {
        #[arg(long)]
        vector: String,
    },
    /// Squared Day norm.
    Daynorm {
        #[arg(long)]
        vector: String,
        #[arg(long)]
        bruteforce: bool,
    },
    /// Renormed, base and l2 squared norms on a tree space.
    Renorm {
        #[arg(long)]
        vector: String,
        /// Sum this many extra explicit tail terms.
        #[arg(long, default_value_t = 0)]
        extra: u32,
    },
    /// Renorm on the branch-constrained space.
    Ktnorm {
        #[arg(long)]
        vector: String,
    },
    /// Squared norm on the direct sum of the branch-constrained space and its dual.
    Ynorm {
        #[arg(long)]
        vector: String,
        #[arg(long)]
        dual_vector: String,
    },
    /// Membership, traces and validation of set families.
    #[command(subcommand)]
    Family(FamilyCommand),
    /// Norming functionals.
    #[command(subcommand)]
    Norming(NormingCommand),
    /// Delta tables and trend probes.
    Probe {
        #[arg(long, value_enum)]
        scenario: commands::Scenario,
        /// Sequence length for the separation scenarios.
        #[arg(long, default_value_t = 6)]
        count: u64,
        #[arg(long, default_value = "1")]
        delta: String,
        #[arg(long, default_value_t = 6)]
        n_max: u64,
    },
    /// Seeded cross-checks against exhaustive search.
    #[command(subcommand)]
    Oracle(OracleCommand),
}

#[derive(Subcommand, Debug)]
enum FamilyCommand {
    /// Whether a set belongs to the family.
    Member {
        /// JSON array of points.
        #[arg(long)]
        set: String,
    },
    /// Every admissible subset of a ground set.
    Trace {
        #[arg(long)]
        ground: String,
    },
    /// Heredity and singleton report for a family spec.
    Validate,
}

#[derive(Subcommand, Debug)]
enum NormingCommand {
    /// A 2-norming functional for a vector.
    Extract {
        #[arg(long)]
        vector: String,
    },
    /// Round the coefficients down to powers of two.
    Discretize {
        #[arg(long)]
        functional: String,
    },
    /// Evaluate a functional on a vector.
    Apply {
        #[arg(long)]
        functional: String,
        #[arg(long)]
        vector: String,
    },
}

#[derive(Subcommand, Debug)]
enum OracleCommand {
    /// Subset DP against exhaustive enumeration.
    Norm {
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
    /// Day closed form against permutation search.
    Day {
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let c = &cli.common;
    let file = match &c.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let flags = RunConfig {
        family: c.family.clone().map(serde_json::Value::String),
        max_support: c.max_support,
        max_ground: c.max_ground,
        max_iterations: c.max_iterations,
        tol: c.tol,
        format: c.format,
        out: c.out.clone(),
        digits: c.digits,
    };
    let settings = file.overlay(flags).resolve()?;
    let ctx = commands::Context::new(settings, c)?;
    let job = || dispatch(&ctx, cli.command);
    match c.jobs {
        Some(0) => Err(CliError::Usage("--jobs must be positive".into())),
        #[cfg(feature = "parallel")]
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Usage(format!("cannot start {n} workers: {e}")))?
            .install(job),
        _ => job(),
    }
}

fn dispatch(ctx: &commands::Context, command: Command) -> Result<(), CliError> {
    match command {
        Command::Norm { vector, bruteforce } => ctx.norm(&vector, bruteforce),
        Command::Dualnorm { vector } => ctx.dualnorm(&vector),
        Command::Daynorm { vector, bruteforce } => ctx.daynorm(&vector, bruteforce),
        Command::Renorm { vector, extra } => ctx.renorm(&vector, extra),
        Command::Ktnorm { vector } => ctx.ktnorm(&vector),
        Command::Ynorm { vector, dual_vector } => ctx.ynorm(&vector, &dual_vector),
        Command::Family(FamilyCommand::Member { set }) => ctx.member(&set),
        Command::Family(FamilyCommand::Trace { ground }) => ctx.trace(&ground),
        Command::Family(FamilyCommand::Validate) => ctx.validate(),
        Command::Norming(NormingCommand::Extract { vector }) => ctx.extract(&vector),
        Command::Norming(NormingCommand::Discretize { functional }) => ctx.discretize(&functional),
        Command::Norming(NormingCommand::Apply { functional, vector }) => ctx.apply(&functional, &vector),
        Command::Probe {
            scenario,
            count,
            delta,
            n_max,
        } => ctx.probe(scenario, count, &delta, n_max),
        Command::Oracle(OracleCommand::Norm { trials }) => ctx.oracle_norm(trials),
        Command::Oracle(OracleCommand::Day { trials }) => ctx.oracle_day(trials),
    }
}
