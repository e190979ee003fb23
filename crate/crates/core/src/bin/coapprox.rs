use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use coapprox::job::{self, JobConfig, Operation, Overrides};

#[derive(Parser)]
#[command(name = "coapprox", version, about = "Best-coapproximation toolkit: gauges, contractive projections, oracles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Gauge of the configured body at each query point
    Gauge(JobArgs),
    /// Supporting half-spaces of the body and the Hausdorff error of their intersection
    Decompose(JobArgs),
    /// Project query points onto the intersection of the half-space family
    Project(JobArgs),
    /// Best-coapproximation check on the subspace cut out by the family
    Verify(JobArgs),
    /// The l_inf^4 subspace without best coapproximations, with its control run
    Counterexample(JobArgs),
    /// Nonexpansiveness sweep of a projection map
    Sweep(JobArgs),
    /// Print the configuration grammar with defaults
    Schema,
}

#[derive(Args)]
struct JobArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
}

fn load(args: &JobArgs, op: Operation) -> Result<JobConfig, coapprox::Error> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| coapprox::Error::Config(format!("{}: {e}", path.display())))?;
            JobConfig::from_toml_str(&text).map_err(|e| match e {
                coapprox::Error::Config(m) => coapprox::Error::Config(format!("{}: {m}", path.display())),
                e => e,
            })?
        }
        None => JobConfig::default(),
    };
    cfg.apply(&Overrides {
        operation: Some(op),
        seed: args.seed,
        out: args.out.clone(),
        n: args.n,
        tol: args.tol,
    });
    Ok(cfg)
}

fn execute(cfg: &JobConfig) -> Result<i32, coapprox::Error> {
    let out = job::run(cfg)?;
    match &cfg.out {
        Some(path) => {
            let file = File::create(path)
                .map_err(|e| coapprox::Error::Config(format!("{}: {e}", path.display())))?;
            job::write_report(&out.rows, BufWriter::new(file))?;
            print!("{}", out.summary);
            println!("report written to {}", path.display());
        }
        None => {
            eprint!("{}", out.summary);
            job::write_report(&out.rows, io::stdout().lock())?;
        }
    }
    Ok(out.exit_code)
}

fn main() -> ExitCode {
    if let Some(n) = std::env::var("COAPPROX_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let cli = Cli::parse();
    let (args, op) = match &cli.command {
        Command::Schema => {
            let _ = io::stdout().write_all(job::schema_dump().as_bytes());
            return ExitCode::SUCCESS;
        }
        Command::Gauge(a) => (a, Operation::Gauge),
        Command::Decompose(a) => (a, Operation::Decompose),
        Command::Project(a) => (a, Operation::Project),
        Command::Verify(a) => (a, Operation::Verify),
        Command::Counterexample(a) => (a, Operation::Counterexample),
        Command::Sweep(a) => (a, Operation::Sweep),
    };
    let code = match load(args, op).and_then(|cfg| execute(&cfg)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            job::exit_code(&e)
        }
    };
    ExitCode::from(code as u8)
}
