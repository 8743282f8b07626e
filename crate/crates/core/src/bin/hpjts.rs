use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hpjts::commands::{cmd_eval, cmd_trace, load_direction, load_points, Op};
use hpjts::report::{run_verify, VerifyConfig};
use hpjts::{Domain, Error};

#[derive(Parser)]
#[command(
    name = "hpjts",
    version,
    about = "Verify and evaluate the geometry of bounded symmetric domains"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the invariant suite and write a JSON report.
    Verify {
        #[arg(long)]
        domain: String,
        #[arg(long)]
        samples: usize,
        #[arg(long)]
        seed: u64,
        /// Override a check tolerance, `name=value`.
        #[arg(long = "tol", value_name = "NAME=VALUE")]
        tol: Vec<String>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Evaluate one operation at every point of a point file.
    Eval {
        #[arg(long)]
        domain: String,
        #[arg(long)]
        op: String,
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Tabulate diastasis and duality values along a ray.
    Trace {
        #[arg(long)]
        domain: String,
        #[arg(long)]
        direction: PathBuf,
        #[arg(long)]
        rmax: f64,
        #[arg(long)]
        samples: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

const USAGE: u8 = 2;

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Error> {
    fs::write(path, text).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Verify {
            domain,
            samples,
            seed,
            tol,
            out,
            threads,
        } => {
            let d: Domain = domain.parse()?;
            if threads == 0 {
                return Err(Error::Invalid("threads must be positive".into()));
            }
            let mut cfg = VerifyConfig::new(d, samples, seed);
            cfg.threads = threads;
            for item in &tol {
                let (name, value) = item.split_once('=').ok_or_else(|| {
                    Error::Invalid(format!("--tol expects name=value, got `{item}`"))
                })?;
                let value: f64 = value
                    .parse()
                    .map_err(|_| Error::Invalid(format!("bad tolerance value `{value}`")))?;
                cfg.set_tolerance(name, value)?;
            }
            let report = run_verify(&cfg)?;
            write(&out, &report.to_json())?;
            Ok(if report.all_pass { 0 } else { 1 })
        }
        Command::Eval {
            domain,
            op,
            points,
            out,
        } => {
            let d: Domain = domain.parse()?;
            let op: Op = op.parse()?;
            let pf = load_points(&d, &read(&points)?)?;
            write(&out, &cmd_eval(&d, op, &pf.points))?;
            Ok(0)
        }
        Command::Trace {
            domain,
            direction,
            rmax,
            samples,
            out,
        } => {
            let d: Domain = domain.parse()?;
            let dir = load_direction(&d, &read(&direction)?)?;
            write(&out, &cmd_trace(&d, &dir, rmax, samples)?)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(USAGE)
        }
    }
}
