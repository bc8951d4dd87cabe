use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use polystokes::harness::{self, check, Experiment, ExperimentSpec};
use polystokes::mesh::{build_paper_mesh, save_mesh};
use polystokes::stokes::RhsMode;
use polystokes::Error;

#[derive(Parser)]
#[command(name = "polystokes", version, about = "Polygonal virtual element Stokes experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write the error table as CSV.
    Run {
        #[arg(long)]
        experiment: String,
        /// Comma-separated: cvem, evem, prvem1, prvem0.
        #[arg(long, default_value = "cvem,evem,prvem1,prvem0")]
        modes: String,
        /// Comma-separated viscosities; defaults depend on the experiment.
        #[arg(long, allow_hyphen_values = true)]
        nu: Option<String>,
        /// `a..b` (inclusive), `a,b,c` or a single level.
        #[arg(long)]
        levels: Option<String>,
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// CSV output; standard output if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        mesh_file: Option<PathBuf>,
        #[arg(long)]
        quad_exactness: Option<usize>,
        /// Fill the wall-time column.
        #[arg(long)]
        timing: bool,
    },
    /// Write a mesh of the family.
    Mesh {
        #[arg(long)]
        level: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the invariant suite.
    Check,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidSpec(_) | Error::Parse { .. } | Error::OrderTooHigh { .. } | Error::UnsupportedDegree(_) => 3,
        Error::Io { .. } | Error::Csv { .. } => 1,
        _ => 2,
    }
}

fn run(cli: Cli) -> polystokes::Result<bool> {
    match cli.command {
        Command::Run { experiment, modes, nu, levels, k, out, mesh_file, quad_exactness, timing } => {
            let experiment: Experiment = experiment.parse()?;
            let mut spec = ExperimentSpec::new(experiment);
            spec.k = k;
            spec.modes = harness::parse_list::<RhsMode>(&modes, "mode")?;
            if let Some(nu) = nu {
                spec.nus = harness::parse_list(&nu, "viscosity")?;
            }
            if let Some(levels) = levels {
                spec.levels = harness::parse_levels(&levels)?;
            }
            spec.mesh_file = mesh_file;
            spec.exactness = quad_exactness;
            spec.record_timing = timing;
            let rows = harness::run_experiment(&spec)?;
            match out {
                Some(path) => harness::emit_csv(&rows, &path)?,
                None => harness::write_csv(&rows, std::io::stdout().lock(), "<stdout>".as_ref())?,
            }
            Ok(true)
        }
        Command::Mesh { level, out } => {
            if level > 8 {
                return Err(Error::InvalidSpec(format!("level {level} is too fine")));
            }
            save_mesh(&build_paper_mesh(level), &out)?;
            Ok(true)
        }
        Command::Check => {
            let results = check::run_checks()?;
            for r in &results {
                println!("{} {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
            }
            Ok(results.iter().all(|r| r.passed))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(3) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
