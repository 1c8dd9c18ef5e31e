//! `h2dri`: scenario sweeps and run comparison.
//!
//! Exit codes: 0 success, 1 bad input (config, flags, grid mismatch),
//! 2 one or more sweep cells failed to solve, 3 `diff` found a delta above the threshold.

mod diff;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use h2dri::config::{self, ConfigError};
use h2dri::output::{self, OutputError};
use h2dri::sweep::{self, SweepError};
use h2dri::{run_sweep, Execution, ScenarioConfig, ScenarioKind, SweepSpec};

#[derive(Debug, Parser)]
#[command(name = "h2dri", version, about = "Hydrogen direct-reduction ironmaking flowsheet sweeps")]
#[command(args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compare two results.csv files cell by cell.
    Diff(diff::DiffArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Scenario configuration file.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// zero-carbon, trad-64, trad-82, grid or all.
    #[arg(long)]
    scenario: Option<String>,
    /// Single reduction-gas temperature, K.
    #[arg(long = "t", value_name = "K", conflicts_with = "t_range")]
    t: Option<f64>,
    /// Temperature grid LO:HI:STEP in K.
    #[arg(long = "t-range", value_name = "LO:HI:STEP")]
    t_range: Option<String>,
    /// DRI batch size, kg.
    #[arg(long, value_name = "N")]
    batch_kg: Option<f64>,
    /// Drop expander, ORC and top-gas heat recovery from the outputs.
    #[arg(long)]
    no_waste_heat: bool,
    /// Use the plain emissions ratio without penalty multipliers.
    #[arg(long)]
    no_penalty: bool,
    /// Write bed temperature profiles for every cell.
    #[arg(long)]
    dump_profiles: bool,
    /// Output directory.
    #[arg(long, value_name = "DIR", default_value = "out")]
    out: PathBuf,
    /// Evaluate cells one after another instead of in parallel.
    #[arg(long)]
    sequential: bool,
}

#[derive(Debug, Error)]
enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Sweep(#[from] SweepError),
    #[error(transparent)]
    Output(#[from] OutputError),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Diff(#[from] diff::DiffError),
}

fn parse_range(s: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || CliError::Usage(format!("--t-range expects LO:HI:STEP, got `{s}`"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let v: Vec<f64> = parts.iter().map(|p| p.trim().parse::<f64>().map_err(|_| bad())).collect::<Result<_, _>>()?;
    Ok(sweep::temperature_grid(v[0], v[1], v[2])?)
}

fn build(args: &RunArgs) -> Result<(ScenarioConfig, SweepSpec), CliError> {
    let (mut template, kind_set) = match &args.config {
        Some(p) => {
            let c = config::load(p)?;
            (c.template, c.kind_set)
        }
        None => (ScenarioConfig::new(ScenarioKind::ZeroCarbon), false),
    };
    if let Some(b) = args.batch_kg {
        template.batch_kg = b;
    }
    if args.no_waste_heat {
        template.waste_heat = false;
    }
    if args.no_penalty {
        template.carbon.penalty = false;
    }
    let scenarios = match args.scenario.as_deref() {
        Some("all") => ScenarioKind::ALL.to_vec(),
        Some(s) => vec![s.parse::<ScenarioKind>().map_err(CliError::Usage)?],
        None if kind_set => vec![template.kind],
        None => ScenarioKind::ALL.to_vec(),
    };
    let temperatures = match (args.t, &args.t_range) {
        (Some(t), _) => {
            let g = vec![t];
            sweep::check_grid(&g)?;
            g
        }
        (None, Some(r)) => parse_range(r)?,
        (None, None) => sweep::default_grid(),
    };
    Ok((template, SweepSpec { scenarios, temperatures }))
}

fn run(args: &RunArgs) -> Result<ExitCode, CliError> {
    let (template, spec) = build(args)?;
    template.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let exec = if args.sequential { Execution::Sequential } else { Execution::Parallel };
    let cells = run_sweep(&template, &spec, exec);
    output::write_all(&args.out, &cells)?;
    if args.dump_profiles {
        output::write_profiles(&args.out, &cells)?;
    }
    let failed: Vec<_> = cells.iter().filter(|c| c.outcome.is_err()).collect();
    for c in &failed {
        if let Err(e) = &c.outcome {
            eprintln!("error: {} at {} K: {e}", c.kind, c.t_in);
        }
    }
    println!(
        "{} cells solved, {} failed; results in {}",
        cells.len() - failed.len(),
        failed.len(),
        args.out.join("results.csv").display()
    );
    Ok(if failed.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match &cli.command {
        Some(Command::Diff(d)) => diff::run(d).map_err(CliError::from),
        None => run(&cli.run),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
