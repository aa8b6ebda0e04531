use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use porolab::scenario::{run_scenario, Scenario, Task};

/// Run a porolab scenario and write its CSV tables, discrepancy report and
/// summary under <out-dir>/<scenario name>/.
#[derive(Parser, Debug)]
#[command(name = "porolab", version)]
struct Cli {
    /// Task to run; must match the `task` field of the config.
    #[arg(value_parser = clap::builder::PossibleValuesParser::new(Task::NAMES))]
    task: String,
    /// Scenario JSON file.
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    /// Overrides the config's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Evaluate independent sweep points on the thread pool.
    #[arg(long)]
    parallel: bool,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let mut scenario = match Scenario::load(&cli.config) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {}: {e}", cli.config.display());
            return ExitCode::from(1);
        }
    };
    if scenario.task.name() != cli.task {
        eprintln!(
            "error: command asks for task `{}` but the config describes `{}`",
            cli.task,
            scenario.task.name()
        );
        return ExitCode::from(1);
    }
    if let Some(seed) = cli.seed {
        scenario.seed = seed;
    }
    match run_scenario(&scenario, &cli.out_dir, cli.parallel) {
        Ok(outcome) => {
            for c in &outcome.checks {
                println!("{} {} = {} ({})", if c.pass { "PASS" } else { "FAIL" }, c.name, c.value, c.criterion);
            }
            println!("wrote {}", outcome.dir.display());
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
