use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mappro::experiment::{compare, constants, constants_json, format_table, run_experiment, ExperimentConfig};
use mappro::Error;

#[derive(Parser)]
#[command(version, about = "Run and compare decentralized optimization experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its trajectory, summary and constants.
    Run { config: PathBuf },
    /// Rank experiments by communication rounds needed to reach a gap.
    Compare {
        #[arg(required = true, num_args = 2..)]
        configs: Vec<PathBuf>,
        #[arg(long)]
        gap: f64,
    },
    /// Print the parameter chain and lemma constants without running.
    Constants { config: PathBuf },
}

fn execute(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Run { config } => {
            let art = run_experiment(&config)?;
            let s = &art.summary_data;
            println!(
                "{}: {} iterations, {} rounds, gap {:e} -> {:e}",
                s.name, s.iterations, s.rounds, s.initial_gap, s.final_gap
            );
            for line in &s.checks {
                println!("  {line}");
            }
            println!("wrote {}", art.trajectory.display());
        }
        Command::Compare { configs, gap } => {
            let cfgs = configs
                .iter()
                .map(|p| ExperimentConfig::load(p))
                .collect::<Result<Vec<_>, _>>()?;
            print!("{}", format_table(&compare(&cfgs, gap)?, gap));
        }
        Command::Constants { config } => print!("{}", constants_json(&constants(&config)?)),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
