use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use randers_cli::runner::{self, RunFlags};

#[derive(Parser)]
#[command(name = "randers", version, about = "Randers/Fermat geometry of stationary spacetimes, batch mode")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every task of a scenario and write artifacts plus manifest.json
    Run {
        /// Path to the JSON scenario
        config: PathBuf,

        /// Output directory (overrides the config's output_dir)
        #[arg(long)]
        out: Option<PathBuf>,

        /// Seed for every randomized search (overrides the config's seed)
        #[arg(long)]
        seed: Option<u64>,

        /// Run up to k tasks concurrently; outputs are identical to a sequential run
        #[arg(long, value_name = "K", default_value_t = 1)]
        parallel: usize,

        /// No progress lines on stderr
        #[arg(long)]
        quiet: bool,
    },

    /// Check schema, expressions and metric validity without running tasks
    Validate {
        /// Path to the JSON scenario
        config: PathBuf,
    },
}

fn print_json(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("JSON values always serialize"));
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run { config, out, seed, parallel, quiet } => {
            let flags = RunFlags { out, seed, parallel, quiet };
            let mut log = |line: &str| {
                if !quiet {
                    eprintln!("{line}");
                }
            };
            match runner::run(&config, &flags, &mut log) {
                Ok(outcome) => {
                    if !quiet {
                        eprintln!("manifest: {}", outcome.out_dir.join("manifest.json").display());
                    }
                    outcome.exit_code()
                }
                Err(e) => {
                    print_json(&e.report());
                    e.exit_code()
                }
            }
        }
        Command::Validate { config } => match runner::validate(&config) {
            Ok(report) => {
                print_json(&report);
                runner::EXIT_OK
            }
            Err(e) => {
                print_json(&e.report());
                e.exit_code()
            }
        },
    };
    ExitCode::from(code as u8)
}
