use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tde_cli::{env_output, execute, load, output_dir, sweep, Command, EigenArgs};

/// Transport-diffusion equation on the circle: simulations, stationary
/// profiles and stability reports driven by scenario files.
#[derive(Parser)]
#[command(name = "tde", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Time-dependent spectral simulation.
    Simulate { file: PathBuf },
    /// Stationary profile by fixed-point iteration.
    Stationary { file: PathBuf },
    /// Constant-state eigenvalues, pattern conditions and peak verdicts.
    Eigen {
        file: PathBuf,
        #[arg(long = "K", default_value_t = 8)]
        k: usize,
        #[arg(long, default_value_t = 4)]
        nmax: usize,
    },
    /// Peak ODE trajectory.
    Peaks { file: PathBuf },
    /// Run every scenario in a directory; each file names its own command.
    Sweep {
        dir: PathBuf,
        #[arg(long = "K", default_value_t = 8)]
        k: usize,
        #[arg(long, default_value_t = 4)]
        nmax: usize,
    },
}

fn code(c: i32) -> ExitCode {
    ExitCode::from(c.clamp(0, 255) as u8)
}

fn single(command: Command, file: PathBuf, eigen: EigenArgs) -> ExitCode {
    let loaded = match load(&file) {
        Ok(l) => l,
        Err(e) => {
            eprintln!("tde: {e}");
            return code(e.exit_code());
        }
    };
    let out = output_dir(&loaded, env_output());
    let outcome = execute(command, &loaded, &out, eigen);
    for line in &outcome.lines {
        println!("{line}");
    }
    if let Err(e) = &outcome.result {
        eprintln!("tde: {e}");
    }
    code(outcome.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Cmd::Simulate { file } => single(Command::Simulate, file, EigenArgs::default()),
        Cmd::Stationary { file } => single(Command::Stationary, file, EigenArgs::default()),
        Cmd::Eigen { file, k, nmax } => single(Command::Eigen, file, EigenArgs { k, nmax }),
        Cmd::Peaks { file } => single(Command::Peaks, file, EigenArgs::default()),
        Cmd::Sweep { dir, k, nmax } => {
            let root = env_output().unwrap_or_else(|| PathBuf::from("out"));
            let entries = match sweep(&dir, &root, EigenArgs { k, nmax }) {
                Ok(e) => e,
                Err(e) => {
                    eprintln!("tde: {e}");
                    return code(e.exit_code());
                }
            };
            let mut first_failure = 0;
            for e in &entries {
                let verdict = if e.passed() { "ok" } else { "FAILED" };
                println!(
                    "{verdict:6} {:<36} {:<10} exit {} (expected {}): {}",
                    e.path.file_name().map_or_else(|| e.path.display().to_string(), |n| n.to_string_lossy().into_owned()),
                    e.command.map_or("-", |c| c.as_str()),
                    e.exit_code,
                    e.expected_exit,
                    e.message
                );
                if !e.passed() && first_failure == 0 {
                    first_failure = if e.exit_code == 0 { 7 } else { e.exit_code };
                }
            }
            let passed = entries.iter().filter(|e| e.passed()).count();
            println!("{passed}/{} scenarios as expected", entries.len());
            code(first_failure)
        }
    }
}
