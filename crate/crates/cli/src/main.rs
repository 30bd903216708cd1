use std::process::ExitCode;

use ballgen_cli::{execute, Cli, EXIT_FAIL, EXIT_PASS, EXIT_USAGE};
use clap::Parser;

fn configure_threads() -> Result<(), String> {
    let Ok(value) = std::env::var("BALLGEN_THREADS") else { return Ok(()) };
    let threads: usize = value.trim().parse().map_err(|_| format!("BALLGEN_THREADS must be a positive integer, got {value:?}"))?;
    if threads == 0 {
        return Err("BALLGEN_THREADS must be positive".into());
    }
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { EXIT_PASS as u8 });
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_USAGE as u8);
    }
    let report = match execute(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE as u8);
        }
    };
    let json = report.to_json();
    match &cli.common.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, json + "\n") {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(EXIT_FAIL as u8);
            }
        }
        None => println!("{json}"),
    }
    if let Some(err) = &report.error {
        eprintln!("error: {err}");
    }
    eprintln!("{}: {}", report.command, if report.passed { "pass" } else { "fail" });
    ExitCode::from(if report.passed { EXIT_PASS as u8 } else { EXIT_FAIL as u8 })
}
