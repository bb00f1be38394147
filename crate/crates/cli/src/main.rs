//! `weldlab`: batch front end writing JSON and CSV reports.
//!
//! Exit status: 0 success, 1 a check above tolerance, 2 invalid input,
//! 3 numerical failure.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{CommandFactory, Parser};

use commands::{Failure, Outcome};
use config::{Cli, Format};

const OUT_DIR_VAR: &str = "WELDLAB_OUT_DIR";

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("weldlab: {msg}");
    eprintln!("{}", <Cli as CommandFactory>::command().render_usage());
    ExitCode::from(2)
}

fn destination(cli: &Cli, format: Format) -> Option<PathBuf> {
    if let Some(p) = &cli.out {
        return Some(p.clone());
    }
    let dir = std::env::var_os(OUT_DIR_VAR)?;
    let ext = match format {
        Format::Json => "json",
        Format::Csv => "csv",
    };
    let name = cli.command.map(|c| format!("{c:?}").to_lowercase()).unwrap_or_else(|| "report".into());
    Some(PathBuf::from(dir).join(format!("{name}.{ext}")))
}

fn write(cli: &Cli, outcome: &Outcome) -> std::io::Result<()> {
    let format = cli.format();
    let text = match format {
        Format::Json => outcome.report.to_json(),
        Format::Csv => outcome.csv.clone().unwrap_or_else(|| outcome.report.to_csv()),
    };
    match destination(cli, format) {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent)?;
            }
            std::fs::write(&path, text)?;
            if cli.verbose > 0 {
                eprintln!("weldlab: wrote {}", path.display());
            }
            Ok(())
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let mut cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(path) = cli.config.clone() {
        let text = match std::fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) => return usage_error(&format!("cannot read {}: {e}", path.display())),
        };
        if let Err(msg) = cli.merge_file(&text) {
            return usage_error(&msg);
        }
    }
    let outcome = match commands::run(&cli) {
        Ok(o) => o,
        Err(Failure::Input(msg)) => return usage_error(&msg),
        Err(Failure::Numerical(msg)) => {
            eprintln!("weldlab: numerical failure: {msg}");
            return ExitCode::from(3);
        }
    };
    if let Err(e) = write(&cli, &outcome) {
        eprintln!("weldlab: cannot write report: {e}");
        return ExitCode::from(2);
    }
    for c in outcome.report.checks.iter().filter(|c| !c.passed) {
        eprintln!("weldlab: check {} failed: {:e} > {:e}", c.name, c.value, c.tol);
    }
    if outcome.report.passed() && outcome.failed_rows == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
