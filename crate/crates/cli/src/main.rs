//! `infgroups` command-line front end. Exit codes: 0 when every certificate
//! passes, 1 when any fails, 2 on configuration or input errors.

mod commands;
mod config;
mod report;

use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;

use config::{Cli, RunConfig};
use report::Report;

fn execute(cli: &Cli) -> Result<bool> {
    let cfg = RunConfig::from_cli(cli)?;
    let mut outcome = commands::run(&cli.command, &cfg)?;
    if let Some(tol) = cfg.tolerance {
        outcome.certificates = outcome.certificates.into_iter().map(|c| c.with_tolerance(tol)).collect();
    }
    let report = Report::new(&cfg, &outcome.certificates, &outcome.artifacts);
    let text = report.render()?;
    match &cli.common.out {
        Some(path) => std::fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    for c in &outcome.certificates {
        eprintln!("{:<4} {} (residual {:.3e}, tolerance {:.1e})", verdict(c.passed()), c.name, c.residual, c.tolerance);
    }
    Ok(report.passed)
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
