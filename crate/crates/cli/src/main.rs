//! `popuc`: command-line front end for the popuc library.
//!
//! Results go to stdout (or `--out`) as JSON or CSV. Exit status is 0 when
//! every asserted check passes, 1 when a check fails, and 2 on an error, in
//! which case stderr carries `{"kind": ..., "message": ...}`.

mod args;
mod commands;
mod error;

use std::fs;
use std::io::{self, Write};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command, Format};
use commands::Outcome;
use error::{CliError, ErrorReport};

fn run(cli: Cli) -> Result<(Outcome, Option<Format>, Option<std::path::PathBuf>), CliError> {
    let (outcome, common) = match cli.command {
        Command::Zeros(a) => (commands::zeros(&a)?, a),
        Command::Gdj(a) => (commands::gdj(&a)?, a),
        Command::Ode(a) => (commands::ode(&a)?, a),
        Command::System { common, tau } => (commands::system(&common, tau)?, common),
        Command::Verify(p) => (commands::verify(&p)?, p.common),
        Command::Equilibrium(p) => (commands::equilibrium(&p, Format::Json)?, p.common),
        Command::Example { name, common } => (commands::example(name, &common)?, common),
        Command::PlotData { figure, mut inner } => {
            if let Some(f) = figure {
                if inner.points.is_some() || inner.common.measure.is_some() || inner.common.n.is_some() {
                    return Err(CliError::Usage("--figure sets the measure, degree and region itself".into()));
                }
                commands::figure_preset(f, &mut inner);
            }
            (commands::equilibrium(&inner, Format::Csv)?, inner.common)
        }
    };
    Ok((outcome, common.format, common.out))
}

fn emit(outcome: &Outcome, format: Option<Format>, out: Option<&std::path::Path>) -> Result<(), CliError> {
    let bytes: &[u8] = match format.unwrap_or(outcome.default_format) {
        Format::Json => outcome.json.as_bytes(),
        Format::Csv => outcome
            .csv
            .as_deref()
            .ok_or_else(|| CliError::Usage("this subcommand has no CSV output".into()))?,
    };
    match out {
        Some(path) => fs::write(path, bytes).map_err(|source| CliError::Io { path: path.to_owned(), source }),
        None => io::stdout()
            .write_all(bytes)
            .map_err(|source| CliError::Io { path: "<stdout>".into(), source }),
    }
}

fn fail(e: &CliError) -> ExitCode {
    let report = serde_json::to_string(&ErrorReport::from(e)).unwrap_or_else(|_| e.to_string());
    eprintln!("{report}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(&CliError::Usage(e.render().to_string().trim_end().to_owned())),
    };
    match run(cli).and_then(|(outcome, format, out)| {
        emit(&outcome, format, out.as_deref())?;
        Ok(outcome.pass)
    }) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => fail(&e),
    }
}
