mod args;
mod reports;

use std::process::ExitCode;

use clap::Parser;
use serde::Serialize;

use args::{Cli, Command, Common, DirectionArg, Format};
use rigidity_core::alexander::Direction;
use rigidity_core::certify::{certify, certify_holonomy, render_text, CertifyOptions};
use rigidity_core::error::Error;
use rigidity_core::holonomy::{HolonomyFile, RepLabel, SolveOptions};
use rigidity_core::numeric::Tolerances;
use rigidity_core::presentation::{MonodromySpec, PresentationFile};

const EXIT_INPUT: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_INCONCLUSIVE: u8 = 4;

enum Failure {
    Input(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn tolerances(c: &Common) -> Result<Tolerances, Failure> {
    for (name, v) in [("--tol-det", c.tol_det), ("--tol-root", c.tol_root), ("--tol-null", c.tol_null)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Failure::Input(format!("{name} must be a positive number, got {v}")));
        }
    }
    Ok(Tolerances { det: c.tol_det, root: c.tol_root, null: c.tol_null })
}

fn reps(c: &Common) -> Result<Vec<RepLabel>, Failure> {
    let mut out = Vec::new();
    for tok in c.reps.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        match RepLabel::parse(tok) {
            Some(l @ (RepLabel::Sl4 | RepLabel::V | RepLabel::Gl16)) => {
                if !out.contains(&l) {
                    out.push(l)
                }
            }
            _ => return Err(Failure::Input(format!("unknown representation {tok:?} in --reps (use sl4, v, gl16)"))),
        }
    }
    if out.is_empty() {
        return Err(Failure::Input("--reps selects no representation".into()));
    }
    Ok(out)
}

fn read(path: &std::path::Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))
}

fn emit<T: Serialize>(c: &Common, value: &T, text: impl FnOnce() -> String) -> Result<(), Failure> {
    let body = match c.format {
        Format::Json => serde_json::to_string_pretty(value).map_err(Error::from)? + "\n",
        Format::Text => text(),
    };
    match &c.output {
        Some(path) => {
            std::fs::write(path, body).map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))
        }
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let c = &cli.common;
    let tol = tolerances(c)?;
    let reps = reps(c)?;
    let solve = SolveOptions { starts: c.starts, seed: c.seed };
    match &cli.command {
        Command::Certify { monodromy, holonomy } => {
            let spec = MonodromySpec::parse(monodromy)?;
            let opts = CertifyOptions { tol, seed: c.seed, starts: c.starts, reps, solution: c.solution };
            let report = match holonomy {
                Some(path) => {
                    let h = HolonomyFile::from_json(&read(path)?)?.holonomy(&spec.endomorphism())?;
                    certify_holonomy(&spec, &h, &opts)?
                }
                None => certify(&spec, &opts)?,
            };
            emit(c, &report, || render_text(&report))?;
            Ok(if report.all_inconclusive() { EXIT_INCONCLUSIVE } else { 0 })
        }
        Command::Holonomy { monodromy } => {
            let spec = MonodromySpec::parse(monodromy)?;
            let r = reports::holonomy(&spec, &solve, c.solution, &tol)?;
            emit(c, &r, || reports::render_holonomy(&spec, &r))?;
            Ok(0)
        }
        Command::TraceSolve { monodromy } => {
            let spec = MonodromySpec::parse(monodromy)?;
            let r = reports::trace_solve(&spec, &solve, c.solution)?;
            emit(c, &r, || reports::render_trace_solve(&r))?;
            Ok(0)
        }
        Command::Action { monodromy, direction } => {
            let spec = MonodromySpec::parse(monodromy)?;
            let dir = match direction {
                DirectionArg::Forward => Direction::Forward,
                DirectionArg::Inverse => Direction::Inverse,
            };
            let r = reports::action(&spec, &solve, c.solution, &reps, dir, &tol)?;
            emit(c, &r, || reports::render_action(&spec, &r))?;
            Ok(0)
        }
        Command::Alexander { file, column } => {
            let loaded = PresentationFile::from_json(&read(file)?)?.load()?;
            let r = reports::alexander(&loaded, *column, &tol)?;
            emit(c, &r, || reports::render_alexander(&r))?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { EXIT_INPUT } else { EXIT_NUMERICAL })
        }
    }
}
