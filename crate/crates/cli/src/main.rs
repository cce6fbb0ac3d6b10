mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;
use cohomlab::Error;
use serde_json::{json, Value};

use args::{Cli, Command};
use commands::{Globals, Outcome};

const EXIT_CONFIG: u8 = 2;
const EXIT_CHECK: u8 = 3;
const EXIT_NUMERIC: u8 = 4;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_)
        | Error::Io(_)
        | Error::InvalidModel(_)
        | Error::InvalidIndices(_)
        | Error::UnknownGenerator { .. }
        | Error::NotARoot(_)
        | Error::DirectionNotComputable(_)
        | Error::UnsupportedOrder(_)
        | Error::UnsupportedDerivativeOrder { .. } => EXIT_CONFIG,
        Error::QuadratureNotConverged { .. } => EXIT_NUMERIC,
        _ => EXIT_CHECK,
    }
}

fn error_json(e: &Error) -> Value {
    let mut v = json!({ "error": e.kind(), "message": e.to_string(), "exit_code": exit_code(e) });
    let extra = match e {
        Error::ResonanceObstruction { k, max_violation } => json!({ "k": k, "max_violation": max_violation }),
        Error::QuadratureNotConverged { value, rel_change } => json!({ "value": value, "rel_change": rel_change }),
        Error::SingularLocus { masked_fraction } => json!({ "masked_fraction": masked_fraction }),
        Error::FitUnstable(r) => json!({ "residual": r }),
        _ => json!({}),
    };
    if let (Some(obj), Value::Object(more)) = (v.as_object_mut(), extra) {
        obj.extend(more);
    }
    v
}

fn emit(cli: &Cli, out: &Outcome) -> std::io::Result<()> {
    if let Some(dir) = &cli.out {
        std::fs::create_dir_all(dir)?;
        std::fs::write(
            dir.join("summary.json"),
            serde_json::to_string_pretty(&out.summary)? + "\n",
        )?;
        if let Some(csv) = &out.csv {
            std::fs::write(dir.join("rows.csv"), csv)?;
        }
    }
    if !cli.quiet {
        for line in &out.text {
            println!("{line}");
        }
        println!("{}", serde_json::to_string_pretty(&out.summary)?);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let globals = Globals {
        config: cli.config.as_deref(),
        out: cli.out.as_deref(),
        seed: cli.seed,
    };
    let result = match &cli.command {
        Command::VerifyAlgebra(a) => commands::verify_algebra(&globals, a),
        Command::Solve(a) => commands::solve(&globals, a),
        Command::LowerBound(a) => commands::lower_bound(&globals, a),
        Command::Remainder(a) => commands::remainder(&globals, a),
        Command::CosBound(a) => commands::cos_bound(&globals, a),
        Command::TameCheck(a) => commands::tame_check(&globals, a),
        Command::Obstruction(a) => commands::obstruction(&globals, a),
        Command::Roots(a) => commands::roots(&globals, a),
    };
    match result {
        Ok(out) => {
            if let Err(e) = emit(&cli, &out) {
                eprintln!("{}", error_json(&Error::Io(e.to_string())));
                return ExitCode::from(EXIT_CONFIG);
            }
            if out.failed.is_empty() {
                ExitCode::SUCCESS
            } else {
                eprintln!(
                    "{}",
                    json!({ "error": "CheckFailed", "failed": out.failed, "exit_code": EXIT_CHECK })
                );
                ExitCode::from(EXIT_CHECK)
            }
        }
        Err(e) => {
            eprintln!("{}", error_json(&e));
            ExitCode::from(exit_code(&e))
        }
    }
}
