// Copyright 2026 ensemble-gate contributors
// SPDX-License-Identifier: Apache-2.0

//! `ensemble-gate`: run the simulators from the command line.

mod config;
mod experiments;
mod output;
mod schema;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{value_parser, Arg, ArgMatches, Command};

use config::{read_file, resolve, ConfigError, Format, Request, RunConfig};
use experiments::RunError;
use schema::{keys, Experiment, PRESET_NAMES};

const EXIT_CONFIG: u8 = 2;
const EXIT_WRITE: u8 = 3;
const EXIT_NUMERICAL: u8 = 4;

fn common_args(cmd: Command) -> Command {
    cmd.arg(Arg::new("preset").long("preset").value_name("NAME").help(format!("Built-in preset ({})", PRESET_NAMES.join(", "))))
        .arg(Arg::new("config").long("config").value_name("PATH").value_parser(value_parser!(PathBuf)).help("Flat JSON config file"))
}

fn cli() -> Command {
    let mut cmd = Command::new("ensemble-gate")
        .about("Ensemble two-qubit gate simulators")
        .version(env!("CARGO_PKG_VERSION"))
        .subcommand_required(true)
        .arg_required_else_help(true);
    for exp in Experiment::ALL {
        let mut sub = common_args(Command::new(exp.name()).about(exp.about()))
            .arg(Arg::new("out").long("out").value_name("PATH").value_parser(value_parser!(PathBuf)).help("Output file"))
            .arg(Arg::new("format").long("format").value_parser(["csv", "json"]).help("Output format [default: csv]"))
            .arg(Arg::new("seed").long("seed").value_name("U64").value_parser(value_parser!(u64)).help("RNG seed"));
        for k in keys(exp) {
            sub = sub.arg(
                Arg::new(k.name)
                    .long(k.name)
                    .value_name(k.kind.value_name())
                    .allow_negative_numbers(true)
                    .help(format!("{} [default: {}]", k.help, k.default)),
            );
        }
        cmd = cmd.subcommand(sub);
    }
    cmd.subcommand(
        common_args(Command::new("validate").about("Check a config and list the resolved parameters without running"))
            .arg(Arg::new("file").value_name("CONFIG").value_parser(value_parser!(PathBuf)).help("Config file"))
            .arg(
                Arg::new("experiment")
                    .long("experiment")
                    .value_parser(Experiment::ALL.map(|e| e.name()))
                    .help("Experiment, if neither the file nor the preset names one"),
            ),
    )
}

fn request(m: &ArgMatches, experiment: Option<Experiment>) -> Result<Request, ConfigError> {
    let file_path = m.get_one::<PathBuf>("config").or_else(|| m.try_get_one::<PathBuf>("file").ok().flatten());
    let file = file_path.map(|p| read_file(p)).transpose()?;
    let mut flags = Vec::new();
    if let Some(exp) = experiment {
        for k in keys(exp) {
            if let Some(v) = m.get_one::<String>(k.name) {
                flags.push((k.name.to_string(), v.clone()));
            }
        }
    }
    let opt = |name: &str| m.try_get_one::<String>(name).ok().flatten().cloned();
    Ok(Request {
        experiment,
        file,
        preset: opt("preset"),
        flags,
        seed: m.try_get_one::<u64>("seed").ok().flatten().copied(),
        format: opt("format").map(|f| Format::parse(&f)).transpose()?,
        out: m.try_get_one::<PathBuf>("out").ok().flatten().cloned(),
    })
}

fn execute(cfg: &RunConfig) -> ExitCode {
    let start = Instant::now();
    let out = match experiments::run(cfg) {
        Ok(o) => o,
        Err(RunError::Config(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_CONFIG);
        }
        Err(RunError::Numerical(msg)) => {
            eprintln!("error: numerical failure in {}: {msg}\nparameters: {}", cfg.experiment, cfg.echo());
            return ExitCode::from(EXIT_NUMERICAL);
        }
    };
    let text = match cfg.format {
        Format::Csv => output::csv(&out),
        Format::Json => output::json_document(cfg, &out),
    };
    let path = cfg.output_path();
    if let Err(e) = output::write_atomic(&path, &text) {
        eprintln!("error: cannot write {}: {e}", path.display());
        return ExitCode::from(EXIT_WRITE);
    }
    let mut line = format!(
        "{}: {} rows -> {} ({:.2} s)",
        cfg.experiment,
        out.rows.len(),
        path.display(),
        start.elapsed().as_secs_f64()
    );
    if let Some(note) = out.note {
        line += &format!("; {note}");
    }
    println!("{line}");
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let matches = match cli().try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let (name, sub) = matches.subcommand().expect("subcommand required");
    let experiment = match name {
        "validate" => sub.get_one::<String>("experiment").and_then(|s| Experiment::from_name(s)),
        other => Some(Experiment::from_name(other).expect("subcommands mirror experiments")),
    };
    let cfg = match request(sub, experiment).and_then(resolve) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    if name == "validate" {
        print!("{}", cfg.report());
        return ExitCode::SUCCESS;
    }
    execute(&cfg)
}
