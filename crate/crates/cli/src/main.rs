mod args;
mod config;
mod error;
mod run;

use std::collections::BTreeMap;
use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use serde::Serialize;

use args::{Cli, Command};
use error::CliError;

type Flags = BTreeMap<String, toml::Value>;

fn resolved<T: Serialize>(name: &'static str, args: &T) -> (&'static str, Flags) {
    (name, config::flatten(args))
}

fn flags(command: &Command) -> (&'static str, Flags) {
    match command {
        Command::Gen(a) => resolved("gen", a),
        Command::Encode(a) => resolved("encode", a),
        Command::Sample(a) => resolved("sample", a),
        Command::Distribution(a) => resolved("distribution", a),
        Command::Cliques(a) => resolved("cliques", a),
        Command::Betti(a) => resolved("betti", a),
        Command::Surface(a) => resolved("surface", a),
        Command::Percolation(a) => resolved("percolation", a),
        Command::Entropy(a) => resolved("entropy", a),
        Command::Compare(a) => resolved("compare", a),
        Command::Persistence(a) => resolved("persistence", a),
    }
}

fn execute(cli: &Cli) -> Result<Vec<u8>, CliError> {
    let (name, resolved) = flags(&cli.command);
    if cli.common.dry_run {
        return Ok(config::render_toml(name, &resolved).into_bytes());
    }
    let prov = config::provenance(name, &resolved);
    match &cli.command {
        Command::Gen(a) => run::gen(a),
        Command::Encode(a) => run::encode_cmd(a),
        Command::Sample(a) => run::sample(a, &prov),
        Command::Distribution(a) => run::distribution(a, &prov),
        Command::Cliques(a) => run::cliques(a, &prov),
        Command::Betti(a) => run::betti(a, &prov),
        Command::Surface(a) => run::surface(a, &prov),
        Command::Percolation(a) => run::percolation(a, &prov),
        Command::Entropy(a) => run::entropy(a, &prov),
        Command::Compare(a) => run::compare(a, &prov),
        Command::Persistence(a) => run::persistence(a, &prov),
    }
}

fn emit(cli: &Cli, bytes: &[u8]) -> Result<(), CliError> {
    let written = match &cli.common.out {
        Some(path) if !cli.common.dry_run => std::fs::write(path, bytes),
        _ => std::io::stdout().lock().write_all(bytes),
    };
    written.map_err(|e| CliError::usage(format!("cannot write output: {e}")))
}

fn main() -> ExitCode {
    let argv = match config::expand(std::env::args_os().collect()) {
        Ok(argv) => argv,
        Err(e) => return fail(&e),
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match execute(&cli).and_then(|bytes| emit(&cli, &bytes)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("gbstda: {e}");
    ExitCode::from(e.code as u8)
}
