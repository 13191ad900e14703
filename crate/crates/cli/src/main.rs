//! `cigam` command-line tool.

mod args;
mod commands;
mod output;

use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use args::{Cli, Command};

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            return fail(&anyhow::anyhow!("cannot configure {threads} threads: {e}"));
        }
    }
    let start = Instant::now();
    let result = match &cli.command {
        Command::Preprocess(a) => commands::preprocess(a),
        Command::Fit(a) => commands::fit(a),
        Command::Sample(a) => commands::sample(a),
        Command::Loglik(a) => commands::loglik(a),
        Command::CoreThreshold(a) => commands::core_threshold(a),
        Command::SelectLayers(a) => commands::select_layers(a),
        Command::Compare(a) => commands::compare(a),
        Command::Project(a) => commands::project(a),
    };
    match result.and_then(|run| output::write_meta(&cli, run, start.elapsed())) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}

fn fail(e: &anyhow::Error) -> ExitCode {
    let kind = e
        .chain()
        .find_map(|c| {
            if let Some(inner) = c.downcast_ref::<cigam::Error>() {
                Some(error_kind(inner))
            } else if c.is::<std::io::Error>() {
                Some("io")
            } else if c.is::<csv::Error>() {
                Some("csv")
            } else if c.is::<serde_json::Error>() {
                Some("json")
            } else if c.is::<std::num::ParseFloatError>() || c.is::<std::num::ParseIntError>() {
                Some("parse")
            } else {
                None
            }
        })
        .unwrap_or("invalid-argument");
    let chain: Vec<String> = e.chain().map(|c| c.to_string()).collect();
    let body = serde_json::json!({ "error": { "kind": kind, "message": chain.join(": ") } });
    eprintln!("{body}");
    ExitCode::from(1)
}

fn error_kind(e: &cigam::Error) -> &'static str {
    use cigam::Error::*;
    match e {
        Parse { .. } => "parse",
        EmptyGraph => "empty-graph",
        InvalidArgument(_) => "invalid-argument",
        Domain(_) => "domain",
        RankOutOfRange { .. } => "rank-out-of-range",
        CapacityExceeded { .. } => "capacity-exceeded",
        NonFinite { .. } => "non-finite",
        OrderOutOfRange(_) => "order-out-of-range",
        NotDominable { .. } => "not-dominable",
        MissingFeatures(_) => "missing-features",
        SamplingOverflow { .. } => "sampling-overflow",
        Io(_) => "io",
        Csv(_) => "csv",
        Json(_) => "json",
    }
}
