//! `torpid`: batch runner for the consistency-pair experiments.
//!
//! Every subcommand writes a JSON report (`<out-dir>/<command>.json` unless
//! `--out` is given); sweeps also write `<out-dir>/<command>.csv`. Reports
//! embed the full configuration, so a rerun with the same flags reproduces
//! them byte for byte.
//!
//! Exit codes: 0 success, 1 a check failed, 2 usage or configuration error.

mod commands;
mod output;
mod source;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "torpid", version, about = "Experiments on consistency-pair Markov chains")]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CommonArgs {
    /// Master seed; replica streams are split from it.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Worker threads for replicated experiments. Results do not depend on it.
    #[arg(long, global = true, default_value_t = 1)]
    #[serde(skip)]
    pub threads: usize,
    /// Directory for reports.
    #[arg(long, global = true, env = "TORPID_OUT_DIR", default_value = ".")]
    #[serde(skip)]
    pub out_dir: PathBuf,
    /// Path of the JSON report (overrides the default name in --out-dir).
    #[arg(long, global = true)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    /// Cap on |U| + |E| for pair enumeration.
    #[arg(long, global = true, default_value_t = 24)]
    pub limit_pair_bits: usize,
    /// Cap on |E| for the edge-subset marginal.
    #[arg(long, global = true, default_value_t = 22)]
    pub limit_edges: usize,
    /// Cap on the number of states of an exact transition matrix.
    #[arg(long, global = true, default_value_t = 1 << 16)]
    pub limit_states: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a graph and write it in the text format.
    Generate(commands::GenerateArgs),
    /// Compare the vertex marginal with the trace of a uniform independent set.
    VerifyMarginals(commands::VerifyMarginalsArgs),
    /// Check the partner-count identities on a random corpus.
    VerifyConsistencyCounts(commands::VerifyCountsArgs),
    /// Exact mixing time of a chain, with the barrier bound where it applies.
    Mixing(commands::MixingArgs),
    /// Exact conductance of the natural cut.
    Conductance(commands::ConductanceArgs),
    /// Stationary mass of the weight barrier.
    Barrier(commands::BarrierArgs),
    /// Bernoulli structure and tail ceilings of the matching weight.
    Weights(commands::WeightsArgs),
    /// Escape times from one side of the cut.
    Escape(commands::EscapeArgs),
    /// Full-rank frequency of uniform random GF(2) matrices.
    RankExperiment(commands::RankArgs),
    /// Joint SW chain: exact cut flows and the one-step leave frequency.
    SwJoint(commands::SwJointArgs),
}

/// How a command ended.
pub enum Failure {
    /// A check ran and failed.
    Check(String),
    /// Bad flags, oversized input, or unwritable output.
    Usage(String),
}

impl From<torpid_core::Error> for Failure {
    fn from(e: torpid_core::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<String> for Failure {
    fn from(e: String) -> Self {
        Failure::Usage(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let c = &cli.common;
    let result = match &cli.command {
        Command::Generate(a) => commands::generate(c, a),
        Command::VerifyMarginals(a) => commands::verify_marginals(c, a),
        Command::VerifyConsistencyCounts(a) => commands::verify_counts(c, a),
        Command::Mixing(a) => commands::mixing(c, a),
        Command::Conductance(a) => commands::conductance(c, a),
        Command::Barrier(a) => commands::barrier(c, a),
        Command::Weights(a) => commands::weights(c, a),
        Command::Escape(a) => commands::escape(c, a),
        Command::RankExperiment(a) => commands::rank(c, a),
        Command::SwJoint(a) => commands::sw_joint(c, a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
