//! Batch experiment runner: configuration, subcommands and their output files.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod output;

use std::path::Path;

pub use config::ExperimentConfig;
pub use output::{Check, Report, Summary};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Qmap,
    Regions,
    Chini,
    Charts,
    Branch,
    FoldSweep,
    Scaling,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Qmap => "qmap",
            Command::Regions => "regions",
            Command::Chini => "chini",
            Command::Charts => "charts",
            Command::Branch => "branch",
            Command::FoldSweep => "fold-sweep",
            Command::Scaling => "scaling",
        }
    }
}

/// Why a run did not produce a summary.
#[derive(Debug)]
pub enum Failure {
    Config(anyhow::Error),
    Numeric(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => 1,
            Failure::Numeric(_) => 2,
        }
    }

    pub fn error(&self) -> &anyhow::Error {
        match self {
            Failure::Config(e) | Failure::Numeric(e) => e,
        }
    }
}

/// Exit code of a completed run: 0 when every check passed, 3 otherwise.
pub fn summary_exit_code(s: &Summary) -> i32 {
    if s.pass {
        0
    } else {
        3
    }
}

/// Runs `cmd` on a worker pool of `jobs` threads (all cores when `None`) and
/// writes its files into `out`.
pub fn run(
    cmd: Command,
    cfg: &ExperimentConfig,
    out: &Path,
    jobs: Option<usize>,
) -> Result<Summary, Failure> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        if n == 0 {
            return Err(Failure::Config(anyhow::anyhow!("--jobs must be positive")));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| Failure::Config(e.into()))?;
    let report = pool.install(|| match cmd {
        Command::Simulate => commands::simulate(cfg),
        Command::Qmap => commands::qmap(cfg),
        Command::Regions => commands::regions(cfg),
        Command::Chini => commands::chini(cfg),
        Command::Charts => commands::charts(cfg),
        Command::Branch => commands::branch(cfg),
        Command::FoldSweep => commands::fold_sweep(cfg),
        Command::Scaling => commands::scaling(cfg),
    })?;
    report.write(out).map_err(Failure::Numeric)
}
