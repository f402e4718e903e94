use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use foldlab_cli::{run, summary_exit_code, Command, ExperimentConfig};

#[derive(Parser)]
#[command(name = "foldlab", version, about = "Regularized fold experiments")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct Common {
    /// Experiment configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Worker threads for parameter sweeps.
    #[arg(long)]
    jobs: Option<usize>,
    /// Output directory; overrides `output_dir` of the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Integrate one trajectory.
    Simulate(Common),
    /// Sample the transition map past the fold.
    Qmap(Common),
    /// Check the three regimes of the transition map.
    Regions(Common),
    /// Property scans of the Chini section map.
    Chini(Common),
    /// Random round trips through the blowup charts.
    Charts(Common),
    /// Continue a branch of cycles of the friction oscillator.
    Branch(Common),
    /// Saddle-node of cycles for every eps, with orbits and Hausdorff distances.
    FoldSweep(Common),
    /// Log-log fit of the saddle-node gap against eps.
    Scaling(Common),
}

fn split(c: Cmd) -> (Command, Common) {
    match c {
        Cmd::Simulate(a) => (Command::Simulate, a),
        Cmd::Qmap(a) => (Command::Qmap, a),
        Cmd::Regions(a) => (Command::Regions, a),
        Cmd::Chini(a) => (Command::Chini, a),
        Cmd::Charts(a) => (Command::Charts, a),
        Cmd::Branch(a) => (Command::Branch, a),
        Cmd::FoldSweep(a) => (Command::FoldSweep, a),
        Cmd::Scaling(a) => (Command::Scaling, a),
    }
}

fn execute(cmd: Command, common: Common) -> i32 {
    let cfg = match ExperimentConfig::load(&common.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return 1;
        }
    };
    let out = common.out.unwrap_or_else(|| cfg.output_dir.clone());
    match run(cmd, &cfg, &out, common.jobs) {
        Ok(s) => {
            for c in &s.checks {
                println!(
                    "{} {}: {}",
                    if c.pass { "ok  " } else { "FAIL" },
                    c.name,
                    c.detail
                );
            }
            for f in &s.failures {
                println!("FAIL {f}");
            }
            println!("{}: {}", cmd.name(), if s.pass { "pass" } else { "fail" });
            summary_exit_code(&s)
        }
        Err(f) => {
            eprintln!("error: {:#}", f.error());
            f.exit_code()
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cmd, common) = split(cli.command);
    ExitCode::from(execute(cmd, common) as u8)
}
