use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hrrl::commands::{self, F_NET_FILE, J_NET_FILE};
use hrrl::verify::{self, VerifyOptions};
use hrrl::{Result, RunConfig};

#[derive(Parser)]
#[command(name = "hrrl", version, about = "Homeostatic reinforcement learning in continuous time")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Configuration file (`key = value` lines); defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long)]
    seed: Option<u64>,
}

impl Common {
    fn load(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Train from scratch and write runlog.csv, summary.csv and both nets.
    Train {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Evaluate a trained deviation net over the arena for one deprived resource.
    Heatmap {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "out/j_net.bin")]
        j_net: PathBuf,
        #[arg(long, default_value_t = 1)]
        deprived: usize,
        #[arg(long, num_args = 2, value_names = ["NX", "NY"], default_values_t = [80, 60])]
        grid: Vec<usize>,
        /// Output CSV file.
        #[arg(long, default_value = "heatmap.csv")]
        out: PathBuf,
    },
    /// Run the identity, sign and gradient checks; exit 1 if any fails.
    Verify {
        #[command(flatten)]
        common: Common,
    },
    /// Score a trained agent with greedy rollouts from random starts.
    Eval {
        #[command(flatten)]
        common: Common,
        /// Directory holding f_net.bin and j_net.bin.
        #[arg(long, default_value = "out")]
        nets: PathBuf,
        #[arg(long, default_value_t = 10)]
        episodes: usize,
        /// Agent steps per episode.
        #[arg(long, default_value_t = 2000)]
        steps: usize,
        /// Output CSV file.
        #[arg(long, default_value = "eval.csv")]
        out: PathBuf,
    },
}

fn log_every() -> usize {
    std::env::var("HRRL_LOG_EVERY")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(1)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Train { common, out, steps } => {
            let mut cfg = common.load()?;
            if let Some(k) = steps {
                cfg.steps = k;
            }
            let o = commands::train_to_dir(&cfg, &out, log_every())?;
            if let (Some(first), Some(last)) = (o.summary.first(), o.summary.last()) {
                println!("mean drive: first window {:.4}, last window {:.4}", first.mean_drive, last.mean_drive);
            }
            println!("numeric anomalies: {}", o.anomalies);
            println!("wrote {}", out.display());
            Ok(true)
        }
        Command::Heatmap {
            common,
            j_net,
            deprived,
            grid,
            out,
        } => {
            let cfg = common.load()?;
            let cells = commands::heatmap_to_file(&j_net, &cfg, deprived, grid[0], grid[1], &out)?;
            if let Some(c) = commands::heatmap_argmin(&cells) {
                println!("minimum {:.4} at ({:.3}, {:.3})", c.j, c.x, c.y);
            }
            println!("wrote {}", out.display());
            Ok(true)
        }
        Command::Verify { common } => {
            let cfg = common.load()?;
            let report = verify::run(&cfg, &VerifyOptions::default())?;
            report.print(std::io::stdout().lock()).ok();
            Ok(report.passed())
        }
        Command::Eval {
            common,
            nets,
            episodes,
            steps,
            out,
        } => {
            let cfg = common.load()?;
            let rows = commands::eval_to_file(
                &cfg,
                &nets.join(F_NET_FILE),
                &nets.join(J_NET_FILE),
                episodes,
                steps,
                Path::new(&out),
            )?;
            let better = rows.iter().filter(|r| r.j_greedy < r.j_random).count();
            println!("greedy beats random on {better} of {} starts", rows.len());
            println!("wrote {}", out.display());
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
