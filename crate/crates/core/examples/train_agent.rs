//! Short training run printing the windowed summary.
//!
//! `cargo run --release --example train_agent -- 50000`

use hrrl::commands::{summarize, train_to_dir};
use hrrl::RunConfig;

fn main() -> hrrl::Result<()> {
    let mut cfg = RunConfig::default();
    cfg.steps = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(20_000);
    let dir = std::env::temp_dir().join("hrrl_train_agent");
    let out = train_to_dir(&cfg, &dir, 100)?;

    println!("{:>6} {:>10} {:>10} {:>10}", "from", "drive", "L_f", "L_J");
    for w in summarize(&out.log, 10) {
        println!("{:>6} {:>10.4} {:>10.3e} {:>10.3e}", w.first_step, w.mean_drive, w.mean_loss_f, w.mean_loss_j);
    }
    println!("anomalies {}, artifacts in {}", out.anomalies, dir.display());
    Ok(())
}
