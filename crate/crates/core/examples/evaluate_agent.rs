use hrrl::commands::{evaluate, train_to_dir};
use hrrl::RunConfig;

fn main() -> hrrl::Result<()> {
    let mut cfg = RunConfig::default();
    cfg.steps = 10_000;
    cfg.dt_oracle = 1e-2;
    let out = train_to_dir(&cfg, &std::env::temp_dir().join("hrrl_eval"), 1000)?;
    let rows = evaluate(&out.learner, &cfg, 3, 500)?;
    for r in &rows {
        println!(
            "episode {}: mean drive {:.3}, consumes {:?}, sleeps {}, J greedy {:.2} vs random {:.2}",
            r.episode, r.stats.mean_drive, r.stats.consumption, r.stats.sleep_episodes, r.j_greedy, r.j_random
        );
    }
    Ok(())
}
