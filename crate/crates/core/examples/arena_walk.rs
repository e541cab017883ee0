//! A seeded random walk through the maze, reporting where it went and what
//! it ate.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hrrl::drive::drive;
use hrrl::world::{admissible_actions, step};
use hrrl::{ActionSpec, RunConfig, WorldState};

fn main() -> hrrl::Result<()> {
    let cfg = RunConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut state = WorldState::initial(&cfg);
    let mut counts = [0usize; ActionSpec::COUNT];

    println!("{:>6} {:>6} {:>6} {:>6} {:>7}", "step", "x", "y", "θ", "drive");
    for k in 0..20_000 {
        let acts = admissible_actions(&state, &cfg);
        let a = acts[rng.gen_range(0..acts.len())];
        counts[a.index()] += 1;
        state = step(&state, a, &cfg)?;
        if k % 2000 == 0 {
            let p = state.zeta.external;
            println!("{k:>6} {:>6.2} {:>6.2} {:>6.2} {:>7.3}", p.x, p.y, p.heading, drive(&state.zeta.delta, 0.0));
        }
    }

    println!("\naction counts:");
    for a in ActionSpec::ALL {
        println!("  {:<10} {}", a.name(), counts[a.index()]);
    }
    let levels: Vec<String> = (0..6).map(|i| format!("{:.2}", state.level(i, &cfg))).collect();
    println!("final levels {}", levels.join(" "));
    Ok(())
}
