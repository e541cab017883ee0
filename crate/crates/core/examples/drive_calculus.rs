//! Drive, reward and the value/deviation identity on a hand-built state.

use hrrl::drive::{constant_control_drive, constant_control_reward, drive, value_from_deviation};
use hrrl::{reward_from_transition, InternalDeviation};

fn main() -> hrrl::Result<()> {
    let delta = InternalDeviation([-2.0, 1.0, 0.5, -0.5, 0.0, 0.0]);
    println!("d(δ) = {:.4}", drive(&delta, 0.0));

    // one step of eating resource 1 moves δ toward the set point
    let mut after = delta;
    after.0[0] += 0.05;
    let r = reward_from_transition(&delta, &after, 0.1, 0.0)?;
    println!("reward for a 0.05 step toward the set point over Δt = 0.1: {r:.4}");

    println!("\nconstant consumption m = 1 from δ₁ = −2:");
    println!("{:>5} {:>8} {:>8}", "t", "d(t)", "r(t)");
    for k in 0..=5 {
        let t = 0.5 * k as f64;
        let d = constant_control_drive(t, 1.0, delta.as_slice());
        match constant_control_reward(t, 1.0, delta.as_slice()) {
            Ok(r) => println!("{t:>5.1} {d:>8.4} {r:>8.4}"),
            Err(e) => println!("{t:>5.1} {d:>8.4}  ({e})"),
        }
    }

    let gamma: f64 = 0.95;
    let j = 12.0;
    let v = value_from_deviation(drive(&delta, 0.0), j, gamma)?;
    println!("\nV from J = {j} at γ = {gamma}: {v:.4}");
    Ok(())
}
