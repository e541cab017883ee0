//! Finite-difference checks of both network shapes used by the learner.

use hrrl::gradcheck::{run_shape, GRAD_TOL, MIXED_TOL};
use hrrl::learner::network_sizes;
use hrrl::RunConfig;

fn main() -> hrrl::Result<()> {
    let cfg = RunConfig::default();
    let (f_sizes, j_sizes) = network_sizes(&cfg);
    for (name, sizes, mixed) in [("dynamics", &f_sizes, false), ("deviation", &j_sizes, true)] {
        let r = run_shape(sizes, 20, 1, mixed)?;
        print!("{name:<10} {sizes:?}: params {:.2e}, input {:.2e}", r.params, r.input);
        if let Some(m) = r.mixed {
            print!(", mixed {m:.2e}");
        }
        println!("  {}", if r.passed() { "ok" } else { "FAILED" });
    }
    println!("tolerances: first order {GRAD_TOL:.0e}, mixed {MIXED_TOL:.0e}");
    Ok(())
}
