//! Trains briefly, then renders the learned deviation over the maze as ASCII
//! for an agent short of resource 1. Darker glyphs mean lower `Ĵ`.

use hrrl::commands::{heatmap, heatmap_argmin, train_to_dir};
use hrrl::RunConfig;

const SHADES: &[u8] = b"@%#*+=-:. ";

fn main() -> hrrl::Result<()> {
    let mut cfg = RunConfig::default();
    cfg.steps = 20_000;
    let out = train_to_dir(&cfg, &std::env::temp_dir().join("hrrl_heatmap"), 1000)?;
    let (nx, ny) = (40, 24);
    let cells = heatmap(&out.learner.j_net, &cfg, 1, nx, ny)?;

    let inside = cells.iter().filter(|c| !c.j.is_nan());
    let (lo, hi) = inside.fold((f64::MAX, f64::MIN), |(lo, hi), c| (lo.min(c.j), hi.max(c.j)));
    for row in (0..ny).rev() {
        let line: String = (0..nx)
            .map(|col| {
                let j = cells[row * nx + col].j;
                if j.is_nan() {
                    ' '
                } else {
                    let t = ((j - lo) / (hi - lo).max(1e-12) * (SHADES.len() - 1) as f64).round();
                    SHADES[t as usize] as char
                }
            })
            .collect();
        println!("|{line}|");
    }
    if let Some(m) = heatmap_argmin(&cells) {
        println!("minimum {:.3} at ({:.2}, {:.2})", m.j, m.x, m.y);
    }
    Ok(())
}
