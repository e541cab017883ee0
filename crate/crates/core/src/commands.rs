//! The four end-to-end workflows behind the command-line tool.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::RunConfig;
use crate::drive::{drive, ExternalState, InternalDeviation, Zeta, N_INTERNAL};
use crate::error::{Error, Result};
use crate::learner::{network_sizes, train, LearnerState};
use crate::nn::FeedForwardNet;
use crate::oracle::{evaluate_j, random_start, GreedyPolicy, OracleSettings, Policy, RandomPolicy};
use crate::runlog::{fmt_f64, RunLog};
use crate::world::{self, admissible_actions, ActionSpec, Point, WorldState};

pub const RUNLOG_FILE: &str = "runlog.csv";
pub const F_NET_FILE: &str = "f_net.bin";
pub const J_NET_FILE: &str = "j_net.bin";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const SUMMARY_WINDOWS: usize = 20;
pub const SUMMARY_HEADER: &str = "window,first_step,last_step,mean_drive,mean_loss_f,mean_loss_j";
pub const HEATMAP_HEADER: &str = "x,y,J";
pub const EVAL_HEADER: &str =
    "episode,mean_drive,consume_1,consume_2,consume_3,consume_4,sleep_episodes,j_greedy,j_random";

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn finish(mut w: BufWriter<File>, path: &Path) -> Result<()> {
    w.flush().map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone)]
pub struct SummaryWindow {
    pub first_step: usize,
    pub last_step: usize,
    pub mean_drive: f64,
    pub mean_loss_f: f64,
    pub mean_loss_j: f64,
}

/// Means over `windows` consecutive equal slices of the log.
pub fn summarize(log: &RunLog, windows: usize) -> Vec<SummaryWindow> {
    let recs = log.records();
    let n = recs.len();
    if n == 0 || windows == 0 {
        return Vec::new();
    }
    let windows = windows.min(n);
    (0..windows)
        .map(|w| {
            let a = w * n / windows;
            let b = (w + 1) * n / windows;
            let s = &recs[a..b];
            let mean = |f: fn(&crate::runlog::StepRecord) -> f64| s.iter().map(f).sum::<f64>() / s.len() as f64;
            SummaryWindow {
                first_step: s[0].step,
                last_step: s[s.len() - 1].step,
                mean_drive: mean(|r| r.drive),
                mean_loss_f: mean(|r| r.loss_f),
                mean_loss_j: mean(|r| r.loss_j),
            }
        })
        .collect()
}

pub fn write_summary<W: Write>(windows: &[SummaryWindow], mut w: W) -> std::io::Result<()> {
    writeln!(w, "{SUMMARY_HEADER}")?;
    for (i, s) in windows.iter().enumerate() {
        writeln!(
            w,
            "{i},{},{},{},{},{}",
            s.first_step,
            s.last_step,
            fmt_f64(s.mean_drive),
            fmt_f64(s.mean_loss_f),
            fmt_f64(s.mean_loss_j)
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub log: RunLog,
    pub learner: LearnerState,
    pub summary: Vec<SummaryWindow>,
    pub anomalies: usize,
}

/// Trains from the configured start for `cfg.steps` steps and writes the
/// run log, both nets and the windowed summary into `out_dir`.
pub fn train_to_dir(cfg: &RunConfig, out_dir: &Path, log_every: usize) -> Result<TrainOutcome> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let trained = train(WorldState::initial(cfg), LearnerState::new(cfg), cfg.steps, cfg)?;

    let path = out_dir.join(RUNLOG_FILE);
    let mut w = create(&path)?;
    trained.log.write_csv(&mut w, log_every).map_err(|e| Error::io(&path, e))?;
    finish(w, &path)?;

    trained.learner.f_net.save(out_dir.join(F_NET_FILE))?;
    trained.learner.j_net.save(out_dir.join(J_NET_FILE))?;

    let summary = summarize(&trained.log, SUMMARY_WINDOWS);
    let path = out_dir.join(SUMMARY_FILE);
    let mut w = create(&path)?;
    write_summary(&summary, &mut w).map_err(|e| Error::io(&path, e))?;
    finish(w, &path)?;

    Ok(TrainOutcome {
        anomalies: trained.log.anomalies(),
        log: trained.log,
        learner: trained.learner,
        summary,
    })
}

/// Drive after each of `steps` uniformly random actions from the configured
/// start, seeded like the learner's exploration stream.
pub fn random_run_drives(cfg: &RunConfig, steps: usize) -> Result<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(0x5EED));
    let mut state = WorldState::initial(cfg);
    let mut out = Vec::with_capacity(steps);
    for _ in 0..steps {
        let acts = admissible_actions(&state, cfg);
        let a = acts[rng.gen_range(0..acts.len())];
        state = world::step(&state, a, cfg)?;
        out.push(drive(&state.zeta.delta, 0.0));
    }
    Ok(out)
}

/// Probe state for a heatmap cell: resource `deprived` (1-based) fully
/// depleted, every other internal variable at its set point, heading 0.
pub fn probe_zeta(cfg: &RunConfig, deprived: usize, p: Point) -> Zeta {
    let mut delta = [0.0; N_INTERNAL];
    delta[deprived - 1] = -cfg.x_star[deprived - 1];
    Zeta {
        delta: InternalDeviation(delta),
        external: ExternalState::new(p[0], p[1], 0.0),
    }
}

/// `Ĵ` at a probe point, or NaN outside the arena.
pub fn heatmap_value(learner: &LearnerState, cfg: &RunConfig, deprived: usize, p: Point) -> f64 {
    if cfg.arena.contains(p) {
        learner.deviation(&probe_zeta(cfg, deprived, p))
    } else {
        f64::NAN
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatCell {
    pub x: f64,
    pub y: f64,
    pub j: f64,
}

/// Evaluates `Ĵ` at the centres of an `nx × ny` lattice over the arena's
/// bounding box, row by row from the bottom.
pub fn heatmap(j_net: &FeedForwardNet, cfg: &RunConfig, deprived: usize, nx: usize, ny: usize) -> Result<Vec<HeatCell>> {
    if !(1..=4).contains(&deprived) {
        return Err(Error::invalid("deprived", format!("must be in 1..=4, got {deprived}")));
    }
    if nx == 0 || ny == 0 {
        return Err(Error::invalid("grid", "both dimensions must be positive"));
    }
    let (f_sizes, j_sizes) = network_sizes(cfg);
    if j_net.input_dim() != j_sizes[0] || j_net.output_dim() != 1 {
        return Err(Error::CorruptNet(format!(
            "deviation net must map {} inputs to 1 output",
            j_sizes[0]
        )));
    }
    let f_stub = FeedForwardNet::zeros(&[f_sizes[0], f_sizes[f_sizes.len() - 1]]);
    let learner = LearnerState::with_nets(f_stub, j_net.clone(), cfg);
    let (lo, hi) = cfg.arena.bounding_box();
    let mut cells = Vec::with_capacity(nx * ny);
    for iy in 0..ny {
        let y = lo[1] + (iy as f64 + 0.5) * (hi[1] - lo[1]) / ny as f64;
        for ix in 0..nx {
            let x = lo[0] + (ix as f64 + 0.5) * (hi[0] - lo[0]) / nx as f64;
            cells.push(HeatCell {
                x,
                y,
                j: heatmap_value(&learner, cfg, deprived, [x, y]),
            });
        }
    }
    Ok(cells)
}

/// In-arena cell with the smallest value.
pub fn heatmap_argmin(cells: &[HeatCell]) -> Option<HeatCell> {
    cells
        .iter()
        .filter(|c| !c.j.is_nan())
        .min_by(|a, b| a.j.total_cmp(&b.j))
        .copied()
}

pub fn write_heatmap<W: Write>(cells: &[HeatCell], mut w: W) -> std::io::Result<()> {
    writeln!(w, "{HEATMAP_HEADER}")?;
    for c in cells {
        writeln!(w, "{},{},{}", fmt_f64(c.x), fmt_f64(c.y), fmt_f64(c.j))?;
    }
    Ok(())
}

pub fn heatmap_to_file(j_net_path: &Path, cfg: &RunConfig, deprived: usize, nx: usize, ny: usize, out: &Path) -> Result<Vec<HeatCell>> {
    let net = FeedForwardNet::load(j_net_path)?;
    let cells = heatmap(&net, cfg, deprived, nx, ny)?;
    let mut w = create(out)?;
    write_heatmap(&cells, &mut w).map_err(|e| Error::io(out, e))?;
    finish(w, out)?;
    Ok(cells)
}

/// Counts from one evaluation episode.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EpisodeStats {
    pub mean_drive: f64,
    /// Maximal runs of consecutive `Consume(i)` steps, per resource.
    pub consumption: [usize; 4],
    /// Maximal runs of consecutive `Sleep` steps.
    pub sleep_episodes: usize,
}

/// Runs `policy` for `steps` agent steps from `start`.
pub fn run_episode(start: &WorldState, policy: &mut dyn Policy, steps: usize, cfg: &RunConfig) -> Result<EpisodeStats> {
    let mut stats = EpisodeStats::default();
    let mut state = *start;
    let mut prev: Option<ActionSpec> = None;
    let mut total = 0.0;
    for _ in 0..steps {
        let a = policy.act(&state, cfg);
        if prev != Some(a) {
            match a {
                ActionSpec::Consume(i) => stats.consumption[i as usize - 1] += 1,
                ActionSpec::Sleep => stats.sleep_episodes += 1,
                _ => {}
            }
        }
        state = world::step(&state, a, cfg)?;
        total += drive(&state.zeta.delta, 0.0);
        prev = Some(a);
    }
    if steps > 0 {
        stats.mean_drive = total / steps as f64;
    }
    Ok(stats)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalRow {
    pub episode: usize,
    pub stats: EpisodeStats,
    pub j_greedy: f64,
    pub j_random: f64,
}

/// Greedy rollouts of a trained learner from seeded random starts, with the
/// oracle deviation of the greedy and of a random policy from each start.
pub fn evaluate(learner: &LearnerState, cfg: &RunConfig, episodes: usize, steps: usize) -> Result<Vec<EvalRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(0xE7A1));
    let settings = OracleSettings::from_config(cfg);
    let mut rows = Vec::with_capacity(episodes);
    for episode in 0..episodes {
        let start = random_start(&mut rng, cfg);
        let stats = run_episode(&start, &mut GreedyPolicy::new(learner, cfg.dt), steps, cfg)?;
        let j_greedy = evaluate_j(&start, &mut GreedyPolicy::new(learner, cfg.dt), &settings, cfg)?;
        let mut random = RandomPolicy::new(cfg.seed.wrapping_add(episode as u64), cfg.dt);
        let j_random = evaluate_j(&start, &mut random, &settings, cfg)?;
        rows.push(EvalRow {
            episode,
            stats,
            j_greedy,
            j_random,
        });
    }
    Ok(rows)
}

pub fn write_eval<W: Write>(rows: &[EvalRow], mut w: W) -> std::io::Result<()> {
    writeln!(w, "{EVAL_HEADER}")?;
    for r in rows {
        let c = r.stats.consumption;
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            r.episode,
            fmt_f64(r.stats.mean_drive),
            c[0],
            c[1],
            c[2],
            c[3],
            r.stats.sleep_episodes,
            fmt_f64(r.j_greedy),
            fmt_f64(r.j_random)
        )?;
    }
    Ok(())
}

/// Loads both nets and writes the evaluation CSV to `out`.
pub fn eval_to_file(
    cfg: &RunConfig,
    f_net: &Path,
    j_net: &Path,
    episodes: usize,
    steps: usize,
    out: &Path,
) -> Result<Vec<EvalRow>> {
    let learner = LearnerState::with_nets(FeedForwardNet::load(f_net)?, FeedForwardNet::load(j_net)?, cfg);
    let rows = evaluate(&learner, cfg, episodes, steps)?;
    let mut w = create(out)?;
    write_eval(&rows, &mut w).map_err(|e| Error::io(out, e))?;
    finish(w, out)?;
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::RestOnly;

    #[test]
    fn constant_net_gives_flat_heatmap() {
        let cfg = RunConfig::default();
        let mut net = FeedForwardNet::zeros(&[9, 4, 1]);
        net.layers_mut()[1].biases[0] = 2.5;
        let cells = heatmap(&net, &cfg, 2, 16, 12).unwrap();
        assert_eq!(cells.len(), 16 * 12);
        let inside: Vec<_> = cells.iter().filter(|c| !c.j.is_nan()).collect();
        assert!(!inside.is_empty() && inside.len() < cells.len());
        assert!(inside.iter().all(|c| c.j == 2.5));
    }

    #[test]
    fn outside_point_is_nan() {
        let cfg = RunConfig::default();
        let learner = LearnerState::new(&cfg);
        assert!(heatmap_value(&learner, &cfg, 1, [0.5, 0.5]).is_nan());
        assert!(!heatmap_value(&learner, &cfg, 1, [5.0, 3.25]).is_nan());
    }

    #[test]
    fn heatmap_rejects_bad_arguments() {
        let cfg = RunConfig::default();
        let net = FeedForwardNet::zeros(&[9, 1]);
        assert!(heatmap(&net, &cfg, 0, 4, 4).is_err());
        assert!(heatmap(&net, &cfg, 5, 4, 4).is_err());
        assert!(heatmap(&net, &cfg, 1, 0, 4).is_err());
        assert!(heatmap(&FeedForwardNet::zeros(&[8, 1]), &cfg, 1, 4, 4).is_err());
    }

    #[test]
    fn probe_matches_deprivation() {
        let cfg = RunConfig::default();
        let z = probe_zeta(&cfg, 4, [2.0, 3.0]);
        assert_eq!(z.delta.0, [0.0, 0.0, 0.0, -4.0, 0.0, 0.0]);
        assert_eq!(z.external.heading, 0.0);
    }

    #[test]
    fn resting_never_consumes() {
        let cfg = RunConfig::default();
        let stats = run_episode(&WorldState::initial(&cfg), &mut RestOnly, 500, &cfg).unwrap();
        assert_eq!(stats.consumption, [0; 4]);
        assert!(stats.mean_drive > 0.0);
    }

    #[test]
    fn zero_episodes_is_empty() {
        let cfg = RunConfig::default();
        assert!(evaluate(&LearnerState::new(&cfg), &cfg, 0, 10).unwrap().is_empty());
    }

    #[test]
    fn summary_windows_partition_the_log() {
        let mut cfg = RunConfig::default();
        cfg.steps = 45;
        let t = train(WorldState::initial(&cfg), LearnerState::new(&cfg), cfg.steps, &cfg).unwrap();
        let s = summarize(&t.log, SUMMARY_WINDOWS);
        assert_eq!(s.len(), 20);
        assert_eq!(s[0].first_step, 0);
        assert_eq!(s[19].last_step, 44);
        for w in s.windows(2) {
            assert_eq!(w[0].last_step + 1, w[1].first_step);
        }
    }
}
