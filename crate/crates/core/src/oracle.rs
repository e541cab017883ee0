//! Numerical ground truth for the deviation function `J` and value `V`.
//!
//! A policy is rolled out in the true world with a fine step, the drive is
//! sampled along the trajectory, and the discounted integrals are accumulated
//! up to a horizon `T` where the remaining tail is below `horizon_tol`.
//!
//! Two quadratures are available. [`Quadrature::LeftRiemann`] is the plain
//! first-order sum `Σ γ^{t_k} g_k Δt`. [`Quadrature::ExactKernel`] integrates
//! the discount kernel exactly against the piecewise-linear drive interpolant
//! (for `J`) and the piecewise-constant finite-difference reward (for `V`);
//! since the reward is exactly the derivative of that interpolant,
//! `V = d₀ + ln γ·J` then holds up to the truncated tail.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::RunConfig;
use crate::drive::{check_gamma, drive, reward_from_transition, ExternalState, InternalDeviation, N_INTERNAL};
use crate::error::{Error, Result};
use crate::learner::LearnerState;
use crate::runlog::fmt_f64;
use crate::world::{self, admissible_actions, is_admissible, ActionSpec, WorldState};

pub const IDENTITY_HEADER: &str = "sample_id,policy_id,V,J,d0,gap";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Quadrature {
    LeftRiemann,
    #[default]
    ExactKernel,
}

/// Accumulates `∫γ^s d(s) ds` and `∫γ^s r(s) ds` over consecutive drive
/// samples spaced `dt` apart.
#[derive(Debug, Clone)]
pub struct DiscountedIntegrator {
    dt: f64,
    quadrature: Quadrature,
    /// `γ^{t_k}` of the current interval start.
    discount: f64,
    step_discount: f64,
    /// `∫₀^dt γ^s ds`
    w0: f64,
    /// `∫₀^dt s·γ^s ds / dt`
    w1: f64,
    pub j: f64,
    pub v: f64,
}

impl DiscountedIntegrator {
    pub fn new(gamma: f64, dt: f64, quadrature: Quadrature) -> Result<Self> {
        check_gamma(gamma)?;
        if !(dt > 0.0) {
            return Err(Error::NonPositiveStep(dt));
        }
        let lambda = -gamma.ln();
        let x = lambda * dt;
        let w0 = -(-x).exp_m1() / lambda;
        let w1 = (-(-x).exp_m1() - x * (-x).exp()) / (lambda * lambda) / dt;
        Ok(Self {
            dt,
            quadrature,
            discount: 1.0,
            step_discount: (-x).exp(),
            w0,
            w1,
            j: 0.0,
            v: 0.0,
        })
    }

    /// Adds the interval from drive `d_now` to `d_next`.
    pub fn push(&mut self, d_now: f64, d_next: f64) {
        let r = -(d_next - d_now) / self.dt;
        match self.quadrature {
            Quadrature::LeftRiemann => {
                self.j += self.discount * d_now * self.dt;
                self.v += self.discount * r * self.dt;
            }
            Quadrature::ExactKernel => {
                self.j += self.discount * (d_now * self.w0 + (d_next - d_now) * self.w1);
                self.v += self.discount * r * self.w0;
            }
        }
        self.discount *= self.step_discount;
    }
}

/// Time after which the discounted tail of any drive bounded by `d_max` is
/// below `tol`.
pub fn horizon(gamma: f64, d_max: f64, tol: f64) -> f64 {
    let lambda = -gamma.ln();
    ((d_max / (lambda * tol)).ln() / lambda).max(0.0)
}

/// A state-feedback policy. Implementations must return admissible actions.
pub trait Policy {
    fn id(&self) -> String;
    fn act(&mut self, state: &WorldState, cfg: &RunConfig) -> ActionSpec;
}

fn fallback(state: &WorldState, cfg: &RunConfig) -> ActionSpec {
    if is_admissible(state, ActionSpec::Rest, cfg) {
        ActionSpec::Rest
    } else {
        ActionSpec::Sleep
    }
}

/// Rests whenever allowed, sleeps otherwise.
#[derive(Debug, Clone, Default)]
pub struct RestOnly;

impl Policy for RestOnly {
    fn id(&self) -> String {
        "rest_only".into()
    }

    fn act(&mut self, state: &WorldState, cfg: &RunConfig) -> ActionSpec {
        fallback(state, cfg)
    }
}

/// Uniform over admissible actions, each choice held for `hold` time units
/// (or until it becomes inadmissible).
#[derive(Debug, Clone)]
pub struct RandomPolicy {
    seed: u64,
    hold: f64,
    rng: ChaCha8Rng,
    current: Option<(ActionSpec, f64)>,
}

impl RandomPolicy {
    pub fn new(seed: u64, hold: f64) -> Self {
        Self {
            seed,
            hold,
            rng: ChaCha8Rng::seed_from_u64(seed),
            current: None,
        }
    }
}

impl Policy for RandomPolicy {
    fn id(&self) -> String {
        format!("random_{}", self.seed)
    }

    fn act(&mut self, state: &WorldState, cfg: &RunConfig) -> ActionSpec {
        if let Some((a, until)) = self.current {
            if state.clock < until && is_admissible(state, a, cfg) {
                return a;
            }
        }
        let acts = admissible_actions(state, cfg);
        let a = acts[self.rng.gen_range(0..acts.len())];
        self.current = Some((a, state.clock + self.hold));
        a
    }
}

/// Cycles through `(action, duration)` pairs by clock time, resting when the
/// scripted action is not admissible.
#[derive(Debug, Clone)]
pub struct ScriptPolicy {
    script: Vec<(ActionSpec, f64)>,
    period: f64,
}

impl ScriptPolicy {
    pub fn new(script: Vec<(ActionSpec, f64)>) -> Self {
        let period = script.iter().map(|s| s.1).sum();
        Self { script, period }
    }

    /// Walk, turn, walk, rest, sleep.
    pub fn patrol() -> Self {
        Self::new(vec![
            (ActionSpec::Walk, 1.5),
            (ActionSpec::TurnLeft, 0.75),
            (ActionSpec::Walk, 2.0),
            (ActionSpec::TurnRight, 1.2),
            (ActionSpec::Run, 0.5),
            (ActionSpec::Rest, 1.0),
            (ActionSpec::Sleep, 1.0),
        ])
    }
}

impl Policy for ScriptPolicy {
    fn id(&self) -> String {
        "script".into()
    }

    fn act(&mut self, state: &WorldState, cfg: &RunConfig) -> ActionSpec {
        if self.script.is_empty() || !(self.period > 0.0) {
            return fallback(state, cfg);
        }
        let mut t = state.clock.rem_euclid(self.period);
        let mut chosen = self.script[self.script.len() - 1].0;
        for &(a, d) in &self.script {
            if t < d {
                chosen = a;
                break;
            }
            t -= d;
        }
        if is_admissible(state, chosen, cfg) {
            chosen
        } else {
            fallback(state, cfg)
        }
    }
}

/// Greedy (ε = 0) choices of a learner, re-decided every `period` time units.
pub struct GreedyPolicy<'a> {
    learner: &'a LearnerState,
    period: f64,
    current: Option<(ActionSpec, f64)>,
}

impl<'a> GreedyPolicy<'a> {
    pub fn new(learner: &'a LearnerState, period: f64) -> Self {
        Self {
            learner,
            period,
            current: None,
        }
    }
}

impl Policy for GreedyPolicy<'_> {
    fn id(&self) -> String {
        "greedy".into()
    }

    fn act(&mut self, state: &WorldState, cfg: &RunConfig) -> ActionSpec {
        if let Some((a, until)) = self.current {
            if state.clock < until && is_admissible(state, a, cfg) {
                return a;
            }
        }
        let a = self.learner.greedy_action(state, self.period, cfg);
        self.current = Some((a, state.clock + self.period * (1.0 - 1e-9)));
        a
    }
}

/// Policies nameable without borrowing anything.
#[derive(Debug, Clone, PartialEq)]
pub enum PolicySpec {
    RestOnly,
    Random { seed: u64, hold: f64 },
    Script(Vec<(ActionSpec, f64)>),
}

impl PolicySpec {
    pub fn build(&self) -> Box<dyn Policy> {
        match self {
            PolicySpec::RestOnly => Box::new(RestOnly),
            PolicySpec::Random { seed, hold } => Box::new(RandomPolicy::new(*seed, *hold)),
            PolicySpec::Script(s) => Box::new(ScriptPolicy::new(s.clone())),
        }
    }

    pub fn patrol() -> Self {
        PolicySpec::Script(ScriptPolicy::patrol().script)
    }
}

/// Oracle evaluation settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleSettings {
    pub gamma: f64,
    pub dt: f64,
    pub horizon_tol: f64,
    pub quadrature: Quadrature,
}

impl OracleSettings {
    pub fn from_config(cfg: &RunConfig) -> Self {
        Self {
            gamma: cfg.gamma,
            dt: cfg.dt_oracle,
            horizon_tol: cfg.horizon_tol,
            quadrature: Quadrature::default(),
        }
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rollout {
    pub v: f64,
    pub j: f64,
    pub d0: f64,
    pub steps: usize,
    pub end: WorldState,
}

/// Rolls `policy` out from `start` and integrates both `J` and `V`.
pub fn rollout(start: &WorldState, policy: &mut dyn Policy, settings: &OracleSettings, cfg: &RunConfig) -> Result<Rollout> {
    let mut integ = DiscountedIntegrator::new(settings.gamma, settings.dt, settings.quadrature)?;
    let mut fine = cfg.clone();
    fine.dt = settings.dt;
    let t_end = horizon(settings.gamma, cfg.drive_max(), settings.horizon_tol);
    let steps = (t_end / settings.dt).ceil() as usize;

    let mut state = *start;
    let d0 = drive(&state.zeta.delta, 0.0);
    let mut d_now = d0;
    for _ in 0..steps {
        let a = policy.act(&state, &fine);
        let next = world::step(&state, a, &fine)?;
        let d_next = drive(&next.zeta.delta, 0.0);
        integ.push(d_now, d_next);
        d_now = d_next;
        state = next;
    }
    Ok(Rollout {
        v: integ.v,
        j: integ.j,
        d0,
        steps,
        end: state,
    })
}

/// `J^π(start)`: discounted integral of the drive.
pub fn evaluate_j(start: &WorldState, policy: &mut dyn Policy, settings: &OracleSettings, cfg: &RunConfig) -> Result<f64> {
    Ok(rollout(start, policy, settings, cfg)?.j)
}

/// `V^π(start)`: discounted integral of the finite-difference reward.
pub fn evaluate_v(start: &WorldState, policy: &mut dyn Policy, settings: &OracleSettings, cfg: &RunConfig) -> Result<f64> {
    Ok(rollout(start, policy, settings, cfg)?.v)
}

/// Reward sequence helper: the reward of one transition in the oracle's
/// discretization (kept for callers that want per-step rewards).
pub fn step_reward(prev: &WorldState, next: &WorldState, dt: f64) -> Result<f64> {
    reward_from_transition(&prev.zeta.delta, &next.zeta.delta, dt, 0.0)
}

/// A uniformly random awake start: pose inside the arena, resource levels in
/// `[0, x_max]`, muscle fatigue below the walk threshold and sleep fatigue
/// below the forced-sleep threshold.
pub fn random_start<R: Rng>(rng: &mut R, cfg: &RunConfig) -> WorldState {
    let (lo, hi) = cfg.arena.bounding_box();
    let (x, y) = loop {
        let p = [rng.gen_range(lo[0]..hi[0]), rng.gen_range(lo[1]..hi[1])];
        if cfg.arena.contains(p) {
            break (p[0], p[1]);
        }
    };
    let heading = rng.gen_range(0.0..std::f64::consts::TAU);
    let mut delta = [0.0; N_INTERNAL];
    for (i, d) in delta.iter_mut().enumerate().take(4) {
        *d = rng.gen_range(0.0..cfg.x_max) - cfg.x_star[i];
    }
    delta[4] = rng.gen_range(0.0..cfg.walk_block) - cfg.x_star[4];
    delta[5] = rng.gen_range(0.0..cfg.forced_sleep) - cfg.x_star[5];
    WorldState::at(InternalDeviation(delta), ExternalState::new(x, y, heading))
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentitySample {
    pub sample_id: usize,
    pub start: WorldState,
    pub policy: PolicySpec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityRow {
    pub sample_id: usize,
    pub policy_id: String,
    pub v: f64,
    pub j: f64,
    pub d0: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport {
    pub gamma: f64,
    pub rows: Vec<IdentityRow>,
    pub max_gap: f64,
}

impl IdentityReport {
    /// Every row satisfies `gap ≤ rel_tol·(1 + |V|)`.
    pub fn within(&self, rel_tol: f64) -> bool {
        self.rows.iter().all(|r| r.gap <= rel_tol * (1.0 + r.v.abs()))
    }

    /// Pairs from the same start whose `V` differ by more than `tol`, and how
    /// many of them have the opposite `J` ordering.
    pub fn ordering(&self, tol: f64) -> (usize, usize) {
        let mut qualifying = 0;
        let mut reversed = 0;
        for (i, a) in self.rows.iter().enumerate() {
            for b in &self.rows[i + 1..] {
                if a.sample_id != b.sample_id {
                    continue;
                }
                let (hi, lo) = if a.v > b.v { (a, b) } else { (b, a) };
                if hi.v - lo.v > tol {
                    qualifying += 1;
                    if hi.j < lo.j {
                        reversed += 1;
                    }
                }
            }
        }
        (qualifying, reversed)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{IDENTITY_HEADER}")?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                r.sample_id,
                r.policy_id,
                fmt_f64(r.v),
                fmt_f64(r.j),
                fmt_f64(r.d0),
                fmt_f64(r.gap)
            )?;
        }
        Ok(())
    }
}

/// Evaluates `V`, `J` and the identity gap `|V − d₀ − ln γ·J|` per sample.
pub fn identity_report(samples: &[IdentitySample], settings: &OracleSettings, cfg: &RunConfig) -> Result<IdentityReport> {
    if samples.is_empty() {
        return Err(Error::invalid("samples", "need at least one sample"));
    }
    let ln_gamma = settings.gamma.ln();
    let mut rows = Vec::with_capacity(samples.len());
    for s in samples {
        let mut policy = s.policy.build();
        let out = rollout(&s.start, policy.as_mut(), settings, cfg)?;
        rows.push(IdentityRow {
            sample_id: s.sample_id,
            policy_id: policy.id(),
            v: out.v,
            j: out.j,
            d0: out.d0,
            gap: (out.v - out.d0 - ln_gamma * out.j).abs(),
        });
    }
    let max_gap = rows.iter().map(|r| r.gap).fold(0.0, f64::max);
    Ok(IdentityReport {
        gamma: settings.gamma,
        rows,
        max_gap,
    })
}

/// `n_starts` seeded random starts × {rest-only, random, scripted patrol}.
pub fn standard_samples(n_starts: usize, seed: u64, cfg: &RunConfig) -> Vec<IdentitySample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(3 * n_starts);
    for id in 0..n_starts {
        let start = random_start(&mut rng, cfg);
        for policy in [
            PolicySpec::RestOnly,
            PolicySpec::Random {
                seed: seed.wrapping_mul(31).wrapping_add(id as u64),
                hold: 0.25,
            },
            PolicySpec::patrol(),
        ] {
            out.push(IdentitySample {
                sample_id: id,
                start,
                policy,
            });
        }
    }
    out
}
