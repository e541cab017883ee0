//! Ground-truth environment.
//!
//! The world evolves as `ζ′ = ζ + (A(ζ) + u)·Δt` followed by clipping and wall
//! handling. `A` is the body's self-regulation (resource decay, muscle
//! recovery); `u` is the control of the chosen action. The learner only sees
//! the resulting states, never `A` or `u`'s effect directly.

mod arena;

use std::fmt;

pub use arena::{distance, in_view, Arena, Point, ResourceSite};

use crate::config::RunConfig;
use crate::drive::{wrap_angle, ExternalState, InternalDeviation, Zeta, N_INTERNAL, ZETA_DIM};
use crate::error::{Error, Result};

const MUSCLE: usize = InternalDeviation::MUSCLE;
const SLEEP: usize = InternalDeviation::SLEEP;

/// The elementary actions. Declaration order is the tie-break order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ActionSpec {
    Walk,
    Run,
    TurnLeft,
    TurnRight,
    /// Consume resource `i` (1-based).
    Consume(u8),
    Rest,
    Sleep,
}

impl ActionSpec {
    pub const COUNT: usize = 10;

    pub const ALL: [ActionSpec; Self::COUNT] = [
        ActionSpec::Walk,
        ActionSpec::Run,
        ActionSpec::TurnLeft,
        ActionSpec::TurnRight,
        ActionSpec::Consume(1),
        ActionSpec::Consume(2),
        ActionSpec::Consume(3),
        ActionSpec::Consume(4),
        ActionSpec::Rest,
        ActionSpec::Sleep,
    ];

    pub fn index(self) -> usize {
        match self {
            ActionSpec::Walk => 0,
            ActionSpec::Run => 1,
            ActionSpec::TurnLeft => 2,
            ActionSpec::TurnRight => 3,
            ActionSpec::Consume(i) => 3 + i as usize,
            ActionSpec::Rest => 8,
            ActionSpec::Sleep => 9,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ActionSpec::Walk => "walk",
            ActionSpec::Run => "run",
            ActionSpec::TurnLeft => "turn_left",
            ActionSpec::TurnRight => "turn_right",
            ActionSpec::Consume(1) => "consume_1",
            ActionSpec::Consume(2) => "consume_2",
            ActionSpec::Consume(3) => "consume_3",
            ActionSpec::Consume(4) => "consume_4",
            ActionSpec::Consume(_) => "consume_invalid",
            ActionSpec::Rest => "rest",
            ActionSpec::Sleep => "sleep",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.name() == name)
    }
}

impl fmt::Display for ActionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Instantaneous control `u`, in flattened `ζ` order.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ControlVector(pub [f64; ZETA_DIM]);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorldState {
    pub zeta: Zeta,
    pub sleep_lock_remaining: f64,
    pub clock: f64,
}

impl WorldState {
    /// At the set point, at the configured start pose, awake.
    pub fn initial(cfg: &RunConfig) -> Self {
        Self::at(InternalDeviation::zero(), cfg.start)
    }

    pub fn at(delta: InternalDeviation, pose: ExternalState) -> Self {
        Self {
            zeta: Zeta {
                delta,
                external: pose,
            },
            sleep_lock_remaining: 0.0,
            clock: 0.0,
        }
    }

    /// Body level `x_i = δ_i + x*_i`.
    pub fn level(&self, i: usize, cfg: &RunConfig) -> f64 {
        self.zeta.delta.0[i] + cfg.x_star[i]
    }
}

pub fn is_admissible(state: &WorldState, action: ActionSpec, cfg: &RunConfig) -> bool {
    let muscle = state.level(MUSCLE, cfg);
    let sleepy = state.level(SLEEP, cfg);
    if sleepy >= cfg.forced_sleep || state.sleep_lock_remaining > 0.0 {
        return action == ActionSpec::Sleep;
    }
    match action {
        ActionSpec::Walk => muscle < cfg.walk_block,
        ActionSpec::Run => muscle < cfg.run_block,
        ActionSpec::Consume(i) => {
            let pos = state.zeta.external.position();
            cfg.sites
                .iter()
                .any(|s| s.resource_index == i as usize && s.reaches(pos))
        }
        ActionSpec::TurnLeft | ActionSpec::TurnRight | ActionSpec::Rest | ActionSpec::Sleep => true,
    }
}

/// Admissible actions in tie-break order. Never empty: sleep is always allowed.
pub fn admissible_actions(state: &WorldState, cfg: &RunConfig) -> Vec<ActionSpec> {
    ActionSpec::ALL
        .into_iter()
        .filter(|&a| is_admissible(state, a, cfg))
        .collect()
}

pub fn control_of_action(state: &WorldState, action: ActionSpec, cfg: &RunConfig) -> Result<ControlVector> {
    if !is_admissible(state, action, cfg) {
        return Err(Error::Inadmissible(action));
    }
    Ok(control_unchecked(&state.zeta, action, cfg))
}

/// Control of `action` at `zeta` without the admissibility check.
pub fn control_unchecked(zeta: &Zeta, action: ActionSpec, cfg: &RunConfig) -> ControlVector {
    let mut u = [0.0; ZETA_DIM];
    let theta = zeta.external.heading;
    let mut locomotion = |speed: f64, fatigue: f64, cost: f64| {
        for r in u.iter_mut().take(4) {
            *r = -cost;
        }
        u[MUSCLE] = fatigue;
        u[SLEEP] = cfg.sigma_wake;
        u[6] = speed * theta.cos();
        u[7] = speed * theta.sin();
    };
    match action {
        ActionSpec::Walk => locomotion(cfg.v_walk, cfg.kappa_walk, cfg.rho_walk),
        ActionSpec::Run => locomotion(cfg.v_run, cfg.kappa_run, cfg.rho_run),
        ActionSpec::TurnLeft => {
            u[SLEEP] = cfg.sigma_wake;
            u[8] = cfg.omega;
        }
        ActionSpec::TurnRight => {
            u[SLEEP] = cfg.sigma_wake;
            u[8] = -cfg.omega;
        }
        ActionSpec::Consume(i) => {
            if (1..=4).contains(&i) {
                u[i as usize - 1] = cfg.m_consume;
            }
            u[SLEEP] = cfg.sigma_wake;
        }
        ActionSpec::Rest => u[SLEEP] = cfg.sigma_wake,
        ActionSpec::Sleep => u[SLEEP] = -cfg.sigma_sleep,
    }
    ControlVector(u)
}

/// Self-regulation `A(ζ)`: resource decay toward zero and muscle recovery.
pub fn autonomous_drift(zeta: &Zeta, cfg: &RunConfig) -> [f64; ZETA_DIM] {
    let mut a = [0.0; ZETA_DIM];
    let delta = &zeta.delta.0;
    for i in 0..4 {
        a[i] = -cfg.decay[i] * (delta[i] + cfg.x_star[i]);
    }
    a[MUSCLE] = -cfg.r_muscle * (delta[MUSCLE] + cfg.x_star[MUSCLE]);
    a
}

/// True dynamics `f(ζ, u) = A(ζ) + u`.
pub fn true_f(zeta: &Zeta, u: &ControlVector, cfg: &RunConfig) -> [f64; ZETA_DIM] {
    let mut f = autonomous_drift(zeta, cfg);
    for (fi, ui) in f.iter_mut().zip(u.0.iter()) {
        *fi += ui;
    }
    f
}

/// One Euler step of the true world under `action`.
pub fn step(state: &WorldState, action: ActionSpec, cfg: &RunConfig) -> Result<WorldState> {
    let u = control_of_action(state, action, cfg)?;
    Ok(step_with_control(state, action, &u, cfg))
}

fn step_with_control(state: &WorldState, action: ActionSpec, u: &ControlVector, cfg: &RunConfig) -> WorldState {
    let dt = cfg.dt;
    let f = true_f(&state.zeta, u, cfg);
    let old = state.zeta.to_array();
    let mut next = old;
    for k in 0..ZETA_DIM {
        next[k] += f[k] * dt;
    }
    next[8] = wrap_angle(next[8]);
    for (i, v) in next.iter_mut().enumerate().take(N_INTERNAL) {
        let (lo, hi) = cfg.delta_bounds(i);
        *v = v.clamp(lo, hi);
    }
    if !cfg.arena.contains([next[6], next[7]]) {
        next[6] = old[6];
        next[7] = old[7];
    }

    let mut lock = state.sleep_lock_remaining;
    if action == ActionSpec::Sleep && lock == 0.0 {
        lock = cfg.t_sleep_min;
    }
    lock -= dt;
    // accumulated round-off must not hold the agent for an extra step
    if lock <= dt * 1e-9 {
        lock = 0.0;
    }

    WorldState {
        zeta: Zeta::from_array(&next),
        sleep_lock_remaining: lock,
        clock: state.clock + dt,
    }
}
