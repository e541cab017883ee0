//! HJB-residual learning of the transition model `f̂` and the deviation
//! function `Ĵ`.
//!
//! Each step the agent either explores (probability ε) or picks the
//! admissible action minimizing
//!
//! ```text
//! d(δ + f̂(ζ, u_a)·Δt) + ∂Ĵ/∂ζ(ζ) · f̂(ζ, u_a)
//! ```
//!
//! then fits `f̂` to the observed transition and takes one step on the squared
//! HJB residual `d(ζ′) + ∂Ĵ/∂ζ · f̂ + ln γ·Ĵ(ζ)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{HeadingInput, RunConfig};
use crate::drive::{drive, drive_of, reward_from_transition, wrap_angle_diff, Zeta, N_INTERNAL, ZETA_DIM};
use crate::error::{Error, Result};
use crate::nn::FeedForwardNet;
use crate::runlog::{RunLog, StepRecord};
use crate::world::{self, admissible_actions, is_admissible, ActionSpec, ControlVector, WorldState};

/// Maps `ζ` to network inputs: per-component divisors, and the heading
/// either divided by `2π` or expanded to `(cos θ, sin θ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InputScaling {
    inv: [f64; ZETA_DIM],
    heading: HeadingInput,
}

impl InputScaling {
    pub fn from_config(cfg: &RunConfig) -> Self {
        let (_, hi) = cfg.arena.bounding_box();
        let mut inv = [1.0 / cfg.x_max; ZETA_DIM];
        inv[6] = 1.0 / hi[0].abs().max(1.0);
        inv[7] = 1.0 / hi[1].abs().max(1.0);
        inv[8] = 1.0 / std::f64::consts::TAU;
        Self {
            inv,
            heading: cfg.heading_input,
        }
    }

    pub fn identity() -> Self {
        Self {
            inv: [1.0; ZETA_DIM],
            heading: HeadingInput::Linear,
        }
    }

    pub fn inverse_scales(&self) -> &[f64; ZETA_DIM] {
        &self.inv
    }

    /// Width of the encoded state.
    pub fn dim(&self) -> usize {
        match self.heading {
            HeadingInput::Linear => ZETA_DIM,
            HeadingInput::Circular => ZETA_DIM + 1,
        }
    }

    pub fn normalize(&self, zeta: &Zeta) -> Vec<f64> {
        let z = zeta.to_array();
        let mut out: Vec<f64> = z[..8].iter().zip(&self.inv).map(|(v, s)| v * s).collect();
        match self.heading {
            HeadingInput::Linear => out.push(z[8] * self.inv[8]),
            HeadingInput::Circular => out.extend([z[8].cos(), z[8].sin()]),
        }
        out
    }

    /// Encoded-input tangent of a `ζ` rate `v` at `zeta`.
    pub fn push_forward(&self, zeta: &Zeta, v: &[f64; ZETA_DIM]) -> Vec<f64> {
        let mut out: Vec<f64> = v[..8].iter().zip(&self.inv).map(|(a, s)| a * s).collect();
        match self.heading {
            HeadingInput::Linear => out.push(v[8] * self.inv[8]),
            HeadingInput::Circular => {
                let th = zeta.external.heading;
                out.extend([-th.sin() * v[8], th.cos() * v[8]]);
            }
        }
        out
    }

    /// Gradient with respect to `ζ` from a gradient with respect to the
    /// encoded input.
    pub fn pull_back(&self, zeta: &Zeta, g: &[f64]) -> [f64; ZETA_DIM] {
        let mut out = [0.0; ZETA_DIM];
        for k in 0..8 {
            out[k] = g[k] * self.inv[k];
        }
        out[8] = match self.heading {
            HeadingInput::Linear => g[8] * self.inv[8],
            HeadingInput::Circular => {
                let th = zeta.external.heading;
                -th.sin() * g[8] + th.cos() * g[9]
            }
        };
        out
    }

    /// Network input for `f̂`: encoded `ζ` followed by the raw control.
    pub fn model_input(&self, zeta: &Zeta, u: &ControlVector) -> Vec<f64> {
        let mut input = self.normalize(zeta);
        input.extend_from_slice(&u.0);
        input
    }
}

/// Layer sizes of `(f̂, Ĵ)`: `f̂` maps the encoded state and the control to a
/// `ζ` rate, `Ĵ` maps the encoded state to a scalar.
pub fn network_sizes(cfg: &RunConfig) -> (Vec<usize>, Vec<usize>) {
    let n = InputScaling::from_config(cfg).dim();
    let mut f = vec![n + ZETA_DIM];
    f.extend(&cfg.f_hidden);
    f.push(ZETA_DIM);
    let mut j = vec![n];
    j.extend(&cfg.j_hidden);
    j.push(1);
    (f, j)
}

/// Linear decay from `start` to `end` over the first half of `total` steps.
pub fn epsilon_at(step: usize, total: usize, start: f64, end: f64) -> f64 {
    let half = total as f64 / 2.0;
    if half <= 0.0 || step as f64 >= half {
        return end;
    }
    start + (end - start) * (step as f64 / half)
}

#[derive(Debug, Clone)]
pub struct LearnerState {
    pub f_net: FeedForwardNet,
    pub j_net: FeedForwardNet,
    pub epsilon: f64,
    pub gamma: f64,
    pub lr_f: f64,
    pub lr_j: f64,
    pub rng_seed: u64,
    pub step_count: usize,
    pub scaling: InputScaling,
    rng: ChaCha8Rng,
}

/// Outcome of one network update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Update {
    /// Loss before the step.
    pub loss: f64,
    /// `false` when the loss or gradient was non-finite and the step was skipped.
    pub applied: bool,
}

impl LearnerState {
    /// Fresh random networks sized by the configuration.
    pub fn new(cfg: &RunConfig) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let (f_sizes, j_sizes) = network_sizes(cfg);
        let f_net = FeedForwardNet::new_random(&f_sizes, &mut rng);
        let j_net = FeedForwardNet::new_random(&j_sizes, &mut rng);
        Self::with_nets(f_net, j_net, cfg)
    }

    pub fn with_nets(f_net: FeedForwardNet, j_net: FeedForwardNet, cfg: &RunConfig) -> Self {
        Self {
            f_net,
            j_net,
            epsilon: cfg.eps_start,
            gamma: cfg.gamma,
            lr_f: cfg.lr_f,
            lr_j: cfg.lr_j,
            rng_seed: cfg.seed,
            step_count: 0,
            scaling: InputScaling::from_config(cfg),
            // separate stream from the initializer
            rng: ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(0x5EED)),
        }
    }

    pub fn rng_mut(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// `f̂(ζ, u)` in raw rate units.
    pub fn predict_rate(&self, zeta: &Zeta, u: &ControlVector) -> [f64; ZETA_DIM] {
        let out = self
            .f_net
            .forward(&self.scaling.model_input(zeta, u))
            .expect("model net shape fixed at construction");
        let mut f = [0.0; ZETA_DIM];
        f.copy_from_slice(&out);
        f
    }

    /// `Ĵ(ζ)`.
    pub fn deviation(&self, zeta: &Zeta) -> f64 {
        self.j_net
            .forward(&self.scaling.normalize(zeta))
            .expect("deviation net shape fixed at construction")[0]
    }

    /// `(Ĵ(ζ), ∂Ĵ/∂ζ)` with the input scaling chained back out.
    pub fn deviation_and_gradient(&self, zeta: &Zeta) -> (f64, [f64; ZETA_DIM]) {
        let (j, g) = self
            .j_net
            .value_and_input_grad(&self.scaling.normalize(zeta))
            .expect("deviation net shape fixed at construction");
        (j, self.scaling.pull_back(zeta, &g))
    }

    fn minimand_with_gradient(
        &self,
        zeta: &Zeta,
        grad_j: &[f64; ZETA_DIM],
        action: ActionSpec,
        dt: f64,
        cfg: &RunConfig,
    ) -> f64 {
        let u = world::control_unchecked(zeta, action, cfg);
        let f = self.predict_rate(zeta, &u);
        let mut next = [0.0; N_INTERNAL];
        for i in 0..N_INTERNAL {
            next[i] = zeta.delta.0[i] + f[i] * dt;
        }
        let slope: f64 = grad_j.iter().zip(&f).map(|(g, fi)| g * fi).sum();
        drive_of(&next, cfg.eps_smooth) + slope
    }

    /// The quantity minimized by greedy action selection.
    pub fn hjb_minimand(&self, state: &WorldState, action: ActionSpec, dt: f64, cfg: &RunConfig) -> Result<f64> {
        if !is_admissible(state, action, cfg) {
            return Err(Error::Inadmissible(action));
        }
        let (_, grad) = self.deviation_and_gradient(&state.zeta);
        Ok(self.minimand_with_gradient(&state.zeta, &grad, action, dt, cfg))
    }

    /// Minimand of every admissible action, in tie-break order.
    pub fn minimands(&self, state: &WorldState, dt: f64, cfg: &RunConfig) -> Vec<(ActionSpec, f64)> {
        let (_, grad) = self.deviation_and_gradient(&state.zeta);
        admissible_actions(state, cfg)
            .into_iter()
            .map(|a| (a, self.minimand_with_gradient(&state.zeta, &grad, a, dt, cfg)))
            .collect()
    }

    /// Admissible argmin of the minimand; the earliest action wins ties and
    /// NaN values never win.
    pub fn greedy_action(&self, state: &WorldState, dt: f64, cfg: &RunConfig) -> ActionSpec {
        let mut best: Option<(ActionSpec, f64)> = None;
        for (a, v) in self.minimands(state, dt, cfg) {
            match best {
                None => best = Some((a, v)),
                Some((_, bv)) if v < bv || (bv.is_nan() && !v.is_nan()) => best = Some((a, v)),
                _ => {}
            }
        }
        best.map(|(a, _)| a).unwrap_or(ActionSpec::Sleep)
    }

    /// ε-greedy choice using the learner's own seeded generator.
    pub fn select_action(&mut self, state: &WorldState, dt: f64, cfg: &RunConfig) -> ActionSpec {
        let explore = self.rng.gen::<f64>() < self.epsilon;
        if explore {
            let acts = admissible_actions(state, cfg);
            acts[self.rng.gen_range(0..acts.len())]
        } else {
            self.greedy_action(state, dt, cfg)
        }
    }

    /// One descent step on `L_f = |ζ′ − ζ − f̂(ζ, u)Δt|²` (heading residual wrapped).
    pub fn update_f(&mut self, zeta_k: &Zeta, u_k: &ControlVector, zeta_next: &Zeta, dt: f64) -> Result<Update> {
        if !(dt > 0.0) {
            return Err(Error::NonPositiveStep(dt));
        }
        let input = self.scaling.model_input(zeta_k, u_k);
        let f = self.f_net.forward(&input)?;
        let before = zeta_k.to_array();
        let after = zeta_next.to_array();
        let mut residual = [0.0; ZETA_DIM];
        for k in 0..ZETA_DIM {
            let change = if k == 8 {
                wrap_angle_diff(after[k] - before[k])
            } else {
                after[k] - before[k]
            };
            residual[k] = change - f[k] * dt;
        }
        let loss: f64 = residual.iter().map(|r| r * r).sum();
        if !loss.is_finite() {
            return Ok(Update { loss, applied: false });
        }
        let cot: Vec<f64> = residual.iter().map(|r| -2.0 * dt * r).collect();
        let grads = self.f_net.grad_params(&input, &cot)?;
        let applied = match self.f_net.sgd_step(&grads, self.lr_f) {
            Ok(()) => true,
            Err(Error::NonFiniteGradient) => false,
            Err(e) => return Err(e),
        };
        Ok(Update { loss, applied })
    }

    /// HJB residual `d(ζ′) + ∂Ĵ/∂ζ(ζ)·f̂(ζ, u) + ln γ·Ĵ(ζ)` with the current `f̂`.
    pub fn hjb_residual(&self, zeta_k: &Zeta, u_k: &ControlVector, zeta_next: &Zeta, eps_smooth: f64) -> f64 {
        let f = self.predict_rate(zeta_k, u_k);
        let (j, grad) = self.deviation_and_gradient(zeta_k);
        let slope: f64 = grad.iter().zip(&f).map(|(g, fi)| g * fi).sum();
        drive(&zeta_next.delta, eps_smooth) + slope + self.gamma.ln() * j
    }

    /// One descent step on the squared HJB residual with respect to `Ĵ`'s
    /// weights. `f̂` is held fixed; the gradient flows through both `Ĵ(ζ)`
    /// and `∂Ĵ/∂ζ(ζ)`.
    pub fn update_j(&mut self, zeta_k: &Zeta, u_k: &ControlVector, zeta_next: &Zeta, eps_smooth: f64) -> Result<Update> {
        let f = self.predict_rate(zeta_k, u_k);
        // ∂Ĵ/∂ζ · f̂ is the net's slope along the encoded tangent of f̂
        let direction = self.scaling.push_forward(zeta_k, &f);
        let input = self.scaling.normalize(zeta_k);
        let ln_gamma = self.gamma.ln();
        let d_next = drive(&zeta_next.delta, eps_smooth);

        let (j, slope, _) = self.j_net.directional_grad_params(&input, &direction, &[0.0], &[0.0])?;
        let residual = d_next + slope[0] + ln_gamma * j[0];
        let loss = residual * residual;
        if !loss.is_finite() {
            return Ok(Update { loss, applied: false });
        }
        let (_, _, grads) = self.j_net.directional_grad_params(
            &input,
            &direction,
            &[2.0 * residual * ln_gamma],
            &[2.0 * residual],
        )?;
        let applied = match self.j_net.sgd_step(&grads, self.lr_j) {
            Ok(()) => true,
            Err(Error::NonFiniteGradient) => false,
            Err(e) => return Err(e),
        };
        Ok(Update { loss, applied })
    }
}

/// Result of a training run.
#[derive(Debug, Clone)]
pub struct Trained {
    pub world: WorldState,
    pub learner: LearnerState,
    pub log: RunLog,
}

/// Runs `steps` iterations of select → act → fit `f̂` → fit `Ĵ` in one
/// continuous lifetime. ε follows [`epsilon_at`] between the configured
/// start and end values.
pub fn train(world: WorldState, learner: LearnerState, steps: usize, cfg: &RunConfig) -> Result<Trained> {
    train_with(world, learner, steps, cfg, |_| {})
}

/// [`train`] with a callback invoked on each record as it is produced.
pub fn train_with<F: FnMut(&StepRecord)>(
    mut world: WorldState,
    mut learner: LearnerState,
    steps: usize,
    cfg: &RunConfig,
    mut on_record: F,
) -> Result<Trained> {
    if steps == 0 {
        return Err(Error::invalid("steps", "must be at least 1"));
    }
    let mut log = RunLog::with_capacity(steps);
    for k in 0..steps {
        learner.epsilon = epsilon_at(k, steps, cfg.eps_start, cfg.eps_end);
        let action = learner.select_action(&world, cfg.dt, cfg);
        let u = world::control_of_action(&world, action, cfg)?;
        let next = world::step(&world, action, cfg)?;

        let fu = learner.update_f(&world.zeta, &u, &next.zeta, cfg.dt)?;
        let ju = learner.update_j(&world.zeta, &u, &next.zeta, cfg.eps_smooth)?;
        learner.step_count += 1;

        let record = StepRecord {
            step: k,
            clock: next.clock,
            zeta: next.zeta.to_array(),
            action,
            drive: drive(&next.zeta.delta, 0.0),
            reward: reward_from_transition(&world.zeta.delta, &next.zeta.delta, cfg.dt, 0.0)?,
            loss_f: fu.loss,
            loss_j: ju.loss,
            epsilon: learner.epsilon,
            skipped: u8::from(!fu.applied) + u8::from(!ju.applied),
        };
        on_record(&record);
        log.push(record);
        world = next;
    }
    Ok(Trained {
        world,
        learner,
        log,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drive::{ExternalState, InternalDeviation};
    use crate::nn::Dense;

    /// Minimand with `Ĵ ≡ 0` evaluated from the true dynamics.
    fn exact_minimand(state: &WorldState, action: ActionSpec, cfg: &RunConfig) -> f64 {
        let u = world::control_unchecked(&state.zeta, action, cfg);
        let f = world::true_f(&state.zeta, &u, cfg);
        let next: Vec<f64> = (0..6).map(|i| state.zeta.delta.0[i] + f[i] * cfg.dt).collect();
        drive_of(&next, cfg.eps_smooth)
    }

    fn zero_learner(cfg: &RunConfig) -> LearnerState {
        let f = FeedForwardNet::zeros(&[18, 8, 9]);
        let j = FeedForwardNet::zeros(&[9, 8, 1]);
        LearnerState::with_nets(f, j, cfg)
    }

    /// `true_f` is affine in `(ζ, u)`, so a single linear layer reproduces it
    /// exactly.
    fn linear_exact_model(cfg: &RunConfig) -> FeedForwardNet {
        let scaling = InputScaling::from_config(cfg);
        let mut layer = Dense {
            n_in: 18,
            n_out: 9,
            weights: vec![0.0; 18 * 9],
            biases: vec![0.0; 9],
        };
        // A_i = −c_i(δ_i + x*_i) ⇒ weight on normalized δ_i is −c_i / inv_i
        for i in 0..4 {
            layer.weights[i * 18 + i] = -cfg.decay[i] / scaling.inverse_scales()[i];
            layer.biases[i] = -cfg.decay[i] * cfg.x_star[i];
        }
        layer.weights[4 * 18 + 4] = -cfg.r_muscle / scaling.inverse_scales()[4];
        layer.biases[4] = -cfg.r_muscle * cfg.x_star[4];
        for k in 0..9 {
            layer.weights[k * 18 + 9 + k] = 1.0;
        }
        FeedForwardNet::from_layers(vec![layer]).unwrap()
    }

    fn state(levels_delta: [f64; 6], x: f64, y: f64) -> WorldState {
        WorldState::at(InternalDeviation(levels_delta), ExternalState::new(x, y, 0.0))
    }

    #[test]
    fn linear_model_reproduces_true_dynamics() {
        let cfg = RunConfig::default();
        let ls = LearnerState::with_nets(linear_exact_model(&cfg), FeedForwardNet::zeros(&[9, 1]), &cfg);
        let s = state([-0.5, 0.3, -1.0, 2.0, 1.5, 0.7], 4.5, 1.5);
        for a in admissible_actions(&s, &cfg) {
            let u = world::control_unchecked(&s.zeta, a, &cfg);
            let f = world::true_f(&s.zeta, &u, &cfg);
            let g = ls.predict_rate(&s.zeta, &u);
            for k in 0..9 {
                assert!((f[k] - g[k]).abs() < 1e-12, "{a} {k}");
            }
        }
    }

    #[test]
    fn deprived_agent_on_site_prefers_consuming() {
        let cfg = RunConfig::default();
        let ls = LearnerState::with_nets(linear_exact_model(&cfg), FeedForwardNet::zeros(&[9, 1]), &cfg);
        let s = state([-1.0, 0.0, 0.0, 0.0, 0.0, 0.0], 1.5, 4.25);
        // oracle: enumerate with the true dynamics
        let mut best = (ActionSpec::Sleep, f64::INFINITY);
        for a in admissible_actions(&s, &cfg) {
            let v = exact_minimand(&s, a, &cfg);
            assert!((v - ls.hjb_minimand(&s, a, cfg.dt, &cfg).unwrap()).abs() < 1e-12);
            if v < best.1 {
                best = (a, v);
            }
        }
        assert_eq!(best.0, ActionSpec::Consume(1));
        let mut ls = ls;
        ls.epsilon = 0.0;
        assert_eq!(ls.select_action(&s, cfg.dt, &cfg), ActionSpec::Consume(1));
        assert!(ls.hjb_minimand(&s, ActionSpec::Consume(2), cfg.dt, &cfg).is_err());
    }

    #[test]
    fn at_set_point_sleep_is_not_the_minimizer() {
        // With sleep fatigue at its set point, sleeping predicts a negative
        // sleep deviation of σ_sleep·Δt, which costs more drive than the
        // σ_wake·Δt of staying awake; turning and resting tie for the minimum.
        let cfg = RunConfig::default();
        let ls = LearnerState::with_nets(linear_exact_model(&cfg), FeedForwardNet::zeros(&[9, 1]), &cfg);
        let s = state([0.0; 6], 5.0, 3.25);
        let values: Vec<_> = ls.minimands(&s, cfg.dt, &cfg);
        let min = values.iter().map(|v| v.1).fold(f64::INFINITY, f64::min);
        let sleep = values.iter().find(|v| v.0 == ActionSpec::Sleep).unwrap().1;
        assert!(sleep > min);
        for (a, v) in &values {
            if matches!(a, ActionSpec::TurnLeft | ActionSpec::TurnRight | ActionSpec::Rest) {
                assert_eq!(*v, min);
            }
        }
        assert_eq!(ls.greedy_action(&s, cfg.dt, &cfg), ActionSpec::TurnLeft);

        // once sleep fatigue has accumulated, sleeping is the minimizer
        let tired = state([0.0, 0.0, 0.0, 0.0, 0.0, 1.0], 5.0, 3.25);
        assert_eq!(ls.greedy_action(&tired, cfg.dt, &cfg), ActionSpec::Sleep);
    }

    #[test]
    fn zero_model_makes_every_action_tie() {
        let cfg = RunConfig::default();
        let mut ls = zero_learner(&cfg);
        ls.epsilon = 0.0;
        let s = state([-0.4, 0.2, 0.0, 1.0, 0.5, 0.5], 5.0, 3.25);
        let d = drive(&s.zeta.delta, cfg.eps_smooth);
        for (_, v) in ls.minimands(&s, cfg.dt, &cfg) {
            assert_eq!(v, d);
        }
        assert_eq!(ls.select_action(&s, cfg.dt, &cfg), ActionSpec::Walk);
    }

    #[test]
    fn bias_shift_in_deviation_net_keeps_greedy_choice() {
        let cfg = RunConfig::default();
        let mut ls = LearnerState::new(&cfg);
        let s = state([-0.7, 0.4, -2.0, 1.0, 0.5, 0.2], 4.6, 1.4);
        let before = ls.greedy_action(&s, cfg.dt, &cfg);
        let mut shifted = ls.j_net.clone();
        let last = shifted.layers_mut().len() - 1;
        shifted.layers_mut()[last].biases[0] += 123.0;
        ls.j_net = shifted;
        assert_eq!(ls.greedy_action(&s, cfg.dt, &cfg), before);
    }

    #[test]
    fn model_update_examples() {
        let cfg = RunConfig::default();
        let mut ls = LearnerState::with_nets(linear_exact_model(&cfg), FeedForwardNet::zeros(&[9, 1]), &cfg);
        let s = state([-0.5, 0.3, -1.0, 2.0, 1.5, 0.7], 5.0, 3.25);
        let u = world::control_of_action(&s, ActionSpec::TurnLeft, &cfg).unwrap();
        let n = world::step(&s, ActionSpec::TurnLeft, &cfg).unwrap();
        let before = ls.f_net.clone();
        let up = ls.update_f(&s.zeta, &u, &n.zeta, cfg.dt).unwrap();
        assert!(up.loss < 1e-28, "{}", up.loss);
        let moved: f64 = ls
            .f_net
            .params()
            .iter()
            .zip(before.params())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(moved < 1e-15);

        // zero model: residual is the whole transition
        let mut zl = zero_learner(&cfg);
        let mut next = s.zeta;
        next.delta.0[0] += 0.1;
        let up = zl.update_f(&s.zeta, &u, &next, cfg.dt).unwrap();
        assert!((up.loss - 0.01).abs() < 1e-15);
        assert!(zl.update_f(&s.zeta, &u, &next, 0.0).is_err());
    }

    #[test]
    fn heading_residual_wraps() {
        let cfg = RunConfig::default();
        let mut zl = zero_learner(&cfg);
        let mut a = Zeta::default();
        a.external.heading = std::f64::consts::TAU - 0.01;
        let mut b = a;
        b.external.heading = 0.02;
        let up = zl.update_f(&a, &ControlVector::default(), &b, cfg.dt).unwrap();
        assert!((up.loss - 0.03f64.powi(2)).abs() < 1e-12);
    }

    #[test]
    fn model_loss_decreases_on_replayed_transition() {
        let cfg = RunConfig::default();
        let mut ls = LearnerState::new(&cfg);
        let s = state([-0.5, 0.3, -1.0, 2.0, 1.5, 0.7], 5.0, 3.25);
        let u = world::control_of_action(&s, ActionSpec::Walk, &cfg).unwrap();
        let n = world::step(&s, ActionSpec::Walk, &cfg).unwrap();
        let mut prev = f64::INFINITY;
        for _ in 0..50 {
            let up = ls.update_f(&s.zeta, &u, &n.zeta, cfg.dt).unwrap();
            assert!(up.loss < prev, "{} !< {}", up.loss, prev);
            prev = up.loss;
        }
    }

    #[test]
    fn deviation_residual_examples() {
        let cfg = RunConfig::default();
        let s = state([-0.5, 0.3, -1.0, 2.0, 1.5, 0.7], 5.0, 3.25);
        let n = world::step(&s, ActionSpec::Rest, &cfg).unwrap();
        let u = world::control_of_action(&s, ActionSpec::Rest, &cfg).unwrap();

        // Ĵ ≡ 0, f̂ ≡ 0 ⇒ residual = d(ζ′)
        let mut zl = zero_learner(&cfg);
        let up = zl.update_j(&s.zeta, &u, &n.zeta, cfg.eps_smooth).unwrap();
        let d = drive(&n.zeta.delta, cfg.eps_smooth);
        assert!((up.loss - d * d).abs() < 1e-12);

        // constant Ĵ = d/(−ln γ) with f̂ ≡ 0 is a fixed point
        let mut j = FeedForwardNet::zeros(&[9, 4, 1]);
        let last = j.layers_mut().len() - 1;
        j.layers_mut()[last].biases[0] = d / -cfg.gamma.ln();
        let mut cl = LearnerState::with_nets(FeedForwardNet::zeros(&[18, 4, 9]), j, &cfg);
        let before = cl.j_net.clone();
        let up = cl.update_j(&s.zeta, &u, &n.zeta, cfg.eps_smooth).unwrap();
        assert!(up.loss < 1e-24);
        for (a, b) in cl.j_net.params().iter().zip(before.params()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn deviation_residual_decreases_on_frozen_batch() {
        let cfg = RunConfig::default();
        let mut ls = LearnerState::new(&cfg);
        let mut batch = Vec::new();
        let mut s = state([-0.5, 0.3, -1.0, 2.0, 1.5, 0.7], 5.0, 3.25);
        for a in [ActionSpec::Walk, ActionSpec::TurnLeft, ActionSpec::Walk, ActionSpec::Rest, ActionSpec::Run] {
            let u = world::control_of_action(&s, a, &cfg).unwrap();
            let n = world::step(&s, a, &cfg).unwrap();
            batch.push((s.zeta, u, n.zeta));
            s = n;
        }
        let mean = |ls: &LearnerState| {
            batch
                .iter()
                .map(|(a, u, b)| ls.hjb_residual(a, u, b, cfg.eps_smooth).powi(2))
                .sum::<f64>()
                / batch.len() as f64
        };
        let start = mean(&ls);
        for _ in 0..100 {
            for (a, u, b) in &batch {
                ls.update_j(a, u, b, cfg.eps_smooth).unwrap();
            }
        }
        assert!(mean(&ls) < start, "{} !< {}", mean(&ls), start);
    }

    #[test]
    fn circular_heading_gradient_matches_differences() {
        let mut cfg = RunConfig::default();
        cfg.heading_input = HeadingInput::Circular;
        let ls = LearnerState::new(&cfg);
        assert_eq!(ls.j_net.input_dim(), 10);
        assert_eq!(ls.f_net.input_dim(), 19);
        let zeta = Zeta::from_array(&[0.4, -1.2, 0.8, 2.5, 1.0, 0.3, 3.5, 2.5, 6.1]);
        let (_, g) = ls.deviation_and_gradient(&zeta);
        let h = 1e-6;
        for k in 0..ZETA_DIM {
            let (mut a, mut b) = (zeta.to_array(), zeta.to_array());
            a[k] += h;
            b[k] -= h;
            let fd = (ls.deviation(&Zeta::from_array(&a)) - ls.deviation(&Zeta::from_array(&b))) / (2.0 * h);
            assert!((fd - g[k]).abs() < 1e-6 * (1.0 + fd.abs()), "{k}: {fd} vs {}", g[k]);
        }
        let v = [0.1, -0.2, 0.3, 0.0, 0.5, -0.1, 0.7, -0.4, 1.3];
        let enc: Vec<f64> = (0..10).map(|k| (k as f64 * 0.37).sin()).collect();
        let lhs: f64 = enc.iter().zip(ls.scaling.push_forward(&zeta, &v)).map(|(a, b)| a * b).sum();
        let rhs: f64 = ls.scaling.pull_back(&zeta, &enc).iter().zip(&v).map(|(a, b)| a * b).sum();
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn epsilon_schedule() {
        assert_eq!(epsilon_at(0, 100, 0.9, 0.05), 0.9);
        assert!((epsilon_at(25, 100, 0.9, 0.05) - 0.475).abs() < 1e-15);
        assert_eq!(epsilon_at(50, 100, 0.9, 0.05), 0.05);
        assert_eq!(epsilon_at(99, 100, 0.9, 0.05), 0.05);
        assert_eq!(epsilon_at(0, 1, 0.9, 0.05), 0.9);
    }

    #[test]
    fn single_step_training() {
        let mut cfg = RunConfig::default();
        cfg.f_hidden = vec![8];
        cfg.j_hidden = vec![8];
        let out = train(WorldState::initial(&cfg), LearnerState::new(&cfg), 1, &cfg).unwrap();
        assert_eq!(out.log.len(), 1);
        assert_eq!(out.learner.step_count, 1);
        assert!(train(WorldState::initial(&cfg), LearnerState::new(&cfg), 0, &cfg).is_err());
    }
}
