//! State decomposition and the drive/reward calculus.
//!
//! The world vector is `ζ = [δ; e]`: six internal deviations from the
//! homeostatic set point followed by the agent's pose in the plane. The drive
//! is the (optionally smoothed) Euclidean norm of `δ`, the reward is minus its
//! time derivative, and the deviation function `J` is the discounted integral
//! of the drive. `V = d + ln(γ)·J` links the two formulations.

use std::f64::consts::TAU;

use crate::error::{Error, Result};

/// Number of internal (homeostatic) features.
pub const N_INTERNAL: usize = 6;
/// Length of the flattened world vector.
pub const ZETA_DIM: usize = 9;
/// Denominator floor below which the constant-control reward is singular.
pub const SINGULARITY_FLOOR: f64 = 1e-12;
/// Default smoothing used wherever the drive gradient is consumed.
pub const DEFAULT_EPS_SMOOTH: f64 = 1e-8;

/// `δ = x − x*`. Components 0..4 are resources, 4 is muscle fatigue and 5 is
/// sleep fatigue.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct InternalDeviation(pub [f64; N_INTERNAL]);

impl InternalDeviation {
    pub const MUSCLE: usize = 4;
    pub const SLEEP: usize = 5;

    pub fn zero() -> Self {
        Self([0.0; N_INTERNAL])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn dot(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum()
    }
}

/// Agent pose: position in arena units and heading in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ExternalState {
    pub x: f64,
    pub y: f64,
    pub heading: f64,
}

impl ExternalState {
    pub fn new(x: f64, y: f64, heading: f64) -> Self {
        Self {
            x,
            y,
            heading: wrap_angle(heading),
        }
    }

    pub fn position(&self) -> [f64; 2] {
        [self.x, self.y]
    }
}

/// The full world vector `ζ`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Zeta {
    pub delta: InternalDeviation,
    pub external: ExternalState,
}

impl Zeta {
    /// Flattened order `[δ₁..δ₆, x, y, θ]`.
    pub fn to_array(&self) -> [f64; ZETA_DIM] {
        let mut out = [0.0; ZETA_DIM];
        out[..N_INTERNAL].copy_from_slice(&self.delta.0);
        out[6] = self.external.x;
        out[7] = self.external.y;
        out[8] = self.external.heading;
        out
    }

    pub fn from_array(v: &[f64; ZETA_DIM]) -> Self {
        let mut delta = [0.0; N_INTERNAL];
        delta.copy_from_slice(&v[..N_INTERNAL]);
        Self {
            delta: InternalDeviation(delta),
            external: ExternalState {
                x: v[6],
                y: v[7],
                heading: v[8],
            },
        }
    }
}

/// Wraps an angle into `[0, 2π)`.
pub fn wrap_angle(theta: f64) -> f64 {
    let w = theta.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Wraps an angular difference into `(−π, π]`.
pub fn wrap_angle_diff(diff: f64) -> f64 {
    let w = wrap_angle(diff);
    if w > std::f64::consts::PI {
        w - TAU
    } else {
        w
    }
}

/// `d(δ) = √(ε + δᵀδ)`.
pub fn drive(delta: &InternalDeviation, eps_smooth: f64) -> f64 {
    drive_of(delta.as_slice(), eps_smooth)
}

/// Drive of an arbitrary-length deviation slice.
pub fn drive_of(delta: &[f64], eps_smooth: f64) -> f64 {
    let sq: f64 = delta.iter().map(|v| v * v).sum();
    (eps_smooth + sq).sqrt()
}

/// Gradient of the smoothed drive with respect to `δ`.
pub fn drive_gradient(delta: &InternalDeviation, eps_smooth: f64) -> [f64; N_INTERNAL] {
    let d = drive(delta, eps_smooth);
    let mut g = [0.0; N_INTERNAL];
    if d > 0.0 {
        for (gi, di) in g.iter_mut().zip(delta.0.iter()) {
            *gi = di / d;
        }
    }
    g
}

/// Discretized reward `r = −(d(δ′) − d(δ))/Δt`.
pub fn reward_from_transition(
    delta_prev: &InternalDeviation,
    delta_next: &InternalDeviation,
    dt: f64,
    eps_smooth: f64,
) -> Result<f64> {
    if !(dt > 0.0) {
        return Err(Error::NonPositiveStep(dt));
    }
    Ok(-(drive(delta_next, eps_smooth) - drive(delta_prev, eps_smooth)) / dt)
}

/// Drive after consuming resource 1 at constant rate `m` for time `t`,
/// ignoring self-regulation: `√(t²m² + 2tmδ₀,₁ + δ₀ᵀδ₀)`.
pub fn constant_control_drive(t: f64, m: f64, delta0: &[f64]) -> f64 {
    let first = delta0.first().copied().unwrap_or(0.0);
    let sq: f64 = delta0.iter().map(|v| v * v).sum();
    // equals |δ₀ + t·u|², so only round-off can push it below zero
    (t * t * m * m + 2.0 * t * m * first + sq).max(0.0).sqrt()
}

/// Reward along the constant-control trajectory:
/// `r(t) = −(δ₀,₁ + tm)·m / d(t)`.
pub fn constant_control_reward(t: f64, m: f64, delta0: &[f64]) -> Result<f64> {
    let first = delta0.first().copied().unwrap_or(0.0);
    let denom = constant_control_drive(t, m, delta0);
    if denom < SINGULARITY_FLOOR {
        return Err(Error::Singular(denom));
    }
    Ok(-(first + t * m) * m / denom)
}

/// `V = d(δ_t) + ln(γ)·J`.
pub fn value_from_deviation(drive_now: f64, j_value: f64, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    Ok(drive_now + gamma.ln() * j_value)
}

pub(crate) fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma < 1.0 {
        Ok(())
    } else {
        Err(Error::DiscountOutOfRange(gamma))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dev(v: [f64; 6]) -> InternalDeviation {
        InternalDeviation(v)
    }

    #[test]
    fn drive_examples() {
        assert_eq!(drive(&InternalDeviation::zero(), 0.0), 0.0);
        assert_eq!(drive(&dev([3.0, 4.0, 0.0, 0.0, 0.0, 0.0]), 0.0), 5.0);
        let d = drive(&dev([1.0, 1.0, 1.0, 1.0, 0.0, 0.0]), 1e-8);
        assert_eq!(d, (4.0f64 + 1e-8).sqrt());
        assert!(drive(&InternalDeviation::zero(), 1e-8) > 0.0);
    }

    #[test]
    fn reward_examples() {
        let a = dev([1.0, -2.0, 0.5, 0.0, 0.3, 0.1]);
        assert_eq!(reward_from_transition(&a, &a, 0.1, 0.0).unwrap(), 0.0);
        let prev = dev([2.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let next = dev([0.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(reward_from_transition(&prev, &next, 0.5, 0.0).unwrap(), 2.0);
        assert!(matches!(
            reward_from_transition(&prev, &next, 0.0, 0.0),
            Err(Error::NonPositiveStep(_))
        ));
        assert!(reward_from_transition(&prev, &next, -1.0, 0.0).is_err());
    }

    #[test]
    fn discretized_reward_converges_to_closed_form() {
        // δ(t) = δ₀ + t·[m, 0, ...]: the finite-difference reward over [t, t+dt]
        // approaches the closed form at t with O(dt) error.
        let delta0 = [-2.5, 1.0, 0.5, -0.3, 0.0, 0.0];
        let m = 0.8;
        let t = 0.4;
        let at = |s: f64| {
            let mut d = delta0;
            d[0] += s * m;
            dev(d)
        };
        let exact = constant_control_reward(t, m, &delta0).unwrap();
        let mut errs = Vec::new();
        for dt in [1e-2, 1e-3, 1e-4] {
            let r = reward_from_transition(&at(t), &at(t + dt), dt, 0.0).unwrap();
            errs.push((r - exact).abs());
        }
        assert!(errs[0] < 1e-2 && errs[1] < 1e-3 && errs[2] < 1e-4, "{errs:?}");
        // first order: each tenfold refinement shrinks the error about tenfold
        assert!(errs[0] / errs[1] > 5.0 && errs[1] / errs[2] > 5.0, "{errs:?}");
    }

    #[test]
    fn constant_control_examples() {
        let d0 = [-2.0, 0.0];
        assert_eq!(constant_control_drive(0.0, 1.0, &d0), 2.0);
        assert_eq!(constant_control_drive(1.0, 1.0, &d0), 1.0);
        assert_eq!(constant_control_drive(2.0, 1.0, &d0), 0.0);
        assert_eq!(constant_control_reward(0.0, 1.0, &d0).unwrap(), 1.0);
        assert_eq!(constant_control_reward(1.0, 1.0, &d0).unwrap(), 1.0);
        for t in [0.0, 0.5, 3.0] {
            assert_eq!(constant_control_reward(t, 0.0, &[1.0, 2.0]).unwrap(), 0.0);
        }
        assert!(matches!(
            constant_control_reward(2.0, 1.0, &d0),
            Err(Error::Singular(_))
        ));
    }

    #[test]
    fn value_examples() {
        assert_eq!(value_from_deviation(2.5, 0.0, 0.9).unwrap(), 2.5);
        let g: f64 = 0.95;
        let j = 1.0 / -g.ln();
        assert!(value_from_deviation(1.0, j, g).unwrap().abs() < 1e-12);
        assert!(value_from_deviation(1.0, 1.0, 1.0).is_err());
        assert!(value_from_deviation(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn angle_wrapping() {
        assert_eq!(wrap_angle(TAU), 0.0);
        assert_eq!(wrap_angle(-1e-18), 0.0);
        assert!((wrap_angle(-0.5) - (TAU - 0.5)).abs() < 1e-15);
        assert!((wrap_angle_diff(0.1 - (TAU - 0.1)) - 0.2).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn drive_is_even_and_permutation_invariant(
            v in prop::array::uniform6(-5.0f64..5.0),
            rot in 0usize..6,
        ) {
            let d = drive(&dev(v), 0.0);
            let neg = v.map(|x| -x);
            prop_assert_eq!(d, drive(&dev(neg), 0.0));
            let mut p = v;
            p.rotate_left(rot);
            prop_assert!((d - drive(&dev(p), 0.0)).abs() <= 1e-12 * (1.0 + d));
        }

        #[test]
        fn drive_triangle_inequality(
            a in prop::array::uniform6(-5.0f64..5.0),
            b in prop::array::uniform6(-5.0f64..5.0),
        ) {
            let mut s = [0.0; 6];
            for i in 0..6 { s[i] = a[i] + b[i]; }
            let lhs = drive(&dev(s), 0.0);
            let rhs = drive(&dev(a), 0.0) + drive(&dev(b), 0.0);
            prop_assert!(lhs <= rhs + 1e-12);
        }

        #[test]
        fn constant_control_drive_matches_direct_drive(
            d0 in prop::array::uniform6(-3.0f64..3.0),
            m in -2.0f64..2.0,
            t in 0.0f64..2.0,
        ) {
            let mut moved = d0;
            moved[0] += t * m;
            let a = constant_control_drive(t, m, &d0);
            let b = drive(&dev(moved), 0.0);
            prop_assert!((a - b).abs() <= 1e-9 * (1.0 + b));
        }

        #[test]
        fn zeta_round_trip(v in prop::array::uniform9(-10.0f64..10.0)) {
            prop_assert_eq!(Zeta::from_array(&v).to_array(), v);
        }
    }
}
