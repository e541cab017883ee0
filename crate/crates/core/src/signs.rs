//! Finite-difference sign suites for the constant-control drive and reward.
//!
//! Three properties are checked on seeded random samples of
//! `(δ₀ ∈ [−3,3]², m ∈ [0.1,2], t ∈ [0,1])`:
//!
//! * reward vs `|δ₀,₁|`: `≤ 0` when `δ₀,₁ ≥ 0`, `≥ 0` when `δ₀,₁ ≤ 0`;
//! * reward vs `|δ₀,₂|`: `≤ 0` when `δ₀,₁ + tm ≤ 0`, `≥ 0` otherwise;
//! * drive vs consumed amount `tm`: same split on `δ₀,₁ + tm`.
//!
//! Every side condition gets its own quota of samples.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::drive::{constant_control_drive, constant_control_reward};

pub const FD_STEP: f64 = 1e-5;
pub const ZERO_MARGIN: f64 = 1e-9;
pub const SAMPLES_PER_CONDITION: usize = 200;
const DENOM_FLOOR: f64 = 1e-6;

pub type DriveFn = fn(f64, f64, &[f64]) -> f64;
pub type RewardFn = fn(f64, f64, &[f64]) -> f64;

/// The closed forms under test. Tests swap these to inject faults.
#[derive(Clone, Copy)]
pub struct SignHooks {
    pub drive: DriveFn,
    pub reward: RewardFn,
}

fn library_reward(t: f64, m: f64, d0: &[f64]) -> f64 {
    constant_control_reward(t, m, d0).unwrap_or(f64::NAN)
}

fn negated_drive(t: f64, m: f64, d0: &[f64]) -> f64 {
    -constant_control_drive(t, m, d0)
}

fn reward_from_negated_drive(t: f64, m: f64, d0: &[f64]) -> f64 {
    -(d0[0] + t * m) * m / negated_drive(t, m, d0)
}

impl Default for SignHooks {
    fn default() -> Self {
        Self {
            drive: constant_control_drive,
            reward: library_reward,
        }
    }
}

impl SignHooks {
    /// Drive with its sign flipped; the reward is rebuilt from it.
    pub fn tampered() -> Self {
        Self {
            drive: negated_drive,
            reward: reward_from_negated_drive,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignCase {
    RewardVsOwnDeviation,
    RewardVsOtherDeviation,
    DriveVsDose,
}

impl SignCase {
    pub const ALL: [SignCase; 3] = [
        SignCase::RewardVsOwnDeviation,
        SignCase::RewardVsOtherDeviation,
        SignCase::DriveVsDose,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SignCase::RewardVsOwnDeviation => "reward_vs_own_deviation",
            SignCase::RewardVsOtherDeviation => "reward_vs_other_deviation",
            SignCase::DriveVsDose => "drive_vs_dose",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SignReport {
    pub case: SignCase,
    /// Samples checked per side condition (`[nonpositive side, nonnegative side]`).
    pub checked: [usize; 2],
    pub violations: usize,
    /// Worst violating finite difference, if any.
    pub worst: Option<f64>,
}

impl SignReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
            && self.checked[0] >= SAMPLES_PER_CONDITION
            && self.checked[1] >= SAMPLES_PER_CONDITION
    }
}

struct Sample {
    d0: [f64; 2],
    m: f64,
    t: f64,
}

fn draw(rng: &mut ChaCha8Rng) -> Sample {
    Sample {
        d0: [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)],
        m: rng.gen_range(0.1..2.0),
        t: rng.gen_range(0.0..1.0),
    }
}

/// Returns `(condition, fd)` where condition 0 expects `fd ≤ 0` and 1 expects
/// `fd ≥ 0`, or `None` when the sample is filtered out.
fn probe(case: SignCase, s: &Sample, hooks: &SignHooks) -> Option<(usize, f64)> {
    let h = FD_STEP;
    let Sample { d0, m, t } = *s;
    let denom_ok = |d: &[f64]| constant_control_drive(t, m, d).abs() > DENOM_FLOOR;
    match case {
        SignCase::RewardVsOwnDeviation => {
            let sign = d0[0].signum();
            let mag = d0[0].abs();
            if mag <= 2.0 * h {
                return None;
            }
            let lo = [sign * (mag - h), d0[1]];
            let hi = [sign * (mag + h), d0[1]];
            if !denom_ok(&lo) || !denom_ok(&hi) {
                return None;
            }
            let fd = ((hooks.reward)(t, m, &hi) - (hooks.reward)(t, m, &lo)) / (2.0 * h);
            Some((if d0[0] >= 0.0 { 0 } else { 1 }, fd))
        }
        SignCase::RewardVsOtherDeviation => {
            let sign = d0[1].signum();
            let mag = d0[1].abs();
            if mag <= 2.0 * h {
                return None;
            }
            let lo = [d0[0], sign * (mag - h)];
            let hi = [d0[0], sign * (mag + h)];
            if !denom_ok(&lo) || !denom_ok(&hi) {
                return None;
            }
            let fd = ((hooks.reward)(t, m, &hi) - (hooks.reward)(t, m, &lo)) / (2.0 * h);
            Some((if d0[0] + t * m <= 0.0 { 0 } else { 1 }, fd))
        }
        SignCase::DriveVsDose => {
            if !denom_ok(&d0) {
                return None;
            }
            // d as a function of the dose q = tm, at unit "time"
            let q = t * m;
            let fd = ((hooks.drive)(1.0, q + h, &d0) - (hooks.drive)(1.0, q - h, &d0)) / (2.0 * h);
            Some((if d0[0] + q <= 0.0 { 0 } else { 1 }, fd))
        }
    }
}

/// Runs one case until each side condition has `SAMPLES_PER_CONDITION` samples.
pub fn run_case(case: SignCase, seed: u64, hooks: &SignHooks) -> SignReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (case as u64 + 1).wrapping_mul(0x9E37_79B9));
    let mut checked = [0usize; 2];
    let mut violations = 0;
    let mut worst: Option<f64> = None;
    let mut draws = 0usize;
    while (checked[0] < SAMPLES_PER_CONDITION || checked[1] < SAMPLES_PER_CONDITION)
        && draws < 1_000_000
    {
        draws += 1;
        let s = draw(&mut rng);
        let Some((cond, fd)) = probe(case, &s, hooks) else {
            continue;
        };
        if checked[cond] >= SAMPLES_PER_CONDITION {
            continue;
        }
        checked[cond] += 1;
        let ok = fd.abs() <= ZERO_MARGIN || (cond == 0 && fd <= 0.0) || (cond == 1 && fd >= 0.0);
        if !ok {
            violations += 1;
            if worst.map_or(true, |w| fd.abs() > w.abs()) {
                worst = Some(fd);
            }
        }
    }
    SignReport {
        case,
        checked,
        violations,
        worst,
    }
}

pub fn run_all(seed: u64, hooks: &SignHooks) -> Vec<SignReport> {
    SignCase::ALL
        .iter()
        .map(|&c| run_case(c, seed, hooks))
        .collect()
}
