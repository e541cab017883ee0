//! Continuous-time homeostatic reinforcement learning.
//!
//! An embodied agent keeps six internal variables (four resources, muscle
//! fatigue, sleep fatigue) near their set points while moving in a polygonal
//! arena. Reward is the rate at which the drive, the Euclidean distance of the
//! internal state from the set point, decreases. The agent starts with no
//! knowledge: it fits a network `f̂` to its own dynamics, fits a deviation
//! function `Ĵ` to the Hamilton–Jacobi–Bellman residual, and acts greedily on
//! `d(δ + f̂Δt) + ∇Ĵ·f̂`.
//!
//! Modules:
//! - [`drive`]: drive, reward and their constant-control closed forms
//! - [`signs`]: finite-difference sign suites for the closed forms
//! - [`world`]: the arena, body dynamics and the Euler step
//! - [`nn`]: small tanh networks with the derivatives the learner needs
//! - [`learner`]: action selection and the two losses
//! - [`oracle`]: numerical ground truth for `J` and `V`
//! - [`commands`], [`verify`]: the workflows behind the `hrrl` binary

pub mod commands;
pub mod config;
pub mod drive;
pub mod error;
pub mod gradcheck;
pub mod learner;
pub mod nn;
pub mod oracle;
pub mod runlog;
pub mod signs;
pub mod verify;
pub mod world;

pub use config::RunConfig;
pub use drive::{drive, reward_from_transition, ExternalState, InternalDeviation, Zeta};
pub use error::{Error, Result};
pub use learner::{train, LearnerState};
pub use nn::FeedForwardNet;
pub use world::{ActionSpec, WorldState};
