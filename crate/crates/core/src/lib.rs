//! Delay-aware spacing policies and tracking controllers for vehicle
//! platoons whose actuators respond with a pure input delay.
//!
//! The crate is organised bottom-up:
//!
//! * [`dynamics`]: vehicle model, exact zero-order-hold discretization.
//! * [`predictor`]: exact prediction of the ego state over the delay.
//! * [`spacing`]: delayed spacing policies, spacing errors, properness and
//!   string-stability predicates.
//! * [`controllers`]: tracking controllers and gain validation.
//! * [`analysis`]: transfer magnitudes, frequency sweeps, quasi-polynomial
//!   root search and the properness region boundary.
//! * [`simulator`]: sampled-data closed-loop simulation of a platoon.
//!
//! Grid scans and parameter sweeps run on rayon when the `parallel`
//! feature is enabled (the default) and sequentially otherwise.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod controllers;
pub mod dynamics;
pub mod error;
pub mod par;
pub mod predictor;
pub mod simulator;
pub mod spacing;

pub use analysis::{Certificate, StabilityVerdict, VerdictMethod};
pub use controllers::{ControlInputs, ControllerGains, ControllerSpec};
pub use dynamics::{DiscreteModel, InputHistory, VehicleParams, VehicleState};
pub use error::{Error, Result};
pub use par::Execution;
pub use predictor::Predictor;
pub use spacing::{PolicyKind, PolicyRows, SpacingError, SpacingPolicy};
