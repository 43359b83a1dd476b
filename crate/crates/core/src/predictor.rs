//! Exact state prediction over the actuation-delay horizon.
//!
//! With a zero-order hold and `phi = d * ts`, the state `d` samples ahead
//! depends only on the current state and the `d` inputs already issued:
//!
//! ```text
//! x[k+d] = Phi^d x[k] + sum_{j=1}^{d} Phi^{j-1} Gamma u[k-j]
//! ```

use nalgebra::{Matrix3, Vector3};

use crate::dynamics::{DiscreteModel, InputHistory, VehicleParams, VehicleState};
use crate::error::{Error, Result};

/// Precomputed powers of the transition matrix for one `(model, d)` pair.
#[derive(Debug, Clone)]
pub struct Predictor {
    model: DiscreteModel,
    phi_d: Matrix3<f64>,
    /// `Phi^{j-1} Gamma` for `j = 1..=d`.
    input_columns: Vec<Vector3<f64>>,
}

impl Predictor {
    pub fn new(model: DiscreteModel) -> Self {
        let d = model.delay_steps;
        let mut power = Matrix3::identity();
        let mut input_columns = Vec::with_capacity(d);
        for _ in 0..d {
            input_columns.push(power * model.gamma);
            power *= model.phi;
        }
        Self {
            model,
            phi_d: power,
            input_columns,
        }
    }

    pub fn model(&self) -> &DiscreteModel {
        &self.model
    }

    pub fn horizon(&self) -> usize {
        self.model.delay_steps
    }

    /// Predicted state `d` samples ahead.
    pub fn predict(&self, x: &VehicleState, history: &InputHistory) -> Result<VehicleState> {
        let d = self.horizon();
        if history.depth() != d {
            return Err(Error::Buffer {
                expected: d,
                found: history.depth(),
            });
        }
        let mut out = self.phi_d * x.to_vector();
        for (column, u) in self.input_columns.iter().zip(history.iter()) {
            out += column * u;
        }
        Ok(VehicleState::from_vector(&out))
    }
}

/// One-shot prediction; prefer [`Predictor`] when predicting repeatedly.
pub fn predict(model: &DiscreteModel, x: &VehicleState, history: &InputHistory) -> Result<VehicleState> {
    Predictor::new(model.clone()).predict(x, history)
}

/// Acceleration at `t + phi` from the continuous convolution of the held
/// input segments, integrated segment by segment in closed form.
pub fn predict_acceleration_continuous(params: &VehicleParams, a_now: f64, history: &InputHistory) -> Result<f64> {
    let ts = history.sample_period();
    let expected = if params.phi == 0.0 {
        0
    } else {
        crate::dynamics::delay_steps(params.phi, ts)?
    };
    if history.depth() != expected {
        return Err(Error::Buffer {
            expected,
            found: history.depth(),
        });
    }
    let tau = params.tau;
    // u[k-j] acts on [t - j ts, t - (j-1) ts); its weight is
    // e^{-(j-1) ts / tau} - e^{-j ts / tau}.
    let step_decay = (-ts / tau).exp();
    let segment_weight = -(-ts / tau).exp_m1();
    let mut decay = 1.0;
    let mut forced = 0.0;
    for u in history.iter() {
        forced += u * decay * segment_weight;
        decay *= step_decay;
    }
    Ok((-params.phi / tau).exp() * a_now + forced)
}
