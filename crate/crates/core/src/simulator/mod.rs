//! Sampled-data closed-loop simulation of a platoon.
//!
//! At every sample the leader input is evaluated first, then each
//! follower from front to back predicts its state over the delay, reads
//! its predecessor's current signals and computes its input. Finally
//! every vehicle is advanced one exact zero-order-hold step with the
//! input that left its delay buffer.

mod leader;
mod measurement;
mod reference;

pub use leader::{leader_input, LeaderProfile, LeaderSegment};
pub use measurement::{MeasurementModel, MeasurementOptions};
pub use reference::{error_companion_matrix, error_dynamics_reference};

use crate::controllers::{ControlInputs, ControllerSpec};
use crate::dynamics::{delay_steps, discretize, InputHistory, VehicleParams, VehicleState};
use crate::error::{Error, Result};
use crate::par::Execution;
use crate::predictor::Predictor;

/// Default control and simulation period.
pub const DEFAULT_TS: f64 = 0.01;

#[derive(Debug, Clone, PartialEq)]
pub struct VehicleSetup {
    pub params: VehicleParams,
    pub initial: VehicleState,
    /// Inputs issued before `t = 0`, most recent first; the length must be
    /// the delay in samples.
    pub history: InputHistory,
}

impl VehicleSetup {
    /// Constant pre-history `u_init`.
    pub fn new(params: VehicleParams, initial: VehicleState, u_init: f64, ts: f64) -> Result<Self> {
        let d = delay_steps(params.phi, ts)?;
        Ok(Self {
            params,
            initial,
            history: InputHistory::constant(d, ts, u_init),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlatoonConfig {
    /// Vehicle 0 is the leader.
    pub vehicles: Vec<VehicleSetup>,
    /// One controller per follower; entry `i - 1` drives vehicle `i`.
    pub controllers: Vec<ControllerSpec>,
    pub ts: f64,
    pub horizon: f64,
    pub measurement: MeasurementOptions,
    /// Stops vehicles from reversing: a negative velocity after a step is
    /// reset to zero together with any negative acceleration.
    pub no_reverse: bool,
}

impl PlatoonConfig {
    pub fn new(vehicles: Vec<VehicleSetup>, controllers: Vec<ControllerSpec>, ts: f64, horizon: f64) -> Result<Self> {
        let config = Self {
            vehicles,
            controllers,
            ts,
            horizon,
            measurement: MeasurementOptions::default(),
            no_reverse: false,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.ts > 0.0) || !self.ts.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "sample period must be positive, got {}",
                self.ts
            )));
        }
        if !(self.horizon >= 0.0) || !self.horizon.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "horizon must be >= 0, got {}",
                self.horizon
            )));
        }
        if self.vehicles.is_empty() {
            return Err(Error::InvalidParameter("platoon has no vehicles".into()));
        }
        if self.controllers.len() + 1 != self.vehicles.len() {
            return Err(Error::InvalidParameter(format!(
                "{} vehicles need {} controllers, got {}",
                self.vehicles.len(),
                self.vehicles.len() - 1,
                self.controllers.len()
            )));
        }
        for (i, v) in self.vehicles.iter().enumerate() {
            let d = delay_steps(v.params.phi, self.ts)?;
            if v.history.depth() != d {
                return Err(Error::Buffer {
                    expected: d,
                    found: v.history.depth(),
                });
            }
            if !v.initial.is_finite() || v.history.iter().any(|u| !u.is_finite()) {
                return Err(Error::NonFinite("initial condition"));
            }
            if i > 0 {
                let spec = &self.controllers[i - 1];
                if spec.ego != v.params {
                    return Err(Error::InvalidParameter(format!(
                        "controller {i} built for other vehicle parameters"
                    )));
                }
                if let Some(p) = spec.predecessor {
                    if p != self.vehicles[i - 1].params {
                        return Err(Error::InvalidParameter(format!(
                            "controller {i} built for other predecessor parameters"
                        )));
                    }
                }
            }
        }
        for opt in [self.measurement.radar_hold, self.measurement.v2v_hold]
            .into_iter()
            .flatten()
        {
            if !(opt > 0.0) || !opt.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "hold rate must be positive, got {opt}"
                )));
            }
        }
        Ok(())
    }

    pub fn samples(&self) -> usize {
        (self.horizon / self.ts).round() as usize + 1
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct VehicleTrace {
    pub q: Vec<f64>,
    pub v: Vec<f64>,
    pub a: Vec<f64>,
    /// Input issued at the sample, before the delay.
    pub u: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FollowerTrace {
    pub e: Vec<f64>,
    /// Measured range `q_{i-1} - q_i`, including the standstill distance.
    pub delta: Vec<f64>,
    /// Desired range, including the standstill distance.
    pub delta_ref: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryLog {
    pub ts: f64,
    pub t: Vec<f64>,
    pub vehicles: Vec<VehicleTrace>,
    /// Entry `i - 1` belongs to vehicle `i`.
    pub followers: Vec<FollowerTrace>,
}

impl TrajectoryLog {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn velocities(&self) -> Vec<Vec<f64>> {
        self.vehicles.iter().map(|v| v.v.clone()).collect()
    }

    pub fn max_abs_error(&self, follower: usize) -> f64 {
        self.followers[follower - 1].e.iter().fold(0.0, |m, e| m.max(e.abs()))
    }
}

struct Vehicle {
    predictor: Predictor,
    history: InputHistory,
    state: VehicleState,
}

impl Vehicle {
    /// `u(t - phi)` at the current sample, given the input `u` issued now.
    fn delayed_input(&self, u: f64) -> f64 {
        self.history.effective().unwrap_or(u)
    }
}

pub fn run(config: &PlatoonConfig, leader: &LeaderProfile) -> Result<TrajectoryLog> {
    config.validate()?;
    let ts = config.ts;
    let mut fleet = config
        .vehicles
        .iter()
        .map(|s| {
            Ok(Vehicle {
                predictor: Predictor::new(discretize(&s.params, ts)?),
                history: s.history.clone(),
                state: s.initial,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let n = config.samples();
    let n_veh = fleet.len();
    let mut log = TrajectoryLog {
        ts,
        t: Vec::with_capacity(n),
        vehicles: vec![VehicleTrace::default(); n_veh],
        followers: vec![FollowerTrace::default(); n_veh - 1],
    };
    let mut sensors: Vec<MeasurementModel> = (1..n_veh).map(|_| MeasurementModel::new(config.measurement)).collect();
    let mut inputs = vec![0.0; n_veh];

    for k in 0..n {
        let t = k as f64 * ts;
        log.t.push(t);
        inputs[0] = leader_input(leader, t, fleet[0].state.v);
        for i in 1..n_veh {
            let spec = &config.controllers[i - 1];
            let (prev, ego) = (&fleet[i - 1], &fleet[i]);
            let predicted = ego
                .predictor
                .predict(&ego.state, &ego.history)
                .map_err(|e| e.at_sample(k))?;
            let standstill = spec.policy.standstill;
            let range = prev.state.q - ego.state.q;
            let truth = ControlInputs {
                ego_state: ego.state,
                ego_predicted: predicted,
                delta: range - standstill,
                delta_dot: prev.state.v - ego.state.v,
                predecessor_v: Some(prev.state.v),
                predecessor_a: Some(prev.state.a),
                predecessor_u_delayed: Some(prev.delayed_input(inputs[i - 1])),
                ego_u_delayed: ego.history.effective(),
            };
            let observed = sensors[i - 1].apply(t, &truth);
            let u = spec.control(&observed).map_err(|e| e.at_sample(k))?;
            if !u.is_finite() {
                return Err(Error::NonFinite("control input").at_sample(k));
            }
            inputs[i] = u;
            let reference = spec.policy.reference(&ego.state, &predicted) + standstill;
            let f = &mut log.followers[i - 1];
            f.delta.push(range);
            f.delta_ref.push(reference);
            f.e.push(range - reference);
        }
        for (i, veh) in fleet.iter_mut().enumerate() {
            let trace = &mut log.vehicles[i];
            trace.q.push(veh.state.q);
            trace.v.push(veh.state.v);
            trace.a.push(veh.state.a);
            trace.u.push(inputs[i]);
            let applied = veh.history.push(inputs[i]);
            veh.state = veh.predictor.model().step(&veh.state, applied);
            if config.no_reverse && veh.state.v < 0.0 {
                veh.state.v = 0.0;
                veh.state.a = veh.state.a.max(0.0);
            }
        }
    }
    Ok(log)
}

/// Independent runs, e.g. a parameter sweep, scheduled with `exec`.
pub fn run_many(cases: &[(PlatoonConfig, LeaderProfile)], exec: Execution) -> Vec<Result<TrajectoryLog>> {
    exec.map(cases, |(config, leader)| run(config, leader))
}
