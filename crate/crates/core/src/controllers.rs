//! Tracking controllers for the delayed spacing policies.
//!
//! Each controller assigns linear error dynamics of order `rho_bar`:
//! `e' = -k_p e`, `e'' = -k_d e' - k_p e` or
//! `e''' = -k_dd e'' - k_d e' - k_p e`.

use nalgebra::{Matrix3, RowVector3, Vector3};

use crate::dynamics::{VehicleParams, VehicleState};
use crate::error::{Error, Result};
use crate::spacing::{
    relative_degrees, solvability_check, spacing_error, PolicyKind, PolicyRows, RelativeDegree, SpacingMeasurement,
    SpacingPolicy,
};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ControllerGains {
    pub k_p: f64,
    /// Unused when `rho_bar = 1`.
    pub k_d: f64,
    /// Only used when `rho_bar = 3`.
    pub k_dd: f64,
}

impl ControllerGains {
    pub fn new(k_p: f64, k_d: f64, k_dd: f64) -> Self {
        Self { k_p, k_d, k_dd }
    }
}

/// Routh-Hurwitz conditions for the assigned error dynamics. Returns the
/// violated conditions; an empty list means the gains are valid.
///
/// For `rho_bar = 3` the characteristic polynomial is
/// `s^3 + k_dd s^2 + k_d s + k_p`, which is Hurwitz iff all gains are
/// positive and `k_d k_dd > k_p`.
pub fn validate_gains(rho_bar: u32, gains: &ControllerGains) -> Vec<String> {
    let mut out = Vec::new();
    let positive = |name: &str, value: f64, out: &mut Vec<String>| {
        if !(value > 0.0) || !value.is_finite() {
            out.push(format!("{name} must be positive and finite, got {value}"));
        }
    };
    match rho_bar {
        1 => positive("k_p", gains.k_p, &mut out),
        2 => {
            positive("k_p", gains.k_p, &mut out);
            positive("k_d", gains.k_d, &mut out);
        }
        3 => {
            positive("k_p", gains.k_p, &mut out);
            positive("k_d", gains.k_d, &mut out);
            positive("k_dd", gains.k_dd, &mut out);
            if !(gains.k_d * gains.k_dd > gains.k_p) {
                out.push(format!(
                    "k_d * k_dd = {} must exceed k_p = {}",
                    gains.k_d * gains.k_dd,
                    gains.k_p
                ));
            }
        }
        other => out.push(format!("unsupported relative degree {other}")),
    }
    out
}

/// Signals available to a follower at one sample instant.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ControlInputs {
    pub ego_state: VehicleState,
    /// Ego state at `t + phi_i`.
    pub ego_predicted: VehicleState,
    /// Radar range with the standstill distance removed.
    pub delta: f64,
    /// Radar range rate.
    pub delta_dot: f64,
    pub predecessor_v: Option<f64>,
    pub predecessor_a: Option<f64>,
    /// `u_{i-1}(t - phi_{i-1})`.
    pub predecessor_u_delayed: Option<f64>,
    /// `u_i(t - phi_i)`; only needed by the generic third-order controller
    /// when the current-state row is not `-q`.
    pub ego_u_delayed: Option<f64>,
}

impl ControlInputs {
    fn measurement(&self) -> SpacingMeasurement {
        SpacingMeasurement {
            delta: self.delta,
            delta_dot: self.delta_dot,
            predecessor_a: self.predecessor_a,
            ego: self.ego_state,
            predicted: self.ego_predicted,
            ego_jerk: None,
            predicted_jerk: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerSpec {
    pub policy: SpacingPolicy,
    pub gains: ControllerGains,
    pub ego: VehicleParams,
    /// Required by the delayed constant controller only.
    pub predecessor: Option<VehicleParams>,
}

impl ControllerSpec {
    pub fn new(
        policy: SpacingPolicy,
        gains: ControllerGains,
        ego: VehicleParams,
        predecessor: Option<VehicleParams>,
    ) -> Result<Self> {
        let rho_bar = match relative_degrees(&policy.rows()).1 {
            RelativeDegree::Finite(r) => r,
            RelativeDegree::Infinite => return Err(Error::UnsupportedPolicy(policy.kind.name())),
        };
        let violations = validate_gains(rho_bar, &gains);
        if !violations.is_empty() {
            return Err(Error::InvalidParameter(violations.join("; ")));
        }
        if policy.kind == PolicyKind::DelayedConstant && predecessor.is_none() {
            return Err(Error::InvalidParameter(
                "the delayed constant controller needs the predecessor parameters".into(),
            ));
        }
        Ok(Self {
            policy,
            gains,
            ego,
            predecessor,
        })
    }

    pub fn rho_bar(&self) -> u32 {
        match relative_degrees(&self.policy.rows()).1 {
            RelativeDegree::Finite(r) => r,
            RelativeDegree::Infinite => unreachable!("validated on construction"),
        }
    }

    /// Dispatches to the specialized controller of the policy.
    pub fn control(&self, inputs: &ControlInputs) -> Result<f64> {
        match self.policy.kind {
            PolicyKind::DelayedConstant => control_delayed_constant(self, inputs),
            PolicyKind::DelayedConstantHeadway => control_delayed_constant_headway(self, inputs),
            PolicyKind::DelayedExtendedHeadway => control_delayed_extended(self, inputs),
        }
    }
}

fn expect_kind(spec: &ControllerSpec, kind: PolicyKind) -> Result<()> {
    if spec.policy.kind != kind {
        return Err(Error::UnsupportedPolicy(spec.policy.kind.name()));
    }
    Ok(())
}

/// `u = (tau_i / tau_{i-1}) (u_{i-1}(t - phi_{i-1}) - a_{i-1}) + a_hat
///      + tau_i (k_p e + k_d e' + k_dd e'')`.
pub fn control_delayed_constant(spec: &ControllerSpec, inputs: &ControlInputs) -> Result<f64> {
    expect_kind(spec, PolicyKind::DelayedConstant)?;
    let pred = spec.predecessor.ok_or(Error::Channel("predecessor parameters"))?;
    let a_prev = inputs.predecessor_a.ok_or(Error::Channel("predecessor acceleration"))?;
    let u_prev = inputs
        .predecessor_u_delayed
        .ok_or(Error::Channel("predecessor delayed input"))?;
    let err = spacing_error(&spec.policy, &inputs.measurement());
    let (e_dot, e_ddot) = (
        err.e_dot.expect("range rate"),
        err.e_ddot.expect("predecessor acceleration"),
    );
    let g = &spec.gains;
    let tau = spec.ego.tau;
    Ok(tau / pred.tau * (-a_prev + u_prev)
        + inputs.ego_predicted.a
        + tau * (g.k_p * err.e + g.k_d * e_dot + g.k_dd * e_ddot))
}

/// `u = a_hat + (tau / h_v) (a_{i-1} - a + k_p e + k_d e')`.
pub fn control_delayed_constant_headway(spec: &ControllerSpec, inputs: &ControlInputs) -> Result<f64> {
    expect_kind(spec, PolicyKind::DelayedConstantHeadway)?;
    let a_prev = inputs.predecessor_a.ok_or(Error::Channel("predecessor acceleration"))?;
    let err = spacing_error(&spec.policy, &inputs.measurement());
    let e_dot = err.e_dot.expect("range rate");
    let g = &spec.gains;
    Ok(inputs.ego_predicted.a
        + spec.ego.tau / spec.policy.h_v * (a_prev - inputs.ego_state.a + g.k_p * err.e + g.k_d * e_dot))
}

/// `u = (tau / h_a) (v_{i-1} - v - h_v a + k_p e) + a_hat`, using only the
/// range rate and ego signals.
pub fn control_delayed_extended(spec: &ControllerSpec, inputs: &ControlInputs) -> Result<f64> {
    expect_kind(spec, PolicyKind::DelayedExtendedHeadway)?;
    let err = spacing_error(&spec.policy, &inputs.measurement());
    let p = &spec.policy;
    Ok(
        spec.ego.tau / p.h_a * (inputs.delta_dot - p.h_v * inputs.ego_state.a + spec.gains.k_p * err.e)
            + inputs.ego_predicted.a,
    )
}

fn row_times(h: &RowVector3<f64>, m: &Matrix3<f64>, x: &Vector3<f64>) -> f64 {
    (h * m * x)[0]
}

/// Controller for arbitrary solvable rows, evaluated with matrix products.
///
/// The `rho_bar`-th derivative of `e = Delta - H x - H_bar x_hat` is
/// solved for `u` after assigning the error dynamics. Terms with `H A^k B`
/// vanish below `rho`, so for `rho_bar < 3` only `Delta` derivatives up to
/// the relative acceleration appear. For `rho_bar = 3` the third
/// derivative of `Delta` brings in `u_{i-1}(t - phi_{i-1})` and, unless
/// `H x = -q`, the ego's delayed input.
pub fn generic_rho_controller(
    rows: &PolicyRows,
    rho_bar: u32,
    gains: &ControllerGains,
    inputs: &ControlInputs,
    ego: &VehicleParams,
    predecessor: Option<&VehicleParams>,
) -> Result<f64> {
    if !(1..=3).contains(&rho_bar) {
        return Err(Error::Degree(rho_bar));
    }
    let check = solvability_check(rows);
    if !check.solvable || check.rho_bar != RelativeDegree::Finite(rho_bar) {
        return Err(Error::Degree(rho_bar));
    }
    let a = ego.system_matrix();
    let b = ego.input_matrix();
    let x = inputs.ego_state.to_vector();
    let xh = inputs.ego_predicted.to_vector();
    let (h, hb) = (&rows.h, &rows.h_bar);
    let id = Matrix3::identity();
    let a2 = a * a;
    let a3 = a2 * a;

    let e = inputs.delta - row_times(h, &id, &x) - row_times(hb, &id, &xh);
    let relative_accel = || {
        inputs
            .predecessor_a
            .map(|ap| ap - inputs.ego_state.a)
            .ok_or(Error::Channel("predecessor acceleration"))
    };
    let u = match rho_bar {
        1 => {
            let rhs = inputs.delta_dot - row_times(h, &a, &x) - row_times(hb, &a, &xh) + gains.k_p * e;
            rhs / (hb * b)[0]
        }
        2 => {
            let e_dot = inputs.delta_dot - row_times(h, &a, &x) - row_times(hb, &a, &xh);
            let rhs =
                relative_accel()? - row_times(h, &a2, &x) - row_times(hb, &a2, &xh) + gains.k_p * e + gains.k_d * e_dot;
            rhs / (hb * a * b)[0]
        }
        _ => {
            let pred = predecessor.ok_or(Error::Channel("predecessor parameters"))?;
            let a_prev = inputs.predecessor_a.ok_or(Error::Channel("predecessor acceleration"))?;
            let u_prev = inputs
                .predecessor_u_delayed
                .ok_or(Error::Channel("predecessor delayed input"))?;
            let e_dot = inputs.delta_dot - row_times(h, &a, &x) - row_times(hb, &a, &xh);
            let e_ddot = relative_accel()? - row_times(h, &a2, &x) - row_times(hb, &a2, &xh);
            // third derivative of -q_i cancels against H A^3 x + H A^2 B u_del
            let ego_terms = if *h == RowVector3::new(-1.0, 0.0, 0.0) {
                0.0
            } else {
                let u_del = inputs.ego_u_delayed.ok_or(Error::Channel("ego delayed input"))?;
                let jerk = (u_del - inputs.ego_state.a) / ego.tau;
                -jerk - row_times(h, &a3, &x) - (h * a2 * b)[0] * u_del
            };
            let rhs = (u_prev - a_prev) / pred.tau + ego_terms - row_times(hb, &a3, &xh)
                + gains.k_p * e
                + gains.k_d * e_dot
                + gains.k_dd * e_ddot;
            rhs / (hb * a2 * b)[0]
        }
    };
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const TAU: f64 = 0.067;

    fn params() -> VehicleParams {
        VehicleParams::new(TAU, 0.15).unwrap()
    }

    fn dch_spec() -> ControllerSpec {
        let policy = SpacingPolicy::delayed_constant_headway(0.4).unwrap();
        ControllerSpec::new(policy, ControllerGains::new(0.2, 0.7 - TAU * 0.2, 0.0), params(), None).unwrap()
    }

    fn ext_spec(k_p: f64) -> ControllerSpec {
        let policy = SpacingPolicy::delayed_extended(1.2, 0.25).unwrap();
        ControllerSpec::new(policy, ControllerGains::new(k_p, 0.0, 0.0), params(), None).unwrap()
    }

    fn dc_spec(pred: VehicleParams) -> ControllerSpec {
        let gains = ControllerGains::new(1.0 / TAU, 3.0 / TAU, 3.0 / TAU);
        ControllerSpec::new(SpacingPolicy::delayed_constant(), gains, params(), Some(pred)).unwrap()
    }

    fn resting() -> ControlInputs {
        ControlInputs {
            predecessor_v: Some(0.0),
            predecessor_a: Some(0.0),
            predecessor_u_delayed: Some(0.0),
            ..Default::default()
        }
    }

    fn random_inputs(rng: &mut ChaCha8Rng) -> ControlInputs {
        let mut s = || {
            VehicleState::new(
                rng.random_range(-50.0..50.0),
                rng.random_range(-5.0..30.0),
                rng.random_range(-3.0..3.0),
            )
        };
        let (ego_state, ego_predicted) = (s(), s());
        ControlInputs {
            ego_state,
            ego_predicted,
            delta: rng.random_range(-5.0..60.0),
            delta_dot: rng.random_range(-5.0..5.0),
            predecessor_v: Some(rng.random_range(-5.0..30.0)),
            predecessor_a: Some(rng.random_range(-3.0..3.0)),
            predecessor_u_delayed: Some(rng.random_range(-3.0..3.0)),
            ego_u_delayed: Some(rng.random_range(-3.0..3.0)),
        }
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
    }

    #[test]
    fn equilibria_give_zero() {
        assert_eq!(dch_spec().control(&resting()).unwrap(), 0.0);
        assert_eq!(ext_spec(0.2).control(&resting()).unwrap(), 0.0);
        assert_eq!(dc_spec(params()).control(&resting()).unwrap(), 0.0);
    }

    #[test]
    fn feedforward_holds_predicted_acceleration() {
        let alpha = 0.7;
        let mut inputs = resting();
        inputs.ego_predicted.a = alpha;
        // delayed constant: e'' = a_prev - a_hat must vanish too
        inputs.predecessor_a = Some(alpha);
        inputs.predecessor_u_delayed = Some(alpha);
        assert!(close(dc_spec(params()).control(&inputs).unwrap(), alpha));

        let mut inputs = resting();
        inputs.ego_predicted.a = alpha;
        inputs.delta = 0.4 * inputs.ego_predicted.v;
        inputs.delta_dot = 0.4 * alpha;
        assert!(close(dch_spec().control(&inputs).unwrap(), alpha));
    }

    #[test]
    fn table_tuning_examples() {
        let mut unit_error = resting();
        unit_error.delta = 1.0;
        let u = dch_spec().control(&unit_error).unwrap();
        assert!((u - 0.0335).abs() < 1e-15);

        let mut gap = resting();
        gap.delta_dot = 1.0;
        // keep e = 0: delta = h_v v + h_a a_hat = 0
        let u = ext_spec(0.2).control(&gap).unwrap();
        assert!((u - 0.268).abs() < 1e-15);
    }

    #[test]
    fn extended_with_kp_inverse_tau_drops_prediction() {
        let spec = ext_spec(1.0 / TAU);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let inputs = random_inputs(&mut rng);
            let u = spec.control(&inputs).unwrap();
            let x = inputs.ego_state;
            // the position term carries 1 / h_a, not tau / h_a
            let reduced = TAU / 0.25 * (inputs.delta_dot - 1.2 * x.a) + (inputs.delta - 1.2 * x.v) / 0.25;
            assert!(close(u, reduced), "{u} vs {reduced}");
        }
    }

    #[test]
    fn missing_channels() {
        let mut inputs = resting();
        inputs.predecessor_a = None;
        assert_eq!(
            dch_spec().control(&inputs),
            Err(Error::Channel("predecessor acceleration"))
        );
        let mut inputs = resting();
        inputs.predecessor_u_delayed = None;
        assert!(matches!(dc_spec(params()).control(&inputs), Err(Error::Channel(_))));
        // the extended controller needs no V2V data
        assert!(ext_spec(0.2).control(&ControlInputs::default()).is_ok());
    }

    #[test]
    fn wrong_kind_rejected() {
        let spec = ext_spec(0.2);
        assert!(control_delayed_constant_headway(&spec, &resting()).is_err());
    }

    #[test]
    fn gain_validation() {
        let table = ControllerGains::new(1.0 / TAU, 3.0 / TAU, 3.0 / TAU);
        assert!(validate_gains(3, &table).is_empty());
        assert!((table.k_p * table.k_d - 3.0 / (TAU * TAU)).abs() < 1e-9);
        const { assert!(3.0 / (TAU * TAU) > 668.0 && 3.0 / TAU < 45.0) };
        assert_eq!(validate_gains(3, &ControllerGains::new(1.0, 1.0, 1.0)).len(), 1);
        assert!(validate_gains(2, &ControllerGains::new(0.2, 0.5, 0.0)).is_empty());
        assert!(validate_gains(1, &ControllerGains::new(0.2, 0.0, 0.0)).is_empty());
        assert!(!validate_gains(1, &ControllerGains::new(0.0, 0.0, 0.0)).is_empty());
        assert!(!validate_gains(4, &table).is_empty());
        // s^3 + s^2 + 2 s + 1: Hurwitz although k_p k_d = 1 = k_dd
        assert!(validate_gains(3, &ControllerGains::new(1.0, 2.0, 1.0)).is_empty());
        // s^3 + s^2 + s + 3: not Hurwitz although k_p k_d = 3 > k_dd = 1
        assert!(!validate_gains(3, &ControllerGains::new(3.0, 1.0, 1.0)).is_empty());
    }

    #[test]
    fn generic_matches_specialized() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let pred = VehicleParams::new(0.1, 0.2).unwrap();
        for spec in [ext_spec(0.2), dch_spec(), dc_spec(pred)] {
            let rows = spec.policy.rows();
            for _ in 0..200 {
                let inputs = random_inputs(&mut rng);
                let u = spec.control(&inputs).unwrap();
                let g = generic_rho_controller(
                    &rows,
                    spec.rho_bar(),
                    &spec.gains,
                    &inputs,
                    &spec.ego,
                    spec.predecessor.as_ref(),
                )
                .unwrap();
                assert!(close(u, g), "{:?}: {u} vs {g}", spec.policy.kind);
            }
        }
    }

    #[test]
    fn generic_rejects_bad_degree() {
        let spec = ext_spec(0.2);
        let rows = spec.policy.rows();
        let r = generic_rho_controller(&rows, 4, &spec.gains, &resting(), &spec.ego, None);
        assert_eq!(r, Err(Error::Degree(4)));
        let r = generic_rho_controller(&rows, 2, &spec.gains, &resting(), &spec.ego, None);
        assert_eq!(r, Err(Error::Degree(2)));
    }
}
