//! Delayed spacing policies.
//!
//! Every policy is written as `Delta_ref(t) = H x(t) + H_bar x(t + phi)`,
//! where `x = (q, v, a)` is the ego state and `x(t + phi)` its exact
//! prediction. The spacing error is `e = Delta - Delta_ref` with
//! `Delta = q_{i-1} - q_i` after the standstill offset is removed.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use nalgebra::RowVector3;

use crate::analysis::{string_stability_sweep, Certificate, Margin, StabilityVerdict, VerdictMethod};
use crate::dynamics::{VehicleParams, VehicleState};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PolicyKind {
    /// `Delta_ref = q(t + phi) - q(t)`.
    DelayedConstant,
    /// `Delta_ref = h_v v(t + phi)`.
    DelayedConstantHeadway,
    /// `Delta_ref = h_v v(t) + h_a a(t + phi)`.
    DelayedExtendedHeadway,
}

impl PolicyKind {
    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::DelayedConstant => "delayed constant",
            PolicyKind::DelayedConstantHeadway => "delayed constant headway",
            PolicyKind::DelayedExtendedHeadway => "delayed extended headway",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpacingPolicy {
    pub kind: PolicyKind,
    /// Velocity headway in seconds; zero for the delayed constant policy.
    pub h_v: f64,
    /// Acceleration headway in seconds squared; zero unless extended.
    pub h_a: f64,
    /// Standstill distance in meters, removed from measured ranges.
    pub standstill: f64,
}

impl SpacingPolicy {
    pub fn delayed_constant() -> Self {
        Self {
            kind: PolicyKind::DelayedConstant,
            h_v: 0.0,
            h_a: 0.0,
            standstill: 0.0,
        }
    }

    pub fn delayed_constant_headway(h_v: f64) -> Result<Self> {
        if !(h_v > 0.0) || !h_v.is_finite() {
            return Err(Error::InvalidParameter(format!("h_v must be positive, got {h_v}")));
        }
        Ok(Self {
            kind: PolicyKind::DelayedConstantHeadway,
            h_v,
            h_a: 0.0,
            standstill: 0.0,
        })
    }

    pub fn delayed_extended(h_v: f64, h_a: f64) -> Result<Self> {
        if !(h_v > 0.0) || !h_v.is_finite() {
            return Err(Error::InvalidParameter(format!("h_v must be positive, got {h_v}")));
        }
        if !(h_a > 0.0) || !h_a.is_finite() {
            return Err(Error::InvalidParameter(format!("h_a must be positive, got {h_a}")));
        }
        Ok(Self {
            kind: PolicyKind::DelayedExtendedHeadway,
            h_v,
            h_a,
            standstill: 0.0,
        })
    }

    pub fn with_standstill(mut self, standstill: f64) -> Result<Self> {
        if !(standstill >= 0.0) || !standstill.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "standstill must be >= 0, got {standstill}"
            )));
        }
        self.standstill = standstill;
        Ok(self)
    }

    pub fn rows(&self) -> PolicyRows {
        policy_rows(self)
    }

    /// `Delta_ref = H x + H_bar x_hat`, without the standstill offset.
    pub fn reference(&self, ego: &VehicleState, predicted: &VehicleState) -> f64 {
        let rows = self.rows();
        rows.h.dot(&ego.to_vector().transpose()) + rows.h_bar.dot(&predicted.to_vector().transpose())
    }
}

/// Row vectors multiplying the current and predicted ego state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolicyRows {
    pub h: RowVector3<f64>,
    pub h_bar: RowVector3<f64>,
}

pub fn policy_rows(policy: &SpacingPolicy) -> PolicyRows {
    match policy.kind {
        PolicyKind::DelayedConstant => PolicyRows {
            h: RowVector3::new(-1.0, 0.0, 0.0),
            h_bar: RowVector3::new(1.0, 0.0, 0.0),
        },
        PolicyKind::DelayedConstantHeadway => PolicyRows {
            h: RowVector3::zeros(),
            h_bar: RowVector3::new(0.0, policy.h_v, 0.0),
        },
        PolicyKind::DelayedExtendedHeadway => PolicyRows {
            h: RowVector3::new(0.0, policy.h_v, 0.0),
            h_bar: RowVector3::new(0.0, 0.0, policy.h_a),
        },
    }
}

/// Relative degree of the spacing error with respect to the current or
/// the delayed input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RelativeDegree {
    Finite(u32),
    Infinite,
}

impl fmt::Display for RelativeDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RelativeDegree::Finite(k) => write!(f, "{k}"),
            RelativeDegree::Infinite => f.write_str("inf"),
        }
    }
}

/// Smallest `k` with `h A^{k-1} B != 0`.
///
/// With the chain-of-integrators structure, `h B = h_3 / tau`,
/// `h A B = h_2 / tau - h_3 / tau^2` and `h A^2 B = h_1 / tau - ...`, so the
/// degree is fixed by the last structurally nonzero entry of `h`. No
/// floating-point comparison of the products against zero is involved.
fn row_degree(h: &RowVector3<f64>) -> RelativeDegree {
    if h[2] != 0.0 {
        RelativeDegree::Finite(1)
    } else if h[1] != 0.0 {
        RelativeDegree::Finite(2)
    } else if h[0] != 0.0 {
        RelativeDegree::Finite(3)
    } else {
        RelativeDegree::Infinite
    }
}

/// `(rho, rho_bar)` for the current and delayed-input rows.
pub fn relative_degrees(rows: &PolicyRows) -> (RelativeDegree, RelativeDegree) {
    (row_degree(&rows.h), row_degree(&rows.h_bar))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solvability {
    pub solvable: bool,
    pub rho: RelativeDegree,
    pub rho_bar: RelativeDegree,
    pub reason: String,
}

/// Whether perfect tracking is achievable by a controller that uses only
/// current predecessor information: `rho_bar < rho`, or `rho_bar = 3` with
/// `H x = -q`.
pub fn solvability_check(rows: &PolicyRows) -> Solvability {
    let (rho, rho_bar) = relative_degrees(rows);
    let minus_q = rows.h == RowVector3::new(-1.0, 0.0, 0.0);
    let (solvable, reason) = if rho_bar < rho {
        (true, format!("rho_bar = {rho_bar} < rho = {rho}"))
    } else if rho_bar == RelativeDegree::Finite(3) && minus_q {
        (true, "rho_bar = 3 and H x = -q".to_string())
    } else if rho_bar == RelativeDegree::Finite(3) {
        (false, format!("rho_bar = 3 but H x != -q (rho = {rho})"))
    } else {
        (false, format!("rho_bar = {rho_bar} is not below rho = {rho}"))
    };
    Solvability {
        solvable,
        rho,
        rho_bar,
        reason,
    }
}

/// Signals available to evaluate the spacing error and its derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SpacingMeasurement {
    /// Range to the predecessor with the standstill distance removed.
    pub delta: f64,
    /// Range rate `v_{i-1} - v_i`.
    pub delta_dot: f64,
    pub predecessor_a: Option<f64>,
    pub ego: VehicleState,
    /// Ego state at `t + phi`.
    pub predicted: VehicleState,
    /// `da/dt` at `t`, `(u(t - phi) - a(t)) / tau`.
    pub ego_jerk: Option<f64>,
    /// `da/dt` at `t + phi`, `(u(t) - a(t + phi)) / tau`.
    pub predicted_jerk: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpacingError {
    pub e: f64,
    pub e_dot: Option<f64>,
    pub e_ddot: Option<f64>,
}

/// Spacing error from the per-policy expressions.
pub fn spacing_error(policy: &SpacingPolicy, m: &SpacingMeasurement) -> SpacingError {
    let (x, xh) = (&m.ego, &m.predicted);
    let rel_accel = m.predecessor_a.map(|ap| ap - x.a);
    match policy.kind {
        PolicyKind::DelayedConstant => SpacingError {
            e: m.delta - (xh.q - x.q),
            e_dot: Some(m.delta_dot - (xh.v - x.v)),
            e_ddot: rel_accel.map(|r| r - (xh.a - x.a)),
        },
        PolicyKind::DelayedConstantHeadway => {
            let h_v = policy.h_v;
            SpacingError {
                e: m.delta - h_v * xh.v,
                e_dot: Some(m.delta_dot - h_v * xh.a),
                e_ddot: rel_accel.zip(m.predicted_jerk).map(|(r, j)| r - h_v * j),
            }
        }
        PolicyKind::DelayedExtendedHeadway => {
            let (h_v, h_a) = (policy.h_v, policy.h_a);
            SpacingError {
                e: m.delta - h_v * x.v - h_a * xh.a,
                e_dot: m.predicted_jerk.map(|j| m.delta_dot - h_v * x.a - h_a * j),
                // needs the derivative of the predicted jerk
                e_ddot: None,
            }
        }
    }
}

/// Spacing error from the row representation, differentiating the
/// position chain `(q, v, a, jerk)` term by term.
pub fn spacing_error_from_rows(rows: &PolicyRows, m: &SpacingMeasurement) -> SpacingError {
    let chain = [Some(m.ego.q), Some(m.ego.v), Some(m.ego.a), m.ego_jerk];
    let chain_hat = [
        Some(m.predicted.q),
        Some(m.predicted.v),
        Some(m.predicted.a),
        m.predicted_jerk,
    ];
    let delta = [Some(m.delta), Some(m.delta_dot), m.predecessor_a.map(|ap| ap - m.ego.a)];
    let derivative = |order: usize| -> Option<f64> {
        let mut value = delta[order]?;
        for (row, signal) in [(&rows.h, &chain), (&rows.h_bar, &chain_hat)] {
            for col in 0..3 {
                if row[col] != 0.0 {
                    value -= row[col] * (*signal.get(col + order)?)?;
                }
            }
        }
        Some(value)
    };
    SpacingError {
        e: derivative(0).expect("position chain always available"),
        e_dot: derivative(1),
        e_ddot: derivative(2),
    }
}

/// Relative band around a properness boundary that is reported as not
/// proper, so that points computed on the boundary do not flip with
/// rounding.
pub const BOUNDARY_GUARD: f64 = 1e-12;

fn extended_coordinates(policy: &SpacingPolicy, params: &VehicleParams) -> (f64, f64) {
    (
        params.phi * policy.h_v / policy.h_a,
        params.phi * params.phi / policy.h_a,
    )
}

/// Margins of the two extended-headway inequalities at a normalized
/// frequency `omega` in `(0, pi/2)`: `omega sin(omega) - phi h_v / h_a` and
/// `omega^2 cos(omega) - phi^2 / h_a`.
pub fn extended_headway_margins(policy: &SpacingPolicy, params: &VehicleParams, omega: f64) -> [f64; 2] {
    let (x, y) = extended_coordinates(policy, params);
    [omega * omega.sin() - x, omega * omega * omega.cos() - y]
}

/// Unique `w` in `(0, pi/2)` with `w sin(w) = x`, for `0 < x < pi/2`.
fn boundary_frequency(x: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, FRAC_PI_2);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid * mid.sin() < x {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Frequency in `(0, pi/2)` maximizing the smaller of the two extended
/// inequality margins: grid search, then golden-section refinement.
fn best_extended_witness(policy: &SpacingPolicy, params: &VehicleParams) -> (f64, [f64; 2]) {
    let joint = |w: f64| {
        let m = extended_headway_margins(policy, params, w);
        m[0].min(m[1])
    };
    let n = 2048;
    let grid = |k: usize| FRAC_PI_2 * k as f64 / n as f64;
    let k_best = (1..n)
        .max_by(|&a, &b| joint(grid(a)).total_cmp(&joint(grid(b))))
        .unwrap_or(1);
    let (mut a, mut b) = (grid(k_best - 1), grid(k_best + 1));
    let r = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..100 {
        let c = b - r * (b - a);
        let d = a + r * (b - a);
        if joint(c) >= joint(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let w = 0.5 * (a + b);
    (w, extended_headway_margins(policy, params, w))
}

/// Properness of the spacing policy from the closed-form characterizations.
///
/// For the extended policy the internal dynamics are stable exactly when
/// `(phi h_v / h_a, phi^2 / h_a)` lies strictly below the boundary curve
/// `(w sin w, w^2 cos w)`, `w` in `(0, pi/2)`. Because `w sin w` is
/// increasing there, the test is evaluated at the unique `w` with
/// `w sin w = phi h_v / h_a`. A satisfying point also satisfies both
/// margins of [`extended_headway_margins`] at some frequency; that
/// frequency is reported as the witness.
pub fn is_proper(policy: &SpacingPolicy, params: &VehicleParams) -> StabilityVerdict {
    let phi = params.phi;
    match policy.kind {
        PolicyKind::DelayedConstant => StabilityVerdict::from_margins(Vec::new(), None, true),
        PolicyKind::DelayedConstantHeadway => StabilityVerdict::from_margins(
            vec![Margin {
                name: "h_v pi - 2 phi",
                value: policy.h_v * PI - 2.0 * phi - BOUNDARY_GUARD * policy.h_v * PI,
            }],
            None,
            true,
        ),
        PolicyKind::DelayedExtendedHeadway => {
            if phi == 0.0 {
                // h_a s^2 + h_v s + 1 is Hurwitz for positive headways
                return StabilityVerdict::from_margins(Vec::new(), None, true);
            }
            let (x, y) = extended_coordinates(policy, params);
            if x >= FRAC_PI_2 {
                return StabilityVerdict::from_margins(
                    vec![Margin {
                        name: "pi/2 - phi h_v / h_a",
                        value: FRAC_PI_2 - x,
                    }],
                    None,
                    true,
                );
            }
            let w = boundary_frequency(x);
            let curve = w * w * w.cos();
            let below_curve = Margin {
                name: "boundary - phi^2 / h_a",
                value: curve - y - BOUNDARY_GUARD * curve.max(y),
            };
            if below_curve.value <= 0.0 {
                return StabilityVerdict::from_margins(vec![below_curve], Some(w), true);
            }
            let (witness, [m1, m2]) = best_extended_witness(policy, params);
            StabilityVerdict::from_margins(
                vec![
                    below_curve,
                    Margin {
                        name: "w sin w - phi h_v / h_a",
                        value: m1,
                    },
                    Margin {
                        name: "w^2 cos w - phi^2 / h_a",
                        value: m2,
                    },
                ],
                Some(witness),
                true,
            )
        }
    }
}

/// String stability of the platoon under perfect tracking.
///
/// Closed-form where a characterization exists; for the extended policy
/// the sufficient condition `h_a >= 2 h_v phi`, `h_v^2 >= 2 h_a` is tried
/// first and the frequency sweep decides otherwise. A policy that is not
/// proper has an unstable velocity transfer and is reported unstable.
pub fn is_string_stable(policy: &SpacingPolicy, params: &VehicleParams) -> StabilityVerdict {
    let phi = params.phi;
    match policy.kind {
        PolicyKind::DelayedConstant => StabilityVerdict {
            stable: true,
            certificate: Certificate::PeakMagnitude {
                omega: 0.0,
                magnitude: 1.0,
            },
            method: VerdictMethod::ClosedForm,
        },
        PolicyKind::DelayedConstantHeadway => StabilityVerdict::from_margins(
            vec![Margin {
                name: "h_v - 2 phi",
                value: policy.h_v - 2.0 * phi,
            }],
            None,
            false,
        ),
        PolicyKind::DelayedExtendedHeadway => {
            let (h_v, h_a) = (policy.h_v, policy.h_a);
            let sufficient = StabilityVerdict::from_margins(
                vec![
                    Margin {
                        name: "h_a - 2 h_v phi",
                        value: h_a - 2.0 * h_v * phi,
                    },
                    Margin {
                        name: "h_v^2 - 2 h_a",
                        value: h_v * h_v - 2.0 * h_a,
                    },
                ],
                None,
                false,
            );
            if sufficient.stable {
                return sufficient;
            }
            let proper = is_proper(policy, params);
            if !proper.stable {
                return proper;
            }
            string_stability_sweep(policy, params)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TAU: f64 = 0.067;

    fn params(phi: f64) -> VehicleParams {
        VehicleParams::new(TAU, phi).unwrap()
    }

    #[test]
    fn rows_table() {
        let dc = policy_rows(&SpacingPolicy::delayed_constant());
        assert_eq!(dc.h, RowVector3::new(-1.0, 0.0, 0.0));
        assert_eq!(dc.h_bar, RowVector3::new(1.0, 0.0, 0.0));
        let dch = policy_rows(&SpacingPolicy::delayed_constant_headway(0.4).unwrap());
        assert_eq!(dch.h, RowVector3::zeros());
        assert_eq!(dch.h_bar, RowVector3::new(0.0, 0.4, 0.0));
        let ext = policy_rows(&SpacingPolicy::delayed_extended(1.2, 0.25).unwrap());
        assert_eq!(ext.h, RowVector3::new(0.0, 1.2, 0.0));
        assert_eq!(ext.h_bar, RowVector3::new(0.0, 0.0, 0.25));
    }

    #[test]
    fn degrees_match_markov_products() {
        use RelativeDegree::*;
        let p = params(0.15);
        let (a, b) = (p.system_matrix(), p.input_matrix());
        let literal = |h: &RowVector3<f64>| {
            let mut m = b;
            for k in 1..=3 {
                if (h * m)[0] != 0.0 {
                    return Finite(k);
                }
                m = a * m;
            }
            Infinite
        };
        for policy in [
            SpacingPolicy::delayed_constant(),
            SpacingPolicy::delayed_constant_headway(0.4).unwrap(),
            SpacingPolicy::delayed_extended(1.2, 0.25).unwrap(),
        ] {
            let rows = policy.rows();
            assert_eq!(relative_degrees(&rows), (literal(&rows.h), literal(&rows.h_bar)));
        }
        let dc = SpacingPolicy::delayed_constant().rows();
        assert_eq!(relative_degrees(&dc), (Finite(3), Finite(3)));
        let dch = SpacingPolicy::delayed_constant_headway(0.4).unwrap().rows();
        assert_eq!(relative_degrees(&dch), (Infinite, Finite(2)));
        let ext = SpacingPolicy::delayed_extended(1.2, 0.25).unwrap().rows();
        assert_eq!(relative_degrees(&ext), (Finite(2), Finite(1)));
    }

    #[test]
    fn tiny_headway_is_not_a_structural_zero() {
        let rows = SpacingPolicy::delayed_constant_headway(1e-300).unwrap().rows();
        assert_eq!(relative_degrees(&rows).1, RelativeDegree::Finite(2));
    }

    #[test]
    fn solvability() {
        assert!(solvability_check(&SpacingPolicy::delayed_constant().rows()).solvable);
        assert!(solvability_check(&SpacingPolicy::delayed_constant_headway(0.4).unwrap().rows()).solvable);
        assert!(solvability_check(&SpacingPolicy::delayed_extended(1.2, 0.25).unwrap().rows()).solvable);
        let synthetic = PolicyRows {
            h: RowVector3::new(0.0, 0.0, 1.0),
            h_bar: RowVector3::new(0.0, 1.0, 0.0),
        };
        let s = solvability_check(&synthetic);
        assert!(!s.solvable);
        assert_eq!(
            (s.rho, s.rho_bar),
            (RelativeDegree::Finite(1), RelativeDegree::Finite(2))
        );
        // plain constant headway on current states: H_bar = 0
        let no_prediction = PolicyRows {
            h: RowVector3::new(0.0, 0.4, 0.0),
            h_bar: RowVector3::zeros(),
        };
        assert!(!solvability_check(&no_prediction).solvable);
    }

    #[test]
    fn spacing_error_examples() {
        let dch = SpacingPolicy::delayed_constant_headway(0.4).unwrap();
        let zero = SpacingMeasurement {
            predecessor_a: Some(0.0),
            predicted_jerk: Some(0.0),
            ..Default::default()
        };
        let e = spacing_error(&dch, &zero);
        assert_eq!((e.e, e.e_dot, e.e_ddot), (0.0, Some(0.0), Some(0.0)));

        let predicted = VehicleState::new(3.0, 12.0, 0.0);
        let m = SpacingMeasurement {
            delta: 0.4 * 12.0,
            ego: VehicleState::new(1.0, 12.0, 0.0),
            predicted,
            ..Default::default()
        };
        assert_eq!(spacing_error(&dch, &m).e, 0.0);

        let ext = SpacingPolicy::delayed_extended(1.2, 0.25).unwrap();
        let v = 8.0;
        let steady = SpacingMeasurement {
            delta: 1.2 * v,
            ego: VehicleState::new(0.0, v, 0.0),
            predicted: VehicleState::new(v * 0.15, v, 0.0),
            ..Default::default()
        };
        assert_eq!(spacing_error(&ext, &steady).e, 0.0);
        let gap = SpacingMeasurement { delta: 20.0, ..steady };
        assert!((spacing_error(&ext, &gap).e - (20.0 - 1.2 * v)).abs() < 1e-15);
    }

    #[test]
    fn reference_matches_policy_formulas() {
        let ego = VehicleState::new(2.0, 10.0, 0.5);
        let pred = VehicleState::new(3.6, 10.1, 0.7);
        assert!((SpacingPolicy::delayed_constant().reference(&ego, &pred) - 1.6).abs() < 1e-15);
        let dch = SpacingPolicy::delayed_constant_headway(0.4).unwrap();
        assert!((dch.reference(&ego, &pred) - 0.4 * 10.1).abs() < 1e-15);
        let ext = SpacingPolicy::delayed_extended(1.2, 0.25).unwrap();
        assert!((ext.reference(&ego, &pred) - (12.0 + 0.25 * 0.7)).abs() < 1e-15);
    }

    #[test]
    fn headway_properness() {
        let p = params(0.15);
        assert!(is_proper(&SpacingPolicy::delayed_constant_headway(0.4).unwrap(), &p).stable);
        let boundary = 2.0 * 0.15 / PI;
        assert!(!is_proper(&SpacingPolicy::delayed_constant_headway(boundary).unwrap(), &p).stable);
        assert!(is_proper(&SpacingPolicy::delayed_constant(), &p).stable);
    }

    #[test]
    fn extended_properness_default_tuning() {
        let p = params(0.15);
        let ext = SpacingPolicy::delayed_extended(1.2, 0.25).unwrap();
        let [m1, m2] = extended_headway_margins(&ext, &p, 1.0);
        assert!((m1 - (1.0f64.sin() - 0.72)).abs() < 1e-12 && m1 > 0.0);
        assert!((m2 - (1.0f64.cos() - 0.09)).abs() < 1e-12 && m2 > 0.0);
        let v = is_proper(&ext, &p);
        assert!(v.stable && v.is_consistent());
        match v.certificate {
            Certificate::InequalityMargins {
                omega: Some(w),
                margins,
            } => {
                assert!(w > 0.0 && w < FRAC_PI_2);
                assert!(margins.iter().all(|m| m.value > 0.0));
            }
            other => panic!("unexpected certificate {other:?}"),
        }
    }

    #[test]
    fn extended_point_above_rising_boundary_is_not_proper() {
        // (phi h_v / h_a, phi^2 / h_a) = (0.1, 0.5): both margins hold at
        // w ~ 1.08, yet the point lies above the curve where w sin w = 0.1.
        let phi = 0.15;
        let h_a = phi * phi / 0.5;
        let h_v = 0.1 * h_a / phi;
        let ext = SpacingPolicy::delayed_extended(h_v, h_a).unwrap();
        let p = params(phi);
        let [m1, m2] = extended_headway_margins(&ext, &p, 1.08);
        assert!(m1 > 0.0 && m2 > 0.0);
        assert!(!is_proper(&ext, &p).stable);
    }

    #[test]
    fn string_stability_paths() {
        let p = params(0.15);
        assert!(is_string_stable(&SpacingPolicy::delayed_constant(), &p).stable);
        assert!(is_string_stable(&SpacingPolicy::delayed_constant_headway(0.4).unwrap(), &p).stable);
        assert!(is_string_stable(&SpacingPolicy::delayed_constant_headway(0.3).unwrap(), &p).stable);
        assert!(!is_string_stable(&SpacingPolicy::delayed_constant_headway(0.25).unwrap(), &p).stable);

        let ext = SpacingPolicy::delayed_extended(1.2, 0.25).unwrap();
        let v = is_string_stable(&ext, &p);
        assert_eq!(v.method, VerdictMethod::Sweep);
        assert!(v.stable);

        let sufficient = SpacingPolicy::delayed_extended(2.0, 1.0).unwrap();
        assert_eq!(is_string_stable(&sufficient, &p).method, VerdictMethod::ClosedForm);
    }
}
