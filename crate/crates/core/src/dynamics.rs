//! Third-order longitudinal vehicle model with an actuator input delay.
//!
//! Each vehicle obeys `q' = v`, `v' = a`, `a' = (u(t - phi) - a) / tau`. The
//! system matrix is upper triangular, so its exponential and the zero-order
//! hold input integral have short closed forms that are used directly.

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};

/// Relative tolerance used when deciding that `phi / ts` is an integer.
const GRANULARITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VehicleParams {
    /// Engine time constant in seconds.
    pub tau: f64,
    /// Actuator input delay in seconds.
    pub phi: f64,
}

impl VehicleParams {
    pub fn new(tau: f64, phi: f64) -> Result<Self> {
        if !tau.is_finite() || !phi.is_finite() {
            return Err(Error::NonFinite("vehicle parameters"));
        }
        if tau <= 0.0 {
            return Err(Error::InvalidParameter(format!("tau must be positive, got {tau}")));
        }
        if phi < 0.0 {
            return Err(Error::InvalidParameter(format!("phi must be non-negative, got {phi}")));
        }
        Ok(Self { tau, phi })
    }

    /// Continuous-time system matrix acting on `(q, v, a)`.
    pub fn system_matrix(&self) -> Matrix3<f64> {
        Matrix3::new(
            0.0,
            1.0,
            0.0, //
            0.0,
            0.0,
            1.0, //
            0.0,
            0.0,
            -1.0 / self.tau,
        )
    }

    pub fn input_matrix(&self) -> Vector3<f64> {
        Vector3::new(0.0, 0.0, 1.0 / self.tau)
    }
}

/// Position, velocity and acceleration of one vehicle.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct VehicleState {
    pub q: f64,
    pub v: f64,
    pub a: f64,
}

impl VehicleState {
    pub const ZERO: Self = Self { q: 0.0, v: 0.0, a: 0.0 };

    pub fn new(q: f64, v: f64, a: f64) -> Self {
        Self { q, v, a }
    }

    pub fn to_vector(self) -> Vector3<f64> {
        Vector3::new(self.q, self.v, self.a)
    }

    pub fn from_vector(x: &Vector3<f64>) -> Self {
        Self {
            q: x[0],
            v: x[1],
            a: x[2],
        }
    }

    pub fn is_finite(&self) -> bool {
        self.q.is_finite() && self.v.is_finite() && self.a.is_finite()
    }

    /// Largest absolute component-wise difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.q - other.q)
            .abs()
            .max((self.v - other.v).abs())
            .max((self.a - other.a).abs())
    }
}

/// Number of whole samples covering the delay `phi` at period `ts`.
pub fn delay_steps(phi: f64, ts: f64) -> Result<usize> {
    if !(ts > 0.0) || !ts.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "sample period must be positive, got {ts}"
        )));
    }
    let ratio = phi / ts;
    let n = ratio.round();
    if (ratio - n).abs() > GRANULARITY_TOL * ratio.max(1.0) {
        return Err(Error::DelayGranularity { phi, ts });
    }
    Ok(n as usize)
}

/// `e^{A t}` for the vehicle model, in closed form.
pub fn matrix_exponential(params: &VehicleParams, t: f64) -> Result<Matrix3<f64>> {
    if !t.is_finite() {
        return Err(Error::NonFinite("time"));
    }
    if t < 0.0 {
        return Err(Error::InvalidParameter(format!("time must be non-negative, got {t}")));
    }
    let tau = params.tau;
    // 1 - e^{-t/tau} without cancellation for small t
    let one_minus = -(-t / tau).exp_m1();
    Ok(Matrix3::new(
        1.0,
        t,
        tau * t - tau * tau * one_minus, //
        0.0,
        1.0,
        tau * one_minus, //
        0.0,
        0.0,
        (-t / tau).exp(),
    ))
}

/// Exact sampled-data model `x[k+1] = Phi x[k] + Gamma u[k - d]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteModel {
    pub phi: Matrix3<f64>,
    pub gamma: Vector3<f64>,
    pub ts: f64,
    /// Delay in samples, `d = phi / ts`.
    pub delay_steps: usize,
    pub params: VehicleParams,
}

/// Zero-order-hold discretization of the delayed vehicle model.
pub fn discretize(params: &VehicleParams, ts: f64) -> Result<DiscreteModel> {
    let delay_steps = delay_steps(params.phi, ts)?;
    let tau = params.tau;
    let one_minus = -(-ts / tau).exp_m1();
    // integral of e^{A s} B over [0, ts]
    let gamma = Vector3::new(
        ts * ts / 2.0 - tau * ts + tau * tau * one_minus,
        ts - tau * one_minus,
        one_minus,
    );
    Ok(DiscreteModel {
        phi: matrix_exponential(params, ts)?,
        gamma,
        ts,
        delay_steps,
        params: *params,
    })
}

impl DiscreteModel {
    /// Advances one sample with the input that is effective over the interval.
    pub fn step(&self, x: &VehicleState, u_delayed: f64) -> VehicleState {
        VehicleState::from_vector(&(self.phi * x.to_vector() + self.gamma * u_delayed))
    }
}

/// Ring buffer of past inputs over the delay window `[t - phi, t)`.
///
/// Samples are indexed from the most recent: `get(1)` is `u[k-1]` and
/// `get(depth)` is `u[k-d]`, which is the input acting on the plant now.
#[derive(Debug, Clone, PartialEq)]
pub struct InputHistory {
    samples: std::collections::VecDeque<f64>,
    sample_period: f64,
}

impl InputHistory {
    pub fn constant(depth: usize, sample_period: f64, value: f64) -> Self {
        Self {
            samples: std::iter::repeat_n(value, depth).collect(),
            sample_period,
        }
    }

    pub fn zeros(depth: usize, sample_period: f64) -> Self {
        Self::constant(depth, sample_period, 0.0)
    }

    /// Builds a history from samples ordered most recent first.
    pub fn from_recent(samples: Vec<f64>, sample_period: f64) -> Self {
        Self {
            samples: samples.into(),
            sample_period,
        }
    }

    pub fn depth(&self) -> usize {
        self.samples.len()
    }

    pub fn sample_period(&self) -> f64 {
        self.sample_period
    }

    /// `u[k-j]` for `1 <= j <= depth`.
    pub fn get(&self, j: usize) -> Option<f64> {
        j.checked_sub(1).and_then(|i| self.samples.get(i).copied())
    }

    /// Input currently driving the plant; `None` when the delay is zero.
    pub fn effective(&self) -> Option<f64> {
        self.samples.back().copied()
    }

    /// Most recent first.
    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().copied()
    }

    /// Records `u[k]` and returns `u[k-d]`, the input applied over the
    /// coming sample interval.
    pub fn push(&mut self, u: f64) -> f64 {
        if self.samples.is_empty() {
            return u;
        }
        self.samples.push_front(u);
        self.samples.pop_back().expect("non-empty history")
    }
}

/// Acceleration of a vehicle starting at rest with an all-zero input
/// history and a step of `u_amplitude` issued at `t = 0`.
pub fn open_loop_step_response(
    params: &VehicleParams,
    u_amplitude: f64,
    horizon: f64,
    ts: f64,
) -> Result<Vec<(f64, VehicleState)>> {
    let model = discretize(params, ts)?;
    let n = (horizon / ts).round() as usize;
    let mut history = InputHistory::zeros(model.delay_steps, ts);
    let mut x = VehicleState::ZERO;
    let mut out = Vec::with_capacity(n + 1);
    for k in 0..=n {
        out.push((k as f64 * ts, x));
        let applied = history.push(u_amplitude);
        x = model.step(&x, applied);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const TAU: f64 = 0.067;

    fn factorial_series_exp(m: &Matrix3<f64>, terms: usize) -> Matrix3<f64> {
        let mut sum = Matrix3::identity();
        let mut term = Matrix3::identity();
        for k in 1..=terms {
            term = term * m / k as f64;
            sum += term;
        }
        sum
    }

    #[test]
    fn exponential_at_zero_is_identity() {
        let p = VehicleParams::new(TAU, 0.15).unwrap();
        assert_eq!(matrix_exponential(&p, 0.0).unwrap(), Matrix3::identity());
    }

    #[test]
    fn exponential_asymptotes() {
        let p = VehicleParams::new(1.0, 0.0).unwrap();
        let t = 60.0;
        let e = matrix_exponential(&p, t).unwrap();
        assert_relative_eq!(e[(0, 2)], t - 1.0, epsilon = 1e-12);
        assert_relative_eq!(e[(1, 2)], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn exponential_matches_taylor_series() {
        let p = VehicleParams::new(TAU, 0.15).unwrap();
        let t = 0.01;
        let series = factorial_series_exp(&(p.system_matrix() * t), 30);
        let closed = matrix_exponential(&p, t).unwrap();
        for (s, c) in series.iter().zip(closed.iter()) {
            assert!((s - c).abs() <= 1e-12 * s.abs().max(1e-300), "{s} vs {c}");
        }
    }

    #[test]
    fn exponential_rejects_bad_time() {
        let p = VehicleParams::new(TAU, 0.0).unwrap();
        assert!(matrix_exponential(&p, f64::NAN).is_err());
        assert!(matrix_exponential(&p, -1.0).is_err());
    }

    #[test]
    fn params_reject_invalid() {
        assert!(VehicleParams::new(0.0, 0.1).is_err());
        assert!(VehicleParams::new(0.1, -0.1).is_err());
        assert!(VehicleParams::new(f64::INFINITY, 0.1).is_err());
    }

    #[test]
    fn discrete_structure() {
        let p = VehicleParams::new(TAU, 0.15).unwrap();
        let m = discretize(&p, 0.01).unwrap();
        assert_eq!(m.delay_steps, 15);
        assert_eq!(m.phi[(0, 1)], 0.01);
        assert_eq!(m.phi[(0, 0)], 1.0);
        assert_eq!(m.phi[(1, 1)], 1.0);
        assert_eq!(m.phi[(1, 0)], 0.0);
        assert_eq!(m.phi[(2, 0)], 0.0);
        assert_eq!(m.phi[(2, 1)], 0.0);
        assert_eq!(m.phi[(2, 2)], (-0.01 / TAU).exp());
    }

    #[test]
    fn tiny_period_gives_identity_and_no_input() {
        let p = VehicleParams::new(TAU, 0.0).unwrap();
        let m = discretize(&p, 1e-12).unwrap();
        assert!((m.phi - Matrix3::identity()).abs().max() < 1e-10);
        assert!(m.gamma.abs().max() < 1e-10);
    }

    #[test]
    fn gamma_matches_simpson_quadrature() {
        let p = VehicleParams::new(TAU, 0.0).unwrap();
        let ts = 0.01;
        let panels = 10_000;
        let h = ts / panels as f64;
        let b = p.input_matrix();
        let a = p.system_matrix();
        let integrand = |s: f64| factorial_series_exp(&(a * s), 30) * b;
        let mut acc = integrand(0.0) + integrand(ts);
        for i in 1..panels {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += integrand(i as f64 * h) * w;
        }
        let quad = acc * (h / 3.0);
        let m = discretize(&p, ts).unwrap();
        for i in 0..3 {
            assert!(
                (quad[i] - m.gamma[i]).abs() <= 1e-10,
                "{i}: {} vs {}",
                quad[i],
                m.gamma[i]
            );
        }
    }

    #[test]
    fn step_matches_augmented_exponential() {
        // Holding u constant makes (x, u) an autonomous 4-state system.
        for &(tau, ts) in &[(0.067, 0.01), (0.5, 0.02), (2.0, 0.1)] {
            let p = VehicleParams::new(tau, 0.0).unwrap();
            let m = discretize(&p, ts).unwrap();
            let mut aug = nalgebra::Matrix4::<f64>::zeros();
            aug.fixed_view_mut::<3, 3>(0, 0).copy_from(&p.system_matrix());
            aug.fixed_view_mut::<3, 1>(0, 3).copy_from(&p.input_matrix());
            let mut e = nalgebra::Matrix4::identity();
            let mut term = nalgebra::Matrix4::identity();
            for k in 1..=40 {
                term = term * aug * ts / k as f64;
                e += term;
            }
            let x0 = VehicleState::new(1.5, -2.0, 0.7);
            let u = 0.3;
            let exact = e * nalgebra::Vector4::new(x0.q, x0.v, x0.a, u);
            let stepped = m.step(&x0, u);
            assert!((stepped.q - exact[0]).abs() < 1e-12);
            assert!((stepped.v - exact[1]).abs() < 1e-12);
            assert!((stepped.a - exact[2]).abs() < 1e-12);
        }
    }

    #[test]
    fn step_equilibrium_and_coasting() {
        let p = VehicleParams::new(TAU, 0.0).unwrap();
        let m = discretize(&p, 0.01).unwrap();
        assert_eq!(m.step(&VehicleState::ZERO, 0.0), VehicleState::ZERO);
        let x = m.step(&VehicleState::new(0.0, 5.0, 0.0), 0.0);
        assert_relative_eq!(x.q, 0.05, epsilon = 1e-15);
        assert_eq!(x.v, 5.0);
        assert_eq!(x.a, 0.0);
    }

    #[test]
    fn held_input_gives_first_order_acceleration() {
        let p = VehicleParams::new(TAU, 0.0).unwrap();
        let m = discretize(&p, 0.01).unwrap();
        let mut x = VehicleState::ZERO;
        for _ in 0..100 {
            x = m.step(&x, 1.0);
        }
        assert!((x.a - (1.0 - (-1.0f64 / TAU).exp())).abs() < 1e-12);
    }

    #[test]
    fn non_integer_delay_rejected() {
        let p = VehicleParams::new(TAU, 0.15).unwrap();
        assert_eq!(
            discretize(&p, 0.02).unwrap_err(),
            Error::DelayGranularity { phi: 0.15, ts: 0.02 }
        );
        assert_eq!(delay_steps(0.0, 0.01).unwrap(), 0);
    }

    #[test]
    fn step_response_delay_and_rise() {
        let p = VehicleParams::new(TAU, 0.15).unwrap();
        let resp = open_loop_step_response(&p, 1.0, 1.0, 0.001).unwrap();
        assert_eq!(resp[149].1.a, 0.0);
        let k = 217;
        assert!((resp[k].0 - 0.217).abs() < 1e-12);
        assert!((resp[k].1.a - (1.0 - (-1.0f64).exp())).abs() < 1e-9);
        let zero = open_loop_step_response(&p, 0.0, 1.0, 0.01).unwrap();
        assert!(zero.iter().all(|(_, x)| *x == VehicleState::ZERO));
    }

    #[test]
    fn history_push_returns_oldest() {
        let mut h = InputHistory::from_recent(vec![3.0, 2.0, 1.0], 0.01);
        assert_eq!(h.get(1), Some(3.0));
        assert_eq!(h.get(3), Some(1.0));
        assert_eq!(h.get(0), None);
        assert_eq!(h.effective(), Some(1.0));
        assert_eq!(h.push(4.0), 1.0);
        assert_eq!(h.iter().collect::<Vec<_>>(), vec![4.0, 3.0, 2.0]);
        let mut empty = InputHistory::zeros(0, 0.01);
        assert_eq!(empty.push(7.0), 7.0);
        assert_eq!(empty.depth(), 0);
    }
}
