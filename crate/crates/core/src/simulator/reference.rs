use nalgebra::{DMatrix, DVector};

use crate::controllers::{validate_gains, ControllerGains};
use crate::error::{Error, Result};

/// Companion matrix of the assigned error dynamics, state
/// `(e, e', ..., e^(rho_bar - 1))`.
pub fn error_companion_matrix(rho_bar: u32, gains: &ControllerGains) -> Result<DMatrix<f64>> {
    let last = match rho_bar {
        1 => vec![-gains.k_p],
        2 => vec![-gains.k_p, -gains.k_d],
        3 => vec![-gains.k_p, -gains.k_d, -gains.k_dd],
        other => return Err(Error::Degree(other)),
    };
    let n = last.len();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n - 1 {
        m[(i, i + 1)] = 1.0;
    }
    for (j, c) in last.into_iter().enumerate() {
        m[(n - 1, j)] = c;
    }
    Ok(m)
}

/// `e(k Ts)` for `k = 0..=round(horizon / Ts)` from `e(0) = e0` with zero
/// initial derivatives, via the exponential of the companion matrix.
pub fn error_dynamics_reference(
    rho_bar: u32,
    gains: &ControllerGains,
    e0: f64,
    horizon: f64,
    ts: f64,
) -> Result<Vec<f64>> {
    let violations = validate_gains(rho_bar, gains);
    if !violations.is_empty() {
        return Err(Error::InvalidParameter(violations.join("; ")));
    }
    if !(ts > 0.0) || !(horizon >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "bad horizon {horizon} or sample period {ts}"
        )));
    }
    let m = error_companion_matrix(rho_bar, gains)?;
    let n = m.nrows();
    let steps = (horizon / ts).round() as usize;
    let mut state = DVector::zeros(n);
    state[0] = e0;
    let mut out = Vec::with_capacity(steps + 1);
    // exact exponential at every sample instead of repeated stepping
    for k in 0..=steps {
        let t = k as f64 * ts;
        out.push(((&m * t).exp() * &state)[0]);
    }
    Ok(out)
}
