use crate::error::{Error, Result};

/// An energy excess counts as a violation only above this fraction of the
/// largest cumulative energy in the logs.
pub const L2_RELATIVE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct PairVerdict {
    pub predecessor: usize,
    pub follower: usize,
    pub holds: bool,
    /// First sample at which the follower's energy exceeds the predecessor's.
    pub first_violation: Option<usize>,
    /// Largest `E_follower(T) - E_predecessor(T)` over all `T`.
    pub worst_excess: f64,
}

fn cumulative_energy(v: &[f64], ts: f64) -> Vec<f64> {
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(v.len());
    out.push(0.0);
    for w in v.windows(2) {
        acc += 0.5 * ts * (w[0] * w[0] + w[1] * w[1]);
        out.push(acc);
    }
    out
}

/// Checks `int_0^T v_i^2 <= int_0^T v_{i-1}^2` at every sample time for
/// each consecutive pair, with trapezoidal integration.
pub fn l2_string_stability_check(velocity_logs: &[Vec<f64>], ts: f64) -> Result<Vec<PairVerdict>> {
    if velocity_logs.len() < 2 {
        return Err(Error::MisalignedLogs("need at least two vehicles".into()));
    }
    let n = velocity_logs[0].len();
    if n == 0 || velocity_logs.iter().any(|v| v.len() != n) {
        return Err(Error::MisalignedLogs("velocity logs differ in length".into()));
    }
    if !(ts > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "sample period must be positive, got {ts}"
        )));
    }
    let energies: Vec<Vec<f64>> = velocity_logs.iter().map(|v| cumulative_energy(v, ts)).collect();
    let scale = energies.iter().flat_map(|e| e.iter().copied()).fold(0.0, f64::max);
    let tol = L2_RELATIVE_TOLERANCE * scale;
    Ok(energies
        .windows(2)
        .enumerate()
        .map(|(i, pair)| {
            let mut first_violation = None;
            let mut worst_excess = f64::NEG_INFINITY;
            for (k, (lead, follow)) in pair[0].iter().zip(&pair[1]).enumerate() {
                let excess = follow - lead;
                worst_excess = worst_excess.max(excess);
                if excess > tol && first_violation.is_none() {
                    first_violation = Some(k);
                }
            }
            PairVerdict {
                predecessor: i,
                follower: i + 1,
                holds: first_violation.is_none(),
                first_violation,
                worst_excess,
            }
        })
        .collect())
}
