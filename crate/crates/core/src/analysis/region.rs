use super::quasi_poly::QuasiPolynomial;
use super::roots::{rightmost_root_with, SearchRect};
use super::{Certificate, StabilityVerdict, VerdictMethod};
use crate::dynamics::VehicleParams;
use crate::error::{Error, Result};
use crate::par::Execution;
use crate::spacing::{PolicyKind, SpacingPolicy};

/// The rightmost root must lie at least this far left of the imaginary
/// axis for the internal dynamics to count as stable.
pub const ROOT_STABILITY_MARGIN: f64 = 1e-9;

/// Boundary of the extended-policy properness region in the
/// `(h_v / h_a, 1 / h_a)` plane, traced by
/// `(omega sin(omega phi), omega^2 cos(omega phi))` for `omega` from `0` to
/// `pi / (2 phi)`. Both endpoints are included.
pub fn stability_region_boundary(phi: f64, n_points: usize) -> Result<Vec<(f64, f64)>> {
    if !(phi > 0.0) || !phi.is_finite() {
        return Err(Error::InvalidParameter(format!("phi must be positive, got {phi}")));
    }
    if n_points < 2 {
        return Err(Error::InvalidParameter(
            "at least two boundary points are required".into(),
        ));
    }
    let omega_end = std::f64::consts::FRAC_PI_2 / phi;
    Ok((0..n_points)
        .map(|k| {
            let omega = omega_end * k as f64 / (n_points - 1) as f64;
            (omega * (omega * phi).sin(), omega * omega * (omega * phi).cos())
        })
        .collect())
}

/// Headways `(h_v, h_a)` that place the extended policy exactly on the
/// properness boundary at frequency `omega` in `(0, pi / (2 phi))`.
pub fn boundary_headways(phi: f64, omega: f64) -> (f64, f64) {
    let h_a = 1.0 / (omega * omega * (omega * phi).cos());
    (h_a * omega * (omega * phi).sin(), h_a)
}

fn search_window(policy: &SpacingPolicy, params: &VehicleParams) -> SearchRect {
    let t = if params.phi > 0.0 {
        params.phi
    } else {
        match policy.kind {
            PolicyKind::DelayedExtendedHeadway => {
                let fast = policy.h_a / policy.h_v;
                0.5 * fast.min(policy.h_a.sqrt())
            }
            _ => policy.h_v,
        }
    };
    SearchRect::for_time_scale(t)
}

/// Properness from the rightmost root of the internal-dynamics
/// quasi-polynomial of the policy.
pub fn properness_root_check_with(
    policy: &SpacingPolicy,
    params: &VehicleParams,
    exec: Execution,
) -> Result<StabilityVerdict> {
    let qp = match policy.kind {
        PolicyKind::DelayedConstant => return Err(Error::UnsupportedPolicy("delayed constant")),
        PolicyKind::DelayedConstantHeadway => QuasiPolynomial::constant_headway_internal(policy.h_v, params.phi)?,
        PolicyKind::DelayedExtendedHeadway => {
            QuasiPolynomial::extended_headway_internal(policy.h_v, policy.h_a, params.phi)?
        }
    };
    let search = rightmost_root_with(&qp, &search_window(policy, params), exec)?;
    Ok(StabilityVerdict {
        stable: search.rightmost.re < -ROOT_STABILITY_MARGIN,
        certificate: Certificate::RightmostRoot(search.rightmost),
        method: VerdictMethod::RootSearch,
    })
}

pub fn properness_root_check(policy: &SpacingPolicy, params: &VehicleParams) -> Result<StabilityVerdict> {
    properness_root_check_with(policy, params, Execution::default())
}

/// Root checks over many parameter points, parallel across points.
pub fn properness_grid(points: &[(SpacingPolicy, VehicleParams)], exec: Execution) -> Vec<Result<StabilityVerdict>> {
    exec.map(points, |(policy, params)| {
        properness_root_check_with(policy, params, Execution::Sequential)
    })
}
