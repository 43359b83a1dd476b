use num_complex::Complex64;

use super::{Certificate, StabilityVerdict, VerdictMethod};
use crate::dynamics::VehicleParams;
use crate::par::Execution;
use crate::spacing::{PolicyKind, SpacingPolicy};

pub const SWEEP_GRID_POINTS: usize = 4096;
pub const SWEEP_OMEGA_MIN: f64 = 1e-3;
/// A sweep is string stable when the refined peak is at most `1 + SWEEP_TOLERANCE`.
pub const SWEEP_TOLERANCE: f64 = 1e-9;
const REFINE_REL_TOL: f64 = 1e-10;

/// `|T(i omega)|` of the velocity transfer between consecutive vehicles
/// under perfect tracking, from the expanded real-valued expressions.
pub fn transfer_magnitude(policy: &SpacingPolicy, params: &VehicleParams, omega: f64) -> f64 {
    let phi = params.phi;
    match policy.kind {
        PolicyKind::DelayedConstant => 1.0,
        PolicyKind::DelayedConstantHeadway => {
            let hv = policy.h_v;
            let den = omega * omega * hv * hv - 2.0 * omega * hv * (omega * phi).sin() + 1.0;
            1.0 / den.sqrt()
        }
        PolicyKind::DelayedExtendedHeadway => {
            let (hv, ha) = (policy.h_v, policy.h_a);
            let w2 = omega * omega;
            let re = 1.0 - ha * w2 * (omega * phi).cos();
            let im = hv * omega - ha * w2 * (omega * phi).sin();
            1.0 / (re * re + im * im).sqrt()
        }
    }
}

/// Same magnitude evaluated directly from the complex transfer function.
pub fn transfer_magnitude_complex(policy: &SpacingPolicy, params: &VehicleParams, omega: f64) -> f64 {
    let s = Complex64::new(0.0, omega);
    let advance = (s * params.phi).exp();
    let t = match policy.kind {
        PolicyKind::DelayedConstant => (-s * params.phi).exp(),
        PolicyKind::DelayedConstantHeadway => 1.0 / (advance * policy.h_v * s + 1.0),
        PolicyKind::DelayedExtendedHeadway => 1.0 / (advance * policy.h_a * s * s + policy.h_v * s + 1.0),
    };
    t.norm()
}

fn omega_max(policy: &SpacingPolicy, params: &VehicleParams) -> f64 {
    let mut w = 0.0f64;
    if policy.h_v > 0.0 {
        w = w.max(10.0 / policy.h_v);
    }
    if params.phi > 0.0 {
        w = w.max(20.0 * std::f64::consts::PI / params.phi);
    }
    if w == 0.0 {
        1e3
    } else {
        w
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub omega: f64,
    pub magnitude: f64,
}

/// Magnitudes on a logarithmic grid over `[omega_lo, omega_hi]`.
pub fn sweep_grid(
    policy: &SpacingPolicy,
    params: &VehicleParams,
    omega_lo: f64,
    omega_hi: f64,
    points: usize,
    exec: Execution,
) -> Vec<SweepPoint> {
    let points = points.max(2);
    let (l0, l1) = (omega_lo.ln(), omega_hi.ln());
    exec.map_range(points, |i| {
        let omega = if i == 0 {
            omega_lo
        } else if i + 1 == points {
            omega_hi
        } else {
            (l0 + (l1 - l0) * i as f64 / (points - 1) as f64).exp()
        };
        SweepPoint {
            omega,
            magnitude: transfer_magnitude(policy, params, omega),
        }
    })
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a) <= REFINE_REL_TOL * b.abs().max(f64::MIN_POSITIVE) {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Supremum of `|T(i omega)|` over a log grid with golden-section
/// refinement of every local maximum.
pub fn string_stability_sweep_with(
    policy: &SpacingPolicy,
    params: &VehicleParams,
    exec: Execution,
) -> StabilityVerdict {
    let grid = sweep_grid(
        policy,
        params,
        SWEEP_OMEGA_MIN,
        omega_max(policy, params),
        SWEEP_GRID_POINTS,
        exec,
    );
    let first = grid[0];
    let last = grid[grid.len() - 1];
    let mut best = if first.magnitude >= last.magnitude { first } else { last };
    let f = |w: f64| transfer_magnitude(policy, params, w);
    for win in grid.windows(3) {
        if win[1].magnitude >= win[0].magnitude && win[1].magnitude >= win[2].magnitude {
            let (omega, magnitude) = golden_max(f, win[0].omega, win[2].omega);
            let candidate = if magnitude >= win[1].magnitude {
                SweepPoint { omega, magnitude }
            } else {
                win[1]
            };
            if candidate.magnitude > best.magnitude {
                best = candidate;
            }
        }
    }
    StabilityVerdict {
        stable: best.magnitude <= 1.0 + SWEEP_TOLERANCE,
        certificate: Certificate::PeakMagnitude {
            omega: best.omega,
            magnitude: best.magnitude,
        },
        method: VerdictMethod::Sweep,
    }
}

pub fn string_stability_sweep(policy: &SpacingPolicy, params: &VehicleParams) -> StabilityVerdict {
    string_stability_sweep_with(policy, params, Execution::default())
}
