//! Frequency-domain and characteristic-root analysis of the spacing
//! policies under perfect tracking.

mod frequency;
mod l2;
mod quasi_poly;
mod region;
mod roots;

pub use frequency::{
    string_stability_sweep, string_stability_sweep_with, sweep_grid, transfer_magnitude, transfer_magnitude_complex,
    SweepPoint, SWEEP_GRID_POINTS, SWEEP_OMEGA_MIN, SWEEP_TOLERANCE,
};
pub use l2::{l2_string_stability_check, PairVerdict, L2_RELATIVE_TOLERANCE};
pub use quasi_poly::{DelayTerm, QuasiPolynomial};
pub use region::{
    boundary_headways, properness_grid, properness_root_check, properness_root_check_with, stability_region_boundary,
    ROOT_STABILITY_MARGIN,
};
pub use roots::{rightmost_root, rightmost_root_with, winding_number, RootSearch, SearchRect};

use num_complex::Complex64;

/// How a stability verdict was reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerdictMethod {
    ClosedForm,
    Sweep,
    RootSearch,
}

/// A named inequality margin; positive means satisfied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Margin {
    pub name: &'static str,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Certificate {
    RightmostRoot(Complex64),
    PeakMagnitude { omega: f64, magnitude: f64 },
    InequalityMargins { margins: Vec<Margin>, omega: Option<f64> },
}

/// Outcome of a properness or string-stability test together with the
/// quantity that certifies it.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityVerdict {
    pub stable: bool,
    pub certificate: Certificate,
    pub method: VerdictMethod,
}

impl StabilityVerdict {
    pub(crate) fn from_margins(margins: Vec<Margin>, omega: Option<f64>, strict: bool) -> Self {
        let stable = margins
            .iter()
            .all(|m| if strict { m.value > 0.0 } else { m.value >= 0.0 });
        Self {
            stable,
            certificate: Certificate::InequalityMargins { margins, omega },
            method: VerdictMethod::ClosedForm,
        }
    }

    /// Checks that the certificate supports the verdict.
    pub fn is_consistent(&self) -> bool {
        match &self.certificate {
            Certificate::RightmostRoot(r) => self.stable == (r.re < -ROOT_STABILITY_MARGIN),
            Certificate::PeakMagnitude { magnitude, .. } => self.stable == (*magnitude <= 1.0 + SWEEP_TOLERANCE),
            Certificate::InequalityMargins { margins, .. } => !self.stable || margins.iter().all(|m| m.value >= 0.0),
        }
    }
}
