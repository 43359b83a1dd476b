use num_complex::Complex64;

use crate::error::{Error, Result};

/// One term `c(lambda) * exp(-delay * lambda)`; coefficients are in
/// ascending powers of `lambda`.
#[derive(Debug, Clone, PartialEq)]
pub struct DelayTerm {
    pub coeffs: Vec<f64>,
    pub delay: f64,
}

/// Characteristic function `p(lambda) = sum_k c_k(lambda) exp(-theta_k lambda)`
/// of a linear retarded delay equation.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiPolynomial {
    terms: Vec<DelayTerm>,
}

fn horner(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

fn horner_derivative(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, (k, &c)| acc * z + c * k as f64)
}

impl QuasiPolynomial {
    pub fn new(terms: Vec<DelayTerm>) -> Result<Self> {
        if terms.is_empty() || terms.iter().all(|t| t.coeffs.iter().all(|&c| c == 0.0)) {
            return Err(Error::InvalidParameter(
                "quasi-polynomial has no nonzero coefficient".into(),
            ));
        }
        for t in &terms {
            if !t.delay.is_finite() || t.delay < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "delay must be finite and >= 0, got {}",
                    t.delay
                )));
            }
            if t.coeffs.iter().any(|c| !c.is_finite()) {
                return Err(Error::NonFinite("quasi-polynomial coefficient"));
            }
        }
        Ok(Self { terms })
    }

    pub fn polynomial(coeffs: Vec<f64>) -> Result<Self> {
        Self::new(vec![DelayTerm { coeffs, delay: 0.0 }])
    }

    /// `lambda + exp(-phi lambda) / h_v`, the internal dynamics of the
    /// delayed constant headway policy.
    pub fn constant_headway_internal(h_v: f64, phi: f64) -> Result<Self> {
        Self::new(vec![
            DelayTerm {
                coeffs: vec![0.0, 1.0],
                delay: 0.0,
            },
            DelayTerm {
                coeffs: vec![1.0 / h_v],
                delay: phi,
            },
        ])
    }

    /// `h_a lambda^2 + (h_v lambda + 1) exp(-phi lambda)`, the internal
    /// dynamics of the delayed extended policy written with non-positive
    /// delay exponents.
    pub fn extended_headway_internal(h_v: f64, h_a: f64, phi: f64) -> Result<Self> {
        Self::new(vec![
            DelayTerm {
                coeffs: vec![0.0, 0.0, h_a],
                delay: 0.0,
            },
            DelayTerm {
                coeffs: vec![1.0, h_v],
                delay: phi,
            },
        ])
    }

    pub fn terms(&self) -> &[DelayTerm] {
        &self.terms
    }

    pub fn max_delay(&self) -> f64 {
        self.terms.iter().map(|t| t.delay).fold(0.0, f64::max)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.terms
            .iter()
            .map(|t| horner(&t.coeffs, z) * (-z * t.delay).exp())
            .sum()
    }

    pub fn derivative(&self, z: Complex64) -> Complex64 {
        self.terms
            .iter()
            .map(|t| (horner_derivative(&t.coeffs, z) - horner(&t.coeffs, z) * t.delay) * (-z * t.delay).exp())
            .sum()
    }

    /// Sum of the magnitudes of the individual monomial contributions at
    /// `z`; the natural scale for judging `|p(z)|` small.
    pub fn scale(&self, z: Complex64) -> f64 {
        let r = z.norm();
        self.terms
            .iter()
            .map(|t| {
                let poly: f64 = t
                    .coeffs
                    .iter()
                    .enumerate()
                    .map(|(k, c)| c.abs() * r.powi(k as i32))
                    .sum();
                poly * (-z.re * t.delay).exp()
            })
            .sum()
    }

    /// Evaluates on a rectangular grid using separable exponentials:
    /// `exp(-theta (x + iy)) = exp(-theta x) * exp(-i theta y)`.
    pub(crate) fn eval_grid(&self, xs: &[f64], ys: &[f64], row: usize) -> Vec<f64> {
        // returns |p| along the row with fixed y = ys[row]
        let y = ys[row];
        let mut out = vec![0.0; xs.len()];
        let cis: Vec<Complex64> = self
            .terms
            .iter()
            .map(|t| Complex64::from_polar(1.0, -t.delay * y))
            .collect();
        for (i, &x) in xs.iter().enumerate() {
            let z = Complex64::new(x, y);
            let mut acc = Complex64::new(0.0, 0.0);
            for (t, c) in self.terms.iter().zip(&cis) {
                let damp = if t.delay == 0.0 { 1.0 } else { (-t.delay * x).exp() };
                acc += horner(&t.coeffs, z) * (c * damp);
            }
            out[i] = acc.norm();
        }
        out
    }
}
