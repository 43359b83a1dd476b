//! Rightmost characteristic root of a quasi-polynomial.
//!
//! A grid scan of `|p|` seeds damped Newton iterations; since `|p|` of an
//! analytic function has no interior local minima other than zeros, every
//! grid-local minimum is a candidate. The argument principle over the
//! conjugate-symmetric rectangle then certifies that no root was missed.

use num_complex::Complex64;

use super::quasi_poly::QuasiPolynomial;
use crate::error::{Error, Result};
use crate::par::Execution;

const MAX_NEWTON_ITERS: usize = 100;
const RESIDUAL_TOL: f64 = 1e-10;
const DEDUP_TOL: f64 = 1e-7;
const WINDING_SEGMENTS: usize = 4096;
const MAX_WINDING_SEGMENTS: usize = 1 << 20;
const GRID_RETRIES: usize = 2;

/// Upper-half search rectangle; roots of real quasi-polynomials come in
/// conjugate pairs so only `Im >= 0` is scanned.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchRect {
    pub re_lo: f64,
    pub re_hi: f64,
    pub im_hi: f64,
    /// Grid spacing of the initial scan along both axes.
    pub step: f64,
}

impl SearchRect {
    /// Window sized to a characteristic time: `Re` in `[-10/T, 5/T]`,
    /// `Im` in `[0, 4 pi / T]`, grid step `0.02 / T`.
    pub fn for_time_scale(t: f64) -> Self {
        Self {
            re_lo: -10.0 / t,
            re_hi: 5.0 / t,
            im_hi: 4.0 * std::f64::consts::PI / t,
            step: 0.02 / t,
        }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.re_lo && z.re <= self.re_hi && z.im.abs() <= self.im_hi
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RootSearch {
    pub rightmost: Complex64,
    /// Distinct roots with `Im >= 0`, sorted by decreasing real part.
    pub roots: Vec<Complex64>,
    /// Zeros enclosed by the full rectangle, counted with multiplicity.
    pub winding: i64,
}

fn linspace(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).ceil().max(1.0) as usize;
    (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect()
}

fn polish(qp: &QuasiPolynomial, seed: Complex64) -> Option<Complex64> {
    let mut z = seed;
    let mut fz = qp.eval(z);
    for _ in 0..MAX_NEWTON_ITERS {
        let d = qp.derivative(z);
        if d.norm() == 0.0 || !d.is_finite() {
            break;
        }
        let dz = fz / d;
        let mut t = 1.0;
        let (mut zn, mut fzn);
        loop {
            zn = z - dz * t;
            fzn = qp.eval(zn);
            if fzn.norm() < fz.norm() || t < 1e-6 {
                break;
            }
            t *= 0.5;
        }
        let moved = (dz * t).norm();
        z = zn;
        fz = fzn;
        if moved <= 1e-15 * z.norm().max(1.0) || fz.norm() == 0.0 {
            break;
        }
    }
    if !z.is_finite() || fz.norm() > RESIDUAL_TOL * qp.scale(z).max(f64::MIN_POSITIVE) {
        return None;
    }
    if z.im.abs() <= 1e-9 * z.re.abs().max(1.0) {
        z.im = 0.0;
    }
    Some(if z.im < 0.0 { z.conj() } else { z })
}

/// Zeros of `p` inside the rectangle `[re_lo, re_hi] x [-im_hi, im_hi]`
/// from the winding of `p` along its boundary, doubling the contour
/// resolution until two successive counts agree.
pub fn winding_number(qp: &QuasiPolynomial, rect: &SearchRect) -> i64 {
    let corners = [
        Complex64::new(rect.re_lo, -rect.im_hi),
        Complex64::new(rect.re_hi, -rect.im_hi),
        Complex64::new(rect.re_hi, rect.im_hi),
        Complex64::new(rect.re_lo, rect.im_hi),
    ];
    let perimeter = 2.0 * (rect.re_hi - rect.re_lo) + 4.0 * rect.im_hi;
    let count = |segments: usize| -> i64 {
        let mut total = 0.0;
        for e in 0..4 {
            let (a, b) = (corners[e], corners[(e + 1) % 4]);
            let n = (((b - a).norm() / perimeter) * segments as f64).ceil().max(1.0) as usize;
            let mut prev = qp.eval(a);
            for k in 1..=n {
                let z = a + (b - a) * (k as f64 / n as f64);
                let cur = qp.eval(z);
                total += (cur / prev).arg();
                prev = cur;
            }
        }
        (total / (2.0 * std::f64::consts::PI)).round() as i64
    };
    let mut segments = WINDING_SEGMENTS;
    let mut last = count(segments);
    while segments < MAX_WINDING_SEGMENTS {
        segments *= 2;
        let next = count(segments);
        if next == last {
            break;
        }
        last = next;
    }
    last
}

fn scan(qp: &QuasiPolynomial, rect: &SearchRect, step: f64, exec: Execution) -> Vec<Complex64> {
    let xs = linspace(rect.re_lo, rect.re_hi, step);
    let ys = linspace(0.0, rect.im_hi, step);
    let rows = exec.map_range(ys.len(), |j| qp.eval_grid(&xs, &ys, j));
    let (nx, ny) = (xs.len(), ys.len());
    let mut seeds = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            let v = rows[j][i];
            let mut is_min = true;
            'nb: for dj in -1i64..=1 {
                for di in -1i64..=1 {
                    if di == 0 && dj == 0 {
                        continue;
                    }
                    let (ii, mut jj) = (i as i64 + di, j as i64 + dj);
                    if jj < 0 {
                        // mirror across the real axis
                        jj = 1;
                    }
                    if ii < 0 || ii >= nx as i64 || jj >= ny as i64 {
                        continue;
                    }
                    if rows[jj as usize][ii as usize] < v {
                        is_min = false;
                        break 'nb;
                    }
                }
            }
            if is_min {
                seeds.push(Complex64::new(xs[i], ys[j]));
            }
        }
    }
    let mut roots: Vec<Complex64> = exec
        .map(&seeds, |&s| polish(qp, s))
        .into_iter()
        .flatten()
        .filter(|z| rect.contains(*z))
        .collect();
    roots.sort_by(|a, b| b.re.total_cmp(&a.re).then(a.im.total_cmp(&b.im)));
    let mut distinct: Vec<Complex64> = Vec::with_capacity(roots.len());
    for z in roots {
        if !distinct.iter().any(|r| (r - z).norm() <= DEDUP_TOL * z.norm().max(1.0)) {
            distinct.push(z);
        }
    }
    distinct
}

pub fn rightmost_root_with(qp: &QuasiPolynomial, rect: &SearchRect, exec: Execution) -> Result<RootSearch> {
    if ![rect.re_lo, rect.re_hi, rect.im_hi, rect.step]
        .iter()
        .all(|v| v.is_finite())
        || rect.re_lo >= rect.re_hi
        || rect.im_hi <= 0.0
        || rect.step <= 0.0
    {
        return Err(Error::InvalidParameter(format!("bad search rectangle {rect:?}")));
    }
    let winding = winding_number(qp, rect);
    let mut step = rect.step;
    let mut found = 0;
    for _ in 0..=GRID_RETRIES {
        let roots = scan(qp, rect, step, exec);
        found = roots.iter().map(|z| if z.im == 0.0 { 1 } else { 2 }).sum::<usize>();
        if found as i64 == winding {
            return match roots.first() {
                Some(&rightmost) => Ok(RootSearch {
                    rightmost,
                    roots,
                    winding,
                }),
                None => Err(Error::NoRoot),
            };
        }
        step /= 2.0;
    }
    Err(Error::Refinement { winding, found })
}

pub fn rightmost_root(qp: &QuasiPolynomial, rect: &SearchRect) -> Result<Complex64> {
    rightmost_root_with(qp, rect, Execution::default()).map(|r| r.rightmost)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn linear_polynomial() {
        let qp = QuasiPolynomial::polynomial(vec![1.0, 1.0]).unwrap();
        let r = rightmost_root(&qp, &SearchRect::for_time_scale(1.0)).unwrap();
        assert!((r - Complex64::new(-1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn no_root_in_window() {
        let qp = QuasiPolynomial::polynomial(vec![100.0, 1.0]).unwrap();
        assert_eq!(
            rightmost_root(&qp, &SearchRect::for_time_scale(1.0)).unwrap_err(),
            Error::NoRoot
        );
    }

    #[test]
    fn complex_pair_counted_twice() {
        // (lambda + 1)^2 + 4
        let qp = QuasiPolynomial::polynomial(vec![5.0, 2.0, 1.0]).unwrap();
        let res = rightmost_root_with(&qp, &SearchRect::for_time_scale(1.0), Execution::Sequential).unwrap();
        assert_eq!(res.winding, 2);
        assert!((res.rightmost - Complex64::new(-1.0, 2.0)).norm() < 1e-12);
    }

    #[test]
    fn headway_factor_on_boundary() {
        let (hv, phi) = (0.2, 0.1 * std::f64::consts::PI);
        assert!((phi / hv - FRAC_PI_2).abs() < 1e-15);
        let qp = QuasiPolynomial::constant_headway_internal(hv, phi).unwrap();
        let r = rightmost_root(&qp, &SearchRect::for_time_scale(phi)).unwrap();
        assert!(r.re.abs() <= 1e-6, "{r}");
        assert!((r.im - 1.0 / hv).abs() <= 1e-6);
    }

    #[test]
    fn headway_factor_sign_change() {
        let hv = 0.4;
        for (ratio, stable) in [(FRAC_PI_2 - 0.05, true), (FRAC_PI_2 + 0.05, false)] {
            let phi = ratio * hv;
            let qp = QuasiPolynomial::constant_headway_internal(hv, phi).unwrap();
            let r = rightmost_root(&qp, &SearchRect::for_time_scale(phi)).unwrap();
            assert_eq!(r.re < 0.0, stable, "ratio {ratio}: {r}");
        }
    }

    #[test]
    fn roots_satisfy_residual_bound() {
        let qp = QuasiPolynomial::extended_headway_internal(1.2, 0.25, 0.15).unwrap();
        let res = rightmost_root_with(&qp, &SearchRect::for_time_scale(0.15), Execution::Parallel).unwrap();
        for z in &res.roots {
            assert!(qp.eval(*z).norm() <= 1e-10 * qp.scale(*z));
        }
        assert!(res.rightmost.re < 0.0);
    }
}
