//! Weighted sinusoidal fringe fit.
//!
//! Model `C(θ) = offset·(1 + V·cos(2(θ − phase)))`, fitted through the linear
//! form `offset + α·cos2θ + β·sin2θ` with Poisson weights `1/max(C, 1)`.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::CountsRecord;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitResult {
    pub offset: f64,
    pub amplitude: f64,
    /// Radians, in `(−π/2, π/2]`.
    pub phase: f64,
    pub visibility: f64,
    pub sigma_visibility: f64,
    pub chi2: f64,
}

/// Improvement in χ² a 90°-period fit must show before the data are rejected.
const PERIOD_REJECT_DELTA_CHI2: f64 = 25.0;

struct Linear {
    coef: Vector3<f64>,
    cov: Matrix3<f64>,
    chi2: f64,
}

fn weighted_fit(points: &[(f64, f64)], harmonic: f64) -> Option<Linear> {
    let basis = |t: f64| Vector3::new(1.0, (harmonic * t).cos(), (harmonic * t).sin());
    let mut normal = Matrix3::zeros();
    let mut rhs = Vector3::zeros();
    for &(t, y) in points {
        let w = 1.0 / y.max(1.0);
        let x = basis(t);
        normal += w * x * x.transpose();
        rhs += w * y * x;
    }
    let cov = normal.try_inverse()?;
    if !cov.iter().all(|v| v.is_finite()) || normal.determinant().abs() < 1e-12 * normal.norm().powi(3) {
        return None;
    }
    let coef = cov * rhs;
    let chi2 = points
        .iter()
        .map(|&(t, y)| {
            let r = y - coef.dot(&basis(t));
            r * r / y.max(1.0)
        })
        .sum();
    Some(Linear { coef, cov, chi2 })
}

fn distinct_angles(points: &[(f64, f64)]) -> usize {
    let mut keys: Vec<i64> = points
        .iter()
        .map(|&(t, _)| (t.rem_euclid(std::f64::consts::PI) * 1e9).round() as i64)
        .collect();
    keys.sort_unstable();
    keys.dedup();
    keys.len()
}

/// Fits `(θ2, counts)` pairs; counts may be non-integer (expected values).
pub fn fit_fringe_values(points: &[(f64, f64)]) -> Result<FitResult> {
    let n = distinct_angles(points);
    if n < 3 {
        return Err(Error::Underdetermined(n));
    }
    let fit = weighted_fit(points, 2.0).ok_or(Error::Underdetermined(n))?;
    let (c, a, b) = (fit.coef[0], fit.coef[1], fit.coef[2]);
    if !(c > 0.0) {
        return Err(Error::DegenerateFit(c));
    }
    if let Some(alt) = weighted_fit(points, 4.0) {
        if fit.chi2 - alt.chi2 > PERIOD_REJECT_DELTA_CHI2 {
            return Err(Error::PeriodMismatch {
                chi2_180: fit.chi2,
                chi2_90: alt.chi2,
            });
        }
    }
    let r = a.hypot(b);
    let v = r / c;
    let grad = if r > 0.0 {
        Vector3::new(-v / c, a / (c * r), b / (c * r))
    } else {
        // direction-free: average the two amplitude variances
        Vector3::new(0.0, std::f64::consts::FRAC_1_SQRT_2 / c, std::f64::consts::FRAC_1_SQRT_2 / c)
    };
    let var = (grad.transpose() * fit.cov * grad)[(0, 0)];
    Ok(FitResult {
        offset: c,
        amplitude: r,
        phase: 0.5 * b.atan2(a),
        visibility: v,
        sigma_visibility: var.max(0.0).sqrt(),
        chi2: fit.chi2,
    })
}

/// Fits a θ2 sweep of recorded counts.
pub fn fit_fringe(data: &[CountsRecord]) -> Result<FitResult> {
    let points: Vec<(f64, f64)> = data
        .iter()
        .map(|r| (r.setting.theta2, r.counts as f64))
        .collect();
    fit_fringe_values(&points)
}
