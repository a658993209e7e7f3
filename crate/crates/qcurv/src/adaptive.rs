//! Adaptive Simpson quadrature, used as the independent 1-D oracle against
//! which the sphere rule and the assembled volume are cross-checked.

use crate::error::{QcurvError, Result};

/// Adaptive Simpson on [a, b] with absolute/relative tolerance `tol` and a
/// recursion depth cap.  Non-finite integrand values abort the integration.
pub fn adaptive_simpson(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    tol: f64,
    max_depth: u32,
) -> Result<f64> {
    if !(b > a) || !a.is_finite() || !b.is_finite() {
        return Err(QcurvError::InvalidInput(format!(
            "adaptive_simpson: bad interval [{a}, {b}]"
        )));
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    if !fa.is_finite() || !fb.is_finite() || !fm.is_finite() {
        return Err(QcurvError::Numerical(
            "adaptive_simpson: non-finite integrand".into(),
        ));
    }
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    recurse(f, a, b, fa, fm, fb, whole, tol, max_depth)
}

#[allow(clippy::too_many_arguments)]
fn recurse(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    if !flm.is_finite() || !frm.is_finite() {
        return Err(QcurvError::Numerical(
            "adaptive_simpson: non-finite integrand".into(),
        ));
    }
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol * (1.0 + (left + right).abs()) {
        return Ok(left + right + delta / 15.0);
    }
    let half_tol = 0.5 * tol;
    Ok(recurse(f, a, m, fa, flm, fm, left, half_tol, depth - 1)?
        + recurse(f, m, b, fm, frm, fb, right, half_tol, depth - 1)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_and_transcendental() {
        let p = adaptive_simpson(&|x| x * x * x - 2.0 * x, 0.0, 2.0, 1e-12, 30).unwrap();
        assert!((p - 0.0).abs() < 1e-12);
        let s = adaptive_simpson(&|x| x.sin(), 0.0, PI, 1e-12, 40).unwrap();
        assert!((s - 2.0).abs() < 1e-11);
    }

    #[test]
    fn sharply_peaked_gaussian() {
        let g = adaptive_simpson(&|x: f64| (-50.0 * x * x).exp(), -3.0, 3.0, 1e-12, 48).unwrap();
        let exact = (PI / 50.0).sqrt();
        assert!((g - exact).abs() < 1e-11 * exact);
    }

    #[test]
    fn bad_interval_rejected() {
        assert!(adaptive_simpson(&|x| x, 1.0, 1.0, 1e-8, 10).is_err());
        assert!(adaptive_simpson(&|x| x, 2.0, 1.0, 1e-8, 10).is_err());
    }
}
