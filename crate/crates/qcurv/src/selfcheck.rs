//! Built-in invariant suite behind the `selfcheck` subcommand: fast structural
//! checks over the whole pipeline, one printed line per check.

use crate::error::Result;
use crate::functional::FunctionalState;
use crate::paneitz::PaneitzSpectrum;
use crate::problem::{sphere_volume, Constants, Dimension, ProblemSpec, RadialPolynomial};
use crate::sphere::{analyze, plane_radius, synthesize, QuadratureRule, SpectralField, ZonalBasis};
use crate::verify::fit_log_slope;
use std::f64::consts::PI;
use std::io::Write;

struct Check {
    name: &'static str,
    run: fn() -> Result<()>,
}

fn fail(name: &str, detail: String) -> crate::error::QcurvError {
    crate::error::QcurvError::Verification(format!("{name}: {detail}"))
}

fn check_constants() -> Result<()> {
    for n in 3..=8u32 {
        let c = Constants::new(Dimension::new(n)?)?;
        if c.lambda_1 != 2.0 * c.gamma_n || !(c.sphere_volume > 0.0) {
            return Err(fail("constants", format!("ratio broken at n = {n}")));
        }
    }
    let v3 = sphere_volume(3)?;
    if (v3 - 2.0 * PI * PI).abs() > 1e-12 {
        return Err(fail("constants", format!("|S^3| = {v3}")));
    }
    Ok(())
}

fn check_quadrature() -> Result<()> {
    for n in 3..=5u32 {
        let dim = Dimension::new(n)?;
        let quad = QuadratureRule::build(dim, 40)?;
        let total: f64 = quad.weights().iter().sum();
        let vol = sphere_volume(n)?;
        if ((total - vol) / vol).abs() > 1e-12 {
            return Err(fail("quadrature", format!("weight sum at n = {n}: {total}")));
        }
        let odd = quad.integrate(|t| t * t * t);
        if odd.abs() > 1e-12 {
            return Err(fail("quadrature", format!("odd moment {odd}")));
        }
    }
    Ok(())
}

fn check_basis() -> Result<()> {
    let dim = Dimension::new(3)?;
    let quad = QuadratureRule::build(dim, 40)?;
    let basis = ZonalBasis::build(dim, 16, &quad)?;
    for l in 0..=16usize {
        for lp in l..=16usize {
            let g: f64 = basis
                .row(l)
                .iter()
                .zip(basis.row(lp))
                .zip(quad.weights())
                .map(|((&a, &b), &w)| w * a * b)
                .sum();
            let target = if l == lp { 1.0 } else { 0.0 };
            if (g - target).abs() > 1e-10 {
                return Err(fail("basis", format!("gram[{l}][{lp}] = {g}")));
            }
        }
    }
    Ok(())
}

fn check_transforms() -> Result<()> {
    let dim = Dimension::new(4)?;
    let quad = QuadratureRule::build(dim, 48)?;
    let basis = ZonalBasis::build(dim, 20, &quad)?;
    let coeffs: Vec<f64> = (0..=20).map(|l| ((l * 37 + 11) % 17) as f64 / 17.0 - 0.5).collect();
    let a = SpectralField::new(coeffs.clone())?;
    let g = synthesize(&a, &basis)?;
    let back = analyze(&g, &basis, &quad)?;
    for (x, y) in coeffs.iter().zip(back.coeffs()) {
        if (x - y).abs() > 1e-10 {
            return Err(fail("transforms", format!("round trip {x} -> {y}")));
        }
    }
    let grid: f64 = quad
        .weights()
        .iter()
        .zip(g.values())
        .map(|(&w, &v)| w * v * v)
        .sum();
    let spec: f64 = coeffs.iter().map(|c| c * c).sum();
    if (grid - spec).abs() > 1e-9 * spec {
        return Err(fail("transforms", format!("parseval {grid} vs {spec}")));
    }
    Ok(())
}

fn check_paneitz() -> Result<()> {
    let s3 = PaneitzSpectrum::build(Dimension::new(3)?, 3)?;
    let s4 = PaneitzSpectrum::build(Dimension::new(4)?, 3)?;
    let t3 = [0.0, 6.0, 24.0, 60.0];
    let t4 = [0.0, 24.0, 120.0, 360.0];
    for l in 0..=3usize {
        if (s3.mu[l] - t3[l]).abs() > 1e-12 * t3[l].max(1.0)
            || (s4.mu[l] - t4[l]).abs() > 1e-12 * t4[l].max(1.0)
        {
            return Err(fail("paneitz", format!("table mismatch at l = {l}")));
        }
    }
    for n in 3..=8u32 {
        let s = PaneitzSpectrum::build(Dimension::new(n)?, 10)?;
        for l in 0..=10usize {
            let sq = s.mu_sqrt[l] * s.mu_sqrt[l];
            if (sq - s.mu[l]).abs() > 1e-12 * s.mu[l].max(1.0) {
                return Err(fail("paneitz", format!("sqrt ladder at n {n} l {l}")));
            }
        }
    }
    Ok(())
}

fn check_lift() -> Result<()> {
    for k in 0..50 {
        let t = -0.98 + 0.04 * k as f64 / 1.02;
        let r = plane_radius(t)?;
        let diff = crate::problem::w0(r) - (1.0 - t).ln();
        if diff.abs() > 1e-13 {
            return Err(fail("lift", format!("conformal identity at t = {t}")));
        }
    }
    Ok(())
}

fn benchmark_state() -> Result<FunctionalState> {
    let m = RadialPolynomial::new(vec![0.0, -1.0])?;
    let spec = ProblemSpec::new(Dimension::new(3)?, 2.0 * PI * PI, 0.0, m.clone(), m)?;
    FunctionalState::assemble(spec, 12, 40)
}

fn check_gauge() -> Result<()> {
    let state = benchmark_state()?;
    let vol = state.spec.constants().sphere_volume;
    let mut coeffs = vec![0.0; state.degree() + 1];
    for (l, c) in coeffs.iter_mut().enumerate() {
        *c = 0.3 / (1.0 + l as f64);
    }
    let psi = SpectralField::new(coeffs.clone())?;
    let j0 = state.evaluate(&psi)?;
    coeffs[0] += 5.0 * vol.sqrt();
    let j1 = state.evaluate(&SpectralField::new(coeffs)?)?;
    if (j1 - j0).abs() > 1e-9 * (1.0 + j0.abs()) {
        return Err(fail("gauge", format!("{j0} vs {j1}")));
    }
    Ok(())
}

fn check_gradient() -> Result<()> {
    let state = benchmark_state()?;
    let coeffs: Vec<f64> = (0..=state.degree())
        .map(|l| 0.2 * ((l as f64) * 0.7).sin())
        .collect();
    let psi = SpectralField::new(coeffs.clone())?;
    let g = state.gradient(&psi)?;
    let h = 1e-5;
    for l in [1usize, 2, 5] {
        let mut up = coeffs.clone();
        up[l] += h;
        let mut dn = coeffs.clone();
        dn[l] -= h;
        let fd = (state.evaluate(&SpectralField::new(up)?)? - state.evaluate(&SpectralField::new(dn)?)?)
            / (2.0 * h);
        if (g.coeffs()[l] - fd).abs() / (1.0 + fd.abs()) > 1e-5 {
            return Err(fail("gradient", format!("l = {l}: {} vs {fd}", g.coeffs()[l])));
        }
    }
    Ok(())
}

fn check_jensen() -> Result<()> {
    let state = benchmark_state()?;
    for seed in 0..20u64 {
        let coeffs: Vec<f64> = (0..=state.degree())
            .map(|l| 0.4 * (((seed * 31 + l as u64 * 7) % 13) as f64 / 13.0 - 0.5))
            .collect();
        let (log_mass, bound) = state.jensen_gap(&SpectralField::new(coeffs)?)?;
        if log_mass < bound - 1e-12 * bound.abs().max(1.0) {
            return Err(fail("jensen", format!("{log_mass} < {bound}")));
        }
    }
    Ok(())
}

fn check_mass_density() -> Result<()> {
    let state = benchmark_state()?;
    let psi = SpectralField::zeros(state.degree() + 1);
    let mass = state.mass_integral(&psi)?;
    let total: f64 = state
        .quad
        .weights()
        .iter()
        .zip(mass.density.values())
        .map(|(&w, &r)| w * r)
        .sum();
    if (total - 1.0).abs() > 1e-12 || mass.density.values().iter().any(|&r| r < 0.0) {
        return Err(fail("mass", format!("density normalization {total}")));
    }
    Ok(())
}

fn check_slope_fit() -> Result<()> {
    let samples: Vec<(f64, f64)> = (0..12)
        .map(|i| {
            let r = 10f64.powf(i as f64 / 4.0);
            (r, 3.0 * r.ln() + 5.0)
        })
        .collect();
    let (s, b) = fit_log_slope(&samples)?;
    if (s - 3.0).abs() > 1e-12 || (b - 5.0).abs() > 1e-12 {
        return Err(fail("slope_fit", format!("{s}, {b}")));
    }
    Ok(())
}

fn check_validation_gates() -> Result<()> {
    let m = RadialPolynomial::new(vec![0.0, -1.0])?;
    let z = RadialPolynomial::new(vec![0.0])?;
    if Dimension::new(2).is_ok() {
        return Err(fail("validation", "n = 2 accepted".into()));
    }
    if ProblemSpec::new(Dimension::new(3)?, 1.0, -1.0, m.clone(), z).is_ok() {
        return Err(fail("validation", "beta = -1 mixed regime accepted".into()));
    }
    if ProblemSpec::new(
        Dimension::new(4)?,
        1.0,
        0.0,
        RadialPolynomial::new(vec![0.0, 0.0, -1.0])?,
        m,
    )
    .is_ok()
    {
        return Err(fail("validation", "degree 4 accepted at n = 4".into()));
    }
    Ok(())
}

const CHECKS: &[Check] = &[
    Check { name: "constants", run: check_constants },
    Check { name: "quadrature", run: check_quadrature },
    Check { name: "zonal_basis", run: check_basis },
    Check { name: "transforms", run: check_transforms },
    Check { name: "paneitz_spectrum", run: check_paneitz },
    Check { name: "stereographic_lift", run: check_lift },
    Check { name: "gauge_invariance", run: check_gauge },
    Check { name: "gradient_vs_fd", run: check_gradient },
    Check { name: "jensen_bound", run: check_jensen },
    Check { name: "mass_density", run: check_mass_density },
    Check { name: "slope_fit", run: check_slope_fit },
    Check { name: "validation_gates", run: check_validation_gates },
];

/// Run the whole suite, printing one line per check.  Returns true when every
/// check passed.
pub fn run_selfcheck(out: &mut dyn Write) -> bool {
    let mut ok = true;
    for check in CHECKS {
        match (check.run)() {
            Ok(()) => {
                let _ = writeln!(out, "PASS {}", check.name);
            }
            Err(e) => {
                ok = false;
                let _ = writeln!(out, "FAIL {}: {e}", check.name);
            }
        }
    }
    ok
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_is_green() {
        let mut buf = Vec::new();
        assert!(run_selfcheck(&mut buf));
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), CHECKS.len());
        assert!(text.lines().all(|l| l.starts_with("PASS")));
    }
}
