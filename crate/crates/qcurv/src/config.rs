//! Strict JSON run configuration: problem data, solver options, verification
//! windows and tolerances, output destination.  Unknown keys are rejected;
//! absent optional sections fall back to documented defaults.

use crate::error::{QcurvError, Result};
use crate::optimizer::SolveOptions;
use crate::problem::{Constants, Dimension, ProblemSpec, RadialPolynomial};
use crate::verify::VerifyOptions;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SolveSection {
    #[serde(rename = "L", skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    #[serde(rename = "M", skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grad_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub armijo_c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub backtrack: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct VerifySection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inner_window: Option<(f64, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outer_window: Option<(f64, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples_per_decade: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kelvin_radii: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_rad: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_ang: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol_slope: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol_slope_inner: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol_kelvin: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol_drift: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol_volume_quad: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol_volume_adaptive: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regular_case: Option<bool>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub n: u32,
    /// total volume; exactly one of `lambda` / `lambda_over_gamma`
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_over_gamma: Option<f64>,
    pub beta: f64,
    /// coefficients of p in |x|²: index j carries |x|^{2j}
    pub p: Vec<f64>,
    /// coefficients of q in |x|²
    pub q: Vec<f64>,
    #[serde(default, skip_serializing_if = "is_default_solve")]
    pub solve: SolveSection,
    #[serde(default, skip_serializing_if = "is_default_verify")]
    pub verify: VerifySection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<String>,
}

fn is_default_solve(s: &SolveSection) -> bool {
    serde_json::to_value(s).is_ok_and(|v| v.as_object().is_some_and(|o| o.is_empty()))
}

fn is_default_verify(s: &VerifySection) -> bool {
    serde_json::to_value(s).is_ok_and(|v| v.as_object().is_some_and(|o| o.is_empty()))
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| QcurvError::Config(e.to_string()))
    }

    /// Resolve Λ, honoring the exactly-one rule for the two spellings.
    pub fn lambda_value(&self) -> Result<f64> {
        let dim = Dimension::new(self.n)?;
        match (self.lambda, self.lambda_over_gamma) {
            (Some(l), None) => Ok(l),
            (None, Some(ratio)) => Ok(ratio * Constants::new(dim)?.gamma_n),
            (Some(_), Some(_)) => Err(QcurvError::Config(
                "give exactly one of `lambda` and `lambda_over_gamma`, not both".into(),
            )),
            (None, None) => Err(QcurvError::Config(
                "one of `lambda` or `lambda_over_gamma` is required".into(),
            )),
        }
    }

    /// Validated problem instance.
    pub fn problem_spec(&self) -> Result<ProblemSpec> {
        let dim = Dimension::new(self.n)?;
        let lambda = self.lambda_value()?;
        ProblemSpec::new(
            dim,
            lambda,
            self.beta,
            RadialPolynomial::new(self.p.clone())?,
            RadialPolynomial::new(self.q.clone())?,
        )
    }

    pub fn solve_options(&self) -> SolveOptions {
        let defaults = SolveOptions::default();
        let l = self.solve.l.unwrap_or(defaults.l);
        SolveOptions {
            l,
            m: self.solve.m.unwrap_or(2 * l + 16),
            max_iter: self.solve.max_iter.unwrap_or(defaults.max_iter),
            grad_tol: self.solve.grad_tol.unwrap_or(defaults.grad_tol),
            step0: self.solve.step0.unwrap_or(defaults.step0),
            armijo_c: self.solve.armijo_c.unwrap_or(defaults.armijo_c),
            backtrack: self.solve.backtrack.unwrap_or(defaults.backtrack),
            seed: self.solve.seed,
        }
    }

    pub fn verify_options(&self) -> VerifyOptions {
        let d = VerifyOptions::default();
        VerifyOptions {
            inner_window: self.verify.inner_window.unwrap_or(d.inner_window),
            outer_window: self.verify.outer_window.unwrap_or(d.outer_window),
            samples_per_decade: self
                .verify
                .samples_per_decade
                .unwrap_or(d.samples_per_decade),
            kelvin_radii: self
                .verify
                .kelvin_radii
                .clone()
                .unwrap_or_else(|| d.kelvin_radii.clone()),
            s_rad: self.verify.s_rad.unwrap_or(d.s_rad),
            k_ang: self.verify.k_ang.unwrap_or(d.k_ang),
            tol_slope: self.verify.tol_slope.unwrap_or(d.tol_slope),
            tol_slope_inner: self.verify.tol_slope_inner.unwrap_or(d.tol_slope_inner),
            tol_kelvin: self.verify.tol_kelvin.unwrap_or(d.tol_kelvin),
            tol_drift: self.verify.tol_drift.unwrap_or(d.tol_drift),
            tol_volume_quad: self.verify.tol_volume_quad.unwrap_or(d.tol_volume_quad),
            tol_volume_adaptive: self
                .verify
                .tol_volume_adaptive
                .unwrap_or(d.tol_volume_adaptive),
            regular_case: self.verify.regular_case.unwrap_or(d.regular_case),
        }
    }
}
