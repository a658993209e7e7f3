//! Machine-readable outputs: result.json (deterministic solve record),
//! profiles.csv (radial samples at 17 significant digits), verification.json,
//! and the RunSummary bundle.
//!
//! result.json carries no timings, so identical configs produce byte-identical
//! files; wall-clock data lives only in the summary.

use crate::config::RunConfig;
use crate::error::{QcurvError, Result};
use crate::optimizer::{IterRecord, SolveResult};
use crate::verify::{ProfileRow, VerificationReport};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

/// Stored solve record: everything needed to re-verify without re-solving.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultFile {
    pub config: RunConfig,
    pub case_tag: String,
    pub l: usize,
    pub m: usize,
    pub psi: Vec<f64>,
    pub c_psi: f64,
    pub j_value: f64,
    pub grad_norm: f64,
    pub el_residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub history: Vec<IterRecord>,
    pub version: String,
}

impl ResultFile {
    pub fn new(config: &RunConfig, result: &SolveResult, case_tag: &str) -> Self {
        let opts = config.solve_options();
        ResultFile {
            config: config.clone(),
            case_tag: case_tag.to_string(),
            l: opts.l,
            m: opts.m,
            psi: result.psi.coeffs().to_vec(),
            c_psi: result.c_psi,
            j_value: result.j_value,
            grad_norm: result.grad_norm,
            el_residual: result.el_residual,
            iterations: result.iterations,
            converged: result.converged,
            history: result.history.clone(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| QcurvError::Config(e.to_string()))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_json(path, self)
    }
}

/// Scalar echo of a solve for the summary (no coefficient payload).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveScalars {
    pub case_tag: String,
    pub j_value: f64,
    pub grad_norm: f64,
    pub el_residual: f64,
    pub c_psi: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunSummary {
    pub config: RunConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solve: Option<SolveScalars>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verification: Option<VerificationReport>,
    /// wall-clock seconds per phase
    pub timings: BTreeMap<String, f64>,
    pub version: String,
}

impl RunSummary {
    pub fn new(config: RunConfig) -> Self {
        RunSummary {
            config,
            solve: None,
            verification: None,
            timings: BTreeMap::new(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| QcurvError::Config(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

/// profiles.csv: columns r, t, psi, u, v, w_drift at 17 significant digits.
pub fn write_profiles(path: &Path, rows: &[ProfileRow]) -> Result<()> {
    let mut out = String::from("r,t,psi,u,v,w_drift\n");
    for row in rows {
        out.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
            row.r, row.t, row.psi, row.u, row.v, row.w_drift
        ));
    }
    std::fs::write(path, out)?;
    Ok(())
}

pub fn read_profiles(path: &Path) -> Result<Vec<ProfileRow>> {
    let text = std::fs::read_to_string(path)?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 {
            continue;
        }
        let cells: Vec<f64> = line
            .split(',')
            .map(|c| c.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| QcurvError::Config(format!("profiles.csv line {}: {e}", i + 1)))?;
        if cells.len() != 6 {
            return Err(QcurvError::Config(format!(
                "profiles.csv line {}: expected 6 columns",
                i + 1
            )));
        }
        rows.push(ProfileRow {
            r: cells[0],
            t: cells[1],
            psi: cells[2],
            u: cells[3],
            v: cells[4],
            w_drift: cells[5],
        });
    }
    Ok(rows)
}

/// Eigenvalue table as CSV on the given writer.
pub fn write_eigs_csv(
    out: &mut dyn Write,
    n: crate::problem::Dimension,
    l_max: usize,
) -> Result<()> {
    let spectrum = crate::paneitz::PaneitzSpectrum::build(n, l_max)?;
    writeln!(out, "ell,lambda_ell,mu_ell,mu_sqrt_ell")?;
    for l in 0..=l_max {
        writeln!(
            out,
            "{},{:.16e},{:.16e},{:.16e}",
            l,
            crate::paneitz::laplace_eigenvalue(n, l),
            spectrum.mu[l],
            spectrum.mu_sqrt[l]
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::Dimension;

    #[test]
    fn summary_round_trips() {
        let cfg = RunConfig::parse(
            r#"{"n":3,"lambda":19.7392088,"beta":0,"p":[0,-1],"q":[0,-1]}"#,
        )
        .unwrap();
        let mut summary = RunSummary::new(cfg);
        summary.timings.insert("solve".into(), 1.25);
        let text = serde_json::to_string(&summary).unwrap();
        let back: RunSummary = serde_json::from_str(&text).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }

    #[test]
    fn profiles_round_trip_losslessly() {
        let rows = vec![
            ProfileRow {
                r: 1.0 / 3.0,
                t: -0.8,
                psi: 1.2345678901234567e-5,
                u: -17.25,
                v: std::f64::consts::PI,
                w_drift: -1.0e-300,
            },
            ProfileRow {
                r: 1e3,
                t: 0.999998,
                psi: 0.0,
                u: 2.0f64.sqrt(),
                v: -0.1,
                w_drift: 3.0,
            },
        ];
        let dir = std::env::temp_dir().join("qcurv_profiles_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("profiles.csv");
        write_profiles(&path, &rows).unwrap();
        let back = read_profiles(&path).unwrap();
        assert_eq!(back.len(), rows.len());
        for (a, b) in rows.iter().zip(&back) {
            assert_eq!(a.r.to_bits(), b.r.to_bits());
            assert_eq!(a.psi.to_bits(), b.psi.to_bits());
            assert_eq!(a.u.to_bits(), b.u.to_bits());
            assert_eq!(a.v.to_bits(), b.v.to_bits());
            assert_eq!(a.w_drift.to_bits(), b.w_drift.to_bits());
        }
    }

    #[test]
    fn eigs_csv_shape() {
        let mut buf = Vec::new();
        write_eigs_csv(&mut buf, Dimension::new(3).unwrap(), 3).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[0], "ell,lambda_ell,mu_ell,mu_sqrt_ell");
        assert!(lines[1].starts_with("0,"));
        // mu for l = 2 is 24.
        assert!(lines[3].contains("2.4000000000000000e1"));
    }
}
