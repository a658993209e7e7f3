//! Preconditioned projected gradient descent with Armijo backtracking.
//!
//! The energy is minimized over mean-zero coefficient vectors (the gauge
//! J(ψ + c) = J(ψ) makes the mean a flat direction; component ℓ = 0 is zeroed
//! after every update).  The eigenvalue ladder supplies the natural diagonal
//! preconditioner 1/(1+μ_ℓ); the Armijo test and the reported gradient norm
//! both live in that preconditioned inner product.

use crate::error::{QcurvError, Result};
use crate::functional::FunctionalState;
use crate::sphere::SpectralField;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveOptions {
    /// spectral truncation degree
    pub l: usize,
    /// quadrature size
    pub m: usize,
    pub max_iter: usize,
    /// stopping threshold on the preconditioned gradient norm
    pub grad_tol: f64,
    /// initial line-search step
    pub step0: f64,
    /// Armijo sufficient-decrease constant, in (0, 1)
    pub armijo_c: f64,
    /// backtracking factor, in (0, 1)
    pub backtrack: f64,
    /// randomized initial guess when set; zero start otherwise
    pub seed: Option<u64>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        let l = 64;
        SolveOptions {
            l,
            m: 2 * l + 16,
            max_iter: 2000,
            grad_tol: 1e-8,
            step0: 1.0,
            armijo_c: 1e-4,
            backtrack: 0.5,
            seed: None,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.grad_tol > 0.0) {
            return Err(QcurvError::InvalidInput("grad_tol must be positive".into()));
        }
        if !(self.armijo_c > 0.0 && self.armijo_c < 1.0) {
            return Err(QcurvError::InvalidInput(
                "armijo_c must lie in (0, 1)".into(),
            ));
        }
        if !(self.backtrack > 0.0 && self.backtrack < 1.0) {
            return Err(QcurvError::InvalidInput(
                "backtrack must lie in (0, 1)".into(),
            ));
        }
        if !(self.step0 > 0.0 && self.step0.is_finite()) {
            return Err(QcurvError::InvalidInput("step0 must be positive".into()));
        }
        if self.m <= self.l {
            return Err(QcurvError::InvalidInput(format!(
                "quadrature size M = {} must exceed truncation L = {}",
                self.m, self.l
            )));
        }
        Ok(())
    }
}

/// One accepted iteration of the descent loop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterRecord {
    pub iter: usize,
    pub j: f64,
    pub grad_norm: f64,
    pub step: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveResult {
    pub psi: SpectralField,
    pub c_psi: f64,
    pub j_value: f64,
    pub grad_norm: f64,
    pub el_residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub history: Vec<IterRecord>,
}

/// Anything the descent loop can minimize: a value, a gradient, and a diagonal
/// preconditioner.  The production energy is `FunctionalState`; tests drive
/// the same loop with synthetic energies (pure quadratic bowl, non-smooth
/// stall case).
pub trait Energy {
    fn dim(&self) -> usize;
    fn value(&self, psi: &SpectralField) -> Result<f64>;
    fn gradient(&self, psi: &SpectralField) -> Result<SpectralField>;
    /// Diagonal preconditioner entries (applied to the negative gradient).
    fn preconditioner(&self) -> Vec<f64>;
}

impl Energy for FunctionalState {
    fn dim(&self) -> usize {
        self.degree() + 1
    }

    fn value(&self, psi: &SpectralField) -> Result<f64> {
        self.evaluate(psi)
    }

    fn gradient(&self, psi: &SpectralField) -> Result<SpectralField> {
        FunctionalState::gradient(self, psi)
    }

    fn preconditioner(&self) -> Vec<f64> {
        self.spectrum.mu.iter().map(|&mu| 1.0 / (1.0 + mu)).collect()
    }
}

#[derive(Debug)]
pub struct Descent {
    pub psi: SpectralField,
    pub j_value: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    pub history: Vec<IterRecord>,
}

/// Core loop: projected, preconditioned steepest descent with warm-started
/// Armijo backtracking.  `observer` sees every accepted iterate (streamed CSV
/// tracing hangs off this).
pub fn descend<E: Energy>(
    energy: &E,
    opts: &SolveOptions,
    init: SpectralField,
    mut observer: Option<&mut dyn FnMut(&IterRecord)>,
) -> Result<Descent> {
    opts.validate()?;
    let dim = energy.dim();
    if init.len() != dim {
        return Err(QcurvError::InvalidInput(format!(
            "initial guess has {} coefficients, energy expects {dim}",
            init.len()
        )));
    }
    let precond = energy.preconditioner();
    let mut psi = init;
    psi.coeffs_mut()[0] = 0.0;

    let mut j = energy.value(&psi)?;
    let mut step = opts.step0;
    let mut history = Vec::new();
    let mut converged = false;
    let mut iterations = 0usize;
    // Stagnation guard: once the decrease demanded by Armijo drops below the
    // rounding noise of J, the gradient norm freezes at a floating-point
    // floor; stop burning iterations when it has not moved for a long while.
    let mut best_gnorm = f64::INFINITY;
    let mut last_improvement = 0usize;

    for iter in 0..opts.max_iter {
        let grad = energy.gradient(&psi)?;
        // Preconditioned norm² = <g, Pg>; the l = 0 component is projected out.
        let gnorm_sq: f64 = grad
            .coeffs()
            .iter()
            .zip(&precond)
            .enumerate()
            .map(|(l, (&g, &p))| if l == 0 { 0.0 } else { p * g * g })
            .sum();
        let gnorm = gnorm_sq.sqrt();
        if gnorm <= opts.grad_tol {
            converged = true;
            let record = IterRecord {
                iter,
                j,
                grad_norm: gnorm,
                step: 0.0,
            };
            history.push(record);
            if let Some(obs) = observer.as_deref_mut() {
                obs(&record);
            }
            iterations = iter;
            break;
        }
        if gnorm < (1.0 - 1e-6) * best_gnorm {
            best_gnorm = gnorm;
            last_improvement = iter;
        } else if iter - last_improvement >= 100 {
            iterations = iter;
            break;
        }

        // Warm start: previous accepted step, allowed to grow one notch.
        let mut s = (step / opts.backtrack).min(opts.step0);
        let mut accepted = false;
        let mut at_float_floor = false;
        while s >= 1e-16 {
            let mut trial = psi.coeffs().to_vec();
            for (l, t) in trial.iter_mut().enumerate().skip(1) {
                *t -= s * precond[l] * grad.coeffs()[l];
            }
            let candidate = SpectralField::new(trial)?;
            // The update rounded to a bitwise no-op: no smaller step can make
            // progress either, the iterate is at the floating-point floor.
            if candidate
                .coeffs()
                .iter()
                .zip(psi.coeffs())
                .all(|(a, b)| a.to_bits() == b.to_bits())
            {
                at_float_floor = true;
                break;
            }
            let j_trial = energy.value(&candidate)?;
            if j_trial <= j - opts.armijo_c * s * gnorm_sq {
                psi = candidate;
                psi.coeffs_mut()[0] = 0.0;
                j = j_trial;
                step = s;
                accepted = true;
                break;
            }
            s *= opts.backtrack;
        }
        if at_float_floor {
            iterations = iter;
            break;
        }
        if !accepted {
            return Err(QcurvError::Numerical(format!(
                "line search stalled at iteration {iter}: J = {j}, preconditioned |g| = {gnorm}, \
                 step underflowed below 1e-16"
            )));
        }
        let record = IterRecord {
            iter: iter + 1,
            j,
            grad_norm: gnorm,
            step,
        };
        history.push(record);
        if let Some(obs) = observer.as_deref_mut() {
            obs(&record);
        }
        iterations = iter + 1;
    }

    // Recompute the terminal gradient norm so the reported value refers to
    // the returned iterate even when max_iter stopped the loop.
    let grad = energy.gradient(&psi)?;
    let gnorm = grad
        .coeffs()
        .iter()
        .zip(&precond)
        .enumerate()
        .map(|(l, (&g, &p))| if l == 0 { 0.0 } else { p * g * g })
        .sum::<f64>()
        .sqrt();
    if gnorm <= opts.grad_tol {
        converged = true;
    }

    Ok(Descent {
        psi,
        j_value: j,
        grad_norm: gnorm,
        iterations,
        converged,
        history,
    })
}

/// Small decaying random coefficients for seeded starts.
fn random_init(dim: usize, seed: u64) -> SpectralField {
    let mut state = seed ^ 0xD1B5_4A32_D192_ED03;
    let mut coeffs = Vec::with_capacity(dim);
    for l in 0..dim {
        let mut z = {
            state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
            let mut x = state;
            x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
            x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
            (x ^ (x >> 31)) >> 11
        } as f64
            / (1u64 << 53) as f64;
        z = 2.0 * z - 1.0;
        coeffs.push(if l == 0 { 0.0 } else { 0.1 * z / (1.0 + l as f64) });
    }
    SpectralField::new(coeffs).expect("finite init")
}

/// Minimize the lifted energy and package the full result (volume constant,
/// Euler–Lagrange defect, iteration log).
pub fn minimize(state: &FunctionalState, opts: &SolveOptions) -> Result<SolveResult> {
    minimize_with(state, opts, None)
}

pub fn minimize_with(
    state: &FunctionalState,
    opts: &SolveOptions,
    observer: Option<&mut dyn FnMut(&IterRecord)>,
) -> Result<SolveResult> {
    let dim = state.degree() + 1;
    let init = match opts.seed {
        Some(seed) => random_init(dim, seed),
        None => SpectralField::zeros(dim),
    };
    let out = descend(state, opts, init, observer)?;
    let c_psi = state.c_psi(&out.psi)?;
    let el_residual = state.el_residual(&out.psi)?;
    Ok(SolveResult {
        psi: out.psi,
        c_psi,
        j_value: out.j_value,
        grad_norm: out.grad_norm,
        el_residual,
        iterations: out.iterations,
        converged: out.converged,
        history: out.history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Pure quadratic bowl ½ Σ μ_l a_l², the production energy with its
    /// nonlinear mass term disabled.
    struct Quadratic {
        mu: Vec<f64>,
    }

    impl Energy for Quadratic {
        fn dim(&self) -> usize {
            self.mu.len()
        }
        fn value(&self, psi: &SpectralField) -> Result<f64> {
            Ok(psi
                .coeffs()
                .iter()
                .zip(&self.mu)
                .map(|(&a, &mu)| 0.5 * mu * a * a)
                .sum())
        }
        fn gradient(&self, psi: &SpectralField) -> Result<SpectralField> {
            SpectralField::new(
                psi.coeffs()
                    .iter()
                    .zip(&self.mu)
                    .map(|(&a, &mu)| mu * a)
                    .collect(),
            )
        }
        fn preconditioner(&self) -> Vec<f64> {
            self.mu.iter().map(|&mu| 1.0 / (1.0 + mu)).collect()
        }
    }

    /// |a_1|: smooth nowhere at the minimum; the line search must stall.
    struct Kink;

    impl Energy for Kink {
        fn dim(&self) -> usize {
            2
        }
        fn value(&self, psi: &SpectralField) -> Result<f64> {
            Ok(psi.coeffs()[1].abs())
        }
        fn gradient(&self, psi: &SpectralField) -> Result<SpectralField> {
            SpectralField::new(vec![0.0, if psi.coeffs()[1] >= 0.0 { 1.0 } else { -1.0 }])
        }
        fn preconditioner(&self) -> Vec<f64> {
            vec![1.0, 1.0]
        }
    }

    fn opts(l: usize) -> SolveOptions {
        SolveOptions {
            l,
            m: 2 * l + 8,
            max_iter: 200,
            ..SolveOptions::default()
        }
    }

    #[test]
    fn quadratic_bowl_converges_fast() {
        let energy = Quadratic {
            mu: (0..=24).map(|l| (l * (l + 2)) as f64).collect(),
        };
        let init = random_init(energy.dim(), 7);
        let out = descend(&energy, &opts(24), init, None).unwrap();
        assert!(out.converged, "grad_norm = {}", out.grad_norm);
        assert!(out.iterations <= 200);
        assert!(out.j_value.abs() < 1e-14);
        for pair in out.history.windows(2) {
            assert!(pair[1].j <= pair[0].j);
        }
    }

    #[test]
    fn gauge_component_stays_zero() {
        let energy = Quadratic {
            mu: (0..=8).map(|l| (l * l) as f64).collect(),
        };
        let mut init = random_init(energy.dim(), 3);
        init.coeffs_mut()[0] = 0.7; // deliberately violate the gauge
        let out = descend(&energy, &opts(8), init, None).unwrap();
        assert_eq!(out.psi.coeffs()[0], 0.0);
    }

    #[test]
    fn deterministic_histories() {
        let energy = Quadratic {
            mu: (0..=16).map(|l| (l * (l + 3)) as f64).collect(),
        };
        let a = descend(&energy, &opts(16), random_init(17, 11), None).unwrap();
        let b = descend(&energy, &opts(16), random_init(17, 11), None).unwrap();
        assert_eq!(a.history.len(), b.history.len());
        for (x, y) in a.history.iter().zip(&b.history) {
            assert_eq!(x.j.to_bits(), y.j.to_bits());
            assert_eq!(x.grad_norm.to_bits(), y.grad_norm.to_bits());
            assert_eq!(x.step.to_bits(), y.step.to_bits());
        }
        for (x, y) in a.psi.coeffs().iter().zip(b.psi.coeffs()) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }

    #[test]
    fn stall_reported_with_diagnostics() {
        let init = SpectralField::new(vec![0.0, 0.0]).unwrap();
        let err = descend(&Kink, &opts(1), init, None).unwrap_err();
        match err {
            QcurvError::Numerical(msg) => assert!(msg.contains("stalled")),
            other => panic!("expected stall, got {other:?}"),
        }
    }

    #[test]
    fn max_iter_is_not_an_error() {
        let energy = Quadratic {
            mu: (0..=30).map(|l| 1e-6 * (l as f64)).collect(),
        };
        let o = SolveOptions {
            l: 30,
            m: 68,
            max_iter: 3,
            grad_tol: 1e-14,
            ..SolveOptions::default()
        };
        let out = descend(&energy, &o, random_init(31, 5), None).unwrap();
        assert!(!out.converged);
        assert_eq!(out.iterations, 3);
    }

    #[test]
    fn option_validation() {
        let bad = [
            SolveOptions { armijo_c: 1.5, ..SolveOptions::default() },
            SolveOptions { backtrack: 0.0, ..SolveOptions::default() },
            SolveOptions { grad_tol: -1.0, ..SolveOptions::default() },
            SolveOptions { m: 64, l: 64, ..SolveOptions::default() },
        ];
        for o in bad {
            assert!(o.validate().is_err());
        }
    }
}
