//! The variational energy on the sphere: mass integral, functional value,
//! exact coefficient-space gradient, and the volume-normalizing constant.
//!
//! For ψ = Σ a_ℓ Y_ℓ the energy is
//!
//!   J(ψ) = ½ Σ_ℓ μ_ℓ a_ℓ²  −  (Λ/|S^n|) ∫ ψ dg₀  +  (Λ/n) ln ∫ K̃ e^{n(ψ − w₀∘π)} dg₀,
//!
//! where μ_ℓ is the Paneitz eigenvalue ladder and K̃ the lifted weight.  The
//! mass integrand spans hundreds of orders of magnitude, so all of it is kept
//! in log space and summed with a max-shifted log-sum-exp; the density is only
//! ever exponentiated after normalization.  Stationarity of J is exactly the
//! lifted Euler–Lagrange equation, which hands us the gradient for free: one
//! forward transform of the normalized density.

use crate::error::{QcurvError, Result};
use crate::paneitz::PaneitzSpectrum;
use crate::problem::ProblemSpec;
use crate::sphere::{analyze, plane_radius, synthesize, GridField, QuadratureRule, SpectralField, ZonalBasis};

/// Threshold below which the shifted mass integrand is considered fully
/// underflowed and the problem data degenerate at this resolution.
const UNDERFLOW_LOG: f64 = -700.0;

/// Precomputed, ψ-independent state for energy evaluations.
#[derive(Debug, Clone)]
pub struct FunctionalState {
    pub spec: ProblemSpec,
    pub quad: QuadratureRule,
    pub basis: ZonalBasis,
    pub spectrum: PaneitzSpectrum,
    /// ln K̃(t_m) − n w₀(r(t_m)): the log-density against dg₀ at ψ = 0.
    pub log_base: GridField,
    /// ln w_m, cached for the log-sum-exp.
    log_weights: Vec<f64>,
}

/// Value of the mass integral together with the normalized Gibbs density.
#[derive(Debug, Clone)]
pub struct MassResult {
    /// ln ∫ K̃ e^{n(ψ − w₀∘π)} dg₀
    pub log_mass: f64,
    /// ρ_m >= 0 with Σ_m w_m ρ_m = 1
    pub density: GridField,
}

impl FunctionalState {
    pub fn build(
        spec: ProblemSpec,
        quad: QuadratureRule,
        basis: ZonalBasis,
        spectrum: PaneitzSpectrum,
    ) -> Result<Self> {
        if basis.node_count() != quad.len() {
            return Err(QcurvError::InvalidInput(
                "basis was built on a different quadrature rule".into(),
            ));
        }
        if spectrum.degree() < basis.degree() {
            return Err(QcurvError::InvalidInput(format!(
                "spectrum degree {} below basis degree {}",
                spectrum.degree(),
                basis.degree()
            )));
        }
        if quad.dim != spec.dim {
            return Err(QcurvError::InvalidInput(
                "quadrature dimension does not match problem dimension".into(),
            ));
        }
        let n = spec.n();
        let ratio = spec.lambda_ratio();
        let mut log_base = Vec::with_capacity(quad.len());
        for &t in quad.nodes() {
            // Exact height-side identities: r² = (1+t)/(1-t), w₀(r(t)) = ln(1-t),
            // ln r = (ln(1+t) - ln(1-t))/2.  The combined exponent is
            // n·[β ln r + p(r) + q(1/r) − (Λ/Λ₁ + 1) w₀].
            let r_sq = (1.0 + t) / (1.0 - t);
            let inv_r_sq = (1.0 - t) / (1.0 + t);
            let ln_r = 0.5 * ((1.0 + t).ln() - (1.0 - t).ln());
            let w0_val = (1.0 - t).ln();
            let beta_term = if spec.beta == 0.0 {
                0.0
            } else {
                spec.beta * ln_r
            };
            let v = n
                * (beta_term + spec.p.eval_sq(r_sq) + spec.q.eval_sq(inv_r_sq)
                    - (ratio + 1.0) * w0_val);
            if !v.is_finite() {
                return Err(QcurvError::Numerical(format!(
                    "log-density not finite at node t = {t}"
                )));
            }
            log_base.push(v);
        }
        let log_weights = quad.weights().iter().map(|w| w.ln()).collect();
        Ok(FunctionalState {
            spec,
            quad,
            basis,
            spectrum,
            log_base: GridField::new(log_base),
            log_weights,
        })
    }

    /// Convenience constructor building the rule, basis and spectrum for a
    /// given truncation degree and quadrature size.
    pub fn assemble(spec: ProblemSpec, l_max: usize, m: usize) -> Result<Self> {
        let quad = QuadratureRule::build(spec.dim, m)?;
        let basis = ZonalBasis::build(spec.dim, l_max, &quad)?;
        let spectrum = PaneitzSpectrum::build(spec.dim, l_max)?;
        FunctionalState::build(spec, quad, basis, spectrum)
    }

    pub fn degree(&self) -> usize {
        self.basis.degree()
    }

    fn check_len(&self, psi: &SpectralField) -> Result<()> {
        if psi.len() > self.degree() + 1 {
            return Err(QcurvError::InvalidInput(format!(
                "psi has {} coefficients, state supports degree {}",
                psi.len(),
                self.degree()
            )));
        }
        Ok(())
    }

    /// Log of the mass integral and the normalized density, via max-shifted
    /// log-sum-exp over the nodes.
    pub fn mass_integral(&self, psi: &SpectralField) -> Result<MassResult> {
        self.check_len(psi)?;
        let n = self.spec.n();
        let psi_grid = synthesize(psi, &self.basis)?;
        let mut terms = Vec::with_capacity(self.quad.len());
        let mut top = f64::NEG_INFINITY;
        for ((&lw, &lb), &pv) in self
            .log_weights
            .iter()
            .zip(self.log_base.values())
            .zip(psi_grid.values())
        {
            let x = lw + lb + n * pv;
            if x > top {
                top = x;
            }
            terms.push(x);
        }
        if !top.is_finite() || top < UNDERFLOW_LOG {
            return Err(QcurvError::DegenerateMass);
        }
        let sum: f64 = terms.iter().map(|&x| (x - top).exp()).sum();
        let log_mass = top + sum.ln();
        let density: Vec<f64> = terms
            .iter()
            .zip(&self.log_weights)
            .map(|(&x, &lw)| (x - lw - log_mass).exp())
            .collect();
        Ok(MassResult {
            log_mass,
            density: GridField::new(density),
        })
    }

    /// J(ψ).  The linear term uses ∫ψ dg₀ = a₀ |S^n|^{1/2} and the reduction
    /// (n−1)!Λ/Λ₁ = Λ/|S^n|.
    pub fn evaluate(&self, psi: &SpectralField) -> Result<f64> {
        self.check_len(psi)?;
        let mass = self.mass_integral(psi)?;
        Ok(self.quadratic_term(psi) + self.linear_term(psi)
            + self.spec.lambda / self.spec.n() * mass.log_mass)
    }

    pub(crate) fn quadratic_term(&self, psi: &SpectralField) -> f64 {
        psi.coeffs()
            .iter()
            .zip(&self.spectrum.mu)
            .map(|(&a, &mu)| 0.5 * mu * a * a)
            .sum()
    }

    fn linear_term(&self, psi: &SpectralField) -> f64 {
        let vol = self.spec.constants().sphere_volume;
        let a0 = psi.coeffs().first().copied().unwrap_or(0.0);
        -(self.spec.lambda / vol) * a0 * vol.sqrt()
    }

    /// Exact gradient of J in coefficient space:
    /// g_ℓ = μ_ℓ a_ℓ − Λ|S^n|^{−1/2}[ℓ=0] + Λ·(analyze ρ)_ℓ.
    pub fn gradient(&self, psi: &SpectralField) -> Result<SpectralField> {
        self.check_len(psi)?;
        let mass = self.mass_integral(psi)?;
        let rho_hat = analyze(&mass.density, &self.basis, &self.quad)?;
        let lambda = self.spec.lambda;
        let vol = self.spec.constants().sphere_volume;
        let mut g = Vec::with_capacity(self.degree() + 1);
        for l in 0..=self.degree() {
            let a = psi.coeffs().get(l).copied().unwrap_or(0.0);
            let mut gl = self.spectrum.mu[l] * a + lambda * rho_hat.coeffs()[l];
            if l == 0 {
                gl -= lambda / vol.sqrt();
            }
            g.push(gl);
        }
        SpectralField::new(g)
    }

    /// Volume-restoring constant c_ψ = (ln Λ − ln mass)/n, so that
    /// ∫ K e^{n(ψ̃ + c_ψ)} dx = Λ holds by construction.
    pub fn c_psi(&self, psi: &SpectralField) -> Result<f64> {
        let mass = self.mass_integral(psi)?;
        Ok((self.spec.lambda.ln() - mass.log_mass) / self.spec.n())
    }

    /// Grid L²(dg₀)-norm of the Euler–Lagrange defect
    /// Σ μ_ℓ a_ℓ Y_ℓ − (Λ/|S^n| − Λ ρ).
    pub fn el_residual(&self, psi: &SpectralField) -> Result<f64> {
        self.check_len(psi)?;
        let mass = self.mass_integral(psi)?;
        let weighted = SpectralField::new(
            psi.coeffs()
                .iter()
                .zip(&self.spectrum.mu)
                .map(|(&a, &mu)| mu * a)
                .collect(),
        )?;
        let p_psi = synthesize(&weighted, &self.basis)?;
        let lambda = self.spec.lambda;
        let mean = lambda / self.spec.constants().sphere_volume;
        let mut acc = 0.0;
        for ((&lhs, &rho), &w) in p_psi
            .values()
            .iter()
            .zip(mass.density.values())
            .zip(self.quad.weights())
        {
            let defect = lhs - (mean - lambda * rho);
            acc += w * defect * defect;
        }
        Ok(acc.sqrt())
    }

    /// Stereographic radii of the quadrature nodes.
    pub fn node_radii(&self) -> Vec<f64> {
        self.quad.node_radii()
    }

    /// Jensen lower bound for the log-mass at ψ:
    /// ln mass >= (1/|S^n|)∫(log-integrand) dg₀ + ln|S^n|.
    /// Returns (log_mass, bound).
    pub fn jensen_gap(&self, psi: &SpectralField) -> Result<(f64, f64)> {
        let mass = self.mass_integral(psi)?;
        let n = self.spec.n();
        let psi_grid = synthesize(psi, &self.basis)?;
        let vol = self.spec.constants().sphere_volume;
        let mean_log: f64 = self
            .quad
            .weights()
            .iter()
            .zip(self.log_base.values())
            .zip(psi_grid.values())
            .map(|((&w, &lb), &pv)| w * (lb + n * pv))
            .sum::<f64>()
            / vol;
        Ok((mass.log_mass, mean_log + vol.ln()))
    }

    /// First interior node radius (used to size verification panels).
    pub fn radius_range(&self) -> (f64, f64) {
        let nodes = self.quad.nodes();
        let lo = plane_radius(nodes[0]).expect("interior node");
        let hi = plane_radius(nodes[nodes.len() - 1]).expect("interior node");
        (lo, hi)
    }
}
