//! Problem definition: dimension, geometric constants, radial polynomial data,
//! admissibility validation, and the log-density weight ln K.
//!
//! The target equation is (−Δ)^{n/2} u = −e^{nu} on R^n \ {0} with prescribed
//! total volume Λ = ∫ e^{nu} dx.  A problem instance carries (n, Λ, β, p, q),
//! where p and q are radial polynomials in |x|² controlling the behavior at
//! infinity and at the origin respectively.

use crate::error::{QcurvError, Result};
use crate::special::{factorial, sphere_volume as sphere_volume_checked};
use serde::{Deserialize, Serialize};

/// Space dimension n >= 3.  Dimensions 1 and 2 are rejected at construction:
/// no finite-volume solution exists there.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Dimension(u32);

impl Dimension {
    pub fn new(n: u32) -> Result<Self> {
        match n {
            0 => Err(QcurvError::InvalidDimension(0)),
            1 | 2 => Err(QcurvError::NonexistenceRegime(n)),
            3..=20 => Ok(Dimension(n)),
            _ => Err(QcurvError::InvalidDimension(i64::from(n))),
        }
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.0)
    }

    pub fn is_even(self) -> bool {
        self.0.is_multiple_of(2)
    }
}

/// Volume of the unit n-sphere, 2 π^{(n+1)/2} / Γ((n+1)/2).  Defined for all
/// n >= 1 (it is also the quadrature normalization for S^{n-1} factors).
pub fn sphere_volume(n: u32) -> Result<f64> {
    sphere_volume_checked(n)
}

/// Geometric normalization constants attached to a dimension.
///
/// `gamma_n` makes (−Δ)^{n/2} ln(1/|x|) = γ_n δ₀; `lambda_1` is its double.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    pub sphere_volume: f64,
    pub gamma_n: f64,
    pub lambda_1: f64,
}

impl Constants {
    pub fn new(n: Dimension) -> Result<Self> {
        let vol = sphere_volume(n.get())?;
        let fact = factorial(n.get() - 1)?;
        let lambda_1 = fact * vol;
        Ok(Constants {
            sphere_volume: vol,
            gamma_n: lambda_1 / 2.0,
            lambda_1,
        })
    }
}

/// How a radial polynomial Σ_{j>=1} c_j r^{2j} behaves as r → ∞.
///
/// A nonconstant radial polynomial diverges with the sign of its leading
/// coefficient, so "upper-bounded" means exactly: not `UnboundedAbove`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolyClass {
    TendsToMinusInfinity,
    Constant,
    UnboundedAbove,
}

/// Radial polynomial P(x) = Σ_j c_j |x|^{2j}, stored as the coefficient list
/// c_0..c_J.  Admissible data has even degree 2J <= n − 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RadialPolynomial {
    coeffs: Vec<f64>,
}

impl RadialPolynomial {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(QcurvError::InvalidInput(
                "polynomial coefficients must be finite".into(),
            ));
        }
        Ok(RadialPolynomial { coeffs })
    }

    pub fn zero() -> Self {
        RadialPolynomial { coeffs: vec![0.0] }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Index of the highest nonzero coefficient, if any.
    fn leading_index(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|&c| c != 0.0)
    }

    /// Polynomial degree in x, i.e. 2·J for the leading power |x|^{2J}.
    pub fn degree(&self) -> usize {
        self.leading_index().map_or(0, |j| 2 * j)
    }

    pub fn classify(&self) -> PolyClass {
        match self.leading_index() {
            None | Some(0) => PolyClass::Constant,
            Some(j) => {
                if self.coeffs[j] < 0.0 {
                    PolyClass::TendsToMinusInfinity
                } else {
                    PolyClass::UnboundedAbove
                }
            }
        }
    }

    pub fn is_upper_bounded(&self) -> bool {
        self.classify() != PolyClass::UnboundedAbove
    }

    pub fn is_zero(&self) -> bool {
        self.leading_index().is_none()
    }

    /// P(r), evaluated by Horner in r².  Exact for integer data.
    pub fn eval(&self, r: f64) -> f64 {
        self.eval_sq(r * r)
    }

    /// P as a function of the squared radius.
    pub fn eval_sq(&self, r_sq: f64) -> f64 {
        // Infinite argument: resolve by classification to avoid 0·∞.
        if r_sq.is_infinite() {
            return match self.classify() {
                PolyClass::Constant => self.coeffs.first().copied().unwrap_or(0.0),
                PolyClass::TendsToMinusInfinity => f64::NEG_INFINITY,
                PolyClass::UnboundedAbove => f64::INFINITY,
            };
        }
        let mut acc = 0.0;
        for &c in self.coeffs.iter().rev() {
            acc = acc * r_sq + c;
        }
        acc
    }

    fn check_degree(&self, n: Dimension, name: &str) -> Result<()> {
        let degree = self.degree();
        let bound = n.get() - 1;
        if degree as u32 > bound {
            return Err(QcurvError::DegreeBound {
                degree,
                bound,
                n: n.get(),
            });
        }
        let _ = name;
        Ok(())
    }
}

/// The three admissible asymptotic regimes for (β, p, q).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseTag {
    I,
    II,
    III,
}

/// w₀(r) = ln(2/(1+r²)), the round conformal factor of the stereographic lift.
pub fn w0(r: f64) -> f64 {
    std::f64::consts::LN_2 - (r * r).ln_1p()
}

/// Full problem instance.  Construction validates the Theorem-level case
/// analysis and stores the matched case tag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub dim: Dimension,
    pub lambda: f64,
    pub beta: f64,
    pub p: RadialPolynomial,
    pub q: RadialPolynomial,
    pub case_tag: CaseTag,
    #[serde(skip, default)]
    constants: Option<Constants>,
}

impl ProblemSpec {
    pub fn new(
        dim: Dimension,
        lambda: f64,
        beta: f64,
        p: RadialPolynomial,
        q: RadialPolynomial,
    ) -> Result<Self> {
        let case_tag = validate(dim, lambda, beta, &p, &q)?;
        let constants = Constants::new(dim)?;
        Ok(ProblemSpec {
            dim,
            lambda,
            beta,
            p,
            q,
            case_tag,
            constants: Some(constants),
        })
    }

    pub fn constants(&self) -> Constants {
        match self.constants {
            Some(c) => c,
            // Deserialized specs skip the cached value; rebuild (infallible
            // for an already-validated dimension).
            None => Constants::new(self.dim).expect("constants for validated dimension"),
        }
    }

    pub fn n(&self) -> f64 {
        self.dim.as_f64()
    }

    /// Λ / Λ₁, the coefficient of w₀ in the solution ansatz.
    pub fn lambda_ratio(&self) -> f64 {
        self.lambda / self.constants().lambda_1
    }

    /// Λ / γ_n, the logarithmic growth rate of the regular part at infinity.
    pub fn lambda_over_gamma(&self) -> f64 {
        self.lambda / self.constants().gamma_n
    }

    /// ln K(r) = n·[β ln r + p(r) + q(1/r) − (Λ/Λ₁) w₀(r)], entirely in log
    /// space.  r = 0 is admissible only for β = 0 (the limit is resolved by
    /// the polynomial classification of q).
    pub fn log_k(&self, r: f64) -> Result<f64> {
        if r < 0.0 || !r.is_finite() {
            return Err(QcurvError::InvalidInput(format!(
                "log_k requires a finite radius r >= 0, got {r}"
            )));
        }
        if r == 0.0 && self.beta != 0.0 {
            return Err(QcurvError::InvalidInput(
                "log_k at r = 0 is singular for beta != 0; evaluate at interior nodes".into(),
            ));
        }
        let r_sq = r * r;
        let inv_sq = if r == 0.0 { f64::INFINITY } else { 1.0 / r_sq };
        Ok(self.log_k_parts(r.ln(), r_sq, inv_sq))
    }

    /// Shared kernel for ln K given precomputed (ln r, r², 1/r²).  Callers on
    /// the sphere side pass values derived exactly from the height coordinate.
    pub(crate) fn log_k_parts(&self, ln_r: f64, r_sq: f64, inv_r_sq: f64) -> f64 {
        let n = self.n();
        let beta_term = if self.beta == 0.0 { 0.0 } else { self.beta * ln_r };
        let w0_val = std::f64::consts::LN_2 - r_sq.ln_1p();
        n * (beta_term + self.p.eval_sq(r_sq) + self.q.eval_sq(inv_r_sq)
            - self.lambda_ratio() * w0_val)
    }
}

/// Case analysis for admissible (β, p, q), checked in the order I, II, III.
///
/// Case III carries an extra admissibility guard: with p upper-bounded (hence
/// constant in the radial setting), the total mass ∫ K e^{nψ} dx is finite
/// only for β + Λ/γ_n < −1 (equivalently, the Kelvin-inverted problem is
/// case-II admissible).  Outside that range the variational problem is
/// degenerate and the spec is rejected.
pub fn validate(
    dim: Dimension,
    lambda: f64,
    beta: f64,
    p: &RadialPolynomial,
    q: &RadialPolynomial,
) -> Result<CaseTag> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(QcurvError::InvalidInput(format!(
            "volume Lambda must be positive and finite, got {lambda}"
        )));
    }
    if !beta.is_finite() {
        return Err(QcurvError::InvalidInput("beta must be finite".into()));
    }
    p.check_degree(dim, "p")?;
    q.check_degree(dim, "q")?;

    let p_class = p.classify();
    let q_class = q.classify();
    let p_to_minus_inf = p_class == PolyClass::TendsToMinusInfinity;
    let q_to_minus_inf = q_class == PolyClass::TendsToMinusInfinity;

    if p_to_minus_inf && q_to_minus_inf {
        return Ok(CaseTag::I);
    }
    if beta > -1.0 && q.is_upper_bounded() && p_to_minus_inf {
        return Ok(CaseTag::II);
    }
    if beta < -1.0 && p.is_upper_bounded() && q_to_minus_inf {
        let gamma_n = Constants::new(dim)?.gamma_n;
        if beta + lambda / gamma_n >= -1.0 {
            return Err(QcurvError::UncoveredRegime(format!(
                "beta = {beta} with Lambda/gamma_n = {} leaves the mass integral divergent \
                 at infinity (requires beta + Lambda/gamma_n < -1 when p is bounded)",
                lambda / gamma_n
            )));
        }
        return Ok(CaseTag::III);
    }
    Err(QcurvError::UncoveredRegime(format!(
        "beta = {beta}, p {:?}, q {:?} matches no admissible case",
        p_class, q_class
    )))
}
