//! Spectral construction and verification of singular metrics of constant
//! negative Q-curvature on punctured Euclidean space.
//!
//! The solver lifts the equation (−Δ)^{n/2} u = −e^{nu} on R^n \ {0} with
//! prescribed volume Λ to the round sphere via stereographic projection,
//! minimizes the associated variational functional over a truncated zonal
//! harmonic basis, and maps the minimizer back to an explicit radial profile
//! u(r).  A separate verification layer recomputes the solution's Green
//! potential by direct logarithmic-kernel quadrature and checks the expected
//! structure: the prescribed volume, the logarithmic slopes at zero and
//! infinity, the inversion (Kelvin) identity, and the boundedness of the
//! decomposition remainder.
//!
//! Modules follow the pipeline order: `problem` (data and validation),
//! `jacobi`/`sphere`/`paneitz` (discretization), `functional` (energy and
//! gradient), `optimizer` (descent loop), `solution`/`green`/`verify`
//! (assembly and independent checks), `config`/`report`/`selfcheck` (CLI
//! surface).

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` guards reject NaN

pub mod adaptive;
pub mod config;
pub mod error;
pub mod functional;
pub mod green;
mod jacobi;
pub mod optimizer;
pub mod paneitz;
pub mod problem;
pub mod report;
pub mod selfcheck;
pub mod solution;
pub mod special;
pub mod sphere;
pub mod verify;

pub use error::{QcurvError, Result};
pub use functional::{FunctionalState, MassResult};
pub use optimizer::{minimize, SolveOptions, SolveResult};
pub use paneitz::PaneitzSpectrum;
pub use problem::{CaseTag, Constants, Dimension, ProblemSpec, RadialPolynomial};
pub use solution::AssembledSolution;
pub use sphere::{analyze, synthesize, GridField, QuadratureRule, SpectralField, ZonalBasis};
pub use verify::{VerificationReport, VerifyOptions};
