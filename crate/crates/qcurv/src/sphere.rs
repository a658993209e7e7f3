//! Axisymmetric geometry of S^n: the stereographic lift, Gauss quadrature in
//! the height coordinate, the orthonormal zonal basis, and the forward and
//! backward spectral transforms.
//!
//! Every field in the pipeline is a function of the height t = ξ_{n+1} alone,
//! so the full spherical harmonic basis collapses to one zonal function per
//! degree and all transforms are dense O(L·M) matrix applications.

use crate::error::{QcurvError, Result};
use crate::jacobi::JacobiRule;
use crate::problem::{sphere_volume, Dimension};
use serde::{Deserialize, Serialize};

/// Radius of the stereographic image of the height-t parallel,
/// r(t) = sqrt((1+t)/(1-t)).  The north pole t = 1 maps to infinity and is
/// rejected.
pub fn plane_radius(t: f64) -> Result<f64> {
    if !(-1.0..1.0).contains(&t) {
        return Err(QcurvError::InvalidInput(format!(
            "plane_radius requires -1 <= t < 1, got {t}"
        )));
    }
    Ok(((1.0 + t) / (1.0 - t)).sqrt())
}

/// Inverse lift, t(r) = (r² - 1)/(r² + 1) for r >= 0.
pub fn sphere_height(r: f64) -> Result<f64> {
    if r < 0.0 || r.is_nan() {
        return Err(QcurvError::InvalidInput(format!(
            "sphere_height requires r >= 0, got {r}"
        )));
    }
    if r.is_infinite() {
        return Ok(1.0);
    }
    // (r²-1)/(r²+1) loses precision near r = 1; the equivalent two-term form
    // keeps full relative accuracy of 1 - t and 1 + t separately.
    let r_sq = r * r;
    Ok((r_sq - 1.0) / (r_sq + 1.0))
}

/// Quadrature rule for axisymmetric integrals over S^n:
/// Σ_m w_m f(t_m) ≈ ∫_{S^n} f dg₀, with the (1-t²)^{(n-2)/2} surface factor
/// and the |S^{n-1}| equatorial volume folded into the weights.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub dim: Dimension,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn build(dim: Dimension, m: usize) -> Result<Self> {
        if m < 2 {
            return Err(QcurvError::InvalidInput(format!(
                "quadrature size must be at least 2, got {m}"
            )));
        }
        let rule = JacobiRule::new(m, dim.get() - 2, dim.get() - 2)?;
        let equator = sphere_volume(dim.get() - 1)?;
        Ok(QuadratureRule {
            dim,
            nodes: rule.nodes,
            weights: rule.weights.into_iter().map(|w| w * equator).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Stereographic radii of the nodes, in increasing order.
    pub fn node_radii(&self) -> Vec<f64> {
        self.nodes
            .iter()
            .map(|&t| plane_radius(t).expect("interior node"))
            .collect()
    }

    /// Σ w_m f(t_m).
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(t))
            .sum()
    }
}

/// Values of a field at the quadrature nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridField {
    values: Vec<f64>,
}

impl GridField {
    pub fn new(values: Vec<f64>) -> Self {
        GridField { values }
    }

    pub fn zeros(len: usize) -> Self {
        GridField {
            values: vec![0.0; len],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
}

/// Coefficients over the zonal basis, degree 0..=L.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralField {
    coeffs: Vec<f64>,
}

impl SpectralField {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(QcurvError::InvalidInput(
                "spectral coefficients must be finite".into(),
            ));
        }
        Ok(SpectralField { coeffs })
    }

    pub fn zeros(len: usize) -> Self {
        SpectralField {
            coeffs: vec![0.0; len],
        }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    /// Euclidean norm of the coefficient vector.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }
}

/// Orthonormal zonal basis Y_0..Y_L tabulated at the quadrature nodes.
///
/// Built degree by degree from the three-term recurrence of the ultraspherical
/// family, orthonormalized in the quadrature inner product; the recurrence
/// coefficients are kept so the same basis can be evaluated at arbitrary
/// heights (needed when sampling the assembled solution off the grid).
///
/// The recurrence runs in plain double precision, which holds the Gram defect
/// below 1e-10 for degrees up to about 128; beyond that a compensated
/// summation of the inner products would be needed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ZonalBasis {
    pub dim: Dimension,
    l_max: usize,
    /// table[l][m] = Y_l(t_m)
    table: Vec<Vec<f64>>,
    /// <t Y_l, Y_l> (zero up to rounding, kept for bit-faithful off-grid eval)
    rec_self: Vec<f64>,
    /// <t Y_l, Y_{l-1}>
    rec_prev: Vec<f64>,
    /// quadrature norm of the degree-(l+1) candidate
    rec_norm: Vec<f64>,
    y0: f64,
}

impl ZonalBasis {
    pub fn build(dim: Dimension, l_max: usize, quad: &QuadratureRule) -> Result<Self> {
        let m = quad.len();
        if m <= l_max {
            return Err(QcurvError::InvalidInput(format!(
                "basis degree L = {l_max} needs at least L+1 quadrature nodes, got {m} (aliasing)"
            )));
        }
        if quad.dim != dim {
            return Err(QcurvError::InvalidInput(
                "quadrature rule dimension does not match basis dimension".into(),
            ));
        }
        let dot = |f: &[f64], g: &[f64]| -> f64 {
            f.iter()
                .zip(g)
                .zip(quad.weights())
                .map(|((&a, &b), &w)| w * a * b)
                .sum()
        };

        let total_weight: f64 = quad.weights().iter().sum();
        let y0 = 1.0 / total_weight.sqrt();
        let mut table = vec![vec![y0; m]];
        let mut rec_self = Vec::with_capacity(l_max);
        let mut rec_prev = Vec::with_capacity(l_max);
        let mut rec_norm = Vec::with_capacity(l_max);

        for l in 0..l_max {
            let mut cand: Vec<f64> = quad
                .nodes()
                .iter()
                .zip(&table[l])
                .map(|(&t, &y)| t * y)
                .collect();
            let c_self = dot(&cand, &table[l]);
            let c_prev = if l == 0 { 0.0 } else { dot(&cand, &table[l - 1]) };
            for (i, c) in cand.iter_mut().enumerate() {
                *c -= c_self * table[l][i];
                if l > 0 {
                    *c -= c_prev * table[l - 1][i];
                }
            }
            let norm = dot(&cand, &cand).sqrt();
            if !(norm > 0.0) {
                return Err(QcurvError::Numerical(format!(
                    "zonal basis degenerated at degree {}",
                    l + 1
                )));
            }
            for c in cand.iter_mut() {
                *c /= norm;
            }
            table.push(cand);
            rec_self.push(c_self);
            rec_prev.push(c_prev);
            rec_norm.push(norm);
        }

        Ok(ZonalBasis {
            dim,
            l_max,
            table,
            rec_self,
            rec_prev,
            rec_norm,
            y0,
        })
    }

    pub fn degree(&self) -> usize {
        self.l_max
    }

    pub fn node_count(&self) -> usize {
        self.table[0].len()
    }

    /// Row of values Y_l(t_m).
    pub fn row(&self, l: usize) -> &[f64] {
        &self.table[l]
    }

    /// Evaluate Y_0..Y_L at an arbitrary height via the stored recurrence.
    pub fn eval_into(&self, t: f64, out: &mut Vec<f64>) {
        out.clear();
        out.push(self.y0);
        for l in 0..self.l_max {
            let prev = if l == 0 { 0.0 } else { out[l - 1] };
            let next = ((t - self.rec_self[l]) * out[l] - self.rec_prev[l] * prev)
                / self.rec_norm[l];
            out.push(next);
        }
    }

    /// Σ_l a_l Y_l(t) at an arbitrary height.
    pub fn synthesize_at(&self, t: f64, coeffs: &[f64]) -> f64 {
        let mut y_prev = 0.0;
        let mut y = self.y0;
        let mut acc = coeffs.first().map_or(0.0, |&a| a * y);
        for l in 0..self.l_max.min(coeffs.len().saturating_sub(1)) {
            let y_next =
                ((t - self.rec_self[l]) * y - self.rec_prev[l] * y_prev) / self.rec_norm[l];
            y_prev = y;
            y = y_next;
            acc += coeffs[l + 1] * y;
        }
        acc
    }
}

/// Forward transform: a_l = Σ_m w_m g(t_m) Y_l(t_m).
pub fn analyze(g: &GridField, basis: &ZonalBasis, quad: &QuadratureRule) -> Result<SpectralField> {
    if g.len() != quad.len() || basis.node_count() != quad.len() {
        return Err(QcurvError::InvalidInput(format!(
            "analyze size mismatch: grid {}, basis {}, rule {}",
            g.len(),
            basis.node_count(),
            quad.len()
        )));
    }
    let mut coeffs = Vec::with_capacity(basis.degree() + 1);
    for l in 0..=basis.degree() {
        let row = basis.row(l);
        let a: f64 = g
            .values()
            .iter()
            .zip(row)
            .zip(quad.weights())
            .map(|((&gv, &y), &w)| w * gv * y)
            .sum();
        coeffs.push(a);
    }
    SpectralField::new(coeffs)
}

/// Backward transform: g(t_m) = Σ_l a_l Y_l(t_m).  Coefficient vectors shorter
/// than the basis are zero-padded; longer ones are rejected.
pub fn synthesize(a: &SpectralField, basis: &ZonalBasis) -> Result<GridField> {
    if a.len() > basis.degree() + 1 {
        return Err(QcurvError::InvalidInput(format!(
            "synthesize: {} coefficients exceed basis degree {}",
            a.len(),
            basis.degree()
        )));
    }
    let m = basis.node_count();
    let mut values = vec![0.0; m];
    for (l, &al) in a.coeffs().iter().enumerate() {
        if al == 0.0 {
            continue;
        }
        for (v, &y) in values.iter_mut().zip(basis.row(l)) {
            *v += al * y;
        }
    }
    Ok(GridField::new(values))
}
