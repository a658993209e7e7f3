//! Gauss–Jacobi quadrature on [-1, 1] for weights (1-x)^α (1+x)^β with
//! half-integer α, β >= 0.
//!
//! Nodes are the eigenvalues of the symmetric tridiagonal Jacobi matrix built
//! from the monic three-term recurrence, located by Sturm-sequence bisection;
//! weights come from the Christoffel function 1/Σ φ_k(x)² of the orthonormal
//! family.  Both steps are deterministic and dependency-free, and every rule
//! property the solver relies on (weight sum, polynomial exactness) is
//! enforced by tests rather than assumed from closed-form constants.

use crate::error::{QcurvError, Result};
use crate::special::jacobi_weight_mass;

/// Monic recurrence p_{k+1} = (x - a_k) p_k - b_k p_{k-1} for the Jacobi
/// weight, plus the total weight mass mu0.
#[derive(Debug, Clone)]
pub(crate) struct JacobiRecurrence {
    pub a: Vec<f64>,
    pub b: Vec<f64>, // b[0] is unused by convention
    pub mu0: f64,
}

pub(crate) fn jacobi_recurrence(m: usize, two_alpha: u32, two_beta: u32) -> Result<JacobiRecurrence> {
    let alpha = f64::from(two_alpha) / 2.0;
    let beta = f64::from(two_beta) / 2.0;
    let s = alpha + beta;
    let mut a = vec![0.0; m];
    let mut b = vec![0.0; m + 1];
    for (k, ak) in a.iter_mut().enumerate() {
        *ak = if two_alpha == two_beta {
            0.0
        } else if k == 0 {
            (beta - alpha) / (s + 2.0)
        } else {
            let d = 2.0 * k as f64 + s;
            (beta * beta - alpha * alpha) / (d * (d + 2.0))
        };
    }
    for (k, bk) in b.iter_mut().enumerate().skip(1) {
        let kf = k as f64;
        *bk = if k == 1 {
            4.0 * (alpha + 1.0) * (beta + 1.0) / ((s + 2.0) * (s + 2.0) * (s + 3.0))
        } else {
            let d = 2.0 * kf + s;
            4.0 * kf * (kf + alpha) * (kf + beta) * (kf + s) / (d * d * (d + 1.0) * (d - 1.0))
        };
    }
    Ok(JacobiRecurrence {
        a,
        b,
        mu0: jacobi_weight_mass(two_alpha, two_beta)?,
    })
}

/// Number of eigenvalues of the tridiagonal Jacobi matrix strictly below x,
/// from the signs of the LDL^T pivots of (J - x I).
fn sturm_count(rec: &JacobiRecurrence, m: usize, x: f64) -> usize {
    let mut count = 0usize;
    let mut d = rec.a[0] - x;
    if d == 0.0 {
        d = -1e-300;
    }
    if d < 0.0 {
        count += 1;
    }
    for i in 1..m {
        d = rec.a[i] - x - rec.b[i] / d;
        if d == 0.0 {
            d = -1e-300;
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// An m-point Gauss rule: Σ w_i f(x_i) ≈ ∫ f(x) (1-x)^α (1+x)^β dx.
#[derive(Debug, Clone)]
pub(crate) struct JacobiRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl JacobiRule {
    pub fn new(m: usize, two_alpha: u32, two_beta: u32) -> Result<Self> {
        if m < 2 {
            return Err(QcurvError::InvalidInput(format!(
                "quadrature needs at least 2 points, got {m}"
            )));
        }
        let rec = jacobi_recurrence(m, two_alpha, two_beta)?;

        let mut nodes = vec![0.0; m];
        for (k, node) in nodes.iter_mut().enumerate() {
            // All eigenvalues lie in (-1, 1); bisect on a slightly padded box.
            let mut lo = -1.000001f64;
            let mut hi = 1.000001f64;
            while hi - lo > 1e-16 * (lo.abs().max(hi.abs()) + 1.0) {
                let mid = 0.5 * (lo + hi);
                if sturm_count(&rec, m, mid) > k {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            *node = 0.5 * (lo + hi);
        }

        let mut weights = vec![0.0; m];
        for (node, weight) in nodes.iter().zip(weights.iter_mut()) {
            *weight = 1.0 / orthonormal_sq_sum(&rec, m, *node);
        }

        // Symmetric weight: enforce the node/weight symmetry exactly so that
        // odd moments vanish to rounding.
        if two_alpha == two_beta {
            for k in 0..m / 2 {
                let j = m - 1 - k;
                let t = 0.5 * (nodes[j] - nodes[k]);
                nodes[k] = -t;
                nodes[j] = t;
                let w = 0.5 * (weights[k] + weights[j]);
                weights[k] = w;
                weights[j] = w;
            }
            if m % 2 == 1 {
                nodes[m / 2] = 0.0;
            }
        }

        Ok(JacobiRule { nodes, weights })
    }

}

/// Σ_{k=0}^{m-1} φ_k(x)² for the orthonormal Jacobi family.
fn orthonormal_sq_sum(rec: &JacobiRecurrence, m: usize, x: f64) -> f64 {
    let mut phi_prev = 0.0f64;
    let mut phi = 1.0 / rec.mu0.sqrt();
    let mut sum = phi * phi;
    for k in 0..m - 1 {
        let sb_next = rec.b[k + 1].sqrt();
        let sb = if k == 0 { 0.0 } else { rec.b[k].sqrt() };
        let phi_next = ((x - rec.a[k]) * phi - sb * phi_prev) / sb_next;
        phi_prev = phi;
        phi = phi_next;
        sum += phi * phi;
    }
    sum
}
