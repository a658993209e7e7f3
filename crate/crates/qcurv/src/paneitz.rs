//! Eigenvalue ladders of the order-n conformal (Paneitz-type) operator on the
//! round sphere and of its square root.
//!
//! Both operators are diagonal on spherical harmonics.  With
//! λ_ℓ = ℓ(ℓ + n − 1):
//!
//!   n even:  μ_ℓ = Π_{k=0}^{(n−2)/2} (λ_ℓ + k(n−k−1))
//!   n odd:   μ_ℓ = (λ_ℓ + ((n−1)/2)²)^{1/2} · Π_{k=0}^{(n−3)/2} (λ_ℓ + k(n−k−1))
//!
//! and the square root takes exponent 1/2 on each product factor (1/4 on the
//! leading factor in the odd case).  Computing `mu_sqrt` from its own factor
//! formula keeps `mu_sqrt² = mu` a real consistency check instead of a
//! tautology.

use crate::error::Result;
use crate::problem::Dimension;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PaneitzSpectrum {
    pub mu: Vec<f64>,
    pub mu_sqrt: Vec<f64>,
}

/// Laplace–Beltrami eigenvalue of degree-ℓ spherical harmonics.
pub fn laplace_eigenvalue(n: Dimension, l: usize) -> f64 {
    let lf = l as f64;
    lf * (lf + n.as_f64() - 1.0)
}

impl PaneitzSpectrum {
    pub fn build(n: Dimension, l_max: usize) -> Result<Self> {
        let nf = n.as_f64();
        let mut mu = Vec::with_capacity(l_max + 1);
        let mut mu_sqrt = Vec::with_capacity(l_max + 1);
        for l in 0..=l_max {
            let lambda = laplace_eigenvalue(n, l);
            let (mut prod, mut prod_sqrt) = if n.is_even() {
                (1.0, 1.0)
            } else {
                let half = (nf - 1.0) / 2.0;
                let lead = lambda + half * half;
                (lead.sqrt(), lead.powf(0.25))
            };
            let k_top = if n.is_even() {
                (n.get() - 2) / 2
            } else {
                (n.get() - 3) / 2
            };
            for k in 0..=k_top {
                let kf = f64::from(k);
                let factor = lambda + kf * (nf - kf - 1.0);
                prod *= factor;
                prod_sqrt *= factor.sqrt();
            }
            mu.push(prod);
            mu_sqrt.push(prod_sqrt);
        }
        Ok(PaneitzSpectrum { mu, mu_sqrt })
    }

    pub fn degree(&self) -> usize {
        self.mu.len() - 1
    }
}
