//! Exact factorials and half-integer gamma values.
//!
//! Everything geometric in this crate (sphere volumes, Jacobi weight masses,
//! beta-function oracles) only ever needs Γ at integer and half-integer
//! arguments, so we evaluate those exactly from integer factorials instead of
//! pulling in a general special-function routine.

use crate::error::{QcurvError, Result};
use std::f64::consts::PI;

/// Largest n for which n! is computed as an exact integer before conversion.
pub const MAX_FACTORIAL: u32 = 20;

/// n! as f64, exact as an integer for n <= 20 (one rounding on conversion).
pub fn factorial(n: u32) -> Result<f64> {
    if n > MAX_FACTORIAL {
        return Err(QcurvError::InvalidInput(format!(
            "factorial({n}) exceeds the exact-integer range (n <= {MAX_FACTORIAL})"
        )));
    }
    let mut acc: u128 = 1;
    for k in 2..=u128::from(n) {
        acc *= k;
    }
    Ok(acc as f64)
}

/// Γ(x) for x = twice_x / 2 with twice_x >= 1.
///
/// Integer x: Γ(m) = (m-1)!.  Half-integer: Γ(m + 1/2) = (2m)! √π / (4^m m!).
pub fn gamma_half(twice_x: u32) -> Result<f64> {
    if twice_x == 0 {
        return Err(QcurvError::InvalidInput(
            "gamma_half: argument must be positive".into(),
        ));
    }
    if twice_x.is_multiple_of(2) {
        factorial(twice_x / 2 - 1)
    } else {
        let m = (twice_x - 1) / 2;
        Ok(factorial(2 * m)? * PI.sqrt() / (4f64.powi(m as i32) * factorial(m)?))
    }
}

/// Volume of the unit n-sphere, |S^n| = 2 π^{(n+1)/2} / Γ((n+1)/2).
pub fn sphere_volume(n: u32) -> Result<f64> {
    if n == 0 {
        return Err(QcurvError::InvalidDimension(0));
    }
    if n > 2 * MAX_FACTORIAL {
        return Err(QcurvError::InvalidDimension(i64::from(n)));
    }
    Ok(2.0 * PI.powf((f64::from(n) + 1.0) / 2.0) / gamma_half(n + 1)?)
}

/// ∫_{-1}^{1} (1-x)^α (1+x)^β dx = 2^{α+β+1} Γ(α+1) Γ(β+1) / Γ(α+β+2),
/// for α = two_alpha/2, β = two_beta/2 (half-integers >= 0).
pub fn jacobi_weight_mass(two_alpha: u32, two_beta: u32) -> Result<f64> {
    let a = f64::from(two_alpha) / 2.0;
    let b = f64::from(two_beta) / 2.0;
    Ok(2f64.powf(a + b + 1.0) * gamma_half(two_alpha + 2)? * gamma_half(two_beta + 2)?
        / gamma_half(two_alpha + two_beta + 4)?)
}

/// Closed form for ∫_{-1}^{1} t^k (1-t²)^{α} dt with α = two_alpha/2:
/// zero for odd k, B((k+1)/2, α+1) for even k.
pub fn monomial_moment(k: u32, two_alpha: u32) -> Result<f64> {
    if k % 2 == 1 {
        return Ok(0.0);
    }
    // B(p, q) = Γ(p)Γ(q)/Γ(p+q) with p = (k+1)/2, q = α+1.
    let num = gamma_half(k + 1)? * gamma_half(two_alpha + 2)?;
    let den = gamma_half(k + 1 + two_alpha + 2)?;
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorials_exact() {
        assert_eq!(factorial(0).unwrap(), 1.0);
        assert_eq!(factorial(5).unwrap(), 120.0);
        assert_eq!(factorial(12).unwrap(), 479_001_600.0);
        assert!(factorial(21).is_err());
    }

    #[test]
    fn gamma_half_values() {
        // Γ(1/2) = √π, Γ(1) = 1, Γ(3/2) = √π/2, Γ(2) = 1, Γ(5/2) = 3√π/4
        assert!((gamma_half(1).unwrap() - PI.sqrt()).abs() < 1e-15);
        assert_eq!(gamma_half(2).unwrap(), 1.0);
        assert!((gamma_half(3).unwrap() - PI.sqrt() / 2.0).abs() < 1e-15);
        assert_eq!(gamma_half(4).unwrap(), 1.0);
        assert!((gamma_half(5).unwrap() - 0.75 * PI.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn sphere_volumes_low_dimensions() {
        // |S^1| = 2π, |S^2| = 4π, |S^3| = 2π², |S^4| = 8π²/3
        assert!((sphere_volume(1).unwrap() - 2.0 * PI).abs() < 1e-14);
        assert!((sphere_volume(2).unwrap() - 4.0 * PI).abs() < 1e-13);
        assert!((sphere_volume(3).unwrap() - 2.0 * PI * PI).abs() < 1e-13);
        assert!((sphere_volume(4).unwrap() - 8.0 * PI * PI / 3.0).abs() < 1e-13);
        assert!(sphere_volume(0).is_err());
    }

    #[test]
    fn sphere_volume_cross_check_s3() {
        // |S³| = |S²| ∫₀^π sin²θ dθ = 4π · π/2
        let direct = sphere_volume(3).unwrap();
        let product = sphere_volume(2).unwrap() * PI / 2.0;
        assert!((direct - product).abs() / direct < 1e-15);
    }

    #[test]
    fn weight_mass_matches_sphere_factorization() {
        // |S^{n-1}| · ∫(1-t²)^{(n-2)/2} dt = |S^n|
        for n in 2..=10u32 {
            let mass = jacobi_weight_mass(n - 2, n - 2).unwrap();
            let lhs = sphere_volume(n - 1).unwrap() * mass;
            let rhs = sphere_volume(n).unwrap();
            assert!((lhs - rhs).abs() / rhs < 1e-14, "n = {n}");
        }
    }

    #[test]
    fn monomial_moments() {
        // ∫ t² √(1-t²) dt = π/8, ∫ t dt (any weight) = 0
        assert!((monomial_moment(2, 1).unwrap() - PI / 8.0).abs() < 1e-15);
        assert_eq!(monomial_moment(3, 1).unwrap(), 0.0);
        // Legendre weight: ∫ t² dt = 2/3
        assert!((monomial_moment(2, 0).unwrap() - 2.0 / 3.0).abs() < 1e-15);
    }
}
