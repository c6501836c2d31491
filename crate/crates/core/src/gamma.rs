//! Gamma function.

/// Γ(x) for real x; not finite at the poles (non-positive integers).
pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}
