//! Shared integrands for the criterion benchmarks.

/// `e^{x²}`, the smooth test integrand.
pub fn gaussian_growth(x: f64) -> f64 {
    (x * x).exp()
}

/// `1 / (1 + 25x²)`, the Runge function.
pub fn runge(x: f64) -> f64 {
    1.0 / (1.0 + 25.0 * x * x)
}
