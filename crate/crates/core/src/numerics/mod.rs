//! Numerical kernel: quadrature on `[0, π]`, root finding, finite differences
//! and entropy functionals on small density matrices.

pub mod density;
pub mod diff;
pub mod quadrature;
pub mod roots;

pub use density::{
    partial_trace, relative_entropy, relative_entropy_to_product, von_neumann_entropy,
    DensityMatrix,
};
pub use diff::{first_derivative, second_derivative};
pub use quadrature::{integrate_0_pi, integrate_0_pi_with_budget, QuadratureResult};
pub use roots::{
    fixed_point, scan_roots, solve_bracketed, solve_bracketed_with, BracketOptions, RootResult,
};

/// `ln cosh x` without overflow.
pub fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// `ln sum_i exp(x_i)`, shifted by the maximum.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_cosh_is_stable() {
        assert!((ln_cosh(0.3) - 0.3f64.cosh().ln()).abs() < 1e-15);
        assert!((ln_cosh(-800.0) - (800.0 - std::f64::consts::LN_2)).abs() < 1e-12);
    }

    #[test]
    fn log_sum_exp_matches_naive() {
        let xs = [0.1, -2.0, 3.5];
        let naive = xs.iter().map(|x: &f64| x.exp()).sum::<f64>().ln();
        assert!((log_sum_exp(&xs) - naive).abs() < 1e-14);
        assert!((log_sum_exp(&[1000.0, 1000.0]) - (1000.0 + 2f64.ln())).abs() < 1e-12);
    }
}
