//! Central finite differences.

/// Five-point central estimate of `f''(x)`, error `O(h^4)`.
pub fn second_derivative<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    let f0 = f(x);
    let f1 = f(x + h) + f(x - h);
    let f2 = f(x + 2.0 * h) + f(x - 2.0 * h);
    (-f2 + 16.0 * f1 - 30.0 * f0) / (12.0 * h * h)
}

/// Five-point central estimate of `f'(x)`, error `O(h^4)`.
pub fn first_derivative<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic() {
        assert!((second_derivative(|x| x * x, 3.0, 0.01) - 2.0).abs() < 1e-8);
    }

    #[test]
    fn exponential() {
        assert!((second_derivative(f64::exp, 0.0, 0.01) - 1.0).abs() < 1e-7);
        assert!((first_derivative(f64::exp, 0.0, 0.01) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn constant() {
        assert!(second_derivative(|_| 4.2, 1.0, 0.1).abs() < 1e-12);
        assert!(first_derivative(|_| 4.2, 1.0, 0.1).abs() < 1e-12);
    }

    #[test]
    fn propagates_nan() {
        assert!(second_derivative(|x: f64| (x - 0.5).ln(), 0.5, 0.1).is_nan());
    }
}
