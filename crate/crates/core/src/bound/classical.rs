//! Mean-field treatment of the classical 1D Ising chain, `s = tanh(Ks + C)`.

use super::mean_field::{MeanFieldSolution, SCAN_INTERVALS};
use super::Couplings;
use crate::error::{Error, Result};

pub fn classical_ising_residual(p: Couplings, s: f64) -> f64 {
    s - (p.k() * s + p.c()).tanh()
}

/// All roots of `s = tanh(Ks + C)` on `[-1, 1]`; the principal root is the
/// largest (ferromagnetic) one.
pub fn classical_ising_mf_solve(p: Couplings) -> MeanFieldSolution {
    let mut sol = MeanFieldSolution::scan(|s| classical_ising_residual(p, s), SCAN_INTERVALS);
    if let Some(&max) = sol.branches.last() {
        sol.principal = max;
    }
    sol
}

/// Smallest `K` at `C = 0` above which a nonzero branch exists, bisected to `tol`.
pub fn classical_ising_critical_k(tol: f64) -> Result<f64> {
    let exists =
        |k: f64| classical_ising_mf_solve(Couplings::unchecked(k, 0.0)).has_nonzero_branch();
    bisect_threshold(exists, 0.5, 2.0, tol)
}

/// Bisection on a monotone predicate that is false at `lo` and true at `hi`.
pub(crate) fn bisect_threshold<P: Fn(f64) -> bool>(
    pred: P,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    if pred(lo) || !pred(hi) {
        return Err(Error::NonConvergence {
            what: "threshold bisection (predicate not bracketed)",
            estimate: hi - lo,
            budget: 0,
        });
    }
    let (mut a, mut b) = (lo, hi);
    let mut steps = 0;
    while b - a > tol {
        let m = 0.5 * (a + b);
        if pred(m) {
            b = m;
        } else {
            a = m;
        }
        steps += 1;
        if steps > 200 {
            return Err(Error::NonConvergence {
                what: "threshold bisection",
                estimate: b - a,
                budget: 200,
            });
        }
    }
    Ok(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(k: f64, c: f64) -> Couplings {
        Couplings::new(k, c).unwrap()
    }

    /// Dense-scan reference: count of sign changes of s - tanh(Ks + C) on (0, 1].
    fn positive_sign_changes(k: f64, c: f64) -> usize {
        let n = 200_000;
        let f = |s: f64| s - (k * s + c).tanh();
        (1..n)
            .filter(|&i| {
                let a = i as f64 / n as f64;
                let b = (i + 1) as f64 / n as f64;
                f(a) * f(b) < 0.0
            })
            .count()
    }

    #[test]
    fn subcritical_has_only_zero() {
        let sol = classical_ising_mf_solve(p(0.5, 0.0));
        assert_eq!(sol.branches.len(), 1);
        assert!(sol.principal.abs() < 1e-12);
        assert_eq!(positive_sign_changes(0.5, 0.0), 0);
    }

    #[test]
    fn supercritical_principal() {
        // Independent bisection on s = tanh(2s) over [0.5, 1].
        let (mut a, mut b) = (0.5f64, 1.0f64);
        for _ in 0..100 {
            let m = 0.5 * (a + b);
            if m - (2.0 * m).tanh() < 0.0 {
                a = m;
            } else {
                b = m;
            }
        }
        let sol = classical_ising_mf_solve(p(2.0, 0.0));
        assert_eq!(sol.branches.len(), 3);
        assert!((sol.principal - a).abs() < 1e-10);
        assert!((sol.principal - 0.9575).abs() < 1e-4);
        for r in &sol.residuals {
            assert!(r.abs() <= 1e-10);
        }
    }

    #[test]
    fn field_selects_single_branch() {
        let sol = classical_ising_mf_solve(p(0.5, 1.0));
        assert_eq!(sol.branches.len(), 1);
        assert!(sol.principal > 0.0);
        assert!(!sol.out_of_range_detected);
    }

    #[test]
    fn threshold_is_at_one() {
        let kc = classical_ising_critical_k(1e-7).unwrap();
        assert!((kc - 1.0).abs() < 1e-6, "{kc}");
    }
}
