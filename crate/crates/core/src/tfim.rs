//! Transverse-field Ising chain `βH = -K Σ σ_x^i σ_x^{i+1} - C Σ σ_z^i` in
//! the thermodynamic limit, with the product mean field
//! `βH_MF = Σ (-sK σ_x^i - C σ_z^i)`.
//!
//! Exact quantities are integrals over the free-fermion dispersion
//! `Λ(ω) = √(K² + C² - 2KC cos ω)`. All values are per spin.

use std::f64::consts::{LN_2, PI};

use crate::bound::{
    correlation_bound, AverageMode, BoundReport, Couplings, MeanFieldFit, MeanFieldModel,
    MeanFieldSolution, Normalization, SCAN_INTERVALS,
};
use crate::error::{Error, Result};
use crate::numerics::{integrate_0_pi, ln_cosh, quadrature::DEFAULT_TOL};
use crate::par;

/// `Λ(φ) = √(K² + C² - 2KC cos φ)`.
pub fn dispersion(p: Couplings, phi: f64) -> f64 {
    let (k, c) = (p.k(), p.c());
    // (K - C)² + 2KC(1 - cos φ) = (K - C)² + 4KC sin²(φ/2) avoids cancellation.
    let s = (0.5 * phi).sin();
    ((k - c) * (k - c) + 4.0 * k * c * s * s).max(0.0).sqrt()
}

fn average_over_modes<F: Fn(f64) -> f64>(f: F) -> Result<f64> {
    Ok(integrate_0_pi(f, DEFAULT_TOL)?.value / PI)
}

/// `ln Z / N = ln 2 + (1/π) ∫₀^π ln cosh Λ dω`.
pub fn ln_z_per_spin(p: Couplings) -> Result<f64> {
    Ok(LN_2 + average_over_modes(|w| ln_cosh(dispersion(p, w)))?)
}

/// `β<H>/N = -(1/π) ∫₀^π Λ tanh Λ dω`.
pub fn beta_avg_h_per_spin(p: Couplings) -> Result<f64> {
    Ok(-average_over_modes(|w| {
        let l = dispersion(p, w);
        l * l.tanh()
    })?)
}

/// `tanh(x)/x` with its limit at 0.
fn tanhc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 3.0
    } else {
        x.tanh() / x
    }
}

/// `<σ_z> = (1/π) ∫₀^π (C - K cos ω) tanh Λ / Λ dω`.
pub fn sigma_z_mean(p: Couplings) -> Result<f64> {
    average_over_modes(|w| (p.c() - p.k() * w.cos()) * tanhc(dispersion(p, w)))
}

/// Mode β-energies `Λ(2πk/N)` for `k = -N/2 + 1 ..= N/2`.
pub fn finite_spectrum(p: Couplings, n: usize) -> Result<Vec<f64>> {
    if n < 4 || !n.is_multiple_of(2) {
        return Err(Error::InvalidN(n));
    }
    let half = (n / 2) as i64;
    Ok((-half + 1..=half)
        .map(|k| dispersion(p, 2.0 * PI * k as f64 / n as f64))
        .collect())
}

/// `(1/N) Σ_k ln(2 cosh Λ_k)` over [`finite_spectrum`].
pub fn finite_ln_z_per_spin(p: Couplings, n: usize) -> Result<f64> {
    let modes = finite_spectrum(p, n)?;
    Ok(modes.iter().map(|&l| LN_2 + ln_cosh(l)).sum::<f64>() / n as f64)
}

/// Product `ab` of the mean-field eigenvector components,
/// `-K(C + R) / (K² + (C + R)²)`, `R = √(C² + s²K²)`.
pub fn ab_product(p: Couplings, s: f64) -> f64 {
    let (k, c) = (p.k(), p.c());
    let r = (c * c + s * s * k * k).sqrt();
    let den = k * k + (c + r) * (c + r);
    if den == 0.0 {
        return 0.0;
    }
    -k * (c + r) / den
}

/// Right-hand side of the self-consistency equation.
///
/// `-2ab tanh R` carries the magnitude; the sign follows `s` because
/// `σ_x -> -σ_x` maps the mean field for `s` onto the one for `-s`.
fn self_consistent_rhs(p: Couplings, s: f64) -> f64 {
    let r = (p.c() * p.c() + s * s * p.k() * p.k()).sqrt();
    let magnitude = -2.0 * ab_product(p, s) * r.tanh();
    if s < 0.0 {
        -magnitude
    } else {
        magnitude
    }
}

/// `s - 2K(C + R)/(K² + (C + R)²) tanh R`.
pub fn self_consistency_residual(p: Couplings, s: f64) -> f64 {
    s - self_consistent_rhs(p, s)
}

/// `ln Z_MF / N = ln 2 + ln cosh √(C² + s²K²)`.
pub fn mf_ln_z_per_spin(p: Couplings, s: f64) -> f64 {
    LN_2 + ln_cosh((p.c() * p.c() + s * s * p.k() * p.k()).sqrt())
}

/// The `s`-dependent part of the per-spin bound, `ln cosh R - K s²`.
fn branch_cost(p: Couplings, s: f64) -> f64 {
    mf_ln_z_per_spin(p, s) - p.k() * s * s
}

/// Mean-field branches on `[-1, 1]`, principal branch minimizing the bound.
pub fn solve_s(p: Couplings) -> MeanFieldSolution {
    let mut sol = MeanFieldSolution::scan(|s| self_consistency_residual(p, s), SCAN_INTERVALS);
    sol.select(|s| branch_cost(p, s));
    sol
}

/// `K(s - s²)`, the large-`K` form of the per-spin bound.
pub fn asymptotic_bound_large_k(p: Couplings, s: f64) -> f64 {
    p.k() * (s - s * s)
}

/// Zero-field coupling above which a nonzero mean-field branch exists.
pub fn critical_k_at_zero_field(tol: f64) -> Result<f64> {
    let exists = |k: f64| solve_s(Couplings::unchecked(k, 0.0)).has_nonzero_branch();
    crate::bound::bisect_threshold(exists, 1.0, 2.0, tol)
}

/// The thermodynamic-limit chain as a per-spin [`MeanFieldModel`]. Only the
/// `PaperFaithful` substitution `<σ_x>_H ≈ s` is available.
#[derive(Debug, Clone, Copy, Default)]
pub struct Tfim;

impl MeanFieldModel for Tfim {
    type Ansatz = f64;

    fn normalization(&self) -> Normalization {
        Normalization::PerSpin
    }

    fn spins(&self) -> usize {
        1
    }

    fn supports(&self, mode: AverageMode) -> bool {
        mode == AverageMode::PaperFaithful
    }

    fn ln_z(&self, p: Couplings) -> Result<f64> {
        ln_z_per_spin(p)
    }

    fn beta_avg_h(&self, p: Couplings) -> Result<f64> {
        beta_avg_h_per_spin(p)
    }

    fn ln_z_mf(&self, p: Couplings, s: &f64) -> Result<f64> {
        Ok(mf_ln_z_per_spin(p, *s))
    }

    fn beta_avg_hmf(&self, p: Couplings, s: &f64, mode: AverageMode) -> Result<f64> {
        if mode != AverageMode::PaperFaithful {
            return Err(Error::UnsupportedMode(mode));
        }
        Ok(-p.k() * s * s - p.c() * sigma_z_mean(p)?)
    }

    fn ansatz_in_range(&self, s: &f64) -> bool {
        s.abs() <= 1.0
    }

    fn mean_field(&self, p: Couplings, mode: AverageMode) -> Result<MeanFieldFit<f64>> {
        if mode != AverageMode::PaperFaithful {
            return Err(Error::UnsupportedMode(mode));
        }
        let sol = solve_s(p);
        Ok(MeanFieldFit {
            ansatz: sol.principal,
            valid: sol.in_range(),
        })
    }
}

/// Per-spin correlation bound with `s` from [`solve_s`].
pub fn bound_per_spin(p: Couplings) -> Result<BoundReport<f64>> {
    let sol = solve_s(p);
    let mut report = correlation_bound(&Tfim, p, &sol.principal, AverageMode::PaperFaithful)?;
    report.mf_valid &= sol.in_range();
    Ok(report)
}

/// One row of a validity scan.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidityPoint {
    pub params: Couplings,
    pub principal_s: f64,
    pub bound: f64,
    pub mf_valid: bool,
    pub trivial: bool,
}

/// Evaluates [`bound_per_spin`] over `grid`, returning rows in input order.
/// Points whose quadrature fails are reported with a NaN bound and
/// `mf_valid = false`.
pub fn validity_region_scan(grid: &[Couplings]) -> Vec<ValidityPoint> {
    par::map_ordered(grid, |&params| match bound_per_spin(params) {
        Ok(r) => ValidityPoint {
            params,
            principal_s: r.s,
            bound: r.bound,
            mf_valid: r.mf_valid,
            trivial: r.trivial,
        },
        Err(_) => ValidityPoint {
            params,
            principal_s: f64::NAN,
            bound: f64::NAN,
            mf_valid: false,
            trivial: false,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bound::fluctuation_validity;
    use crate::numerics::{first_derivative, quadrature::integrate};
    use proptest::prelude::*;

    fn p(k: f64, c: f64) -> Couplings {
        Couplings::new(k, c).unwrap()
    }

    /// Composite Simpson rule with many panels, independent of the adaptive
    /// Gauss-Legendre path.
    fn simpson<F: Fn(f64) -> f64>(f: F) -> f64 {
        let n = 20_000;
        let h = PI / n as f64;
        let mut acc = f(0.0) + f(PI);
        for i in 1..n {
            acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(h * i as f64);
        }
        acc * h / 3.0
    }

    #[test]
    fn dispersion_examples() {
        let q = p(1.5, 0.4);
        assert!((dispersion(q, 0.0) - 1.1).abs() < 1e-15);
        assert!((dispersion(q, PI) - 1.9).abs() < 1e-15);
        assert!((dispersion(p(0.8, 0.8), PI) - 1.6).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn dispersion_gap(k in 0.0..4.0f64, c in 0.0..4.0f64, phi in 1e-3..PI) {
            let q = p(k, c);
            let l = dispersion(q, phi);
            prop_assert!(l >= (k - c).abs() - 1e-15);
            prop_assert!((l * l - (k * k + c * c - 2.0 * k * c * phi.cos())).abs() < 1e-12);
        }

        #[test]
        fn ln_z_at_least_ln_2(k in 0.0..4.0f64, c in 0.0..4.0f64) {
            prop_assert!(ln_z_per_spin(p(k, c)).unwrap() >= LN_2);
        }

        #[test]
        fn ab_is_normalized(k in 0.0..10.0f64, c in 0.0..10.0f64, s in -1.0..1.0f64) {
            prop_assert!((2.0 * ab_product(p(k, c), s)).abs() <= 1.0 + 1e-15);
        }
    }

    #[test]
    fn ln_z_limits() {
        for c in [0.0, 0.5, 3.0] {
            assert!((ln_z_per_spin(p(0.0, c)).unwrap() - (2.0 * c.cosh()).ln()).abs() < 1e-12);
        }
        for k in [0.5, 2.0] {
            assert!((ln_z_per_spin(p(k, 0.0)).unwrap() - (2.0 * k.cosh()).ln()).abs() < 1e-12);
        }
        let reference = LN_2 + simpson(|w| (2.0 - 2.0 * w.cos()).max(0.0).sqrt().cosh().ln()) / PI;
        assert!((ln_z_per_spin(p(1.0, 1.0)).unwrap() - reference).abs() < 1e-10);
    }

    #[test]
    fn energy_limits_and_derivative() {
        for c in [0.0, 0.7, 2.0] {
            assert!((beta_avg_h_per_spin(p(0.0, c)).unwrap() + c * c.tanh()).abs() < 1e-12);
        }
        // β<H> = -d ln Z / dβ: scale both couplings by t and differentiate at t = 1.
        for (k, c) in [(1.0, 1.0), (0.5, 2.0), (2.0, 0.3)] {
            let q = p(k, c);
            let d = first_derivative(|t| ln_z_per_spin(q.scaled(t)).unwrap(), 1.0, 1e-3);
            assert!((beta_avg_h_per_spin(q).unwrap() + d).abs() < 1e-6);
        }
    }

    #[test]
    fn magnetization_limits_and_derivative() {
        for c in [0.3, 1.0, 2.5] {
            assert!((sigma_z_mean(p(0.0, c)).unwrap() - c.tanh()).abs() < 1e-12);
        }
        assert!(sigma_z_mean(p(1.7, 0.0)).unwrap().abs() < 1e-12);
        for i in 1..=12 {
            for j in 1..=12 {
                let q = p(0.25 * i as f64, 0.25 * j as f64);
                let d = first_derivative(|c| ln_z_per_spin(q.with_c(c)).unwrap(), q.c(), 1e-3);
                assert!((sigma_z_mean(q).unwrap() - d).abs() < 1e-7, "{q}");
            }
        }
    }

    #[test]
    fn critical_line_is_evaluable() {
        for k in [0.5, 1.0, 5.0] {
            assert!(sigma_z_mean(p(k, k)).unwrap().is_finite());
        }
    }

    #[test]
    fn finite_spectrum_examples() {
        let q = p(1.2, 0.5);
        let modes = finite_spectrum(q, 8).unwrap();
        assert_eq!(modes.len(), 8);
        // k runs from -3 to 4: k = 0 at index 3, k = N/2 last.
        assert!((modes[3] - 0.7).abs() < 1e-15);
        assert!((modes[7] - 1.7).abs() < 1e-15);
        assert!(matches!(finite_spectrum(q, 5), Err(Error::InvalidN(5))));
        assert!(finite_spectrum(q, 2).is_err());
    }

    #[test]
    fn riemann_sums_converge() {
        let q = p(1.0, 1.0);
        let exact = ln_z_per_spin(q).unwrap();
        let errs: Vec<f64> = [4, 8, 16, 64]
            .iter()
            .map(|&n| (finite_ln_z_per_spin(q, n).unwrap() - exact).abs())
            .collect();
        assert!(errs[1] < errs[0], "{errs:?}");
        assert!(errs[3] < 1e-10, "{errs:?}");
    }

    #[test]
    fn residual_examples() {
        assert_eq!(self_consistency_residual(p(2.0, 0.0), 0.0), 0.0);
        // At C = 0 and s > 0 the equation is tanh(Ks) = (1 + s²)/2.
        for s in [0.3, 0.6, 0.9] {
            let k = 1.7;
            let r = self_consistency_residual(p(k, 0.0), s);
            let reduced = s * (1.0 - 2.0 * (k * s).tanh() / (1.0 + s * s));
            assert!((r - reduced).abs() < 1e-14);
        }
    }

    #[test]
    fn two_positive_roots_at_k_1_5() {
        // Dense scan oracle on (0, 1].
        let f = |s: f64| (1.5 * s).tanh() - 0.5 * (1.0 + s * s);
        let n = 1_000_000;
        let crossings: Vec<f64> = (1..n)
            .filter(|&i| f(i as f64 / n as f64) * f((i + 1) as f64 / n as f64) < 0.0)
            .map(|i| i as f64 / n as f64)
            .collect();
        assert_eq!(crossings.len(), 2);
        let sol = solve_s(p(1.5, 0.0));
        let positive: Vec<f64> = sol.branches.iter().copied().filter(|&s| s > 0.0).collect();
        assert_eq!(positive.len(), 2);
        for (a, b) in positive.iter().zip(&crossings) {
            assert!((a - b).abs() < 1e-5);
        }
        assert!((positive[0] - 0.48).abs() < 0.01 && (positive[1] - 0.84).abs() < 0.01);
    }

    #[test]
    fn branches_are_symmetric_at_zero_field() {
        for k in [0.5, 1.5, 3.0] {
            let sol = solve_s(p(k, 0.0));
            let n = sol.branches.len();
            for i in 0..n {
                assert!((sol.branches[i] + sol.branches[n - 1 - i]).abs() < 1e-9);
            }
            for r in &sol.residuals {
                assert!(r.abs() <= 1e-10);
            }
        }
        let sol = solve_s(p(1.0, 0.0));
        assert_eq!(sol.branches.len(), 1);
        assert_eq!(sol.principal, 0.0);
    }

    #[test]
    fn field_branches_are_accepted_roots() {
        let sol = solve_s(p(2.0, 1.0));
        assert!(sol.converged);
        for (s, r) in sol.branches.iter().zip(&sol.residuals) {
            assert!(r.abs() <= 1e-10);
            assert!((self_consistency_residual(p(2.0, 1.0), *s)).abs() <= 1e-10);
        }
        assert!(sol.principal > 0.0);
    }

    #[test]
    fn mf_ln_z_examples() {
        assert!((mf_ln_z_per_spin(p(2.0, 0.7), 0.0) - (2.0 * 0.7f64.cosh()).ln()).abs() < 1e-14);
        assert!((mf_ln_z_per_spin(p(2.0, 0.0), 1.0) - (2.0 * 2f64.cosh()).ln()).abs() < 1e-14);
        let r = (0.49f64 + 0.25 * 4.0).sqrt();
        let two_level = (r.exp() + (-r).exp()).ln();
        assert!((mf_ln_z_per_spin(p(2.0, 0.7), 0.5) - two_level).abs() < 1e-14);
    }

    #[test]
    fn ab_examples() {
        assert_eq!(ab_product(p(0.0, 1.0), 0.5), 0.0);
        assert_eq!(ab_product(p(1.3, 0.0), 0.0), 0.0);
        // R = K at s = 1
        assert!((ab_product(p(1.3, 0.0), 1.0) + 0.5).abs() < 1e-15);
    }

    #[test]
    fn bound_vanishes_without_coupling() {
        for i in 0..=12 {
            let r = bound_per_spin(p(0.0, 0.25 * i as f64)).unwrap();
            assert!(r.bound.abs() <= 1e-10);
        }
    }

    #[test]
    fn bound_termwise() {
        let q = p(1.2, 0.8);
        let r = bound_per_spin(q).unwrap();
        let s = r.s;
        let lam = |w: f64| (q.k() * q.k() + q.c() * q.c() - 2.0 * q.k() * q.c() * w.cos()).sqrt();
        let tol = 1e-12;
        let i1 = integrate(|w| lam(w).cosh().ln(), 0.0, PI, tol, 1 << 20)
            .unwrap()
            .value
            / PI;
        let i2 = integrate(|w| lam(w) * lam(w).tanh(), 0.0, PI, tol, 1 << 20)
            .unwrap()
            .value
            / PI;
        let i3 = integrate(
            |w| (q.c() - q.k() * w.cos()) * lam(w).tanh() / lam(w),
            0.0,
            PI,
            tol,
            1 << 20,
        )
        .unwrap()
        .value
            / PI;
        let r_mf = (q.c() * q.c() + s * s * q.k() * q.k()).sqrt();
        let want = r_mf.cosh().ln() - i1 + i2 - q.k() * s * s - q.c() * i3;
        assert!((r.bound - want).abs() < 1e-9);
    }

    #[test]
    fn asymptotic_form() {
        assert_eq!(asymptotic_bound_large_k(p(10.0, 1.0), 1.0), 0.0);
        assert_eq!(asymptotic_bound_large_k(p(10.0, 1.0), 0.0), 0.0);
        assert_eq!(asymptotic_bound_large_k(p(10.0, 1.0), 0.5), 2.5);
    }

    #[test]
    fn existence_predicate() {
        assert!(!solve_s(p(1.0, 0.0)).has_nonzero_branch());
        assert!(solve_s(p(2.0, 0.0)).has_nonzero_branch());
    }

    #[test]
    fn fluctuation_ratio() {
        let free = fluctuation_validity(&Tfim, p(0.1, 2.0), 1e-3).unwrap();
        // Free-spin estimate: sech²C / tanh²C.
        let approx = 1.0 / (2f64.cosh().powi(2) * 2f64.tanh().powi(2));
        assert!(free < 0.1 && (free - approx).abs() < 0.02, "{free}");
        let ordered = fluctuation_validity(&Tfim, p(2.0, 0.01), 1e-3).unwrap();
        assert!(ordered >= 1.0, "{ordered}");
        assert_eq!(
            fluctuation_validity(&Tfim, p(1.0, 0.0), 1e-3).unwrap(),
            f64::INFINITY
        );
    }

    #[test]
    fn unsupported_modes() {
        let q = p(1.0, 1.0);
        assert!(matches!(
            correlation_bound(&Tfim, q, &0.5, AverageMode::Exact),
            Err(Error::UnsupportedMode(AverageMode::Exact))
        ));
        assert!(crate::bound::bogoliubov_sandwich(&Tfim, q, &0.5).is_err());
    }

    #[test]
    fn scan_keeps_order() {
        let grid: Vec<Couplings> = [(0.5, 1.0), (0.0, 2.0), (3.0, 0.5)]
            .iter()
            .map(|&(k, c)| p(k, c))
            .collect();
        let rows = validity_region_scan(&grid);
        assert_eq!(rows.len(), 3);
        for (row, q) in rows.iter().zip(&grid) {
            assert_eq!(row.params, *q);
        }
        assert!(rows[0].mf_valid && rows[0].bound < 0.1);
    }
}
