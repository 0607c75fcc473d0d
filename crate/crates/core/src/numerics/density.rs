//! Small dense density matrices and the entropy functionals defined on them.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-10;
/// Eigenvalues at or below this are treated as outside the support before logs.
pub const EIG_CUTOFF: f64 = 1e-12;

/// Hermitian, unit-trace, positive semi-definite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    m: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Validates the density-matrix invariants. The stored matrix is
    /// symmetrized so that later eigensolves see an exactly Hermitian input.
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::NotDensityMatrix(format!(
                "shape {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let skew = max_abs(&(&m - m.adjoint()));
        if !(skew <= HERMITIAN_TOL) {
            return Err(Error::NotDensityMatrix(format!(
                "hermiticity violated by {skew:e}"
            )));
        }
        let m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        let tr = m.trace().re;
        if !((tr - 1.0).abs() <= TRACE_TOL) {
            return Err(Error::NotDensityMatrix(format!("trace {tr}")));
        }
        let rho = Self { m };
        let min = rho.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
        if min < -PSD_TOL {
            return Err(Error::NotDensityMatrix(format!("eigenvalue {min:e}")));
        }
        Ok(rho)
    }

    pub fn from_real(m: DMatrix<f64>) -> Result<Self> {
        Self::new(m.map(|x| Complex64::new(x, 0.0)))
    }

    pub fn from_diagonal(p: &[f64]) -> Result<Self> {
        Self::from_real(DMatrix::from_diagonal(&DVector::from_column_slice(p)))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let m = DMatrix::<Complex64>::identity(dim, dim) * Complex64::new(1.0 / dim as f64, 0.0);
        Self { m }
    }

    /// Projector onto the normalized `psi`.
    pub fn pure(psi: &DVector<Complex64>) -> Result<Self> {
        let norm = psi.norm();
        if !(norm > 0.0) {
            return Err(Error::NotDensityMatrix("zero state vector".into()));
        }
        let v = psi / Complex64::new(norm, 0.0);
        Self::new(&v * v.adjoint())
    }

    /// `sum_i w_i |v_i><v_i|` from a spectral decomposition with real weights
    /// summing to one.
    pub fn from_spectrum(weights: &[f64], vectors: &DMatrix<Complex64>) -> Result<Self> {
        let d = vectors.nrows();
        let mut m = DMatrix::<Complex64>::zeros(d, d);
        for (k, &w) in weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let v = vectors.column(k);
            m += (v * v.adjoint()) * Complex64::new(w, 0.0);
        }
        Self::new(m)
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self
            .m
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    fn eigen(&self) -> SymmetricEigen<Complex64, nalgebra::Dyn> {
        SymmetricEigen::new(self.m.clone())
    }

    pub fn kron(&self, other: &DensityMatrix) -> DensityMatrix {
        Self {
            m: self.m.kronecker(&other.m),
        }
    }

    /// `tr(rho A)`, real part.
    pub fn expectation(&self, a: &DMatrix<Complex64>) -> f64 {
        (&self.m * a).trace().re
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        max_abs(&(&self.m - &other.m))
    }
}

pub(crate) fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn entropy_of(eigs: impl IntoIterator<Item = f64>) -> f64 {
    eigs.into_iter()
        .map(|l| l.clamp(0.0, 1.0))
        .filter(|&l| l > 0.0)
        .map(|l| -l * l.ln())
        .sum()
}

/// `-tr rho ln rho` in nats.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    entropy_of(rho.eigenvalues())
}

/// `tr(sigma ln rho)` restricted to the support of `rho`. `None` when
/// `sigma` carries more than `EIG_CUTOFF` weight outside that support.
fn cross_log_trace(sigma: &DensityMatrix, rho: &DensityMatrix) -> Option<f64> {
    let eig = rho.eigen();
    let mut acc = 0.0;
    for (k, &mu) in eig.eigenvalues.iter().enumerate() {
        let v = eig.eigenvectors.column(k);
        let w = (v.adjoint() * sigma.matrix() * v)[(0, 0)].re;
        if mu <= EIG_CUTOFF {
            if w > EIG_CUTOFF {
                return None;
            }
            continue;
        }
        acc += w * mu.ln();
    }
    Some(acc)
}

/// Quantum relative entropy `S(sigma || rho) = tr sigma (ln sigma - ln rho)`.
///
/// Returns `f64::INFINITY` when the support of `sigma` is not contained in the
/// support of `rho`.
pub fn relative_entropy(sigma: &DensityMatrix, rho: &DensityMatrix) -> Result<f64> {
    if sigma.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: sigma.dim(),
        });
    }
    match cross_log_trace(sigma, rho) {
        Some(cross) => Ok((-von_neumann_entropy(sigma) - cross).max(0.0)),
        None => Ok(f64::INFINITY),
    }
}

/// `S(rho || sigma_1 ⊗ ... ⊗ sigma_n)` using `ln(⊗ sigma_i) = Σ_i 1 ⊗ ln sigma_i ⊗ 1`,
/// so only the single-site logs are ever formed.
pub fn relative_entropy_to_product(rho: &DensityMatrix, factors: &[DensityMatrix]) -> Result<f64> {
    let dims: Vec<usize> = factors.iter().map(DensityMatrix::dim).collect();
    let total: usize = dims.iter().product();
    if total != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: total,
        });
    }
    let mut cross = 0.0;
    for (site, factor) in factors.iter().enumerate() {
        let reduced = partial_trace(rho, &dims, site)?;
        match cross_log_trace(&reduced, factor) {
            Some(c) => cross += c,
            None => return Ok(f64::INFINITY),
        }
    }
    Ok(-von_neumann_entropy(rho) - cross)
}

/// Reduced state of site `keep` for a tensor-product space with local
/// dimensions `dims` (site 0 is the most significant factor).
pub fn partial_trace(rho: &DensityMatrix, dims: &[usize], keep: usize) -> Result<DensityMatrix> {
    let total: usize = dims.iter().product();
    if total != rho.dim() || dims.is_empty() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: total,
        });
    }
    if keep >= dims.len() {
        return Err(Error::InvalidArgument(format!(
            "site {keep} out of range for {} sites",
            dims.len()
        )));
    }
    let d = dims[keep];
    let stride: usize = dims[keep + 1..].iter().product();
    let m = rho.matrix();
    let mut out = DMatrix::<Complex64>::zeros(d, d);
    for i in 0..total {
        let a = (i / stride) % d;
        let base = i - a * stride;
        for b in 0..d {
            out[(a, b)] += m[(i, base + b * stride)];
        }
    }
    DensityMatrix::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn singlet() -> DensityMatrix {
        let s = 1.0 / 2f64.sqrt();
        DensityMatrix::pure(&DVector::from_vec(vec![c(0.0), c(s), c(-s), c(0.0)])).unwrap()
    }

    #[test]
    fn rejects_bad_matrices() {
        assert!(DensityMatrix::from_diagonal(&[0.5, 0.6]).is_err());
        assert!(DensityMatrix::from_diagonal(&[1.5, -0.5]).is_err());
        let mut m = DMatrix::<Complex64>::identity(2, 2) * c(0.5);
        m[(0, 1)] = c(0.1);
        assert!(DensityMatrix::new(m).is_err());
        assert!(DensityMatrix::new(DMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn entropy_examples() {
        let pure = DensityMatrix::from_diagonal(&[1.0, 0.0]).unwrap();
        assert!(von_neumann_entropy(&pure).abs() < 1e-15);
        assert!((von_neumann_entropy(&DensityMatrix::maximally_mixed(2)) - LN_2).abs() < 1e-14);
        let binary = -0.9 * 0.9f64.ln() - 0.1 * 0.1f64.ln();
        let r = DensityMatrix::from_diagonal(&[0.9, 0.1]).unwrap();
        assert!((von_neumann_entropy(&r) - binary).abs() < 1e-14);
        assert!((binary - 0.325083).abs() < 1e-6);
    }

    #[test]
    fn relative_entropy_examples() {
        let mixed = DensityMatrix::maximally_mixed(2);
        let up = DensityMatrix::from_diagonal(&[1.0, 0.0]).unwrap();
        assert!(relative_entropy(&mixed, &mixed).unwrap().abs() < 1e-14);
        assert!((relative_entropy(&up, &mixed).unwrap() - LN_2).abs() < 1e-14);
        let m4 = DensityMatrix::maximally_mixed(4);
        assert!(relative_entropy(&m4, &m4).unwrap().abs() < 1e-14);
        assert_eq!(relative_entropy(&mixed, &up).unwrap(), f64::INFINITY);
        assert!(matches!(
            relative_entropy(&mixed, &m4),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn partial_trace_examples() {
        let a = DensityMatrix::from_diagonal(&[0.7, 0.3]).unwrap();
        let b = DensityMatrix::maximally_mixed(2);
        let ab = a.kron(&b);
        assert!(partial_trace(&ab, &[2, 2], 0).unwrap().max_abs_diff(&a) < 1e-15);
        assert!(partial_trace(&ab, &[2, 2], 1).unwrap().max_abs_diff(&b) < 1e-15);

        let s = singlet();
        for keep in 0..2 {
            let r = partial_trace(&s, &[2, 2], keep).unwrap();
            assert!(r.max_abs_diff(&DensityMatrix::maximally_mixed(2)) < 1e-15);
        }

        let classical = DensityMatrix::from_diagonal(&[0.5, 0.0, 0.0, 0.5]).unwrap();
        let r = partial_trace(&classical, &[2, 2], 0).unwrap();
        assert!(r.max_abs_diff(&DensityMatrix::maximally_mixed(2)) < 1e-15);
        assert!(partial_trace(&classical, &[2, 3], 0).is_err());
        assert!(partial_trace(&classical, &[2, 2], 2).is_err());
    }

    #[test]
    fn product_route_matches_full_route() {
        let s = singlet();
        let a = DensityMatrix::from_diagonal(&[0.8, 0.2]).unwrap();
        let b = DensityMatrix::from_diagonal(&[0.4, 0.6]).unwrap();
        let full = relative_entropy(&s, &a.kron(&b)).unwrap();
        let product = relative_entropy_to_product(&s, &[a, b]).unwrap();
        assert!((full - product).abs() < 1e-12);
    }
}
