//! Single-qubit Hamiltonian as a classical Ising ring.
//!
//! For `H = [[E, -Δ], [-Δ, -E]]` the Trotter factor `1 - βH/N` is written as
//! a transfer matrix `T_{uu'} = A exp(B u u' + (h/2)(u + u'))`, so that
//! `tr T^N` approaches `tr e^{-βH}` as `N` grows.

use nalgebra::Matrix2;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitHamiltonian {
    /// Diagonal energy.
    pub e: f64,
    /// Off-diagonal coupling, strictly positive.
    pub delta: f64,
}

impl QubitHamiltonian {
    pub fn new(e: f64, delta: f64) -> Result<Self> {
        if !e.is_finite() {
            return Err(Error::InvalidArgument(format!("E must be finite, got {e}")));
        }
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::NonPositiveDelta(delta));
        }
        Ok(Self { e, delta })
    }

    /// The matrix `H` in the `{+1, -1}` basis.
    pub fn matrix(&self) -> Matrix2<f64> {
        Matrix2::new(self.e, -self.delta, -self.delta, -self.e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalMapCoefficients {
    pub a: f64,
    pub b_cl: f64,
    pub h: f64,
    pub n: usize,
    pub beta: f64,
}

pub fn coefficients(
    ham: QubitHamiltonian,
    beta: f64,
    n: usize,
) -> Result<ClassicalMapCoefficients> {
    if !(ham.delta > 0.0) {
        return Err(Error::NonPositiveDelta(ham.delta));
    }
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "beta must be positive, got {beta}"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidN(n));
    }
    let nf = n as f64;
    let be = beta * ham.e;
    if nf <= be.abs() {
        return Err(Error::TrotterDomain { n, beta_e: be });
    }
    let bd = beta * ham.delta;
    let x = be / nf;
    Ok(ClassicalMapCoefficients {
        a: (bd / nf).sqrt() * (1.0 - x * x).powf(0.25),
        b_cl: 0.25 * ((nf * nf - be * be) / (bd * bd)).ln(),
        h: 0.5 * ((nf - be) / (nf + be)).ln(),
        n,
        beta,
    })
}

fn spin(i: usize) -> f64 {
    if i == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Index 0 is `u = +1`, index 1 is `u = -1`.
pub fn transfer_matrix(c: &ClassicalMapCoefficients) -> Matrix2<f64> {
    Matrix2::from_fn(|i, j| {
        let (u, v) = (spin(i), spin(j));
        c.a * (c.b_cl * u * v + 0.5 * c.h * (u + v)).exp()
    })
}

/// `tr T^N` for the periodic chain.
pub fn classical_partition(c: &ClassicalMapCoefficients) -> f64 {
    let t = transfer_matrix(c);
    let mean = 0.5 * (t[(0, 0)] + t[(1, 1)]);
    let half_diff = 0.5 * (t[(0, 0)] - t[(1, 1)]);
    let r = half_diff.hypot(t[(0, 1)]);
    let n = c.n as i32;
    (mean + r).powi(n) + (mean - r).powi(n)
}

/// `tr e^{-βH} = 2 cosh(β sqrt(E² + Δ²))`.
pub fn quantum_partition(ham: QubitHamiltonian, beta: f64) -> f64 {
    2.0 * (beta * ham.e.hypot(ham.delta)).cosh()
}

/// `|tr T^N - tr e^{-βH}|`, which decays like `1/N`.
pub fn trotter_error(ham: QubitHamiltonian, beta: f64, n: usize) -> Result<f64> {
    let c = coefficients(ham, beta, n)?;
    Ok((classical_partition(&c) - quantum_partition(ham, beta)).abs())
}
