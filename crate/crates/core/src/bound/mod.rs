//! Bogoliubov relative-entropy bound on total correlations.
//!
//! For thermal states `rho = e^{-βH}/Z` and `rho_MF = e^{-βH_MF}/Z_MF`,
//!
//! ```text
//! S(rho || rho_MF) = ln Z_MF - ln Z + β<H_MF - H>_H  >=  I(rho)  >=  E(rho)
//! ```
//!
//! whenever `rho_MF` is a product state. Everything here is written against
//! [`MeanFieldModel`], so the same assembly serves the closed-form two-qubit
//! model, the thermodynamic-limit transverse-field chain and the
//! exact-diagonalization oracle.

mod classical;
mod mean_field;

use std::cell::RefCell;
use std::f64::consts::LN_2;
use std::fmt;

use crate::error::{Error, Result};
use crate::numerics::{first_derivative, second_derivative};

pub(crate) use classical::bisect_threshold;
pub use classical::{
    classical_ising_critical_k, classical_ising_mf_solve, classical_ising_residual,
};
pub use mean_field::{MeanFieldSolution, BRANCH_TOL, SCAN_INTERVALS};

/// Dimensionless couplings `K = J / 2kT` and `C = B / kT`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Couplings {
    k: f64,
    c: f64,
}

impl Couplings {
    pub fn new(k: f64, c: f64) -> Result<Self> {
        if k.is_finite() && c.is_finite() && k >= 0.0 && c >= 0.0 {
            Ok(Self { k, c })
        } else {
            Err(Error::InvalidCouplings { k, c })
        }
    }

    /// Skips the quadrant check. Finite-difference stencils step across
    /// `C = 0` and every model formula is well defined there.
    pub(crate) fn unchecked(k: f64, c: f64) -> Self {
        Self { k, c }
    }

    /// Physical inputs with `k_B = 1`.
    pub fn from_physical(j: f64, b: f64, t: f64) -> Result<Self> {
        if !(t > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "temperature must be positive, got {t}"
            )));
        }
        Self::new(j / (2.0 * t), b / t)
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub(crate) fn with_c(self, c: f64) -> Self {
        Self { c, ..self }
    }

    #[cfg(test)]
    pub(crate) fn scaled(self, t: f64) -> Self {
        Self {
            k: self.k * t,
            c: self.c * t,
        }
    }
}

impl fmt::Display for Couplings {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(K = {}, C = {})", self.k, self.c)
    }
}

/// Which substitution is used for averages that are not available exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AverageMode {
    /// The closed forms exactly as displayed for each model.
    PaperFaithful,
    /// Averages computed under the true thermal state.
    Exact,
    /// Self-consistent mean-field magnetization with exact averaging.
    SelfConsistent,
}

impl AverageMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            AverageMode::PaperFaithful => "paper",
            AverageMode::Exact => "exact",
            AverageMode::SelfConsistent => "self_consistent",
        }
    }
}

impl std::str::FromStr for AverageMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" | "paper_faithful" | "PaperFaithful" => Ok(Self::PaperFaithful),
            "exact" | "Exact" => Ok(Self::Exact),
            "self_consistent" | "self-consistent" | "SelfConsistent" => Ok(Self::SelfConsistent),
            other => Err(Error::InvalidArgument(format!(
                "unknown averaging mode {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    Total,
    PerSpin,
}

/// A mean-field ansatz together with the solver's verdict on it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanFieldFit<A> {
    pub ansatz: A,
    /// Solver converged and the ansatz lies in the physical range.
    pub valid: bool,
}

/// A thermal model paired with a family of product-state approximations.
///
/// All quantities are in β-energy units and share one normalization.
/// Implementations must be pure functions of their inputs.
pub trait MeanFieldModel {
    type Ansatz: Copy + fmt::Debug;

    fn normalization(&self) -> Normalization;

    /// Number of spins the totals refer to (1 for per-spin models).
    fn spins(&self) -> usize;

    fn supports(&self, mode: AverageMode) -> bool;

    fn ln_z(&self, p: Couplings) -> Result<f64>;

    /// `β<H>_H`.
    fn beta_avg_h(&self, p: Couplings) -> Result<f64>;

    fn ln_z_mf(&self, p: Couplings, s: &Self::Ansatz) -> Result<f64>;

    /// `β<H_MF>_H`.
    fn beta_avg_hmf(&self, p: Couplings, s: &Self::Ansatz, mode: AverageMode) -> Result<f64>;

    /// `β<H>_{H_MF}`.
    fn beta_avg_h_under_mf(&self, _p: Couplings, _s: &Self::Ansatz) -> Result<f64> {
        Err(Error::UnsupportedMode(AverageMode::Exact))
    }

    /// `β<H_MF>_{H_MF}`.
    fn beta_avg_hmf_under_mf(&self, _p: Couplings, _s: &Self::Ansatz) -> Result<f64> {
        Err(Error::UnsupportedMode(AverageMode::Exact))
    }

    fn ansatz_in_range(&self, s: &Self::Ansatz) -> bool;

    /// The model's own prescription for the mean-field parameters.
    fn mean_field(&self, p: Couplings, mode: AverageMode) -> Result<MeanFieldFit<Self::Ansatz>>;
}

/// Every term of the bound at one parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport<A> {
    pub params: Couplings,
    pub s: A,
    pub ln_z_mf: f64,
    pub ln_z: f64,
    /// `β<H_MF - H>_H`.
    pub beta_gap: f64,
    pub bound: f64,
    pub normalization: Normalization,
    pub spins: usize,
    /// Per-spin bound exceeds `ln 2`, the largest per-spin mutual information
    /// between qubits.
    pub trivial: bool,
    pub mf_valid: bool,
    pub mode: AverageMode,
}

impl<A> BoundReport<A> {
    pub fn per_spin(&self) -> f64 {
        match self.normalization {
            Normalization::PerSpin => self.bound,
            Normalization::Total => self.bound / self.spins as f64,
        }
    }
}

/// `ln Z_MF - ln Z + β<H_MF - H>_H` for the given ansatz.
pub fn correlation_bound<M: MeanFieldModel>(
    model: &M,
    p: Couplings,
    s: &M::Ansatz,
    mode: AverageMode,
) -> Result<BoundReport<M::Ansatz>> {
    if !model.supports(mode) {
        return Err(Error::UnsupportedMode(mode));
    }
    let ln_z_mf = model.ln_z_mf(p, s)?;
    let ln_z = model.ln_z(p)?;
    let beta_gap = model.beta_avg_hmf(p, s, mode)? - model.beta_avg_h(p)?;
    let bound = ln_z_mf - ln_z + beta_gap;
    let spins = match model.normalization() {
        Normalization::PerSpin => 1,
        Normalization::Total => model.spins().max(1),
    };
    let per_spin = bound / spins as f64;
    Ok(BoundReport {
        params: p,
        s: *s,
        ln_z_mf,
        ln_z,
        beta_gap,
        bound,
        normalization: model.normalization(),
        spins,
        trivial: per_spin > LN_2,
        mf_valid: model.ansatz_in_range(s),
        mode,
    })
}

/// Solves for the model's mean field and assembles the bound.
pub fn solved_bound<M: MeanFieldModel>(
    model: &M,
    p: Couplings,
    mode: AverageMode,
) -> Result<BoundReport<M::Ansatz>> {
    let fit = model.mean_field(p, mode)?;
    let mut report = correlation_bound(model, p, &fit.ansatz, mode)?;
    report.mf_valid &= fit.valid;
    Ok(report)
}

/// The two-sided Bogoliubov inequality
/// `β<H - H_MF>_H <= ln Z_MF - ln Z <= β<H - H_MF>_{H_MF}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sandwich {
    pub lower: f64,
    pub middle: f64,
    pub upper: f64,
}

impl Sandwich {
    /// `min(middle - lower, upper - middle)`; non-negative when the ordering holds.
    pub fn slack(&self) -> f64 {
        (self.middle - self.lower).min(self.upper - self.middle)
    }
}

pub fn bogoliubov_sandwich<M: MeanFieldModel>(
    model: &M,
    p: Couplings,
    s: &M::Ansatz,
) -> Result<Sandwich> {
    if !model.supports(AverageMode::Exact) {
        return Err(Error::UnsupportedMode(AverageMode::Exact));
    }
    let lower = model.beta_avg_h(p)? - model.beta_avg_hmf(p, s, AverageMode::Exact)?;
    let middle = model.ln_z_mf(p, s)? - model.ln_z(p)?;
    let upper = model.beta_avg_h_under_mf(p, s)? - model.beta_avg_hmf_under_mf(p, s)?;
    Ok(Sandwich {
        lower,
        middle,
        upper,
    })
}

/// Runs `f` over a stencil, turning the first error into the overall result.
fn differentiate<F, D>(f: F, x: f64, h: f64, rule: D) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
    D: Fn(&dyn Fn(f64) -> f64, f64, f64) -> f64,
{
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let wrapped = |x: f64| match f(x) {
        Ok(v) => v,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    let value = rule(&wrapped, x, h);
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(value),
    }
}

/// Difference between mean-field and exact susceptibilities implied by the
/// bound, `∂²bound/∂C² + ∂²(β<H_MF - H>_H)/∂C²` at fixed `K`, in units of
/// `β²`. The mean field is re-solved at every stencil point.
pub fn susceptibility_gap<M: MeanFieldModel>(
    model: &M,
    p: Couplings,
    h: f64,
    mode: AverageMode,
) -> Result<f64> {
    let report_at = |c: f64| solved_bound(model, p.with_c(c), mode);
    let d_bound = differentiate(
        |c| report_at(c).map(|r| r.bound),
        p.c(),
        h,
        |f, x, h| second_derivative(f, x, h),
    )?;
    let d_gap = differentiate(
        |c| report_at(c).map(|r| r.beta_gap),
        p.c(),
        h,
        |f, x, h| second_derivative(f, x, h),
    )?;
    Ok(d_bound + d_gap)
}

/// Below this the magnetization is treated as zero.
pub const ZERO_MAGNETIZATION: f64 = 1e-9;

/// Relative fluctuation `kTχ / M̄² = (∂²ln Z/∂C²) / (∂ln Z/∂C)²`.
/// Returns `f64::INFINITY` when the magnetization vanishes.
pub fn fluctuation_validity<M: MeanFieldModel>(model: &M, p: Couplings, h: f64) -> Result<f64> {
    let ln_z = |c: f64| model.ln_z(p.with_c(c));
    let m = differentiate(ln_z, p.c(), h, |f, x, h| first_derivative(f, x, h))?;
    let chi = differentiate(ln_z, p.c(), h, |f, x, h| second_derivative(f, x, h))?;
    if m.abs() <= ZERO_MAGNETIZATION {
        return Ok(f64::INFINITY);
    }
    Ok(chi / (m * m))
}
