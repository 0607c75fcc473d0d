//! Two-qubit antiferromagnetic Heisenberg model in a longitudinal field,
//! `βH = C(σ_z¹ + σ_z²) + K σ⃗¹·σ⃗²`.
//!
//! Levels are labelled by β-energy in the fixed order
//! `[triplet ↑↑, triplet 0, triplet ↓↓, singlet] = [2C+K, K, -2C+K, -3K]`.

use std::f64::consts::LN_2;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::bound::{
    correlation_bound, AverageMode, BoundReport, Couplings, MeanFieldFit, MeanFieldModel,
    Normalization,
};
use crate::error::{Error, Result};
use crate::numerics::{
    ln_cosh, log_sum_exp, partial_trace, solve_bracketed, von_neumann_entropy, DensityMatrix,
};

/// Mean spin `(s_x, s_y, s_z)` entering the single-site field.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MeanFieldAnsatz3 {
    pub sx: f64,
    pub sy: f64,
    pub sz: f64,
}

impl MeanFieldAnsatz3 {
    pub fn along_z(sz: f64) -> Self {
        Self {
            sx: 0.0,
            sy: 0.0,
            sz,
        }
    }

    pub fn along_x(sx: f64) -> Self {
        Self {
            sx,
            sy: 0.0,
            sz: 0.0,
        }
    }

    pub fn is_valid(&self) -> bool {
        let n2 = self.sx * self.sx + self.sy * self.sy + self.sz * self.sz;
        [self.sx, self.sy, self.sz].iter().all(|v| v.abs() <= 1.0) && n2 <= 1.0 + 1e-9
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeisenbergThermo {
    pub beta_energies: [f64; 4],
    pub ln_z: f64,
    pub populations: [f64; 4],
}

pub fn spectrum(p: Couplings) -> [f64; 4] {
    let (k, c) = (p.k(), p.c());
    [2.0 * c + k, k, -2.0 * c + k, -3.0 * k]
}

/// `ln Z` with `Z = 2(e^{-K} cosh 2C + e^{K} cosh 2K)`, evaluated by
/// factoring out the dominant level.
pub fn ln_z(p: Couplings) -> f64 {
    let neg: Vec<f64> = spectrum(p).iter().map(|e| -e).collect();
    log_sum_exp(&neg)
}

pub fn thermo(p: Couplings) -> HeisenbergThermo {
    let beta_energies = spectrum(p);
    let ln_z = ln_z(p);
    let populations = beta_energies.map(|e| (-e - ln_z).exp());
    HeisenbergThermo {
        beta_energies,
        ln_z,
        populations,
    }
}

/// Eigenvectors in the product basis `|↑↑>, |↑↓>, |↓↑>, |↓↓>`, columns in
/// level order.
fn eigenbasis() -> DMatrix<Complex64> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    #[rustfmt::skip]
    let m = DMatrix::from_row_slice(4, 4, &[
        1.0, 0.0, 0.0, 0.0,
        0.0, r,   0.0, r,
        0.0, r,   0.0, -r,
        0.0, 0.0, 1.0, 0.0,
    ]);
    m.map(|x| Complex64::new(x, 0.0))
}

pub fn thermal_state(p: Couplings) -> DensityMatrix {
    DensityMatrix::from_spectrum(&thermo(p).populations, &eigenbasis())
        .expect("thermal populations form a valid state")
}

/// The displayed closed form for `I = 2S(ρ₁) - S(ρ)`.
fn mutual_information_closed_form(p: Couplings) -> f64 {
    let t = thermo(p);
    let [up, zero, down, singlet] = t.populations;
    let xlnx = |x: f64| if x > 0.0 { x * x.ln() } else { 0.0 };
    let total: f64 = t.populations.iter().map(|&q| xlnx(q)).sum();
    let shared = 0.5 * (zero + singlet);
    total - 2.0 * (xlnx(shared + up) + xlnx(shared + down))
}

/// Exact quantum mutual information between the two spins, in nats.
///
/// Evaluated from the thermal state and its reductions, and cross-checked
/// against the closed form.
pub fn mutual_information(p: Couplings) -> Result<f64> {
    let rho = thermal_state(p);
    let s1 = von_neumann_entropy(&partial_trace(&rho, &[2, 2], 0)?);
    let s2 = von_neumann_entropy(&partial_trace(&rho, &[2, 2], 1)?);
    let direct = s1 + s2 - von_neumann_entropy(&rho);
    let closed = mutual_information_closed_form(p);
    if (direct - closed).abs() > 1e-9 {
        return Err(Error::InternalInconsistency(format!(
            "two-qubit mutual information: state route {direct}, closed form {closed} at {p}"
        )));
    }
    Ok(direct)
}

/// Effective single-site field `(K s_x, K s_y, C + K s_z)`.
fn site_field(p: Couplings, s: &MeanFieldAnsatz3) -> [f64; 3] {
    [p.k() * s.sx, p.k() * s.sy, p.c() + p.k() * s.sz]
}

fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// `ln Z_MF = 2 ln(2 cosh R)`, `R = √((C + s_z K)² + (s_x² + s_y²)K²)`.
pub fn mf_ln_z(p: Couplings, s: &MeanFieldAnsatz3) -> f64 {
    2.0 * (LN_2 + ln_cosh(norm3(site_field(p, s))))
}

/// `β<H>_H`, the population-weighted β-energy.
pub fn beta_avg_h(p: Couplings) -> f64 {
    let t = thermo(p);
    t.populations
        .iter()
        .zip(&t.beta_energies)
        .map(|(q, e)| q * e)
        .sum()
}

/// Per-spin `<σ_z>` under the thermal state.
fn exact_sz(p: Couplings) -> f64 {
    let t = thermo(p);
    t.populations[0] - t.populations[2]
}

fn self_consistent_sz(p: Couplings) -> Result<f64> {
    let r = solve_bracketed(|s| s + (p.c() + p.k() * s).tanh(), -1.0, 1.0, 1e-14)?;
    Ok(r.root)
}

/// Mean `z` spin used for the mean field.
///
/// `PaperFaithful` reproduces `-e^{-K} sinh 2C / (2(e^{-K} cosh 2C + e^{K} cosh 2K))`,
/// which is half the exact thermal value returned by `Exact`.
/// `SelfConsistent` solves `s_z = -tanh(C + K s_z)`.
pub fn sz_mean(p: Couplings, mode: AverageMode) -> Result<f64> {
    match mode {
        AverageMode::PaperFaithful => Ok(displayed_sz(p.k(), p.c())),
        AverageMode::Exact => Ok(exact_sz(p)),
        AverageMode::SelfConsistent => self_consistent_sz(p),
    }
}

fn displayed_sz(k: f64, c: f64) -> f64 {
    // Divide through by e^{3K} to keep large K finite.
    let num = (-4.0 * k).exp() * (2.0 * c).sinh();
    let den = 2.0 * ((-4.0 * k).exp() * (2.0 * c).cosh() + 0.5 * (1.0 + (-4.0 * k).exp()));
    -num / den
}

/// `β<H_MF>_H` for an ansatz along `z`.
///
/// `PaperFaithful` uses `-(1/Z) 2(C + K s_z) e^{-K} sinh 2C`; `Exact` and
/// `SelfConsistent` take `(C + K s_z) tr((σ_z¹ + σ_z²) ρ)` (the thermal
/// `<σ_x>` and `<σ_y>` vanish).
pub fn beta_avg_hmf(p: Couplings, s: &MeanFieldAnsatz3, mode: AverageMode) -> f64 {
    let field = p.c() + p.k() * s.sz;
    match mode {
        AverageMode::PaperFaithful => field * exact_sz(p),
        AverageMode::Exact | AverageMode::SelfConsistent => 2.0 * field * exact_sz(p),
    }
}

/// `C* = 2K`, where the singlet and the `-2C + K` triplet cross.
pub fn level_crossing_field(k: f64) -> Result<f64> {
    if !(k > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "level crossing needs K > 0, got {k}"
        )));
    }
    Ok(2.0 * k)
}

/// Index into the fixed level order of the lowest β-energy.
pub fn ground_level(p: Couplings) -> usize {
    let e = spectrum(p);
    (0..4).min_by(|&a, &b| e[a].total_cmp(&e[b])).unwrap_or(3)
}

/// Single-site product state `e^{-h·σ} / (2 cosh R)` and its mean spin.
pub(crate) fn site_state(field: [f64; 3]) -> (DensityMatrix, [f64; 3]) {
    let r = norm3(field);
    let m = if r > 0.0 {
        let t = -r.tanh() / r;
        [t * field[0], t * field[1], t * field[2]]
    } else {
        [0.0; 3]
    };
    let half = |x: f64| Complex64::new(0.5 * x, 0.0);
    let mat = DMatrix::from_row_slice(
        2,
        2,
        &[
            half(1.0 + m[2]),
            Complex64::new(0.5 * m[0], -0.5 * m[1]),
            Complex64::new(0.5 * m[0], 0.5 * m[1]),
            half(1.0 - m[2]),
        ],
    );
    (
        DensityMatrix::new(mat).expect("Bloch vector inside the ball"),
        m,
    )
}

/// Product mean-field state `ρ_MF = σ ⊗ σ`.
pub fn mf_state(p: Couplings, s: &MeanFieldAnsatz3) -> DensityMatrix {
    let (site, _) = site_state(site_field(p, s));
    site.kron(&site)
}

/// The closed-form two-qubit model as a [`MeanFieldModel`].
#[derive(Debug, Clone, Copy, Default)]
pub struct Heisenberg2;

impl MeanFieldModel for Heisenberg2 {
    type Ansatz = MeanFieldAnsatz3;

    fn normalization(&self) -> Normalization {
        Normalization::Total
    }

    fn spins(&self) -> usize {
        2
    }

    fn supports(&self, _mode: AverageMode) -> bool {
        true
    }

    fn ln_z(&self, p: Couplings) -> Result<f64> {
        Ok(ln_z(p))
    }

    fn beta_avg_h(&self, p: Couplings) -> Result<f64> {
        Ok(beta_avg_h(p))
    }

    fn ln_z_mf(&self, p: Couplings, s: &MeanFieldAnsatz3) -> Result<f64> {
        Ok(mf_ln_z(p, s))
    }

    fn beta_avg_hmf(&self, p: Couplings, s: &MeanFieldAnsatz3, mode: AverageMode) -> Result<f64> {
        Ok(beta_avg_hmf(p, s, mode))
    }

    fn beta_avg_h_under_mf(&self, p: Couplings, s: &MeanFieldAnsatz3) -> Result<f64> {
        let (_, m) = site_state(site_field(p, s));
        let m2 = m[0] * m[0] + m[1] * m[1] + m[2] * m[2];
        Ok(2.0 * p.c() * m[2] + p.k() * m2)
    }

    fn beta_avg_hmf_under_mf(&self, p: Couplings, s: &MeanFieldAnsatz3) -> Result<f64> {
        let r = norm3(site_field(p, s));
        Ok(-2.0 * r * r.tanh())
    }

    fn ansatz_in_range(&self, s: &MeanFieldAnsatz3) -> bool {
        s.is_valid()
    }

    fn mean_field(
        &self,
        p: Couplings,
        mode: AverageMode,
    ) -> Result<MeanFieldFit<MeanFieldAnsatz3>> {
        let ansatz = MeanFieldAnsatz3::along_z(sz_mean(p, mode)?);
        Ok(MeanFieldFit {
            valid: ansatz.is_valid(),
            ansatz,
        })
    }
}

/// The correlation bound with `s_z` chosen according to `mode`.
///
/// The `ln Z` term uses the partition function consistent with the spectrum.
pub fn bound(p: Couplings, mode: AverageMode) -> Result<BoundReport<MeanFieldAnsatz3>> {
    let s = MeanFieldAnsatz3::along_z(sz_mean(p, mode)?);
    correlation_bound(&Heisenberg2, p, &s, mode)
}

/// `σ_z ⊗ 1` in the product basis.
pub fn sigma_z_first() -> DMatrix<Complex64> {
    DMatrix::from_diagonal(&DVector::from_vec(
        [1.0, 1.0, -1.0, -1.0]
            .map(|x| Complex64::new(x, 0.0))
            .to_vec(),
    ))
}
