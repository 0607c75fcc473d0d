//! Dense exact diagonalization of short spin chains (up to 12 sites).
//!
//! Hamiltonians are assembled in β-energy units in the `σ_z` product basis,
//! site 0 being the most significant tensor factor. Both supported models are
//! real symmetric in that basis.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::bound::{AverageMode, Couplings, MeanFieldFit, MeanFieldModel, Normalization};
use crate::error::{Error, Result};
use crate::heisenberg::{site_state, MeanFieldAnsatz3};
use crate::numerics::{
    ln_cosh, log_sum_exp, partial_trace, relative_entropy_to_product, solve_bracketed,
    von_neumann_entropy, DensityMatrix,
};
use crate::tfim;

pub const MAX_SITES: usize = 12;
/// Tolerance on the relative-entropy identity.
pub const IDENTITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainModel {
    /// `-K Σ σ_x σ_x - C Σ σ_z`
    Tfim,
    /// `C Σ σ_z + K Σ σ⃗·σ⃗`
    Heisenberg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Open,
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainSpec {
    pub n_sites: usize,
    pub model: ChainModel,
    pub boundary: Boundary,
    pub couplings: Couplings,
}

impl ChainSpec {
    pub fn new(
        n_sites: usize,
        model: ChainModel,
        boundary: Boundary,
        couplings: Couplings,
    ) -> Result<Self> {
        if n_sites == 0 {
            return Err(Error::InvalidChain("chain needs at least one site".into()));
        }
        if n_sites > MAX_SITES {
            return Err(Error::DimensionTooLarge(n_sites));
        }
        if boundary == Boundary::Periodic && n_sites < 3 {
            return Err(Error::InvalidChain(format!(
                "periodic boundary needs at least 3 sites, got {n_sites}"
            )));
        }
        Ok(Self {
            n_sites,
            model,
            boundary,
            couplings,
        })
    }

    pub fn dim(&self) -> usize {
        1 << self.n_sites
    }

    fn bonds(&self) -> Vec<(usize, usize)> {
        let n = self.n_sites;
        let mut b: Vec<(usize, usize)> = (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect();
        if self.boundary == Boundary::Periodic {
            b.push((n - 1, 0));
        }
        b
    }

    /// `σ_z` eigenvalue of `site` in basis state `state`.
    fn z(&self, state: usize, site: usize) -> f64 {
        if state >> (self.n_sites - 1 - site) & 1 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    fn flip_mask(&self, i: usize, j: usize) -> usize {
        (1 << (self.n_sites - 1 - i)) | (1 << (self.n_sites - 1 - j))
    }

    /// Nonzero entries of row `state`: `(column, value)`, diagonal first.
    fn row(&self, state: usize) -> Vec<(usize, f64)> {
        let (k, c) = (self.couplings.k(), self.couplings.c());
        let n = self.n_sites;
        let mag: f64 = (0..n).map(|i| self.z(state, i)).sum();
        let mut out = Vec::with_capacity(1 + self.bonds().len());
        match self.model {
            ChainModel::Tfim => {
                out.push((state, -c * mag));
                for (i, j) in self.bonds() {
                    out.push((state ^ self.flip_mask(i, j), -k));
                }
            }
            ChainModel::Heisenberg => {
                let mut diag = c * mag;
                for (i, j) in self.bonds() {
                    let zz = self.z(state, i) * self.z(state, j);
                    diag += k * zz;
                    if zz < 0.0 {
                        out.push((state ^ self.flip_mask(i, j), 2.0 * k));
                    }
                }
                out.insert(0, (state, diag));
            }
        }
        out
    }

    /// Label of the symmetry sector a basis state belongs to: fermion parity
    /// for the transverse-field chain, magnetization for Heisenberg.
    fn sector(&self, state: usize) -> u32 {
        match self.model {
            ChainModel::Tfim => state.count_ones() % 2,
            ChainModel::Heisenberg => state.count_ones(),
        }
    }
}

/// `βH` as a dense real symmetric matrix.
pub fn build_hamiltonian(spec: &ChainSpec) -> DMatrix<f64> {
    let d = spec.dim();
    let mut h = DMatrix::<f64>::zeros(d, d);
    for state in 0..d {
        for (col, v) in spec.row(state) {
            h[(state, col)] += v;
        }
    }
    h
}

/// Sorted spectrum of `βH`, diagonalized sector by sector.
pub fn spectrum(spec: &ChainSpec) -> Vec<f64> {
    let d = spec.dim();
    let mut sectors: std::collections::BTreeMap<u32, Vec<usize>> = Default::default();
    for state in 0..d {
        sectors.entry(spec.sector(state)).or_default().push(state);
    }
    let mut index = vec![0usize; d];
    let mut energies = Vec::with_capacity(d);
    for states in sectors.values() {
        for (pos, &s) in states.iter().enumerate() {
            index[s] = pos;
        }
        let m = states.len();
        let mut block = DMatrix::<f64>::zeros(m, m);
        for (r, &s) in states.iter().enumerate() {
            for (col, v) in spec.row(s) {
                block[(r, index[col])] += v;
            }
        }
        energies.extend(block.symmetric_eigenvalues().iter().copied());
    }
    energies.sort_by(f64::total_cmp);
    energies
}

/// `ln Z` of the chain.
pub fn ln_z(spec: &ChainSpec) -> f64 {
    let neg: Vec<f64> = spectrum(spec).iter().map(|e| -e).collect();
    log_sum_exp(&neg)
}

#[derive(Debug, Clone)]
pub struct ThermalState {
    pub rho: DensityMatrix,
    pub ln_z: f64,
    /// Sorted eigenvalues of `βH`.
    pub energies: Vec<f64>,
    /// `β<H>_H`.
    pub beta_energy: f64,
}

/// `ρ = e^{-βH}/Z` from an eigendecomposition of a real symmetric `βH`.
pub fn thermal_density(h_beta: &DMatrix<f64>) -> Result<ThermalState> {
    let eig = h_beta.clone().symmetric_eigen();
    let energies: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let neg: Vec<f64> = energies.iter().map(|e| -e).collect();
    let ln_z = log_sum_exp(&neg);
    let pops: Vec<f64> = energies.iter().map(|e| (-e - ln_z).exp()).collect();
    let beta_energy = pops.iter().zip(&energies).map(|(p, e)| p * e).sum();
    let v = &eig.eigenvectors;
    let weighted = v * DMatrix::from_diagonal(&DVector::from_vec(pops));
    let rho = DensityMatrix::from_real(&weighted * v.transpose())?;
    let mut sorted = energies;
    sorted.sort_by(f64::total_cmp);
    Ok(ThermalState {
        rho,
        ln_z,
        energies: sorted,
        beta_energy,
    })
}

fn qubit_dims(n: usize) -> Vec<usize> {
    vec![2; n]
}

/// `Σ_i S(ρ_i) - S(ρ)` over single sites.
pub fn multiparty_mutual_info(rho: &DensityMatrix, n_sites: usize) -> Result<f64> {
    if rho.dim() != 1 << n_sites {
        return Err(Error::DimensionMismatch {
            expected: 1 << n_sites,
            found: rho.dim(),
        });
    }
    let dims = qubit_dims(n_sites);
    let mut local = 0.0;
    for site in 0..n_sites {
        local += von_neumann_entropy(&partial_trace(rho, &dims, site)?);
    }
    Ok(local - von_neumann_entropy(rho))
}

/// Single-site mean field `h·σ` (β units) for the chain's mean-field family.
fn mf_field(spec: &ChainSpec, s: &MeanFieldAnsatz3) -> [f64; 3] {
    let (k, c) = (spec.couplings.k(), spec.couplings.c());
    match spec.model {
        ChainModel::Tfim => [-k * s.sx, 0.0, -c],
        ChainModel::Heisenberg => [k * s.sx, k * s.sy, c + k * s.sz],
    }
}

fn pauli() -> [DMatrix<Complex64>; 3] {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    [
        DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]),
        DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]),
        DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]),
    ]
}

/// `Σ_i h·<σ⃗_i>` from the single-site reductions of `rho`.
fn field_energy(rho: &DensityMatrix, n: usize, field: [f64; 3]) -> Result<f64> {
    let dims = qubit_dims(n);
    let paulis = pauli();
    let mut acc = 0.0;
    for site in 0..n {
        let r = partial_trace(rho, &dims, site)?;
        for (h, sigma) in field.iter().zip(&paulis) {
            acc += h * r.expectation(sigma);
        }
    }
    Ok(acc)
}

fn product_state(spec: &ChainSpec, s: &MeanFieldAnsatz3) -> (DensityMatrix, Vec<DensityMatrix>) {
    let (site, _) = site_state(mf_field(spec, s));
    let factors = vec![site.clone(); spec.n_sites];
    let full = factors[1..].iter().fold(site, |acc, f| acc.kron(f));
    (full, factors)
}

fn field_norm(f: [f64; 3]) -> f64 {
    (f[0] * f[0] + f[1] * f[1] + f[2] * f[2]).sqrt()
}

/// Terms of `S(ρ || ρ_MF) = ln Z_MF - ln Z + β<H_MF - H>_H`, plus the left
/// side evaluated directly from the two density matrices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactBoundTerms {
    pub ln_z_mf: f64,
    pub ln_z: f64,
    pub beta_gap: f64,
    pub relative_entropy_direct: f64,
}

impl ExactBoundTerms {
    pub fn bound(&self) -> f64 {
        self.ln_z_mf - self.ln_z + self.beta_gap
    }

    pub fn identity_residual(&self) -> f64 {
        (self.bound() - self.relative_entropy_direct).abs()
    }
}

/// Exact bound terms, failing with `InternalInconsistency` if the identity
/// is violated by more than [`IDENTITY_TOL`].
pub fn exact_bound_terms(spec: &ChainSpec, s: &MeanFieldAnsatz3) -> Result<ExactBoundTerms> {
    let thermal = thermal_density(&build_hamiltonian(spec))?;
    exact_bound_terms_from(spec, &thermal, s)
}

fn exact_bound_terms_from(
    spec: &ChainSpec,
    thermal: &ThermalState,
    s: &MeanFieldAnsatz3,
) -> Result<ExactBoundTerms> {
    let field = mf_field(spec, s);
    let n = spec.n_sites;
    let ln_z_mf = n as f64 * (std::f64::consts::LN_2 + ln_cosh(field_norm(field)));
    let beta_gap = field_energy(&thermal.rho, n, field)? - thermal.beta_energy;
    let (_, factors) = product_state(spec, s);
    let relative_entropy_direct = relative_entropy_to_product(&thermal.rho, &factors)?;
    let terms = ExactBoundTerms {
        ln_z_mf,
        ln_z: thermal.ln_z,
        beta_gap,
        relative_entropy_direct,
    };
    if !(terms.identity_residual() <= IDENTITY_TOL) {
        return Err(Error::InternalInconsistency(format!(
            "relative-entropy identity off by {:e} for {spec:?}",
            terms.identity_residual()
        )));
    }
    Ok(terms)
}

/// Finite-size deviation of `ln Z / N` from the thermodynamic limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub n_sites: usize,
    pub ln_z_per_spin: f64,
    pub deviation: f64,
}

/// Compares periodic transverse-field chains against the infinite-chain
/// free energy for each `N` in `n_list`.
pub fn convergence_check(p: Couplings, n_list: &[usize]) -> Result<Vec<ConvergenceRow>> {
    let limit = tfim::ln_z_per_spin(p)?;
    n_list
        .iter()
        .map(|&n| {
            if !n.is_multiple_of(2) {
                return Err(Error::InvalidN(n));
            }
            let spec = ChainSpec::new(n, ChainModel::Tfim, Boundary::Periodic, p)?;
            let per_spin = ln_z(&spec) / n as f64;
            Ok(ConvergenceRow {
                n_sites: n,
                ln_z_per_spin: per_spin,
                deviation: (per_spin - limit).abs(),
            })
        })
        .collect()
}

/// A chain geometry as a [`MeanFieldModel`] with totals over all sites.
///
/// Every average is an exact trace, so `mode` only affects how the
/// mean-field parameters are chosen in [`MeanFieldModel::mean_field`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdModel {
    pub n_sites: usize,
    pub model: ChainModel,
    pub boundary: Boundary,
}

impl EdModel {
    pub fn new(n_sites: usize, model: ChainModel, boundary: Boundary) -> Result<Self> {
        ChainSpec::new(n_sites, model, boundary, Couplings::unchecked(0.0, 0.0))?;
        Ok(Self {
            n_sites,
            model,
            boundary,
        })
    }

    pub fn spec(&self, p: Couplings) -> ChainSpec {
        ChainSpec {
            n_sites: self.n_sites,
            model: self.model,
            boundary: self.boundary,
            couplings: p,
        }
    }

    fn thermal(&self, p: Couplings) -> Result<ThermalState> {
        thermal_density(&build_hamiltonian(&self.spec(p)))
    }

    /// Mean `<σ_z>` per site under the thermal state.
    fn exact_sz(&self, p: Couplings) -> Result<f64> {
        let rho = self.thermal(p)?.rho;
        let z = &pauli()[2];
        let dims = qubit_dims(self.n_sites);
        let mut acc = 0.0;
        for site in 0..self.n_sites {
            acc += partial_trace(&rho, &dims, site)?.expectation(z);
        }
        Ok(acc / self.n_sites as f64)
    }
}

impl MeanFieldModel for EdModel {
    type Ansatz = MeanFieldAnsatz3;

    fn normalization(&self) -> Normalization {
        Normalization::Total
    }

    fn spins(&self) -> usize {
        self.n_sites
    }

    fn supports(&self, _mode: AverageMode) -> bool {
        true
    }

    fn ln_z(&self, p: Couplings) -> Result<f64> {
        Ok(ln_z(&self.spec(p)))
    }

    fn beta_avg_h(&self, p: Couplings) -> Result<f64> {
        Ok(self.thermal(p)?.beta_energy)
    }

    fn ln_z_mf(&self, p: Couplings, s: &MeanFieldAnsatz3) -> Result<f64> {
        let f = mf_field(&self.spec(p), s);
        Ok(self.n_sites as f64 * (std::f64::consts::LN_2 + ln_cosh(field_norm(f))))
    }

    fn beta_avg_hmf(&self, p: Couplings, s: &MeanFieldAnsatz3, _mode: AverageMode) -> Result<f64> {
        let spec = self.spec(p);
        field_energy(&self.thermal(p)?.rho, self.n_sites, mf_field(&spec, s))
    }

    fn beta_avg_h_under_mf(&self, p: Couplings, s: &MeanFieldAnsatz3) -> Result<f64> {
        let spec = self.spec(p);
        let (rho_mf, _) = product_state(&spec, s);
        let h = build_hamiltonian(&spec).map(|x| Complex64::new(x, 0.0));
        Ok(rho_mf.expectation(&h))
    }

    fn beta_avg_hmf_under_mf(&self, p: Couplings, s: &MeanFieldAnsatz3) -> Result<f64> {
        let r = field_norm(mf_field(&self.spec(p), s));
        Ok(-(self.n_sites as f64) * r * r.tanh())
    }

    fn ansatz_in_range(&self, s: &MeanFieldAnsatz3) -> bool {
        s.is_valid()
    }

    fn mean_field(
        &self,
        p: Couplings,
        mode: AverageMode,
    ) -> Result<MeanFieldFit<MeanFieldAnsatz3>> {
        match self.model {
            ChainModel::Tfim => {
                let sol = tfim::solve_s(p);
                Ok(MeanFieldFit {
                    ansatz: MeanFieldAnsatz3::along_x(sol.principal),
                    valid: sol.in_range(),
                })
            }
            ChainModel::Heisenberg => {
                let sz = match mode {
                    AverageMode::Exact => self.exact_sz(p)?,
                    AverageMode::SelfConsistent => {
                        solve_bracketed(|s| s + (p.c() + p.k() * s).tanh(), -1.0, 1.0, 1e-14)?.root
                    }
                    AverageMode::PaperFaithful => return Err(Error::UnsupportedMode(mode)),
                };
                let ansatz = MeanFieldAnsatz3::along_z(sz);
                Ok(MeanFieldFit {
                    valid: ansatz.is_valid(),
                    ansatz,
                })
            }
        }
    }
}

/// Exact terms for `model` at `p` with the model's own mean field.
pub fn solved_exact_terms(
    model: &EdModel,
    p: Couplings,
    mode: AverageMode,
) -> Result<(MeanFieldAnsatz3, ExactBoundTerms)> {
    let fit = model.mean_field(p, mode)?;
    let spec = model.spec(p);
    let thermal = thermal_density(&build_hamiltonian(&spec))?;
    Ok((
        fit.ansatz,
        exact_bound_terms_from(&spec, &thermal, &fit.ansatz)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bound::{bogoliubov_sandwich, correlation_bound};
    use crate::heisenberg;
    use std::f64::consts::LN_2;

    fn p(k: f64, c: f64) -> Couplings {
        Couplings::new(k, c).unwrap()
    }

    fn chain(n: usize, model: ChainModel, boundary: Boundary, k: f64, c: f64) -> ChainSpec {
        ChainSpec::new(n, model, boundary, p(k, c)).unwrap()
    }

    fn kron_chain(n: usize, site: usize, op: &DMatrix<f64>) -> DMatrix<f64> {
        (0..n).fold(DMatrix::identity(1, 1), |acc, i| {
            acc.kronecker(&if i == site {
                op.clone()
            } else {
                DMatrix::identity(2, 2)
            })
        })
    }

    #[test]
    fn spec_validation() {
        assert!(ChainSpec::new(13, ChainModel::Tfim, Boundary::Open, p(1.0, 1.0)).is_err());
        assert!(matches!(
            ChainSpec::new(13, ChainModel::Tfim, Boundary::Open, p(1.0, 1.0)),
            Err(Error::DimensionTooLarge(13))
        ));
        assert!(ChainSpec::new(2, ChainModel::Tfim, Boundary::Periodic, p(1.0, 1.0)).is_err());
        assert!(ChainSpec::new(0, ChainModel::Tfim, Boundary::Open, p(1.0, 1.0)).is_err());
    }

    #[test]
    fn single_site_tfim() {
        let h = build_hamiltonian(&chain(1, ChainModel::Tfim, Boundary::Open, 0.7, 1.3));
        assert_eq!(h, DMatrix::from_row_slice(2, 2, &[-1.3, 0.0, 0.0, 1.3]));
    }

    #[test]
    fn kronecker_oracle() {
        let sx = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let sz = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        let (n, k, c) = (4, 0.8, 0.3);
        let mut want = DMatrix::<f64>::zeros(16, 16);
        for i in 0..n {
            want -= kron_chain(n, i, &sx) * kron_chain(n, (i + 1) % n, &sx) * k;
            want -= kron_chain(n, i, &sz) * c;
        }
        let got = build_hamiltonian(&chain(n, ChainModel::Tfim, Boundary::Periodic, k, c));
        assert!((got - &want).amax() < 1e-14);
    }

    #[test]
    fn two_site_heisenberg_spectrum() {
        for (k, c) in [(1.0, 2.0), (0.3, 0.1), (2.0, 0.0)] {
            let spec = chain(2, ChainModel::Heisenberg, Boundary::Open, k, c);
            let mut want = heisenberg::spectrum(p(k, c)).to_vec();
            want.sort_by(f64::total_cmp);
            let full: Vec<f64> = {
                let mut e: Vec<f64> = build_hamiltonian(&spec)
                    .symmetric_eigenvalues()
                    .iter()
                    .copied()
                    .collect();
                e.sort_by(f64::total_cmp);
                e
            };
            for (a, b) in spectrum(&spec).iter().zip(&want) {
                assert!((a - b).abs() < 1e-12);
            }
            for (a, b) in full.iter().zip(&want) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn free_spins_spectrum() {
        let e = spectrum(&chain(3, ChainModel::Tfim, Boundary::Periodic, 0.0, 0.5));
        let want = [-1.5, -0.5, -0.5, -0.5, 0.5, 0.5, 0.5, 1.5];
        for (a, b) in e.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn sector_spectrum_matches_dense() {
        for model in [ChainModel::Tfim, ChainModel::Heisenberg] {
            let spec = chain(6, model, Boundary::Periodic, 0.9, 0.4);
            let mut dense: Vec<f64> = build_hamiltonian(&spec)
                .symmetric_eigenvalues()
                .iter()
                .copied()
                .collect();
            dense.sort_by(f64::total_cmp);
            for (a, b) in spectrum(&spec).iter().zip(&dense) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn thermal_density_examples() {
        let t = thermal_density(&DMatrix::zeros(8, 8)).unwrap();
        assert!(t.rho.max_abs_diff(&DensityMatrix::maximally_mixed(8)) < 1e-15);
        assert!((t.ln_z - 8f64.ln()).abs() < 1e-14);

        let q = p(1.1, 0.6);
        let t = thermal_density(&build_hamiltonian(&chain(
            2,
            ChainModel::Heisenberg,
            Boundary::Open,
            1.1,
            0.6,
        )))
        .unwrap();
        assert!(t.rho.max_abs_diff(&heisenberg::thermal_state(q)) < 1e-10);
        assert!((t.ln_z - heisenberg::ln_z(q)).abs() < 1e-10);
    }

    #[test]
    fn thermal_state_commutes_with_hamiltonian() {
        let h = build_hamiltonian(&chain(5, ChainModel::Tfim, Boundary::Periodic, 1.0, 0.7));
        let rho = thermal_density(&h).unwrap().rho;
        let hc = h.map(|x| Complex64::new(x, 0.0));
        let comm = rho.matrix() * &hc - &hc * rho.matrix();
        assert!(comm.iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-10);
    }

    #[test]
    fn mutual_information_examples() {
        let free = thermal_density(&build_hamiltonian(&chain(
            4,
            ChainModel::Tfim,
            Boundary::Periodic,
            0.0,
            1.0,
        )))
        .unwrap();
        assert!(multiparty_mutual_info(&free.rho, 4).unwrap().abs() < 1e-10);

        let r = std::f64::consts::FRAC_1_SQRT_2;
        let singlet = DVector::from_vec([0.0, r, -r, 0.0].map(|x| Complex64::new(x, 0.0)).to_vec());
        let singlet = DensityMatrix::pure(&singlet).unwrap();
        assert!((multiparty_mutual_info(&singlet, 2).unwrap() - 2.0 * LN_2).abs() < 1e-12);

        let h = build_hamiltonian(&chain(4, ChainModel::Tfim, Boundary::Periodic, 1.0, 1.0));
        let i = multiparty_mutual_info(&thermal_density(&h).unwrap().rho, 4).unwrap();
        assert!((0.0..=4.0 * LN_2).contains(&i));
        assert!(multiparty_mutual_info(&singlet, 3).is_err());
    }

    #[test]
    fn mutual_information_is_translation_invariant() {
        // Translate the periodic chain by one site: the state is unchanged up
        // to relabeling, so rotate basis indices and compare.
        let n = 5;
        let spec = chain(n, ChainModel::Tfim, Boundary::Periodic, 0.9, 0.6);
        let rho = thermal_density(&build_hamiltonian(&spec)).unwrap().rho;
        let d = 1 << n;
        let rot = |s: usize| ((s << 1) | (s >> (n - 1))) & (d - 1);
        let shifted = DMatrix::from_fn(d, d, |i, j| rho.matrix()[(rot(i), rot(j))]);
        let shifted = DensityMatrix::new(shifted).unwrap();
        let a = multiparty_mutual_info(&rho, n).unwrap();
        let b = multiparty_mutual_info(&shifted, n).unwrap();
        assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn identity_trivial_case() {
        let spec = chain(4, ChainModel::Tfim, Boundary::Periodic, 0.0, 0.8);
        let t = exact_bound_terms(&spec, &MeanFieldAnsatz3::along_x(0.3)).unwrap();
        assert!(t.beta_gap.abs() < 1e-12);
        assert!(t.relative_entropy_direct.abs() < 1e-10);
        assert!(t.bound().abs() < 1e-10);
    }

    #[test]
    fn identity_with_solved_mean_field() {
        let q = p(1.0, 1.0);
        let s = MeanFieldAnsatz3::along_x(tfim::solve_s(q).principal);
        let spec = chain(6, ChainModel::Tfim, Boundary::Periodic, 1.0, 1.0);
        let t = exact_bound_terms(&spec, &s).unwrap();
        assert!(t.identity_residual() < 1e-8);
        let rho = thermal_density(&build_hamiltonian(&spec)).unwrap().rho;
        assert!(t.bound() >= multiparty_mutual_info(&rho, 6).unwrap() - 1e-8);
    }

    #[test]
    fn model_agrees_with_closed_form_heisenberg() {
        let model = EdModel::new(2, ChainModel::Heisenberg, Boundary::Open).unwrap();
        let q = p(1.0, 1.0);
        let closed = heisenberg::bound(q, AverageMode::Exact).unwrap();
        let ed = correlation_bound(&model, q, &closed.s, AverageMode::Exact).unwrap();
        assert!((closed.bound - ed.bound).abs() < 1e-10);
        let (s, terms) = solved_exact_terms(&model, q, AverageMode::Exact).unwrap();
        assert!((s.sz - closed.s.sz).abs() < 1e-12);
        assert!((terms.relative_entropy_direct - closed.bound).abs() < 1e-8);
    }

    #[test]
    fn sandwich_on_tfim_chain() {
        let model = EdModel::new(6, ChainModel::Tfim, Boundary::Periodic).unwrap();
        let q = p(1.0, 1.0);
        let fit = model.mean_field(q, AverageMode::PaperFaithful).unwrap();
        let w = bogoliubov_sandwich(&model, q, &fit.ansatz).unwrap();
        assert!(w.slack() >= -1e-9, "{w:?}");
    }

    #[test]
    fn convergence_examples() {
        for row in convergence_check(p(0.0, 1.3), &[4, 6, 8]).unwrap() {
            assert!(row.deviation < 1e-10);
        }
        let rows = convergence_check(p(1.0, 1.0), &[4, 8]).unwrap();
        assert!(rows[1].deviation < rows[0].deviation);
        assert!(convergence_check(p(1.0, 1.0), &[5]).is_err());
    }
}
