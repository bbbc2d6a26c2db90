//! Second-order energy shifts of the lowest positive-energy state and the
//! polarizabilities derived from them.
//!
//! Every shift is reduced by the field: `W = (qE)^2 S`, so `S` is a sum of
//! `X_ab^2 / (e_a - e_b)` over eigenstates and `alpha = -2 q^2 S`.
//!
//! * `S_QM`: single-particle shift, all other states as intermediates.
//! * `S_1`: Pauli-blocked shift, positive-energy intermediates only.
//! * `S_vac`: shift of the filled negative-energy sea, with the occupied
//!   ground state excluded as an intermediate.
//! * `S'_vac`: shift of the sea without the particle present.
//! * `S_HT = S_1 + S_vac`, which equals `S_QM + S'_vac` exactly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectrum::{DipoleEigenMatrix, Spectrum};
use crate::summation::{compensated_sum, sum_terms, Term};

/// Relative bound on `|S_HT - (S_QM + S'_vac)|`.
pub const IDENTITY_TOL: f64 = 1e-12;

fn check_dims(spectrum: &Spectrum, x: &DipoleEigenMatrix) -> Result<()> {
    if spectrum.dimension() != x.dimension() {
        return Err(Error::DimensionMismatch { expected: spectrum.dimension(), actual: x.dimension() });
    }
    Ok(())
}

fn term(spectrum: &Spectrum, x: &DipoleEigenMatrix, a: usize, b: usize) -> Result<Term> {
    let gap = spectrum.energies[a] - spectrum.energies[b];
    if gap.abs() < spectrum.gap_tol {
        return Err(Error::DegenerateDenominator { a, b, delta: gap });
    }
    let xab = x.get(a, b);
    Ok(Term { value: xab * xab / gap, gap, a, b })
}

fn positive_excited(spectrum: &Spectrum) -> impl Iterator<Item = usize> + '_ {
    let g = spectrum.ground_index;
    spectrum.positive_indices.iter().copied().filter(move |&i| i != g)
}

/// Sum over positive-energy intermediates `i != 1` for the ground state.
fn ground_positive_terms(spectrum: &Spectrum, x: &DipoleEigenMatrix) -> Result<Vec<Term>> {
    let g = spectrum.ground_index;
    positive_excited(spectrum).map(|i| term(spectrum, x, g, i)).collect()
}

fn ground_negative_terms(spectrum: &Spectrum, x: &DipoleEigenMatrix) -> Result<Vec<Term>> {
    let g = spectrum.ground_index;
    spectrum.negative_indices.iter().map(|&j| term(spectrum, x, g, j)).collect()
}

pub fn reduced_w_qm(spectrum: &Spectrum, x: &DipoleEigenMatrix) -> Result<f64> {
    check_dims(spectrum, x)?;
    let mut terms = ground_positive_terms(spectrum, x)?;
    terms.extend(ground_negative_terms(spectrum, x)?);
    Ok(sum_terms(&mut terms))
}

pub fn reduced_w_one(spectrum: &Spectrum, x: &DipoleEigenMatrix) -> Result<f64> {
    check_dims(spectrum, x)?;
    Ok(sum_terms(&mut ground_positive_terms(spectrum, x)?))
}

/// Negative-state contribution to `S_QM`, i.e. `S_QM - S_1`.
pub fn reduced_w_qm_negative_part(spectrum: &Spectrum, x: &DipoleEigenMatrix) -> Result<f64> {
    check_dims(spectrum, x)?;
    Ok(sum_terms(&mut ground_negative_terms(spectrum, x)?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct VacuumShift {
    pub total: f64,
    /// One entry per negative state, aligned with `Spectrum::negative_indices`.
    pub per_level: Vec<f64>,
}

fn vacuum_shift(spectrum: &Spectrum, x: &DipoleEigenMatrix, include_ground: bool) -> Result<VacuumShift> {
    check_dims(spectrum, x)?;
    let g = spectrum.ground_index;
    let per_level = spectrum
        .negative_indices
        .iter()
        .map(|&j| {
            let mut terms = spectrum
                .positive_indices
                .iter()
                .filter(|&&i| include_ground || i != g)
                .map(|&i| term(spectrum, x, j, i))
                .collect::<Result<Vec<_>>>()?;
            Ok(sum_terms(&mut terms))
        })
        .collect::<Result<Vec<f64>>>()?;
    let total = compensated_sum(per_level.iter().copied());
    Ok(VacuumShift { total, per_level })
}

pub fn reduced_w_vac(spectrum: &Spectrum, x: &DipoleEigenMatrix) -> Result<VacuumShift> {
    vacuum_shift(spectrum, x, false)
}

pub fn reduced_w_vac_prime(spectrum: &Spectrum, x: &DipoleEigenMatrix) -> Result<f64> {
    Ok(vacuum_shift(spectrum, x, true)?.total)
}

/// Per-level shifts of the empty-particle sea.
pub fn reduced_w_vac_prime_levels(spectrum: &Spectrum, x: &DipoleEigenMatrix) -> Result<VacuumShift> {
    vacuum_shift(spectrum, x, true)
}

pub fn reduced_w_ht(s_one: f64, s_vac: f64) -> f64 {
    s_one + s_vac
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Polarizabilities {
    pub alpha_qm: f64,
    pub alpha: f64,
    pub alpha_vac_prime: f64,
}

pub fn polarizabilities(s_qm: f64, s_ht: f64, s_vac_prime: f64, charge: f64) -> Result<Polarizabilities> {
    if !charge.is_finite() {
        return Err(Error::invalid("charge", "must be finite"));
    }
    let scale = -2.0 * charge * charge;
    let p = Polarizabilities { alpha_qm: scale * s_qm, alpha: scale * s_ht, alpha_vac_prime: scale * s_vac_prime };
    let residual = (p.alpha - (p.alpha_qm + p.alpha_vac_prime)).abs();
    let bound = IDENTITY_TOL * (2.0 * charge * charge).max(p.alpha.abs())
        + 4.0 * f64::EPSILON * (p.alpha_qm.abs() + p.alpha_vac_prime.abs());
    if residual > bound {
        return Err(Error::IdentityViolated { residual, bound });
    }
    Ok(p)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    pub modes: usize,
    pub box_length: f64,
    pub dimension: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShiftReport {
    pub s_qm: f64,
    pub s_one: f64,
    pub s_vac: f64,
    pub s_vac_prime: f64,
    pub s_ht: f64,
    pub per_level_vac: Vec<f64>,
    pub identity_residual: f64,
    pub alpha_qm: f64,
    pub alpha: f64,
    pub alpha_vac_prime: f64,
    pub charge: f64,
    pub ground_energy: f64,
    pub truncation: Option<Truncation>,
}

impl ShiftReport {
    pub fn identity_bound(&self) -> f64 {
        IDENTITY_TOL * self.s_ht.abs().max(1.0)
    }

    /// `S_1 <= 0`, every `W_-j <= 0`, `S_vac <= 0`, `S_HT <= 0` and `alpha >= 0`.
    pub fn signs_hold(&self) -> bool {
        self.s_one <= 0.0
            && self.s_vac <= 0.0
            && self.s_ht <= 0.0
            && self.per_level_vac.iter().all(|&w| w <= 0.0)
            && self.alpha >= 0.0
    }
}

/// Evaluates every shift and polarizability for one spectrum.
pub fn shift_report(
    spectrum: &Spectrum,
    x: &DipoleEigenMatrix,
    charge: f64,
    truncation: Option<Truncation>,
) -> Result<ShiftReport> {
    let s_qm = reduced_w_qm(spectrum, x)?;
    let s_one = reduced_w_one(spectrum, x)?;
    let vac = reduced_w_vac(spectrum, x)?;
    let s_vac_prime = reduced_w_vac_prime(spectrum, x)?;
    let s_ht = reduced_w_ht(s_one, vac.total);

    let identity_residual = (s_ht - (s_qm + s_vac_prime)).abs();
    let bound = IDENTITY_TOL * s_ht.abs().max(1.0);
    if identity_residual > bound {
        return Err(Error::IdentityViolated { residual: identity_residual, bound });
    }
    let p = polarizabilities(s_qm, s_ht, s_vac_prime, charge)?;

    Ok(ShiftReport {
        s_qm,
        s_one,
        s_vac: vac.total,
        s_vac_prime,
        s_ht,
        per_level_vac: vac.per_level,
        identity_residual,
        alpha_qm: p.alpha_qm,
        alpha: p.alpha,
        alpha_vac_prime: p.alpha_vac_prime,
        charge,
        ground_energy: spectrum.ground_energy(),
        truncation,
    })
}
