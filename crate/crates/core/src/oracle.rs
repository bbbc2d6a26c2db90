//! Independent checks of the perturbative sums.
//!
//! Exact eigenvalues of `H0 - qE x` are computed at a few small fields and
//! the `E^2` coefficient of the energy shift is extracted by least squares.
//! Tracking of perturbed levels is by maximal overlap with the unperturbed
//! eigenvectors.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::discretization::{OperatorKind, OperatorMatrix};
use crate::error::{Error, Result};
use crate::spectrum::{solve_spectrum, DipoleEigenMatrix, Spectrum, DEFAULT_GAP_TOL};
use crate::summation::compensated_sum;

pub const DEFAULT_FIELDS: [f64; 4] = [-2e-3, -1e-3, 1e-3, 2e-3];

/// RMS misfit (energy units) above which the field set is rejected.
pub const FIT_RESIDUAL_TOL: f64 = 1e-10;

/// Minimum squared overlap with the unperturbed state for a level to count as tracked.
pub const MIN_TRACKING_OVERLAP: f64 = 0.5;

/// Result of a polynomial fit of a tracked energy against the field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StarkFit {
    pub field_values: Vec<f64>,
    /// Tracked energy (or occupied-set energy) at each field.
    pub tracked_energies: Vec<f64>,
    /// Same quantity at zero field.
    pub reference_energy: f64,
    pub linear_coeff: f64,
    pub quadratic_coeff: f64,
    pub fit_residual: f64,
}

impl StarkFit {
    /// Nonperturbative estimate of the reduced shift `S`, or `None` at zero charge.
    pub fn reduced_shift(&self, charge: f64) -> Option<f64> {
        (charge != 0.0).then(|| self.quadratic_coeff / (charge * charge))
    }
}

fn check_fields(fields: &[f64]) -> Result<()> {
    if fields.len() < 2 {
        return Err(Error::InvalidFields("need at least two field values".into()));
    }
    if fields.iter().any(|e| !e.is_finite() || *e == 0.0) {
        return Err(Error::InvalidFields("field values must be finite and non-zero".into()));
    }
    let mut pos: Vec<f64> = fields.iter().filter(|e| **e > 0.0).copied().collect();
    let mut neg: Vec<f64> = fields.iter().filter(|e| **e < 0.0).map(|e| -e).collect();
    pos.sort_by(f64::total_cmp);
    neg.sort_by(f64::total_cmp);
    if pos != neg {
        return Err(Error::InvalidFields("field set must be symmetric about zero".into()));
    }
    Ok(())
}

fn check_operators(h0: &OperatorMatrix, x: &OperatorMatrix) -> Result<()> {
    if h0.kind != OperatorKind::Hamiltonian || x.kind != OperatorKind::Dipole {
        return Err(Error::invalid("operator", "expected (hamiltonian, dipole)"));
    }
    if h0.dimension() != x.dimension() {
        return Err(Error::DimensionMismatch { expected: h0.dimension(), actual: x.dimension() });
    }
    Ok(())
}

/// Least-squares fit of `shift(E) = c1 E + c2 E^2 + c4 E^4`; the
/// zero-field value is subtracted exactly beforehand.
///
/// The quartic column absorbs the hyperpolarizability, which otherwise
/// biases `c2` by `O(E^2)`. On a symmetric stencil the odd and even columns
/// decouple, so the residual measures the odd-part misfit.
fn fit_shift(fields: &[f64], shifts: &[f64]) -> Result<(f64, f64, f64)> {
    const POWERS: [i32; 3] = [1, 2, 4];
    let scale = fields.iter().fold(0.0f64, |m, e| m.max(e.abs()));
    let mut distinct: Vec<f64> = fields.iter().map(|e| e.abs()).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    // Too few magnitudes to separate E^2 from E^4: drop the quartic column.
    let columns = if distinct.len() >= 2 { &POWERS[..] } else { &POWERS[..2] };
    let a = DMatrix::from_fn(fields.len(), columns.len(), |r, c| (fields[r] / scale).powi(columns[c]));
    let b = DVector::from_column_slice(shifts);
    let svd = a.clone().svd(true, true);
    let coeffs = svd
        .solve(&b, 1e-14)
        .map_err(|e| Error::InvalidFields(format!("singular fit: {e}")))?;
    let residual = (&a * &coeffs - &b).norm() / (fields.len() as f64).sqrt();
    let linear = coeffs[0] / scale;
    let quadratic = coeffs[1] / (scale * scale);
    Ok((linear, quadratic, residual))
}

struct FieldSolve {
    energies: Vec<f64>,
    vectors: DMatrix<f64>,
}

fn solve_at_field(h0: &OperatorMatrix, x: &OperatorMatrix, charge: f64, field: f64) -> FieldSolve {
    let h = &h0.matrix - &x.matrix * (charge * field);
    let eig = SymmetricEigen::new(h);
    FieldSolve { energies: eig.eigenvalues.iter().copied().collect(), vectors: eig.eigenvectors }
}

fn best_match<'a>(overlaps: impl Iterator<Item = &'a f64>) -> (usize, f64) {
    let mut best = (0, 0.0);
    for (b, o) in overlaps.enumerate() {
        let o2 = o * o;
        if o2 > best.1 {
            best = (b, o2);
        }
    }
    best
}

fn finish(fields: &[f64], tracked: Vec<f64>, reference: f64, shifts: Vec<f64>) -> Result<StarkFit> {
    let (linear_coeff, quadratic_coeff, fit_residual) = fit_shift(fields, &shifts)?;
    if fit_residual > FIT_RESIDUAL_TOL {
        return Err(Error::FieldTooStrong { residual: fit_residual, threshold: FIT_RESIDUAL_TOL });
    }
    Ok(StarkFit {
        field_values: fields.to_vec(),
        tracked_energies: tracked,
        reference_energy: reference,
        linear_coeff,
        quadratic_coeff,
        fit_residual,
    })
}

/// Nonperturbative Stark fit of the lowest positive-energy level.
pub fn stark_fit_ground(h0: &OperatorMatrix, x: &OperatorMatrix, charge: f64, fields: &[f64]) -> Result<StarkFit> {
    check_operators(h0, x)?;
    check_fields(fields)?;
    let unperturbed = solve_spectrum(h0, DEFAULT_GAP_TOL)?;
    let g = unperturbed.ground_index;
    let ground = unperturbed.states.column(g).clone_owned();
    let e0 = unperturbed.energies[g];

    let tracked = fields
        .par_iter()
        .map(|&field| {
            let sol = solve_at_field(h0, x, charge, field);
            let overlaps = ground.transpose() * &sol.vectors;
            let (b, o2) = best_match(overlaps.iter());
            if o2 < MIN_TRACKING_OVERLAP {
                return Err(Error::TrackingLost { index: g, field, overlap: o2 });
            }
            Ok(sol.energies[b])
        })
        .collect::<Result<Vec<f64>>>()?;

    let shifts = tracked.iter().map(|e| e - e0).collect();
    finish(fields, tracked, e0, shifts)
}

/// Nonperturbative hole-theory total: energy of the filled negative sea plus
/// the particle in the lowest positive level.
pub fn ht_occupied_sum_fit(h0: &OperatorMatrix, x: &OperatorMatrix, charge: f64, fields: &[f64]) -> Result<StarkFit> {
    check_operators(h0, x)?;
    check_fields(fields)?;
    let unperturbed = solve_spectrum(h0, DEFAULT_GAP_TOL)?;
    let mut occupied = unperturbed.negative_indices.clone();
    occupied.push(unperturbed.ground_index);
    let occ_vectors = unperturbed.states.select_columns(&occupied);
    let occ_energies: Vec<f64> = occupied.iter().map(|&a| unperturbed.energies[a]).collect();
    let reference = compensated_sum(occ_energies.iter().copied());

    let per_field = fields
        .par_iter()
        .map(|&field| {
            let sol = solve_at_field(h0, x, charge, field);
            let overlaps = occ_vectors.transpose() * &sol.vectors;
            let mut taken = vec![false; sol.energies.len()];
            let mut assigned: Vec<(usize, f64)> = Vec::with_capacity(occupied.len());
            for (row, &a) in occupied.iter().enumerate() {
                let (b, o2) = best_match(overlaps.row(row).iter());
                if o2 < MIN_TRACKING_OVERLAP {
                    return Err(Error::TrackingLost { index: a, field, overlap: o2 });
                }
                if taken[b] {
                    return Err(Error::CrossingDetected { field });
                }
                taken[b] = true;
                assigned.push((b, sol.energies[b]));
            }
            // Occupied levels must keep their relative order.
            let mut by_energy: Vec<usize> = (0..assigned.len()).collect();
            by_energy.sort_by(|&i, &j| assigned[i].1.total_cmp(&assigned[j].1));
            if by_energy.iter().enumerate().any(|(k, &i)| k != i) {
                return Err(Error::CrossingDetected { field });
            }
            let shift = compensated_sum(assigned.iter().zip(&occ_energies).map(|(&(_, e), &e0)| e - e0));
            let total = compensated_sum(assigned.iter().map(|&(_, e)| e));
            Ok((total, shift))
        })
        .collect::<Result<Vec<(f64, f64)>>>()?;

    let (tracked, shifts) = per_field.into_iter().unzip();
    finish(fields, tracked, reference, shifts)
}

/// Random well-separated spectrum with a random zero-diagonal symmetric
/// dipole, deterministic per seed.
pub fn synthetic_spectrum(seed: u64, n_pos: usize, n_neg: usize) -> Result<(Spectrum, DipoleEigenMatrix)> {
    const MIN_GAP: f64 = 1e-2;
    if n_pos == 0 {
        return Err(Error::invalid("n_pos", "need at least one positive state"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |count: usize, lo: f64, hi: f64, rng: &mut ChaCha8Rng| {
        let mut out: Vec<f64> = Vec::with_capacity(count);
        while out.len() < count {
            let e = rng.random_range(lo..hi);
            if out.iter().all(|o| (o - e).abs() >= MIN_GAP) {
                out.push(e);
            }
        }
        out
    };
    let mut energies = draw(n_pos, 0.5, 5.0, &mut rng);
    energies.extend(draw(n_neg, -5.0, -0.5, &mut rng));
    let dim = energies.len();

    let mut x = DMatrix::zeros(dim, dim);
    for j in 0..dim {
        for i in (j + 1)..dim {
            let v = rng.random_range(-1.0..1.0);
            x[(i, j)] = v;
            x[(j, i)] = v;
        }
    }
    // Spectrum sorts its states; permute the dipole to match.
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| energies[a].total_cmp(&energies[b]));
    let permuted = DMatrix::from_fn(dim, dim, |i, j| x[(order[i], order[j])]);
    let mut sorted = energies.clone();
    sorted.sort_by(f64::total_cmp);
    let spectrum = Spectrum::from_eigenpairs(sorted, DMatrix::identity(dim, dim), DEFAULT_GAP_TOL)?;
    Ok((spectrum, DipoleEigenMatrix::new(permuted)?))
}
