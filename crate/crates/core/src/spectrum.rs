//! Eigenstates of the unperturbed Hamiltonian and the dipole operator in
//! that eigenbasis.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::discretization::{max_asymmetry, OperatorKind, OperatorMatrix};
use crate::error::{Error, Result};

pub const DEFAULT_GAP_TOL: f64 = 1e-8;

/// Splitting below which the ground level is reported as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// Pre-symmetrization asymmetry allowed in the transformed dipole.
pub const DIPOLE_ASYMMETRY_TOL: f64 = 1e-11;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpectrumWarning {
    DegenerateGround { splitting: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergySign {
    Negative,
    Positive,
}

#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Ascending.
    pub energies: Vec<f64>,
    /// Column `a` is the eigenvector of `energies[a]`.
    pub states: DMatrix<f64>,
    pub negative_indices: Vec<usize>,
    pub positive_indices: Vec<usize>,
    pub ground_index: usize,
    pub gap_tol: f64,
    pub warnings: Vec<SpectrumWarning>,
}

impl Spectrum {
    /// Sorts eigenpairs, fixes eigenvector signs and classifies states.
    pub fn from_eigenpairs(energies: Vec<f64>, states: DMatrix<f64>, gap_tol: f64) -> Result<Self> {
        let dim = energies.len();
        if states.ncols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, actual: states.ncols() });
        }
        if !(gap_tol.is_finite() && gap_tol >= 0.0) {
            return Err(Error::invalid("gap_tol", format!("must be non-negative, got {gap_tol}")));
        }
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| energies[a].total_cmp(&energies[b]).then(a.cmp(&b)));

        let sorted: Vec<f64> = order.iter().map(|&i| energies[i]).collect();
        let mut vectors = DMatrix::zeros(states.nrows(), dim);
        for (dst, &src) in order.iter().enumerate() {
            let mut col = states.column(src).clone_owned();
            // Sign convention: the largest-magnitude coefficient (first on ties) is positive.
            let mut pivot = 0;
            for (i, v) in col.iter().enumerate() {
                if v.abs() > col[pivot].abs() {
                    pivot = i;
                }
            }
            if col[pivot] < 0.0 {
                col.neg_mut();
            }
            vectors.set_column(dst, &col);
        }

        let mut negative_indices = Vec::new();
        let mut positive_indices = Vec::new();
        for (index, &energy) in sorted.iter().enumerate() {
            if energy.abs() <= gap_tol || !energy.is_finite() {
                return Err(Error::SpectralGapCollapse { index, energy, gap_tol });
            }
            if energy < 0.0 {
                negative_indices.push(index);
            } else {
                positive_indices.push(index);
            }
        }
        let ground_index = *positive_indices.first().ok_or(Error::NoPositiveState)?;

        let mut warnings = Vec::new();
        if let Some(&next) = positive_indices.get(1) {
            let splitting = sorted[next] - sorted[ground_index];
            if splitting < DEGENERACY_TOL {
                warnings.push(SpectrumWarning::DegenerateGround { splitting });
            }
        }

        Ok(Spectrum {
            energies: sorted,
            states: vectors,
            negative_indices,
            positive_indices,
            ground_index,
            gap_tol,
            warnings,
        })
    }

    pub fn dimension(&self) -> usize {
        self.energies.len()
    }

    pub fn ground_energy(&self) -> f64 {
        self.energies[self.ground_index]
    }

    pub fn sign(&self, index: usize) -> EnergySign {
        if self.energies[index] < 0.0 {
            EnergySign::Negative
        } else {
            EnergySign::Positive
        }
    }

    /// Largest `|H v - e v| / (1 + |e|)` over all states.
    pub fn max_residual(&self, h: &OperatorMatrix) -> f64 {
        let hv = &h.matrix * &self.states;
        (0..self.dimension())
            .map(|a| {
                let e = self.energies[a];
                (hv.column(a) - self.states.column(a) * e).norm() / (1.0 + e.abs())
            })
            .fold(0.0, f64::max)
    }

    /// Largest deviation of `V^T V` from the identity.
    pub fn orthonormality_error(&self) -> f64 {
        let g = self.states.transpose() * &self.states;
        (g - DMatrix::identity(self.dimension(), self.dimension())).amax()
    }
}

/// Full dense diagonalization of `H0`.
pub fn solve_spectrum(h: &OperatorMatrix, gap_tol: f64) -> Result<Spectrum> {
    if h.kind != OperatorKind::Hamiltonian {
        return Err(Error::invalid("operator", "expected a Hamiltonian"));
    }
    let asym = h.max_asymmetry();
    if asym > 1e-13 * h.matrix.amax().max(1.0) {
        return Err(Error::NotSymmetric { asymmetry: asym });
    }
    let eig = SymmetricEigen::new(h.matrix.clone());
    let spectrum = Spectrum::from_eigenpairs(eig.eigenvalues.iter().copied().collect(), eig.eigenvectors, gap_tol)?;
    // The free box has modes + 1 negative levels. A different count means a
    // level has dived through zero between the gap guard's samples.
    if h.dimension() == h.basis.dimension() {
        let expected = h.basis.modes + 1;
        let actual = spectrum.negative_indices.len();
        if actual != expected {
            return Err(Error::LevelCrossedZero { expected, actual });
        }
    }
    Ok(spectrum)
}

/// Matrix elements `X_ab = <a|x|b>` between eigenstates, ordered as in the spectrum.
#[derive(Debug, Clone)]
pub struct DipoleEigenMatrix {
    pub matrix: DMatrix<f64>,
}

impl DipoleEigenMatrix {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch { expected: matrix.nrows(), actual: matrix.ncols() });
        }
        Ok(DipoleEigenMatrix { matrix })
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.matrix[(a, b)]
    }

    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }
}

pub fn dipole_in_eigenbasis(spectrum: &Spectrum, x: &OperatorMatrix) -> Result<DipoleEigenMatrix> {
    if x.dimension() != spectrum.states.nrows() {
        return Err(Error::DimensionMismatch { expected: spectrum.states.nrows(), actual: x.dimension() });
    }
    let v = &spectrum.states;
    let mut m = v.transpose() * (&x.matrix * v);
    let asymmetry = max_asymmetry(&m);
    let threshold = DIPOLE_ASYMMETRY_TOL * x.matrix.amax().max(1.0);
    if asymmetry > threshold {
        return Err(Error::NumericalDegradation { asymmetry, threshold });
    }
    let mt = m.transpose();
    m += mt;
    m *= 0.5;
    DipoleEigenMatrix::new(m)
}
