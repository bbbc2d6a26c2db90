//! Electric polarizability of a bound 1D Dirac particle, with and without
//! the filled negative-energy sea.
//!
//! The pipeline is: [`potential`] → [`discretization`] (matrices of `H0` and
//! `x` in a sine/cosine box basis) → [`spectrum`] (eigenstates and dipole
//! matrix elements) → [`polarizability`] (second-order shifts). The
//! [`oracle`] module checks the perturbative sums against exact
//! diagonalizations at finite field, and [`experiments`] runs sweeps.

pub mod discretization;
pub mod error;
pub mod experiments;
pub mod io;
pub mod oracle;
pub mod polarizability;
pub mod potential;
pub mod quadrature;
pub mod spectrum;
pub mod summation;

pub use discretization::{assemble_dipole, assemble_hamiltonian, BoxBasis, OperatorKind, OperatorMatrix};
pub use error::{Error, Result};
pub use oracle::{ht_occupied_sum_fit, stark_fit_ground, synthetic_spectrum, StarkFit};
pub use polarizability::{shift_report, ShiftReport, Truncation};
pub use potential::{evaluate_potential, validate_spec, PotentialSpec, Shape};
pub use spectrum::{dipole_in_eigenbasis, solve_spectrum, DipoleEigenMatrix, Spectrum};

/// Physical constants of a run, in units of the particle mass.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Physics {
    pub mass: f64,
    pub charge: f64,
    pub gap_tol: f64,
}

impl Default for Physics {
    fn default() -> Self {
        Physics { mass: 1.0, charge: 1.0, gap_tol: spectrum::DEFAULT_GAP_TOL }
    }
}

/// Everything needed to evaluate one configuration.
#[derive(Debug, Clone)]
pub struct Problem {
    pub hamiltonian: OperatorMatrix,
    pub dipole: OperatorMatrix,
    pub spectrum: Spectrum,
    pub dipole_eigen: DipoleEigenMatrix,
}

impl Problem {
    pub fn build(spec: &PotentialSpec, basis: &BoxBasis, physics: &Physics) -> Result<Self> {
        let hamiltonian = assemble_hamiltonian(spec, basis, physics.mass)?;
        let dipole = assemble_dipole(basis)?;
        let spectrum = solve_spectrum(&hamiltonian, physics.gap_tol)?;
        let dipole_eigen = dipole_in_eigenbasis(&spectrum, &dipole)?;
        Ok(Problem { hamiltonian, dipole, spectrum, dipole_eigen })
    }

    pub fn truncation(&self) -> Truncation {
        let b = self.hamiltonian.basis;
        Truncation { modes: b.modes, box_length: b.box_length, dimension: b.dimension() }
    }

    pub fn report(&self, charge: f64) -> Result<ShiftReport> {
        shift_report(&self.spectrum, &self.dipole_eigen, charge, Some(self.truncation()))
    }
}
