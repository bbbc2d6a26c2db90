//! Binding potential of the unperturbed Hamiltonian.
//!
//! Energies are in units of the particle mass and lengths in units of the
//! inverse mass. Depths are non-negative and always describe an attractive
//! well: the vector part enters as `-depth_vector` and the scalar part as
//! `-depth_scalar` inside the well.

use serde::{Deserialize, Serialize};

use crate::discretization::BoxBasis;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    SquareWell,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    pub shape: Shape,
    pub depth_vector: f64,
    pub depth_scalar: f64,
    pub width: f64,
}

/// Value of the potential at a point, split by Lorentz structure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialValue {
    /// Time-component vector part (multiplies the identity in spinor space).
    pub vector: f64,
    /// Lorentz scalar part (multiplies `beta = sigma_z`).
    pub scalar: f64,
}

impl PotentialSpec {
    pub fn square_well(depth_vector: f64, depth_scalar: f64, width: f64) -> Result<Self> {
        let spec = PotentialSpec { shape: Shape::SquareWell, depth_vector, depth_scalar, width };
        spec.check()?;
        Ok(spec)
    }

    /// Checks the intrinsic invariants (no box information needed).
    pub fn check(&self) -> Result<()> {
        if !(self.width.is_finite() && self.width > 0.0) {
            return Err(Error::invalid("width", format!("must be positive, got {}", self.width)));
        }
        if !(self.depth_vector.is_finite() && self.depth_vector >= 0.0) {
            return Err(Error::invalid(
                "depth_vector",
                format!("must be a finite non-negative depth, got {}", self.depth_vector),
            ));
        }
        if !(self.depth_scalar.is_finite() && self.depth_scalar >= 0.0) {
            return Err(Error::invalid(
                "depth_scalar",
                format!("must be a finite non-negative depth, got {}", self.depth_scalar),
            ));
        }
        Ok(())
    }

    pub fn with_depth_vector(&self, depth_vector: f64) -> Self {
        PotentialSpec { depth_vector, ..*self }
    }

    pub fn evaluate(&self, x: f64) -> PotentialValue {
        match self.shape {
            Shape::SquareWell => {
                if x.abs() <= 0.5 * self.width {
                    PotentialValue { vector: -self.depth_vector, scalar: -self.depth_scalar }
                } else {
                    PotentialValue { vector: 0.0, scalar: 0.0 }
                }
            }
        }
    }

    /// Points inside `[-half_box, half_box]` where the potential may be
    /// non-smooth. Quadrature panels are split there.
    pub fn breakpoints(&self, half_box: f64) -> Vec<f64> {
        match self.shape {
            Shape::SquareWell => {
                let h = 0.5 * self.width;
                [-h, h].into_iter().filter(|x| x.abs() < half_box).collect()
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.depth_vector == 0.0 && self.depth_scalar == 0.0
    }
}

pub fn evaluate_potential(spec: &PotentialSpec, x: f64) -> PotentialValue {
    spec.evaluate(x)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ValidationWarning {
    /// The well occupies more than half the box; wall effects dominate.
    WideWell { width: f64, box_length: f64 },
    /// Vector depth at or beyond twice the mass.
    NearSupercritical { depth_vector: f64, threshold: f64 },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub warnings: Vec<ValidationWarning>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.warnings.is_empty()
    }
}

/// Validates a potential against the box it will be discretized in.
pub fn validate_spec(spec: &PotentialSpec, basis: &BoxBasis, mass: f64) -> Result<ValidationReport> {
    spec.check()?;
    basis.check()?;
    let box_length = basis.box_length;
    if spec.width >= box_length {
        return Err(Error::WellWiderThanBox { width: spec.width, box_length });
    }
    let mut report = ValidationReport::default();
    if spec.width > 0.5 * box_length {
        report.warnings.push(ValidationWarning::WideWell { width: spec.width, box_length });
    }
    let threshold = 2.0 * mass;
    if spec.depth_vector >= threshold {
        report
            .warnings
            .push(ValidationWarning::NearSupercritical { depth_vector: spec.depth_vector, threshold });
    }
    Ok(report)
}
