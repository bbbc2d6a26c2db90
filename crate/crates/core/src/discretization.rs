//! Spectral discretization of the 1D Dirac Hamiltonian on a hard-wall box.
//!
//! The box is `[-L/2, L/2]`. The upper spinor component is expanded in
//! sine modes `s_n(x) = sqrt(2/L) sin(k_n (x + L/2))`, `n = 1..=N`, and the
//! lower component in cosine modes `c_0 = sqrt(1/L)`,
//! `c_n(x) = sqrt(2/L) cos(k_n (x + L/2))`, `n = 1..=N`, with `k_n = n pi / L`.
//! Since `d/dx` maps each family onto the other with the same wavenumber,
//! the free kinetic term is represented exactly and the discrete free
//! spectrum is `±sqrt(k_n^2 + m^2)` plus a single `-m` from `c_0`.
//!
//! The lower basis functions carry a factor `-i`, which makes every matrix
//! real symmetric. Vector layout: indices `0..N` hold `s_1..s_N`, indices
//! `N..=2N` hold `c_0..c_N`.

use std::f64::consts::{PI, SQRT_2};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::{validate_spec, PotentialSpec};
use crate::quadrature::panel_rule;

/// Largest change allowed when the quadrature node count is doubled.
pub const QUADRATURE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxBasis {
    pub box_length: f64,
    pub modes: usize,
    /// Gauss–Legendre nodes per quadrature panel.
    pub quadrature_nodes: usize,
}

impl BoxBasis {
    /// Basis with the default `4 N` quadrature nodes.
    pub fn new(box_length: f64, modes: usize) -> Result<Self> {
        Self::with_nodes(box_length, modes, 4 * modes)
    }

    pub fn with_nodes(box_length: f64, modes: usize, quadrature_nodes: usize) -> Result<Self> {
        let b = BoxBasis { box_length, modes, quadrature_nodes };
        b.check()?;
        Ok(b)
    }

    pub fn check(&self) -> Result<()> {
        if !(self.box_length.is_finite() && self.box_length > 0.0) {
            return Err(Error::invalid("box_length", format!("must be positive, got {}", self.box_length)));
        }
        if self.modes < 2 {
            return Err(Error::invalid("modes", format!("need at least 2, got {}", self.modes)));
        }
        if self.quadrature_nodes == 0 {
            return Err(Error::invalid("quadrature_nodes", "must be positive"));
        }
        Ok(())
    }

    pub fn dimension(&self) -> usize {
        2 * self.modes + 1
    }

    pub fn wavenumber(&self, n: usize) -> f64 {
        n as f64 * PI / self.box_length
    }

    pub fn sine(&self, n: usize, x: f64) -> f64 {
        (2.0 / self.box_length).sqrt() * (self.wavenumber(n) * (x + 0.5 * self.box_length)).sin()
    }

    pub fn cosine(&self, n: usize, x: f64) -> f64 {
        if n == 0 {
            (1.0 / self.box_length).sqrt()
        } else {
            (2.0 / self.box_length).sqrt() * (self.wavenumber(n) * (x + 0.5 * self.box_length)).cos()
        }
    }

    pub fn sine_index(&self, n: usize) -> usize {
        debug_assert!(n >= 1 && n <= self.modes);
        n - 1
    }

    pub fn cosine_index(&self, n: usize) -> usize {
        debug_assert!(n <= self.modes);
        self.modes + n
    }

    /// Spinor components `(upper, lower / (-i))` of a coefficient vector at `x`.
    pub fn reconstruct(&self, coeffs: &[f64], x: f64) -> (f64, f64) {
        let n = self.modes;
        let upper = (1..=n).map(|k| coeffs[k - 1] * self.sine(k, x)).sum();
        let lower = (0..=n).map(|k| coeffs[n + k] * self.cosine(k, x)).sum();
        (upper, lower)
    }

    /// Exact free spectrum in ascending order.
    pub fn free_spectrum(&self, mass: f64) -> Vec<f64> {
        let mut e: Vec<f64> = (1..=self.modes)
            .flat_map(|n| {
                let w = self.wavenumber(n).hypot(mass);
                [w, -w]
            })
            .chain(std::iter::once(-mass))
            .collect();
        e.sort_by(f64::total_cmp);
        e
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    Hamiltonian,
    Dipole,
}

#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub kind: OperatorKind,
    pub basis: BoxBasis,
    pub matrix: DMatrix<f64>,
}

impl OperatorMatrix {
    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn max_asymmetry(&self) -> f64 {
        max_asymmetry(&self.matrix)
    }
}

pub(crate) fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in (j + 1)..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

fn mirror_lower(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for j in 0..n {
        for i in (j + 1)..n {
            m[(j, i)] = m[(i, j)];
        }
    }
}

/// `sum_q f_a(x_q) f_b(x_q) w_q` for every pair of functions, as a symmetric matrix.
fn weighted_gram(values: &DMatrix<f64>, weights: &[f64]) -> DMatrix<f64> {
    let mut scaled = values.clone();
    for (q, &w) in weights.iter().enumerate() {
        scaled.column_mut(q).scale_mut(w);
    }
    let mut g = values * scaled.transpose();
    mirror_lower(&mut g);
    g
}

struct PotentialBlocks {
    sine: DMatrix<f64>,
    cosine: DMatrix<f64>,
}

fn potential_blocks(spec: &PotentialSpec, basis: &BoxBasis, nodes: usize) -> PotentialBlocks {
    let half = 0.5 * basis.box_length;
    let mut breaks = vec![-half];
    breaks.extend(spec.breakpoints(half));
    breaks.push(half);
    breaks.sort_by(f64::total_cmp);

    // Only nodes where the potential is non-zero contribute.
    let mut xs = Vec::new();
    let mut upper_w = Vec::new();
    let mut lower_w = Vec::new();
    for (x, w) in panel_rule(&breaks, nodes) {
        let u = spec.evaluate(x);
        if u.vector != 0.0 || u.scalar != 0.0 {
            xs.push(x);
            upper_w.push(w * (u.vector + u.scalar));
            lower_w.push(w * (u.vector - u.scalar));
        }
    }

    let n = basis.modes;
    let sines = DMatrix::from_fn(n, xs.len(), |r, q| basis.sine(r + 1, xs[q]));
    let cosines = DMatrix::from_fn(n + 1, xs.len(), |r, q| basis.cosine(r, xs[q]));
    PotentialBlocks { sine: weighted_gram(&sines, &upper_w), cosine: weighted_gram(&cosines, &lower_w) }
}

fn max_change(a: &DMatrix<f64>, b: &DMatrix<f64>) -> (usize, usize, f64) {
    let mut worst = (0, 0, 0.0);
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            let d = (a[(i, j)] - b[(i, j)]).abs();
            if d > worst.2 {
                worst = (i, j, d);
            }
        }
    }
    worst
}

/// Builds `H0 = sigma_x p + sigma_z (m + U_s) + U_v`.
pub fn assemble_hamiltonian(spec: &PotentialSpec, basis: &BoxBasis, mass: f64) -> Result<OperatorMatrix> {
    if !(mass.is_finite() && mass > 0.0) {
        return Err(Error::invalid("mass", format!("must be positive, got {mass}")));
    }
    validate_spec(spec, basis, mass)?;
    let n = basis.modes;
    let dim = basis.dimension();
    let mut h = DMatrix::zeros(dim, dim);

    for k in 1..=n {
        let (s, c) = (basis.sine_index(k), basis.cosine_index(k));
        h[(c, s)] = basis.wavenumber(k);
        h[(s, c)] = basis.wavenumber(k);
        h[(s, s)] = mass;
    }
    for k in 0..=n {
        let c = basis.cosine_index(k);
        h[(c, c)] = -mass;
    }

    if !spec.is_zero() {
        let coarse = potential_blocks(spec, basis, basis.quadrature_nodes);
        let fine = potential_blocks(spec, basis, 2 * basis.quadrature_nodes);
        for (a, b, offset) in [(&coarse.sine, &fine.sine, 0), (&coarse.cosine, &fine.cosine, n)] {
            let (i, j, change) = max_change(a, b);
            if change > QUADRATURE_TOLERANCE {
                return Err(Error::QuadratureNotConverged { row: i + offset, col: j + offset, change });
            }
        }
        let mut view = h.view_mut((0, 0), (n, n));
        view += &coarse.sine;
        let mut view = h.view_mut((n, n), (n + 1, n + 1));
        view += &coarse.cosine;
    }

    Ok(OperatorMatrix { kind: OperatorKind::Hamiltonian, basis: *basis, matrix: h })
}

/// `<s_m | x | s_n>` in closed form.
pub fn sine_dipole(box_length: f64, m: usize, n: usize) -> f64 {
    if m == n || (m + n).is_multiple_of(2) {
        return 0.0;
    }
    let (mf, nf) = (m as f64, n as f64);
    let d = mf * mf - nf * nf;
    -8.0 * box_length * mf * nf / (PI * PI * d * d)
}

/// `<c_m | x | c_n>` in closed form (including the constant mode `n = 0`).
pub fn cosine_dipole(box_length: f64, m: usize, n: usize) -> f64 {
    if m == n || (m + n).is_multiple_of(2) {
        return 0.0;
    }
    if m == 0 || n == 0 {
        let k = (m + n) as f64;
        return -2.0 * SQRT_2 * box_length / (k * k * PI * PI);
    }
    let (mf, nf) = (m as f64, n as f64);
    let (dm, dp) = (mf - nf, mf + nf);
    -2.0 * box_length / (PI * PI) * (1.0 / (dm * dm) + 1.0 / (dp * dp))
}

/// Position operator in the box basis. Block diagonal in spinor space.
pub fn assemble_dipole(basis: &BoxBasis) -> Result<OperatorMatrix> {
    basis.check()?;
    let n = basis.modes;
    let l = basis.box_length;
    let dim = basis.dimension();
    let mut x = DMatrix::zeros(dim, dim);
    for i in 1..=n {
        for j in 1..=n {
            x[(basis.sine_index(i), basis.sine_index(j))] = sine_dipole(l, i, j);
        }
    }
    for i in 0..=n {
        for j in 0..=n {
            x[(basis.cosine_index(i), basis.cosine_index(j))] = cosine_dipole(l, i, j);
        }
    }

    let quad = quadrature_dipole(basis);
    let tol = QUADRATURE_TOLERANCE * l.max(1.0);
    let (i, j, change) = max_change(&x, &quad);
    if change > tol {
        return Err(Error::DipoleCrossCheck { row: i, col: j, change });
    }

    Ok(OperatorMatrix { kind: OperatorKind::Dipole, basis: *basis, matrix: x })
}

fn quadrature_dipole(basis: &BoxBasis) -> DMatrix<f64> {
    let n = basis.modes;
    let half = 0.5 * basis.box_length;
    let breaks = [-half, -half / 3.0, half / 3.0, half];
    let rule = panel_rule(&breaks, basis.quadrature_nodes.max(2 * n + 16));
    let xs: Vec<f64> = rule.iter().map(|p| p.0).collect();
    let ws: Vec<f64> = rule.iter().map(|p| p.0 * p.1).collect();
    let sines = DMatrix::from_fn(n, xs.len(), |r, q| basis.sine(r + 1, xs[q]));
    let cosines = DMatrix::from_fn(n + 1, xs.len(), |r, q| basis.cosine(r, xs[q]));
    let dim = basis.dimension();
    let mut x = DMatrix::zeros(dim, dim);
    x.view_mut((0, 0), (n, n)).copy_from(&weighted_gram(&sines, &ws));
    x.view_mut((n, n), (n + 1, n + 1)).copy_from(&weighted_gram(&cosines, &ws));
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::GaussLegendre;

    fn free_eigs(basis: &BoxBasis) -> Vec<f64> {
        let h = assemble_hamiltonian(&PotentialSpec::square_well(0.0, 0.0, 2.0).unwrap(), basis, 1.0).unwrap();
        let mut e: Vec<f64> = h.matrix.symmetric_eigenvalues().iter().copied().collect();
        e.sort_by(f64::total_cmp);
        e
    }

    #[test]
    fn free_two_mode_spectrum() {
        let basis = BoxBasis::new(20.0, 2).unwrap();
        let e = free_eigs(&basis);
        let w1 = (1.0 + (PI / 20.0).powi(2)).sqrt();
        let w2 = (1.0 + (2.0 * PI / 20.0).powi(2)).sqrt();
        let expected = [-w2, -w1, -1.0, w1, w2];
        for (a, b) in e.iter().zip(expected) {
            assert!((a - b).abs() < 1e-14, "{a} vs {b}");
        }
        assert!((w1 - 1.012_261_83).abs() < 1e-8 && (w2 - 1.048_187_03).abs() < 1e-8);
    }

    #[test]
    fn basis_orthonormal_by_quadrature() {
        let basis = BoxBasis::new(20.0, 12).unwrap();
        let gl = GaussLegendre::new(200);
        let h = 10.0;
        for m in 1..=12 {
            for n in 1..=12 {
                let v = gl.integrate(-h, h, |x| basis.sine(m, x) * basis.sine(n, x));
                assert!((v - f64::from(u8::from(m == n))).abs() < 1e-12);
            }
        }
        for m in 0..=12 {
            for n in 0..=12 {
                let v = gl.integrate(-h, h, |x| basis.cosine(m, x) * basis.cosine(n, x));
                assert!((v - f64::from(u8::from(m == n))).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn hamiltonian_is_symmetric() {
        let spec = PotentialSpec::square_well(1.3, 0.4, 2.0).unwrap();
        let h = assemble_hamiltonian(&spec, &BoxBasis::new(20.0, 40).unwrap(), 1.0).unwrap();
        assert_eq!(h.max_asymmetry(), 0.0);
    }

    #[test]
    fn quadrature_converged_under_doubling() {
        let spec = PotentialSpec::square_well(1.0, 0.5, 2.0).unwrap();
        let b1 = BoxBasis::new(20.0, 30).unwrap();
        let b2 = BoxBasis::with_nodes(20.0, 30, 8 * 30).unwrap();
        let h1 = assemble_hamiltonian(&spec, &b1, 1.0).unwrap();
        let h2 = assemble_hamiltonian(&spec, &b2, 1.0).unwrap();
        assert!((h1.matrix - h2.matrix).amax() <= 1e-10);
    }

    #[test]
    fn starved_quadrature_is_reported() {
        let spec = PotentialSpec::square_well(1.0, 0.0, 8.0).unwrap();
        let b = BoxBasis::with_nodes(20.0, 60, 3).unwrap();
        let err = assemble_hamiltonian(&spec, &b, 1.0).unwrap_err();
        assert!(matches!(err, Error::QuadratureNotConverged { .. }), "{err}");
    }

    #[test]
    fn potential_entries_match_closed_form() {
        // Diagonal sine entry of a constant well: (2/L) * integral of sin^2 over the well.
        let (v, a, l) = (1.5, 2.0, 20.0);
        let spec = PotentialSpec::square_well(v, 0.0, a).unwrap();
        let basis = BoxBasis::new(l, 5).unwrap();
        let h = assemble_hamiltonian(&spec, &basis, 1.0).unwrap();
        for n in 1..=5usize {
            let k = basis.wavenumber(n);
            let (y0, y1) = (l / 2.0 - a / 2.0, l / 2.0 + a / 2.0);
            let prim = |y: f64| y / 2.0 - (2.0 * k * y).sin() / (4.0 * k);
            let exact = 1.0 - v * (2.0 / l) * (prim(y1) - prim(y0));
            let i = basis.sine_index(n);
            assert!((h.matrix[(i, i)] - exact).abs() < 1e-13);
        }
    }

    #[test]
    fn sine_dipole_closed_form_matches_quadrature() {
        let l = 20.0;
        let basis = BoxBasis::new(l, 8).unwrap();
        let gl = GaussLegendre::new(400);
        for m in 1..=8 {
            for n in 1..=8 {
                let q = gl.integrate(-l / 2.0, l / 2.0, |x| basis.sine(m, x) * x * basis.sine(n, x));
                assert!((q - sine_dipole(l, m, n)).abs() < 1e-12, "({m},{n})");
            }
        }
        let expected = -16.0 * l / (9.0 * PI * PI);
        assert!((sine_dipole(l, 1, 2) - expected).abs() < 1e-15);
        assert!((expected + 3.602_531).abs() < 1e-6);
    }

    #[test]
    fn cosine_dipole_closed_form_matches_quadrature() {
        let l = 13.0;
        let basis = BoxBasis::new(l, 8).unwrap();
        let gl = GaussLegendre::new(400);
        for m in 0..=8 {
            for n in 0..=8 {
                let q = gl.integrate(-l / 2.0, l / 2.0, |x| basis.cosine(m, x) * x * basis.cosine(n, x));
                assert!((q - cosine_dipole(l, m, n)).abs() < 1e-12, "({m},{n})");
            }
        }
    }

    #[test]
    fn dipole_structure() {
        let basis = BoxBasis::new(20.0, 25).unwrap();
        let x = assemble_dipole(&basis).unwrap();
        assert_eq!(x.max_asymmetry(), 0.0);
        for i in 0..basis.dimension() {
            assert_eq!(x.matrix[(i, i)], 0.0);
        }
        for m in 1..=25 {
            for n in 1..=25 {
                if (m + n) % 2 == 0 {
                    assert_eq!(x.matrix[(basis.sine_index(m), basis.sine_index(n))], 0.0);
                }
                // no sine-cosine coupling
                assert_eq!(x.matrix[(basis.sine_index(m), basis.cosine_index(n))], 0.0);
            }
        }
    }

    #[test]
    fn free_spectrum_helper_matches_assembly() {
        let basis = BoxBasis::new(20.0, 30).unwrap();
        let e = free_eigs(&basis);
        for (a, b) in e.iter().zip(basis.free_spectrum(1.0)) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
