//! Depth sweeps, sign-change bracketing and truncation convergence studies.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::discretization::BoxBasis;
use crate::error::{Error, Result};
use crate::polarizability::{ShiftReport, IDENTITY_TOL};
use crate::potential::PotentialSpec;
use crate::{Physics, Problem};

/// Which depth a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    #[default]
    Vector,
    Scalar,
}

impl SweepAxis {
    pub fn column_name(self) -> &'static str {
        match self {
            SweepAxis::Vector => "depth_vector",
            SweepAxis::Scalar => "depth_scalar",
        }
    }

    pub fn apply(self, base: &PotentialSpec, depth: f64) -> PotentialSpec {
        match self {
            SweepAxis::Vector => PotentialSpec { depth_vector: depth, ..*base },
            SweepAxis::Scalar => PotentialSpec { depth_scalar: depth, ..*base },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    /// Swept depth (vector or scalar, per the sweep axis).
    pub depth: f64,
    pub epsilon_1: f64,
    pub alpha_qm: f64,
    pub alpha: f64,
    pub alpha_vac_prime: f64,
    pub identity_residual: f64,
    pub dimension: usize,
    pub box_length: f64,
}

impl SweepRow {
    fn from_report(depth: f64, r: &ShiftReport, basis: &BoxBasis) -> Self {
        SweepRow {
            depth,
            epsilon_1: r.ground_energy,
            alpha_qm: r.alpha_qm,
            alpha: r.alpha,
            alpha_vac_prime: r.alpha_vac_prime,
            identity_residual: r.identity_residual,
            dimension: basis.dimension(),
            box_length: basis.box_length,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepFailure {
    pub depth: f64,
    pub kind: String,
    pub message: String,
}

impl SweepFailure {
    fn new(depth: f64, e: &Error) -> Self {
        SweepFailure { depth, kind: e.kind().to_string(), message: e.to_string() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub axis: SweepAxis,
    pub rows: Vec<SweepRow>,
    /// Depths whose evaluation failed for reasons other than collapse.
    pub failures: Vec<SweepFailure>,
    /// First depth at which the positive/negative split collapsed.
    pub stop: Option<SweepFailure>,
}

impl Sweep {
    /// Consecutive rows `(i, i + 1)` where `alpha_qm` turns from positive to negative.
    pub fn sign_changes(&self) -> Vec<(usize, usize)> {
        self.rows
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w[0].alpha_qm > 0.0 && w[1].alpha_qm < 0.0)
            .map(|(i, _)| (i, i + 1))
            .collect()
    }
}

/// Builds and evaluates one configuration with `depth` substituted along `axis`.
pub fn evaluate_depth(
    axis: SweepAxis,
    base: &PotentialSpec,
    depth: f64,
    basis: &BoxBasis,
    physics: &Physics,
) -> Result<ShiftReport> {
    let spec = axis.apply(base, depth);
    spec.check()?;
    Problem::build(&spec, basis, physics)?.report(physics.charge)
}

/// Sweep of the vector depth.
pub fn depth_sweep(base: &PotentialSpec, depths: &[f64], basis: &BoxBasis, physics: &Physics) -> Result<Sweep> {
    depth_sweep_along(SweepAxis::Vector, base, depths, basis, physics)
}

pub fn depth_sweep_along(
    axis: SweepAxis,
    base: &PotentialSpec,
    depths: &[f64],
    basis: &BoxBasis,
    physics: &Physics,
) -> Result<Sweep> {
    if depths.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::invalid("depths", "must be strictly ascending"));
    }
    let results: Vec<Result<ShiftReport>> =
        depths.par_iter().map(|&d| evaluate_depth(axis, base, d, basis, physics)).collect();

    let mut sweep = Sweep { axis, rows: Vec::new(), failures: Vec::new(), stop: None };
    for (&depth, result) in depths.iter().zip(results) {
        match result {
            Ok(report) => {
                let bound = IDENTITY_TOL * report.s_ht.abs().max(1.0);
                if report.identity_residual > bound {
                    let e = Error::IdentityViolated { residual: report.identity_residual, bound };
                    sweep.failures.push(SweepFailure::new(depth, &e));
                } else {
                    sweep.rows.push(SweepRow::from_report(depth, &report, basis));
                }
            }
            Err(e) if e.is_collapse() => {
                sweep.stop = Some(SweepFailure::new(depth, &e));
                break;
            }
            Err(e) => sweep.failures.push(SweepFailure::new(depth, &e)),
        }
    }
    Ok(sweep)
}

pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bracket {
    pub axis: SweepAxis,
    pub depth_lo: f64,
    pub depth_hi: f64,
    pub alpha_qm_lo: f64,
    pub alpha_qm_hi: f64,
    pub iterations: usize,
}

impl Bracket {
    pub fn width(&self) -> f64 {
        self.depth_hi - self.depth_lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.depth_lo + self.depth_hi)
    }
}

/// Bisects on the sign of `alpha_qm` until the bracket is narrower than `tol`.
pub fn bracket_sign_change(
    axis: SweepAxis,
    base: &PotentialSpec,
    lo: f64,
    hi: f64,
    basis: &BoxBasis,
    physics: &Physics,
    tol: f64,
) -> Result<Bracket> {
    if !(tol > 0.0) || !(lo < hi) {
        return Err(Error::invalid("bracket", format!("need lo < hi and tol > 0, got [{lo}, {hi}], tol {tol}")));
    }
    let alpha_at = |d: f64| evaluate_depth(axis, base, d, basis, physics).map(|r| r.alpha_qm);
    let (mut a_lo, mut a_hi) = (alpha_at(lo)?, alpha_at(hi)?);
    if !(a_lo > 0.0 && a_hi < 0.0) {
        return Err(Error::NoSignChange { lo, hi, alpha_lo: a_lo, alpha_hi: a_hi });
    }
    let (mut lo, mut hi) = (lo, hi);
    let mut iterations = 0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let a = alpha_at(mid)?;
        if a > 0.0 {
            lo = mid;
            a_lo = a;
        } else {
            hi = mid;
            a_hi = a;
        }
        iterations += 1;
    }
    Ok(Bracket { axis, depth_lo: lo, depth_hi: hi, alpha_qm_lo: a_lo, alpha_qm_hi: a_hi, iterations })
}

/// Relative change below which a column counts as converged.
pub const CONVERGENCE_TOL: f64 = 1e-2;

/// Relative changes below this are roundoff and never count as growth.
const CHANGE_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Column {
    AlphaQm,
    Alpha,
    AlphaVacPrime,
}

impl Column {
    pub const ALL: [Column; 3] = [Column::AlphaQm, Column::Alpha, Column::AlphaVacPrime];

    pub fn name(self) -> &'static str {
        match self {
            Column::AlphaQm => "alpha_qm",
            Column::Alpha => "alpha",
            Column::AlphaVacPrime => "alpha_vac_prime",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvergenceStatus {
    Converged,
    NonConvergent,
    /// Fewer than two mode counts at this box length.
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub box_length: f64,
    pub modes: usize,
    pub dimension: usize,
    pub epsilon_1: f64,
    pub alpha_qm: f64,
    pub alpha: f64,
    pub alpha_vac_prime: f64,
    /// Relative change from the previous mode count at the same box length,
    /// in `Column::ALL` order.
    pub rel_change: Option<[f64; 3]>,
    /// Columns whose change grew relative to the previous step.
    pub growing: Vec<Column>,
}

impl ConvergenceRow {
    pub fn value(&self, c: Column) -> f64 {
        match c {
            Column::AlphaQm => self.alpha_qm,
            Column::Alpha => self.alpha,
            Column::AlphaVacPrime => self.alpha_vac_prime,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnFlag {
    pub box_length: f64,
    pub column: Column,
    pub status: ConvergenceStatus,
    pub last_rel_change: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
    pub flags: Vec<ColumnFlag>,
}

impl ConvergenceTable {
    pub fn flag(&self, box_length: f64, column: Column) -> Option<&ColumnFlag> {
        self.flags.iter().find(|f| f.box_length == box_length && f.column == column)
    }
}

fn rel_change(new: f64, old: f64) -> f64 {
    let scale = new.abs().max(old.abs());
    if scale == 0.0 {
        0.0
    } else {
        (new - old).abs() / scale
    }
}

/// Polarizabilities on the grid `lengths x modes`.
pub fn convergence_study(
    spec: &PotentialSpec,
    physics: &Physics,
    modes_list: &[usize],
    lengths: &[f64],
) -> Result<ConvergenceTable> {
    let mut modes: Vec<usize> = modes_list.to_vec();
    modes.sort_unstable();
    modes.dedup();
    let grid: Vec<(f64, usize)> = lengths.iter().flat_map(|&l| modes.iter().map(move |&n| (l, n))).collect();
    let reports = grid
        .par_iter()
        .map(|&(l, n)| {
            let basis = BoxBasis::new(l, n)?;
            let r = Problem::build(spec, &basis, physics)?.report(physics.charge)?;
            Ok((basis, r))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut table = ConvergenceTable { rows: Vec::new(), flags: Vec::new() };
    for &l in lengths {
        let group: Vec<&(BoxBasis, ShiftReport)> = reports.iter().filter(|(b, _)| b.box_length == l).collect();
        let mut changes: Vec<[f64; 3]> = Vec::new();
        let mut prev: Option<&ConvergenceRow> = None;
        let start = table.rows.len();
        for (basis, r) in group {
            let mut row = ConvergenceRow {
                box_length: l,
                modes: basis.modes,
                dimension: basis.dimension(),
                epsilon_1: r.ground_energy,
                alpha_qm: r.alpha_qm,
                alpha: r.alpha,
                alpha_vac_prime: r.alpha_vac_prime,
                rel_change: None,
                growing: Vec::new(),
            };
            if let Some(p) = prev {
                let delta = Column::ALL.map(|c| rel_change(row.value(c), p.value(c)));
                if let Some(last) = changes.last() {
                    row.growing = Column::ALL
                        .iter()
                        .enumerate()
                        .filter(|&(k, _)| delta[k] > last[k] && delta[k] > CHANGE_FLOOR)
                        .map(|(_, &c)| c)
                        .collect();
                }
                row.rel_change = Some(delta);
                changes.push(delta);
            }
            table.rows.push(row);
            prev = table.rows.last();
        }
        let rows = &table.rows[start..];
        for (k, &column) in Column::ALL.iter().enumerate() {
            let last = changes.last().map(|d| d[k]);
            let grew = rows.iter().any(|r| r.growing.contains(&column));
            let status = match last {
                None => ConvergenceStatus::Undetermined,
                Some(d) if grew || d > CONVERGENCE_TOL => ConvergenceStatus::NonConvergent,
                Some(_) => ConvergenceStatus::Converged,
            };
            table.flags.push(ColumnFlag { box_length: l, column, status, last_rel_change: last });
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn physics() -> Physics {
        Physics::default()
    }

    #[test]
    fn free_depth_row() {
        let base = PotentialSpec::square_well(0.0, 0.0, 2.0).unwrap();
        let basis = BoxBasis::new(20.0, 40).unwrap();
        let s = depth_sweep(&base, &[0.0], &basis, &physics()).unwrap();
        assert_eq!(s.rows.len(), 1);
        let row = s.rows[0];
        assert!(row.alpha > 0.0 && row.alpha_qm > 0.0);
        assert!((row.epsilon_1 - (1.0 + (std::f64::consts::PI / 20.0).powi(2)).sqrt()).abs() < 1e-12);
        assert_eq!(row.dimension, 81);
    }

    #[test]
    fn sweep_stops_at_collapse() {
        let base = PotentialSpec::square_well(0.0, 0.0, 2.0).unwrap();
        let basis = BoxBasis::new(20.0, 40).unwrap();
        let s = depth_sweep(&base, &[0.5, 1.0, 1.4, 1.8, 2.2], &basis, &physics()).unwrap();
        assert_eq!(s.rows.len(), 3);
        let stop = s.stop.unwrap();
        assert_eq!(stop.depth, 1.8);
        assert_eq!(stop.kind, "level_crossed_zero");
        assert!(s.rows.windows(2).all(|w| w[1].epsilon_1 <= w[0].epsilon_1));
    }

    #[test]
    fn sweep_requires_ascending_depths() {
        let base = PotentialSpec::square_well(0.0, 0.0, 2.0).unwrap();
        let basis = BoxBasis::new(20.0, 10).unwrap();
        assert!(depth_sweep(&base, &[1.0, 0.5], &basis, &physics()).is_err());
    }

    #[test]
    fn bracket_without_sign_change() {
        let base = PotentialSpec::square_well(0.0, 0.0, 2.0).unwrap();
        let basis = BoxBasis::new(20.0, 30).unwrap();
        let err = bracket_sign_change(SweepAxis::Vector, &base, 0.5, 1.0, &basis, &physics(), 1e-3).unwrap_err();
        assert!(matches!(err, Error::NoSignChange { .. }));
        assert_eq!(err.exit_code(), 5);
    }

    #[test]
    fn scalar_bracket_narrows_to_tolerance() {
        let base = PotentialSpec::square_well(0.0, 0.0, 2.0).unwrap();
        let basis = BoxBasis::new(20.0, 60).unwrap();
        let b = bracket_sign_change(SweepAxis::Scalar, &base, 1.0, 2.0, &basis, &physics(), 1e-3).unwrap();
        assert!(b.width() <= 1e-3);
        assert!(b.alpha_qm_lo > 0.0 && b.alpha_qm_hi < 0.0);
    }

    #[test]
    fn convergence_flags() {
        let spec = PotentialSpec::square_well(0.0, 0.0, 2.0).unwrap();
        let t = convergence_study(&spec, &physics(), &[20, 10], &[20.0]).unwrap();
        assert_eq!(t.rows.len(), 2);
        assert_eq!(t.rows[0].modes, 10);
        assert!(t.rows[0].rel_change.is_none());
        let exact = (1.0 + (std::f64::consts::PI / 20.0).powi(2)).sqrt();
        for r in &t.rows {
            assert!((r.epsilon_1 - exact).abs() < 1e-12);
        }
        assert_eq!(t.flags.len(), 3);
        let single = convergence_study(&spec, &physics(), &[10], &[20.0]).unwrap();
        assert!(single.flags.iter().all(|f| f.status == ConvergenceStatus::Undetermined));
    }

    #[test]
    fn linspace_endpoints() {
        assert_eq!(linspace(0.0, 1.0, 5), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(linspace(2.0, 3.0, 1), vec![2.0]);
    }
}
