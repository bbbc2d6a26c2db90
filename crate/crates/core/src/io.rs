//! Run configuration and the CSV/JSON file formats.
//!
//! Configuration files are TOML (`[potential]`, `[basis]`, `[physics]`,
//! `[oracle]`, `[output]` tables of `key = value` pairs) or the equivalent
//! JSON object. Unknown keys are rejected and every value is validated
//! against the module invariants at parse time.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::discretization::BoxBasis;
use crate::error::{Error, Result};
use crate::experiments::{Bracket, ConvergenceTable, Sweep, SweepAxis, SweepRow};
use crate::oracle::DEFAULT_FIELDS;
use crate::polarizability::ShiftReport;
use crate::potential::{validate_spec, PotentialSpec, Shape, ValidationReport};
use crate::spectrum::{Spectrum, DEFAULT_GAP_TOL};
use crate::Physics;

pub const DEFAULT_PRECISION: usize = 17;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PotentialConfig {
    pub shape: Shape,
    pub depth_vector: f64,
    pub depth_scalar: f64,
    pub width: f64,
}

impl Default for PotentialConfig {
    fn default() -> Self {
        PotentialConfig { shape: Shape::SquareWell, depth_vector: 1.0, depth_scalar: 0.0, width: 2.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BasisConfig {
    pub box_length: f64,
    pub modes: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quadrature_nodes: Option<usize>,
}

impl Default for BasisConfig {
    fn default() -> Self {
        BasisConfig { box_length: 20.0, modes: 300, quadrature_nodes: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhysicsConfig {
    pub mass: f64,
    pub charge: f64,
    pub gap_tol: f64,
}

impl Default for PhysicsConfig {
    fn default() -> Self {
        PhysicsConfig { mass: 1.0, charge: 1.0, gap_tol: DEFAULT_GAP_TOL }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleConfig {
    pub fields: Vec<f64>,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { fields: DEFAULT_FIELDS.to_vec() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub format: Format,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    pub precision: usize,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { format: Format::Csv, path: None, precision: DEFAULT_PRECISION }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub potential: PotentialConfig,
    pub basis: BasisConfig,
    pub physics: PhysicsConfig,
    pub oracle: OracleConfig,
    pub output: OutputConfig,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let config: RunConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// JSON if the extension is `.json` or the text starts with `{`, TOML otherwise.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
            || text.trim_start().starts_with('{');
        if is_json {
            Self::from_json_str(&text)
        } else {
            Self::from_toml_str(&text)
        }
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn potential_spec(&self) -> Result<PotentialSpec> {
        let p = &self.potential;
        let spec = PotentialSpec { shape: p.shape, depth_vector: p.depth_vector, depth_scalar: p.depth_scalar, width: p.width };
        spec.check()?;
        Ok(spec)
    }

    pub fn box_basis(&self) -> Result<BoxBasis> {
        let b = &self.basis;
        match b.quadrature_nodes {
            Some(q) => BoxBasis::with_nodes(b.box_length, b.modes, q),
            None => BoxBasis::new(b.box_length, b.modes),
        }
    }

    pub fn physics(&self) -> Physics {
        Physics { mass: self.physics.mass, charge: self.physics.charge, gap_tol: self.physics.gap_tol }
    }

    /// Re-checks every invariant; returns the potential diagnostics.
    pub fn validate(&self) -> Result<ValidationReport> {
        let ph = &self.physics;
        if !(ph.mass.is_finite() && ph.mass > 0.0) {
            return Err(Error::invalid("mass", format!("must be positive, got {}", ph.mass)));
        }
        if !ph.charge.is_finite() {
            return Err(Error::invalid("charge", "must be finite"));
        }
        if !(ph.gap_tol.is_finite() && ph.gap_tol >= 0.0) {
            return Err(Error::invalid("gap_tol", format!("must be non-negative, got {}", ph.gap_tol)));
        }
        let fields = &self.oracle.fields;
        let mut pos: Vec<f64> = fields.iter().filter(|e| **e > 0.0).copied().collect();
        let mut neg: Vec<f64> = fields.iter().filter(|e| **e < 0.0).map(|e| -e).collect();
        pos.sort_by(f64::total_cmp);
        neg.sort_by(f64::total_cmp);
        if fields.len() < 2 || fields.iter().any(|e| !e.is_finite() || *e == 0.0) || pos != neg {
            return Err(Error::invalid("fields", "need a non-empty, zero-free set symmetric about zero"));
        }
        if !(1..=17).contains(&self.output.precision) {
            return Err(Error::invalid("precision", format!("must be in 1..=17, got {}", self.output.precision)));
        }
        validate_spec(&self.potential_spec()?, &self.box_basis()?, ph.mass)
    }
}

/// `x` in scientific notation with `precision` significant digits.
pub fn format_number(x: f64, precision: usize) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    format!("{:.*e}", precision.saturating_sub(1), x)
}

/// `x` rounded to `precision` significant digits.
pub fn round_sig(x: f64, precision: usize) -> f64 {
    format_number(x, precision).parse().unwrap_or(x)
}

fn round_value(v: &mut Value, precision: usize) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64() {
                if let Some(r) = serde_json::Number::from_f64(round_sig(x, precision)) {
                    *n = r;
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(|i| round_value(i, precision)),
        Value::Object(map) => map.values_mut().for_each(|i| round_value(i, precision)),
        _ => {}
    }
}

fn to_json_document(meta: Value, key: &str, body: Value, precision: usize) -> Result<String> {
    let mut doc = Map::new();
    doc.insert("meta".into(), meta);
    doc.insert(key.into(), body);
    let mut doc = Value::Object(doc);
    round_value(&mut doc, precision);
    let mut s = serde_json::to_string_pretty(&doc)?;
    s.push('\n');
    Ok(s)
}

/// Metadata block shared by every output file.
pub fn meta(command: &str, config: &RunConfig) -> Value {
    json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "potential": config.potential,
        "basis": config.basis,
        "physics": config.physics,
    })
}

fn csv_bytes(write: impl FnOnce(&mut csv::Writer<&mut Vec<u8>>) -> Result<()>) -> Result<String> {
    let mut buf = Vec::new();
    {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(&mut buf);
        write(&mut w)?;
        w.flush()?;
    }
    String::from_utf8(buf).map_err(|e| Error::Config(e.to_string()))
}

pub fn spectrum_csv(spectrum: &Spectrum, precision: usize) -> Result<String> {
    csv_bytes(|w| {
        w.write_record(["index", "energy", "sign", "ground"])?;
        for (i, &e) in spectrum.energies.iter().enumerate() {
            let sign = if e < 0.0 { "negative" } else { "positive" };
            w.write_record([
                i.to_string(),
                format_number(e, precision),
                sign.to_string(),
                (i == spectrum.ground_index).to_string(),
            ])?;
        }
        Ok(())
    })
}

pub fn spectrum_json(spectrum: &Spectrum, meta: Value, precision: usize) -> Result<String> {
    let rows: Vec<Value> = spectrum
        .energies
        .iter()
        .enumerate()
        .map(|(i, &e)| json!({"index": i, "energy": e, "sign": spectrum.sign(i), "ground": i == spectrum.ground_index}))
        .collect();
    let mut meta = meta;
    meta["ground_index"] = json!(spectrum.ground_index);
    meta["negative_count"] = json!(spectrum.negative_indices.len());
    meta["positive_count"] = json!(spectrum.positive_indices.len());
    meta["warnings"] = serde_json::to_value(&spectrum.warnings)?;
    to_json_document(meta, "rows", Value::Array(rows), precision)
}

/// Optional oracle comparison appended to a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleComparison {
    pub fields: Vec<f64>,
    pub s_qm_fit: f64,
    pub s_ht_fit: f64,
    pub rel_diff_qm: f64,
    pub rel_diff_ht: f64,
    pub tolerance_qm: f64,
    pub tolerance_ht: f64,
    pub within_tolerance: bool,
}

pub fn report_json(report: &ShiftReport, oracle: Option<&OracleComparison>, meta: Value, precision: usize) -> Result<String> {
    let mut meta = meta;
    if let Some(o) = oracle {
        meta["oracle"] = serde_json::to_value(o)?;
    }
    to_json_document(meta, "report", serde_json::to_value(report)?, precision)
}

pub fn report_csv(report: &ShiftReport, oracle: Option<&OracleComparison>, precision: usize) -> Result<String> {
    let num = |x: f64| format_number(x, precision);
    let mut pairs: Vec<(String, String)> = vec![
        ("s_qm".into(), num(report.s_qm)),
        ("s_one".into(), num(report.s_one)),
        ("s_vac".into(), num(report.s_vac)),
        ("s_vac_prime".into(), num(report.s_vac_prime)),
        ("s_ht".into(), num(report.s_ht)),
        ("identity_residual".into(), num(report.identity_residual)),
        ("alpha_qm".into(), num(report.alpha_qm)),
        ("alpha".into(), num(report.alpha)),
        ("alpha_vac_prime".into(), num(report.alpha_vac_prime)),
        ("charge".into(), num(report.charge)),
        ("ground_energy".into(), num(report.ground_energy)),
    ];
    if let Some(t) = report.truncation {
        pairs.push(("modes".into(), t.modes.to_string()));
        pairs.push(("box_length".into(), num(t.box_length)));
        pairs.push(("dimension".into(), t.dimension.to_string()));
    }
    if let Some(o) = oracle {
        pairs.push(("s_qm_fit".into(), num(o.s_qm_fit)));
        pairs.push(("s_ht_fit".into(), num(o.s_ht_fit)));
        pairs.push(("rel_diff_qm".into(), num(o.rel_diff_qm)));
        pairs.push(("rel_diff_ht".into(), num(o.rel_diff_ht)));
        pairs.push(("oracle_within_tolerance".into(), o.within_tolerance.to_string()));
    }
    for (j, w) in report.per_level_vac.iter().enumerate() {
        pairs.push((format!("w_vac_level_{j}"), num(*w)));
    }
    csv_bytes(|w| {
        w.write_record(["quantity", "value"])?;
        for (k, v) in &pairs {
            w.write_record([k, v])?;
        }
        Ok(())
    })
}

/// Reads the `report` object of a JSON report file.
pub fn read_report_json(text: &str) -> Result<ShiftReport> {
    let mut doc: Value = serde_json::from_str(text)?;
    let report = doc
        .get_mut("report")
        .map(Value::take)
        .ok_or_else(|| Error::Config("missing `report` object".into()))?;
    Ok(serde_json::from_value(report)?)
}

pub const SWEEP_COLUMNS: [&str; 8] =
    ["depth_vector", "epsilon_1", "alpha_qm", "alpha", "alpha_vac_prime", "identity_residual", "D", "L"];

pub fn sweep_csv(sweep: &Sweep, bracket: Option<&Bracket>, precision: usize) -> Result<String> {
    let num = |x: f64| format_number(x, precision);
    let mut out = csv_bytes(|w| {
        let mut header = SWEEP_COLUMNS;
        header[0] = sweep.axis.column_name();
        w.write_record(header)?;
        for r in &sweep.rows {
            w.write_record([
                num(r.depth),
                num(r.epsilon_1),
                num(r.alpha_qm),
                num(r.alpha),
                num(r.alpha_vac_prime),
                num(r.identity_residual),
                r.dimension.to_string(),
                num(r.box_length),
            ])?;
        }
        Ok(())
    })?;
    for f in &sweep.failures {
        out.push_str(&format!("# failed {}={} {}: {}\r\n", sweep.axis.column_name(), num(f.depth), f.kind, f.message));
    }
    if let Some(s) = &sweep.stop {
        out.push_str(&format!("# stopped {}={} {}: {}\r\n", sweep.axis.column_name(), num(s.depth), s.kind, s.message));
    }
    if let Some(b) = bracket {
        out.push_str(&format!(
            "# bracket {}_lo={} {}_hi={} alpha_qm_lo={} alpha_qm_hi={} iterations={}\r\n",
            b.axis.column_name(),
            num(b.depth_lo),
            b.axis.column_name(),
            num(b.depth_hi),
            num(b.alpha_qm_lo),
            num(b.alpha_qm_hi),
            b.iterations
        ));
    }
    Ok(out)
}

pub fn sweep_json(sweep: &Sweep, bracket: Option<&Bracket>, meta: Value, precision: usize) -> Result<String> {
    let mut meta = meta;
    meta["axis"] = serde_json::to_value(sweep.axis)?;
    meta["columns"] = json!(SWEEP_COLUMNS);
    meta["failures"] = serde_json::to_value(&sweep.failures)?;
    meta["stop"] = serde_json::to_value(&sweep.stop)?;
    meta["bracket"] = serde_json::to_value(bracket)?;
    to_json_document(meta, "rows", serde_json::to_value(&sweep.rows)?, precision)
}

/// Parses a sweep table written by [`sweep_csv`]; footer comments are skipped.
pub fn read_sweep_csv(text: &str) -> Result<(SweepAxis, Vec<SweepRow>)> {
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let header = reader.headers()?.clone();
    let axis = match header.get(0) {
        Some("depth_vector") => SweepAxis::Vector,
        Some("depth_scalar") => SweepAxis::Scalar,
        other => return Err(Error::Config(format!("unexpected first column {other:?}"))),
    };
    if header.len() != SWEEP_COLUMNS.len() || header.iter().skip(1).ne(SWEEP_COLUMNS.iter().skip(1).copied()) {
        return Err(Error::Config(format!("unexpected sweep header {:?}", header)));
    }
    let float = |s: &str, name: &str| -> Result<f64> {
        s.trim().parse().map_err(|_| Error::Config(format!("bad {name} value {s:?}")))
    };
    let mut rows = Vec::new();
    for record in reader.records() {
        let r = record?;
        if r.len() != SWEEP_COLUMNS.len() {
            return Err(Error::Config(format!("row has {} fields", r.len())));
        }
        rows.push(SweepRow {
            depth: float(&r[0], "depth")?,
            epsilon_1: float(&r[1], "epsilon_1")?,
            alpha_qm: float(&r[2], "alpha_qm")?,
            alpha: float(&r[3], "alpha")?,
            alpha_vac_prime: float(&r[4], "alpha_vac_prime")?,
            identity_residual: float(&r[5], "identity_residual")?,
            dimension: r[6].trim().parse().map_err(|_| Error::Config(format!("bad D value {:?}", &r[6])))?,
            box_length: float(&r[7], "L")?,
        });
    }
    Ok((axis, rows))
}

pub fn convergence_csv(table: &ConvergenceTable, precision: usize) -> Result<String> {
    let num = |x: f64| format_number(x, precision);
    let mut out = csv_bytes(|w| {
        w.write_record([
            "L",
            "N",
            "D",
            "epsilon_1",
            "alpha_qm",
            "alpha",
            "alpha_vac_prime",
            "rel_change_alpha_qm",
            "rel_change_alpha",
            "rel_change_alpha_vac_prime",
            "flags",
        ])?;
        for r in &table.rows {
            let changes = r.rel_change.map(|d| d.map(num)).unwrap_or_else(|| [String::new(), String::new(), String::new()]);
            let flags: Vec<String> = r.growing.iter().map(|c| format!("{}:growing", c.name())).collect();
            w.write_record([
                num(r.box_length),
                r.modes.to_string(),
                r.dimension.to_string(),
                num(r.epsilon_1),
                num(r.alpha_qm),
                num(r.alpha),
                num(r.alpha_vac_prime),
                changes[0].clone(),
                changes[1].clone(),
                changes[2].clone(),
                flags.join(";"),
            ])?;
        }
        Ok(())
    })?;
    for f in &table.flags {
        let status = serde_json::to_value(f.status)?;
        out.push_str(&format!(
            "# status L={} {}={}\r\n",
            num(f.box_length),
            f.column.name(),
            status.as_str().unwrap_or_default()
        ));
    }
    Ok(out)
}

pub fn convergence_json(table: &ConvergenceTable, meta: Value, precision: usize) -> Result<String> {
    let mut meta = meta;
    meta["flags"] = serde_json::to_value(&table.flags)?;
    to_json_document(meta, "rows", serde_json::to_value(&table.rows)?, precision)
}

/// Writes `contents` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use proptest::prelude::*;

    #[test]
    fn default_config_is_valid() {
        let c = RunConfig::default();
        assert!(c.validate().unwrap().is_clean());
        assert_eq!(c.box_basis().unwrap().quadrature_nodes, 1200);
    }

    #[test]
    fn parses_sectioned_file() {
        let text = r#"
[potential]
shape = "square_well"
depth_vector = 1.5
width = 2.0

[basis]
box_length = 30.0
modes = 100
quadrature_nodes = 500

[physics]
charge = 2.0

[output]
format = "json"
precision = 12
"#;
        let c = RunConfig::from_toml_str(text).unwrap();
        assert_eq!(c.potential.depth_vector, 1.5);
        assert_eq!(c.basis.quadrature_nodes, Some(500));
        assert_eq!(c.physics.charge, 2.0);
        assert_eq!(c.physics.mass, 1.0);
        assert_eq!(c.output.format, Format::Json);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(matches!(RunConfig::from_toml_str("[potential]\ndepht = 1.0\n"), Err(Error::Config(_))));
        assert!(matches!(RunConfig::from_toml_str("[extra]\n"), Err(Error::Config(_))));
        let err = RunConfig::from_toml_str("[potential]\nwidth = -2.0\n").unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let err = RunConfig::from_toml_str("[potential]\nwidth = 25.0\n").unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(RunConfig::from_toml_str("[oracle]\nfields = [1e-3, 2e-3]\n").is_err());
        assert!(RunConfig::from_toml_str("[output]\nprecision = 0\n").is_err());
        assert!(RunConfig::from_json_str(r#"{"basis": {"modes": 1}}"#).is_err());
        assert!(RunConfig::from_json_str(r#"{"potential": {"shape": "triangle"}}"#).is_err());
    }

    #[test]
    fn json_and_toml_agree() {
        let c = RunConfig::from_json_str(r#"{"potential": {"depth_scalar": 0.5}, "basis": {"modes": 50}}"#).unwrap();
        let t = RunConfig::from_toml_str("[potential]\ndepth_scalar = 0.5\n[basis]\nmodes = 50\n").unwrap();
        assert_eq!(c, t);
    }

    #[test]
    fn number_formatting() {
        assert_eq!(format_number(1.0, 3), "1.00e0");
        let x = 0.1 + 0.2;
        assert_eq!(format_number(x, 17).parse::<f64>().unwrap().to_bits(), x.to_bits());
        assert_eq!(round_sig(1.23456, 3), 1.23);
    }

    #[test]
    fn report_round_trips_bit_for_bit() {
        let s = Spectrum::from_eigenpairs(vec![0.7, 1.9, -1.1, -2.3], DMatrix::identity(4, 4), 1e-8).unwrap();
        let x = crate::spectrum::DipoleEigenMatrix::new(DMatrix::from_fn(4, 4, |i, j| {
            if i == j { 0.0 } else { 0.1 * (i + j) as f64 + 1.0 / 3.0 }
        }))
        .unwrap();
        let report = crate::polarizability::shift_report(&s, &x, 1.0, None).unwrap();
        let text = report_json(&report, None, json!({}), DEFAULT_PRECISION).unwrap();
        let back = read_report_json(&text).unwrap();
        assert_eq!(back, report);
        assert_eq!(back.identity_residual.to_bits(), report.identity_residual.to_bits());
    }

    #[test]
    fn sweep_csv_header_and_footer() {
        let row = SweepRow {
            depth: 0.5,
            epsilon_1: 0.9,
            alpha_qm: 1.0 / 3.0,
            alpha: 2.0,
            alpha_vac_prime: 1.0,
            identity_residual: 0.0,
            dimension: 401,
            box_length: 20.0,
        };
        let sweep = Sweep { axis: SweepAxis::Vector, rows: vec![row], failures: vec![], stop: None };
        let bracket = Bracket {
            axis: SweepAxis::Vector,
            depth_lo: 1.0,
            depth_hi: 1.001,
            alpha_qm_lo: 0.1,
            alpha_qm_hi: -0.1,
            iterations: 10,
        };
        let text = sweep_csv(&sweep, Some(&bracket), DEFAULT_PRECISION).unwrap();
        assert!(text.starts_with("depth_vector,epsilon_1,alpha_qm,alpha,alpha_vac_prime,identity_residual,D,L\r\n"));
        assert!(text.contains("# bracket depth_vector_lo="));
        let (axis, rows) = read_sweep_csv(&text).unwrap();
        assert_eq!(axis, SweepAxis::Vector);
        assert_eq!(rows, vec![row]);
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        write_atomic(&path, "a\n").unwrap();
        write_atomic(&path, "b\n").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "b\n");
    }

    fn arb_config() -> impl Strategy<Value = RunConfig> {
        (
            (0.0..3.0f64, 0.0..3.0f64, 0.1..5.0f64),
            (10.0..40.0f64, 2usize..500, proptest::option::of(1usize..4000)),
            (0.1..10.0f64, -5.0..5.0f64, 0.0..1e-6f64),
            proptest::collection::vec(1e-4..1e-2f64, 1..4),
            (any::<bool>(), 1usize..=17),
        )
            .prop_map(|((v, s, a), (l, n, q), (m, c, g), fields, (json, p))| RunConfig {
                potential: PotentialConfig { shape: Shape::SquareWell, depth_vector: v, depth_scalar: s, width: a },
                basis: BasisConfig { box_length: l, modes: n, quadrature_nodes: q },
                physics: PhysicsConfig { mass: m, charge: c, gap_tol: g },
                oracle: OracleConfig { fields: fields.iter().flat_map(|f| [-f, *f]).collect() },
                output: OutputConfig {
                    format: if json { Format::Json } else { Format::Csv },
                    path: None,
                    precision: p,
                },
            })
    }

    proptest! {
        #[test]
        fn config_round_trip(c in arb_config()) {
            prop_assert_eq!(&RunConfig::from_toml_str(&c.to_toml_string().unwrap()).unwrap(), &c);
            prop_assert_eq!(&RunConfig::from_json_str(&c.to_json_string().unwrap()).unwrap(), &c);
        }
    }
}
