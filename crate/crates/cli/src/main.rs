use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dirac_pol::experiments::{
    bracket_sign_change, convergence_study, depth_sweep_along, linspace, Column, ConvergenceStatus, SweepAxis,
};
use dirac_pol::io::{self, Format, OracleComparison, RunConfig};
use dirac_pol::oracle::{ht_occupied_sum_fit, stark_fit_ground};
use dirac_pol::{Error, Problem, Result};

/// Relative tolerances of the perturbative/nonperturbative comparison.
const ORACLE_TOL_QM: f64 = 1e-6;
const ORACLE_TOL_HT: f64 = 1e-5;
const ORACLE_ABS_FLOOR: f64 = 1e-9;

#[derive(Parser, Debug)]
#[command(name = "dirac-pol", version, about = "Electric polarizability of a bound 1D Dirac particle")]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// TOML or JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    depth_vector: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    depth_scalar: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    width: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    box_length: Option<f64>,
    #[arg(long, global = true)]
    modes: Option<usize>,
    #[arg(long, global = true)]
    quadrature_nodes: Option<usize>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    mass: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    charge: Option<f64>,
    #[arg(long, global = true)]
    gap_tol: Option<f64>,
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    /// Output file; stdout when absent.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Significant digits in numeric output.
    #[arg(long, global = true)]
    precision: Option<usize>,
    /// Print failures as a JSON object on stderr.
    #[arg(long, global = true)]
    error_json: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum AxisArg {
    Vector,
    Scalar,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Eigenvalues of H0 with positive/negative classification.
    Spectrum,
    /// Energy shifts and polarizabilities.
    Alpha {
        /// Append the finite-field comparison.
        #[arg(long)]
        oracle: bool,
    },
    /// Depth sweep of the polarizabilities.
    Sweep {
        #[arg(long, default_value_t = 0.0)]
        depth_min: f64,
        #[arg(long)]
        depth_max: f64,
        #[arg(long, default_value_t = 31)]
        steps: usize,
        #[arg(long, value_enum, default_value = "vector")]
        axis: AxisArg,
        /// Bisect the first alpha_qm sign change.
        #[arg(long)]
        bracket: bool,
        #[arg(long, default_value_t = 1e-3)]
        bracket_tol: f64,
    },
    /// Truncation convergence table.
    Converge {
        #[arg(long, value_delimiter = ',', default_value = "100,200,400")]
        modes_list: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "20")]
        lengths: Vec<f64>,
    },
}

fn load_config(c: &CommonArgs) -> Result<RunConfig> {
    let mut config = match &c.config {
        Some(path) => RunConfig::from_path(path)?,
        None => RunConfig::default(),
    };
    macro_rules! set {
        ($flag:expr => $field:expr) => {
            if let Some(v) = $flag {
                $field = v;
            }
        };
    }
    set!(c.depth_vector => config.potential.depth_vector);
    set!(c.depth_scalar => config.potential.depth_scalar);
    set!(c.width => config.potential.width);
    set!(c.box_length => config.basis.box_length);
    set!(c.modes => config.basis.modes);
    set!(c.mass => config.physics.mass);
    set!(c.charge => config.physics.charge);
    set!(c.gap_tol => config.physics.gap_tol);
    set!(c.precision => config.output.precision);
    if let Some(q) = c.quadrature_nodes {
        config.basis.quadrature_nodes = Some(q);
    }
    if let Some(f) = c.format {
        config.output.format = match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        };
    }
    if let Some(p) = &c.output {
        config.output.path = Some(p.clone());
    }
    for w in config.validate()?.warnings {
        eprintln!("warning: {}", serde_json::to_string(&w).unwrap_or_default());
    }
    Ok(config)
}

fn emit(config: &RunConfig, text: &str) -> Result<()> {
    match &config.output.path {
        Some(path) => io::write_atomic(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(ORACLE_ABS_FLOOR)
}

fn run(cli: &Cli) -> Result<()> {
    let config = load_config(&cli.common)?;
    let spec = config.potential_spec()?;
    let basis = config.box_basis()?;
    let physics = config.physics();
    let precision = config.output.precision;

    match &cli.command {
        Command::Spectrum => {
            let problem = Problem::build(&spec, &basis, &physics)?;
            let text = match config.output.format {
                Format::Csv => io::spectrum_csv(&problem.spectrum, precision)?,
                Format::Json => io::spectrum_json(&problem.spectrum, io::meta("spectrum", &config), precision)?,
            };
            emit(&config, &text)
        }
        Command::Alpha { oracle } => {
            let problem = Problem::build(&spec, &basis, &physics)?;
            let report = problem.report(physics.charge)?;
            let comparison = if *oracle {
                let fields = &config.oracle.fields;
                let qm = stark_fit_ground(&problem.hamiltonian, &problem.dipole, physics.charge, fields)?;
                let ht = ht_occupied_sum_fit(&problem.hamiltonian, &problem.dipole, physics.charge, fields)?;
                let (s_qm_fit, s_ht_fit) = match (qm.reduced_shift(physics.charge), ht.reduced_shift(physics.charge)) {
                    (Some(a), Some(b)) => (a, b),
                    _ => (0.0, 0.0),
                };
                let rel_diff_qm = relative(s_qm_fit, report.s_qm);
                let rel_diff_ht = relative(s_ht_fit, report.s_ht);
                Some(OracleComparison {
                    fields: fields.clone(),
                    s_qm_fit,
                    s_ht_fit,
                    rel_diff_qm,
                    rel_diff_ht,
                    tolerance_qm: ORACLE_TOL_QM,
                    tolerance_ht: ORACLE_TOL_HT,
                    within_tolerance: rel_diff_qm <= ORACLE_TOL_QM && rel_diff_ht <= ORACLE_TOL_HT,
                })
            } else {
                None
            };
            let text = match config.output.format {
                Format::Csv => io::report_csv(&report, comparison.as_ref(), precision)?,
                Format::Json => io::report_json(&report, comparison.as_ref(), io::meta("alpha", &config), precision)?,
            };
            emit(&config, &text)
        }
        Command::Sweep { depth_min, depth_max, steps, axis, bracket, bracket_tol } => {
            let axis = match axis {
                AxisArg::Vector => SweepAxis::Vector,
                AxisArg::Scalar => SweepAxis::Scalar,
            };
            let depths = linspace(*depth_min, *depth_max, *steps);
            let sweep = depth_sweep_along(axis, &spec, &depths, &basis, &physics)?;
            let mut found = None;
            let mut missing = None;
            if *bracket {
                match sweep.sign_changes().first() {
                    Some(&(i, j)) => {
                        let (lo, hi) = (sweep.rows[i].depth, sweep.rows[j].depth);
                        found = Some(bracket_sign_change(axis, &spec, lo, hi, &basis, &physics, *bracket_tol)?);
                    }
                    None => {
                        let (first, last) = (sweep.rows.first(), sweep.rows.last());
                        missing = Some(Error::NoSignChange {
                            lo: first.map_or(*depth_min, |r| r.depth),
                            hi: last.map_or(*depth_max, |r| r.depth),
                            alpha_lo: first.map_or(f64::NAN, |r| r.alpha_qm),
                            alpha_hi: last.map_or(f64::NAN, |r| r.alpha_qm),
                        });
                    }
                }
            }
            let text = match config.output.format {
                Format::Csv => io::sweep_csv(&sweep, found.as_ref(), precision)?,
                Format::Json => io::sweep_json(&sweep, found.as_ref(), io::meta("sweep", &config), precision)?,
            };
            emit(&config, &text)?;
            if let Some(s) = &sweep.stop {
                eprintln!("sweep stopped at depth {}: {}", s.depth, s.message);
            }
            missing.map_or(Ok(()), Err)
        }
        Command::Converge { modes_list, lengths } => {
            let table = convergence_study(&spec, &physics, modes_list, lengths)?;
            let text = match config.output.format {
                Format::Csv => io::convergence_csv(&table, precision)?,
                Format::Json => io::convergence_json(&table, io::meta("converge", &config), precision)?,
            };
            emit(&config, &text)?;
            for f in table.flags.iter().filter(|f| f.status == ConvergenceStatus::NonConvergent) {
                let note = if f.column == Column::AlphaVacPrime { " (vacuum sum; truncation dependent)" } else { "" };
                eprintln!("flag: {} not converged at L = {}{note}", f.column.name(), f.box_length);
            }
            Ok(())
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("DIRAC_POL_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = e.exit_code();
            if cli.common.error_json {
                let obj = serde_json::json!({"error": e.kind(), "exit_code": code, "message": e.to_string()});
                eprintln!("{obj}");
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(code as u8)
        }
    }
}
