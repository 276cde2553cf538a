//! Command-line front end shared by the `ptinfo` binary and its tests.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fixtures::{
    self, reproduce_table, validate_identities, D0Grid, DeviationReport, FixtureSet, IdentityCheck,
    ReproductionSettings,
};
use crate::information::{fisher_momentum, fisher_position};
use crate::model::{PotentialParams, QuantumNumbers, State, DEFAULT_D0};
use crate::observables::{uncertainty_report, KineticMode, StateObservables};
use crate::quadrature::{Integrator, QuadratureConfig};
use crate::spectrum;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "ptinfo",
    version,
    about = "Bound states, uncertainty and Fisher information for the tanh² well"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Well width parameter α [default: 1, or 0.1 for figure1]
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    #[arg(long, global = true, default_value_t = 1.0)]
    pub hbar: f64,
    /// Twice the reduced mass
    #[arg(long = "two-mu", global = true, default_value_t = 1.0)]
    pub two_mu: f64,
    /// Constant of the centrifugal approximation
    #[arg(long, global = true, default_value_t = DEFAULT_D0)]
    pub d0: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write to a file instead of standard output
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long = "rel-tol", global = true, default_value_t = 1e-10)]
    pub rel_tol: f64,
    /// Gauss-Legendre points per panel
    #[arg(long = "panel-order", global = true, default_value_t = 32)]
    pub panel_order: usize,
    /// Kinetic convention for ⟨p²⟩ and everything derived from it
    #[arg(long = "p2-mode", global = true, default_value = "printed")]
    pub p2_mode: KineticMode,
}

#[derive(Debug, Clone, Args)]
pub struct StateArgs {
    #[arg(long, default_value_t = 0)]
    pub n: u32,
    #[arg(long, default_value_t = 0)]
    pub l: u32,
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    pub m: i32,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Observables for one state
    State {
        #[arg(long)]
        lambda: f64,
        #[command(flatten)]
        state: StateArgs,
    },
    /// One row per λ on a closed grid
    Sweep {
        #[arg(long)]
        start: f64,
        #[arg(long)]
        stop: f64,
        #[arg(long)]
        step: f64,
        #[command(flatten)]
        state: StateArgs,
    },
    /// Recompute a published table next to its fixture values
    Table {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=15))]
        id: u8,
        /// Skip the d0 grid fit
        #[arg(long = "no-fit")]
        no_fit: bool,
        #[arg(long = "d0-start", default_value_t = -0.5, allow_negative_numbers = true)]
        d0_start: f64,
        #[arg(long = "d0-stop", default_value_t = 0.5, allow_negative_numbers = true)]
        d0_stop: f64,
        #[arg(long = "d0-points", default_value_t = 1201)]
        d0_points: usize,
    },
    /// Check identities among the fixture tables
    Validate {
        /// Read table_NN.csv files from this directory
        #[arg(long)]
        fixtures: Option<PathBuf>,
        /// Only run the identity checks
        #[arg(long = "skip-reproduction")]
        skip_reproduction: bool,
    },
    /// ⟨r⁻²⟩ against λ at α = 0.1
    Figure1 {
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        l: Option<u32>,
        #[arg(long, default_value_t = 10.0)]
        start: f64,
        #[arg(long, default_value_t = 200.0)]
        stop: f64,
        #[arg(long, default_value_t = 1.0)]
        step: f64,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub enum Task {
    State {
        lambda: f64,
        quantum: QuantumNumbers,
    },
    Sweep {
        lambdas: Vec<f64>,
        quantum: QuantumNumbers,
    },
    Table {
        id: u8,
        d0_grid: Option<D0Grid>,
    },
    Validate {
        fixtures: Option<PathBuf>,
        reproduction: bool,
    },
    Figure1 {
        lambdas: Vec<f64>,
        states: Vec<(u32, u32)>,
    },
}

/// Fully resolved invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub task: Task,
    pub alpha: f64,
    pub hbar: f64,
    pub two_mu: f64,
    pub d0: f64,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub quadrature: QuadratureConfig,
    pub p2_mode: KineticMode,
}

/// Closed grid `start, start + step, …` up to `stop`, by index so that the
/// endpoint is not lost to accumulated rounding.
pub fn lambda_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::InvalidParameter {
            name: "step",
            value: step,
        });
    }
    if !(start.is_finite() && stop.is_finite() && stop >= start) {
        return Err(Error::InvalidParameter {
            name: "stop",
            value: stop,
        });
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self> {
        let c = cli.common;
        let default_alpha = match cli.command {
            Command::Figure1 { .. } => 0.1,
            _ => 1.0,
        };
        let task = match cli.command {
            Command::State { lambda, state } => Task::State {
                lambda,
                quantum: QuantumNumbers::new(state.n, state.l, state.m)?,
            },
            Command::Sweep {
                start,
                stop,
                step,
                state,
            } => Task::Sweep {
                lambdas: lambda_grid(start, stop, step)?,
                quantum: QuantumNumbers::new(state.n, state.l, state.m)?,
            },
            Command::Table {
                id,
                no_fit,
                d0_start,
                d0_stop,
                d0_points,
            } => Task::Table {
                id,
                d0_grid: (!no_fit).then_some(D0Grid {
                    start: d0_start,
                    stop: d0_stop,
                    points: d0_points,
                }),
            },
            Command::Validate {
                fixtures,
                skip_reproduction,
            } => Task::Validate {
                fixtures,
                reproduction: !skip_reproduction,
            },
            Command::Figure1 {
                n,
                l,
                start,
                stop,
                step,
            } => {
                let states = match (n, l) {
                    (None, None) => figure1_states()?,
                    (n, l) => vec![(n.unwrap_or(0), l.unwrap_or(0))],
                };
                Task::Figure1 {
                    lambdas: lambda_grid(start, stop, step)?,
                    states,
                }
            }
        };
        let quadrature = QuadratureConfig {
            order: c.panel_order,
            rel_tol: c.rel_tol,
            abs_tol: 0.0,
            ..QuadratureConfig::default()
        };
        Ok(Self {
            task,
            alpha: c.alpha.unwrap_or(default_alpha),
            hbar: c.hbar,
            two_mu: c.two_mu,
            d0: c.d0,
            format: c.format,
            output: c.output,
            quadrature,
            p2_mode: c.p2_mode,
        })
    }

    pub fn params(&self, lambda: f64) -> Result<PotentialParams> {
        PotentialParams::new(lambda, self.alpha, self.hbar, 0.5 * self.two_mu)
    }

    pub fn state(&self, lambda: f64, quantum: QuantumNumbers) -> Result<State> {
        State::new(self.params(lambda)?, quantum, self.d0)
    }
}

/// The (n, ℓ) pairs listed in Table 1.
fn figure1_states() -> Result<Vec<(u32, u32)>> {
    let t = fixtures::load_table(1)?;
    Ok(t.rows.iter().filter_map(|r| r.n.zip(r.l)).collect())
}

/// One output row of `state` and `sweep`. Field order is the CSV schema.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StateRow {
    pub lambda: f64,
    pub alpha: f64,
    pub n: u32,
    pub l: u32,
    pub energy: f64,
    pub r_inv2_hft: f64,
    pub r_inv2_numeric: f64,
    pub r2: f64,
    pub tanh2: f64,
    pub p2_identity: f64,
    pub p2_derivative: f64,
    pub delta_r: f64,
    pub delta_p: f64,
    pub product2: f64,
    pub bound: f64,
    pub squeezed: bool,
    pub fisher_rho: f64,
    /// Empty for m ≠ 0.
    pub fisher_gamma: Option<f64>,
    pub fisher_product: Option<f64>,
    pub cramer_rao: Option<f64>,
    pub p2_printed: f64,
}

pub const STATE_COLUMNS: [&str; 21] = [
    "lambda",
    "alpha",
    "n",
    "l",
    "energy",
    "r_inv2_hft",
    "r_inv2_numeric",
    "r2",
    "tanh2",
    "p2_identity",
    "p2_derivative",
    "delta_r",
    "delta_p",
    "product2",
    "bound",
    "squeezed",
    "fisher_rho",
    "fisher_gamma",
    "fisher_product",
    "cramer_rao",
    "p2_printed",
];

pub fn state_row(state: &State, integrator: &Integrator, mode: KineticMode) -> Result<StateRow> {
    let obs = StateObservables::compute(state, integrator, mode)?;
    let unc = uncertainty_report(state, &obs);
    let rho = fisher_position(state, &obs);
    let gamma = fisher_momentum(state, &obs).ok();
    Ok(StateRow {
        lambda: state.params.lambda,
        alpha: state.params.alpha,
        n: state.quantum.n,
        l: state.quantum.l,
        energy: obs.energy,
        r_inv2_hft: obs.r_inv2_hft,
        r_inv2_numeric: obs.r_inv2_numeric,
        r2: obs.r2,
        tanh2: obs.tanh2,
        p2_identity: obs.kinetic.identity,
        p2_derivative: obs.kinetic.derivative,
        delta_r: unc.delta_r,
        delta_p: unc.delta_p,
        product2: unc.product2,
        bound: unc.bound,
        squeezed: unc.squeezed,
        fisher_rho: rho,
        fisher_gamma: gamma,
        fisher_product: gamma.map(|g| rho * g),
        cramer_rao: gamma.map(|_| rho * obs.r2),
        p2_printed: obs.kinetic.printed,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Figure1Row {
    pub lambda: f64,
    pub alpha: f64,
    pub n: u32,
    pub l: u32,
    pub r_inv2: f64,
    /// Large-λ slope α/(2√ζ).
    pub slope_limit: f64,
}

#[derive(Serialize)]
struct CheckRow<'a> {
    kind: &'static str,
    table: u8,
    source_table: Option<u8>,
    column: &'a str,
    n: Option<u32>,
    l: Option<u32>,
    lambda: Option<f64>,
    printed: f64,
    expected: f64,
    residual: f64,
    rel_residual: f64,
    tol_rel: Option<f64>,
    tol_abs: Option<f64>,
    pass: bool,
    note: Option<&'a str>,
}

impl<'a> From<&'a IdentityCheck> for CheckRow<'a> {
    fn from(c: &'a IdentityCheck) -> Self {
        Self {
            kind: c.kind.as_str(),
            table: c.table_id,
            source_table: c.source_table,
            column: &c.column,
            n: c.n,
            l: c.l,
            lambda: c.lambda,
            printed: c.printed,
            expected: c.expected,
            residual: c.residual,
            rel_residual: c.rel_residual,
            tol_rel: c.tolerance.map(|t| t.rel),
            tol_abs: c.tolerance.map(|t| t.abs),
            pass: c.pass,
            note: c.note.as_deref(),
        }
    }
}

#[derive(Serialize)]
struct CellRow<'a> {
    table: u8,
    row: usize,
    column: &'a str,
    n: u32,
    l: u32,
    lambda: f64,
    alpha: f64,
    mode: Option<&'static str>,
    printed: Option<f64>,
    computed: Option<f64>,
    abs_dev: Option<f64>,
    rel_dev: Option<f64>,
    error: Option<&'a str>,
}

fn cell_rows(report: &DeviationReport) -> Vec<CellRow<'_>> {
    report
        .cells
        .iter()
        .map(|c| CellRow {
            table: report.table_id,
            row: c.row,
            column: &c.column,
            n: c.n,
            l: c.l,
            lambda: c.lambda,
            alpha: c.alpha,
            mode: c.mode.map(KineticMode::as_str),
            printed: c.printed,
            computed: c.computed,
            abs_dev: c.abs_dev,
            rel_dev: c.rel_dev,
            error: c.error.as_deref(),
        })
        .collect()
}

/// Reproduction summary without the per-cell detail.
#[derive(Serialize)]
struct ReproductionSummary<'a> {
    table_id: u8,
    columns: &'a [fixtures::ColumnSummary],
    d0_fit: &'a Option<fixtures::D0Fit>,
    errors: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Success,
    /// `validate` found identity failures.
    IdentityFailure,
}

impl Outcome {
    pub fn exit_code(self) -> u8 {
        match self {
            Self::Success => 0,
            Self::IdentityFailure => 1,
        }
    }
}

fn write_records<T: Serialize>(format: Format, rows: &[T], out: &mut dyn Write) -> Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for r in rows {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, rows)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

/// Execute `config`, writing the report to `out` and diagnostics to `err`.
pub fn run(config: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> Result<Outcome> {
    let integ = Integrator::new(config.quadrature)?;
    match &config.task {
        Task::State { lambda, quantum } => {
            let state = config.state(*lambda, *quantum)?;
            let row = state_row(&state, &integ, config.p2_mode)?;
            write_records(config.format, &[row], out)?;
        }
        Task::Sweep { lambdas, quantum } => {
            let rows: Vec<Option<StateRow>> = lambdas
                .par_iter()
                .map(|&lambda| match config.state(lambda, *quantum) {
                    Ok(s) => state_row(&s, &integ, config.p2_mode).map(Some),
                    Err(Error::NotBound { .. }) => Ok(None),
                    Err(e) => Err(e),
                })
                .collect::<Result<_>>()?;
            let skipped = rows.iter().filter(|r| r.is_none()).count();
            if skipped > 0 {
                writeln!(
                    err,
                    "sweep: skipped {skipped} λ values where the state is not bound"
                )?;
            }
            let rows: Vec<StateRow> = rows.into_iter().flatten().collect();
            write_records(config.format, &rows, out)?;
        }
        Task::Table { id, d0_grid } => {
            let settings = ReproductionSettings {
                d0: config.d0,
                mode: config.p2_mode,
                quadrature: config.quadrature,
                d0_grid: *d0_grid,
            };
            let table = fixtures::load_table(*id)?;
            let report = reproduce_table(&table, &settings)?;
            match config.format {
                Format::Csv => write_records(Format::Csv, &cell_rows(&report), out)?,
                Format::Json => {
                    serde_json::to_writer_pretty(&mut *out, &report)?;
                    writeln!(out)?;
                }
            }
            if let Some(fit) = &report.d0_fit {
                writeln!(
                    err,
                    "table {id}: best d0 = {:.6} (rms rel dev {:.3e}; {:.3e} at d0 = {})",
                    fit.best_d0, fit.best_rms_rel_dev, fit.rms_rel_dev_at_setting, report.d0
                )?;
            }
        }
        Task::Validate {
            fixtures: dir,
            reproduction,
        } => {
            let set = match dir {
                Some(d) => FixtureSet::from_dir(d)?,
                None => FixtureSet::embedded()?,
            };
            let report = validate_identities(&set);
            let settings = ReproductionSettings {
                d0: config.d0,
                mode: config.p2_mode,
                quadrature: config.quadrature,
                d0_grid: Some(D0Grid::default()),
            };
            let reproductions: Vec<DeviationReport> = if *reproduction {
                set.tables
                    .iter()
                    .map(|t| reproduce_table(t, &settings))
                    .collect::<Result<_>>()?
            } else {
                Vec::new()
            };
            let checks: Vec<CheckRow> = report.checks.iter().map(CheckRow::from).collect();
            match config.format {
                Format::Csv => write_records(Format::Csv, &checks, out)?,
                Format::Json => {
                    let summaries: Vec<ReproductionSummary> = reproductions
                        .iter()
                        .map(|r| ReproductionSummary {
                            table_id: r.table_id,
                            columns: &r.columns,
                            d0_fit: &r.d0_fit,
                            errors: r.errors().count(),
                        })
                        .collect();
                    let doc = serde_json::json!({
                        "identities": checks,
                        "reproduction": summaries,
                    });
                    serde_json::to_writer_pretty(&mut *out, &doc)?;
                    writeln!(out)?;
                }
            }
            let (passed, total) = report.count();
            writeln!(err, "validate: {passed}/{total} identity checks passed")?;
            for c in report.failures() {
                write!(
                    err,
                    "  FAIL {}: printed {} expected {:.6} (rel {:.2e})",
                    c.label(),
                    c.printed,
                    c.expected,
                    c.rel_residual
                )?;
                match &c.note {
                    Some(note) => writeln!(err, "; {note}")?,
                    None => writeln!(err)?,
                }
            }
            for r in &reproductions {
                for s in &r.columns {
                    let mode = s.mode.map_or(String::new(), |m| format!(" [{m}]"));
                    writeln!(
                        err,
                        "  table {} {}{}: max rel dev {:.3e} over {} cells",
                        r.table_id, s.column, mode, s.max_rel_dev, s.cells
                    )?;
                }
            }
            if !report.all_passed() {
                return Ok(Outcome::IdentityFailure);
            }
        }
        Task::Figure1 { lambdas, states } => {
            let rows: Vec<Vec<Figure1Row>> = lambdas
                .par_iter()
                .map(|&lambda| {
                    states
                        .iter()
                        .map(|&(n, l)| {
                            let s = config.state(lambda, QuantumNumbers::nl(n, l))?;
                            Ok(Figure1Row {
                                lambda,
                                alpha: config.alpha,
                                n,
                                l,
                                r_inv2: spectrum::r_inverse_squared(&s),
                                slope_limit: spectrum::r_inverse_squared_slope_limit(&s),
                            })
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<_>>()?;
            let rows: Vec<Figure1Row> = rows.into_iter().flatten().collect();
            write_records(config.format, &rows, out)?;
        }
    }
    Ok(Outcome::Success)
}
