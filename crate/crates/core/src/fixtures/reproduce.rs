//! Recompute printed cells from the library and report deviations.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::{lambda_column, load_table, state_column, Table};
use crate::error::Result;
use crate::information::{CRAMER_RAO_BOUND, FISHER_PRODUCT_BOUND};
use crate::model::{State, DEFAULT_D0};
use crate::observables::{default_integrator, uncertainty_bound, KineticMode, StateObservables};
use crate::quadrature::{Integrator, QuadratureConfig};
use crate::spectrum;

/// Evenly spaced `d0` values, both ends included.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct D0Grid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl Default for D0Grid {
    fn default() -> Self {
        Self {
            start: -0.5,
            stop: 0.5,
            points: 1201,
        }
    }
}

impl D0Grid {
    pub fn values(&self) -> Vec<f64> {
        match self.points {
            0 => Vec::new(),
            1 => vec![self.start],
            k => {
                let h = (self.stop - self.start) / (k - 1) as f64;
                (0..k).map(|i| self.start + i as f64 * h).collect()
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReproductionSettings {
    pub d0: f64,
    /// Kinetic convention that the d0 fit is scored in.
    pub mode: KineticMode,
    pub quadrature: QuadratureConfig,
    /// `None` skips the fit.
    pub d0_grid: Option<D0Grid>,
}

impl Default for ReproductionSettings {
    fn default() -> Self {
        Self {
            d0: DEFAULT_D0,
            mode: KineticMode::Printed,
            quadrature: *default_integrator().config(),
            d0_grid: Some(D0Grid::default()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Quantity {
    RInv2,
    R2,
    P2,
    Product2,
    DeltaR,
    DeltaP,
    DeltaProduct,
    FisherRho,
    FisherGamma,
    FisherProduct,
    CramerRao,
    Bound(u32),
}

impl Quantity {
    fn kinetic(self) -> bool {
        matches!(
            self,
            Self::P2
                | Self::Product2
                | Self::DeltaP
                | Self::DeltaProduct
                | Self::FisherRho
                | Self::FisherProduct
                | Self::CramerRao
        )
    }

    fn needs_quadrature(self) -> bool {
        !matches!(self, Self::RInv2 | Self::Bound(_))
    }

    fn eval(self, state: &State, obs: Option<&StateObservables>, mode: KineticMode) -> f64 {
        let r2 = obs.map_or(f64::NAN, |o| o.r2);
        let p2 = obs.map_or(f64::NAN, |o| o.kinetic.get(mode));
        match self {
            Self::RInv2 => spectrum::r_inverse_squared(state),
            Self::R2 => r2,
            Self::P2 => p2,
            Self::Product2 => r2 * p2,
            Self::DeltaR => r2.sqrt(),
            Self::DeltaP => p2.sqrt(),
            Self::DeltaProduct => (r2 * p2).sqrt(),
            Self::FisherRho => 4.0 * p2,
            Self::FisherGamma => 4.0 * r2,
            Self::FisherProduct => 4.0 * p2 * 4.0 * r2,
            Self::CramerRao => 4.0 * p2 * r2,
            Self::Bound(_) => f64::NAN,
        }
    }
}

struct CellSpec {
    row: usize,
    column: String,
    n: u32,
    l: u32,
    lambda: f64,
    alpha: f64,
    quantity: Quantity,
    printed: Option<f64>,
}

fn bound_value(table_id: u8, l: u32) -> f64 {
    match table_id {
        2..=6 => uncertainty_bound(l),
        9 => f64::from(l) + 1.5,
        10..=14 => FISHER_PRODUCT_BOUND,
        _ => CRAMER_RAO_BOUND,
    }
}

fn quantity_for(table_id: u8, column: &str, l: u32) -> Option<Quantity> {
    if column.starts_with("min_") {
        return Some(Quantity::Bound(l));
    }
    Some(match (table_id, column) {
        (1, "r_inv2") => Quantity::RInv2,
        (2..=6, "r2") => Quantity::R2,
        (2..=6, "p2") => Quantity::P2,
        (2..=6, "product2") => Quantity::Product2,
        (7, _) => Quantity::DeltaR,
        (8, _) => Quantity::DeltaP,
        (9, _) => Quantity::DeltaProduct,
        (10..=14, "fisher_rho") => Quantity::FisherRho,
        (10..=14, "fisher_gamma") => Quantity::FisherGamma,
        (10..=14, "fisher_product") => Quantity::FisherProduct,
        (15, _) => Quantity::CramerRao,
        _ => return None,
    })
}

fn cell_specs(table: &Table) -> Vec<CellSpec> {
    let mut out = Vec::new();
    for (i, row) in table.rows.iter().enumerate() {
        for col in &row.columns {
            if matches!(col.name.as_str(), "n" | "l" | "lambda") {
                continue;
            }
            // Column names carry the state in Table 15 and λ in Tables 7–9.
            let (n, l) = state_column(&col.name)
                .or_else(|| row.n.zip(row.l))
                .unwrap_or((0, 0));
            let lambda = lambda_column(&col.name).or(row.lambda);
            let Some(lambda) = lambda else { continue };
            let Some(quantity) = quantity_for(table.id, &col.name, l) else {
                continue;
            };
            if col.value.is_none() {
                continue;
            }
            out.push(CellSpec {
                row: i,
                column: col.name.clone(),
                n,
                l,
                lambda,
                alpha: row.alpha,
                quantity,
                printed: col.value,
            });
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellDeviation {
    pub row: usize,
    pub column: String,
    pub n: u32,
    pub l: u32,
    pub lambda: f64,
    pub alpha: f64,
    /// Set for cells that depend on the kinetic convention.
    pub mode: Option<KineticMode>,
    pub printed: Option<f64>,
    pub computed: Option<f64>,
    /// computed − printed.
    pub abs_dev: Option<f64>,
    pub rel_dev: Option<f64>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ColumnSummary {
    pub column: String,
    pub mode: Option<KineticMode>,
    pub cells: usize,
    pub max_abs_dev: f64,
    pub max_rel_dev: f64,
    pub rms_rel_dev: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct D0Fit {
    pub grid: D0Grid,
    pub mode: KineticMode,
    /// Printed cells scored.
    pub cells: usize,
    pub best_d0: f64,
    pub best_rms_rel_dev: f64,
    pub rms_rel_dev_at_setting: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeviationReport {
    pub table_id: u8,
    pub caption: String,
    pub d0: f64,
    pub mode: KineticMode,
    pub cells: Vec<CellDeviation>,
    pub columns: Vec<ColumnSummary>,
    /// Present when the table has ℓ > 0 states and the mode depends on the
    /// energy.
    pub d0_fit: Option<D0Fit>,
}

impl DeviationReport {
    pub fn column(&self, name: &str, mode: Option<KineticMode>) -> Option<&ColumnSummary> {
        self.columns
            .iter()
            .find(|c| c.column == name && c.mode == mode)
    }

    pub fn cells_in(&self, name: &str, mode: Option<KineticMode>) -> Vec<&CellDeviation> {
        self.cells
            .iter()
            .filter(|c| c.column == name && c.mode == mode)
            .collect()
    }

    pub fn errors(&self) -> impl Iterator<Item = &CellDeviation> {
        self.cells.iter().filter(|c| c.error.is_some())
    }
}

type Key = (u32, u32, u64, u64);

fn key(n: u32, l: u32, lambda: f64, alpha: f64) -> Key {
    (n, l, lambda.to_bits(), alpha.to_bits())
}

struct Solved {
    state: std::result::Result<State, String>,
    obs: Option<std::result::Result<StateObservables, String>>,
}

fn solve_states(specs: &[CellSpec], d0: f64, integ: &Integrator) -> BTreeMap<Key, Solved> {
    let mut wanted: BTreeMap<Key, (u32, u32, f64, f64, bool)> = BTreeMap::new();
    for c in specs {
        if matches!(c.quantity, Quantity::Bound(_)) {
            continue;
        }
        let e = wanted
            .entry(key(c.n, c.l, c.lambda, c.alpha))
            .or_insert((c.n, c.l, c.lambda, c.alpha, false));
        e.4 |= c.quantity.needs_quadrature();
    }
    let list: Vec<_> = wanted.into_iter().collect();
    list.into_par_iter()
        .map(|(k, (n, l, lambda, alpha, quad))| {
            let state = State::table(lambda, alpha, n, l)
                .map(|s| s.with_d0(d0))
                .map_err(|e| e.to_string());
            let obs = match (&state, quad) {
                (Ok(s), true) => Some(
                    StateObservables::compute(s, integ, KineticMode::Printed)
                        .map_err(|e| e.to_string()),
                ),
                _ => None,
            };
            (k, Solved { state, obs })
        })
        .collect()
}

fn deviation(
    spec: &CellSpec,
    table_id: u8,
    solved: Option<&Solved>,
    mode: Option<KineticMode>,
) -> CellDeviation {
    let (computed, error) = match spec.quantity {
        Quantity::Bound(l) => (Some(bound_value(table_id, l)), None),
        q => match solved {
            None => (None, Some("state not solved".to_string())),
            Some(Solved { state: Err(e), .. }) => (None, Some(e.clone())),
            Some(Solved {
                obs: Some(Err(e)), ..
            }) => (None, Some(e.clone())),
            Some(Solved { state: Ok(s), obs }) => {
                let o = obs.as_ref().and_then(|o| o.as_ref().ok());
                let v = q.eval(s, o, mode.unwrap_or(KineticMode::Printed));
                if v.is_finite() {
                    (Some(v), None)
                } else {
                    (None, Some(format!("non-finite value {v}")))
                }
            }
        },
    };
    let abs_dev = computed.zip(spec.printed).map(|(c, p)| c - p);
    let rel_dev = abs_dev.zip(spec.printed).map(|(d, p)| d / p.abs());
    CellDeviation {
        row: spec.row,
        column: spec.column.clone(),
        n: spec.n,
        l: spec.l,
        lambda: spec.lambda,
        alpha: spec.alpha,
        mode,
        printed: spec.printed,
        computed,
        abs_dev,
        rel_dev,
        error,
    }
}

fn summarize(header: &[String], cells: &[CellDeviation]) -> Vec<ColumnSummary> {
    let mut out = Vec::new();
    let mut modes = vec![None];
    modes.extend(KineticMode::ALL.iter().copied().map(Some));
    for name in header {
        for &mode in &modes {
            let devs: Vec<(f64, f64)> = cells
                .iter()
                .filter(|c| &c.column == name && c.mode == mode)
                .filter_map(|c| c.abs_dev.zip(c.rel_dev))
                .collect();
            if devs.is_empty() {
                continue;
            }
            let max_abs = devs.iter().map(|d| d.0.abs()).fold(0.0, f64::max);
            let max_rel = devs.iter().map(|d| d.1.abs()).fold(0.0, f64::max);
            let rms = (devs.iter().map(|d| d.1 * d.1).sum::<f64>() / devs.len() as f64).sqrt();
            out.push(ColumnSummary {
                column: name.clone(),
                mode,
                cells: devs.len(),
                max_abs_dev: max_abs,
                max_rel_dev: max_rel,
                rms_rel_dev: rms,
            });
        }
    }
    out
}

fn rms_for_d0(
    specs: &[&CellSpec],
    solved: &BTreeMap<Key, Solved>,
    d0: f64,
    mode: KineticMode,
) -> Option<f64> {
    let mut sum = 0.0;
    let mut count = 0usize;
    for spec in specs {
        let Some(Solved {
            state: Ok(s),
            obs: Some(Ok(o)),
        }) = solved.get(&key(spec.n, spec.l, spec.lambda, spec.alpha))
        else {
            continue;
        };
        let shifted = s.with_d0(d0);
        let o = o.with_energy_of(&shifted);
        let v = spec.quantity.eval(&shifted, Some(&o), mode);
        let Some(p) = spec.printed else { continue };
        if !v.is_finite() {
            return None;
        }
        let r = (v - p) / p.abs();
        sum += r * r;
        count += 1;
    }
    (count > 0).then(|| (sum / count as f64).sqrt())
}

fn fit_d0(
    specs: &[CellSpec],
    solved: &BTreeMap<Key, Solved>,
    settings: &ReproductionSettings,
) -> Option<D0Fit> {
    let grid = settings.d0_grid?;
    if settings.mode == KineticMode::Derivative {
        return None;
    }
    let scored: Vec<&CellSpec> = specs
        .iter()
        .filter(|s| s.quantity.kinetic() && s.printed.is_some())
        .collect();
    if !scored.iter().any(|s| s.l > 0) {
        return None;
    }
    let at_setting = rms_for_d0(&scored, solved, settings.d0, settings.mode)?;
    let (best_d0, best) = grid
        .values()
        .into_par_iter()
        .filter_map(|d0| rms_for_d0(&scored, solved, d0, settings.mode).map(|r| (d0, r)))
        .collect::<Vec<_>>()
        .into_iter()
        .fold(
            (f64::NAN, f64::INFINITY),
            |acc, x| if x.1 < acc.1 { x } else { acc },
        );
    if !best.is_finite() {
        return None;
    }
    Some(D0Fit {
        grid,
        mode: settings.mode,
        cells: scored.len(),
        best_d0,
        best_rms_rel_dev: best,
        rms_rel_dev_at_setting: at_setting,
    })
}

/// Recompute every printed cell of `table` with the library.
///
/// Convention-dependent cells appear once per kinetic mode. Failures to
/// solve a state are recorded in the cell rather than returned.
pub fn reproduce_table(table: &Table, settings: &ReproductionSettings) -> Result<DeviationReport> {
    let integ = Integrator::new(settings.quadrature)?;
    let specs = cell_specs(table);
    let solved = solve_states(&specs, settings.d0, &integ);
    let mut cells = Vec::new();
    for spec in &specs {
        let got = solved.get(&key(spec.n, spec.l, spec.lambda, spec.alpha));
        if spec.quantity.kinetic() {
            for mode in KineticMode::ALL {
                cells.push(deviation(spec, table.id, got, Some(mode)));
            }
        } else {
            cells.push(deviation(spec, table.id, got, None));
        }
    }
    let columns = summarize(&table.header, &cells);
    let d0_fit = fit_d0(&specs, &solved, settings);
    Ok(DeviationReport {
        table_id: table.id,
        caption: table.caption.clone(),
        d0: settings.d0,
        mode: settings.mode,
        cells,
        columns,
        d0_fit,
    })
}

/// [`reproduce_table`] on an embedded fixture.
pub fn reproduction_report(
    table_id: u8,
    settings: &ReproductionSettings,
) -> Result<DeviationReport> {
    reproduce_table(&load_table(table_id)?, settings)
}
