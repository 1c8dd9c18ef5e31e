//! Scenario × temperature sweeps.

use thiserror::Error;

use crate::flowsheet::{solve_scenario, FlowsheetError, ScenarioConfig, ScenarioKind, SystemReport, T_IN_RANGE};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SweepError {
    #[error("temperature grid {0}")]
    Grid(String),
}

/// How the cells of a sweep are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[default]
    Parallel,
    Sequential,
}

/// Inclusive grid `lo, lo + step, ..., hi`.
pub fn temperature_grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>, SweepError> {
    if !(step > 0.0) {
        return Err(SweepError::Grid(format!("step {step} must be positive")));
    }
    if !(hi >= lo) {
        return Err(SweepError::Grid(format!("upper bound {hi} below lower bound {lo}")));
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    let grid: Vec<f64> = (0..=n).map(|i| lo + i as f64 * step).collect();
    check_grid(&grid)?;
    Ok(grid)
}

/// Default grid: 1023 K to 1273 K in 25 K steps.
pub fn default_grid() -> Vec<f64> {
    temperature_grid(T_IN_RANGE.0, T_IN_RANGE.1, 25.0).expect("default grid is valid")
}

pub fn check_grid(grid: &[f64]) -> Result<(), SweepError> {
    if grid.is_empty() {
        return Err(SweepError::Grid("is empty".into()));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(SweepError::Grid("must be strictly increasing".into()));
    }
    for &t in grid {
        if !(T_IN_RANGE.0 - 1e-9..=T_IN_RANGE.1 + 1e-9).contains(&t) {
            return Err(SweepError::Grid(format!("point {t} K outside [{}, {}] K", T_IN_RANGE.0, T_IN_RANGE.1)));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub scenarios: Vec<ScenarioKind>,
    pub temperatures: Vec<f64>,
}

impl SweepSpec {
    pub fn full() -> Self {
        Self { scenarios: ScenarioKind::ALL.to_vec(), temperatures: default_grid() }
    }

    /// Cells in output order: scenario-major, then temperature.
    pub fn cells(&self) -> Vec<(ScenarioKind, f64)> {
        self.scenarios.iter().flat_map(|&k| self.temperatures.iter().map(move |&t| (k, t))).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub kind: ScenarioKind,
    pub t_in: f64,
    pub outcome: Result<SystemReport, FlowsheetError>,
}

fn solve_cell(template: &ScenarioConfig, kind: ScenarioKind, t_in: f64) -> CellResult {
    let mut cfg = template.clone();
    cfg.kind = kind;
    cfg.t_in = t_in;
    CellResult { kind, t_in, outcome: solve_scenario(&cfg) }
}

/// Solves every cell; results come back in [`SweepSpec::cells`] order whatever the execution mode.
pub fn run_sweep(template: &ScenarioConfig, spec: &SweepSpec, exec: Execution) -> Vec<CellResult> {
    let cells = spec.cells();
    match exec {
        Execution::Sequential => cells.iter().map(|&(k, t)| solve_cell(template, k, t)).collect(),
        Execution::Parallel => run_parallel(template, &cells),
    }
}

#[cfg(feature = "parallel")]
fn run_parallel(template: &ScenarioConfig, cells: &[(ScenarioKind, f64)]) -> Vec<CellResult> {
    use rayon::prelude::*;
    cells.par_iter().map(|&(k, t)| solve_cell(template, k, t)).collect()
}

#[cfg(not(feature = "parallel"))]
fn run_parallel(template: &ScenarioConfig, cells: &[(ScenarioKind, f64)]) -> Vec<CellResult> {
    cells.iter().map(|&(k, t)| solve_cell(template, k, t)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_has_eleven_points() {
        let g = default_grid();
        assert_eq!(g.len(), 11);
        assert_eq!(g[0], 1023.0);
        assert_eq!(g[10], 1273.0);
    }

    #[test]
    fn grid_validation() {
        assert!(temperature_grid(1023.0, 1273.0, 0.0).is_err());
        assert!(temperature_grid(1273.0, 1023.0, 25.0).is_err());
        assert!(temperature_grid(900.0, 1023.0, 25.0).is_err());
        assert!(check_grid(&[1100.0, 1100.0]).is_err());
        assert_eq!(temperature_grid(1100.0, 1100.0, 10.0).unwrap(), vec![1100.0]);
    }

    #[test]
    fn full_sweep_is_44_cells() {
        assert_eq!(SweepSpec::full().cells().len(), 44);
    }
}
