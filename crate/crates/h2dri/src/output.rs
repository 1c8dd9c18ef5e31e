//! CSV writers for sweep results, figure data and bed profiles.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::components::Component;
use crate::flowsheet::{ScenarioKind, Side, SystemReport};
use crate::sweep::CellResult;

#[derive(Debug, Error)]
pub enum OutputError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
}

/// Column order of `results.csv`.
pub const RESULTS_HEADER: [&str; 17] = [
    "scenario",
    "T_in_K",
    "n1_mol",
    "n2_mol",
    "eta_H2",
    "T_topgas_K",
    "T_DRI_K",
    "W_in_J",
    "W_out_J",
    "EX_in_J",
    "EX_out_J",
    "CO2_t",
    "CET_J",
    "EE",
    "EXE",
    "EC",
    "eta_ven",
];

fn fmt(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else {
        format!("{v}")
    }
}

fn result_row(cell: &CellResult) -> Vec<String> {
    let mut row = vec![cell.kind.name().to_string(), fmt(cell.t_in)];
    let values = match &cell.outcome {
        Ok(r) => vec![
            r.n1,
            r.n2,
            r.metrics.eta_h2,
            r.t_topgas,
            r.t_dri,
            r.aggregates.w_in,
            r.aggregates.w_out,
            r.aggregates.ex_in,
            r.aggregates.ex_out,
            r.co2_t,
            r.metrics.cet,
            r.metrics.ee,
            r.metrics.exe,
            r.metrics.ec,
            r.metrics.eta_ven,
        ],
        Err(_) => vec![f64::NAN; RESULTS_HEADER.len() - 2],
    };
    row.extend(values.into_iter().map(fmt));
    row
}

fn write_table(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), OutputError> {
    let csv_err = |source| OutputError::Csv { path: path.to_path_buf(), source };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.write_record(r).map_err(csv_err)?;
    }
    w.flush().map_err(|source| OutputError::Io { path: path.to_path_buf(), source })
}

/// EE with the stored top-gas heat, expander and ORC outputs removed.
pub fn ee_without_waste_heat(r: &SystemReport) -> f64 {
    let recovered: f64 = r
        .terms
        .iter()
        .filter(|t| t.side == Side::EnergyOut)
        .filter(|t| matches!(t.source, Component::Expander | Component::Orc | Component::HighTempStoreCharge))
        .map(|t| t.value)
        .sum();
    (r.aggregates.w_out - recovered) / r.aggregates.w_in
}

/// Writes `results.csv`, per-figure files and, for failed cells, `failures.csv`.
/// Returns the paths written, in order.
pub fn write_all(dir: &Path, cells: &[CellResult]) -> Result<Vec<PathBuf>, OutputError> {
    fs::create_dir_all(dir).map_err(|source| OutputError::Io { path: dir.to_path_buf(), source })?;
    let mut written = Vec::new();
    let results = dir.join("results.csv");
    let rows: Vec<Vec<String>> = cells.iter().map(result_row).collect();
    write_table(&results, &RESULTS_HEADER, &rows)?;
    written.push(results);

    let failures: Vec<Vec<String>> = cells
        .iter()
        .filter_map(|c| c.outcome.as_ref().err().map(|e| vec![c.kind.name().to_string(), fmt(c.t_in), e.to_string()]))
        .collect();
    if !failures.is_empty() {
        let p = dir.join("failures.csv");
        write_table(&p, &["scenario", "T_in_K", "error"], &failures)?;
        written.push(p);
    }

    for fig in figures(cells) {
        let p = dir.join(fig.name);
        write_table(&p, &fig.header, &fig.rows)?;
        written.push(p);
    }
    Ok(written)
}

struct Figure {
    name: &'static str,
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

fn of_kind(cells: &[CellResult], kind: ScenarioKind) -> Vec<&CellResult> {
    cells.iter().filter(|c| c.kind == kind).collect()
}

fn per_scenario(
    cells: &[CellResult],
    kind: ScenarioKind,
    name: &'static str,
    header: Vec<&'static str>,
    f: impl Fn(&SystemReport) -> Vec<f64>,
) -> Option<Figure> {
    let sel = of_kind(cells, kind);
    if sel.is_empty() {
        return None;
    }
    let width = header.len() - 1;
    let rows = sel
        .iter()
        .map(|c| {
            let vals = match &c.outcome {
                Ok(r) => f(r),
                Err(_) => vec![f64::NAN; width],
            };
            std::iter::once(fmt(c.t_in)).chain(vals.into_iter().map(fmt)).collect()
        })
        .collect();
    Some(Figure { name, header, rows })
}

/// One column per scenario present, rows by temperature.
fn comparison(
    cells: &[CellResult],
    name: &'static str,
    header: [&'static str; 4],
    f: impl Fn(&SystemReport) -> f64,
) -> Option<Figure> {
    let kinds: Vec<(usize, ScenarioKind)> =
        ScenarioKind::ALL.iter().copied().enumerate().filter(|(_, k)| cells.iter().any(|c| c.kind == *k)).collect();
    if kinds.is_empty() {
        return None;
    }
    let mut temps: Vec<f64> = cells.iter().map(|c| c.t_in).collect();
    temps.sort_by(f64::total_cmp);
    temps.dedup();
    let rows = temps
        .iter()
        .map(|&t| {
            let mut row = vec![fmt(t)];
            for (_, k) in &kinds {
                let v = cells
                    .iter()
                    .find(|c| c.kind == *k && c.t_in == t)
                    .and_then(|c| c.outcome.as_ref().ok())
                    .map(&f)
                    .unwrap_or(f64::NAN);
                row.push(fmt(v));
            }
            row
        })
        .collect();
    let mut h = vec!["T_in_K"];
    h.extend(kinds.iter().map(|(i, _)| header[*i]));
    Some(Figure { name, header: h, rows })
}

fn figures(cells: &[CellResult]) -> Vec<Figure> {
    use ScenarioKind::*;
    let eff = |r: &SystemReport| vec![r.metrics.ee, r.metrics.exe, r.metrics.ec];
    let co = |r: &SystemReport| vec![r.co_heat, r.metrics.cet];
    [
        per_scenario(cells, ZeroCarbon, "fig5_zero_carbon.csv", vec!["T_in_K", "EE", "EXE", "EC"], eff),
        per_scenario(cells, Traditional64, "fig6_trad_64.csv", vec!["T_in_K", "EE", "EXE", "EC"], eff),
        per_scenario(cells, Traditional82, "fig7_trad_82.csv", vec!["T_in_K", "EE", "EXE", "EC"], eff),
        comparison(cells, "fig8_ee_compare.csv", ["EE_zero_carbon", "EE_trad_64", "EE_trad_82", "EE_grid"], |r| {
            r.metrics.ee
        }),
        comparison(cells, "fig9_exe_compare.csv", ["EXE_zero_carbon", "EXE_trad_64", "EXE_trad_82", "EXE_grid"], |r| {
            r.metrics.exe
        }),
        comparison(
            cells,
            "fig10_gas_volume.csv",
            ["gas_zero_carbon_mol", "gas_trad_64_mol", "gas_trad_82_mol", "gas_grid_mol"],
            |r| r.total_gas(),
        ),
        per_scenario(cells, Traditional64, "fig11_co_heat_64.csv", vec!["T_in_K", "CO_heat_J", "CET_J"], co),
        per_scenario(cells, Traditional82, "fig12_co_heat_82.csv", vec!["T_in_K", "CO_heat_J", "CET_J"], co),
        per_scenario(cells, ZeroCarbon, "fig13_waste_heat.csv", vec!["T_in_K", "EE", "EE_no_waste_heat"], |r| {
            vec![r.metrics.ee, ee_without_waste_heat(r)]
        }),
        comparison(cells, "fig14_ec_compare.csv", ["EC_zero_carbon", "EC_trad_64", "EC_trad_82", "EC_grid"], |r| {
            r.metrics.ec
        }),
        per_scenario(
            cells,
            ZeroCarbon,
            "fig15_orc_vs_topgas.csv",
            vec!["T_in_K", "ORC_J", "expander_J", "ORC_plus_expander_J", "topgas_recovery_J"],
            |r| {
                vec![
                    r.orc_electricity,
                    r.expander_electricity,
                    r.orc_electricity + r.expander_electricity,
                    r.topgas_recovery,
                ]
            },
        ),
        per_scenario(cells, Grid, "fig16_grid.csv", vec!["T_in_K", "EE", "EXE", "EC", "CO2_t", "CET_J"], |r| {
            vec![r.metrics.ee, r.metrics.exe, r.metrics.ec, r.co2_t, r.metrics.cet]
        }),
    ]
    .into_iter()
    .flatten()
    .collect()
}

/// Writes `profiles/<scenario>_<T>.csv` with columns `z,T_gas,T_solid` for each solved cell.
pub fn write_profiles(dir: &Path, cells: &[CellResult]) -> Result<Vec<PathBuf>, OutputError> {
    let pdir = dir.join("profiles");
    fs::create_dir_all(&pdir).map_err(|source| OutputError::Io { path: pdir.clone(), source })?;
    let mut written = Vec::new();
    for c in cells {
        let Ok(r) = &c.outcome else { continue };
        let p = pdir.join(format!("{}_{}.csv", c.kind.name(), fmt(c.t_in)));
        let rows: Vec<Vec<String>> = r.kinetics.profile.rows().map(|(z, g, s)| vec![fmt(z), fmt(g), fmt(s)]).collect();
        write_table(&p, &["z", "T_gas", "T_solid"], &rows)?;
        written.push(p);
    }
    Ok(written)
}
