//! Scenario configuration files.
//!
//! ```text
//! # comment
//! [scenario]
//! kind = zero-carbon
//! t_in = 1273
//!
//! [properties]
//! file = props.dat      # relative to the config file
//! H2.cp = 29.5
//! ```
//!
//! Unknown sections or keys are errors.

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::flowsheet::{ScenarioConfig, ScenarioKind};
use crate::thermo::{PropertyTable, Species};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("{path}:{line}: {msg}")]
    Line { path: String, line: usize, msg: String },
    #[error("{path}: {msg}")]
    File { path: String, msg: String },
}

/// Parsed configuration: a template that sweep cells clone and adjust.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigFile {
    pub template: ScenarioConfig,
    /// Whether the file set `scenario.kind` explicitly.
    pub kind_set: bool,
}

pub fn load(path: &Path) -> Result<ConfigFile, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::File { path: path.display().to_string(), msg: e.to_string() })?;
    parse(&text, &path.display().to_string(), path.parent())
}

struct Entry<'a> {
    line: usize,
    section: &'a str,
    key: &'a str,
    value: &'a str,
}

/// Parses config text; `base_dir` resolves relative property-file paths.
pub fn parse(text: &str, origin: &str, base_dir: Option<&Path>) -> Result<ConfigFile, ConfigError> {
    let fail = |line: usize, msg: String| ConfigError::Line { path: origin.to_string(), line, msg };
    let mut section = "";
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| fail(i + 1, format!("unterminated section header `{line}`")))?
                .trim();
            if !SECTIONS.contains(&name) {
                return Err(fail(i + 1, format!("unknown section `[{name}]`")));
            }
            section = name;
            continue;
        }
        let (key, value) =
            line.split_once('=').ok_or_else(|| fail(i + 1, format!("expected `key = value`, found `{line}`")))?;
        if section.is_empty() {
            return Err(fail(i + 1, "key outside of any section".into()));
        }
        entries.push(Entry { line: i + 1, section, key: key.trim(), value: value.trim() });
    }

    let mut cfg = ScenarioConfig::new(ScenarioKind::ZeroCarbon);
    // The property file comes first so later overrides apply on top of it.
    for e in entries.iter().filter(|e| e.section == "properties" && e.key == "file") {
        let mut p = PathBuf::from(e.value);
        if p.is_relative() {
            if let Some(dir) = base_dir {
                p = dir.join(p);
            }
        }
        let props = PropertyTable::from_file(&p).map_err(|err| fail(e.line, err.to_string()))?;
        cfg = rebase(cfg, props);
    }
    let mut kind_set = false;
    for e in &entries {
        if e.section == "properties" && e.key == "file" {
            continue;
        }
        if e.section == "scenario" && e.key == "kind" {
            kind_set = true;
        }
        apply(&mut cfg, e).map_err(|msg| fail(e.line, msg))?;
    }
    Ok(ConfigFile { template: cfg, kind_set })
}

const SECTIONS: [&str; 15] = [
    "scenario",
    "properties",
    "furnace",
    "bed",
    "electrolyzer",
    "storage",
    "compressor",
    "expander",
    "orc",
    "lt_store",
    "ht_store",
    "plasma",
    "combustion",
    "carbon",
    "solver",
];

/// Swaps the property table and refreshes defaults derived from it.
fn rebase(mut cfg: ScenarioConfig, props: PropertyTable) -> ScenarioConfig {
    let r32 = props.get(Species::R32);
    cfg.orc.fluid_cp = r32.cp / r32.molar_mass;
    cfg.furnace.t_ore = props.t0;
    cfg.lt_store.t_cold = props.t0;
    cfg.ht_store.t_cold = props.t0;
    cfg.props = props;
    cfg
}

fn num(v: &str) -> Result<f64, String> {
    v.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(|| format!("`{v}` is not a finite number"))
}

fn count(v: &str) -> Result<usize, String> {
    v.parse::<usize>().map_err(|_| format!("`{v}` is not a non-negative integer"))
}

fn flag(v: &str) -> Result<bool, String> {
    match v.to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(format!("`{v}` is not a boolean")),
    }
}

fn list(v: &str) -> Result<Vec<f64>, String> {
    v.split(',').map(|s| num(s.trim())).collect()
}

fn apply(cfg: &mut ScenarioConfig, e: &Entry<'_>) -> Result<(), String> {
    let v = e.value;
    let unknown = || Err(format!("unknown key `{}` in [{}]", e.key, e.section));
    match e.section {
        "scenario" => match e.key {
            "kind" => cfg.kind = v.parse()?,
            "t_in" => cfg.t_in = num(v)?,
            "batch_kg" => cfg.batch_kg = num(v)?,
            "waste_heat" => cfg.waste_heat = flag(v)?,
            "eta_gas_scaling" => cfg.eta_gas_scaling = flag(v)?,
            _ => return unknown(),
        },
        "properties" => match e.key {
            "dH_H2" => cfg.props.dh_h2 = num(v)?,
            "dH_CO" => cfg.props.dh_co = num(v)?,
            key => {
                let Some((sp, field)) = key.split_once('.') else { return unknown() };
                let sp: Species = sp.parse()?;
                cfg.props.set_property(sp, field, num(v)?).map_err(|err| err.to_string())?;
            }
        },
        "furnace" => {
            let f = &mut cfg.furnace;
            let slot = match e.key {
                "eta1" => &mut f.eta1,
                "eta2" => &mut f.eta2,
                "dust_fraction" => &mut f.dust_fraction,
                "c_dust" => &mut f.c_dust,
                "c_dri" => &mut f.c_dri,
                "c_ore" => &mut f.c_ore,
                "t_ore" => &mut f.t_ore,
                "water_factor" => &mut f.water_factor,
                "w_fe" => &mut f.w_fe,
                "eta_fe" => &mut f.eta_fe,
                "pressure" => &mut f.pressure,
                _ => return unknown(),
            };
            *slot = num(v)?;
        }
        "bed" => {
            let b = &mut cfg.bed;
            let slot = match e.key {
                "steps" => {
                    b.steps = count(v)?;
                    return Ok(());
                }
                "length" => &mut b.length,
                "diameter" => &mut b.diameter,
                "pellet_diameter" => &mut b.pellet_diameter,
                "porosity" => &mut b.porosity,
                "wall_coefficient" => &mut b.wall_coefficient,
                "gas_throughput" => &mut b.gas_throughput,
                _ => return unknown(),
            };
            *slot = num(v)?;
        }
        "electrolyzer" => match e.key {
            "v_cell" => cfg.v_cell = num(v)?,
            "t_out" => cfg.electrolyzer_t_out = num(v)?,
            _ => return unknown(),
        },
        "storage" => match e.key {
            "pressure" => cfg.storage_pressure = num(v)?,
            _ => return unknown(),
        },
        "compressor" => match e.key {
            "reduction_ratio" => cfg.reduction_train.ratio = num(v)?,
            "reduction_eta" => cfg.reduction_train.eta = num(v)?,
            "reduction_stages" => cfg.reduction_train.stages = count(v)?,
            "circle_ratio" => cfg.circle_train.ratio = num(v)?,
            "circle_eta" => cfg.circle_train.eta = num(v)?,
            "circle_stages" => cfg.circle_train.stages = count(v)?,
            _ => return unknown(),
        },
        "expander" => match e.key {
            "ratios" => cfg.expander_ratios = list(v)?,
            "eta" => cfg.expander_eta = num(v)?,
            _ => return unknown(),
        },
        "orc" => match e.key {
            "t1" => cfg.orc.t1 = num(v)?,
            "t2" => cfg.orc.t2 = num(v)?,
            "t4" => cfg.orc.t4 = num(v)?,
            "fluid_cp" => cfg.orc.fluid_cp = num(v)?,
            "sink_out" => cfg.orc_sink_out = num(v)?,
            _ => return unknown(),
        },
        "lt_store" | "ht_store" => {
            let s = if e.section == "lt_store" { &mut cfg.lt_store } else { &mut cfg.ht_store };
            let slot = match e.key {
                "recovery" => &mut s.recovery,
                "fluid_cp" => &mut s.fluid_cp,
                "t_hot" => &mut s.t_hot,
                "t_cold" => &mut s.t_cold,
                _ => return unknown(),
            };
            *slot = num(v)?;
        }
        "plasma" => match e.key {
            "eta" => cfg.eta_pla = num(v)?,
            "re1" => cfg.re1 = num(v)?,
            _ => return unknown(),
        },
        "combustion" => match e.key {
            "eta" => cfg.eta_comb = num(v)?,
            _ => return unknown(),
        },
        "carbon" => match e.key {
            "c_base" => cfg.carbon.c_base = num(v)?,
            "p_co2" => cfg.carbon.p_co2 = num(v)?,
            "energy_price_kwh" => cfg.carbon.energy_price_kwh = num(v)?,
            "theta" => cfg.carbon.theta = num(v)?,
            "nu" => cfg.carbon.nu = num(v)?,
            "penalty" => cfg.carbon.penalty = flag(v)?,
            "grid_factor" => cfg.grid_factor = num(v)?,
            _ => return unknown(),
        },
        "solver" => match e.key {
            "n2_guess" => cfg.solver.n2_guess = num(v)?,
            "damping" => cfg.solver.damping = num(v)?,
            "tolerance" => cfg.solver.tolerance = num(v)?,
            "max_iterations" => cfg.solver.max_iterations = count(v)?,
            "shooting_tolerance" => cfg.solver.shooting.tolerance = num(v)?,
            "shooting_max_iterations" => cfg.solver.shooting.max_iterations = count(v)?,
            _ => return unknown(),
        },
        _ => return unknown(),
    }
    Ok(())
}
