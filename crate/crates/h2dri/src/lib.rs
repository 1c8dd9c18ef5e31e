//! Flowsheet simulator for hydrogen direct-reduction ironmaking.
//!
//! The crate closes the circulating-hydrogen loop of a shaft furnace against a
//! counter-current gas–solid heat-transfer model, evaluates per-component energy
//! and exergy ledgers, and reports energy, exergy and carbon-penalized
//! energy-carbon efficiencies for four scenarios:
//!
//! * `zero-carbon`: electrolytic hydrogen, compression to storage, expander and
//!   ORC recovery, plasma heating;
//! * `trad-64` / `trad-82`: H₂/CO reducing gas heated by coke-oven-gas combustion;
//! * `grid`: the zero-carbon plant drawing grid electricity at 0.57 t CO₂/MWh.
//!
//! ```
//! use h2dri::flowsheet::{solve_scenario, ScenarioConfig, ScenarioKind};
//!
//! let report = solve_scenario(&ScenarioConfig::new(ScenarioKind::ZeroCarbon)).unwrap();
//! assert!(report.metrics.exe < report.metrics.ee);
//! ```

// `!(x > 0.0)` style guards reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod components;
pub mod config;
pub mod flowsheet;
pub mod furnace;
pub mod kinetics;
pub mod metrics;
pub mod output;
pub mod sweep;
pub mod thermo;

pub use flowsheet::{solve_scenario, ScenarioConfig, ScenarioKind, SystemReport};
pub use sweep::{run_sweep, Execution, SweepSpec};
pub use thermo::{Composition, GasStream, PropertyTable, Species};
