//! Energy and exergy models of the plant units.
//!
//! Every unit returns a [`ComponentReport`] whose energy ledger closes as
//! `inputs = outputs + loss`, with `loss` computed from the unit's own loss
//! mechanism rather than as a remainder.

use std::fmt;

use thiserror::Error;

use crate::thermo::{Composition, GasStream, PropertyTable, Species, ThermoError, FARADAY};

/// Cell voltage at which electrolysis is adiabatic (HHV basis).
pub const THERMONEUTRAL_VOLTAGE: f64 = 1.481;
/// Highest allowed pressure ratio of one compressor stage.
pub const MAX_STAGE_RATIO: f64 = 5.0;
/// Lowest allowed expander outlet pressure, Pa.
pub const MIN_EXPANDER_OUTLET: f64 = 1.0e5;
/// Plasma target window, K, with a 50 K margin either side of the furnace range.
pub const PLASMA_TARGET_RANGE: (f64, f64) = (973.15, 1323.15);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ComponentError {
    #[error(transparent)]
    Thermo(#[from] ThermoError),
    #[error("cell voltage {v} V is below the thermoneutral voltage {THERMONEUTRAL_VOLTAGE} V")]
    BelowThermoneutral { v: f64 },
    #[error("{what} must be positive (got {value})")]
    NonPositive { what: &'static str, value: f64 },
    #[error("stage {stage}: pressure ratio {ratio} must exceed 1")]
    InvalidStage { stage: usize, ratio: f64 },
    #[error("stage {stage}: pressure ratio {ratio} exceeds the per-stage limit {MAX_STAGE_RATIO}")]
    StageRatioLimit { stage: usize, ratio: f64 },
    #[error("stage {stage}: isentropic efficiency {eta} outside (0, 1]")]
    InvalidEfficiency { stage: usize, eta: f64 },
    #[error("expander outlet pressure {p_out} Pa is below 1 bar")]
    ExpansionBelowAmbient { p_out: f64 },
    #[error("heat exchange infeasible: fluid outlet {fluid_out} K exceeds source inlet {source_in} K")]
    TemperatureCrossover { fluid_out: f64, source_in: f64 },
    #[error("store depleted: requested {requested:.6e} J, available {available:.6e} J")]
    StoreDepleted { requested: f64, available: f64 },
    #[error("ORC infeasible: {0}")]
    InfeasibleCycle(String),
    #[error("plasma target {target} K outside the allowed window [{}, {}] K", PLASMA_TARGET_RANGE.0, PLASMA_TARGET_RANGE.1)]
    PlasmaTargetRange { target: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Component {
    Electrolyzer,
    ReductionCompressor,
    CircleCompressor,
    RecycleCompressor,
    LowTempStoreCharge,
    LowTempStoreDischarge,
    HighTempStoreCharge,
    HighTempStoreDischarge,
    Expander,
    Orc,
    Plasma,
    CombustionFurnace,
    ShaftFurnace,
}

impl Component {
    pub fn name(self) -> &'static str {
        match self {
            Component::Electrolyzer => "electrolyzer",
            Component::ReductionCompressor => "reduction-compressor",
            Component::CircleCompressor => "circle-compressor",
            Component::RecycleCompressor => "recycle-compressor",
            Component::LowTempStoreCharge => "lt-store-charge",
            Component::LowTempStoreDischarge => "lt-store-discharge",
            Component::HighTempStoreCharge => "ht-store-charge",
            Component::HighTempStoreDischarge => "ht-store-discharge",
            Component::Expander => "expander",
            Component::Orc => "orc",
            Component::Plasma => "plasma",
            Component::CombustionFurnace => "combustion-furnace",
            Component::ShaftFurnace => "shaft-furnace",
        }
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Labelled input and output entries, joules.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Ledger {
    pub inputs: Vec<(&'static str, f64)>,
    pub outputs: Vec<(&'static str, f64)>,
}

impl Ledger {
    pub fn input(mut self, label: &'static str, v: f64) -> Self {
        self.inputs.push((label, v));
        self
    }

    pub fn output(mut self, label: &'static str, v: f64) -> Self {
        self.outputs.push((label, v));
        self
    }

    pub fn total_in(&self) -> f64 {
        self.inputs.iter().map(|(_, v)| v).sum()
    }

    pub fn total_out(&self) -> f64 {
        self.outputs.iter().map(|(_, v)| v).sum()
    }

    pub fn get_in(&self, label: &str) -> f64 {
        self.inputs.iter().filter(|(l, _)| *l == label).map(|(_, v)| v).sum()
    }

    pub fn get_out(&self, label: &str) -> f64 {
        self.outputs.iter().filter(|(l, _)| *l == label).map(|(_, v)| v).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.inputs.iter().chain(&self.outputs).all(|(_, v)| v.is_finite())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentReport {
    pub id: Component,
    pub energy: Ledger,
    pub exergy: Ledger,
    /// Declared energy loss (dissipation, rejected heat, exchanger loss).
    pub loss: f64,
}

impl ComponentReport {
    pub fn empty(id: Component) -> Self {
        Self { id, energy: Ledger::default(), exergy: Ledger::default(), loss: 0.0 }
    }

    /// `inputs − outputs − loss`.
    pub fn energy_residual(&self) -> f64 {
        self.energy.total_in() - self.energy.total_out() - self.loss
    }

    pub fn exergy_destruction(&self) -> f64 {
        self.exergy.total_in() - self.exergy.total_out()
    }
}

/// Pressure ratio and isentropic efficiency of one machine stage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageSpec {
    pub ratio: f64,
    pub eta: f64,
}

impl StageSpec {
    pub fn new(ratio: f64, eta: f64) -> Self {
        Self { ratio, eta }
    }

    pub fn repeated(ratio: f64, eta: f64, n: usize) -> Vec<Self> {
        vec![Self::new(ratio, eta); n]
    }
}

fn check_eta(stage: usize, eta: f64) -> Result<(), ComponentError> {
    if eta > 0.0 && eta <= 1.0 {
        Ok(())
    } else {
        Err(ComponentError::InvalidEfficiency { stage, eta })
    }
}

/// Heat offered to a store: energy, its exergy, and the hottest source temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatParcel {
    pub energy: f64,
    pub exergy: f64,
    pub t_source: f64,
}

impl HeatParcel {
    /// Heat released by cooling `gas` down to `t_out`.
    pub fn gas_cooling(props: &PropertyTable, gas: &GasStream, t_out: f64) -> Result<Self, ThermoError> {
        let a = props.mix_sensible_cp(&gas.composition)?;
        Ok(Self::sensible(props, gas.n * a, gas.t, t_out))
    }

    /// Heat released by a body of heat capacity `cap` (J/K) cooling from `t_in` to `t_out`.
    pub fn sensible(props: &PropertyTable, cap: f64, t_in: f64, t_out: f64) -> Self {
        let dt = t_in - t_out;
        let ex = if dt == 0.0 { 0.0 } else { cap * (dt - props.t0 * (t_in / t_out).ln()) };
        Self { energy: cap * dt, exergy: ex, t_source: t_in }
    }

    pub fn combine(parts: &[HeatParcel]) -> Self {
        Self {
            energy: parts.iter().map(|p| p.energy).sum(),
            exergy: parts.iter().map(|p| p.exergy).sum(),
            t_source: parts.iter().map(|p| p.t_source).fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

// ---------------------------------------------------------------------------
// Electrolyzer

#[derive(Debug, Clone, PartialEq)]
pub struct ElectrolyzerRun {
    pub report: ComponentReport,
    pub hydrogen: GasStream,
}

/// Cell-stack form: `n_cells` cells at `v_cell`, current `current` for `duration` seconds.
pub fn electrolyzer(
    props: &PropertyTable,
    n_cells: f64,
    v_cell: f64,
    current: f64,
    duration: f64,
    t_out: f64,
    p_out: f64,
) -> Result<ElectrolyzerRun, ComponentError> {
    for (what, value) in [("cell count", n_cells), ("current", current), ("duration", duration)] {
        if !(value > 0.0) {
            return Err(ComponentError::NonPositive { what, value });
        }
    }
    let n_h2 = current * duration * n_cells / (2.0 * FARADAY);
    let w_in = n_cells * v_cell * current * duration;
    electrolyzer_report(props, v_cell, w_in, n_h2, t_out, p_out)
}

/// Production form: electricity needed to make `n_h2` mol at `v_cell`.
pub fn electrolyze(
    props: &PropertyTable,
    v_cell: f64,
    n_h2: f64,
    t_out: f64,
    p_out: f64,
) -> Result<ElectrolyzerRun, ComponentError> {
    electrolyzer_report(props, v_cell, n_h2 * 2.0 * FARADAY * v_cell, n_h2, t_out, p_out)
}

fn electrolyzer_report(
    props: &PropertyTable,
    v_cell: f64,
    w_in: f64,
    n_h2: f64,
    t_out: f64,
    p_out: f64,
) -> Result<ElectrolyzerRun, ComponentError> {
    if v_cell < THERMONEUTRAL_VOLTAGE {
        return Err(ComponentError::BelowThermoneutral { v: v_cell });
    }
    let hydrogen = GasStream::pure(Species::H2, n_h2, t_out, p_out)?;
    let chem = props.gas_chemical_energy(&hydrogen);
    let phys = props.gas_physical_energy(&hydrogen)?;
    let ex_chem = props.gas_chemical_exergy(&hydrogen);
    let ex_phys = props.gas_physical_exergy(&hydrogen)?;
    let report = ComponentReport {
        id: Component::Electrolyzer,
        energy: Ledger::default()
            .input("electricity", w_in)
            .output("hydrogen chemical", chem)
            .output("hydrogen sensible", phys),
        exergy: Ledger::default()
            .input("electricity", w_in)
            .output("hydrogen chemical", ex_chem)
            .output("hydrogen physical", ex_phys),
        loss: w_in - chem - phys,
    };
    Ok(ElectrolyzerRun { report, hydrogen })
}

// ---------------------------------------------------------------------------
// Compressor train

#[derive(Debug, Clone, PartialEq)]
pub struct CompressorRun {
    pub report: ComponentReport,
    pub outlet: GasStream,
    pub stage_work: Vec<f64>,
    pub stage_t_out: Vec<f64>,
    /// Intercooler heat of each stage, offered to the low-temperature store.
    pub heat: Vec<HeatParcel>,
}

impl CompressorRun {
    pub fn work(&self) -> f64 {
        self.stage_work.iter().sum()
    }
}

/// Isentropic multistage compression with intercooling back to the inlet temperature.
pub fn compressor_train(
    props: &PropertyTable,
    id: Component,
    inlet: &GasStream,
    stages: &[StageSpec],
) -> Result<CompressorRun, ComponentError> {
    if stages.is_empty() {
        return Err(ComponentError::InvalidStage { stage: 0, ratio: 1.0 });
    }
    let a = props.mix_sensible_cp(&inlet.composition)?;
    let k = props.r / a;
    let t_in = inlet.t;
    let mut p = inlet.p;
    let mut stage_work = Vec::with_capacity(stages.len());
    let mut stage_t_out = Vec::with_capacity(stages.len());
    let mut heat = Vec::with_capacity(stages.len());
    let mut ex_pressure = 0.0;
    for (i, st) in stages.iter().enumerate() {
        if !(st.ratio > 1.0) {
            return Err(ComponentError::InvalidStage { stage: i, ratio: st.ratio });
        }
        if st.ratio > MAX_STAGE_RATIO {
            return Err(ComponentError::StageRatioLimit { stage: i, ratio: st.ratio });
        }
        check_eta(i, st.eta)?;
        let lift = (st.ratio.powf(k) - 1.0) / st.eta;
        let t_out = t_in * (1.0 + lift);
        let w = a * inlet.n * t_in * lift;
        stage_work.push(w);
        stage_t_out.push(t_out);
        // Intercooling returns exactly the stage work as heat.
        heat.push(HeatParcel { energy: w, ..HeatParcel::sensible(props, a * inlet.n, t_out, t_in) });
        ex_pressure += inlet.n * props.r * props.t0 * st.ratio.ln();
        p *= st.ratio;
    }
    let work: f64 = stage_work.iter().sum();
    let heat_total = HeatParcel::combine(&heat);
    let report = ComponentReport {
        id,
        energy: Ledger::default().input("electricity", work).output("intercooler heat", heat_total.energy),
        exergy: Ledger::default()
            .input("electricity", work)
            .output("pressure", ex_pressure)
            .output("intercooler heat", heat_total.exergy),
        loss: 0.0,
    };
    Ok(CompressorRun { report, outlet: inlet.at(t_in, p), stage_work, stage_t_out, heat })
}

// ---------------------------------------------------------------------------
// Thermal store

/// Sensible-heat store: a fluid heated from `t_cold` to `t_hot` on charge.
#[derive(Debug, Clone, PartialEq)]
pub struct ThermalStore {
    pub recovery: f64,
    pub fluid_cp: f64,
    pub t_hot: f64,
    pub t_cold: f64,
    t0: f64,
    energy: f64,
    charge_id: Component,
    discharge_id: Component,
}

impl ThermalStore {
    pub fn new(
        recovery: f64,
        fluid_cp: f64,
        t_hot: f64,
        t_cold: f64,
        t0: f64,
        charge_id: Component,
        discharge_id: Component,
    ) -> Result<Self, ComponentError> {
        if !(recovery > 0.0 && recovery <= 1.0) {
            return Err(ComponentError::NonPositive { what: "store recovery", value: recovery });
        }
        if !(fluid_cp > 0.0) {
            return Err(ComponentError::NonPositive { what: "fluid heat capacity", value: fluid_cp });
        }
        if !(t_hot > t_cold) {
            return Err(ComponentError::NonPositive { what: "store temperature lift", value: t_hot - t_cold });
        }
        Ok(Self { recovery, fluid_cp, t_hot, t_cold, t0, energy: 0.0, charge_id, discharge_id })
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn fluid_mass(&self) -> f64 {
        self.energy / (self.fluid_cp * (self.t_hot - self.t_cold))
    }

    /// Exergy per joule of stored heat.
    pub fn exergy_factor(&self) -> f64 {
        let dt = self.t_hot - self.t_cold;
        (dt - self.t0 * (self.t_hot / self.t_cold).ln()) / dt
    }

    pub fn charge(&mut self, parcel: &HeatParcel) -> Result<ComponentReport, ComponentError> {
        if parcel.energy == 0.0 {
            return Ok(ComponentReport::empty(self.charge_id));
        }
        if self.t_hot > parcel.t_source {
            return Err(ComponentError::TemperatureCrossover { fluid_out: self.t_hot, source_in: parcel.t_source });
        }
        let stored = self.recovery * parcel.energy;
        self.energy += stored;
        Ok(ComponentReport {
            id: self.charge_id,
            energy: Ledger::default().input("source heat", parcel.energy).output("stored heat", stored),
            exergy: Ledger::default()
                .input("source heat", parcel.exergy)
                .output("stored heat", stored * self.exergy_factor()),
            loss: (1.0 - self.recovery) * parcel.energy,
        })
    }

    pub fn discharge(&mut self, duty: f64) -> Result<ComponentReport, ComponentError> {
        if duty == 0.0 {
            return Ok(ComponentReport::empty(self.discharge_id));
        }
        if duty > self.energy * (1.0 + 1e-12) {
            return Err(ComponentError::StoreDepleted { requested: duty, available: self.energy });
        }
        self.energy = (self.energy - duty).max(0.0);
        let ex = duty * self.exergy_factor();
        Ok(ComponentReport {
            id: self.discharge_id,
            energy: Ledger::default().input("stored heat", duty).output("delivered heat", duty),
            exergy: Ledger::default().input("stored heat", ex).output("delivered heat", ex),
            loss: 0.0,
        })
    }

    /// Discharges `mass` kg of hot fluid back to the cold temperature.
    pub fn discharge_mass(&mut self, mass: f64) -> Result<ComponentReport, ComponentError> {
        self.discharge(mass * self.fluid_cp * (self.t_hot - self.t_cold))
    }

    pub fn discharge_all(&mut self) -> Result<ComponentReport, ComponentError> {
        self.discharge(self.energy)
    }
}

// ---------------------------------------------------------------------------
// Expander train

#[derive(Debug, Clone, PartialEq)]
pub struct ExpanderRun {
    pub report: ComponentReport,
    pub outlet: GasStream,
    pub stage_work: Vec<f64>,
}

impl ExpanderRun {
    pub fn electricity(&self) -> f64 {
        self.stage_work.iter().sum()
    }
}

/// Adiabatic expansion in series without reheat; ratios are `P_in/P_out`.
pub fn expander_train(
    props: &PropertyTable,
    inlet: &GasStream,
    stages: &[StageSpec],
) -> Result<ExpanderRun, ComponentError> {
    let a = props.mix_sensible_cp(&inlet.composition)?;
    let gamma = a / (a - props.r);
    let mut t = inlet.t;
    let mut p = inlet.p;
    let mut stage_work = Vec::with_capacity(stages.len());
    for (i, st) in stages.iter().enumerate() {
        if !(st.ratio >= 1.0) {
            return Err(ComponentError::InvalidStage { stage: i, ratio: st.ratio });
        }
        check_eta(i, st.eta)?;
        let drop = 1.0 - st.ratio.powf((1.0 - gamma) / gamma);
        let w = a * inlet.n * t * drop * st.eta;
        stage_work.push(w);
        t *= 1.0 - drop * st.eta;
        p /= st.ratio;
    }
    if p < MIN_EXPANDER_OUTLET {
        return Err(ComponentError::ExpansionBelowAmbient { p_out: p });
    }
    let outlet = inlet.at(t, p);
    let work: f64 = stage_work.iter().sum();
    let ex_in = props.gas_physical_exergy(inlet)? - props.gas_physical_exergy(&outlet)?;
    let report = ComponentReport {
        id: Component::Expander,
        energy: Ledger::default().input("gas enthalpy drop", work).output("electricity", work),
        exergy: Ledger::default().input("gas exergy drop", ex_in).output("electricity", work),
        loss: 0.0,
    };
    Ok(ExpanderRun { report, outlet, stage_work })
}

// ---------------------------------------------------------------------------
// ORC

/// Sensible-heat ORC corner temperatures: evaporator outlet `t1`,
/// turbine outlet `t2`, pump outlet `t4`; `fluid_cp` in J/(kg·K).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrcSpec {
    pub t1: f64,
    pub t2: f64,
    pub t4: f64,
    pub fluid_cp: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrcRun {
    pub report: ComponentReport,
    pub electricity: f64,
    pub store_duty: f64,
    pub ambient_duty: f64,
    pub rejected: f64,
    pub fluid_mass: f64,
    pub sink_outlet: GasStream,
}

/// Runs the cycle at the working-fluid flow that the cold sink can condense.
/// The evaporator draws up to `store_available` from the store and the rest from ambient air.
pub fn orc_cycle(
    props: &PropertyTable,
    spec: &OrcSpec,
    store_available: f64,
    sink: &GasStream,
    sink_out: f64,
) -> Result<OrcRun, ComponentError> {
    let OrcSpec { t1, t2, t4, fluid_cp } = *spec;
    if !(t1 > t2 && t2 > t4) {
        return Err(ComponentError::InfeasibleCycle(format!("need T1 > T2 > T4, got {t1}, {t2}, {t4}")));
    }
    if sink_out >= t4 || sink.t >= t4 {
        return Err(ComponentError::InfeasibleCycle(format!(
            "sink ({} -> {sink_out} K) is not colder than the condensing temperature {t4} K",
            sink.t
        )));
    }
    if sink_out < sink.t {
        return Err(ComponentError::InfeasibleCycle(format!("sink outlet {sink_out} K below sink inlet {} K", sink.t)));
    }
    let a = props.mix_sensible_cp(&sink.composition)?;
    let q_cold = sink.n * a * (sink_out - sink.t);
    let mc = q_cold / (t2 - t4);
    let q_in = mc * (t1 - t4);
    let w = mc * (t1 - t2);
    let store_duty = q_in.min(store_available.max(0.0));
    let ambient_duty = q_in - store_duty;
    let ex_out = if mc == 0.0 { 0.0 } else { mc * (t1 - t2) - mc * t2 * (t1 / t2).ln() };
    let report = ComponentReport {
        id: Component::Orc,
        energy: Ledger::default()
            .input("store heat", store_duty)
            .input("ambient heat", ambient_duty)
            .output("electricity", w),
        exergy: Ledger::default().input("evaporator duty", q_in).output("electricity", ex_out),
        loss: q_cold,
    };
    Ok(OrcRun {
        report,
        electricity: w,
        store_duty,
        ambient_duty,
        rejected: q_cold,
        fluid_mass: mc / fluid_cp,
        sink_outlet: sink.at(sink_out, sink.p),
    })
}

// ---------------------------------------------------------------------------
// Plasma heater

#[derive(Debug, Clone, PartialEq)]
pub struct PlasmaRun {
    pub report: ComponentReport,
    pub outlet: GasStream,
}

pub fn plasma_heat(
    props: &PropertyTable,
    inlet: &GasStream,
    target: f64,
    eta: f64,
    re1: f64,
) -> Result<PlasmaRun, ComponentError> {
    if target <= inlet.t {
        return Ok(PlasmaRun { report: ComponentReport::empty(Component::Plasma), outlet: inlet.clone() });
    }
    if target < PLASMA_TARGET_RANGE.0 || target > PLASMA_TARGET_RANGE.1 {
        return Err(ComponentError::PlasmaTargetRange { target });
    }
    check_eta(0, eta)?;
    let a = props.mix_sensible_cp(&inlet.composition)?;
    let duty = inlet.n * a * (target - inlet.t);
    let w_in = duty / eta;
    let ex_gain = inlet.n * a * (props.exergy_kernel(target) - props.exergy_kernel(inlet.t));
    let report = ComponentReport {
        id: Component::Plasma,
        energy: Ledger::default().input("electricity", w_in).output("gas heating", duty),
        exergy: Ledger::default().input("electricity", (1.0 - re1) * duty).output("gas heating", ex_gain),
        loss: w_in - duty,
    };
    Ok(PlasmaRun { report, outlet: inlet.at(target, inlet.p) })
}

// ---------------------------------------------------------------------------
// Combustion furnace

#[derive(Debug, Clone, PartialEq)]
pub struct CombustionRun {
    pub report: ComponentReport,
    pub outlet: GasStream,
    pub fuel_mol: f64,
    pub fuel_energy: f64,
    pub co2_mol: f64,
    /// Heat released by burning the CO fraction of the fuel.
    pub co_combustion_heat: f64,
}

/// Moles of CO₂ from burning `moles` of a fuel mixture completely.
pub fn combustion_co2(fuel: &Composition, moles: f64) -> f64 {
    moles * fuel.carbon_per_mol()
}

/// Heats `gas` to `target` by burning the table's coke-oven gas at efficiency `eta_comb`.
pub fn combustion_furnace(
    props: &PropertyTable,
    gas: &GasStream,
    target: f64,
    eta_comb: f64,
) -> Result<CombustionRun, ComponentError> {
    check_eta(0, eta_comb)?;
    let fuel = &props.coke_oven_gas;
    let a = props.mix_sensible_cp(&gas.composition)?;
    let duty = (gas.n * a * (target - gas.t)).max(0.0);
    let fuel_energy = duty / eta_comb;
    let fuel_mol = fuel_energy / props.mix_lhv(fuel);
    let fuel_stream = GasStream::new(fuel_mol, fuel.clone(), props.t0, props.p0)?;
    let ex_gain = gas.n * a * (props.exergy_kernel(target.max(gas.t)) - props.exergy_kernel(gas.t));
    let report = ComponentReport {
        id: Component::CombustionFurnace,
        energy: Ledger::default().input("fuel", fuel_energy).output("gas heating", duty),
        exergy: Ledger::default().input("fuel", props.gas_chemical_exergy(&fuel_stream)).output("gas heating", ex_gain),
        loss: fuel_energy - duty,
    };
    Ok(CombustionRun {
        report,
        outlet: gas.at(target.max(gas.t), gas.p),
        fuel_mol,
        fuel_energy,
        co2_mol: combustion_co2(fuel, fuel_mol),
        co_combustion_heat: fuel_mol * fuel.fraction(Species::CO) * props.get(Species::CO).lhv,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn props() -> PropertyTable {
        PropertyTable::standard()
    }

    fn h2(n: f64, t: f64, p: f64) -> GasStream {
        GasStream::pure(Species::H2, n, t, p).unwrap()
    }

    #[test]
    fn electrolyzer_stack_oracle() {
        let run = electrolyzer(&props(), 100.0, 2.0, 1000.0, 3600.0, 371.15, 1.0e6).unwrap();
        assert_relative_eq!(run.report.energy.total_in(), 7.2e8, max_relative = 1e-12);
        assert_eq!(run.report.exergy.total_in(), run.report.energy.total_in());
        assert!(run.report.energy.total_out() < run.report.energy.total_in());
        assert_relative_eq!(run.hydrogen.n, 100.0 * 1000.0 * 3600.0 / (2.0 * FARADAY));
    }

    #[test]
    fn electrolyzer_rejects_low_voltage() {
        assert_eq!(
            electrolyze(&props(), 1.4, 1.0, 371.15, 1e6).unwrap_err(),
            ComponentError::BelowThermoneutral { v: 1.4 }
        );
    }

    #[test]
    fn compressor_outlet_temperature_oracle() {
        let run = compressor_train(
            &props(),
            Component::ReductionCompressor,
            &h2(1.0, 298.0, 8e5),
            &[StageSpec::new(2.56, 0.915)],
        )
        .unwrap();
        assert_relative_eq!(run.stage_t_out[0], 400.4, max_relative = 5e-4);
        assert_eq!(run.report.energy_residual(), 0.0);
        assert!(run.report.exergy_destruction() > 0.0);
    }

    #[test]
    fn compressor_stage_limits() {
        let p = props();
        let g = h2(1.0, 298.0, 1e5);
        assert!(matches!(
            compressor_train(&p, Component::CircleCompressor, &g, &[StageSpec::new(1.0, 0.9)]),
            Err(ComponentError::InvalidStage { .. })
        ));
        assert!(matches!(
            compressor_train(&p, Component::CircleCompressor, &g, &[StageSpec::new(5.5, 0.9)]),
            Err(ComponentError::StageRatioLimit { .. })
        ));
    }

    #[test]
    fn store_charge_oracle() {
        let p = props();
        let parcel = HeatParcel::gas_cooling(&p, &h2(10.0, 398.0, 1e5), 308.0).unwrap();
        assert_relative_eq!(parcel.energy, 2.573e4, max_relative = 1e-3);
        let mut store = ThermalStore::new(
            0.85,
            4186.0,
            353.0,
            298.0,
            298.0,
            Component::LowTempStoreCharge,
            Component::LowTempStoreDischarge,
        )
        .unwrap();
        let rep = store.charge(&parcel).unwrap();
        assert_relative_eq!(rep.energy.total_out(), 0.85 * parcel.energy);
        assert!(rep.exergy.total_out() < rep.energy.total_out());
        let none = HeatParcel::gas_cooling(&p, &h2(10.0, 398.0, 1e5), 398.0).unwrap();
        assert_eq!(none.energy, 0.0);
    }

    #[test]
    fn store_discharge_oracle() {
        let mut store = ThermalStore::new(
            0.85,
            4186.0,
            363.0,
            313.0,
            298.0,
            Component::LowTempStoreCharge,
            Component::LowTempStoreDischarge,
        )
        .unwrap();
        let parcel = HeatParcel { energy: 2.093e7 / 0.85 + 1.0, exergy: 1e7, t_source: 400.0 };
        store.charge(&parcel).unwrap();
        let rep = store.discharge_mass(100.0).unwrap();
        assert_relative_eq!(rep.energy.total_in(), 2.093e7, max_relative = 1e-3);
        assert!(matches!(store.discharge(1e9), Err(ComponentError::StoreDepleted { .. })));
    }

    #[test]
    fn store_rejects_crossover() {
        let p = props();
        let mut store = ThermalStore::new(
            0.85,
            4186.0,
            523.0,
            298.0,
            298.0,
            Component::HighTempStoreCharge,
            Component::HighTempStoreDischarge,
        )
        .unwrap();
        let parcel = HeatParcel::gas_cooling(&p, &h2(10.0, 450.0, 1e5), 298.0).unwrap();
        assert!(matches!(store.charge(&parcel), Err(ComponentError::TemperatureCrossover { .. })));
    }

    #[test]
    fn expander_stage_oracle() {
        let run = expander_train(&props(), &h2(1.0, 298.0, 2.85e5), &[StageSpec::new(2.85, 0.9)]).unwrap();
        assert_relative_eq!(run.electricity(), 2.01e3, max_relative = 2e-3);
        assert_eq!(run.report.exergy.total_out(), run.electricity());
        let idle = expander_train(&props(), &h2(1.0, 298.0, 2e5), &[StageSpec::new(1.0, 0.9)]).unwrap();
        assert_eq!(idle.electricity(), 0.0);
        assert_eq!(idle.outlet.t, 298.0);
    }

    #[test]
    fn expander_outlet_floor() {
        assert!(matches!(
            expander_train(&props(), &h2(1.0, 298.0, 2e5), &[StageSpec::new(2.85, 0.9)]),
            Err(ComponentError::ExpansionBelowAmbient { .. })
        ));
    }

    #[test]
    fn orc_efficiency_identity() {
        let spec = OrcSpec { t1: 297.9, t2: 180.0, t4: 170.0, fluid_cp: 826.6 };
        let run = orc_cycle(&props(), &spec, 1e5, &h2(100.0, 130.0, 8e5), 165.0).unwrap();
        let q_in = run.store_duty + run.ambient_duty;
        assert_relative_eq!(run.electricity / q_in, (297.9 - 180.0) / (297.9 - 170.0), max_relative = 1e-12);
        assert_relative_eq!(run.report.energy_residual(), 0.0, epsilon = 1e-6);
        assert!(run.report.exergy_destruction() > 0.0);
        let none = orc_cycle(&props(), &spec, 1e5, &h2(0.0, 130.0, 8e5), 165.0).unwrap();
        assert_eq!(none.electricity, 0.0);
    }

    #[test]
    fn orc_rejects_warm_sink() {
        let spec = OrcSpec { t1: 297.9, t2: 180.0, t4: 170.0, fluid_cp: 826.6 };
        assert!(matches!(
            orc_cycle(&props(), &spec, 0.0, &h2(1.0, 175.0, 8e5), 178.0),
            Err(ComponentError::InfeasibleCycle(_))
        ));
    }

    #[test]
    fn plasma_oracle() {
        let run = plasma_heat(&props(), &h2(1.0, 298.0, 8e5), 1273.0, 0.95, 0.05).unwrap();
        assert_relative_eq!(run.report.energy.total_out(), 2.788e4, max_relative = 1e-3);
        assert_relative_eq!(run.report.energy.total_in(), 2.935e4, max_relative = 1e-3);
        assert_relative_eq!(run.report.energy.total_out() / run.report.energy.total_in(), 0.95, max_relative = 1e-15);
        let idle = plasma_heat(&props(), &h2(1.0, 298.0, 8e5), 298.0, 0.95, 0.05).unwrap();
        assert_eq!(idle.report.energy.total_in(), 0.0);
    }

    #[test]
    fn combustion_oracles() {
        let p = props();
        let co = Composition::pure(Species::CO);
        assert_relative_eq!(combustion_co2(&co, 1.0) * p.get(Species::CO2).molar_mass, 0.044, max_relative = 1e-3);
        let cap = 1e9 / (975.0 * p.sensible_cp(Species::H2).unwrap());
        let run = combustion_furnace(&p, &h2(cap, 298.0, 8e5), 1273.0, 0.85).unwrap();
        assert_relative_eq!(run.fuel_mol, 1e9 / (0.85 * p.mix_lhv(&p.coke_oven_gas)), max_relative = 1e-9);
        let idle = combustion_furnace(&p, &h2(1.0, 298.0, 8e5), 298.0, 0.85).unwrap();
        assert_eq!((idle.fuel_mol, idle.co2_mol), (0.0, 0.0));
    }
}
