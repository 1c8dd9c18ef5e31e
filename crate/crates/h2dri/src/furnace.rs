//! Reduction stoichiometry and the shaft-furnace heat balance.

use thiserror::Error;

use crate::components::{Component, ComponentReport, Ledger};
use crate::thermo::{Composition, GasStream, PropertyTable, Species, ThermoError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FurnaceError {
    #[error(transparent)]
    Thermo(#[from] ThermoError),
    #[error("iron mass fraction {0} outside (0, 1]")]
    IronFraction(f64),
    #[error("DRI batch mass {0} kg must not be negative")]
    NegativeBatch(f64),
    #[error("reducing gas must contain only H2 and CO (got {0})")]
    GasComposition(String),
    #[error(
        "heat balance infeasible: circulating gas would be {n2:.6e} mol \
         (heat deficit {deficit:.6e} J that gas alone cannot cover)"
    )]
    NegativeCirculation { n2: f64, deficit: f64 },
    #[error(
        "heat balance degenerate: each mole of circulating gas carries {per_mol:.6e} J net \
         (top gas at {t_top} K leaves too hot relative to inlet {t_in} K)"
    )]
    NoNetHeat { per_mol: f64, t_in: f64, t_top: f64 },
}

/// Moles and masses implied by a DRI batch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stoichiometry {
    pub fe_mol: f64,
    /// Iron actually reduced in the furnace pass (`η_Fe · fe_mol`).
    pub fe_reduced: f64,
    /// Reduction gas (H₂ + CO), 3/2 per mol Fe.
    pub n1: f64,
    pub h2_mol: f64,
    pub co_mol: f64,
    pub ore_mass: f64,
    pub fe2o3_mol: f64,
    pub gangue_mass: f64,
    pub water_mol: f64,
    pub co2_mol: f64,
}

/// `Fe₂O₃ + 3 H₂ → 2 Fe + 3 H₂O` (and the CO analogue) scaled to `m_dri` kg of DRI.
pub fn stoichiometry(
    props: &PropertyTable,
    m_dri: f64,
    w_fe: f64,
    eta_fe: f64,
    gas: &Composition,
) -> Result<Stoichiometry, FurnaceError> {
    if !(w_fe > 0.0 && w_fe <= 1.0) {
        return Err(FurnaceError::IronFraction(w_fe));
    }
    if m_dri < 0.0 {
        return Err(FurnaceError::NegativeBatch(m_dri));
    }
    let (xh, xco) = reducing_shares(gas)?;
    let fe_mol = w_fe * m_dri / props.get(Species::Fe).molar_mass;
    let n1 = 1.5 * fe_mol;
    let fe2o3_mol = fe_mol / 2.0;
    let gangue_mass = m_dri * (1.0 - w_fe);
    Ok(Stoichiometry {
        fe_mol,
        fe_reduced: eta_fe * fe_mol,
        n1,
        h2_mol: xh * n1,
        co_mol: xco * n1,
        ore_mass: fe2o3_mol * props.get(Species::Fe2O3).molar_mass + gangue_mass,
        fe2o3_mol,
        gangue_mass,
        water_mol: xh * n1,
        co2_mol: xco * n1,
    })
}

/// H₂ and CO shares of a reducing gas.
pub fn reducing_shares(gas: &Composition) -> Result<(f64, f64), FurnaceError> {
    if gas.iter().any(|(s, _)| s != Species::H2 && s != Species::CO) {
        return Err(FurnaceError::GasComposition(gas.to_string()));
    }
    Ok((gas.fraction(Species::H2), gas.fraction(Species::CO)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FurnaceParams {
    /// Fraction of the gas heat input lost through the shell.
    pub eta1: f64,
    /// Fraction of dust sensible heat counted as loss.
    pub eta2: f64,
    pub dust_fraction: f64,
    pub c_dust: f64,
    pub c_dri: f64,
    pub c_ore: f64,
    pub t_ore: f64,
    /// Moles of water vapour per mole of reduction gas in the top gas.
    pub water_factor: f64,
    pub w_fe: f64,
    pub eta_fe: f64,
    /// Furnace gas pressure, Pa.
    pub pressure: f64,
}

impl Default for FurnaceParams {
    fn default() -> Self {
        Self {
            eta1: 0.15,
            eta2: 0.03,
            dust_fraction: 0.02,
            c_dust: 800.0,
            c_dri: 600.0,
            c_ore: 800.0,
            t_ore: 298.0,
            water_factor: 0.5,
            w_fe: 0.92,
            eta_fe: 0.94,
            pressure: 8.0e5,
        }
    }
}

/// Converged furnace state with every heat-balance term in joules.
#[derive(Debug, Clone, PartialEq)]
pub struct FurnaceBalance {
    pub n1: f64,
    pub n2: f64,
    pub t_in: f64,
    pub t_top: f64,
    pub t_dri: f64,
    pub w_gas_in: f64,
    pub w_ore_in: f64,
    pub w_reaction: f64,
    pub w_dri: f64,
    pub w_ch2: f64,
    pub w_loss: f64,
    pub w_dust: f64,
    pub w_h2o: f64,
}

impl FurnaceBalance {
    pub fn total_in(&self) -> f64 {
        self.w_gas_in + self.w_ore_in
    }

    /// Sum of the six outlet terms.
    pub fn total_out(&self) -> f64 {
        self.w_reaction + self.w_dri + self.w_ch2 + self.w_loss + self.w_dust + self.w_h2o
    }

    pub fn closure_residual(&self) -> f64 {
        (self.total_in() - self.total_out()) / self.total_in().abs().max(f64::MIN_POSITIVE)
    }

    pub fn gas_utilization(&self) -> f64 {
        self.n1 / (self.n1 + self.n2)
    }
}

struct BalanceTerms {
    a_gas: f64,
    fixed_in: f64,
    fixed_out: f64,
    w_reaction: f64,
    w_dri: f64,
    w_dust: f64,
    w_h2o: f64,
    w_ore_in: f64,
}

fn balance_terms(
    props: &PropertyTable,
    params: &FurnaceParams,
    st: &Stoichiometry,
    gas: &Composition,
    t_top: f64,
    t_dri: f64,
) -> Result<BalanceTerms, FurnaceError> {
    let t0 = props.t0;
    let (xh, xco) = reducing_shares(gas)?;
    let a_gas = props.mix_sensible_cp(gas)?;
    let a_w = xh * props.sensible_cp(Species::H2O)? + xco * props.sensible_cp(Species::CO2)?;
    let m_dri = st.fe_mol * props.get(Species::Fe).molar_mass / params.w_fe;
    let w_reaction = st.fe_reduced * (xh * props.dh_h2 + xco * props.dh_co);
    let w_dri = m_dri * params.c_dri * (t_dri - t0);
    let w_dust = params.eta2 * params.dust_fraction * st.ore_mass * params.c_dust * (t_top - t0);
    let w_h2o = params.water_factor * st.n1 * a_w * (t_top - t0);
    let w_ore_in = st.ore_mass * params.c_ore * (params.t_ore - t0);
    Ok(BalanceTerms {
        a_gas,
        fixed_in: w_ore_in,
        fixed_out: w_reaction + w_dri + w_dust + w_h2o,
        w_reaction,
        w_dri,
        w_dust,
        w_h2o,
        w_ore_in,
    })
}

/// Solves the linear furnace heat balance for the circulating gas `n2`.
///
/// Gas enters at `t_in`; the reduced gas (n1) leaves as water vapour and the
/// circulating gas (n2) leaves unreacted at `t_top`.
pub fn heat_balance_solve(
    props: &PropertyTable,
    params: &FurnaceParams,
    st: &Stoichiometry,
    gas: &Composition,
    t_in: f64,
    t_top: f64,
    t_dri: f64,
) -> Result<FurnaceBalance, FurnaceError> {
    let t0 = props.t0;
    let terms = balance_terms(props, params, st, gas, t_top, t_dri)?;
    let a = terms.a_gas;
    let keep = 1.0 - params.eta1;
    let per_mol = keep * a * (t_in - t0) - a * (t_top - t0);
    let deficit = terms.fixed_out - terms.fixed_in - keep * st.n1 * a * (t_in - t0);
    if !(per_mol > 0.0) {
        return Err(FurnaceError::NoNetHeat { per_mol, t_in, t_top });
    }
    let n2 = deficit / per_mol;
    if n2 < 0.0 {
        return Err(FurnaceError::NegativeCirculation { n2, deficit });
    }
    let w_gas_in = (st.n1 + n2) * a * (t_in - t0);
    Ok(FurnaceBalance {
        n1: st.n1,
        n2,
        t_in,
        t_top,
        t_dri,
        w_gas_in,
        w_ore_in: terms.w_ore_in,
        w_reaction: terms.w_reaction,
        w_dri: terms.w_dri,
        w_ch2: n2 * a * (t_top - t0),
        w_loss: params.eta1 * w_gas_in,
        w_dust: terms.w_dust,
        w_h2o: terms.w_h2o,
    })
}

/// Chemical energy and exergy carried across the furnace boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChemicalTerms {
    pub gas_in: f64,
    pub ore_in: f64,
    pub dri_out: f64,
    pub ch2_out: f64,
    pub h2o_out: f64,
    pub gas_in_ex: f64,
    pub ore_in_ex: f64,
    pub dri_out_ex: f64,
    pub ch2_out_ex: f64,
    pub h2o_out_ex: f64,
}

pub fn chemical_terms(
    props: &PropertyTable,
    params: &FurnaceParams,
    st: &Stoichiometry,
    balance: &FurnaceBalance,
    gas: &Composition,
) -> Result<ChemicalTerms, FurnaceError> {
    let (xh, xco) = reducing_shares(gas)?;
    let feed = GasStream::new(balance.n1 + balance.n2, gas.clone(), balance.t_in, params.pressure)?;
    let circ = feed.with_moles(balance.n2);
    let fe = props.get(Species::Fe);
    let ore = st.fe2o3_mol * props.get(Species::Fe2O3).ex;
    let water = params.water_factor * st.n1 * (xh * props.get(Species::H2O).ex + xco * props.get(Species::CO2).ex);
    Ok(ChemicalTerms {
        gas_in: props.gas_chemical_energy(&feed),
        ore_in: ore,
        dri_out: st.fe_reduced * fe.lhv,
        ch2_out: props.gas_chemical_energy(&circ),
        h2o_out: water,
        gas_in_ex: props.gas_chemical_exergy(&feed),
        ore_in_ex: ore,
        dri_out_ex: st.fe_reduced * fe.ex,
        ch2_out_ex: props.gas_chemical_exergy(&circ),
        h2o_out_ex: water,
    })
}

/// Furnace ledgers: the energy side carries the heat balance (closes exactly with
/// the shell loss as declared loss); the exergy side carries physical and chemical parts.
pub fn furnace_ledgers(
    props: &PropertyTable,
    params: &FurnaceParams,
    st: &Stoichiometry,
    balance: &FurnaceBalance,
    gas: &Composition,
) -> Result<(ComponentReport, ChemicalTerms), FurnaceError> {
    let (xh, xco) = reducing_shares(gas)?;
    let chem = chemical_terms(props, params, st, balance, gas)?;
    let feed = GasStream::new(balance.n1 + balance.n2, gas.clone(), balance.t_in, params.pressure)?;
    let top = feed.with_moles(balance.n2).at(balance.t_top, params.pressure);
    let kernel = |t: f64| props.exergy_kernel(t);
    let m_dri = st.fe_mol * props.get(Species::Fe).molar_mass / params.w_fe;
    let a_w = xh * props.sensible_cp(Species::H2O)? + xco * props.sensible_cp(Species::CO2)?;
    let dust_cap = params.dust_fraction * st.ore_mass * params.c_dust;

    let energy = Ledger::default()
        .input("gas physical", balance.w_gas_in)
        .input("ore physical", balance.w_ore_in)
        .output("reaction", balance.w_reaction)
        .output("DRI physical", balance.w_dri)
        .output("circulating gas physical", balance.w_ch2)
        .output("water vapour physical", balance.w_h2o)
        .output("dust", balance.w_dust);

    let exergy = Ledger::default()
        .input("gas physical", props.gas_physical_exergy(&feed)?)
        .input("gas chemical", chem.gas_in_ex)
        .input("ore physical", st.ore_mass * params.c_ore * kernel(params.t_ore))
        .input("ore chemical", chem.ore_in_ex)
        .output("DRI physical", m_dri * params.c_dri * kernel(balance.t_dri))
        .output("DRI chemical", chem.dri_out_ex)
        .output("circulating gas physical", props.gas_physical_exergy(&top)?)
        .output("circulating gas chemical", chem.ch2_out_ex)
        .output("water vapour physical", params.water_factor * st.n1 * a_w * kernel(balance.t_top))
        .output("water vapour chemical", chem.h2o_out_ex)
        .output("dust", params.eta2 * dust_cap * kernel(balance.t_top));

    Ok((ComponentReport { id: Component::ShaftFurnace, energy, exergy, loss: balance.w_loss }, chem))
}
