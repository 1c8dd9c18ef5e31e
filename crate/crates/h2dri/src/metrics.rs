//! Efficiency indices and carbon-cost accounting.

use thiserror::Error;

/// J per MWh.
pub const J_PER_MWH: f64 = 3.6e9;
/// J per kWh.
pub const J_PER_KWH: f64 = 3.6e6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("{what} is undefined: denominator is {value}")]
    Undefined { what: &'static str, value: f64 },
    #[error("carbon block invalid: {0}")]
    CarbonBlock(String),
}

/// Carbon-pricing parameters plus the emissions of one run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CarbonBlock {
    /// Actual emissions, t CO₂.
    pub c_dri: f64,
    /// Allowance, t CO₂.
    pub c_base: f64,
    /// Carbon price, CNY/t.
    pub p_co2: f64,
    /// Energy price, CNY per kWh.
    pub energy_price_kwh: f64,
    /// Multiplier on the `(1, 1.2]` band.
    pub theta: f64,
    /// Multiplier above 1.2.
    pub nu: f64,
    /// When false, CE is the plain ratio.
    pub penalty: bool,
}

impl Default for CarbonBlock {
    fn default() -> Self {
        Self { c_dri: 0.0, c_base: 1.6, p_co2: 120.0, energy_price_kwh: 0.5, theta: 1.2, nu: 1.5, penalty: true }
    }
}

impl CarbonBlock {
    pub fn validate(&self) -> Result<(), MetricsError> {
        let fields = [
            ("C_DRI", self.c_dri),
            ("C_base", self.c_base),
            ("P_CO2", self.p_co2),
            ("energy price", self.energy_price_kwh),
        ];
        for (name, v) in fields {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(MetricsError::CarbonBlock(format!("{name} = {v} must be non-negative")));
            }
        }
        if !(self.theta >= 1.0 && self.nu >= self.theta) {
            return Err(MetricsError::CarbonBlock(format!(
                "need 1 <= theta <= nu, got theta = {}, nu = {}",
                self.theta, self.nu
            )));
        }
        if self.c_base == 0.0 && self.c_dri > 0.0 {
            return Err(MetricsError::CarbonBlock("C_base is zero but emissions are positive".into()));
        }
        if self.energy_price_kwh == 0.0 && self.c_dri > 0.0 {
            return Err(MetricsError::CarbonBlock("energy price is zero".into()));
        }
        Ok(())
    }

    /// Energy price, CNY/J.
    pub fn m_energy(&self) -> f64 {
        self.energy_price_kwh / J_PER_KWH
    }
}

/// Piecewise penalized emissions ratio.
pub fn penalized_ratio(x: f64, theta: f64, nu: f64) -> f64 {
    if x <= 1.0 {
        x
    } else if x <= 1.2 {
        theta * x
    } else {
        nu * x
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CarbonEquivalent {
    /// Allowance value expressed as energy, J.
    pub phi_ce: f64,
    pub ce: f64,
    /// Carbon-cost energy equivalent, J.
    pub cet: f64,
}

pub fn carbon_equivalent(block: &CarbonBlock) -> Result<CarbonEquivalent, MetricsError> {
    block.validate()?;
    if block.c_dri == 0.0 {
        return Ok(CarbonEquivalent { phi_ce: phi_ce(block), ce: 0.0, cet: 0.0 });
    }
    let x = block.c_dri / block.c_base;
    let ce = if block.penalty { penalized_ratio(x, block.theta, block.nu) } else { x };
    let phi = phi_ce(block);
    Ok(CarbonEquivalent { phi_ce: phi, ce, cet: phi * ce })
}

fn phi_ce(block: &CarbonBlock) -> f64 {
    if block.energy_price_kwh == 0.0 {
        0.0
    } else {
        block.c_base * block.p_co2 / block.m_energy()
    }
}

/// Grid emissions for `electricity` joules at `factor` t/MWh.
pub fn grid_emissions(electricity: f64, factor: f64) -> f64 {
    electricity / J_PER_MWH * factor
}

fn ratio(num: f64, den: f64, what: &'static str) -> Result<f64, MetricsError> {
    if den == 0.0 || !den.is_finite() {
        return Err(MetricsError::Undefined { what, value: den });
    }
    Ok(num / den)
}

pub fn energy_efficiency(w_out: f64, w_in: f64) -> Result<f64, MetricsError> {
    ratio(w_out, w_in, "energy efficiency")
}

pub fn exergy_efficiency(ex_out: f64, ex_in: f64) -> Result<f64, MetricsError> {
    ratio(ex_out, ex_in, "exergy efficiency")
}

pub fn energy_carbon_efficiency(w_out: f64, w_in: f64, cet: f64) -> Result<f64, MetricsError> {
    ratio(w_out - cet, w_in, "energy-carbon efficiency")
}

pub fn hydrogen_utilization(n1: f64, n2: f64) -> Result<f64, MetricsError> {
    ratio(n1, n1 + n2, "hydrogen utilization")
}

/// System aggregates, J.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Aggregates {
    pub w_in: f64,
    pub w_out: f64,
    pub w_vin: f64,
    pub w_vout: f64,
    pub ex_in: f64,
    pub ex_out: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EfficiencyReport {
    pub eta_ven: f64,
    pub ee: f64,
    pub exe: f64,
    pub ec: f64,
    pub eta_h2: f64,
    pub ce: f64,
    pub cet: f64,
}

pub fn evaluate(agg: &Aggregates, n1: f64, n2: f64, block: &CarbonBlock) -> Result<EfficiencyReport, MetricsError> {
    let carbon = carbon_equivalent(block)?;
    Ok(EfficiencyReport {
        eta_ven: energy_efficiency(agg.w_vout, agg.w_vin)?,
        ee: energy_efficiency(agg.w_out, agg.w_in)?,
        exe: exergy_efficiency(agg.ex_out, agg.ex_in)?,
        ec: energy_carbon_efficiency(agg.w_out, agg.w_in, carbon.cet)?,
        eta_h2: hydrogen_utilization(n1, n2)?,
        ce: carbon.ce,
        cet: carbon.cet,
    })
}
