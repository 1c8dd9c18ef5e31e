//! Property data and stream-level energy/exergy primitives.
//!
//! Gas sensible energy uses the ideal-gas form `n·γ/(γ−1)·R·(T − T₀)` throughout,
//! so every component sees the same heat capacity for a given species. The `cp`
//! column of the property table is only used for transport numbers in the bed model.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Faraday constant, C/mol.
pub const FARADAY: f64 = 96_485.332_12;

const BUILTIN_TABLE: &str = include_str!("../data/properties.dat");

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ThermoError {
    #[error("property data line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("no property record for species {0}")]
    MissingSpecies(Species),
    #[error("species {species} has no {property} value")]
    MissingProperty { species: Species, property: &'static str },
    #[error("invalid property for {species}: {msg}")]
    InvalidProperty { species: Species, msg: String },
    #[error("invalid composition: {0}")]
    Composition(String),
    #[error("invalid stream: {0}")]
    Stream(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Species {
    H2,
    CO,
    H2O,
    CO2,
    O2,
    N2,
    CH4,
    Fe2O3,
    Fe,
    FeO,
    Fe3O4,
    Gangue,
    R32,
}

impl Species {
    pub const ALL: [Species; 13] = [
        Species::H2,
        Species::CO,
        Species::H2O,
        Species::CO2,
        Species::O2,
        Species::N2,
        Species::CH4,
        Species::Fe2O3,
        Species::Fe,
        Species::FeO,
        Species::Fe3O4,
        Species::Gangue,
        Species::R32,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Species::H2 => "H2",
            Species::CO => "CO",
            Species::H2O => "H2O",
            Species::CO2 => "CO2",
            Species::O2 => "O2",
            Species::N2 => "N2",
            Species::CH4 => "CH4",
            Species::Fe2O3 => "Fe2O3",
            Species::Fe => "Fe",
            Species::FeO => "FeO",
            Species::Fe3O4 => "Fe3O4",
            Species::Gangue => "gangue",
            Species::R32 => "R32",
        }
    }

    fn index(self) -> usize {
        Species::ALL.iter().position(|&s| s == self).unwrap()
    }

    /// Carbon atoms per molecule, used for combustion CO₂.
    pub fn carbon_atoms(self) -> f64 {
        match self {
            Species::CO | Species::CO2 | Species::CH4 => 1.0,
            _ => 0.0,
        }
    }
}

impl fmt::Display for Species {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Species {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Species::ALL
            .iter()
            .copied()
            .find(|sp| sp.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown species `{s}`"))
    }
}

/// One row of the property table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeciesData {
    pub molar_mass: f64,
    pub cp: f64,
    pub gamma: Option<f64>,
    pub lhv: f64,
    pub dg: f64,
    pub ex: f64,
    pub viscosity: Option<f64>,
    pub conductivity: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyTable {
    data: [SpeciesData; 13],
    pub r: f64,
    pub t0: f64,
    pub p0: f64,
    /// Reduction enthalpy per mol Fe, H₂ route (endothermic).
    pub dh_h2: f64,
    /// Reduction enthalpy per mol Fe, CO route (exothermic).
    pub dh_co: f64,
    pub coke_oven_gas: Composition,
}

impl PropertyTable {
    /// The table compiled into the crate.
    pub fn standard() -> Self {
        Self::parse(BUILTIN_TABLE).expect("built-in property table is valid")
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self, ThermoError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ThermoError::Parse { line: 0, msg: format!("{}: {e}", path.display()) })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ThermoError> {
        let mut rows: [Option<SpeciesData>; 13] = [None; 13];
        let mut r = None;
        let mut t0 = None;
        let mut p0 = None;
        let mut dh_h2 = None;
        let mut dh_co = None;
        let mut cog = None;

        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| ThermoError::Parse { line: line_no, msg };

            if let Some(rest) = line.strip_prefix("set ") {
                let (key, value) = rest.split_once('=').ok_or_else(|| err("expected `set KEY = VALUE`".into()))?;
                let key = key.trim();
                let value = value.trim();
                if key == "coke_oven_gas" {
                    cog = Some(Composition::parse(value).map_err(|e| err(e.to_string()))?);
                    continue;
                }
                let v: f64 = value.parse().map_err(|_| err(format!("`{value}` is not a number")))?;
                match key {
                    "R" => r = Some(v),
                    "T0" => t0 = Some(v),
                    "P0" => p0 = Some(v),
                    "dH_H2" => dh_h2 = Some(v),
                    "dH_CO" => dh_co = Some(v),
                    other => return Err(err(format!("unknown setting `{other}`"))),
                }
                continue;
            }

            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 7 && fields.len() != 9 {
                return Err(err(format!("expected 7 or 9 comma-separated fields, found {}", fields.len())));
            }
            let species: Species = fields[0].parse().map_err(err)?;
            let num = |idx: usize| -> Result<Option<f64>, ThermoError> {
                let f = fields.get(idx).copied().unwrap_or("-");
                if f == "-" {
                    return Ok(None);
                }
                f.parse::<f64>().map(Some).map_err(|_| err(format!("field {} `{f}` is not a number", idx + 1)))
            };
            let req = |idx: usize, name: &str| -> Result<f64, ThermoError> {
                num(idx)?.ok_or_else(|| err(format!("{name} is required")))
            };
            let row = SpeciesData {
                molar_mass: req(1, "M")?,
                cp: req(2, "cp")?,
                gamma: num(3)?,
                lhv: req(4, "LHV")?,
                dg: req(5, "dG")?,
                ex: req(6, "Ex")?,
                viscosity: num(7)?,
                conductivity: num(8)?,
            };
            if rows[species.index()].is_some() {
                return Err(err(format!("duplicate record for {species}")));
            }
            rows[species.index()] = Some(row);
        }

        let mut data = [SpeciesData {
            molar_mass: 0.0,
            cp: 0.0,
            gamma: None,
            lhv: 0.0,
            dg: 0.0,
            ex: 0.0,
            viscosity: None,
            conductivity: None,
        }; 13];
        for s in Species::ALL {
            let row = rows[s.index()].ok_or(ThermoError::MissingSpecies(s))?;
            check_row(s, &row)?;
            data[s.index()] = row;
        }

        let missing = |name: &str| ThermoError::Parse { line: 0, msg: format!("missing `set {name}`") };
        Ok(Self {
            data,
            r: r.ok_or_else(|| missing("R"))?,
            t0: t0.ok_or_else(|| missing("T0"))?,
            p0: p0.ok_or_else(|| missing("P0"))?,
            dh_h2: dh_h2.ok_or_else(|| missing("dH_H2"))?,
            dh_co: dh_co.ok_or_else(|| missing("dH_CO"))?,
            coke_oven_gas: cog.ok_or_else(|| missing("coke_oven_gas"))?,
        })
    }

    pub fn get(&self, s: Species) -> &SpeciesData {
        &self.data[s.index()]
    }

    /// Overrides one property of one species; `field` is a column name of the data file.
    pub fn set_property(&mut self, s: Species, field: &str, v: f64) -> Result<(), ThermoError> {
        let mut row = self.data[s.index()];
        match field.to_ascii_lowercase().as_str() {
            "m" => row.molar_mass = v,
            "cp" => row.cp = v,
            "gamma" => row.gamma = Some(v),
            "lhv" => row.lhv = v,
            "dg" => row.dg = v,
            "ex" => row.ex = v,
            "mu" => row.viscosity = Some(v),
            "k" => row.conductivity = Some(v),
            other => {
                return Err(ThermoError::InvalidProperty { species: s, msg: format!("unknown property `{other}`") })
            }
        }
        check_row(s, &row)?;
        self.data[s.index()] = row;
        Ok(())
    }

    pub fn gamma(&self, s: Species) -> Result<f64, ThermoError> {
        self.get(s).gamma.ok_or(ThermoError::MissingProperty { species: s, property: "gamma" })
    }

    /// γ/(γ−1)·R for one species, J/(mol·K).
    pub fn sensible_cp(&self, s: Species) -> Result<f64, ThermoError> {
        let g = self.gamma(s)?;
        Ok(g / (g - 1.0) * self.r)
    }

    /// Mole-weighted γ/(γ−1)·R of a mixture.
    pub fn mix_sensible_cp(&self, c: &Composition) -> Result<f64, ThermoError> {
        c.iter().map(|(s, x)| self.sensible_cp(s).map(|a| a * x)).sum()
    }

    /// Effective heat-capacity ratio of a mixture, consistent with [`Self::mix_sensible_cp`].
    pub fn mix_gamma(&self, c: &Composition) -> Result<f64, ThermoError> {
        let a = self.mix_sensible_cp(c)?;
        Ok(a / (a - self.r))
    }

    pub fn mix_molar_mass(&self, c: &Composition) -> f64 {
        c.iter().map(|(s, x)| x * self.get(s).molar_mass).sum()
    }

    pub fn mix_cp(&self, c: &Composition) -> f64 {
        c.iter().map(|(s, x)| x * self.get(s).cp).sum()
    }

    pub fn mix_lhv(&self, c: &Composition) -> f64 {
        c.iter().map(|(s, x)| x * self.get(s).lhv).sum()
    }

    pub fn mix_viscosity(&self, c: &Composition) -> Result<f64, ThermoError> {
        c.iter()
            .map(|(s, x)| {
                self.get(s)
                    .viscosity
                    .map(|v| v * x)
                    .ok_or(ThermoError::MissingProperty { species: s, property: "viscosity" })
            })
            .sum()
    }

    pub fn mix_conductivity(&self, c: &Composition) -> Result<f64, ThermoError> {
        c.iter()
            .map(|(s, x)| {
                self.get(s)
                    .conductivity
                    .map(|v| v * x)
                    .ok_or(ThermoError::MissingProperty { species: s, property: "conductivity" })
            })
            .sum()
    }

    /// `T − T₀ − T₀·ln(T/T₀)`, the thermal-exergy kernel per unit heat capacity.
    pub fn exergy_kernel(&self, t: f64) -> f64 {
        t - self.t0 - self.t0 * (t / self.t0).ln()
    }

    /// Sensible energy relative to T₀; negative for sub-ambient streams.
    pub fn gas_physical_energy(&self, s: &GasStream) -> Result<f64, ThermoError> {
        Ok(s.n * self.mix_sensible_cp(&s.composition)? * (s.t - self.t0))
    }

    pub fn gas_thermal_exergy(&self, s: &GasStream) -> Result<f64, ThermoError> {
        Ok(s.n * self.mix_sensible_cp(&s.composition)? * self.exergy_kernel(s.t))
    }

    /// Thermal plus pressure exergy.
    pub fn gas_physical_exergy(&self, s: &GasStream) -> Result<f64, ThermoError> {
        let pressure = s.n * self.r * self.t0 * (s.p / self.p0).ln();
        Ok(self.gas_thermal_exergy(s)? + pressure)
    }

    /// LHV-basis chemical energy of the combustible species.
    pub fn gas_chemical_energy(&self, s: &GasStream) -> f64 {
        s.n * self.mix_lhv(&s.composition)
    }

    /// `n·(Σφ·Ex + R·T₀·Σφ·ln φ)`.
    pub fn gas_chemical_exergy(&self, s: &GasStream) -> f64 {
        let standard: f64 = s.composition.iter().map(|(sp, x)| x * self.get(sp).ex).sum();
        s.n * (standard + self.mixing_term(&s.composition))
    }

    /// `R·T₀·Σφ·ln φ`, never positive.
    pub fn mixing_term(&self, c: &Composition) -> f64 {
        self.r * self.t0 * c.iter().filter(|&(_, x)| x > 0.0).map(|(_, x)| x * x.ln()).sum::<f64>()
    }
}

fn check_row(s: Species, row: &SpeciesData) -> Result<(), ThermoError> {
    let invalid = |msg: String| Err(ThermoError::InvalidProperty { species: s, msg });
    if !(row.molar_mass > 0.0) {
        return invalid("molar mass must be positive".into());
    }
    if !(row.cp > 0.0) {
        return invalid("cp must be positive".into());
    }
    if let Some(g) = row.gamma {
        if !(g > 1.0) {
            return invalid(format!("gamma {g} must exceed 1"));
        }
    }
    for (name, v) in [("viscosity", row.viscosity), ("conductivity", row.conductivity)] {
        if let Some(v) = v {
            if !(v > 0.0) {
                return invalid(format!("{name} {v} must be positive"));
            }
        }
    }
    Ok(())
}

/// Mole fractions of a gas mixture, kept in species order.
#[derive(Debug, Clone, PartialEq)]
pub struct Composition(Vec<(Species, f64)>);

impl Composition {
    pub fn new(parts: &[(Species, f64)]) -> Result<Self, ThermoError> {
        let mut v: Vec<(Species, f64)> = Vec::with_capacity(parts.len());
        for &(s, x) in parts {
            if !(0.0..=1.0).contains(&x) {
                return Err(ThermoError::Composition(format!("fraction of {s} is {x}, outside [0, 1]")));
            }
            if v.iter().any(|(t, _)| *t == s) {
                return Err(ThermoError::Composition(format!("{s} listed twice")));
            }
            if x > 0.0 {
                v.push((s, x));
            }
        }
        let sum: f64 = v.iter().map(|(_, x)| x).sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(ThermoError::Composition(format!("fractions sum to {sum}, not 1")));
        }
        v.sort_by_key(|(s, _)| *s);
        Ok(Self(v))
    }

    pub fn pure(s: Species) -> Self {
        Self(vec![(s, 1.0)])
    }

    /// Parses `H2:0.58 CH4:0.26 ...`.
    pub fn parse(text: &str) -> Result<Self, ThermoError> {
        let mut parts = Vec::new();
        for tok in text.split_whitespace() {
            let (s, x) = tok.split_once(':').ok_or_else(|| ThermoError::Composition(format!("bad entry `{tok}`")))?;
            let s: Species = s.parse().map_err(ThermoError::Composition)?;
            let x: f64 = x.parse().map_err(|_| ThermoError::Composition(format!("bad fraction in `{tok}`")))?;
            parts.push((s, x));
        }
        Self::new(&parts)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Species, f64)> + '_ {
        self.0.iter().copied()
    }

    pub fn fraction(&self, s: Species) -> f64 {
        self.0.iter().find(|(t, _)| *t == s).map(|(_, x)| *x).unwrap_or(0.0)
    }

    /// Moles of carbon per mole of mixture.
    pub fn carbon_per_mol(&self) -> f64 {
        self.iter().map(|(s, x)| x * s.carbon_atoms()).sum()
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (s, x)) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{s}:{x}")?;
        }
        Ok(())
    }
}

/// Gas quantity per batch at a given state.
#[derive(Debug, Clone, PartialEq)]
pub struct GasStream {
    pub n: f64,
    pub composition: Composition,
    pub t: f64,
    pub p: f64,
}

impl GasStream {
    pub fn new(n: f64, composition: Composition, t: f64, p: f64) -> Result<Self, ThermoError> {
        if !(n >= 0.0) || !n.is_finite() {
            return Err(ThermoError::Stream(format!("molar amount {n} must be >= 0")));
        }
        if !(t > 0.0) {
            return Err(ThermoError::Stream(format!("temperature {t} K must be > 0")));
        }
        if !(p > 0.0) {
            return Err(ThermoError::Stream(format!("pressure {p} Pa must be > 0")));
        }
        Ok(Self { n, composition, t, p })
    }

    pub fn pure(s: Species, n: f64, t: f64, p: f64) -> Result<Self, ThermoError> {
        Self::new(n, Composition::pure(s), t, p)
    }

    pub fn at(&self, t: f64, p: f64) -> Self {
        Self { t, p, ..self.clone() }
    }

    pub fn with_moles(&self, n: f64) -> Self {
        Self { n, ..self.clone() }
    }
}

/// Ore or DRI per batch. Fractions are mass fractions.
#[derive(Debug, Clone, PartialEq)]
pub struct SolidStream {
    pub mass: f64,
    pub fractions: Vec<(Species, f64)>,
    pub t: f64,
}

impl SolidStream {
    pub fn new(mass: f64, fractions: Vec<(Species, f64)>, t: f64) -> Result<Self, ThermoError> {
        if !(mass >= 0.0) {
            return Err(ThermoError::Stream(format!("solid mass {mass} must be >= 0")));
        }
        let sum: f64 = fractions.iter().map(|(_, w)| w).sum();
        if fractions.iter().any(|(_, w)| !(0.0..=1.0).contains(w)) || (sum - 1.0).abs() > 1e-9 {
            return Err(ThermoError::Composition(format!(
                "solid mass fractions must lie in [0,1] and sum to 1 (sum {sum})"
            )));
        }
        Ok(Self { mass, fractions, t })
    }

    pub fn mass_of(&self, s: Species) -> f64 {
        self.fractions.iter().filter(|(t, _)| *t == s).map(|(_, w)| w * self.mass).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn h2(n: f64, t: f64) -> GasStream {
        GasStream::pure(Species::H2, n, t, 101_325.0).unwrap()
    }

    #[test]
    fn table_is_complete() {
        let p = PropertyTable::standard();
        for s in Species::ALL {
            assert!(p.get(s).molar_mass > 0.0);
        }
        assert!(p.dh_h2 > 0.0 && p.dh_co < 0.0);
        assert_relative_eq!(p.mix_lhv(&p.coke_oven_gas), 371_500.0, max_relative = 1e-3);
    }

    #[test]
    fn h2_energy_and_exergy_at_398() {
        let p = PropertyTable::standard();
        assert_eq!(p.gas_physical_energy(&h2(1.0, 298.0)).unwrap(), 0.0);
        assert_relative_eq!(p.gas_physical_energy(&h2(1.0, 398.0)).unwrap(), 2.859e3, max_relative = 1e-3);
        let ex = p.gas_physical_exergy(&h2(1.0, 398.0)).unwrap();
        assert_relative_eq!(ex, 4.00e2, max_relative = 0.02);
        assert_relative_eq!(ex, 393.77, max_relative = 1e-4);
    }

    #[test]
    fn equimolar_mixing_term() {
        let p = PropertyTable::standard();
        let c = Composition::new(&[(Species::H2, 0.5), (Species::CO, 0.5)]).unwrap();
        assert_relative_eq!(p.mixing_term(&c), -1.717e3, max_relative = 1e-3);
        let s = GasStream::new(1.0, c, 298.0, 101_325.0).unwrap();
        let mean = 0.5 * (236_100.0 + 275_100.0);
        assert_relative_eq!(p.gas_chemical_exergy(&s), mean - 1717.3, max_relative = 1e-5);
    }

    #[test]
    fn chemical_energy_is_linear_in_composition() {
        let p = PropertyTable::standard();
        let c = Composition::new(&[(Species::H2, 0.6), (Species::CO, 0.4)]).unwrap();
        let s = GasStream::new(10.0, c, 298.0, 101_325.0).unwrap();
        assert_relative_eq!(p.gas_chemical_energy(&s), 6.0 * 241_800.0 + 4.0 * 283_000.0);
        let w = GasStream::pure(Species::H2O, 3.0, 400.0, 101_325.0).unwrap();
        assert_eq!(p.gas_chemical_energy(&w), 0.0);
    }

    #[test]
    fn rejects_bad_rows() {
        let bad = BUILTIN_TABLE.replace("H2,     2.016e-3,   29.2,  1.41", "H2,     2.016e-3,   29.2,  0.9");
        assert!(matches!(PropertyTable::parse(&bad), Err(ThermoError::InvalidProperty { species: Species::H2, .. })));
        let missing: String =
            BUILTIN_TABLE.lines().filter(|l| !l.starts_with("FeO")).map(|l| format!("{l}\n")).collect();
        assert_eq!(PropertyTable::parse(&missing), Err(ThermoError::MissingSpecies(Species::FeO)));
    }

    #[test]
    fn composition_must_sum_to_one() {
        assert!(Composition::new(&[(Species::H2, 0.5), (Species::CO, 0.4)]).is_err());
        let c = Composition::parse("H2:0.58 CH4:0.26 CO:0.08 N2:0.08").unwrap();
        assert_relative_eq!(c.carbon_per_mol(), 0.34);
    }
}
