//! Counter-current gas–solid heat transfer in the reduction zone.
//!
//! `z` runs downward from the top of the bed (`z = 0`, ore inlet) to the bottom
//! (`z = L`, hot-gas inlet). With gas rising and solids descending,
//!
//! ```text
//! dTg/dz = A·(Tg − Ts) + B·(Tg − T∞)
//! dTs/dz = C·(Tg − Ts)
//! ```
//!
//! where `A = a_v·S·h_p/(ṁ_g·c_g)`, `B = π·D·h_w/(ṁ_g·c_g)` and
//! `C = a_v·S·h_p/(W·c_s)`. Both temperatures then rise with `z`.

use std::f64::consts::PI;

use thiserror::Error;

use crate::thermo::{Composition, PropertyTable, ThermoError};

/// Largest `|λ|·h` accepted for an RK4 step; the real-axis stability bound is about 2.785.
const RK4_STABLE_STEP: f64 = 2.5;
const MAX_STEPS: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KineticsError {
    #[error(transparent)]
    Thermo(#[from] ThermoError),
    #[error("bed parameter {name} = {value} is out of range")]
    InvalidBed { name: &'static str, value: f64 },
    #[error("gas inlet {t_gas} K must be hotter than solid inlet {t_solid} K")]
    NoDrivingForce { t_gas: f64, t_solid: f64 },
    #[error("shooting did not converge after {iterations} iterations (boundary residual {residual:.3e} K)")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("profile too stiff: stable integration needs {required} steps (limit {MAX_STEPS})")]
    StiffProfile { required: usize },
}

/// Packed-bed description at the operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BedSpec {
    pub porosity: f64,
    pub pellet_diameter: f64,
    pub diameter: f64,
    pub length: f64,
    /// Gas density at film temperature, kg/m³.
    pub gas_density: f64,
    /// Superficial gas velocity, m/s.
    pub velocity: f64,
    pub viscosity: f64,
    pub conductivity: f64,
    /// Gas specific heat, J/(kg·K).
    pub gas_cp: f64,
    /// Solids mass flow, kg/s.
    pub solids_flow: f64,
    /// Solids specific heat, J/(kg·K).
    pub solid_cp: f64,
    /// Wall heat-loss coefficient, W/(m²·K).
    pub wall_coefficient: f64,
}

/// Geometry and operating knobs used to build a [`BedSpec`] from flowsheet state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BedGeometry {
    pub length: f64,
    pub diameter: f64,
    pub pellet_diameter: f64,
    pub porosity: f64,
    pub wall_coefficient: f64,
    /// Gas molar throughput, mol/s; fixes the residence time of one batch.
    pub gas_throughput: f64,
    pub steps: usize,
}

impl Default for BedGeometry {
    fn default() -> Self {
        Self {
            length: 8.0,
            diameter: 2.0,
            pellet_diameter: 0.012,
            porosity: 0.5,
            wall_coefficient: 57.5,
            gas_throughput: 200.0,
            steps: 400,
        }
    }
}

/// Batch-level inputs for [`BedSpec::from_operation`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BedOperation<'a> {
    pub gas: &'a Composition,
    /// Gas moles per batch.
    pub gas_moles: f64,
    /// Solids per batch, kg.
    pub solids_mass: f64,
    pub solid_cp: f64,
    pub pressure: f64,
    pub t_gas_in: f64,
    pub t_solid_in: f64,
}

impl BedSpec {
    /// Converts batch quantities into flow rates: the batch passes in
    /// `gas_moles / gas_throughput` seconds; gas properties at film temperature.
    pub fn from_operation(
        props: &PropertyTable,
        geom: &BedGeometry,
        op: &BedOperation<'_>,
    ) -> Result<Self, KineticsError> {
        if !(op.gas_moles > 0.0) {
            return Err(KineticsError::InvalidBed { name: "gas moles", value: op.gas_moles });
        }
        let m = props.mix_molar_mass(op.gas);
        let duration = op.gas_moles / geom.gas_throughput;
        let mass_flow = geom.gas_throughput * m;
        let t_film = 0.5 * (op.t_gas_in + op.t_solid_in);
        let rho = op.pressure * m / (props.r * t_film);
        let area = PI * geom.diameter * geom.diameter / 4.0;
        let bed = Self {
            porosity: geom.porosity,
            pellet_diameter: geom.pellet_diameter,
            diameter: geom.diameter,
            length: geom.length,
            gas_density: rho,
            velocity: mass_flow / (rho * area),
            viscosity: props.mix_viscosity(op.gas)?,
            conductivity: props.mix_conductivity(op.gas)?,
            gas_cp: props.mix_cp(op.gas) / m,
            solids_flow: op.solids_mass / duration,
            solid_cp: op.solid_cp,
            wall_coefficient: geom.wall_coefficient,
        };
        bed.validate()?;
        Ok(bed)
    }

    pub fn validate(&self) -> Result<(), KineticsError> {
        if !(self.porosity > 0.0 && self.porosity < 1.0) {
            return Err(KineticsError::InvalidBed { name: "porosity", value: self.porosity });
        }
        let positive = [
            ("pellet diameter", self.pellet_diameter),
            ("diameter", self.diameter),
            ("length", self.length),
            ("gas density", self.gas_density),
            ("viscosity", self.viscosity),
            ("conductivity", self.conductivity),
            ("gas cp", self.gas_cp),
            ("solids flow", self.solids_flow),
            ("solid cp", self.solid_cp),
        ];
        for (name, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(KineticsError::InvalidBed { name, value });
            }
        }
        for (name, value) in [("velocity", self.velocity), ("wall coefficient", self.wall_coefficient)] {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(KineticsError::InvalidBed { name, value });
            }
        }
        Ok(())
    }

    pub fn area(&self) -> f64 {
        PI * self.diameter * self.diameter / 4.0
    }

    /// Volumetric gas flow, m³/s.
    pub fn gas_volume_flow(&self) -> f64 {
        self.velocity * self.area()
    }

    pub fn gas_mass_flow(&self) -> f64 {
        self.gas_density * self.gas_volume_flow()
    }

    /// Pellet surface per bed volume, 1/m.
    pub fn specific_surface(&self) -> f64 {
        6.0 * (1.0 - self.porosity) / self.pellet_diameter
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransportNumbers {
    pub reynolds: f64,
    pub prandtl: f64,
    pub nusselt: f64,
    /// Gas–particle heat-transfer coefficient, W/(m²·K).
    pub h_p: f64,
}

pub fn transport_numbers(bed: &BedSpec) -> TransportNumbers {
    let reynolds = bed.gas_density * bed.velocity * bed.pellet_diameter / bed.viscosity;
    let prandtl = bed.gas_cp * bed.viscosity / bed.conductivity;
    let nusselt = 2.0 + 0.39 * reynolds.sqrt() * prandtl.powf(0.33);
    TransportNumbers { reynolds, prandtl, nusselt, h_p: bed.conductivity / bed.pellet_diameter * nusselt }
}

/// Coefficients of the linear ODE system, per metre.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExchangeCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl ExchangeCoefficients {
    pub fn of(bed: &BedSpec, h_p: f64) -> Self {
        let gas_cap = bed.gas_mass_flow() * bed.gas_cp;
        let solid_cap = bed.solids_flow * bed.solid_cp;
        let exchange = bed.specific_surface() * bed.area() * h_p;
        let wall = PI * bed.diameter * bed.wall_coefficient;
        if gas_cap > 0.0 {
            Self { a: exchange / gas_cap, b: wall / gas_cap, c: exchange / solid_cap }
        } else {
            Self { a: 0.0, b: 0.0, c: exchange / solid_cap }
        }
    }

    /// Largest eigenvalue magnitude of the system matrix.
    pub fn spectral_radius(&self) -> f64 {
        let tr = self.a + self.b - self.c;
        let det = -self.b * self.c;
        let disc = (tr * tr - 4.0 * det).max(0.0).sqrt();
        ((tr + disc) / 2.0).abs().max(((tr - disc) / 2.0).abs())
    }

    fn rhs(&self, tg: f64, ts: f64, t_amb: f64) -> (f64, f64) {
        (self.a * (tg - ts) + self.b * (tg - t_amb), self.c * (tg - ts))
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TemperatureProfile {
    pub z: Vec<f64>,
    pub t_gas: Vec<f64>,
    pub t_solid: Vec<f64>,
}

impl TemperatureProfile {
    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    pub fn rows(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.z.iter().zip(&self.t_gas).zip(&self.t_solid).map(|((z, g), s)| (*z, *g, *s))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileSolution {
    pub profile: TemperatureProfile,
    pub t_topgas: f64,
    pub t_dri: f64,
    /// `|T_gas(L) − T_gas,bottom|` at convergence, K.
    pub boundary_residual: f64,
    pub iterations: usize,
    pub steps: usize,
    pub transport: TransportNumbers,
    pub coefficients: ExchangeCoefficients,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootingOptions {
    pub steps: usize,
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for ShootingOptions {
    fn default() -> Self {
        Self { steps: 400, tolerance: 0.1, max_iterations: 100 }
    }
}

fn integrate(
    k: &ExchangeCoefficients,
    t_top_gas: f64,
    t_solid_top: f64,
    t_amb: f64,
    length: f64,
    steps: usize,
    keep: bool,
) -> (f64, f64, TemperatureProfile) {
    let h = length / steps as f64;
    let (mut g, mut s) = (t_top_gas, t_solid_top);
    let mut prof = TemperatureProfile::default();
    if keep {
        prof.z.reserve(steps + 1);
        prof.t_gas.reserve(steps + 1);
        prof.t_solid.reserve(steps + 1);
        prof.z.push(0.0);
        prof.t_gas.push(g);
        prof.t_solid.push(s);
    }
    for i in 0..steps {
        let (k1g, k1s) = k.rhs(g, s, t_amb);
        let (k2g, k2s) = k.rhs(g + 0.5 * h * k1g, s + 0.5 * h * k1s, t_amb);
        let (k3g, k3s) = k.rhs(g + 0.5 * h * k2g, s + 0.5 * h * k2s, t_amb);
        let (k4g, k4s) = k.rhs(g + h * k3g, s + h * k3s, t_amb);
        g += h / 6.0 * (k1g + 2.0 * k2g + 2.0 * k3g + k4g);
        s += h / 6.0 * (k1s + 2.0 * k2s + 2.0 * k3s + k4s);
        if keep {
            prof.z.push((i + 1) as f64 * h);
            prof.t_gas.push(g);
            prof.t_solid.push(s);
        }
    }
    (g, s, prof)
}

/// Steps needed for a stable RK4 march, at least `requested`.
pub fn stable_steps(k: &ExchangeCoefficients, length: f64, requested: usize) -> Result<usize, KineticsError> {
    let needed = (length * k.spectral_radius() / RK4_STABLE_STEP).ceil() as usize;
    let steps = requested.max(needed).max(1);
    if steps > MAX_STEPS {
        return Err(KineticsError::StiffProfile { required: steps });
    }
    Ok(steps)
}

/// Solves the two-point problem `Ts(0) = t_solid_top`, `Tg(L) = t_gas_bottom`
/// by shooting on `Tg(0)` with secant updates.
pub fn solve_profile(
    bed: &BedSpec,
    t_gas_bottom: f64,
    t_solid_top: f64,
    t_ambient: f64,
    opts: &ShootingOptions,
) -> Result<ProfileSolution, KineticsError> {
    bed.validate()?;
    if !(t_gas_bottom > t_solid_top) {
        return Err(KineticsError::NoDrivingForce { t_gas: t_gas_bottom, t_solid: t_solid_top });
    }
    let transport = transport_numbers(bed);
    let k = ExchangeCoefficients::of(bed, transport.h_p);
    let steps = stable_steps(&k, bed.length, opts.steps)?;
    let miss = |guess: f64| integrate(&k, guess, t_solid_top, t_ambient, bed.length, steps, false).0 - t_gas_bottom;

    let mut x0 = t_gas_bottom;
    let mut f0 = miss(x0);
    let mut x1 = 0.5 * (t_gas_bottom + t_solid_top);
    let mut f1 = miss(x1);
    let mut iterations = 0;
    while f1.abs() >= opts.tolerance || !f1.is_finite() {
        if iterations >= opts.max_iterations || f1 == f0 || !f1.is_finite() {
            return Err(KineticsError::NoConvergence { iterations, residual: f1.abs() });
        }
        let x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = miss(x1);
        iterations += 1;
    }
    // Polish once more so the residual sits well inside the tolerance.
    if f1 != f0 && f1 != 0.0 {
        let x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        let f2 = miss(x2);
        if f2.abs() < f1.abs() {
            x1 = x2;
        }
    }
    let (_, t_dri, profile) = integrate(&k, x1, t_solid_top, t_ambient, bed.length, steps, true);
    let t_bottom = *profile.t_gas.last().unwrap_or(&x1);
    Ok(ProfileSolution {
        t_topgas: x1,
        t_dri,
        boundary_residual: (t_bottom - t_gas_bottom).abs(),
        iterations,
        steps,
        transport,
        coefficients: k,
        profile,
    })
}

/// Gas enthalpy lost, solid enthalpy gained and wall loss (Simpson quadrature), W.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxBalance {
    pub gas_loss: f64,
    pub solid_gain: f64,
    pub wall_loss: f64,
}

impl FluxBalance {
    pub fn relative_error(&self) -> f64 {
        (self.gas_loss - self.solid_gain - self.wall_loss).abs() / self.gas_loss.abs().max(f64::MIN_POSITIVE)
    }
}

pub fn flux_balance(bed: &BedSpec, sol: &ProfileSolution, t_ambient: f64) -> FluxBalance {
    let p = &sol.profile;
    let n = p.len();
    let gas_loss = bed.gas_mass_flow() * bed.gas_cp * (p.t_gas[n - 1] - p.t_gas[0]);
    let solid_gain = bed.solids_flow * bed.solid_cp * (p.t_solid[n - 1] - p.t_solid[0]);
    let per_len = PI * bed.diameter * bed.wall_coefficient;
    let f: Vec<f64> = p.t_gas.iter().map(|t| per_len * (t - t_ambient)).collect();
    FluxBalance { gas_loss, solid_gain, wall_loss: simpson(&p.z, &f) }
}

fn simpson(z: &[f64], f: &[f64]) -> f64 {
    let n = z.len();
    if n < 2 {
        return 0.0;
    }
    let h = z[1] - z[0];
    let intervals = n - 1;
    let even = intervals - intervals % 2;
    let mut sum = 0.0;
    let mut i = 0;
    while i < even {
        sum += h / 3.0 * (f[i] + 4.0 * f[i + 1] + f[i + 2]);
        i += 2;
    }
    if even < intervals {
        sum += 0.5 * h * (f[n - 2] + f[n - 1]);
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn bed() -> BedSpec {
        BedSpec {
            porosity: 0.5,
            pellet_diameter: 0.012,
            diameter: 2.0,
            length: 8.0,
            gas_density: 0.08,
            velocity: 1.5,
            viscosity: 1.9e-5,
            conductivity: 0.45,
            gas_cp: 14_484.0,
            solids_flow: 2.0,
            solid_cp: 600.0,
            wall_coefficient: 57.5,
        }
    }

    #[test]
    fn reynolds_oracle() {
        assert_relative_eq!(transport_numbers(&bed()).reynolds, 75.8, max_relative = 1e-3);
    }

    #[test]
    fn stagnant_film_limit() {
        let b = BedSpec { velocity: 0.0, ..bed() };
        let t = transport_numbers(&b);
        assert_eq!(t.nusselt, 2.0);
        assert_relative_eq!(t.h_p, 2.0 * b.conductivity / b.pellet_diameter);
    }

    #[test]
    fn decoupled_limit_keeps_profiles_flat() {
        let b = BedSpec { conductivity: 1e-300, wall_coefficient: 0.0, ..bed() };
        let sol = solve_profile(&b, 1273.0, 298.0, 298.0, &ShootingOptions::default()).unwrap();
        assert_relative_eq!(sol.t_topgas, 1273.0, epsilon = 1e-6);
        assert_relative_eq!(sol.t_dri, 298.0, epsilon = 1e-6);
    }

    #[test]
    fn converged_profile_is_monotone_and_balanced() {
        let sol = solve_profile(&bed(), 1273.0, 298.0, 298.0, &ShootingOptions::default()).unwrap();
        assert!(sol.boundary_residual < 0.1);
        for w in sol.profile.t_gas.windows(2) {
            assert!(w[1] >= w[0] - 1e-9);
        }
        for w in sol.profile.t_solid.windows(2) {
            assert!(w[1] >= w[0] - 1e-9);
        }
        assert!(flux_balance(&bed(), &sol, 298.0).relative_error() < 5e-3);
    }

    #[test]
    fn stiff_beds_refine_the_grid() {
        let b = BedSpec { solids_flow: 0.01, ..bed() };
        let sol = solve_profile(&b, 1273.0, 298.0, 298.0, &ShootingOptions::default()).unwrap();
        assert!(sol.steps > 400);
        assert!(sol.boundary_residual < 0.1);
    }

    #[test]
    fn rejects_reversed_driving_force() {
        assert!(matches!(
            solve_profile(&bed(), 298.0, 500.0, 298.0, &ShootingOptions::default()),
            Err(KineticsError::NoDrivingForce { .. })
        ));
    }
}
