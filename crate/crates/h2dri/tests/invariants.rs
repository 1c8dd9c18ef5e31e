use approx::assert_relative_eq;
use proptest::prelude::*;

use h2dri::components::{compressor_train, Component, StageSpec};
use h2dri::metrics::{carbon_equivalent, CarbonBlock};
use h2dri::sweep::default_grid;
use h2dri::{
    run_sweep, solve_scenario, Execution, GasStream, PropertyTable, ScenarioConfig, ScenarioKind, Species, SweepSpec,
};

fn props() -> PropertyTable {
    PropertyTable::standard()
}

proptest! {
    #[test]
    fn thermal_exergy_positive_and_below_energy(t in 300.0f64..1600.0, n in 1.0f64..1e4) {
        let p = props();
        let g = GasStream::pure(Species::H2, n, t, p.p0).unwrap();
        let ex = p.gas_thermal_exergy(&g).unwrap();
        let en = p.gas_physical_energy(&g).unwrap();
        prop_assert!(ex > 0.0);
        prop_assert!(ex < en);
    }

    #[test]
    fn physical_exergy_additive_in_moles(t in 310.0f64..1500.0, a in 1.0f64..1e3, b in 1.0f64..1e3) {
        let p = props();
        let ex = |n| p.gas_physical_exergy(&GasStream::pure(Species::H2, n, t, 2.0 * p.p0).unwrap()).unwrap();
        let sum = ex(a) + ex(b);
        prop_assert!((ex(a + b) - sum).abs() <= 1e-9 * sum.abs());
    }

    #[test]
    fn compressor_obeys_second_law(
        n in 1.0f64..1e4,
        ratio in 1.1f64..4.0,
        eta in 0.6f64..1.0,
        stages in 1usize..4,
    ) {
        let p = props();
        let g = GasStream::pure(Species::H2, n, p.t0, p.p0).unwrap();
        let run = compressor_train(&p, Component::ReductionCompressor, &g, &StageSpec::repeated(ratio, eta, stages)).unwrap();
        prop_assert!(run.report.exergy_destruction() >= -1e-9 * run.report.exergy.total_in());
        prop_assert!(run.report.energy_residual().abs() <= 1e-9 * run.report.energy.total_in());
    }

    #[test]
    fn compressor_work_grows_with_ratio(r1 in 1.1f64..3.0, dr in 0.01f64..1.0) {
        let p = props();
        let g = GasStream::pure(Species::H2, 100.0, p.t0, p.p0).unwrap();
        let w = |r| compressor_train(&p, Component::ReductionCompressor, &g, &[StageSpec::new(r, 0.9)]).unwrap().work();
        prop_assert!(w(r1 + dr) > w(r1));
    }

    #[test]
    fn staging_never_costs_more(total in 1.5f64..5.0, stages in 2usize..5) {
        let p = props();
        let g = GasStream::pure(Species::H2, 100.0, p.t0, p.p0).unwrap();
        let per = total.powf(1.0 / stages as f64);
        let single = compressor_train(&p, Component::ReductionCompressor, &g, &[StageSpec::new(total, 0.9)]).unwrap();
        let multi = compressor_train(&p, Component::ReductionCompressor, &g, &StageSpec::repeated(per, 0.9, stages)).unwrap();
        prop_assert!(multi.work() <= single.work() * (1.0 + 1e-12));
    }

    #[test]
    fn allowance_value_scales_with_carbon_price(price in 1.0f64..500.0, k in 1.1f64..5.0) {
        let b1 = CarbonBlock { c_dri: 1.0, p_co2: price, ..CarbonBlock::default() };
        let b2 = CarbonBlock { p_co2: price * k, ..b1 };
        let c1 = carbon_equivalent(&b1).unwrap();
        let c2 = carbon_equivalent(&b2).unwrap();
        prop_assert!((c2.cet / c1.cet - k).abs() < 1e-9);
    }
}

#[test]
fn circulation_grows_as_inlet_cools() {
    for kind in ScenarioKind::ALL {
        let n2: Vec<f64> = default_grid()
            .into_iter()
            .map(|t| solve_scenario(&ScenarioConfig::new(kind).with_temperature(t)).unwrap().n2)
            .collect();
        assert!(n2.windows(2).all(|w| w[1] < w[0]), "{kind}: {n2:?}");
    }
}

#[test]
fn converged_circulation_ignores_the_guess() {
    for kind in ScenarioKind::ALL {
        let base = ScenarioConfig::new(kind);
        let n2 = solve_scenario(&base).unwrap().n2;
        for f in [0.5, 2.0] {
            let mut cfg = base.clone();
            cfg.solver.n2_guess = f * n2;
            let other = solve_scenario(&cfg).unwrap().n2;
            assert_relative_eq!(other, n2, max_relative = 1e-6);
        }
    }
}

#[test]
fn system_balances_hold_across_the_sweep() {
    let cells = run_sweep(&ScenarioConfig::new(ScenarioKind::ZeroCarbon), &SweepSpec::full(), Execution::Sequential);
    for c in &cells {
        let r = c.outcome.as_ref().unwrap();
        assert!(r.energy_closure().abs() < 1e-6, "{} {}", c.kind, c.t_in);
        assert!(r.aggregates.ex_out <= r.aggregates.ex_in);
        assert!(r.metrics.ec <= r.metrics.ee);
        assert!(r.metrics.exe < r.metrics.ee);
        assert!(r.furnace.closure_residual().abs() < 1e-9);
    }
}

#[test]
fn hydrogen_utilization_rises_with_temperature() {
    let eta: Vec<f64> = default_grid()
        .into_iter()
        .map(|t| {
            solve_scenario(&ScenarioConfig::new(ScenarioKind::ZeroCarbon).with_temperature(t)).unwrap().metrics.eta_h2
        })
        .collect();
    assert!(eta.windows(2).all(|w| w[1] > w[0]), "{eta:?}");
}

#[test]
fn parallel_matches_sequential() {
    let cfg = ScenarioConfig::new(ScenarioKind::ZeroCarbon);
    let spec = SweepSpec::full();
    let a = run_sweep(&cfg, &spec, Execution::Parallel);
    let b = run_sweep(&cfg, &spec, Execution::Sequential);
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert_eq!((x.kind, x.t_in), (y.kind, y.t_in));
        assert_eq!(x.outcome.as_ref().unwrap(), y.outcome.as_ref().unwrap());
    }
}
