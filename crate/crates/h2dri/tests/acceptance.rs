//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_MISSES` print FAIL but do not fail the process;
//! any other failure does. A known miss that starts passing is reported as such.

use std::time::Instant;

use h2dri::components::Component;
use h2dri::kinetics::{flux_balance, solve_profile, BedOperation, BedSpec};
use h2dri::metrics::penalized_ratio;
use h2dri::output::{ee_without_waste_heat, write_all};
use h2dri::sweep::CellResult;
use h2dri::{run_sweep, solve_scenario, Execution, ScenarioConfig, ScenarioKind, SweepSpec, SystemReport};

const KNOWN_MISSES: [u32; 1] = [2];

struct Outcome {
    id: u32,
    pass: bool,
    detail: String,
}

fn within(v: f64, target: f64, tol: f64) -> bool {
    (v - target).abs() <= tol
}

fn within_rel(v: f64, target: f64, rel: f64) -> bool {
    ((v - target) / target).abs() <= rel
}

fn at(kind: ScenarioKind, t: f64) -> SystemReport {
    solve_scenario(&ScenarioConfig::new(kind).with_temperature(t)).expect("scenario solves")
}

fn series(cells: &[CellResult], kind: ScenarioKind) -> Vec<&SystemReport> {
    cells.iter().filter(|c| c.kind == kind).map(|c| c.outcome.as_ref().expect("cell solves")).collect()
}

fn strictly(v: &[f64], increasing: bool) -> bool {
    v.windows(2).all(|w| if increasing { w[1] > w[0] } else { w[1] < w[0] })
}

fn c1() -> Outcome {
    let r = at(ScenarioKind::ZeroCarbon, 1273.0);
    let m = r.metrics;
    Outcome {
        id: 1,
        pass: within(m.ee, 0.3975, 0.03) && within(m.exe, 0.2772, 0.03) && m.ec - m.ee == 0.0,
        detail: format!("zero-carbon 1273 K: EE {:.4}, EXE {:.4}, EC-EE {:e}", m.ee, m.exe, m.ec - m.ee),
    }
}

fn c2() -> Outcome {
    let a = at(ScenarioKind::Traditional64, 1273.0).metrics;
    let b = at(ScenarioKind::Traditional82, 1273.0).metrics;
    let parts = [within(a.ee, 0.4053, 0.03), within(a.exe, 0.2483, 0.03), within(b.exe, 0.1996, 0.03)];
    Outcome {
        id: 2,
        pass: parts.iter().all(|&p| p),
        detail: format!(
            "trad-64 EE {:.4} [{}], trad-64 EXE {:.4} [{}], trad-82 EXE {:.4} [{}]",
            a.ee,
            ok(parts[0]),
            a.exe,
            ok(parts[1]),
            b.exe,
            ok(parts[2])
        ),
    }
}

fn ok(p: bool) -> &'static str {
    if p {
        "ok"
    } else {
        "miss"
    }
}

fn c3() -> Outcome {
    let r = at(ScenarioKind::ZeroCarbon, 1273.0);
    let power = r.orc_electricity + r.expander_electricity;
    Outcome {
        id: 3,
        pass: within_rel(power, 1.74e9, 0.15) && within_rel(r.topgas_recovery, 1.11e9, 0.15),
        detail: format!(
            "ORC {:.3e} + expander {:.3e} = {:.3e} J, top-gas recovery {:.3e} J",
            r.orc_electricity, r.expander_electricity, power, r.topgas_recovery
        ),
    }
}

fn c4() -> Outcome {
    let mut cfg = ScenarioConfig::new(ScenarioKind::ZeroCarbon);
    cfg.waste_heat = false;
    let r = solve_scenario(&cfg).expect("solves");
    let with = at(ScenarioKind::ZeroCarbon, 1273.0);
    Outcome {
        id: 4,
        pass: within(r.metrics.ee, 0.21, 0.03) && (ee_without_waste_heat(&with) - r.metrics.ee).abs() < 1e-12,
        detail: format!("no-waste-heat EE {:.4}", r.metrics.ee),
    }
}

fn c5() -> Outcome {
    let a = at(ScenarioKind::Traditional64, 1273.0);
    let b = at(ScenarioKind::Traditional82, 1273.0);
    let pass = within_rel(a.co_heat, 2.87e8, 0.2)
        && within_rel(a.metrics.cet, 4.83e8, 0.2)
        && within_rel(b.co_heat, 2.69e8, 0.2)
        && within_rel(b.metrics.cet, 3.08e8, 0.2);
    Outcome {
        id: 5,
        pass,
        detail: format!(
            "trad-64 ({:.3e}, {:.3e}) J, trad-82 ({:.3e}, {:.3e}) J",
            a.co_heat, a.metrics.cet, b.co_heat, b.metrics.cet
        ),
    }
}

fn c6() -> Outcome {
    let r = at(ScenarioKind::ZeroCarbon, 1273.0);
    Outcome { id: 6, pass: within(r.t_topgas, 723.0, 15.0), detail: format!("top gas {:.1} K", r.t_topgas) }
}

fn c7(cells: &[CellResult]) -> Outcome {
    let mut fails = Vec::new();
    let metric = |s: &[&SystemReport], f: fn(&SystemReport) -> f64| s.iter().map(|r| f(r)).collect::<Vec<_>>();
    let zc = series(cells, ScenarioKind::ZeroCarbon);
    for (name, f) in [
        ("EE", (|r: &SystemReport| r.metrics.ee) as fn(&SystemReport) -> f64),
        ("EXE", |r| r.metrics.exe),
        ("EC", |r| r.metrics.ec),
    ] {
        if !strictly(&metric(&zc, f), false) {
            fails.push(format!("zero-carbon {name} not decreasing"));
        }
        for kind in [ScenarioKind::Traditional64, ScenarioKind::Traditional82] {
            if !strictly(&metric(&series(cells, kind), f), true) {
                fails.push(format!("{kind} {name} not increasing"));
            }
        }
    }
    for kind in ScenarioKind::ALL {
        if !strictly(&metric(&series(cells, kind), SystemReport::total_gas), false) {
            fails.push(format!("{kind} gas not decreasing"));
        }
    }
    let g64 = metric(&series(cells, ScenarioKind::Traditional64), SystemReport::total_gas);
    let g82 = metric(&series(cells, ScenarioKind::Traditional82), SystemReport::total_gas);
    if !g64.iter().zip(&g82).all(|(a, b)| a < b) {
        fails.push("trad-64 gas not below trad-82".into());
    }
    Outcome {
        id: 7,
        pass: fails.is_empty(),
        detail: if fails.is_empty() { "all trends hold on 11 points".into() } else { fails.join("; ") },
    }
}

fn c8(cells: &[CellResult]) -> Outcome {
    let mut worst = f64::INFINITY;
    for kind in [ScenarioKind::Traditional64, ScenarioKind::Traditional82] {
        for r in series(cells, kind) {
            worst = worst.min(r.metrics.cet - r.co_heat);
        }
    }
    Outcome { id: 8, pass: worst > 0.0, detail: format!("smallest CET - CO heat margin {worst:.3e} J") }
}

fn c9(cells: &[CellResult]) -> Outcome {
    let mut exact = 0.0_f64;
    let mut system = 0.0_f64;
    let mut min_destruction = f64::INFINITY;
    for c in cells {
        let r = c.outcome.as_ref().expect("cell solves");
        for comp in &r.components {
            let scale = comp.energy.total_in().abs().max(1.0);
            if matches!(
                comp.id,
                Component::ReductionCompressor
                    | Component::CircleCompressor
                    | Component::RecycleCompressor
                    | Component::Expander
                    | Component::Orc
            ) {
                exact = exact.max(comp.energy_residual().abs() / scale);
            }
            let ex_scale = comp.exergy.total_in().abs().max(1.0);
            min_destruction = min_destruction.min(comp.exergy_destruction() / ex_scale);
        }
        system = system.max(r.energy_closure().abs());
    }
    Outcome {
        id: 9,
        pass: exact <= 1e-9 && system <= 1e-6 && min_destruction >= 0.0,
        detail: format!(
            "equality components {exact:.1e}, system closure {system:.1e}, min relative destruction {min_destruction:.2e}"
        ),
    }
}

fn c10(cells: &[CellResult]) -> Outcome {
    let mut residual = 0.0_f64;
    let mut shift = 0.0_f64;
    let mut flux = 0.0_f64;
    for c in cells {
        let r = c.outcome.as_ref().expect("cell solves");
        let cfg = ScenarioConfig::new(c.kind).with_temperature(c.t_in);
        let gas = c.kind.reducing_gas();
        let op = BedOperation {
            gas: &gas,
            gas_moles: r.total_gas(),
            solids_mass: cfg.batch_kg,
            solid_cp: cfg.furnace.c_dri,
            pressure: cfg.furnace.pressure,
            t_gas_in: cfg.t_in,
            t_solid_in: cfg.furnace.t_ore,
        };
        let bed = BedSpec::from_operation(&cfg.props, &cfg.bed, &op).expect("bed");
        let mut opts = cfg.solver.shooting;
        opts.steps = cfg.bed.steps;
        let coarse = solve_profile(&bed, cfg.t_in, cfg.furnace.t_ore, cfg.props.t0, &opts).expect("profile");
        opts.steps = 2 * coarse.steps;
        let fine = solve_profile(&bed, cfg.t_in, cfg.furnace.t_ore, cfg.props.t0, &opts).expect("profile");
        residual = residual.max(r.kinetics.boundary_residual).max(coarse.boundary_residual);
        shift = shift.max((fine.t_topgas - coarse.t_topgas).abs());
        flux = flux.max(flux_balance(&bed, &coarse, cfg.props.t0).relative_error());
    }
    Outcome {
        id: 10,
        pass: residual < 0.1 && shift < 0.05 && flux < 0.005,
        detail: format!(
            "boundary residual {residual:.1e} K, refinement shift {shift:.1e} K, flux imbalance {flux:.1e}"
        ),
    }
}

fn c11(cells: &[CellResult]) -> Outcome {
    let zero_ok =
        series(cells, ScenarioKind::ZeroCarbon).iter().all(|r| r.co2_t == 0.0 && r.metrics.ec == r.metrics.ee);
    let grid_ok = series(cells, ScenarioKind::Grid).iter().all(|r| r.metrics.ec < r.metrics.ee);
    let branches = [(0.999, 1.0), (1.0, 1.0), (1.001, 1.2), (1.2, 1.2), (1.201, 1.5)]
        .iter()
        .all(|&(x, m)| penalized_ratio(x, 1.2, 1.5) == m * x);
    Outcome {
        id: 11,
        pass: zero_ok && grid_ok && branches,
        detail: format!(
            "EC = EE at zero emissions [{}], grid EC < EE [{}], penalty branches [{}]",
            ok(zero_ok),
            ok(grid_ok),
            ok(branches)
        ),
    }
}

fn c12(template: &ScenarioConfig, spec: &SweepSpec) -> Outcome {
    let dirs: Vec<tempfile::TempDir> = (0..3).map(|_| tempfile::tempdir().expect("tempdir")).collect();
    let modes = [Execution::Parallel, Execution::Parallel, Execution::Sequential];
    let mut files = Vec::new();
    for (d, exec) in dirs.iter().zip(modes) {
        let cells = run_sweep(template, spec, exec);
        write_all(d.path(), &cells).expect("write");
        files.push(std::fs::read(d.path().join("results.csv")).expect("read"));
    }
    let same = files.windows(2).all(|w| w[0] == w[1]);
    Outcome {
        id: 12,
        pass: same,
        detail: format!(
            "three sweeps (parallel, parallel, sequential), {} bytes each, identical: {same}",
            files[0].len()
        ),
    }
}

fn main() {
    let template = ScenarioConfig::new(ScenarioKind::ZeroCarbon);
    let spec = SweepSpec::full();
    let start = Instant::now();
    let cells = run_sweep(&template, &spec, Execution::Parallel);
    let elapsed = start.elapsed();
    let failed = cells.iter().filter(|c| c.outcome.is_err()).count();
    println!("full sweep: {} cells, {failed} failed, {:.3} s", cells.len(), elapsed.as_secs_f64());
    assert_eq!(failed, 0, "every sweep cell must solve");

    let outcomes = vec![
        c1(),
        c2(),
        c3(),
        c4(),
        c5(),
        c6(),
        c7(&cells),
        c8(&cells),
        c9(&cells),
        c10(&cells),
        c11(&cells),
        c12(&template, &spec),
    ];
    let mut unexpected = Vec::new();
    for o in &outcomes {
        let known = KNOWN_MISSES.contains(&o.id);
        let tag = match (o.pass, known) {
            (true, false) => "PASS",
            (true, true) => "PASS (listed as a known miss; update KNOWN_MISSES)",
            (false, true) => "FAIL (known miss, see README)",
            (false, false) => "FAIL",
        };
        println!("criterion {:>2}: {tag} | {}", o.id, o.detail);
        if !o.pass && !known {
            unexpected.push(o.id);
        }
    }
    if elapsed.as_secs_f64() >= 10.0 {
        println!("sweep wall time {:.1} s exceeds 10 s", elapsed.as_secs_f64());
        unexpected.push(0);
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
