//! Headline results of each scenario at both ends of the temperature range.

use h2dri::{solve_scenario, ScenarioConfig, ScenarioKind};

fn main() {
    println!("{:<12} {:>6} {:>8} {:>7} {:>7} {:>7} {:>7}", "scenario", "T_in", "n2", "T_top", "EE", "EXE", "EC");
    for kind in ScenarioKind::ALL {
        for t in [1023.0, 1273.0] {
            match solve_scenario(&ScenarioConfig::new(kind).with_temperature(t)) {
                Ok(r) => println!(
                    "{:<12} {t:>6.0} {:>8.0} {:>7.1} {:>7.4} {:>7.4} {:>7.4}",
                    kind.name(),
                    r.n2,
                    r.t_topgas,
                    r.metrics.ee,
                    r.metrics.exe,
                    r.metrics.ec
                ),
                Err(e) => println!("{:<12} {t:>6.0} failed: {e}", kind.name()),
            }
        }
    }
}
