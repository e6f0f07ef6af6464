// A single flip far away travels back to the center one cell per step.

use groupca::freeca::{experiment_propagation, obstacle_config, PropagationSpec, ZERO};
use groupca::{Configuration, Family, GroupCtx};

pub fn run_example() -> groupca::Result<()> {
    let f2 = Family::Free { rank: 2 };
    let spec = PropagationSpec {
        seed_config: Configuration::uniform(f2, ZERO),
        g: f2.identity(),
        t: 0,
        n: 2,
        i: 3,
        enforce_cut: true,
    };
    let rep = experiment_propagation(&spec)?;
    for s in &rep.schedule {
        println!("t={} closest difference {:?}", s.time, s.closest.iter().map(|g| g.to_string()).collect::<Vec<_>>());
    }

    // Around an obstacle, starting next to it.
    let g = GroupCtx::free(2).sphere(3)?[0].clone();
    let spec = PropagationSpec { seed_config: obstacle_config(2, 2)?, g, t: 0, n: 4, i: 2, enforce_cut: true };
    let rep = experiment_propagation(&spec)?;
    println!("T* = {}, path {:?}, passed {}", rep.t_star, rep.path.iter().map(|g| g.to_string()).collect::<Vec<_>>(), rep.passed());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
