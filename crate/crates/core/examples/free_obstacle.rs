// The free-group automaton: obstacles resist noise, uniform ι does not.

use groupca::freeca::{experiment_nonsensitivity, experiment_uniform_interior, Exterior, NonsensitivitySpec};
use groupca::group::DEFAULT_BALL_CAP;

pub fn run_example() -> groupca::Result<()> {
    for exterior in [Exterior::Binary, Exterior::Full] {
        let spec = NonsensitivitySpec { rank: 2, n: 3, steps: 10, trials: 20, seed: 1, exterior };
        let rep = experiment_nonsensitivity(&spec)?;
        println!("obstacle n=3, {exterior:?} exteriors: {} violations", rep.violations.len());
    }
    for n in 2..=4 {
        let rep = experiment_uniform_interior(2, n, DEFAULT_BALL_CAP)?;
        println!(
            "n={n}: flipping {} changes F^n at 1 from ι to a binary symbol: {}",
            rep.flipped,
            rep.passed()
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
