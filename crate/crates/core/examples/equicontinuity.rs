// From a blocking word to an equicontinuity point of xor-wall on Z.

use groupca::blocking::{search_blocking, VerificationMode, VerifyOptions};
use groupca::engine::xor_wall_ca;
use groupca::vz::{equicontinuity_pipeline, VZStructure};
use groupca::GroupCtx;

pub fn run_example() -> groupca::Result<()> {
    let ca = xor_wall_ca();
    let vz = VZStructure::new(GroupCtx::integers())?;
    let opts = VerifyOptions::default();
    let found = search_blocking(vz.ctx(), &ca, 2, 3, 8, VerificationMode::Exhaustive, &opts)?;
    let q = found.query().expect("xor-wall has blocking words").clone();
    let word: Vec<String> = q.word.iter().map(|(g, s)| format!("{g}:{}", ca.alphabet().token(s))).collect();
    println!("blocking word for B(1,2): {word:?}");

    let rep = equicontinuity_pipeline(&vz, &ca, &q, 2, 1000, 50, 7, &opts)?;
    println!("period {}, periodic: {}", rep.period, rep.periodicity_violations == 0);
    println!(
        "agreement on B(1,{}) keeps B(1,2) fixed for 8 steps: {} ({} trials)",
        rep.check.agreement_radius,
        rep.check.violations == 0,
        rep.check.trials
    );
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
