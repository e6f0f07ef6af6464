// Bounded search for blocking words: XOR has none, AND and xor-wall do.

use groupca::blocking::{sensitivity_probe, VerificationMode, VerifyOptions};
use groupca::engine::{and_ca, xor_ca, xor_wall_ca};
use groupca::GroupCtx;

pub fn run_example() -> groupca::Result<()> {
    let z = GroupCtx::integers();
    let opts = VerifyOptions::default();
    for ca in [xor_ca(), and_ca(), xor_wall_ca()] {
        let rep = sensitivity_probe(&z, &ca, 0, 2, 6, VerificationMode::Exhaustive, &opts)?;
        println!("{:>9}: {} ({} candidates)", ca.name(), rep.summary(), rep.outcome.certificates.len());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
