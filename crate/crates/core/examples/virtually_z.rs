// Impacts on virtually-Z groups and gluing two walls.

use groupca::blocking::{verify_blocking, BlockingQuery, VerificationMode, VerifyOptions};
use groupca::engine::xor_wall_ca;
use groupca::vz::{check_disconnect, glue, VZStructure};
use groupca::{Configuration, Family, GroupCtx, GroupElement, Pattern, Symbol};

fn wall(n: i64) -> BlockingQuery {
    BlockingQuery::new(Pattern::single(GroupElement::Int(n), Symbol(2)), vec![GroupElement::Int(n)], 6)
}

pub fn run_example() -> groupca::Result<()> {
    for fam in [Family::InfiniteDihedral, Family::DirectProduct { m: 3 }] {
        let vz = VZStructure::new(GroupCtx::new(fam))?;
        for s in fam.canonical_generators() {
            let per: Vec<u64> = (-3..=3).map(|k| vz.impact_at(&s, k)).collect::<groupca::Result<_>>()?;
            println!("{fam}: imp({s}) per vertebra = {per:?}");
        }
    }

    let vz = VZStructure::new(GroupCtx::integers())?;
    let ca = xor_wall_ca();
    let opts = VerifyOptions::default();
    let rep = check_disconnect(&vz, &ca, &wall(0), 2, VerificationMode::Exhaustive, &opts)?;
    println!("a wall disconnects its two sides: {}", rep.passed());

    let filler = Configuration::uniform(Family::Integers, Symbol(0)).patched(&wall(-4).word.overlay(&wall(4).word));
    let glued = glue(&vz, &ca, &wall(-4), &wall(4), &filler, &opts)?;
    let cert = verify_blocking(&ca, &glued, VerificationMode::Exhaustive, &opts)?;
    println!("glued word on [-4,4] blocks its region at T=6: {}", cert.is_blocking());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
