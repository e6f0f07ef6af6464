// Verifying blocking words and replaying counterexamples.

use groupca::blocking::{replay_counterexample, verify_blocking, BlockingQuery, VerificationMode, VerifyOptions};
use groupca::engine::{and_ca, xor_ca, xor_wall_ca};
use groupca::{GroupElement, Pattern, Symbol};

fn int(n: i64) -> GroupElement {
    GroupElement::Int(n)
}

pub fn run_example() -> groupca::Result<()> {
    let opts = VerifyOptions::default();

    // A 0 is absorbing for AND.
    let q = BlockingQuery::new(Pattern::single(int(0), Symbol(0)), vec![int(0)], 10);
    let cert = verify_blocking(&and_ca(), &q, VerificationMode::Exhaustive, &opts)?;
    println!("AND, 0 at 0, T=10: {:?} via {:?}", cert.is_blocking(), cert.method);

    // Two walls enclose whatever lies between them.
    let word = Pattern::from_cells((-2..=2).map(|n| (int(n), Symbol(if n.abs() == 2 { 2 } else { 0 }))));
    let q = BlockingQuery::new(word, (-2..=2).map(int).collect(), 5);
    let cert = verify_blocking(&xor_wall_ca(), &q, VerificationMode::Exhaustive, &VerifyOptions::enumeration_only())?;
    println!("xor-wall, W000W, T=5: blocking={} after {} exteriors", cert.is_blocking(), cert.enumerated);

    // XOR lets information through any finite word.
    let word = Pattern::from_cells((-1..=1).map(|n| (int(n), Symbol(0))));
    let q = BlockingQuery::new(word, vec![int(0)], 3);
    let cert = verify_blocking(&xor_ca(), &q, VerificationMode::Exhaustive, &opts)?;
    let cx = cert.verdict.counterexample().expect("xor is not blocked");
    println!(
        "XOR, 000: differs at t={} cell {}; replay agrees: {}",
        cx.time,
        cx.cell,
        replay_counterexample(&xor_ca(), &cert)?
    );
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
