// Evolving configurations on Z and on F2 with the cone engine.

use groupca::engine::{check_equivariance, xor_ca};
use groupca::{builtin, evolve, Configuration, Family, GroupCtx, Pattern, Symbol};

pub fn run_example() -> groupca::Result<()> {
    let z = GroupCtx::integers();
    let ca = xor_ca();
    let one = Configuration::with_base(Family::Integers, Pattern::single(z.parse_element("0")?, Symbol(1)), Symbol(0));
    let window = z.ball(6)?;
    let ev = evolve(&ca, &one, &window, 6)?;
    for (t, f) in ev.frames.iter().enumerate() {
        let row: String = f.iter().map(|s| if s.0 == 1 { '#' } else { '.' }).collect();
        println!("t={t} {row}");
    }

    // The obstacle automaton on F2.
    let f2 = Family::Free { rank: 2 };
    let fb = builtin("freeblock", f2)?;
    let ctx = GroupCtx::free(2);
    let x = Configuration::noise(f2, Pattern::new(), 3, vec![Symbol(0), Symbol(1), Symbol(2), Symbol(3)]);
    let ev = evolve(&fb, &x, &ctx.ball(1)?, 2)?;
    println!("freeblock: dependency region of B(1,1) over 2 steps has {} cells", ev.dependency_size);
    println!(
        "commutes with the shift by 'ab': {}",
        check_equivariance(&fb, &ctx.parse_element("ab")?, &x, &ctx.ball(1)?, 2)?
    );
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
