// Patterns, backgrounds, JSON round trips and the Cantor distance.

use groupca::config::{cantor_distance, ConfigFile};
use groupca::{Alphabet, Configuration, Family, GroupCtx, Pattern, Symbol};

pub fn run_example() -> groupca::Result<()> {
    let ctx = GroupCtx::free(2);
    let alphabet = Alphabet::numeric(2);
    let base = Pattern::from_cells([
        (ctx.parse_element("")?, Symbol(1)),
        (ctx.parse_element("ab")?, Symbol(1)),
    ]);
    let x = Configuration::with_base(Family::Free { rank: 2 }, base, Symbol(0));

    let text = serde_json::to_string(&x.to_json(&alphabet))?;
    println!("{text}");
    let file: ConfigFile = serde_json::from_str(&text)?;
    let (_, back) = Configuration::from_json(Family::Free { rank: 2 }, &file)?;
    assert_eq!(back.materialize(&ctx.ball(3)?), x.materialize(&ctx.ball(3)?));

    let y = x.patched(&Pattern::single(ctx.parse_element("ab")?, Symbol(0)));
    let d = cantor_distance(&ctx, &x, &y, 4)?;
    println!("d(x, y) = {} ({d:?})", d.value());

    // Shifting moves the pattern: (gx)_h = x_{g⁻¹h}.
    let shifted = x.shift(&ctx.parse_element("a")?)?;
    println!("(a·x) at 'a' = {}", alphabet.token(shifted.value_at(&ctx.parse_element("a")?)));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
