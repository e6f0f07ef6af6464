// A rule given as a JSON table: majority on Z with S = {-1, 0, 1}.

use groupca::engine::RuleFile;
use groupca::{evolve, Configuration, Family, GroupCtx, Pattern, Symbol};

pub fn run_example() -> groupca::Result<()> {
    let json = r#"{
        "alphabet": ["0", "1"],
        "neighborhood": ["-1", "0", "1"],
        "table": {"000":"0","001":"0","010":"0","011":"1","100":"0","101":"1","110":"1","111":"1"}
    }"#;
    let rule: RuleFile = serde_json::from_str(json)?;
    let ca = rule.into_ca(Family::Integers)?;
    let z = GroupCtx::integers();
    let cells = [(-2, 1), (-1, 1), (1, 1), (3, 1)];
    let base = Pattern::from_cells(cells.iter().map(|&(n, s)| (groupca::GroupElement::Int(n), Symbol(s))));
    let x = Configuration::with_base(Family::Integers, base, Symbol(0));
    let ev = evolve(&ca, &x, &z.ball(4)?, 3)?;
    for f in &ev.frames {
        println!("{}", f.iter().map(|s| s.0.to_string()).collect::<String>());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
