// Lifting automata from ⟨a⟩ ≅ Z to F2, and the rectangle inclusions.

use groupca::engine::{and_ca, xor_ca};
use groupca::lift::SubgroupEmbedding;
use groupca::{Configuration, Family, Pattern, Symbol};

pub fn run_example() -> groupca::Result<()> {
    let emb = SubgroupEmbedding::new(2)?;
    let g = emb.big().parse_element("baBa")?;
    let (f, n) = emb.decompose(&g)?;
    println!("baBa = {f} · a^{n}, ω = {}", emb.omega(&g)?);

    let x = Configuration::noise(Family::Free { rank: 2 }, Pattern::new(), 9, vec![Symbol(0), Symbol(1)]);
    let reps = emb.reps_in_ball(1)?;
    for ca in [xor_ca(), and_ca()] {
        let rep = emb.check_parallel_dynamics(&ca, &x, 4, 4, &reps)?;
        println!("{} lifted runs coset-parallel: {}", ca.name(), rep.holds());
    }

    for k in 0..=2 {
        let r = emb.check_rectangle_inclusions(k, 1)?;
        println!("k={k}: Λ={} |R(k,1)|={} inclusions hold: {}", r.lambda, r.rectangle_size, r.holds());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
