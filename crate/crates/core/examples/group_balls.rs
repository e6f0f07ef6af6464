// Word norms and balls in the four group families.

use groupca::group::check_ball_inclusion;
use groupca::{Family, GroupCtx};

pub fn run_example() -> groupca::Result<()> {
    let f2 = GroupCtx::free(2);
    let g = f2.parse_element("ab")?;
    let h = f2.parse_element("Ba")?;
    println!("ab * Ba = {}", f2.multiply(&g, &h)?);
    for k in 0..=3 {
        // 2·3^k − 1 elements in F2.
        println!("|B_F2(1,{k})| = {}", f2.ball(k)?.len());
    }

    let dinf = GroupCtx::new(Family::InfiniteDihedral);
    let x = dinf.parse_element("(-2,1)")?;
    println!("‖(-2,1)‖ in D∞ = {}", dinf.norm(&x)?);
    let ball: Vec<String> = dinf.ball(1)?.iter().map(|g| g.to_string()).collect();
    println!("B_D∞(1,1) = {ball:?}");

    // Two generating sets of Z give equivalent metrics.
    let std = GroupCtx::integers();
    let other: GroupCtx = "z:2,3".parse()?;
    println!("B_std(1,1) ⊆ B_{{2,3}}(1,{})", check_ball_inclusion(&std, &other, 1)?);
    println!("B_{{2,3}}(1,1) ⊆ B_std(1,{})", check_ball_inclusion(&other, &std, 1)?);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
