// Driving the command line from code and reading its JSON report.

pub fn run_example() -> groupca::Result<()> {
    let dir = std::env::temp_dir().join("groupca-cli-example");
    std::fs::create_dir_all(&dir)?;
    let out = dir.join("impact.json");
    let args = ["groupca", "impact", "--group", "prod:3", "--out", out.to_str().unwrap()];
    groupca::cli::run(args)?;
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out)?)?;
    for row in report["result"]["impacts"].as_array().unwrap() {
        println!("imp({}) = {}", row["s"], row["imp"]);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
