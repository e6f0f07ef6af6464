mod blocking_words {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/blocking_words.rs"));
}

#[test]
fn blocking_words_runs() {
    blocking_words::run_example().expect("blocking_words example");
}

mod cli_report {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/cli_report.rs"));
}

#[test]
fn cli_report_runs() {
    cli_report::run_example().expect("cli_report example");
}

mod configurations {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/configurations.rs"));
}

#[test]
fn configurations_runs() {
    configurations::run_example().expect("configurations example");
}

mod custom_rule {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/custom_rule.rs"));
}

#[test]
fn custom_rule_runs() {
    custom_rule::run_example().expect("custom_rule example");
}

mod equicontinuity {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/equicontinuity.rs"));
}

#[test]
fn equicontinuity_runs() {
    equicontinuity::run_example().expect("equicontinuity example");
}

mod evolve {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/evolve.rs"));
}

#[test]
fn evolve_runs() {
    evolve::run_example().expect("evolve example");
}

mod free_obstacle {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/free_obstacle.rs"));
}

#[test]
fn free_obstacle_runs() {
    free_obstacle::run_example().expect("free_obstacle example");
}

mod free_propagation {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/free_propagation.rs"));
}

#[test]
fn free_propagation_runs() {
    free_propagation::run_example().expect("free_propagation example");
}

mod group_balls {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/group_balls.rs"));
}

#[test]
fn group_balls_runs() {
    group_balls::run_example().expect("group_balls example");
}

mod sensitivity_probe {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/sensitivity_probe.rs"));
}

#[test]
fn sensitivity_probe_runs() {
    sensitivity_probe::run_example().expect("sensitivity_probe example");
}

mod subgroup_lift {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/subgroup_lift.rs"));
}

#[test]
fn subgroup_lift_runs() {
    subgroup_lift::run_example().expect("subgroup_lift example");
}

mod virtually_z {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/virtually_z.rs"));
}

#[test]
fn virtually_z_runs() {
    virtually_z::run_example().expect("virtually_z example");
}
