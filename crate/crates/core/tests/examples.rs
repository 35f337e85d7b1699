#[allow(dead_code)]
mod worked_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/worked_example.rs"));
}

#[allow(dead_code)]
mod action_angle_map {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/action_angle_map.rs"));
}

#[allow(dead_code)]
mod toda_flow {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/toda_flow.rs"));
}

#[allow(dead_code)]
mod dual_flow {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/dual_flow.rs"));
}

#[allow(dead_code)]
mod scattering {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/scattering.rs"));
}

#[allow(dead_code)]
mod spectral_data {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/spectral_data.rs"));
}

#[allow(dead_code)]
mod verification_suite {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/verification_suite.rs"));
}

#[test]
fn worked_example_matches_hand_values() {
    assert!(worked_example::run().unwrap() < 1e-12);
}

#[test]
fn action_angle_map_example_is_consistent() {
    assert!(action_angle_map::run().unwrap() < 1e-10);
}

#[test]
fn toda_flow_example_agrees_with_integrator() {
    assert!(toda_flow::run().unwrap() < 1e-6);
}

#[test]
fn dual_flow_example_agrees_with_integrator() {
    assert!(dual_flow::run().unwrap() < 1e-5);
}

#[test]
fn scattering_example_reaches_asymptotics() {
    assert!(scattering::run().unwrap() < 1e-3);
}

#[test]
fn spectral_data_example_is_consistent() {
    assert!(spectral_data::run().unwrap() < 1e-9);
}

#[test]
fn verification_suite_example_passes_and_rejects_controls() {
    let (passed, caught, total) = verification_suite::run().unwrap();
    assert_eq!(passed, total);
    assert_eq!(caught, total);
}
