// The action-angle map and its inverse on a random five-particle state.
//
// The map is evaluated twice, from subset sums over the actions and through
// the gauge transform of the Moser point, and the Toda energy is compared
// with the free kinetic energy of the actions.

use toda_duality::verify::sample;
use toda_duality::{
    aa_to_toda_direct, aa_to_toda_gauge, hamiltonian, toda_to_aa, w_from_angles, Result, ToleranceConfig,
};

/// Returns the worst of route disagreement, round-trip error and relative
/// energy error.
pub fn run() -> Result<f64> {
    let tol = ToleranceConfig::default();
    let mut rng = sample::rng_for(2024, "action_angle_map");
    let a = sample::action_angle(&mut rng, 5, &tol);
    println!("phat = {:?}", a.phat());
    println!("qhat = {:?}", a.qhat());
    println!("w    = {:?}", w_from_angles(&a, &tol)?.w());

    let direct = aa_to_toda_direct(&a, &tol)?;
    let gauge = aa_to_toda_gauge(&a, &tol)?;
    let routes = direct.max_abs_diff(&gauge);
    println!("q = {:?}", direct.q());
    println!("p = {:?}", direct.p());
    println!("subset sums vs gauge transform: {routes:e}");

    let back = toda_to_aa(&direct, &tol)?;
    let roundtrip = back.max_abs_diff(&a);
    println!("inverse map round trip: {roundtrip:e}");

    let h = hamiltonian(&direct, &tol)?;
    let free = 0.5 * a.phat().iter().map(|x| x * x).sum::<f64>();
    let energy = (h - free).abs() / free;
    println!("H = {h:.15}, sum phat^2 / 2 = {free:.15}");

    Ok(routes.max(roundtrip).max(energy))
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
