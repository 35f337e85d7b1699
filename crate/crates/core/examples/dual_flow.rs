// Flow of the dual Hamiltonian `Ĥ = σ₁` on the action-angle space.
//
// In Toda coordinates the flow keeps every position fixed and drifts the
// last momentum, so it can be evaluated exactly and compared with implicit
// midpoint integration.

use toda_duality::{
    aa_to_toda, dual_flow_exact, dual_flow_numeric, dual_hamiltonian, ActionAngleState, Result, ToleranceConfig,
};

/// Returns the worst of the integrator deviation, the drift of the positions
/// and the relative drift of `Ĥ`.
pub fn run() -> Result<f64> {
    let tol = ToleranceConfig::default();
    let a = ActionAngleState::new(vec![0.9, 0.1, -0.8], vec![0.3, -0.5, 0.2], &tol)?;
    let (t, dt) = (1.0, 1e-4);
    let h0 = dual_hamiltonian(&a, &tol)?;
    let q0 = aa_to_toda(&a, &tol)?.q().to_vec();

    let numeric = dual_flow_numeric(&a, t, dt, &tol)?;
    let mut positions: f64 = 0.0;
    let mut energy: f64 = 0.0;
    for i in (0..numeric.len()).step_by(2_000) {
        let exact = dual_flow_exact(&a, numeric.times[i], &tol)?;
        let q = aa_to_toda(&exact, &tol)?.q().to_vec();
        positions = q.iter().zip(&q0).map(|(x, y)| (x - y).abs()).fold(positions, f64::max);
        energy = energy.max((dual_hamiltonian(&numeric.states[i], &tol)? - h0).abs() / h0);
        println!(
            "t = {:.2}  phat = {:?}  |exact - midpoint| = {:.2e}",
            numeric.times[i],
            exact.phat(),
            exact.max_abs_diff(&numeric.states[i])
        );
    }
    let deviation = dual_flow_exact(&a, t, &tol)?.max_abs_diff(numeric.last());
    println!("final deviation {deviation:e}; position drift {positions:e}; relative Hhat drift {energy:e}");
    Ok(deviation.max(positions).max(energy))
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
