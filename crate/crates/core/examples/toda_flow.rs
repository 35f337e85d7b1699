// Exact Toda flow, obtained by moving the angles linearly, against
// Störmer–Verlet integration.

use toda_duality::{hamiltonian, toda_flow_exact, verlet_flow, Result, TodaState, ToleranceConfig};

/// Returns the final-state deviation between the two flows.
pub fn run() -> Result<f64> {
    let tol = ToleranceConfig::default();
    let s = TodaState::new(vec![-1.0, 0.5, 0.2, 1.5], vec![0.8, -0.3, 0.1, -0.6])?;
    let (t, dt) = (5.0, 1e-4);

    let numeric = verlet_flow(&s, t, dt, &tol)?;
    println!("{:>6} {:>22} {:>14}", "t", "max |exact - verlet|", "H");
    for i in (0..numeric.len()).step_by(10_000) {
        let exact = toda_flow_exact(&s, numeric.times[i], &tol)?;
        println!(
            "{:>6.2} {:>22.3e} {:>14.10}",
            numeric.times[i],
            exact.max_abs_diff(&numeric.states[i]),
            hamiltonian(&numeric.states[i], &tol)?
        );
    }
    let exact = toda_flow_exact(&s, t, &tol)?;
    let deviation = exact.max_abs_diff(numeric.last());
    println!("q(t) exact  = {:?}", exact.q());
    println!("q(t) verlet = {:?}", numeric.last().q());
    println!("deviation at t = {t}: {deviation:e}");
    Ok(deviation)
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
