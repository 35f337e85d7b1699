// Asymptotic momenta: after a long run the Toda momenta approach `−p̂`.

use toda_duality::{aa_to_toda, verlet_flow, ActionAngleState, Result, ToleranceConfig};

/// Returns `max_j |p_j(T) + p̂_j|`.
pub fn run() -> Result<f64> {
    let tol = ToleranceConfig::default();
    let a = ActionAngleState::new(vec![1.5, 0.6, -0.3, -1.4], vec![1.0, -1.2, 0.4, 0.0], &tol)?;
    let s = aa_to_toda(&a, &tol)?;
    println!("p(0)  = {:?}", s.p());
    let traj = verlet_flow(&s, 40.0, 1e-3, &tol)?;
    for i in (0..traj.len()).step_by(10_000) {
        println!("p({:>4.1}) = {:?}", traj.times[i], traj.states[i].p());
    }
    let end = traj.last().p();
    let deviation = end.iter().zip(a.phat()).map(|(p, ph)| (p + ph).abs()).fold(0.0, f64::max);
    println!("p(40) = {end:?}");
    println!("-phat = {:?}", a.phat().iter().map(|x| -x).collect::<Vec<_>>());
    println!("max |p + phat| = {deviation:e}");
    Ok(deviation)
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
