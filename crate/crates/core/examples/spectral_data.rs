// Spectral data of a Jacobi matrix: Hankel moment minors, their closed form,
// the invariant Hamiltonians on both gauge slices, the moment map and the
// resolvent.

use toda_duality::matlin::{leading_minors, shift_lower};
use toda_duality::{
    hankel, invariant_hamiltonians, minors_cauchy_binet, moment_map, resolvent, toda_to_moser, BigPhasePoint, Result,
    TodaState, ToleranceConfig,
};

/// Returns the largest relative or absolute disagreement found.
pub fn run() -> Result<f64> {
    let tol = ToleranceConfig::default();
    let s = TodaState::new(vec![-0.4, 0.3, 0.9, 1.2], vec![0.5, -0.2, 0.0, -0.7])?;
    let m = toda_to_moser(&s, &tol)?;
    println!("eigenvalues      = {:?}", m.phat());
    println!("norming weights  = {:?}", m.w());

    let closed = minors_cauchy_binet(&m, &tol)?;
    let lu = leading_minors(&hankel(&m));
    let partial: Vec<f64> = (1..=4).map(|k| s.q()[4 - k..].iter().sum::<f64>().exp()).collect();
    println!("Hankel minors (LU)           = {lu:?}");
    println!("Hankel minors (closed form)  = {closed:?}");
    println!("exp(q_n + ... + q_(n+1-k))   = {partial:?}");
    let rel = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(a, b)| ((a - b) / b).abs()).fold(0.0, f64::max);
    let minors = rel(&lu, &closed).max(rel(&closed, &partial));

    let toda = BigPhasePoint::toda_slice(&s, &tol)?;
    let moser = BigPhasePoint::moser_slice(&m, &tol)?;
    let invariants = rel(&invariant_hamiltonians(&moser, &tol)?, &invariant_hamiltonians(&toda, &tol)?);
    println!("invariant Hamiltonians agree across slices to {invariants:e}");

    let mut constraint: f64 = 0.0;
    for pt in [&toda, &moser] {
        let (lower, antisym) = moment_map(pt, &tol)?;
        constraint = constraint.max(lower.max_abs_diff(&shift_lower(4))).max(antisym.max_abs());
    }
    println!("moment map distance from (I_-, 0): {constraint:e}");

    let z = 3.0;
    let direct = resolvent(&s, z, &tol)?;
    let spectral: f64 = m.phat().iter().zip(m.w()).map(|(l, w)| w * w / (z - l)).sum();
    println!("resolvent at z = {z}: {direct} (spectral sum {spectral})");

    Ok(minors.max(invariants).max(constraint).max(((direct - spectral) / spectral).abs()))
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
