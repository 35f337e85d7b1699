// Two particles with actions `p̂ = (1, 0)` and angles `q̂ = (0, 0)`.
//
// Walks the same point through every description: subset sums, Toda
// coordinates, the Lax matrix and its spectrum, norming constants and the
// matrix `Γ`.

use toda_duality::matlin::sym_eigen_desc;
use toda_duality::{
    aa_to_toda, gamma, lax_matrix, sigma, sigma_dot, toda_to_moser, ActionAngleState, Result, ToleranceConfig,
};

/// Returns the largest deviation from the hand-computed values.
pub fn run() -> Result<f64> {
    let tol = ToleranceConfig::default();
    let a = ActionAngleState::new(vec![1.0, 0.0], vec![0.0, 0.0], &tol)?;

    let sigmas = [sigma(&a, 1, &tol)?, sigma(&a, 2, &tol)?];
    let dots = [sigma_dot(&a, 1, &tol)?, sigma_dot(&a, 2, &tol)?];
    println!("sigma     = {sigmas:?}");
    println!("sigma_dot = {dots:?}");

    let s = aa_to_toda(&a, &tol)?;
    println!("q = {:?}", s.q());
    println!("p = {:?}", s.p());

    let l = lax_matrix(&s, &tol)?;
    let eig = sym_eigen_desc(&l, &tol)?;
    println!("L = {l:?}");
    println!("spectrum of L = {:?}", eig.values);

    let m = toda_to_moser(&s, &tol)?;
    println!("w = {:?}", m.w());
    println!("Gamma = {:?}", gamma(&m));

    let ln2 = std::f64::consts::LN_2;
    let expected = [
        (sigmas[0], 2.0),
        (sigmas[1], 1.0),
        (dots[0], -1.0),
        (dots[1], -1.0),
        (s.q()[0], -ln2),
        (s.q()[1], ln2),
        (s.p()[0], -0.5),
        (s.p()[1], -0.5),
        (l[(0, 1)], 0.5),
        (eig.values[0], 1.0),
        (eig.values[1], 0.0),
        (m.w()[0], 1.0),
        (m.w()[1], 1.0),
    ];
    let deviation = expected.iter().map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    println!("max deviation from hand values: {deviation:e}");
    Ok(deviation)
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
