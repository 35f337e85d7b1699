//! Random states for the checks.
//!
//! `q`, `q̂` are uniform in `[−2, 2]`; `w = exp(U[−1, 1])`; `p̂` is built from
//! gaps `min_gap + U[0, spread]` and centered at zero (for `n = 1`,
//! `p̂ ~ U[−1, 1]`). Centering keeps the Hankel moments well scaled.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::ToleranceConfig;
use crate::duality::{dual_hamiltonian, ActionAngleState};
use crate::error::{Error, Result};
use crate::gauge::MoserState;
use crate::toda::TodaState;

pub const COORD_BOUND: f64 = 2.0;
pub const MIN_GAP: f64 = 0.3;
pub const GAP_SPREAD: f64 = 0.4;
const MAX_DRAWS: usize = 100_000;

/// One independent stream per check name, so checks can run in any order.
pub fn rng_for(seed: u64, name: &str) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // FNV-1a of the name selects the stream
    let stream = name.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3));
    rng.set_stream(stream);
    rng
}

pub fn phat(rng: &mut impl Rng, n: usize, min_gap: f64, spread: f64) -> Vec<f64> {
    if n == 1 {
        return vec![rng.gen_range(-1.0..1.0)];
    }
    let mut x = Vec::with_capacity(n);
    let mut cur = 0.0;
    for i in 0..n {
        if i > 0 {
            cur -= min_gap + rng.gen_range(0.0..spread);
        }
        x.push(cur);
    }
    let mean = x.iter().sum::<f64>() / n as f64;
    x.iter().map(|v| v - mean).collect()
}

pub fn uniform_vec(rng: &mut impl Rng, n: usize, bound: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-bound..bound)).collect()
}

pub fn action_angle(rng: &mut impl Rng, n: usize, tol: &ToleranceConfig) -> ActionAngleState {
    action_angle_with(rng, n, MIN_GAP, GAP_SPREAD, COORD_BOUND, tol)
}

pub fn action_angle_with(
    rng: &mut impl Rng,
    n: usize,
    min_gap: f64,
    spread: f64,
    qhat_bound: f64,
    tol: &ToleranceConfig,
) -> ActionAngleState {
    let p = phat(rng, n, min_gap, spread);
    let q = uniform_vec(rng, n, qhat_bound);
    ActionAngleState::new(p, q, tol).expect("sampled p̂ is strictly decreasing")
}

/// Rejection sampling of [`action_angle`] conditioned on `Ĥ ≤ max_energy`.
pub fn action_angle_below(
    rng: &mut impl Rng,
    n: usize,
    max_energy: f64,
    tol: &ToleranceConfig,
) -> Result<ActionAngleState> {
    for _ in 0..MAX_DRAWS {
        let a = action_angle(rng, n, tol);
        if dual_hamiltonian(&a, tol)? <= max_energy {
            return Ok(a);
        }
    }
    Err(Error::InvalidArgument(format!("no sample with dual energy below {max_energy} in {MAX_DRAWS} draws")))
}

pub fn moser(rng: &mut impl Rng, n: usize, tol: &ToleranceConfig) -> MoserState {
    let p = phat(rng, n, MIN_GAP, GAP_SPREAD);
    let w = (0..n).map(|_| rng.gen_range(-1.0f64..1.0).exp()).collect();
    MoserState::new(p, w, tol).expect("sampled Moser state is valid")
}

pub fn toda(rng: &mut impl Rng, n: usize) -> TodaState {
    let q = uniform_vec(rng, n, COORD_BOUND);
    let p = uniform_vec(rng, n, COORD_BOUND);
    TodaState::new(q, p).expect("sampled Toda state is finite")
}
