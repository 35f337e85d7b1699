//! The open Toda lattice on `M = ℝⁿ × ℝⁿ`.
//!
//! `H(q, p) = ½ Σ pᵢ² + Σ exp(qᵢ − qᵢ₊₁)` with brackets `{qᵢ, pⱼ} = δᵢⱼ`.

use serde::{Deserialize, Serialize};

use crate::config::ToleranceConfig;
use crate::error::{Error, Result};
use crate::matlin::SquareMatrix;

/// A point `(q, p)` of the Toda phase space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TodaState {
    q: Vec<f64>,
    p: Vec<f64>,
}

impl TodaState {
    pub fn new(q: Vec<f64>, p: Vec<f64>) -> Result<Self> {
        if q.is_empty() {
            return Err(Error::InvalidState("dimension must be positive".into()));
        }
        if q.len() != p.len() {
            return Err(Error::DimensionMismatch { expected: q.len(), found: p.len() });
        }
        if q.iter().chain(&p).any(|x| !x.is_finite()) {
            return Err(Error::InvalidState("positions and momenta must be finite".into()));
        }
        Ok(Self { q, p })
    }

    pub fn n(&self) -> usize {
        self.q.len()
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    /// `(q₁..qₙ, p₁..pₙ)`.
    pub fn to_coords(&self) -> Vec<f64> {
        self.q.iter().chain(&self.p).copied().collect()
    }

    pub fn from_coords(x: &[f64]) -> Result<Self> {
        if !x.len().is_multiple_of(2) {
            return Err(Error::InvalidArgument("odd coordinate count".into()));
        }
        let n = x.len() / 2;
        Self::new(x[..n].to_vec(), x[n..].to_vec())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.to_coords().iter().zip(other.to_coords()).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// Time-sampled states of one kind.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<S> {
    pub times: Vec<f64>,
    pub states: Vec<S>,
}

impl<S> Trajectory<S> {
    pub fn single(state: S) -> Self {
        Self { times: vec![0.0], states: vec![state] }
    }

    pub fn last(&self) -> &S {
        self.states.last().expect("trajectory is never empty")
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

fn guarded_exp(x: f64, tol: &ToleranceConfig) -> Result<f64> {
    if x > tol.max_exponent {
        return Err(Error::Overflow { exponent: x });
    }
    Ok(x.exp())
}

pub fn hamiltonian(s: &TodaState, tol: &ToleranceConfig) -> Result<f64> {
    let kinetic: f64 = 0.5 * s.p.iter().map(|p| p * p).sum::<f64>();
    let mut potential = 0.0;
    for w in s.q.windows(2) {
        potential += guarded_exp(w[0] - w[1], tol)?;
    }
    Ok(kinetic + potential)
}

/// The Jacobi matrix `L(q, p)`.
///
/// Slot `i` of the matrix carries particle `n + 1 − i`: the diagonal is
/// `(−pₙ, …, −p₁)` and the entry `(i+1, i)` (1-based) is
/// `exp((q_{n−i} − q_{n+1−i}) / 2)`.
pub fn lax_matrix(s: &TodaState, tol: &ToleranceConfig) -> Result<SquareMatrix> {
    let n = s.n();
    let mut l = SquareMatrix::zeros(n);
    for i in 0..n {
        l[(i, i)] = -s.p[n - 1 - i];
    }
    for i in 0..n - 1 {
        // 0-based slots i, i+1 hold particles n-1-i and n-2-i
        let off = guarded_exp(0.5 * (s.q[n - 2 - i] - s.q[n - 1 - i]), tol)?;
        l[(i + 1, i)] = off;
        l[(i, i + 1)] = off;
    }
    Ok(l)
}

/// `tr(Lᵏ)/k` for `k = 1..=n`.
pub fn commuting_hamiltonians(s: &TodaState, tol: &ToleranceConfig) -> Result<Vec<f64>> {
    let l = lax_matrix(s, tol)?;
    let mut power = l.clone();
    let mut out = Vec::with_capacity(s.n());
    for k in 1..=s.n() {
        if k > 1 {
            power = &power * &l;
        }
        out.push(power.trace() / k as f64);
    }
    Ok(out)
}

/// `−∂H/∂q`.
fn force(q: &[f64], tol: &ToleranceConfig) -> Result<Vec<f64>> {
    let n = q.len();
    let mut f = vec![0.0; n];
    for i in 0..n.saturating_sub(1) {
        let e = guarded_exp(q[i] - q[i + 1], tol)?;
        f[i] -= e;
        f[i + 1] += e;
    }
    Ok(f)
}

/// Hamilton's equations `(dq, dp) = (∂H/∂p, −∂H/∂q)`.
pub fn toda_vector_field(s: &TodaState, tol: &ToleranceConfig) -> Result<(Vec<f64>, Vec<f64>)> {
    Ok((s.p.clone(), force(&s.q, tol)?))
}

pub(crate) fn check_magnitude(s: &TodaState, tol: &ToleranceConfig) -> Result<()> {
    for (what, xs) in [("q", &s.q), ("p", &s.p)] {
        if let Some(&x) = xs.iter().find(|x| x.abs() > tol.flow_magnitude) {
            return Err(Error::MagnitudeLimit { what, value: x, limit: tol.flow_magnitude });
        }
    }
    Ok(())
}

/// Sample times `dt, 2dt, …, t` on a fixed grid; the last step is shortened.
pub(crate) fn time_grid(t: f64, dt: f64) -> Result<Vec<f64>> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidArgument(format!("step must be positive, got {dt}")));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("time must be nonnegative, got {t}")));
    }
    let steps = (t / dt - 1e-9).ceil().max(0.0) as usize;
    let mut grid: Vec<f64> = (1..steps).map(|k| k as f64 * dt).collect();
    if steps > 0 {
        grid.push(t);
    }
    Ok(grid)
}

/// Störmer–Verlet (kick-drift-kick), sampled after every step.
pub fn verlet_flow(s: &TodaState, t: f64, dt: f64, tol: &ToleranceConfig) -> Result<Trajectory<TodaState>> {
    check_magnitude(s, tol)?;
    let grid = time_grid(t, dt)?;
    let mut traj = Trajectory::single(s.clone());
    traj.times.reserve(grid.len());
    traj.states.reserve(grid.len());

    let mut q = s.q.clone();
    let mut p = s.p.clone();
    let mut f = force(&q, tol)?;
    let mut now = 0.0;
    for (step, &next) in grid.iter().enumerate() {
        let h = next - now;
        for i in 0..q.len() {
            p[i] += 0.5 * h * f[i];
            q[i] += h * p[i];
        }
        f = force(&q, tol)?;
        for i in 0..q.len() {
            p[i] += 0.5 * h * f[i];
        }
        if q.iter().chain(&p).any(|x| !x.is_finite()) {
            return Err(Error::NonFiniteState { step: step + 1 });
        }
        now = next;
        traj.times.push(next);
        traj.states.push(TodaState { q: q.clone(), p: p.clone() });
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn st(q: &[f64], p: &[f64]) -> TodaState {
        TodaState::new(q.to_vec(), p.to_vec()).unwrap()
    }

    fn worked() -> TodaState {
        let l2 = std::f64::consts::LN_2;
        st(&[-l2, l2], &[-0.5, -0.5])
    }

    #[test]
    fn state_validation() {
        assert!(TodaState::new(vec![], vec![]).is_err());
        assert!(TodaState::new(vec![0.0], vec![0.0, 1.0]).is_err());
        assert!(TodaState::new(vec![f64::NAN], vec![0.0]).is_err());
    }

    #[test]
    fn hamiltonian_examples() {
        assert_eq!(hamiltonian(&st(&[0.0], &[0.0]), &tol()).unwrap(), 0.0);
        assert_eq!(hamiltonian(&st(&[0.0, 0.0], &[0.0, 0.0]), &tol()).unwrap(), 1.0);
        // ½(¼ + ¼) + e^{-2 ln 2} = ¼ + ¼
        assert!((hamiltonian(&worked(), &tol()).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn hamiltonian_overflow_guard() {
        let s = st(&[800.0, 0.0], &[0.0, 0.0]);
        assert!(matches!(hamiltonian(&s, &tol()), Err(Error::Overflow { .. })));
    }

    #[test]
    fn lax_examples() {
        let l1 = lax_matrix(&st(&[4.0], &[3.0]), &tol()).unwrap();
        assert_eq!(l1[(0, 0)], -3.0);
        let l2 = lax_matrix(&st(&[0.0, 0.0], &[0.0, 0.0]), &tol()).unwrap();
        assert_eq!(l2, SquareMatrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap());
        let lw = lax_matrix(&worked(), &tol()).unwrap();
        let half = SquareMatrix::from_rows(&[[0.5, 0.5], [0.5, 0.5]]).unwrap();
        assert!(lw.max_abs_diff(&half) < 1e-15);
    }

    #[test]
    fn lax_slot_order_is_reversed() {
        // diagonal (-p3, -p2, -p1); (2,1) entry = e^{(q2-q3)/2}, (3,2) entry = e^{(q1-q2)/2}
        let l = lax_matrix(&st(&[0.0, 2.0, 6.0], &[1.0, 2.0, 3.0]), &tol()).unwrap();
        assert_eq!(l.diag(), vec![-3.0, -2.0, -1.0]);
        assert!((l[(1, 0)] - (-2.0f64).exp()).abs() < 1e-15);
        assert!((l[(2, 1)] - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn commuting_examples() {
        assert_eq!(commuting_hamiltonians(&st(&[0.0], &[3.0]), &tol()).unwrap(), vec![-3.0]);
        assert_eq!(commuting_hamiltonians(&st(&[0.0, 0.0], &[0.0, 0.0]), &tol()).unwrap(), vec![0.0, 1.0]);
        let h = commuting_hamiltonians(&worked(), &tol()).unwrap();
        assert!((h[0] - 1.0).abs() < 1e-15 && (h[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn vector_field_examples() {
        let (dq, dp) = toda_vector_field(&st(&[1.0], &[2.5]), &tol()).unwrap();
        assert_eq!((dq, dp), (vec![2.5], vec![0.0]));
        let (dq, dp) = toda_vector_field(&st(&[0.0, 0.0], &[0.0, 0.0]), &tol()).unwrap();
        assert_eq!((dq, dp), (vec![0.0, 0.0], vec![-1.0, 1.0]));
    }

    #[test]
    fn verlet_free_particle_is_exact() {
        let traj = verlet_flow(&st(&[0.3], &[-1.7]), 2.0, 0.3, &tol()).unwrap();
        for (t, s) in traj.times.iter().zip(&traj.states) {
            assert!((s.q()[0] - (0.3 - 1.7 * t)).abs() < 1e-14);
            assert_eq!(s.p()[0], -1.7);
        }
        assert_eq!(*traj.times.last().unwrap(), 2.0);
    }

    #[test]
    fn verlet_zero_time_is_single_state() {
        let traj = verlet_flow(&worked(), 0.0, 1e-3, &tol()).unwrap();
        assert_eq!(traj.len(), 1);
        assert_eq!(traj.last(), &worked());
    }

    #[test]
    fn verlet_grid_shortens_last_step() {
        let traj = verlet_flow(&worked(), 1.05, 0.1, &tol()).unwrap();
        assert_eq!(traj.len(), 12);
        assert_eq!(*traj.times.last().unwrap(), 1.05);
        assert!((traj.times[10] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn verlet_rejects_large_inputs() {
        let s = st(&[60.0, 0.0], &[0.0, 0.0]);
        assert!(matches!(verlet_flow(&s, 1.0, 0.1, &tol()), Err(Error::MagnitudeLimit { .. })));
        assert!(verlet_flow(&worked(), 1.0, 0.0, &tol()).is_err());
    }

    fn energy_drift(dt: f64) -> f64 {
        let s = st(&[-1.2, 0.4, 0.1, 1.5], &[0.8, -0.3, 1.1, -0.6]);
        let h0 = hamiltonian(&s, &tol()).unwrap();
        let traj = verlet_flow(&s, 10.0, dt, &tol()).unwrap();
        traj.states.iter().map(|x| (hamiltonian(x, &tol()).unwrap() - h0).abs() / h0).fold(0.0, f64::max)
    }

    #[test]
    fn verlet_energy_drift_is_second_order() {
        let coarse = energy_drift(2e-3);
        let fine = energy_drift(1e-3);
        assert!(fine <= 1e-6, "drift {fine:e}");
        let ratio = coarse / fine;
        assert!((3.5..4.5).contains(&ratio), "ratio {ratio}");
    }

    fn arb_state(nmax: usize, bound: f64) -> impl Strategy<Value = TodaState> {
        (1..=nmax).prop_flat_map(move |n| {
            (proptest::collection::vec(-bound..bound, n), proptest::collection::vec(-bound..bound, n))
                .prop_map(|(q, p)| TodaState::new(q, p).unwrap())
        })
    }

    proptest! {
        #[test]
        fn lax_structure(s in arb_state(8, 3.0)) {
            let l = lax_matrix(&s, &tol()).unwrap();
            let n = s.n();
            for i in 0..n - 1 {
                prop_assert!(l[(i + 1, i)] > 0.0);
            }
            let sum_p: f64 = s.p().iter().sum();
            prop_assert!((l.trace() + sum_p).abs() <= 1e-13 * (1.0 + sum_p.abs()));
            let h = hamiltonian(&s, &tol()).unwrap();
            let ch = commuting_hamiltonians(&s, &tol()).unwrap();
            if n >= 2 {
                prop_assert!((ch[1] - h).abs() <= 1e-12 * h);
            }
        }

        #[test]
        fn momentum_telescopes(s in arb_state(8, 3.0)) {
            let (_, dp) = toda_vector_field(&s, &tol()).unwrap();
            let total: f64 = dp.iter().sum();
            let scale: f64 = dp.iter().map(|x| x.abs()).sum::<f64>().max(1.0);
            prop_assert!(total.abs() <= 1e-14 * scale);
        }
    }

    #[test]
    fn vector_field_matches_finite_differences() {
        let s = st(&[0.3, -0.2, 0.9], &[0.5, -1.0, 0.25]);
        let (dq, dp) = toda_vector_field(&s, &tol()).unwrap();
        let h = 1e-6;
        for i in 0..3 {
            let mut plus = s.clone();
            let mut minus = s.clone();
            plus.q[i] += h;
            minus.q[i] -= h;
            let dh_dq = (hamiltonian(&plus, &tol()).unwrap() - hamiltonian(&minus, &tol()).unwrap()) / (2.0 * h);
            assert!((dp[i] + dh_dq).abs() < 1e-8);
            let mut plus = s.clone();
            let mut minus = s.clone();
            plus.p[i] += h;
            minus.p[i] -= h;
            let dh_dp = (hamiltonian(&plus, &tol()).unwrap() - hamiltonian(&minus, &tol()).unwrap()) / (2.0 * h);
            assert!((dq[i] - dh_dp).abs() < 1e-8);
        }
    }
}
