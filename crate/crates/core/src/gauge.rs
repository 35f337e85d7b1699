//! The big phase space `T*GL(n, ℝ) ≃ G × 𝒢` and its two gauge slices.
//!
//! The Toda slice consists of points `(exp(Q(q)/2), L(q, p))`; the Moser slice
//! of points `(Γ(p̂, w)⁻¹, Λ(p̂))` with `Γ = [w, Λw, …, Λⁿ⁻¹w] = W·V(p̂)`.
//! Both lie on the moment-map constraint surface `Φ = (I₋, 0)`, and the
//! Iwasawa factorization of `Γ⁻¹` carries a Moser point to the gauge
//! equivalent Toda point.

use serde::{Deserialize, Serialize};

use crate::config::ToleranceConfig;
use crate::error::{Error, Result};
use crate::matlin::{inverse, parts, qr_positive, qr_with_threshold, sym_eigen_desc, Lu, SquareMatrix};
use crate::subsets::{self, Accumulation};
use crate::toda::{lax_matrix, TodaState};

/// Moser variables: eigenvalues `p̂` (strictly decreasing) and norming
/// constants `w` (positive).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoserState {
    phat: Vec<f64>,
    w: Vec<f64>,
}

pub(crate) fn check_descending(phat: &[f64], tol: &ToleranceConfig) -> Result<()> {
    if phat.is_empty() {
        return Err(Error::InvalidState("dimension must be positive".into()));
    }
    if phat.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidState("p̂ must be finite".into()));
    }
    for (i, pair) in phat.windows(2).enumerate() {
        let gap = pair[0] - pair[1];
        if !(gap > tol.degeneracy) {
            return Err(Error::InvalidState(format!(
                "p̂ must be strictly decreasing with gaps above {:e} (gap {gap:e} after index {i})",
                tol.degeneracy
            )));
        }
    }
    Ok(())
}

impl MoserState {
    pub fn new(phat: Vec<f64>, w: Vec<f64>, tol: &ToleranceConfig) -> Result<Self> {
        check_descending(&phat, tol)?;
        if w.len() != phat.len() {
            return Err(Error::DimensionMismatch { expected: phat.len(), found: w.len() });
        }
        if w.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(Error::InvalidState("w must be positive and finite".into()));
        }
        Ok(Self { phat, w })
    }

    pub fn n(&self) -> usize {
        self.phat.len()
    }

    pub fn phat(&self) -> &[f64] {
        &self.phat
    }

    pub fn w(&self) -> &[f64] {
        &self.w
    }

    /// Same eigenvalues with `w` rescaled by `lambda > 0`.
    pub fn scaled(&self, lambda: f64) -> Self {
        assert!(lambda > 0.0);
        Self { phat: self.phat.clone(), w: self.w.iter().map(|x| x * lambda).collect() }
    }
}

/// `Γ⁻¹ = η₊ · diag(ρ) · η_K` with `η₊` unit upper triangular, `ρ > 0` and
/// `η_K` orthogonal.
#[derive(Debug, Clone, PartialEq)]
pub struct IwasawaFactors {
    pub eta_plus: SquareMatrix,
    pub rho: Vec<f64>,
    pub eta_k: SquareMatrix,
}

impl IwasawaFactors {
    pub fn product(&self) -> SquareMatrix {
        &(&self.eta_plus * &SquareMatrix::diagonal(&self.rho)) * &self.eta_k
    }
}

/// A point `(g, 𝒥)` of `T*G`.
#[derive(Debug, Clone, PartialEq)]
pub struct BigPhasePoint {
    pub g: SquareMatrix,
    pub j: SquareMatrix,
}

impl BigPhasePoint {
    pub fn new(g: SquareMatrix, j: SquareMatrix) -> Result<Self> {
        if g.n() != j.n() {
            return Err(Error::DimensionMismatch { expected: g.n(), found: j.n() });
        }
        Ok(Self { g, j })
    }

    /// `(exp(Q(q)/2), L(q, p))`.
    pub fn toda_slice(s: &TodaState, tol: &ToleranceConfig) -> Result<Self> {
        let n = s.n();
        let g = SquareMatrix::diagonal(&(0..n).map(|i| (-0.5 * s.q()[n - 1 - i]).exp()).collect::<Vec<_>>());
        Ok(Self { g, j: lax_matrix(s, tol)? })
    }

    /// `(Γ(p̂, w)⁻¹, Λ(p̂))`.
    pub fn moser_slice(m: &MoserState, tol: &ToleranceConfig) -> Result<Self> {
        Ok(Self { g: inverse(&gamma(m), tol)?, j: lambda(m) })
    }
}

/// `Λ(p̂) = diag(p̂)`.
pub fn lambda(m: &MoserState) -> SquareMatrix {
    SquareMatrix::diagonal(&m.phat)
}

fn gamma_of(phat: &[f64], w: &[f64]) -> SquareMatrix {
    SquareMatrix::from_fn(phat.len(), |i, j| w[i] * phat[i].powi(j as i32))
}

/// `Γᵢⱼ = wᵢ · p̂ᵢʲ⁻¹`.
pub fn gamma(m: &MoserState) -> SquareMatrix {
    gamma_of(&m.phat, &m.w)
}

fn upper_triangular_inverse(r: &SquareMatrix) -> SquareMatrix {
    let n = r.n();
    let mut inv = SquareMatrix::zeros(n);
    for j in 0..n {
        inv[(j, j)] = 1.0 / r[(j, j)];
        for i in (0..j).rev() {
            let s: f64 = (i + 1..=j).map(|k| r[(i, k)] * inv[(k, j)]).sum();
            inv[(i, j)] = -s / r[(i, i)];
        }
    }
    inv
}

/// Iwasawa factors of `Γ⁻¹` from a single positive QR of `Γ`.
///
/// With `Γ = Q·R`: `η_K = Qᵀ`, `ρ = 1/diag(R)` and `η₊ = R⁻¹·diag(ρ)⁻¹`.
pub fn iwasawa_of_gamma_inverse(m: &MoserState, tol: &ToleranceConfig) -> Result<IwasawaFactors> {
    let g = gamma(m);
    let (q, r) = qr_positive(&g, tol)?;
    let n = m.n();
    let r_inv = upper_triangular_inverse(&r);
    let rho: Vec<f64> = r.diag().iter().map(|x| 1.0 / x).collect();
    let eta_plus = SquareMatrix::from_fn(n, |i, j| if i > j { 0.0 } else { r_inv[(i, j)] * r[(j, j)] });
    let factors = IwasawaFactors { eta_plus, rho, eta_k: q.transpose() };
    let residual = (&factors.product() * &g).max_abs_diff(&SquareMatrix::identity(n));
    if residual > tol.iwasawa_residual {
        return Err(Error::ResidualTooLarge { residual, tolerance: tol.iwasawa_residual });
    }
    Ok(factors)
}

/// Gauge transform of a Moser-slice point into the Toda slice.
///
/// Reads `q` from `ρᵢ = exp(−q_{n+1−i}/2)` and `p` from the diagonal of
/// `𝒥 = η_K Λ η_Kᵀ`.
pub fn moser_to_toda(m: &MoserState, tol: &ToleranceConfig) -> Result<TodaState> {
    let n = m.n();
    // Γ(c + s·x, w) = Γ(x, w)·T with T unit-upper-triangular up to the
    // diagonal diag(s^{j-1}), so η_K is unchanged, ρ_j picks up s^{1-j} and
    // 𝒥 maps to s·𝒥 + c. Factoring the centered, unit-spread Γ keeps the
    // Vandermonde part well conditioned.
    let center = 0.5 * (m.phat[0] + m.phat[n - 1]);
    let spread = if n > 1 { 0.5 * (m.phat[0] - m.phat[n - 1]) } else { 1.0 };
    let x: Vec<f64> = m.phat.iter().map(|p| (p - center) / spread).collect();
    // Rows sorted by decreasing norm: Γ is row-graded when w spans many
    // orders of magnitude, and the permutation only reorders the rows of Q.
    let row_norm = |i: usize| m.w[i] * (0..n).map(|k| x[i].powi(2 * k as i32)).sum::<f64>().sqrt();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| row_norm(b).total_cmp(&row_norm(a)));
    let x: Vec<f64> = order.iter().map(|&i| x[i]).collect();
    let w: Vec<f64> = order.iter().map(|&i| m.w[i]).collect();
    // Γ is invertible for any valid state; accuracy is checked on 𝒥 below.
    let (q_mat, r) = qr_with_threshold(&gamma_of(&x, &w), f64::MIN_POSITIVE)?;

    let eta_k = q_mat.transpose();
    let jx = &(&eta_k * &SquareMatrix::diagonal(&x)) * &q_mat;
    let big_j =
        SquareMatrix::from_fn(n, |i, j| spread * 0.5 * (jx[(i, j)] + jx[(j, i)]) + if i == j { center } else { 0.0 });

    let log_spread = spread.ln();
    let mut q = vec![0.0; n];
    let mut p = vec![0.0; n];
    for i in 0..n {
        // slot i (0-based) ↔ particle n-1-i; -2 ln ρ_i = 2 ln R_ii + 2 i ln s
        q[n - 1 - i] = 2.0 * r[(i, i)].ln() + 2.0 * i as f64 * log_spread;
        p[n - 1 - i] = -big_j[(i, i)];
    }
    let state = TodaState::new(q, p)?;

    let scale = big_j.max_abs().max(1.0);
    let band = tol.gauge_band * scale;
    for i in 0..n {
        for j in 0..n {
            if i.abs_diff(j) > 1 && big_j[(i, j)].abs() > band {
                return Err(Error::GaugeMismatch(format!(
                    "𝒥 is not tridiagonal: |𝒥[{i},{j}]| = {:e}",
                    big_j[(i, j)].abs()
                )));
            }
        }
        if i + 1 < n && big_j[(i + 1, i)] < -band {
            return Err(Error::GaugeMismatch(format!("negative subdiagonal at slot {i}")));
        }
    }
    let lax = lax_matrix(&state, tol)?;
    let mismatch = lax.max_abs_diff(&big_j);
    if mismatch > band {
        return Err(Error::GaugeMismatch(format!("𝒥 differs from L(q, p) by {mismatch:e}")));
    }
    Ok(state)
}

/// Spectral data of the Lax matrix: eigenvalues and norming constants
/// `wᵢ = exp(qₙ/2)·u₁ᵢ`, normalized by `Σ wᵢ² = exp(qₙ)`.
pub fn toda_to_moser(s: &TodaState, tol: &ToleranceConfig) -> Result<MoserState> {
    let l = lax_matrix(s, tol)?;
    let eig = sym_eigen_desc(&l, tol)?;
    let n = s.n();
    let half = 0.5 * s.q()[n - 1];
    if half > tol.max_exponent {
        return Err(Error::Overflow { exponent: half });
    }
    let amp = half.exp();
    let w: Vec<f64> = (0..n).map(|i| amp * eig.vectors[(0, i)]).collect();
    MoserState::new(eig.values, w, tol)
}

/// `exp(qₙ)·((z − L)⁻¹)₁₁`.
pub fn resolvent(s: &TodaState, z: f64, tol: &ToleranceConfig) -> Result<f64> {
    let l = lax_matrix(s, tol)?;
    let eig = sym_eigen_desc(&l, tol)?;
    let distance = eig.values.iter().map(|v| (z - v).abs()).fold(f64::INFINITY, f64::min);
    if distance <= tol.near_pole {
        return Err(Error::NearPole { z, distance });
    }
    let n = s.n();
    let shifted = SquareMatrix::from_fn(n, |i, j| if i == j { z - l[(i, j)] } else { -l[(i, j)] });
    let mut e1 = vec![0.0; n];
    e1[0] = 1.0;
    let x = Lu::new(&shifted).solve(&e1, tol)?;
    let qn = s.q()[n - 1];
    if qn > tol.max_exponent {
        return Err(Error::Overflow { exponent: qn });
    }
    Ok(qn.exp() * x[0])
}

/// The Hankel moment matrix `Y = ΓᵀΓ`, `Yᵢⱼ = Σₖ p̂ₖ^{i+j−2} wₖ²`.
pub fn hankel(m: &MoserState) -> SquareMatrix {
    let n = m.n();
    let moments: Vec<f64> =
        (0..2 * n - 1).map(|e| m.phat.iter().zip(&m.w).map(|(p, w)| w * w * p.powi(e as i32)).sum()).collect();
    SquareMatrix::from_fn(n, |i, j| moments[i + j])
}

fn minors_log(m: &MoserState, tol: &ToleranceConfig) -> Result<Vec<f64>> {
    let n = m.n();
    subsets::check_dimension(n, tol.max_subset_dim)?;
    let lg = subsets::log_gaps(&m.phat);
    let log_w2: Vec<f64> = m.w.iter().map(|w| 2.0 * w.ln()).collect();
    let wide = log_w2.iter().any(|x| x.abs() > tol.log_space_threshold)
        || (m.phat[0] - m.phat[n - 1]) > tol.log_space_threshold
        || lg.iter().flatten().any(|x| x.abs() > tol.log_space_threshold);
    let mode = if wide { Accumulation::LogSpace } else { Accumulation::Direct };

    let direct = |mask: u32| {
        let idx: Vec<usize> = subsets::members(mask, n).collect();
        let mut t = 1.0;
        for (a, &i) in idx.iter().enumerate() {
            t *= m.w[i] * m.w[i];
            for &j in &idx[a + 1..] {
                let d = m.phat[i] - m.phat[j];
                t *= d * d;
            }
        }
        t
    };
    let log = |mask: u32| {
        let idx: Vec<usize> = subsets::members(mask, n).collect();
        let mut l = 0.0;
        for (a, &i) in idx.iter().enumerate() {
            l += log_w2[i];
            for &j in &idx[a + 1..] {
                l += 2.0 * lg[i][j];
            }
        }
        l
    };
    let sums = subsets::subset_sums(n, mode, direct, log, |_| 0.0);
    Ok(sums.log_sums[1..].to_vec())
}

/// Leading principal minors of `Y(p̂, w)` in closed form:
/// `m_k = Σ_{|I|=k} Π_{l∈I} w_l² · Π_{i≠j∈I} |p̂ᵢ − p̂ⱼ|`.
pub fn minors_cauchy_binet(m: &MoserState, tol: &ToleranceConfig) -> Result<Vec<f64>> {
    minors_log(m, tol)?.into_iter().map(|l| subsets::exp_checked(l, tol.max_exponent)).collect()
}

/// Natural logarithms of [`minors_cauchy_binet`], without the overflow limit.
pub fn log_minors_cauchy_binet(m: &MoserState, tol: &ToleranceConfig) -> Result<Vec<f64>> {
    minors_log(m, tol)
}

/// `a · g⁻¹` through an LU factorization of `gᵀ`.
fn right_divide(a: &SquareMatrix, g: &SquareMatrix, tol: &ToleranceConfig) -> Result<SquareMatrix> {
    let n = a.n();
    let lu = Lu::new(&g.transpose());
    let mut out = SquareMatrix::zeros(n);
    for i in 0..n {
        // row i of a g^{-1} solves g^T x = (row i of a)^T
        let x = lu.solve(a.row(i), tol)?;
        for j in 0..n {
            out[(i, j)] = x[j];
        }
    }
    Ok(out)
}

/// `Φ(g, 𝒥) = ((g𝒥g⁻¹)₋, −𝒥_antisym)`.
pub fn moment_map(pt: &BigPhasePoint, tol: &ToleranceConfig) -> Result<(SquareMatrix, SquareMatrix)> {
    let conj = right_divide(&(&pt.g * &pt.j), &pt.g, tol)?;
    let lower = parts(&conj).lower;
    let antisym = parts(&pt.j).antisym.scale(-1.0);
    Ok((lower, antisym))
}

/// `m_k((g gᵀ)⁻¹)` for `k = 1..=n`.
///
/// With `g⁻¹ = QR` the matrix is `RᵀR`, whose leading minors are
/// `Π_{i≤k} R_ii²`; the product `g⁻ᵀg⁻¹` is never formed.
pub fn invariant_hamiltonians(pt: &BigPhasePoint, tol: &ToleranceConfig) -> Result<Vec<f64>> {
    let (_, r) = qr_positive(&inverse(&pt.g, tol)?, tol)?;
    Ok(r.diag()
        .iter()
        .scan(1.0, |acc, d| {
            *acc *= d * d;
            Some(*acc)
        })
        .collect())
}
