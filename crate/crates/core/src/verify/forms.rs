//! Finite-difference Jacobians, the pulled-back canonical 1-form on the Moser
//! slice, and Poisson brackets of the Moser variables.

use crate::config::ToleranceConfig;
use crate::duality::{aa_to_toda, w_from_angles, ActionAngleState};
use crate::error::Result;
use crate::matlin::{Lu, SquareMatrix};
use crate::toda::TodaState;

/// `jac[a][b] = ∂f_a/∂x_b` by central differences with step `h·max(1, |x_b|)`.
pub fn central_jacobian(f: impl Fn(&[f64]) -> Result<Vec<f64>>, x: &[f64], h: f64) -> Result<Vec<Vec<f64>>> {
    let m = x.len();
    let mut columns = Vec::with_capacity(m);
    let mut y = x.to_vec();
    for b in 0..m {
        let step = h * x[b].abs().max(1.0);
        y[b] = x[b] + step;
        let plus = f(&y)?;
        y[b] = x[b] - step;
        let minus = f(&y)?;
        y[b] = x[b];
        columns.push(plus.iter().zip(&minus).map(|(u, v)| (u - v) / (2.0 * step)).collect::<Vec<_>>());
    }
    let rows = columns.first().map_or(0, Vec::len);
    Ok((0..rows).map(|a| (0..m).map(|b| columns[b][a]).collect()).collect())
}

/// Exterior derivative of a 1-form given by its components:
/// `F[a][b] = ∂_a θ_b − ∂_b θ_a`.
pub fn exterior_derivative(theta: impl Fn(&[f64]) -> Result<Vec<f64>>, x: &[f64], h: f64) -> Result<Vec<Vec<f64>>> {
    let d = central_jacobian(theta, x, h)?;
    let m = x.len();
    Ok((0..m).map(|a| (0..m).map(|b| d[b][a] - d[a][b]).collect()).collect())
}

/// `[[0, −I], [I, 0]]`, the matrix of both `Σ dpᵢ∧dqᵢ` in `(q, p)` order and
/// `Σ dq̂ᵢ∧dp̂ᵢ` in `(p̂, q̂)` order.
pub fn canonical_matrix(n: usize) -> Vec<Vec<f64>> {
    let mut omega = vec![vec![0.0; 2 * n]; 2 * n];
    for i in 0..n {
        omega[i][n + i] = -1.0;
        omega[n + i][i] = 1.0;
    }
    omega
}

/// `max |Jᵀ Ω J − Ω|` for the Jacobian of the action-angle map at `a`.
pub fn symplectic_defect(a: &ActionAngleState, h: f64, tol: &ToleranceConfig) -> Result<f64> {
    symplectic_defect_of(|a| aa_to_toda(a, tol), a, h, tol)
}

pub(crate) fn symplectic_defect_of(
    map: impl Fn(&ActionAngleState) -> Result<TodaState>,
    a: &ActionAngleState,
    h: f64,
    tol: &ToleranceConfig,
) -> Result<f64> {
    let n = a.n();
    let jac = central_jacobian(|x| Ok(map(&ActionAngleState::from_coords(x, tol)?)?.to_coords()), &a.to_coords(), h)?;
    let omega = canonical_matrix(n);
    let m = 2 * n;
    let mut defect: f64 = 0.0;
    for a_ in 0..m {
        for b in 0..m {
            let mut s = 0.0;
            for c in 0..m {
                for d in 0..m {
                    s += jac[c][a_] * omega[c][d] * jac[d][b];
                }
            }
            defect = defect.max((s - omega[a_][b]).abs());
        }
    }
    Ok(defect)
}

/// Components of `θ = −2 tr(Λ dW W⁻¹) − 2 tr(Λ dV V⁻¹)` in coordinates
/// `(p̂, w)`, with the Vandermonde trace taken as `p̂ᵢ ∂ᵢ ln|det V|`.
/// `w_factor` replaces the coefficient `−2` of the first term.
pub fn pullback_theta_logdet(x: &[f64], w_factor: f64) -> Vec<f64> {
    let n = x.len() / 2;
    let (p, w) = x.split_at(n);
    let mut theta = vec![0.0; 2 * n];
    for i in 0..n {
        let log_det_partial: f64 = (0..n).filter(|&j| j != i).map(|j| 1.0 / (p[i] - p[j])).sum();
        theta[i] = -2.0 * p[i] * log_det_partial;
        theta[n + i] = w_factor * p[i] / w[i];
    }
    theta
}

/// The same components with `tr(Λ ∂ᵢV V⁻¹)` evaluated as a matrix trace.
pub fn pullback_theta_matrix(x: &[f64], tol: &ToleranceConfig) -> Result<Vec<f64>> {
    let n = x.len() / 2;
    let (p, w) = x.split_at(n);
    let v = SquareMatrix::from_fn(n, |i, j| p[i].powi(j as i32));
    let v_inv = Lu::new(&v).inverse(tol)?;
    let mut theta = vec![0.0; 2 * n];
    for i in 0..n {
        // ∂ᵢV is zero outside row i
        let trace: f64 = (1..n).map(|b| b as f64 * p[i].powi(b as i32 - 1) * v_inv[(b, i)]).sum();
        theta[i] = -2.0 * p[i] * trace;
        theta[n + i] = -2.0 * p[i] / w[i];
    }
    Ok(theta)
}

/// Expected `dθ` in coordinates `(p̂, ln w)`:
/// `Σᵢ 2 d ln wᵢ∧dp̂ᵢ + Σ_{j≠k} dp̂ⱼ∧dp̂ₖ/(p̂ⱼ − p̂ₖ)`.
pub fn expected_moser_form(p: &[f64]) -> Vec<Vec<f64>> {
    let n = p.len();
    let mut f = vec![vec![0.0; 2 * n]; 2 * n];
    for i in 0..n {
        f[n + i][i] = 2.0;
        f[i][n + i] = -2.0;
        for k in 0..n {
            if k != i {
                f[i][k] = 2.0 / (p[i] - p[k]);
            }
        }
    }
    f
}

/// Converts a 2-form matrix from `(p̂, w)` to `(p̂, ln w)` coordinates.
pub fn to_log_w(f: &[Vec<f64>], w: &[f64]) -> Vec<Vec<f64>> {
    let n = w.len();
    let scale = |a: usize| if a >= n { w[a - n] } else { 1.0 };
    f.iter()
        .enumerate()
        .map(|(a, row)| row.iter().enumerate().map(|(b, v)| v * scale(a) * scale(b)).collect())
        .collect()
}

/// `∂wⱼ/∂p̂ᵢ` and `∂wⱼ/∂q̂ᵢ`, indexed `[j][i]`, for
/// `wⱼ = exp(q̂ⱼ/2) Π_{k≠j} |p̂ⱼ − p̂ₖ|^{−1/2}`.
pub fn w_partials(p: &[f64], w: &[f64]) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let n = p.len();
    let mut dp = vec![vec![0.0; n]; n];
    let mut dq = vec![vec![0.0; n]; n];
    for j in 0..n {
        dq[j][j] = 0.5 * w[j];
        for i in 0..n {
            if i != j {
                dp[j][i] = 0.5 * w[j] / (p[j] - p[i]);
                dp[j][j] -= 0.5 * w[j] / (p[j] - p[i]);
            }
        }
    }
    (dp, dq)
}

/// `θ` pulled back to `(p̂, q̂)` by the chain rule.
pub fn pullback_theta_angles(y: &[f64], tol: &ToleranceConfig) -> Result<Vec<f64>> {
    let n = y.len() / 2;
    let a = ActionAngleState::from_coords(y, tol)?;
    let m = w_from_angles(&a, tol)?;
    let x: Vec<f64> = m.phat().iter().chain(m.w()).copied().collect();
    let theta = pullback_theta_logdet(&x, -2.0);
    let (dp, dq) = w_partials(m.phat(), m.w());
    let mut out = vec![0.0; 2 * n];
    for i in 0..n {
        out[i] = theta[i] + (0..n).map(|j| theta[n + j] * dp[j][i]).sum::<f64>();
        out[n + i] = (0..n).map(|j| theta[n + j] * dq[j][i]).sum::<f64>();
    }
    Ok(out)
}

/// Gradient in `(p̂, q̂)` of a Moser coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MoserCoordinate {
    Phat(usize),
    W(usize),
}

/// `{f, g} = Σᵢ ∂_{p̂ᵢ}f ∂_{q̂ᵢ}g − ∂_{q̂ᵢ}f ∂_{p̂ᵢ}g`; `sign = −1` flips the
/// convention.
pub fn moser_bracket(f: MoserCoordinate, g: MoserCoordinate, p: &[f64], w: &[f64], sign: f64) -> f64 {
    let n = p.len();
    let (dp, dq) = w_partials(p, w);
    let grad = |c: MoserCoordinate| -> (Vec<f64>, Vec<f64>) {
        match c {
            MoserCoordinate::Phat(i) => ((0..n).map(|k| if k == i { 1.0 } else { 0.0 }).collect(), vec![0.0; n]),
            MoserCoordinate::W(j) => (dp[j].clone(), dq[j].clone()),
        }
    };
    let (fp, fq) = grad(f);
    let (gp, gq) = grad(g);
    sign * (0..n).map(|i| fp[i] * gq[i] - fq[i] * gp[i]).sum::<f64>()
}

/// `{p̂ᵢ, p̂ⱼ} = 0`, `{p̂ᵢ, wⱼ} = ½wⱼδᵢⱼ`, `{wⱼ, wₖ} = ½wⱼwₖ/(p̂ⱼ − p̂ₖ)`.
pub fn expected_bracket(f: MoserCoordinate, g: MoserCoordinate, p: &[f64], w: &[f64]) -> f64 {
    use MoserCoordinate::*;
    match (f, g) {
        (Phat(_), Phat(_)) => 0.0,
        (Phat(i), W(j)) => {
            if i == j {
                0.5 * w[j]
            } else {
                0.0
            }
        }
        (W(j), Phat(i)) => {
            if i == j {
                -0.5 * w[j]
            } else {
                0.0
            }
        }
        (W(j), W(k)) => {
            if j == k {
                0.0
            } else {
                0.5 * w[j] * w[k] / (p[j] - p[k])
            }
        }
    }
}
