//! Small dense real linear algebra.
//!
//! Only what the rest of the crate needs: a square matrix type, QR with a
//! positive-diagonal normalization, a cyclic Jacobi eigensolver for symmetric
//! matrices, LU with partial pivoting (determinants, solves, inverses and
//! leading principal minors), and the triangular / symmetric splittings of a
//! matrix.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use crate::config::ToleranceConfig;
use crate::error::{Error, Result};

/// Dense `n × n` real matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct SquareMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1, "matrix dimension must be positive");
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = f(i, j);
            }
        }
        m
    }

    pub fn diagonal(d: &[f64]) -> Self {
        Self::from_fn(d.len(), |i, j| if i == j { d[i] } else { 0.0 })
    }

    /// Builds a matrix from rows; all rows must have length `rows.len()`.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidArgument("empty matrix".into()));
        }
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            let row = row.as_ref();
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: row.len() });
            }
            data.extend_from_slice(row);
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("matrix entries must be finite".into()));
        }
        Ok(Self { n, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self[(i, j)]).collect()
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.n).map(|i| self[(i, i)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { n: self.n, data: self.data.iter().map(|x| x * s).collect() }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        (0..self.n).map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    /// Top-left `k × k` block.
    pub fn leading_block(&self, k: usize) -> Self {
        assert!(k >= 1 && k <= self.n);
        Self::from_fn(k, |i, j| self[(i, j)])
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.n, other.n);
        self.data.iter().zip(&other.data).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn asymmetry(&self) -> f64 {
        self.max_abs_diff(&self.transpose())
    }
}

impl Index<(usize, usize)> for SquareMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for SquareMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

impl Mul for &SquareMatrix {
    type Output = SquareMatrix;
    fn mul(self, rhs: &SquareMatrix) -> SquareMatrix {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out = SquareMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

impl Add for &SquareMatrix {
    type Output = SquareMatrix;
    fn add(self, rhs: &SquareMatrix) -> SquareMatrix {
        assert_eq!(self.n, rhs.n);
        SquareMatrix { n: self.n, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &SquareMatrix {
    type Output = SquareMatrix;
    fn sub(self, rhs: &SquareMatrix) -> SquareMatrix {
        assert_eq!(self.n, rhs.n);
        SquareMatrix { n: self.n, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

impl fmt::Debug for SquareMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SquareMatrix({}x{})", self.n, self.n)?;
        for i in 0..self.n {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        Ok(())
    }
}

/// Householder QR normalized so that `R` has a strictly positive diagonal.
///
/// With that normalization the factorization of an invertible matrix is
/// unique.
pub fn qr_positive(a: &SquareMatrix, tol: &ToleranceConfig) -> Result<(SquareMatrix, SquareMatrix)> {
    let n = a.n();
    let max_col_norm = (0..n).map(|j| a.column(j).iter().map(|x| x * x).sum::<f64>().sqrt()).fold(0.0, f64::max);
    qr_with_threshold(a, tol.singular * max_col_norm)
}

/// [`qr_positive`] with an absolute pivot threshold.
pub fn qr_with_threshold(a: &SquareMatrix, threshold: f64) -> Result<(SquareMatrix, SquareMatrix)> {
    let n = a.n();

    let mut r = a.clone();
    let mut q = SquareMatrix::identity(n);
    for k in 0..n.saturating_sub(1) {
        let norm = (k..n).map(|i| r[(i, k)] * r[(i, k)]).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let alpha = if r[(k, k)] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (k..n).map(|i| r[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        // R <- (I - 2vv^T/v^Tv) R
        for j in 0..n {
            let dot: f64 = (k..n).map(|i| v[i - k] * r[(i, j)]).sum();
            let f = 2.0 * dot / vnorm2;
            for i in k..n {
                r[(i, j)] -= f * v[i - k];
            }
        }
        // Q <- Q (I - 2vv^T/v^Tv)
        for i in 0..n {
            let dot: f64 = (k..n).map(|j| q[(i, j)] * v[j - k]).sum();
            let f = 2.0 * dot / vnorm2;
            for j in k..n {
                q[(i, j)] -= f * v[j - k];
            }
        }
        for i in k + 1..n {
            r[(i, k)] = 0.0;
        }
    }

    for k in 0..n {
        if r[(k, k)] < 0.0 {
            for j in 0..n {
                r[(k, j)] = -r[(k, j)];
            }
            for i in 0..n {
                q[(i, k)] = -q[(i, k)];
            }
        }
        if !(r[(k, k)] >= threshold) || r[(k, k)] == 0.0 {
            return Err(Error::SingularMatrix { pivot: r[(k, k)], threshold });
        }
    }
    Ok((q, r))
}

/// Eigen-decomposition `A = V diag(values) Vᵀ` of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymEigen {
    /// Strictly descending.
    pub values: Vec<f64>,
    /// Column `i` is the eigenvector of `values[i]`; first components are nonnegative.
    pub vectors: SquareMatrix,
}

/// Symmetric eigensolver based on cyclic Jacobi rotations.
///
/// Eigenvalues come back strictly descending; eigenvalues closer than
/// `tol.degeneracy` are reported as [`Error::DegenerateSpectrum`].
pub fn sym_eigen_desc(a: &SquareMatrix, tol: &ToleranceConfig) -> Result<SymEigen> {
    let n = a.n();
    let scale = a.max_abs();
    let asym = a.asymmetry();
    if asym > tol.symmetry * scale {
        return Err(Error::NotSymmetric { asymmetry: asym });
    }
    if !a.is_finite() {
        return Err(Error::InvalidArgument("matrix entries must be finite".into()));
    }

    // symmetrize so rounding noise does not leak into the rotations
    let mut m = SquareMatrix::from_fn(n, |i, j| 0.5 * (a[(i, j)] + a[(j, i)]));
    let mut v = SquareMatrix::identity(n);
    let frob2: f64 = m.data.iter().map(|x| x * x).sum();
    let target = (f64::EPSILON * f64::EPSILON) * frob2;

    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)] * m[(i, j)])
            .sum();
        if off <= target {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let tau = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                m[(p, q)] = 0.0;
                m[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(j, j)].total_cmp(&m[(i, i)]));
    let values: Vec<f64> = order.iter().map(|&i| m[(i, i)]).collect();
    let mut vectors = SquareMatrix::from_fn(n, |r, c| v[(r, order[c])]);
    for c in 0..n {
        if vectors[(0, c)] < 0.0 {
            for r in 0..n {
                vectors[(r, c)] = -vectors[(r, c)];
            }
        }
    }
    for w in values.windows(2) {
        let gap = w[0] - w[1];
        if gap <= tol.degeneracy {
            return Err(Error::DegenerateSpectrum { gap, tolerance: tol.degeneracy });
        }
    }
    Ok(SymEigen { values, vectors })
}

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: SquareMatrix,
    perm: Vec<usize>,
    parity: f64,
    scale: f64,
}

impl Lu {
    pub fn new(a: &SquareMatrix) -> Self {
        let n = a.n();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut parity = 1.0;
        for k in 0..n {
            let pivot_row = (k..n).max_by(|&i, &j| lu[(i, k)].abs().total_cmp(&lu[(j, k)].abs())).unwrap();
            if pivot_row != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(pivot_row, j)];
                    lu[(pivot_row, j)] = tmp;
                }
                perm.swap(k, pivot_row);
                parity = -parity;
            }
            let pivot = lu[(k, k)];
            if pivot == 0.0 {
                continue;
            }
            for i in k + 1..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                for j in k + 1..n {
                    lu[(i, j)] -= f * lu[(k, j)];
                }
            }
        }
        Self { lu, perm, parity, scale: a.max_abs() }
    }

    pub fn det(&self) -> f64 {
        self.parity * self.lu.diag().iter().product::<f64>()
    }

    fn check_pivots(&self, tol: &ToleranceConfig) -> Result<()> {
        let threshold = tol.singular * self.scale;
        for &u in &self.lu.diag() {
            if !(u.abs() > threshold) {
                return Err(Error::SingularMatrix { pivot: u.abs(), threshold });
            }
        }
        Ok(())
    }

    pub fn solve(&self, b: &[f64], tol: &ToleranceConfig) -> Result<Vec<f64>> {
        self.check_pivots(tol)?;
        Ok(self.solve_unchecked(b))
    }

    fn solve_unchecked(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lu.n();
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                x[i] -= self.lu[(i, j)] * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                x[i] -= self.lu[(i, j)] * x[j];
            }
            x[i] /= self.lu[(i, i)];
        }
        x
    }

    pub fn inverse(&self, tol: &ToleranceConfig) -> Result<SquareMatrix> {
        self.check_pivots(tol)?;
        let n = self.lu.n();
        let mut inv = SquareMatrix::zeros(n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e.iter_mut().for_each(|x| *x = 0.0);
            e[j] = 1.0;
            let col = self.solve_unchecked(&e);
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        Ok(inv)
    }
}

pub fn inverse(a: &SquareMatrix, tol: &ToleranceConfig) -> Result<SquareMatrix> {
    Lu::new(a).inverse(tol)
}

/// Leading principal minors `det(A[..k, ..k])` for `k = 1..=n`.
pub fn leading_minors(a: &SquareMatrix) -> Vec<f64> {
    (1..=a.n()).map(|k| Lu::new(&a.leading_block(k)).det()).collect()
}

/// The splittings `X = X₋ + X₀ + X₊` and `X = X_antisym + X_sym`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixParts {
    pub lower: SquareMatrix,
    pub diagonal: SquareMatrix,
    pub upper: SquareMatrix,
    pub antisym: SquareMatrix,
    pub sym: SquareMatrix,
}

pub fn parts(x: &SquareMatrix) -> MatrixParts {
    let n = x.n();
    MatrixParts {
        lower: SquareMatrix::from_fn(n, |i, j| if i > j { x[(i, j)] } else { 0.0 }),
        diagonal: SquareMatrix::from_fn(n, |i, j| if i == j { x[(i, j)] } else { 0.0 }),
        upper: SquareMatrix::from_fn(n, |i, j| if i < j { x[(i, j)] } else { 0.0 }),
        antisym: SquareMatrix::from_fn(n, |i, j| 0.5 * (x[(i, j)] - x[(j, i)])),
        sym: SquareMatrix::from_fn(n, |i, j| 0.5 * (x[(i, j)] + x[(j, i)])),
    }
}

/// `I₋`: ones on the first subdiagonal.
pub fn shift_lower(n: usize) -> SquareMatrix {
    SquareMatrix::from_fn(n, |i, j| if i == j + 1 { 1.0 } else { 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn m(rows: &[&[f64]]) -> SquareMatrix {
        SquareMatrix::from_rows(rows).unwrap()
    }

    fn assert_mat_close(a: &SquareMatrix, b: &SquareMatrix, eps: f64) {
        let d = a.max_abs_diff(b);
        assert!(d <= eps, "matrices differ by {d:e}\n{a:?}\n{b:?}");
    }

    #[test]
    fn qr_identity() {
        let (q, r) = qr_positive(&SquareMatrix::identity(3), &tol()).unwrap();
        assert_mat_close(&q, &SquareMatrix::identity(3), 1e-15);
        assert_mat_close(&r, &SquareMatrix::identity(3), 1e-15);
    }

    #[test]
    fn qr_two_by_two_matches_gram_schmidt() {
        // Gram-Schmidt by hand: first column (1,1)/sqrt2, R11 = sqrt2,
        // R12 = 1/sqrt2, R22 = |(1,0) - (1/2)(1,1)| = 1/sqrt2.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let (q, r) = qr_positive(&m(&[&[1.0, 1.0], &[1.0, 0.0]]), &tol()).unwrap();
        assert!((r[(0, 0)] - 2f64.sqrt()).abs() < 1e-15);
        assert!((r[(0, 1)] - s).abs() < 1e-15);
        assert!((r[(1, 1)] - s).abs() < 1e-15);
        assert!((q[(0, 0)] - s).abs() < 1e-15 && (q[(1, 0)] - s).abs() < 1e-15);
        assert!((q[(0, 1)] - s).abs() < 1e-15 && (q[(1, 1)] + s).abs() < 1e-15);
    }

    #[test]
    fn qr_diagonal_is_already_factored() {
        let a = SquareMatrix::diagonal(&[2.0, 3.0]);
        let (q, r) = qr_positive(&a, &tol()).unwrap();
        assert_mat_close(&q, &SquareMatrix::identity(2), 1e-15);
        assert_mat_close(&r, &a, 1e-15);
    }

    #[test]
    fn qr_negative_diagonal_gets_normalized() {
        let a = SquareMatrix::diagonal(&[-2.0, 3.0, -1.0]);
        let (q, r) = qr_positive(&a, &tol()).unwrap();
        assert_eq!(r.diag(), vec![2.0, 3.0, 1.0]);
        assert_mat_close(&(&q * &r), &a, 1e-15);
    }

    #[test]
    fn qr_rejects_singular() {
        let a = m(&[&[1.0, 2.0], &[2.0, 4.0]]);
        assert!(matches!(qr_positive(&a, &tol()), Err(Error::SingularMatrix { .. })));
    }

    #[test]
    fn eigen_diagonal() {
        let e = sym_eigen_desc(&SquareMatrix::diagonal(&[3.0, 1.0]), &tol()).unwrap();
        assert_eq!(e.values, vec![3.0, 1.0]);
        assert_mat_close(&e.vectors, &SquareMatrix::identity(2), 0.0);
    }

    #[test]
    fn eigen_rank_one_two_by_two() {
        // characteristic polynomial λ² - λ = 0
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let e = sym_eigen_desc(&m(&[&[0.5, 0.5], &[0.5, 0.5]]), &tol()).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-15 && e.values[1].abs() < 1e-15);
        assert_mat_close(&e.vectors, &m(&[&[s, s], &[s, -s]]), 1e-15);
    }

    #[test]
    fn eigen_swap_matrix() {
        // λ² - 1 = 0
        let e = sym_eigen_desc(&m(&[&[0.0, 1.0], &[1.0, 0.0]]), &tol()).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-15 && (e.values[1] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn eigen_rejects_asymmetric_and_degenerate() {
        let a = m(&[&[0.0, 1.0], &[0.5, 0.0]]);
        assert!(matches!(sym_eigen_desc(&a, &tol()), Err(Error::NotSymmetric { .. })));
        let b = SquareMatrix::identity(3);
        assert!(matches!(sym_eigen_desc(&b, &tol()), Err(Error::DegenerateSpectrum { .. })));
    }

    #[test]
    fn minors_examples() {
        assert_eq!(leading_minors(&SquareMatrix::identity(3)), vec![1.0, 1.0, 1.0]);
        let mm = leading_minors(&m(&[&[2.0, 1.0], &[1.0, 1.0]]));
        assert!((mm[0] - 2.0).abs() < 1e-15 && (mm[1] - 1.0).abs() < 1e-15);
        assert_eq!(leading_minors(&SquareMatrix::diagonal(&[2.0, 3.0, 4.0])), vec![2.0, 6.0, 24.0]);
    }

    #[test]
    fn minors_track_pivot_sign() {
        // second block needs a row swap: det [[0,1],[1,0]] = -1
        let a = m(&[&[0.0, 1.0, 0.0], &[1.0, 0.0, 0.0], &[0.0, 0.0, 5.0]]);
        assert_eq!(leading_minors(&a), vec![0.0, -1.0, -5.0]);
    }

    #[test]
    fn parts_examples() {
        let x = m(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let p = parts(&x);
        assert_eq!(p.lower, m(&[&[0.0, 0.0], &[3.0, 0.0]]));
        assert_eq!(p.diagonal, SquareMatrix::diagonal(&[1.0, 4.0]));
        assert_eq!(p.upper, m(&[&[0.0, 2.0], &[0.0, 0.0]]));

        let sym = m(&[&[1.0, 2.0], &[2.0, 5.0]]);
        assert_eq!(parts(&sym).antisym, SquareMatrix::zeros(2));

        let z = parts(&SquareMatrix::zeros(3));
        for piece in [z.lower, z.diagonal, z.upper, z.antisym, z.sym] {
            assert_eq!(piece, SquareMatrix::zeros(3));
        }
    }

    #[test]
    fn lu_solve_and_inverse() {
        let a = m(&[&[4.0, 1.0, 0.0], &[1.0, 3.0, 1.0], &[0.0, 1.0, 2.0]]);
        let x = Lu::new(&a).solve(&[1.0, 2.0, 3.0], &tol()).unwrap();
        let back = a.mul_vec(&x);
        for (b, e) in back.iter().zip([1.0, 2.0, 3.0]) {
            assert!((b - e).abs() < 1e-14);
        }
        let inv = inverse(&a, &tol()).unwrap();
        assert_mat_close(&(&a * &inv), &SquareMatrix::identity(3), 1e-14);
        assert!(inverse(&SquareMatrix::zeros(2), &tol()).is_err());
    }

    fn arb_matrix(n: usize) -> impl Strategy<Value = SquareMatrix> {
        proptest::collection::vec(-1.0f64..1.0, n * n).prop_map(move |v| SquareMatrix { n, data: v })
    }

    fn arb_sized() -> impl Strategy<Value = SquareMatrix> {
        (1usize..=10).prop_flat_map(arb_matrix)
    }

    proptest! {
        #[test]
        fn qr_reconstructs(a in arb_sized()) {
            let n = a.n();
            // shift away from singularity
            let a = &a + &SquareMatrix::identity(n).scale(3.0);
            let (q, r) = qr_positive(&a, &tol()).unwrap();
            prop_assert!((&q * &r).max_abs_diff(&a) <= 1e-10 * a.max_abs());
            prop_assert!((&q.transpose() * &q).max_abs_diff(&SquareMatrix::identity(n)) <= 1e-12);
            for i in 0..n {
                prop_assert!(r[(i, i)] > 0.0);
                for j in 0..i {
                    prop_assert_eq!(r[(i, j)], 0.0);
                }
            }
        }

        #[test]
        fn eigen_reconstructs(a in arb_sized()) {
            let n = a.n();
            let s = &a + &a.transpose();
            let e = match sym_eigen_desc(&s, &tol()) {
                Ok(e) => e,
                Err(Error::DegenerateSpectrum { .. }) => return Ok(()),
                Err(e) => panic!("{e}"),
            };
            let av = &s * &e.vectors;
            let vd = &e.vectors * &SquareMatrix::diagonal(&e.values);
            prop_assert!(av.max_abs_diff(&vd) <= 1e-10 * s.max_abs().max(1e-300));
            let vtv = &e.vectors.transpose() * &e.vectors;
            prop_assert!(vtv.max_abs_diff(&SquareMatrix::identity(n)) <= 1e-12);
            for w in e.values.windows(2) {
                prop_assert!(w[0] > w[1]);
            }
            for c in 0..n {
                prop_assert!(e.vectors[(0, c)] >= 0.0);
            }
        }

        #[test]
        fn parts_recombine(x in arb_sized()) {
            let p = parts(&x);
            let tri = &(&p.lower + &p.diagonal) + &p.upper;
            prop_assert_eq!(&tri, &x);
            // a + b where a = (x - y)/2 and b = (x + y)/2 is not exact in general,
            // so only the triangular split is checked bitwise
            prop_assert!((&p.antisym + &p.sym).max_abs_diff(&x) <= 4.0 * f64::EPSILON);
        }

        #[test]
        fn minors_match_direct_determinant(a in arb_matrix(3)) {
            let mm = leading_minors(&a);
            let d2 = a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)];
            let d3 = a[(0, 0)] * (a[(1, 1)] * a[(2, 2)] - a[(1, 2)] * a[(2, 1)])
                - a[(0, 1)] * (a[(1, 0)] * a[(2, 2)] - a[(1, 2)] * a[(2, 0)])
                + a[(0, 2)] * (a[(1, 0)] * a[(2, 1)] - a[(1, 1)] * a[(2, 0)]);
            prop_assert_eq!(mm[0], a[(0, 0)]);
            prop_assert!((mm[1] - d2).abs() <= 1e-14);
            prop_assert!((mm[2] - d3).abs() <= 1e-14);
        }
    }
}
