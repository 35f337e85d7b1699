//! Sums over subsets of `{0, …, n−1}` grouped by cardinality.
//!
//! Every term is positive. Terms may be accumulated either as plain products
//! or in log space with an online log-sum-exp, which keeps the sums finite
//! when individual terms over- or underflow.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Accumulation {
    Direct,
    LogSpace,
}

/// Per-cardinality results; index `k` runs over `0..=n`.
#[derive(Debug, Clone)]
pub(crate) struct SubsetSums {
    /// `ln Σ_{|I|=k} term(I)`.
    pub log_sums: Vec<f64>,
    /// `Σ weight(I)·term(I) / Σ term(I)`.
    pub weighted_means: Vec<f64>,
}

pub(crate) fn check_dimension(n: usize, max: usize) -> Result<()> {
    if n > max || n > 30 {
        return Err(Error::DimensionTooLarge { n, max });
    }
    Ok(())
}

/// `direct(mask)` returns a term, `log(mask)` its logarithm; only the one
/// matching `mode` is called.
pub(crate) fn subset_sums(
    n: usize,
    mode: Accumulation,
    direct: impl Fn(u32) -> f64,
    log: impl Fn(u32) -> f64,
    weight: impl Fn(u32) -> f64,
) -> SubsetSums {
    let mut log_sums = vec![f64::NEG_INFINITY; n + 1];
    let mut weighted_means = vec![0.0; n + 1];
    log_sums[0] = 0.0;
    match mode {
        Accumulation::Direct => {
            let mut sums = vec![0.0; n + 1];
            let mut wsums = vec![0.0; n + 1];
            for mask in 1u32..(1u32 << n) {
                let k = mask.count_ones() as usize;
                let t = direct(mask);
                sums[k] += t;
                wsums[k] += weight(mask) * t;
            }
            for k in 1..=n {
                log_sums[k] = sums[k].ln();
                weighted_means[k] = wsums[k] / sums[k];
            }
        }
        Accumulation::LogSpace => {
            let mut max = vec![f64::NEG_INFINITY; n + 1];
            let mut sums = vec![0.0; n + 1];
            let mut wsums = vec![0.0; n + 1];
            for mask in 1u32..(1u32 << n) {
                let k = mask.count_ones() as usize;
                let l = log(mask);
                let wgt = weight(mask);
                if l > max[k] {
                    let r = (max[k] - l).exp();
                    sums[k] = sums[k] * r + 1.0;
                    wsums[k] = wsums[k] * r + wgt;
                    max[k] = l;
                } else {
                    let e = (l - max[k]).exp();
                    sums[k] += e;
                    wsums[k] += wgt * e;
                }
            }
            for k in 1..=n {
                log_sums[k] = max[k] + sums[k].ln();
                weighted_means[k] = wsums[k] / sums[k];
            }
        }
    }
    SubsetSums { log_sums, weighted_means }
}

/// `ln|xᵢ − xⱼ|` for `i ≠ j` (diagonal left at zero).
pub(crate) fn log_gaps(x: &[f64]) -> Vec<Vec<f64>> {
    let n = x.len();
    (0..n).map(|i| (0..n).map(|j| if i == j { 0.0 } else { (x[i] - x[j]).abs().ln() }).collect()).collect()
}

pub(crate) fn members(mask: u32, n: usize) -> impl Iterator<Item = usize> {
    (0..n).filter(move |i| mask & (1 << i) != 0)
}

pub(crate) fn exp_checked(log_value: f64, max_exponent: f64) -> Result<f64> {
    if log_value > max_exponent {
        return Err(Error::FeatureOverflow { log_value });
    }
    Ok(log_value.exp())
}
