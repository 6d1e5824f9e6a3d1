//! k-nearest-neighbour estimator of `D_KL(P ‖ Q)` from samples
//! `x ~ P`, `y ~ Q` (Pérez-Cruz, 2008):
//!
//! `D̂ = (d/n) Σ_i log(ν_k(x_i) / ρ_k(x_i)) + log(m / (n − 1))`
//!
//! where `ρ_k(x_i)` is the distance from `x_i` to its k-th nearest
//! neighbour in `x \ {x_i}` and `ν_k(x_i)` the distance to its k-th nearest
//! neighbour in `y`.

use rayon::prelude::*;

use super::{euclidean, EmpiricalSample};
use crate::error::{Error, Result};

/// Distances below this are clamped before taking logarithms.
pub const MIN_DISTANCE: f64 = 1e-12;

/// Raw estimate; may be negative. See [`super::clamp_kl`].
pub fn knn_kl_estimate(x: &EmpiricalSample, y: &EmpiricalSample, k: usize) -> Result<f64> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch(x.dim(), y.dim()));
    }
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let (n, m) = (x.len(), y.len());
    if n < k + 1 {
        return Err(Error::InsufficientSamples(format!(
            "need at least {} points in x, have {n}",
            k + 1
        )));
    }
    if m < k {
        return Err(Error::InsufficientSamples(format!(
            "need at least {k} points in y, have {m}"
        )));
    }
    let d = x.dim() as f64;
    let terms: Vec<f64> = x
        .rows()
        .par_iter()
        .enumerate()
        .map(|(i, xi)| {
            let within: Vec<f64> = x
                .rows()
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, xj)| euclidean(xi, xj))
                .collect();
            let across: Vec<f64> = y.rows().iter().map(|yj| euclidean(xi, yj)).collect();
            let rho = kth_smallest(within, k).max(MIN_DISTANCE);
            let nu = kth_smallest(across, k).max(MIN_DISTANCE);
            (nu / rho).ln()
        })
        .collect();
    let sum: f64 = terms.iter().sum();
    Ok(d / n as f64 * sum + (m as f64 / (n as f64 - 1.0)).ln())
}

fn kth_smallest(mut v: Vec<f64>, k: usize) -> f64 {
    let (_, kth, _) = v.select_nth_unstable_by(k - 1, f64::total_cmp);
    *kth
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(rows: Vec<Vec<f64>>) -> EmpiricalSample {
        EmpiricalSample::new(rows).unwrap()
    }

    #[test]
    fn preconditions() {
        let x = sample(vec![vec![0.0], vec![1.0]]);
        let y = sample(vec![vec![0.0]]);
        assert!(matches!(
            knn_kl_estimate(&x, &y, 2),
            Err(Error::InsufficientSamples(_))
        ));
        let z = sample(vec![vec![0.0, 1.0]]);
        assert!(matches!(
            knn_kl_estimate(&x, &z, 1),
            Err(Error::DimensionMismatch(1, 2))
        ));
    }

    #[test]
    fn hand_computed_small_case() {
        // x = {0, 1, 3}, y = {2}: rho = (1, 1, 2), nu = (2, 1, 1)
        let x = sample(vec![vec![0.0], vec![1.0], vec![3.0]]);
        let y = sample(vec![vec![2.0]]);
        let expected = (1.0 / 3.0) * ((2.0f64).ln() + 0.0 + (0.5f64).ln()) + (1.0f64 / 2.0).ln();
        assert!((knn_kl_estimate(&x, &y, 1).unwrap() - expected).abs() < 1e-12);
    }
}
