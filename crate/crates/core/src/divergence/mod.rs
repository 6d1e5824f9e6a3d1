//! Divergences and distances between empirical feature distributions.

mod assignment;
mod knn;

use std::collections::BTreeMap;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

pub use knn::{knn_kl_estimate, MIN_DISTANCE};

/// Nonempty list of equal-length real vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalSample {
    rows: Vec<Vec<f64>>,
    dim: usize,
}

impl EmpiricalSample {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let dim = rows
            .first()
            .ok_or_else(|| Error::InsufficientSamples("empirical sample must be nonempty".into()))?
            .len();
        if let Some(r) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch(dim, r.len()));
        }
        Ok(EmpiricalSample { rows, dim })
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Probability vector over an indexed support.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteDistribution {
    probs: Vec<f64>,
}

impl DiscreteDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.iter().any(|&p| !(p >= 0.0)) {
            return Err(Error::InvalidArgument(
                "probabilities must be nonnegative".into(),
            ));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(DiscreteDistribution { probs })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// `Σ p_i log(p_i / q_i)`; `+∞` when `p` charges a point `q` does not.
pub fn exact_kl_discrete(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<f64> {
    if p.probs.len() != q.probs.len() {
        return Err(Error::DimensionMismatch(p.probs.len(), q.probs.len()));
    }
    let mut total = 0.0;
    for (&pi, &qi) in p.probs.iter().zip(&q.probs) {
        if pi == 0.0 {
            continue;
        }
        if qi == 0.0 {
            return Ok(f64::INFINITY);
        }
        total += pi * (pi / qi).ln();
    }
    Ok(total)
}

/// `½ Σ |p_i − q_i|`.
pub fn total_variation_discrete(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<f64> {
    if p.probs.len() != q.probs.len() {
        return Err(Error::DimensionMismatch(p.probs.len(), q.probs.len()));
    }
    Ok(0.5
        * p.probs
            .iter()
            .zip(&q.probs)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>())
}

/// KL divergence between the empirical measures of two samples, treating
/// each distinct row as an atom. Exact, possibly `+∞`.
pub fn empirical_kl_exact(x: &EmpiricalSample, y: &EmpiricalSample) -> Result<f64> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch(x.dim(), y.dim()));
    }
    let key = |r: &Vec<f64>| -> Vec<u64> { r.iter().map(|v| (v + 0.0).to_bits()).collect() };
    let mut atoms: BTreeMap<Vec<u64>, (usize, usize)> = BTreeMap::new();
    for r in x.rows() {
        atoms.entry(key(r)).or_default().0 += 1;
    }
    for r in y.rows() {
        atoms.entry(key(r)).or_default().1 += 1;
    }
    let (n, m) = (x.len() as f64, y.len() as f64);
    let mut total = 0.0;
    for &(a, b) in atoms.values() {
        if a == 0 {
            continue;
        }
        if b == 0 {
            return Ok(f64::INFINITY);
        }
        let (p, q) = (a as f64 / n, b as f64 / m);
        total += p * (p / q).ln();
    }
    Ok(total.max(0.0))
}

/// Exact Wasserstein-1 distance between two equal-size empirical measures:
/// minimum-cost perfect matching under Euclidean cost, divided by the size.
pub fn wasserstein1_exact(x: &EmpiricalSample, y: &EmpiricalSample) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::InvalidArgument(format!(
            "exact W1 needs equal sample sizes, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch(x.dim(), y.dim()));
    }
    let costs: Vec<Vec<f64>> = x
        .rows()
        .iter()
        .map(|a| y.rows().iter().map(|b| euclidean(a, b)).collect())
        .collect();
    let assignment = assignment::solve(&costs);
    let total: f64 = assignment
        .iter()
        .enumerate()
        .map(|(i, &j)| costs[i][j])
        .sum();
    Ok(total / x.len() as f64)
}

/// Largest pairwise Euclidean distance; 0 for a single point.
pub fn diameter(x: &EmpiricalSample) -> f64 {
    let rows = x.rows();
    let mut best = 0.0f64;
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            best = best.max(euclidean(&rows[i], &rows[j]));
        }
    }
    best
}

/// `Ω(v) = √min(v/2, 1 − e^{−v})`, the combined Pinsker / Bretagnolle–Huber
/// envelope on total variation. `Ω(+∞) = 1`.
pub fn omega(v: f64) -> f64 {
    debug_assert!(v >= 0.0, "omega expects a nonnegative divergence");
    if v == f64::INFINITY {
        return 1.0;
    }
    (0.5 * v).min(-(-v).exp_m1()).sqrt()
}

/// Negative estimates are mapped to 0.
pub fn clamp_kl(v: f64) -> f64 {
    if v.is_nan() || v < 0.0 {
        0.0
    } else {
        v
    }
}

/// How `D_KL` between two empirical samples is obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum KlEstimator {
    /// k-nearest-neighbour estimator, clamped at 0.
    Knn { k: usize },
    /// Exact KL between the empirical measures (rows as atoms).
    ExactDiscrete,
}

impl KlEstimator {
    pub fn estimate(&self, x: &EmpiricalSample, y: &EmpiricalSample) -> Result<f64> {
        match *self {
            KlEstimator::Knn { k } => knn_kl_estimate(x, y, k).map(clamp_kl),
            KlEstimator::ExactDiscrete => empirical_kl_exact(x, y),
        }
    }

    /// Smallest sample size for which [`Self::estimate`] is defined.
    pub fn min_sample(&self) -> usize {
        match *self {
            KlEstimator::Knn { k } => k + 1,
            KlEstimator::ExactDiscrete => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum KVarianceMode {
    /// Average exact W1 over the pairs.
    ExactW1,
    /// Average `beta · Ω(KL)` over the pairs.
    KlChain { beta: f64, estimator: KlEstimator },
}

/// Wasserstein-1 k-variance estimate from sample pairs, or its KL-chain
/// surrogate used inside the bounds.
pub fn k_variance_estimate(
    pairs: &[(EmpiricalSample, EmpiricalSample)],
    mode: KVarianceMode,
) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::InsufficientSamples(
            "k-variance needs at least one pair".into(),
        ));
    }
    let mut total = 0.0;
    for (a, b) in pairs {
        if a.len() != b.len() {
            return Err(Error::InvalidArgument(
                "paired samples must have equal size".into(),
            ));
        }
        total += match mode {
            KVarianceMode::ExactW1 => wasserstein1_exact(a, b)?,
            KVarianceMode::KlChain { beta, estimator } => beta * omega(estimator.estimate(a, b)?),
        };
    }
    Ok(total / pairs.len() as f64)
}

/// Shearer coefficient of a connected pattern relative to the single edge:
/// `|E| / δ_min`, so that `H(X_{F→S}) ≤ c · H(X_{P2→S})`.
pub fn shearer_coefficient(f: &Graph) -> Result<Ratio<u64>> {
    if f.edge_count() == 0 {
        return Err(Error::InvalidArgument(
            "Shearer coefficient needs at least one edge".into(),
        ));
    }
    if !f.is_connected() {
        return Err(Error::InvalidArgument(
            "Shearer coefficient needs a connected pattern".into(),
        ));
    }
    Ok(Ratio::new(f.edge_count() as u64, f.min_degree() as u64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{clique, cycle, path, paw};

    fn dist(p: &[f64]) -> DiscreteDistribution {
        DiscreteDistribution::new(p.to_vec()).unwrap()
    }

    fn sample(rows: &[&[f64]]) -> EmpiricalSample {
        EmpiricalSample::new(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn kl_examples() {
        assert_eq!(
            exact_kl_discrete(&dist(&[0.3, 0.7]), &dist(&[0.3, 0.7])).unwrap(),
            0.0
        );
        let v = exact_kl_discrete(&dist(&[1.0, 0.0]), &dist(&[0.5, 0.5])).unwrap();
        assert!((v - 2f64.ln()).abs() < 1e-15);
        let v = exact_kl_discrete(&dist(&[0.5, 0.5]), &dist(&[0.9, 0.1])).unwrap();
        assert!((v - 0.510_825_623_765_990_7).abs() < 1e-12);
        assert_eq!(
            exact_kl_discrete(&dist(&[0.5, 0.5]), &dist(&[1.0, 0.0])).unwrap(),
            f64::INFINITY
        );
        assert!(DiscreteDistribution::new(vec![0.5, 0.4]).is_err());
    }

    #[test]
    fn tv_and_w1_examples() {
        let p = dist(&[0.2, 0.8]);
        assert_eq!(total_variation_discrete(&p, &p).unwrap(), 0.0);
        assert_eq!(
            total_variation_discrete(&dist(&[1.0, 0.0]), &dist(&[0.0, 1.0])).unwrap(),
            1.0
        );
        let x = sample(&[&[0.0], &[0.0]]);
        assert_eq!(wasserstein1_exact(&x, &x).unwrap(), 0.0);
        assert_eq!(
            wasserstein1_exact(&x, &sample(&[&[1.0], &[3.0]])).unwrap(),
            2.0
        );
        assert!(wasserstein1_exact(&x, &sample(&[&[1.0]])).is_err());
    }

    #[test]
    fn diameter_examples() {
        assert_eq!(diameter(&sample(&[&[1.0, 2.0]])), 0.0);
        assert_eq!(diameter(&sample(&[&[0.0, 0.0], &[3.0, 4.0]])), 5.0);
    }

    #[test]
    fn omega_examples() {
        assert_eq!(omega(0.0), 0.0);
        assert!((omega(2.0) - (1.0 - (-2.0f64).exp()).sqrt()).abs() < 1e-15);
        assert!((omega(2.0) - 0.9298).abs() < 1e-4);
        assert_eq!(omega(f64::INFINITY), 1.0);
        assert!(omega(1e6) < 1.0 + 1e-15);
        assert_eq!(omega(0.5), 0.5);
    }

    #[test]
    fn k_variance_examples() {
        let a = sample(&[&[0.0], &[1.0]]);
        assert_eq!(
            k_variance_estimate(&[(a.clone(), a.clone())], KVarianceMode::ExactW1).unwrap(),
            0.0
        );
        let pair = (sample(&[&[0.0]]), sample(&[&[1.0]]));
        assert_eq!(
            k_variance_estimate(std::slice::from_ref(&pair), KVarianceMode::ExactW1).unwrap(),
            1.0
        );
        let chain = KVarianceMode::KlChain {
            beta: 1.0,
            estimator: KlEstimator::ExactDiscrete,
        };
        // disjoint atoms: KL = ∞, Ω = 1
        assert_eq!(k_variance_estimate(&[pair], chain).unwrap(), 1.0);
        assert!(k_variance_estimate(&[], KVarianceMode::ExactW1).is_err());
    }

    #[test]
    fn shearer_examples() {
        assert_eq!(shearer_coefficient(&clique(3)).unwrap(), Ratio::new(3, 2));
        assert_eq!(
            shearer_coefficient(&cycle(4)).unwrap(),
            Ratio::from_integer(2)
        );
        assert_eq!(
            shearer_coefficient(&path(2)).unwrap(),
            Ratio::from_integer(1)
        );
        assert_eq!(shearer_coefficient(&paw()).unwrap(), Ratio::from_integer(4));
        assert_eq!(shearer_coefficient(&clique(3)).unwrap().to_string(), "3/2");
        assert!(shearer_coefficient(&Graph::empty(2)).is_err());
        for n in 3..9 {
            assert_eq!(
                shearer_coefficient(&cycle(n)).unwrap(),
                Ratio::new(n as u64, 2)
            );
            assert_eq!(
                shearer_coefficient(&clique(n)).unwrap(),
                Ratio::new(n as u64, 2)
            );
        }
    }

    #[test]
    fn empirical_exact_kl() {
        let x = sample(&[&[0.0], &[0.0], &[1.0], &[1.0]]);
        let y = sample(&[&[0.0], &[1.0], &[1.0], &[1.0]]);
        let expected = 0.5 * (0.5f64 / 0.25).ln() + 0.5 * (0.5f64 / 0.75).ln();
        assert!((empirical_kl_exact(&x, &y).unwrap() - expected).abs() < 1e-15);
        assert_eq!(
            empirical_kl_exact(&x, &sample(&[&[1.0]])).unwrap(),
            f64::INFINITY
        );
        assert_eq!(empirical_kl_exact(&x, &x).unwrap(), 0.0);
    }
}
