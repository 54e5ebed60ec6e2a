//! Two-way cluster-robust covariance, composed as V_A + V_B − V_{A∩B}.
//!
//! Each term is a cluster sandwich (X'X)⁻¹ (Σ_g s_g s_gᵀ) (X'X)⁻¹ with
//! cluster scores s_g = Σ_{i∈g} x_i e_i and a small-sample scaling of
//! G/(G−1) × (N−1)/(N−K) per dimension. The intersection dimension clusters
//! on (zone, year) pairs.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use super::EconError;

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterConfig {
    /// Apply G/(G−1) × (N−1)/(N−K) per clustering dimension.
    pub small_sample: bool,
}

impl Default for ClusterConfig {
    fn default() -> Self {
        ClusterConfig { small_sample: true }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterCov {
    pub cov: DMatrix<f64>,
    pub clusters_a: usize,
    pub clusters_b: usize,
    pub clusters_ab: usize,
    /// Set when the raw composition had negative eigenvalues and they were
    /// floored at zero.
    pub psd_fixed: bool,
}

impl ClusterCov {
    pub fn std_errors(&self) -> DVector<f64> {
        DVector::from_fn(self.cov.nrows(), |k, _| self.cov[(k, k)].max(0.0).sqrt())
    }
}

fn meat(x: &DMatrix<f64>, e: &DVector<f64>, cluster: &[usize]) -> (DMatrix<f64>, usize) {
    let k = x.ncols();
    let mut scores: BTreeMap<usize, DVector<f64>> = BTreeMap::new();
    for (row, &g) in cluster.iter().enumerate() {
        let s = scores.entry(g).or_insert_with(|| DVector::zeros(k));
        for j in 0..k {
            s[j] += x[(row, j)] * e[row];
        }
    }
    let mut m = DMatrix::zeros(k, k);
    for s in scores.values() {
        m += s * s.transpose();
    }
    (m, scores.len())
}

/// Cameron–Gelbach–Miller two-way clustered covariance of the OLS
/// coefficients.
pub fn twoway_clustered_cov(
    x: &DMatrix<f64>,
    residuals: &DVector<f64>,
    cluster_a: &[usize],
    cluster_b: &[usize],
    cfg: &ClusterConfig,
) -> Result<ClusterCov, EconError> {
    let n = x.nrows();
    let k = x.ncols();
    if residuals.len() != n {
        return Err(EconError::LengthMismatch { got: residuals.len(), expected: n });
    }
    assert_eq!(cluster_a.len(), n, "cluster_a length");
    assert_eq!(cluster_b.len(), n, "cluster_b length");

    // Intersection clusters: distinct (a, b) pairs.
    let mut pair_ids: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let cluster_ab: Vec<usize> = cluster_a
        .iter()
        .zip(cluster_b)
        .map(|(&a, &b)| {
            let next = pair_ids.len();
            *pair_ids.entry((a, b)).or_insert(next)
        })
        .collect();

    let xtx_inv = (x.transpose() * x)
        .try_inverse()
        .ok_or_else(|| EconError::RankDeficient(vec!["X'X singular".to_string()]))?;

    let mut terms = Vec::new();
    let mut counts = [0usize; 3];
    for (slot, (cluster, sign)) in [
        (cluster_a, 1.0),
        (cluster_b, 1.0),
        (cluster_ab.as_slice(), -1.0),
    ]
    .into_iter()
    .enumerate()
    {
        let (m, g) = meat(x, residuals, cluster);
        counts[slot] = g;
        let scale = if cfg.small_sample {
            (g as f64 / (g as f64 - 1.0)) * ((n as f64 - 1.0) / (n as f64 - k as f64))
        } else {
            1.0
        };
        terms.push(sign * scale * (&xtx_inv * m * &xtx_inv));
    }
    if counts[0] < 2 {
        return Err(EconError::SingleCluster("a"));
    }
    if counts[1] < 2 {
        return Err(EconError::SingleCluster("b"));
    }

    let mut cov = &terms[0] + &terms[1] + &terms[2];
    // Symmetrize before the eigenvalue check.
    cov = 0.5 * (&cov + cov.transpose());
    let mut psd_fixed = false;
    let eig = cov.clone().symmetric_eigen();
    if eig.eigenvalues.iter().any(|&l| l < 0.0) {
        psd_fixed = true;
        let floored = DVector::from_fn(k, |i, _| eig.eigenvalues[i].max(0.0));
        cov = &eig.eigenvectors * DMatrix::from_diagonal(&floored) * eig.eigenvectors.transpose();
        cov = 0.5 * (&cov + cov.transpose());
    }
    Ok(ClusterCov {
        cov,
        clusters_a: counts[0],
        clusters_b: counts[1],
        clusters_ab: counts[2],
        psd_fixed,
    })
}
