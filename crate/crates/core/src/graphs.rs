//! `d`-regular bipartite (multi)graphs with ordered edge slots, and
//! numerical bounds on the second singular value of their biadjacency.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest `n` accepted by [`sigma2`].
pub const DENSE_CAP: usize = 4096;
/// Up to this `n` the full SVD is used instead of power iteration.
pub const EXACT_SVD_MAX: usize = 512;
pub const POWER_ITERATIONS: usize = 10_000;
pub const DEFAULT_TOLERANCE: f64 = 1e-9;
/// Floating-point slack allowed by [`mixing_check`].
pub const MIXING_SLACK: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("invalid graph: {0}")]
    Invalid(String),
    #[error("n = {n} exceeds the dense cap {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("mixing bound violated: lhs {} > bound {}", .0.lhs, .0.bound)]
    ViolationFound(MixingReport),
}

/// Bipartite graph on `n + n` vertices, every vertex of degree `d`.
///
/// `left_adj[i][l] = (j, l2)` says slot `l` of left vertex `i` is an edge to
/// right vertex `j`, where it occupies `j`'s slot `l2`; `right_adj` mirrors it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteGraph {
    n: usize,
    d: usize,
    left_adj: Vec<Vec<(usize, usize)>>,
    right_adj: Vec<Vec<(usize, usize)>>,
}

impl BipartiteGraph {
    /// Builds the mirror from `left_adj` and checks that the slots pair up.
    pub fn from_left_adj(n: usize, d: usize, left_adj: Vec<Vec<(usize, usize)>>) -> Result<Self, GraphError> {
        if n == 0 || d == 0 {
            return Err(GraphError::Invalid(format!("need n, d >= 1 (got n = {n}, d = {d})")));
        }
        if left_adj.len() != n {
            return Err(GraphError::Invalid(format!("{} left vertices for n = {n}", left_adj.len())));
        }
        let mut right_adj: Vec<Vec<Option<(usize, usize)>>> = vec![vec![None; d]; n];
        for (i, slots) in left_adj.iter().enumerate() {
            if slots.len() != d {
                return Err(GraphError::Invalid(format!("left vertex {i} has {} slots, expected {d}", slots.len())));
            }
            for (l, &(j, l2)) in slots.iter().enumerate() {
                if j >= n || l2 >= d {
                    return Err(GraphError::Invalid(format!(
                        "edge (left {i}, slot {l}) -> (right {j}, slot {l2}) is out of range"
                    )));
                }
                if let Some((i0, l0)) = right_adj[j][l2] {
                    return Err(GraphError::Invalid(format!(
                        "edge (left {i}, slot {l}) -> (right {j}, slot {l2}) collides with (left {i0}, slot {l0})"
                    )));
                }
                right_adj[j][l2] = Some((i, l));
            }
        }
        // n*d edges filled n*d distinct right slots, so every slot is taken
        let right_adj = right_adj
            .into_iter()
            .map(|slots| slots.into_iter().map(|s| s.expect("all right slots filled")).collect())
            .collect();
        Ok(BipartiteGraph {
            n,
            d,
            left_adj,
            right_adj,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn left_adj(&self) -> &[Vec<(usize, usize)>] {
        &self.left_adj
    }

    pub fn right_adj(&self) -> &[Vec<(usize, usize)>] {
        &self.right_adj
    }

    /// Normalized biadjacency: entry `(i, j)` is the edge multiplicity over `d`.
    pub fn normalized_biadjacency(&self) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.n, self.n);
        let w = 1.0 / self.d as f64;
        for (i, slots) in self.left_adj.iter().enumerate() {
            for &(j, _) in slots {
                a[(i, j)] += w;
            }
        }
        a
    }
}

/// `K_{n,n}` with `left_adj[i][l] = (l, i)`.
pub fn complete_bipartite(n: usize) -> BipartiteGraph {
    let left = (0..n).map(|i| (0..n).map(|l| (l, i)).collect()).collect();
    BipartiteGraph::from_left_adj(n, n, left).expect("complete bipartite graph is consistent")
}

/// Union of `d` seeded uniform permutations; slot `l` of left vertex `i`
/// goes to `pi_l(i)` and lands in that vertex's slot `l`.
pub fn random_regular_bipartite(n: usize, d: usize, seed: u64) -> Result<BipartiteGraph, GraphError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let perms: Vec<Vec<usize>> = (0..d)
        .map(|_| {
            let mut p: Vec<usize> = (0..n).collect();
            p.shuffle(&mut rng);
            p
        })
        .collect();
    let left = (0..n).map(|i| (0..d).map(|l| (perms[l][i], l)).collect()).collect();
    BipartiteGraph::from_left_adj(n, d, left)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpectralMethod {
    #[serde(rename = "exact-svd")]
    ExactSvd,
    #[serde(rename = "power-iteration")]
    PowerIteration,
}

/// Claimed upper bound on the second singular value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralCertificate {
    pub lambda_bound: f64,
    pub tolerance: f64,
    pub method: SpectralMethod,
}

/// `sigma_2` of the normalized biadjacency.
///
/// The top singular pair is `(1, all-ones, all-ones)` for every regular
/// graph, so `sigma_2(A)` is the top singular value of `A - J/n`. The
/// bound is the numerical estimate plus `tol`, clamped to 1.
pub fn sigma2(g: &BipartiteGraph, tol: f64) -> Result<SpectralCertificate, GraphError> {
    if g.n > DENSE_CAP {
        return Err(GraphError::CapExceeded { n: g.n, cap: DENSE_CAP });
    }
    let n = g.n;
    let b = g.normalized_biadjacency().add_scalar(-1.0 / n as f64);
    let (estimate, method) = if n <= EXACT_SVD_MAX {
        let sv = b.singular_values();
        (sv.iter().cloned().fold(0.0, f64::max), SpectralMethod::ExactSvd)
    } else {
        (power_top_singular(&b), SpectralMethod::PowerIteration)
    };
    Ok(SpectralCertificate {
        lambda_bound: (estimate.max(0.0) + tol).min(1.0),
        tolerance: tol,
        method,
    })
}

fn power_top_singular(b: &DMatrix<f64>) -> f64 {
    let n = b.nrows();
    let m = b.transpose() * b;
    // deterministic start with no component along the all-ones vector
    let mut v = DVector::from_fn(n, |i, _| ((i * 7919 % 101) as f64) - 50.0 + 0.5 * (i % 3) as f64);
    let mean = v.mean();
    v.add_scalar_mut(-mean);
    let mut norm = v.norm();
    if norm == 0.0 {
        return 0.0;
    }
    v /= norm;
    let mut estimate = 0.0;
    for _ in 0..POWER_ITERATIONS {
        let w = &m * &v;
        norm = w.norm();
        if norm == 0.0 {
            return 0.0;
        }
        let next = norm.sqrt();
        v = w / norm;
        if (next - estimate).abs() <= 1e-13 {
            estimate = next;
            break;
        }
        estimate = next;
    }
    estimate
}

/// One evaluation of the expander mixing inequality.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixingReport {
    /// Mean of `x`.
    pub mu: f64,
    /// `(1/n) sum_j (y_j - mu)^2`.
    pub lhs: f64,
    /// `lambda^2 * max |x_i|^2`.
    pub bound: f64,
}

/// Averages `x` over each right vertex's neighbourhood and checks
/// `(1/n) sum (y_j - mu)^2 <= lambda^2 |x|_inf^2`.
pub fn mixing_check(g: &BipartiteGraph, cert: &SpectralCertificate, x: &[f64]) -> Result<MixingReport, GraphError> {
    if x.len() != g.n {
        return Err(GraphError::Invalid(format!("vector of length {} for n = {}", x.len(), g.n)));
    }
    let n = g.n as f64;
    let mu = x.iter().sum::<f64>() / n;
    let lhs = g
        .right_adj
        .iter()
        .map(|slots| {
            let y = slots.iter().map(|&(i, _)| x[i]).sum::<f64>() / g.d as f64;
            (y - mu) * (y - mu)
        })
        .sum::<f64>()
        / n;
    let sup = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let report = MixingReport {
        mu,
        lhs,
        bound: cert.lambda_bound * cert.lambda_bound * sup * sup,
    };
    if report.lhs > report.bound + MIXING_SLACK {
        return Err(GraphError::ViolationFound(report));
    }
    Ok(report)
}
