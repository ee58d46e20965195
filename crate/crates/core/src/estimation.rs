//! Estimating edge probabilities from one observed graph.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::graph::LabeledGraph;
use crate::graphons::{Graphon, StepGraphon};
use crate::prob::{mse_vs_truth, ProbMatrix};
use crate::rng::{derive_seed, rng_from_seed};
use crate::samplers::sample_sparse;

pub const DEFAULT_USVT_ETA: f64 = 0.01;

#[derive(Clone, Debug)]
pub struct EstimationReport {
    pub p_hat: ProbMatrix,
    /// Block values on a uniform grid; absent for spectral estimates.
    pub w_hat: Option<StepGraphon>,
    pub method: &'static str,
    pub mse: Option<f64>,
    /// Group proportions and per-vertex group labels for block estimates.
    pub pi: Option<Vec<f64>>,
    pub labels: Option<Vec<usize>>,
    /// Blockmodel objective after initialization and after each iteration.
    pub objective_trace: Vec<f64>,
}

impl EstimationReport {
    fn spectral(p_hat: ProbMatrix) -> Self {
        EstimationReport {
            p_hat,
            w_hat: None,
            method: "usvt",
            mse: None,
            pi: None,
            labels: None,
            objective_trace: Vec::new(),
        }
    }

    fn blocks(method: &'static str, fit: &BlockFit, n: usize) -> Result<Self> {
        let k = fit.k;
        let mut counts = vec![0usize; k];
        for &s in &fit.labels {
            counts[s] += 1;
        }
        let p = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                0.0
            } else {
                fit.b[fit.labels[i] * k + fit.labels[j]]
            }
        });
        Ok(EstimationReport {
            p_hat: ProbMatrix::new(p)?,
            w_hat: Some(StepGraphon::new(k, 1.0, fit.b.clone())?),
            method,
            mse: None,
            pi: Some(counts.iter().map(|&c| c as f64 / n as f64).collect()),
            labels: Some(fit.labels.clone()),
            objective_trace: Vec::new(),
        })
    }

    /// Attaches the mean squared error against `p_true`.
    pub fn with_truth(mut self, p_true: &ProbMatrix) -> Result<Self> {
        self.mse = Some(mse_vs_truth(&self.p_hat, p_true)?);
        Ok(self)
    }
}

struct BlockFit {
    k: usize,
    labels: Vec<usize>,
    b: Vec<f64>,
}

/// Group means of the adjacency matrix, diagonal excluded. Blocks without
/// any vertex pair get 0.
fn block_means(g: &LabeledGraph, labels: &[usize], k: usize) -> Vec<f64> {
    let mut size = vec![0usize; k];
    for &s in labels {
        size[s] += 1;
    }
    let mut sums = vec![0.0; k * k];
    for (u, v) in g.edges() {
        let (a, c) = (labels[u], labels[v]);
        sums[a * k + c] += 1.0;
        sums[c * k + a] += 1.0;
    }
    for a in 0..k {
        for c in 0..k {
            let pairs = if a == c { size[a] * size[a].saturating_sub(1) } else { size[a] * size[c] };
            sums[a * k + c] = if pairs == 0 { 0.0 } else { sums[a * k + c] / pairs as f64 };
        }
    }
    sums
}

fn objective(g: &LabeledGraph, labels: &[usize], b: &[f64], k: usize) -> f64 {
    let n = g.n();
    let mut size = vec![0usize; k];
    for &s in labels {
        size[s] += 1;
    }
    // every pair contributes B^2; edges swap that for (1 - B)^2
    let mut total = 0.0;
    for a in 0..k {
        for c in a..k {
            let pairs = if a == c {
                size[a] * size[a].saturating_sub(1) / 2
            } else {
                size[a] * size[c]
            };
            total += pairs as f64 * b[a * k + c] * b[a * k + c];
        }
    }
    for (u, v) in g.edges() {
        let x = b[labels[u] * k + labels[v]];
        total += (1.0 - x) * (1.0 - x) - x * x;
    }
    let _ = n;
    total
}

/// Contiguous near-equal groups of the degree order; larger groups first.
fn degree_groups(g: &LabeledGraph, b: usize) -> Vec<usize> {
    let n = g.n();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (g.degree(v), v));
    let (base, extra) = (n / b, n % b);
    let mut labels = vec![0; n];
    let mut pos = 0;
    for grp in 0..b {
        let len = base + usize::from(grp < extra);
        for &v in &order[pos..pos + len] {
            labels[v] = grp;
        }
        pos += len;
    }
    labels
}

/// Degree-sorted network histogram with `b` groups.
pub fn estimate_histogram(g: &LabeledGraph, b: usize) -> Result<EstimationReport> {
    let n = g.n();
    if b == 0 || b > n {
        return Err(invalid(format!("histogram needs 1 <= b <= n = {n}, got {b}")));
    }
    let labels = degree_groups(g, b);
    let fit = BlockFit {
        k: b,
        b: block_means(g, &labels, b),
        labels,
    };
    EstimationReport::blocks("histogram", &fit, n)
}

/// `ceil(n^(1/3))`, the default histogram bandwidth.
pub fn default_bins(n: usize) -> usize {
    let mut b = (n as f64).cbrt().round() as usize;
    while b * b * b < n {
        b += 1;
    }
    while b > 1 && (b - 1) * (b - 1) * (b - 1) >= n {
        b -= 1;
    }
    b.max(1)
}

/// Least-squares `k`-block fit by alternating block means and greedy
/// label moves, starting from the degree histogram. `seed` is unused on
/// this path; see [`estimate_blockmodel_with_restarts`].
pub fn estimate_blockmodel(g: &LabeledGraph, k: usize, iters: usize, seed: u64) -> Result<EstimationReport> {
    estimate_blockmodel_with_restarts(g, k, iters, 0, seed)
}

/// As [`estimate_blockmodel`], plus `restarts` extra fits from seeded
/// random labelings. The fit with the lowest final objective wins; ties go
/// to the earlier fit.
pub fn estimate_blockmodel_with_restarts(
    g: &LabeledGraph,
    k: usize,
    iters: usize,
    restarts: usize,
    seed: u64,
) -> Result<EstimationReport> {
    let n = g.n();
    if k == 0 || k > n {
        return Err(invalid(format!("blockmodel needs 1 <= k <= n = {n}, got {k}")));
    }
    if iters == 0 {
        return Err(invalid("iters must be at least 1"));
    }
    let mut best = fit_blocks(g, k, iters, degree_groups(g, k));
    for r in 0..restarts {
        let mut rng = rng_from_seed(derive_seed(seed, &[r as u64]));
        let labels = (0..n).map(|_| rng.random_range(0..k)).collect();
        let cand = fit_blocks(g, k, iters, labels);
        if cand.1.last() < best.1.last() {
            best = cand;
        }
    }
    let (fit, trace) = best;
    let mut report = EstimationReport::blocks("blockmodel", &fit, n)?;
    report.objective_trace = trace;
    Ok(report)
}

fn means_from_counts(edges: &[f64], size: &[usize], k: usize) -> Vec<f64> {
    let mut b = vec![0.0; k * k];
    for a in 0..k {
        for c in 0..k {
            let pairs = if a == c { size[a] * size[a].saturating_sub(1) } else { size[a] * size[c] };
            if pairs > 0 {
                b[a * k + c] = edges[a * k + c] / pairs as f64;
            }
        }
    }
    b
}

fn fit_blocks(g: &LabeledGraph, k: usize, iters: usize, mut labels: Vec<usize>) -> (BlockFit, Vec<f64>) {
    let n = g.n();
    // nbr[v * k + c]: neighbors of v currently in block c
    let mut nbr = vec![0usize; n * k];
    // edges[a * k + c]: ordered adjacent pairs between blocks a and c
    let mut edges = vec![0.0; k * k];
    for (u, v) in g.edges() {
        nbr[u * k + labels[v]] += 1;
        nbr[v * k + labels[u]] += 1;
        edges[labels[u] * k + labels[v]] += 1.0;
        edges[labels[v] * k + labels[u]] += 1.0;
    }
    let mut size = vec![0usize; k];
    for &s in &labels {
        size[s] += 1;
    }
    let mut b = means_from_counts(&edges, &size, k);
    let mut trace = vec![objective(g, &labels, &b, k)];
    for _ in 0..iters {
        let mut moved = false;
        for v in 0..n {
            let cur = labels[v];
            let row = &nbr[v * k..(v + 1) * k];
            let cost = |a: usize| -> f64 {
                (0..k)
                    .map(|c| {
                        let others = size[c] - usize::from(c == cur);
                        let e = row[c] as f64;
                        let x = b[a * k + c];
                        e * (1.0 - x) * (1.0 - x) + (others as f64 - e) * x * x
                    })
                    .sum()
            };
            let mut best = (cost(cur), cur);
            for a in 0..k {
                if a != cur {
                    let c = cost(a);
                    if c < best.0 {
                        best = (c, a);
                    }
                }
            }
            let to = best.1;
            if to == cur {
                continue;
            }
            for c in 0..k {
                let e = row[c] as f64;
                edges[cur * k + c] -= e;
                edges[c * k + cur] -= e;
                edges[to * k + c] += e;
                edges[c * k + to] += e;
            }
            labels[v] = to;
            size[cur] -= 1;
            size[to] += 1;
            for &u in g.neighbors(v) {
                nbr[u * k + cur] -= 1;
                nbr[u * k + to] += 1;
            }
            // means track every move so later vertices see the new blocks
            b = means_from_counts(&edges, &size, k);
            moved = true;
        }
        if !moved {
            break;
        }
        trace.push(objective(g, &labels, &b, k));
    }
    (BlockFit { k, labels, b }, trace)
}

/// Keeps the spectral components of a symmetric matrix whose singular
/// value exceeds `threshold`.
fn spectral_truncate(m: DMatrix<f64>, threshold: f64) -> DMatrix<f64> {
    let n = m.nrows();
    let eig = SymmetricEigen::new(m);
    let mut out = DMatrix::zeros(n, n);
    for (idx, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda.abs() > threshold {
            let v = eig.eigenvectors.column(idx);
            out += v * v.transpose() * lambda;
        }
    }
    out
}

fn check_eta(eta: f64) -> Result<()> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(invalid(format!("eta must lie in (0, 1), got {eta}")));
    }
    Ok(())
}

/// Universal singular value thresholding of the adjacency matrix at
/// `(2 + eta) sqrt(n max(density, 1/n))`.
pub fn estimate_usvt(g: &LabeledGraph, eta: f64) -> Result<EstimationReport> {
    check_eta(eta)?;
    let n = g.n();
    if n == 0 {
        return Ok(EstimationReport::spectral(ProbMatrix::zeros(0)));
    }
    let p = g.edge_density().max(1.0 / n as f64);
    let threshold = (2.0 + eta) * (n as f64 * p).sqrt();
    let est = spectral_truncate(g.adjacency_matrix(), threshold);
    Ok(EstimationReport::spectral(ProbMatrix::from_raw(est)?))
}

/// USVT on a partially observed matrix: unobserved entries are zero and
/// `observed_fraction` is the share of pairs observed. The matrix is scaled
/// by `1 / observed_fraction` before thresholding and the threshold is
/// scaled to match.
pub fn usvt_partial(values: &DMatrix<f64>, observed_fraction: f64, eta: f64) -> Result<ProbMatrix> {
    check_eta(eta)?;
    if !(observed_fraction > 0.0 && observed_fraction <= 1.0) {
        return Err(invalid(format!("observed fraction must lie in (0, 1], got {observed_fraction}")));
    }
    let n = values.nrows();
    let q = observed_fraction.max(1.0 / n.max(1) as f64);
    let threshold = (2.0 + eta) * (n as f64 * q).sqrt() / observed_fraction;
    ProbMatrix::from_raw(spectral_truncate(values / observed_fraction, threshold))
}

/// Estimator choice for sweeps.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "lowercase")]
pub enum Estimator {
    /// `b = None` uses [`default_bins`].
    Histogram { b: Option<usize> },
    Blockmodel { k: usize, iters: usize },
    Usvt { eta: f64 },
}

impl Estimator {
    /// Parses `histogram`, `blockmodel`, or `usvt` with default settings.
    pub fn from_tag(tag: &str) -> Result<Self> {
        match tag {
            "histogram" => Ok(Estimator::Histogram { b: None }),
            "blockmodel" => Ok(Estimator::Blockmodel { k: 2, iters: 50 }),
            "usvt" => Ok(Estimator::Usvt { eta: DEFAULT_USVT_ETA }),
            _ => Err(invalid(format!("unknown method `{tag}`"))),
        }
    }

    pub fn run(&self, g: &LabeledGraph, seed: u64) -> Result<EstimationReport> {
        match *self {
            Estimator::Histogram { b } => estimate_histogram(g, b.unwrap_or_else(|| default_bins(g.n()))),
            Estimator::Blockmodel { k, iters } => estimate_blockmodel(g, k, iters, seed),
            Estimator::Usvt { eta } => estimate_usvt(g, eta),
        }
    }
}

/// Sparsity schedule `rho(n)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "lowercase")]
pub enum DensityRule {
    Dense,
    Constant { rho: f64 },
    /// `min(1, c ln(n) / n)`.
    LogOverN { c: f64 },
}

impl DensityRule {
    pub fn rho(&self, n: usize) -> f64 {
        match *self {
            DensityRule::Dense => 1.0,
            DensityRule::Constant { rho } => rho,
            DensityRule::LogOverN { c } => (c * (n as f64).ln() / n as f64).min(1.0),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub rho: f64,
    pub seed_count: usize,
    pub mse_mean: f64,
    pub mse_std: f64,
}

/// Mean and sample standard deviation (0 for a single value).
pub(crate) fn mean_std(xs: &[f64]) -> (f64, f64) {
    let m = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / m;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (m - 1.0);
    (mean, var.sqrt())
}

/// Whether each value is strictly below the one before it.
pub fn strictly_decreasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] < w[0])
}

/// For each `n`, samples `seeds` sparse W-random graphs, estimates, and
/// averages the MSE against the realized probability matrices. Cell
/// `(n, s)` uses seed `derive_seed(base_seed, [n, s])`.
pub fn consistency_sweep<W: Graphon + ?Sized>(
    w: &W,
    n_list: &[usize],
    rule: DensityRule,
    method: Estimator,
    seeds: usize,
    base_seed: u64,
) -> Result<Vec<SweepRow>> {
    if n_list.is_empty() || seeds == 0 {
        return Err(invalid("sweep needs at least one n and one seed"));
    }
    if n_list.windows(2).any(|p| p[1] <= p[0]) {
        return Err(invalid("n list must be strictly ascending"));
    }
    let cells: Vec<(usize, usize)> = n_list.iter().flat_map(|&n| (0..seeds).map(move |s| (n, s))).collect();
    let mses: Vec<f64> = cells
        .par_iter()
        .map(|&(n, s)| {
            let seed = derive_seed(base_seed, &[n as u64, s as u64]);
            let trace = sample_sparse(w, n, rule.rho(n), seed)?;
            let report = method.run(&trace.graph, seed)?;
            mse_vs_truth(&report.p_hat, trace.probs()?)
        })
        .collect::<Result<_>>()?;
    Ok(n_list
        .iter()
        .zip(mses.chunks(seeds))
        .map(|(&n, chunk)| {
            let (mse_mean, mse_std) = mean_std(chunk);
            SweepRow {
                n,
                rho: rule.rho(n),
                seed_count: seeds,
                mse_mean,
                mse_std,
            }
        })
        .collect())
}
