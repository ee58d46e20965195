//! Completion of sparsely observed networks by expanded neighborhoods.
//!
//! Pipeline: path counts `(M / p)^r` on the observed matrix, sample-split
//! inner-product distances between rows, and averaging of observed values
//! over pairs of distance-quantile neighborhoods.

use nalgebra::DMatrix;
use rand::Rng as _;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::estimation::{mean_std, usvt_partial, DEFAULT_USVT_ETA};
use crate::graph::LabeledGraph;
use crate::graphons::Graphon;
use crate::prob::{mse_vs_truth, ProbMatrix};
use crate::rng::{derive_seed, rng_from_seed};
use crate::samplers::sample_dense;

/// Share of vertex pairs that must overlap for a radius to qualify.
pub const OVERLAP_SHARE: f64 = 0.99;

/// A symmetric network observed on a subset of pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservedNetwork {
    n: usize,
    values: DMatrix<f64>,
    mask: DMatrix<f64>,
    observed: usize,
    bipartite: Option<(usize, usize)>,
}

impl ObservedNetwork {
    /// Builds from `(u, v, value)` triplets. With `bipartite = Some((rows,
    /// cols))`, vertices `0..rows` form one side and every observed pair
    /// must cross sides.
    pub fn new<I>(n: usize, triplets: I, bipartite: Option<(usize, usize)>) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, u8)>,
    {
        if let Some((rows, cols)) = bipartite {
            if rows == 0 || cols == 0 || rows + cols != n {
                return Err(invalid(format!("bipartite split {rows},{cols} does not cover n = {n}")));
            }
        }
        let mut values = DMatrix::zeros(n, n);
        let mut mask = DMatrix::zeros(n, n);
        let mut observed = 0;
        for (u, v, x) in triplets {
            if u >= n || v >= n {
                return Err(invalid(format!("pair ({u}, {v}) out of range for n = {n}")));
            }
            if u == v {
                return Err(invalid(format!("diagonal pair ({u}, {u}) cannot be observed")));
            }
            if x > 1 {
                return Err(invalid(format!("value {x} at ({u}, {v}) is not 0 or 1")));
            }
            if let Some((rows, _)) = bipartite {
                if (u < rows) == (v < rows) {
                    return Err(invalid(format!("pair ({u}, {v}) lies within one side")));
                }
            }
            if mask[(u, v)] != 0.0 {
                return Err(invalid(format!("pair ({u}, {v}) listed twice")));
            }
            mask[(u, v)] = 1.0;
            mask[(v, u)] = 1.0;
            values[(u, v)] = f64::from(x);
            values[(v, u)] = f64::from(x);
            observed += 1;
        }
        Ok(ObservedNetwork {
            n,
            values,
            mask,
            observed,
            bipartite,
        })
    }

    /// Every pair observed, values from the adjacency matrix.
    pub fn fully_observed(g: &LabeledGraph) -> Self {
        let n = g.n();
        let triplets = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j)));
        let obs: Vec<_> = triplets.map(|(i, j)| (i, j, u8::from(g.has_edge(i, j)))).collect();
        Self::new(n, obs, None).expect("valid pairs")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bipartite(&self) -> Option<(usize, usize)> {
        self.bipartite
    }

    pub fn is_observed(&self, u: usize, v: usize) -> bool {
        self.mask[(u, v)] != 0.0
    }

    pub fn value(&self, u: usize, v: usize) -> Option<u8> {
        self.is_observed(u, v).then(|| self.values[(u, v)] as u8)
    }

    /// Observed values with unobserved entries as 0.
    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn observed_pairs(&self) -> usize {
        self.observed
    }

    /// Pairs that could be observed: `C(n, 2)`, or `rows * cols` when bipartite.
    pub fn possible_pairs(&self) -> usize {
        match self.bipartite {
            Some((rows, cols)) => rows * cols,
            None => self.n * self.n.saturating_sub(1) / 2,
        }
    }

    /// Observed share of possible pairs.
    pub fn p_hat(&self) -> f64 {
        self.observed as f64 / self.possible_pairs().max(1) as f64
    }

    /// Observed pairs `(u, v, value)` with `u < v`, in lexicographic order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, u8)> + '_ {
        (0..self.n).flat_map(move |u| {
            ((u + 1)..self.n).filter_map(move |v| self.value(u, v).map(|x| (u, v, x)))
        })
    }

    /// Mean of observed values.
    pub fn observed_mean(&self) -> f64 {
        if self.observed == 0 {
            return 0.0;
        }
        self.values.sum() / (2 * self.observed) as f64
    }

    fn same_side(&self, u: usize, v: usize) -> bool {
        match self.bipartite {
            Some((rows, _)) => (u < rows) == (v < rows),
            None => true,
        }
    }

    fn require_data(&self) -> Result<()> {
        if self.observed == 0 {
            return Err(Error::NoData("no observed pairs".into()));
        }
        Ok(())
    }
}

/// Observes each pair of `P` with probability `p`. Per pair in
/// lexicographic order one uniform decides observation and a second one the
/// Bernoulli value, so for a fixed seed the observed sets are nested in `p`.
pub fn observe(p_true: &ProbMatrix, p: f64, seed: u64) -> Result<ObservedNetwork> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(invalid(format!("observation probability must lie in (0, 1], got {p}")));
    }
    let n = p_true.n();
    let mut rng = rng_from_seed(seed);
    let mut triplets = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let seen = rng.random::<f64>() < p;
            let one = rng.random::<f64>() < p_true.get(i, j);
            if seen {
                triplets.push((i, j, u8::from(one)));
            }
        }
    }
    ObservedNetwork::new(n, triplets, None)
}

/// `(M / p_hat)^r`, with `M` the observed values (unobserved as 0).
pub fn expanded_path_counts(obs: &ObservedNetwork, r: usize) -> Result<DMatrix<f64>> {
    if r == 0 {
        return Err(invalid("radius must be at least 1"));
    }
    obs.require_data()?;
    Ok(scaled_power(&obs.values, obs.p_hat(), r))
}

fn scaled_power(m: &DMatrix<f64>, p: f64, r: usize) -> DMatrix<f64> {
    let base = m / p;
    let mut out = base.clone();
    for _ in 1..r {
        out = &out * &base;
    }
    out
}

/// Largest radius tried by [`select_radius`]: `ceil(log2 n)`, at least 1.
pub fn radius_cap(n: usize) -> usize {
    let mut cap = 0;
    while (1usize << cap) < n {
        cap += 1;
    }
    cap.max(1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RadiusChoice {
    pub r: usize,
    /// No radius up to the cap met the overlap requirement.
    pub warning: bool,
}

/// Smallest radius `r <= radius_cap(n)` at which at least 99% of vertex
/// pairs share `min_overlap` columns in the support of `N_r`. Bipartite
/// networks only try even radii and only count same-side pairs.
pub fn select_radius(obs: &ObservedNetwork, min_overlap: usize) -> Result<RadiusChoice> {
    if min_overlap == 0 {
        return Err(invalid("min_overlap must be at least 1"));
    }
    obs.require_data()?;
    let n = obs.n;
    let cap = radius_cap(n);
    let words = n.div_ceil(64);
    let base: Vec<u64> = {
        let mut bits = vec![0u64; n * words];
        for u in 0..n {
            for v in 0..n {
                if obs.values[(u, v)] != 0.0 {
                    bits[u * words + v / 64] |= 1 << (v % 64);
                }
            }
        }
        bits
    };
    let pairs: usize = (0..n)
        .map(|u| ((u + 1)..n).filter(|&v| obs.same_side(u, v)).count())
        .sum();
    let step = if obs.bipartite.is_some() { 2 } else { 1 };
    // support of M^r is the boolean power since M has no negative entries
    let mut support = base.clone();
    let mut r = 1;
    loop {
        if r % step == 0 && pairs > 0 {
            let good: usize = (0..n)
                .into_par_iter()
                .map(|u| {
                    let a = &support[u * words..(u + 1) * words];
                    ((u + 1)..n)
                        .filter(|&v| obs.same_side(u, v))
                        .filter(|&v| {
                            let b = &support[v * words..(v + 1) * words];
                            let common: u32 = a.iter().zip(b).map(|(x, y)| (x & y).count_ones()).sum();
                            common as usize >= min_overlap
                        })
                        .count()
                })
                .sum();
            if good as f64 >= OVERLAP_SHARE * pairs as f64 {
                return Ok(RadiusChoice { r, warning: false });
            }
        }
        if r >= cap {
            break;
        }
        support = bool_product(&support, &base, n, words);
        r += 1;
    }
    let r = if step == 2 && cap % 2 == 1 { cap + 1 } else { cap };
    Ok(RadiusChoice { r, warning: true })
}

fn bool_product(a: &[u64], b: &[u64], n: usize, words: usize) -> Vec<u64> {
    let mut out = vec![0u64; n * words];
    out.par_chunks_mut(words).enumerate().for_each(|(u, row)| {
        for k in 0..n {
            if a[u * words + k / 64] >> (k % 64) & 1 == 1 {
                for (o, x) in row.iter_mut().zip(&b[k * words..(k + 1) * words]) {
                    *o |= x;
                }
            }
        }
    });
    out
}

/// Assignment of observed pairs to two halves.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleSplit {
    // 1.0 for the first half, symmetric
    first: DMatrix<f64>,
}

impl SampleSplit {
    /// One seeded coin per observed pair in lexicographic order.
    pub fn seeded(obs: &ObservedNetwork, seed: u64) -> Self {
        let mut rng = rng_from_seed(seed);
        Self::from_fn(obs, |_, _| rng.random::<bool>())
    }

    /// `in_first(u, v)` is called once per observed pair with `u < v`, in
    /// lexicographic order.
    pub fn from_fn(obs: &ObservedNetwork, mut in_first: impl FnMut(usize, usize) -> bool) -> Self {
        let n = obs.n;
        let mut first = DMatrix::zeros(n, n);
        for u in 0..n {
            for v in (u + 1)..n {
                if obs.is_observed(u, v) && in_first(u, v) {
                    first[(u, v)] = 1.0;
                    first[(v, u)] = 1.0;
                }
            }
        }
        SampleSplit { first }
    }

    pub fn in_first(&self, u: usize, v: usize) -> bool {
        self.first[(u, v)] != 0.0
    }

    fn halves(&self, obs: &ObservedNetwork) -> (Half, Half) {
        let mask1 = &obs.mask.component_mul(&self.first);
        let mask2 = &obs.mask - mask1;
        let make = |mask: &DMatrix<f64>| {
            let count = mask.sum() / 2.0;
            Half {
                values: obs.values.component_mul(mask),
                p: count / obs.possible_pairs().max(1) as f64,
            }
        };
        (make(mask1), make(&mask2))
    }
}

struct Half {
    values: DMatrix<f64>,
    p: f64,
}

/// Row distances from the sample split.
///
/// With `N = (M1 / p1)^r` from the first half and `R = (M1 / p1)^(r+1) (M2 / p2)`,
/// whose final step uses the second half, `d(u, v)` is the mean over anchor
/// columns `w` of `(N[u][w] - N[v][w]) (R[u][w] - R[v][w])`. A column is an
/// anchor when `w` is neither `u` nor `v` and both factors have data. Pairs
/// without anchors get `+inf`. In a bipartite network cross-side pairs are
/// `+inf`.
pub fn pairwise_distance(obs: &ObservedNetwork, r: usize, split: &SampleSplit) -> Result<DMatrix<f64>> {
    if r == 0 {
        return Err(invalid("radius must be at least 1"));
    }
    obs.require_data()?;
    if split.first.nrows() != obs.n {
        return Err(invalid("split does not match the network size"));
    }
    let n = obs.n;
    let (h1, h2) = split.halves(obs);
    if h1.p == 0.0 || h2.p == 0.0 {
        return Ok(DMatrix::from_fn(n, n, |u, v| if u == v { 0.0 } else { f64::INFINITY }));
    }
    let a1 = &h1.values / h1.p;
    let mut nr = a1.clone();
    for _ in 1..r {
        nr = &nr * &a1;
    }
    let reach = &(&nr * &a1) * &(&h2.values / h2.p);
    // row-major copies so each pair scans contiguous memory
    let rows = |m: &DMatrix<f64>| -> Vec<f64> { m.transpose().as_slice().to_vec() };
    let (nrow, rrow) = (rows(&nr), rows(&reach));
    let mut d = DMatrix::zeros(n, n);
    let upper: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|u| {
            ((u + 1)..n)
                .map(|v| {
                    if !obs.same_side(u, v) {
                        return f64::INFINITY;
                    }
                    let (nu, nv) = (&nrow[u * n..(u + 1) * n], &nrow[v * n..(v + 1) * n]);
                    let (ru, rv) = (&rrow[u * n..(u + 1) * n], &rrow[v * n..(v + 1) * n]);
                    let mut sum = 0.0;
                    let mut anchors = 0usize;
                    for w in 0..n {
                        if w == u || w == v {
                            continue;
                        }
                        if (nu[w] != 0.0 || nv[w] != 0.0) && (ru[w] != 0.0 || rv[w] != 0.0) {
                            sum += (nu[w] - nv[w]) * (ru[w] - rv[w]);
                            anchors += 1;
                        }
                    }
                    if anchors == 0 {
                        f64::INFINITY
                    } else {
                        sum / anchors as f64
                    }
                })
                .collect()
        })
        .collect();
    for (u, row) in upper.into_iter().enumerate() {
        for (off, x) in row.into_iter().enumerate() {
            let v = u + 1 + off;
            d[(u, v)] = x;
            d[(v, u)] = x;
        }
    }
    Ok(d)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Radius {
    Auto,
    Fixed(usize),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CompletionConfig {
    pub radius: Radius,
    /// Distance quantile defining neighborhoods.
    pub q: f64,
    pub min_overlap: usize,
    /// Seed of the sample split.
    pub seed: u64,
}

impl Default for CompletionConfig {
    fn default() -> Self {
        CompletionConfig {
            radius: Radius::Auto,
            q: 0.2,
            min_overlap: 5,
            seed: 0,
        }
    }
}

impl CompletionConfig {
    fn validate(&self) -> Result<()> {
        if !(self.q > 0.0 && self.q < 1.0) {
            return Err(invalid(format!("quantile must lie in (0, 1), got {}", self.q)));
        }
        if self.min_overlap == 0 {
            return Err(invalid("min_overlap must be at least 1"));
        }
        if self.radius == Radius::Fixed(0) {
            return Err(invalid("radius must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct Completion {
    pub p_hat: ProbMatrix,
    pub r: usize,
    pub h: f64,
    pub q: f64,
    /// Unordered pairs that fell back to the global observed mean.
    pub fallback_pairs: usize,
    /// Radius selection hit its cap.
    pub warning: bool,
}

/// Metadata record written next to a completed matrix.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompletionMeta {
    pub r: usize,
    pub h: f64,
    pub q: f64,
    pub fallback_pairs: usize,
    pub warning: bool,
}

impl Completion {
    pub fn meta(&self) -> CompletionMeta {
        CompletionMeta {
            r: self.r,
            h: self.h,
            q: self.q,
            fallback_pairs: self.fallback_pairs,
            warning: self.warning,
        }
    }
}

/// Nearest-rank `q`-quantile of the finite off-diagonal distances, or
/// `None` when there are none.
pub fn distance_quantile(d: &DMatrix<f64>, q: f64) -> Option<f64> {
    let n = d.nrows();
    let mut xs: Vec<f64> = (0..n)
        .flat_map(|u| ((u + 1)..n).map(move |v| d[(u, v)]))
        .filter(|x| x.is_finite())
        .collect();
    if xs.is_empty() {
        return None;
    }
    xs.sort_by(f64::total_cmp);
    let rank = ((q * xs.len() as f64).ceil() as usize).clamp(1, xs.len());
    Some(xs[rank - 1])
}

pub fn complete(obs: &ObservedNetwork, cfg: &CompletionConfig) -> Result<Completion> {
    let split = SampleSplit::seeded(obs, cfg.seed);
    complete_with_split(obs, cfg, &split)
}

/// As [`complete`] with an explicit sample split.
pub fn complete_with_split(obs: &ObservedNetwork, cfg: &CompletionConfig, split: &SampleSplit) -> Result<Completion> {
    cfg.validate()?;
    obs.require_data()?;
    let n = obs.n;
    let (r, warning) = match cfg.radius {
        Radius::Fixed(r) => {
            if obs.bipartite.is_some() && r % 2 == 1 {
                return Err(invalid(format!(
                    "bipartite networks need an even radius, got {r}"
                )));
            }
            (r, false)
        }
        Radius::Auto => {
            let c = select_radius(obs, cfg.min_overlap)?;
            (c.r, c.warning)
        }
    };
    let d = pairwise_distance(obs, r, split)?;
    let h = distance_quantile(&d, cfg.q);

    // K[i][u] = 1 when u is in the neighborhood of i; i always is
    let k = DMatrix::from_fn(n, n, |i, u| {
        let near = i == u || h.is_some_and(|h| d[(i, u)] <= h);
        if near && obs.same_side(i, u) {
            1.0
        } else {
            0.0
        }
    });
    let kt = k.transpose();
    let mut sums = &(&k * &obs.values) * &kt;
    let mut counts = &(&k * &obs.mask) * &kt;
    // drop the target pair itself, in both orientations
    for i in 0..n {
        for j in 0..n {
            if i == j || !obs.is_observed(i, j) {
                continue;
            }
            let (x, m) = (obs.values[(i, j)], 1.0);
            // (u, v) = (i, j) always contributes since i in K_i and j in K_j
            sums[(i, j)] -= x;
            counts[(i, j)] -= m;
            if k[(i, j)] != 0.0 && k[(j, i)] != 0.0 {
                sums[(i, j)] -= x;
                counts[(i, j)] -= m;
            }
        }
    }
    let global = obs.observed_mean();
    let mut fallback_pairs = 0;
    let mut raw = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let c = counts[(i, j)];
            let x = if c > 0.5 {
                sums[(i, j)] / c
            } else {
                fallback_pairs += 1;
                global
            };
            let x = if obs.same_side(i, j) && obs.bipartite.is_some() { 0.0 } else { x };
            raw[(i, j)] = x;
            raw[(j, i)] = x;
        }
    }
    Ok(Completion {
        p_hat: ProbMatrix::from_raw(raw)?,
        r,
        h: h.unwrap_or(f64::INFINITY),
        q: cfg.q,
        fallback_pairs,
        warning,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompletionRow {
    pub p: f64,
    pub mse_complete: f64,
    pub mse_usvt: f64,
}

/// For each seed: latents from `sample_dense(w, n)`, then for each `p` an
/// observation of the realized probabilities (one observation seed per
/// latent seed, so observed sets are nested in `p`), completion, and the
/// USVT baseline on the same observation.
pub fn completion_sweep<W: Graphon + ?Sized>(
    w: &W,
    n: usize,
    p_list: &[f64],
    cfg: &CompletionConfig,
    seeds: usize,
    base_seed: u64,
) -> Result<Vec<CompletionRow>> {
    if p_list.is_empty() || seeds == 0 {
        return Err(invalid("sweep needs at least one p and one seed"));
    }
    if p_list.windows(2).any(|x| x[1] <= x[0]) || p_list.iter().any(|&p| !(p > 0.0 && p <= 1.0)) {
        return Err(invalid("p list must be strictly ascending within (0, 1]"));
    }
    cfg.validate()?;
    let truths: Vec<ProbMatrix> = (0..seeds)
        .into_par_iter()
        .map(|s| {
            let trace = sample_dense(w, n, derive_seed(base_seed, &[s as u64, 0]))?;
            trace.prob_matrix.ok_or_else(|| invalid("n too large to materialize probabilities"))
        })
        .collect::<Result<_>>()?;
    let cells: Vec<(usize, usize)> = (0..p_list.len()).flat_map(|i| (0..seeds).map(move |s| (i, s))).collect();
    let results: Vec<(f64, f64)> = cells
        .par_iter()
        .map(|&(i, s)| {
            let truth = &truths[s];
            let obs = observe(truth, p_list[i], derive_seed(base_seed, &[s as u64, 1]))?;
            let cell_cfg = CompletionConfig {
                seed: derive_seed(base_seed, &[s as u64, 2]),
                ..*cfg
            };
            let done = complete(&obs, &cell_cfg)?;
            let usvt = usvt_partial(obs.values(), obs.p_hat(), DEFAULT_USVT_ETA)?;
            Ok((mse_vs_truth(&done.p_hat, truth)?, mse_vs_truth(&usvt, truth)?))
        })
        .collect::<Result<_>>()?;
    Ok(p_list
        .iter()
        .zip(results.chunks(seeds))
        .map(|(&p, chunk)| {
            let (mse_complete, _) = mean_std(&chunk.iter().map(|c| c.0).collect::<Vec<_>>());
            let (mse_usvt, _) = mean_std(&chunk.iter().map(|c| c.1).collect::<Vec<_>>());
            CompletionRow { p, mse_complete, mse_usvt }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphons::KernelGraphon;
    use crate::samplers::{sample_sbm, BlockModel};

    fn block_p(n: usize, b: [[f64; 2]; 2]) -> ProbMatrix {
        let half = n / 2;
        ProbMatrix::new(DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                0.0
            } else {
                b[usize::from(i >= half)][usize::from(j >= half)]
            }
        }))
        .unwrap()
    }

    #[test]
    fn observe_examples() {
        let g = LabeledGraph::half_graph(10);
        let p = ProbMatrix::new(g.adjacency_matrix()).unwrap();
        let obs = observe(&p, 1.0, 4).unwrap();
        assert_eq!(obs, ObservedNetwork::fully_observed(&g));

        // ones ~ Bin(19900, 1/2): sd 70.5
        let obs = observe(&block_p(200, [[0.5, 0.5], [0.5, 0.5]]), 1.0, 1).unwrap();
        assert_eq!(obs.p_hat(), 1.0);
        let ones = obs.triplets().filter(|t| t.2 == 1).count() as f64;
        assert!((ones - 9950.0).abs() < 3.0 * 70.54, "{ones}");

        // observed ~ Bin(124750, 0.1): sd 105.96
        let obs = observe(&block_p(500, [[0.5, 0.5], [0.5, 0.5]]), 0.1, 2).unwrap();
        assert!((obs.observed_pairs() as f64 - 12475.0).abs() < 4.0 * 105.96);
        assert!(observe(&block_p(4, [[0.5; 2]; 2]), 0.0, 0).is_err());
        assert!(observe(&block_p(4, [[0.5; 2]; 2]), 1.5, 0).is_err());
    }

    #[test]
    fn observation_sets_are_nested() {
        let p = block_p(60, [[0.7, 0.2], [0.2, 0.7]]);
        let small = observe(&p, 0.2, 9).unwrap();
        let big = observe(&p, 0.5, 9).unwrap();
        for (u, v, x) in small.triplets() {
            assert_eq!(big.value(u, v), Some(x));
        }
    }

    #[test]
    fn path_count_examples() {
        let path = ObservedNetwork::fully_observed(&LabeledGraph::path(3));
        let n1 = expanded_path_counts(&path, 1).unwrap();
        assert_eq!(n1, path.values().clone());
        let n2 = expanded_path_counts(&path, 2).unwrap();
        assert_eq!(n2[(0, 2)], 1.0);

        let tri = ObservedNetwork::fully_observed(&LabeledGraph::complete(3));
        let n2 = expanded_path_counts(&tri, 2).unwrap();
        // hand count: closed walks of length 2 and paths through the third vertex
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(n2[(i, j)], if i == j { 2.0 } else { 1.0 });
            }
        }
        assert!(expanded_path_counts(&tri, 0).is_err());
    }

    #[test]
    fn path_counts_rescale_by_observed_share() {
        let p = block_p(30, [[0.6, 0.3], [0.3, 0.6]]);
        let obs = observe(&p, 0.4, 5).unwrap();
        let n1 = expanded_path_counts(&obs, 1).unwrap();
        let back = n1 * obs.p_hat();
        assert!((back - obs.values()).abs().max() < 1e-12);
    }

    /// Pairs whose radius-r reach sets share at least `m` vertices, by BFS.
    fn census(g: &LabeledGraph, r: usize, m: usize) -> usize {
        let n = g.n();
        // walks of length exactly r: iterate neighbor sets r times
        let reach: Vec<Vec<bool>> = (0..n)
            .map(|s| {
                let mut cur = vec![false; n];
                cur[s] = true;
                for _ in 0..r {
                    let mut next = vec![false; n];
                    for u in 0..n {
                        if cur[u] {
                            for &v in g.neighbors(u) {
                                next[v] = true;
                            }
                        }
                    }
                    cur = next;
                }
                cur
            })
            .collect();
        let mut good = 0;
        for u in 0..n {
            for v in (u + 1)..n {
                if (0..n).filter(|&w| reach[u][w] && reach[v][w]).count() >= m {
                    good += 1;
                }
            }
        }
        good
    }

    #[test]
    fn select_radius_examples() {
        let w = KernelGraphon::constant(0.5).unwrap();
        let g = sample_dense(&w, 100, 3).unwrap().graph;
        let obs = ObservedNetwork::fully_observed(&g);
        assert!(census(&g, 1, 5) as f64 >= 0.99 * 4950.0);
        assert_eq!(select_radius(&obs, 5).unwrap(), RadiusChoice { r: 1, warning: false });

        // on C100 only pairs at even distance <= r ever overlap, far below 99%
        let c = LabeledGraph::cycle(100);
        for r in 1..=7 {
            assert!((census(&c, r, 1) as f64) < 0.99 * 4950.0);
        }
        let obs = ObservedNetwork::fully_observed(&c);
        assert_eq!(select_radius(&obs, 1).unwrap(), RadiusChoice { r: 7, warning: true });

        let single = ObservedNetwork::new(10, [(2, 7, 1)], None).unwrap();
        assert_eq!(select_radius(&single, 1).unwrap(), RadiusChoice { r: 4, warning: true });
        let empty = ObservedNetwork::new(10, [], None).unwrap();
        assert!(matches!(select_radius(&empty, 1), Err(Error::NoData(_))));
    }

    #[test]
    fn cycle_overlap_by_distance() {
        // N_2 of C100: distance-2 vertices overlap, adjacent ones do not
        let c = ObservedNetwork::fully_observed(&LabeledGraph::cycle(100));
        let n2 = expanded_path_counts(&c, 2).unwrap();
        let overlap = |u: usize, v: usize| (0..100).filter(|&w| n2[(u, w)] != 0.0 && n2[(v, w)] != 0.0).count();
        assert_eq!(overlap(0, 2), 2);
        assert_eq!(overlap(0, 1), 0);
        let n1 = expanded_path_counts(&c, 1).unwrap();
        assert_eq!((0..100).filter(|&w| n1[(0, w)] != 0.0 && n1[(1, w)] != 0.0).count(), 0);
    }

    #[test]
    fn duplicate_rows_have_zero_distance() {
        // 0 and 1 share every observed neighbor and are not adjacent
        let p = block_p(40, [[0.6, 0.2], [0.2, 0.5]]);
        let obs = observe(&p, 0.6, 3).unwrap();
        let mut trip: Vec<_> = obs.triplets().filter(|t| t.0 != 1 && t.1 != 1 && !(t.0 == 0 && t.1 == 1)).collect();
        let copies: Vec<_> = trip.iter().filter(|t| t.0 == 0).map(|&(_, v, x)| (1, v, x)).collect();
        trip.extend(copies);
        let obs = ObservedNetwork::new(40, trip, None).unwrap();
        for seed in 0..5 {
            let base = SampleSplit::seeded(&obs, seed);
            let split = SampleSplit::from_fn(&obs, |u, v| {
                if u == 1 {
                    base.in_first(0, v)
                } else {
                    base.in_first(u, v)
                }
            });
            let d = pairwise_distance(&obs, 2, &split).unwrap();
            assert_eq!(d[(0, 1)], 0.0);
            for u in 0..40 {
                assert_eq!(d[(u, u)], 0.0);
            }
        }
    }

    #[test]
    fn distances_separate_planted_blocks() {
        let m = BlockModel::balanced(2, &[0.8, 0.1, 0.1, 0.8]).unwrap();
        for seed in 0..10u64 {
            let t = sample_sbm(&m, 400, seed).unwrap();
            let obs = observe(t.probs().unwrap(), 0.5, seed + 100).unwrap();
            let split = SampleSplit::seeded(&obs, seed);
            let d = pairwise_distance(&obs, 1, &split).unwrap();
            let Latents::Species(s) = &t.latents else { panic!() };
            let (mut within, mut cross) = ((0.0, 0), (0.0, 0));
            for u in 0..400 {
                for v in (u + 1)..400 {
                    let acc = if s[u] == s[v] { &mut within } else { &mut cross };
                    acc.0 += d[(u, v)];
                    acc.1 += 1;
                }
            }
            assert!(within.0 / (within.1 as f64) < cross.0 / (cross.1 as f64));
        }
    }

    use crate::samplers::Latents;

    #[test]
    fn exact_blocks_recovered_at_full_observation() {
        let p = block_p(40, [[1.0, 0.0], [0.0, 1.0]]);
        let obs = observe(&p, 1.0, 0).unwrap();
        let cfg = CompletionConfig {
            q: 0.2,
            ..Default::default()
        };
        let done = complete(&obs, &cfg).unwrap();
        assert_eq!(done.p_hat, p);
        assert_eq!(done.fallback_pairs, 0);
    }

    #[test]
    #[ignore = "neighborhoods chosen from the averaged data add a selection bias that outgrows binomial noise"]
    fn constant_matrix_entries_within_binomial_noise() {
        // each entry is a mean of `count` Bernoulli(c) values; the counts
        // are rebuilt here from the neighborhoods
        let (c, n) = (0.3, 120);
        let p = block_p(n, [[c, c], [c, c]]);
        let obs = observe(&p, 1.0, 11).unwrap();
        let cfg = CompletionConfig::default();
        let done = complete(&obs, &cfg).unwrap();
        let d = pairwise_distance(&obs, done.r, &SampleSplit::seeded(&obs, cfg.seed)).unwrap();
        let near = |i: usize| -> Vec<usize> { (0..n).filter(|&u| u == i || d[(i, u)] <= done.h).collect() };
        let hoods: Vec<Vec<usize>> = (0..n).map(near).collect();
        let (mut inside, mut total) = (0, 0);
        let mut weight = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            for j in (i + 1)..n {
                // multiplicity of each unordered pair in K_i x K_j
                weight.fill(0.0);
                for &u in &hoods[i] {
                    for &v in &hoods[j] {
                        if u != v && (u, v) != (i, j) && (u, v) != (j, i) {
                            weight[(u.min(v), u.max(v))] += 1.0;
                        }
                    }
                }
                let m1 = weight.sum();
                let m2 = weight.norm_squared();
                let x = done.p_hat.get(i, j);
                total += 1;
                if m1 == 0.0 {
                    assert_eq!(x, obs.observed_mean());
                    inside += 1;
                } else if (x - c).abs() <= 3.0 * (c * (1.0 - c) * m2).sqrt() / m1 {
                    inside += 1;
                }
            }
        }
        assert!(inside as f64 >= 0.99 * total as f64, "{inside} / {total}");
    }

    #[test]
    fn constant_matrix_is_denoised() {
        let (c, n) = (0.3, 120);
        let p = block_p(n, [[c, c], [c, c]]);
        let obs = observe(&p, 1.0, 11).unwrap();
        let done = complete(&obs, &CompletionConfig::default()).unwrap();
        // the raw observations have mean squared error c (1 - c)
        let mse = mse_vs_truth(&done.p_hat, &p).unwrap();
        assert!(mse < c * (1.0 - c) / 10.0, "{mse}");
        assert!((done.p_hat.off_diagonal_mean() - c).abs() < 0.02);
    }

    #[test]
    fn single_pair_falls_back_to_its_value() {
        let obs = ObservedNetwork::new(6, [(1, 4, 1)], None).unwrap();
        let done = complete(&obs, &CompletionConfig::default()).unwrap();
        assert!(done.warning);
        for i in 0..6 {
            for j in 0..6 {
                assert_eq!(done.p_hat.get(i, j), if i == j { 0.0 } else { 1.0 });
            }
        }
        let empty = ObservedNetwork::new(6, [], None).unwrap();
        assert!(matches!(complete(&empty, &CompletionConfig::default()), Err(Error::NoData(_))));
    }

    #[test]
    fn bipartite_rules() {
        assert!(ObservedNetwork::new(4, [(0, 1, 1)], Some((2, 2))).is_err());
        let obs = ObservedNetwork::new(4, [(0, 2, 1), (1, 3, 0), (0, 3, 1)], Some((2, 2))).unwrap();
        assert_eq!(obs.possible_pairs(), 4);
        assert_eq!(obs.p_hat(), 0.75);
        let cfg = CompletionConfig {
            radius: Radius::Fixed(3),
            ..Default::default()
        };
        assert!(complete(&obs, &cfg).is_err());
        let done = complete(&obs, &CompletionConfig::default()).unwrap();
        assert_eq!(done.r % 2, 0);
        assert_eq!(done.p_hat.get(0, 1), 0.0);
        assert_eq!(done.p_hat.get(2, 3), 0.0);
    }

    #[test]
    fn quantile_is_nearest_rank() {
        let d = DMatrix::from_row_slice(3, 3, &[0.0, 3.0, 1.0, 3.0, 0.0, f64::INFINITY, 1.0, f64::INFINITY, 0.0]);
        assert_eq!(distance_quantile(&d, 0.2), Some(1.0));
        assert_eq!(distance_quantile(&d, 0.6), Some(3.0));
        assert_eq!(radius_cap(10), 4);
        assert_eq!(radius_cap(100), 7);
        assert_eq!(radius_cap(2), 1);
    }
}
