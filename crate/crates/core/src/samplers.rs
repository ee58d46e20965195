//! Random graph models driven by graphons.
//!
//! All samplers draw latent values first and then one uniform coin per
//! vertex pair in lexicographic order `(0,1), (0,2), ..., (n-2,n-1)`; a pair
//! is an edge when its coin falls below the pair probability. Identical
//! `(inputs, seed)` therefore give identical traces, and models that share
//! a probability function share realizations.

use nalgebra::DMatrix;
use rand::Rng as _;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::graph::LabeledGraph;
use crate::graphons::{Graphon, KernelGraphon, StepGraphon};
use crate::prob::ProbMatrix;
use crate::rng::{rng_from_seed, Rng};

/// Above this many vertices the probability matrix is not materialized.
pub const MAX_MATERIALIZED: usize = 20_000;

/// Species proportions and a symmetric connection-probability matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockModel {
    pi: Vec<f64>,
    #[serde(rename = "B")]
    b: Vec<Vec<f64>>,
}

impl BlockModel {
    pub fn new(pi: Vec<f64>, b: Vec<Vec<f64>>) -> Result<Self> {
        let k = pi.len();
        if k == 0 {
            return Err(invalid("block model needs at least one species"));
        }
        if pi.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(invalid("species proportions must be nonnegative"));
        }
        let total: f64 = pi.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(invalid(format!("species proportions sum to {total}, expected 1")));
        }
        if b.len() != k || b.iter().any(|r| r.len() != k) {
            return Err(invalid(format!("connection matrix must be {k} x {k}")));
        }
        for a in 0..k {
            for c in 0..k {
                if !(0.0..=1.0).contains(&b[a][c]) {
                    return Err(invalid(format!("B[{a}][{c}] = {} outside [0, 1]", b[a][c])));
                }
                if b[a][c] != b[c][a] {
                    return Err(invalid(format!("B is not symmetric at ({a}, {c})")));
                }
            }
        }
        Ok(BlockModel { pi, b })
    }

    /// Balanced model with `B` given row-major.
    pub fn balanced(k: usize, b_flat: &[f64]) -> Result<Self> {
        if b_flat.len() != k * k {
            return Err(invalid(format!("expected {} connection probabilities", k * k)));
        }
        Self::new(vec![1.0 / k as f64; k], b_flat.chunks(k).map(<[f64]>::to_vec).collect())
    }

    pub fn k(&self) -> usize {
        self.pi.len()
    }

    pub fn pi(&self) -> &[f64] {
        &self.pi
    }

    pub fn b(&self, a: usize, c: usize) -> f64 {
        self.b[a][c]
    }

    /// Species owning latent position `x in [0, 1]` under cumulative proportions.
    pub fn species_at(&self, x: f64) -> usize {
        species_at(&self.pi, x)
    }

    /// The step function on `[0, 1]^2` with intervals of widths `pi`.
    pub fn graphon(&self) -> KernelGraphon {
        let model = self.clone();
        KernelGraphon::new("sbm", 1.0, true, move |x, y| {
            model.b[model.species_at(x)][model.species_at(y)]
        })
        .expect("unit extent")
    }

    /// Uniform-grid form, available when all proportions are equal.
    pub fn step_graphon(&self) -> Result<StepGraphon> {
        let k = self.k();
        if self.pi.iter().any(|&p| p != self.pi[0]) {
            return Err(invalid("step grid form needs equal species proportions"));
        }
        StepGraphon::new(k, 1.0, self.b.concat())
    }
}

fn species_at(pi: &[f64], x: f64) -> usize {
    let mut acc = 0.0;
    for (s, p) in pi.iter().enumerate() {
        acc += p;
        if x < acc {
            return s;
        }
    }
    pi.len() - 1
}

/// Per-vertex latent values of a sample.
#[derive(Clone, Debug, PartialEq)]
pub enum Latents {
    Features(Vec<f64>),
    Species(Vec<usize>),
    /// Birth times and features of retained graphex vertices, in birth order.
    Graphex { births: Vec<f64>, features: Vec<f64> },
}

/// A sampled graph with everything needed to reproduce its edge probabilities.
#[derive(Clone, Debug)]
pub struct SampleTrace {
    pub graph: LabeledGraph,
    pub latents: Latents,
    /// `None` when `n` exceeds [`MAX_MATERIALIZED`].
    pub prob_matrix: Option<ProbMatrix>,
}

impl SampleTrace {
    pub fn probs(&self) -> Result<&ProbMatrix> {
        self.prob_matrix
            .as_ref()
            .ok_or_else(|| invalid("probability matrix was not materialized"))
    }
}

/// Flips one coin per pair in lexicographic order.
fn realize(n: usize, rng: &mut Rng, prob: impl Fn(usize, usize) -> f64) -> Result<(LabeledGraph, Option<ProbMatrix>)> {
    let keep = n <= MAX_MATERIALIZED;
    let mut p_mat = if keep { DMatrix::zeros(n, n) } else { DMatrix::zeros(0, 0) };
    let mut bad = None;
    let graph = LabeledGraph::from_fn(n, |i, j| {
        let p = prob(i, j);
        if !(0.0..=1.0).contains(&p) {
            bad.get_or_insert((i, j, p));
        }
        if keep {
            p_mat[(i, j)] = p;
            p_mat[(j, i)] = p;
        }
        rng.random::<f64>() < p
    });
    if let Some((i, j, p)) = bad {
        return Err(invalid(format!("edge probability {p} at ({i}, {j}) outside [0, 1]")));
    }
    let probs = if keep { Some(ProbMatrix::new(p_mat)?) } else { None };
    Ok((graph, probs))
}

fn draw_features(n: usize, extent: f64, rng: &mut Rng) -> Vec<f64> {
    (0..n).map(|_| rng.random::<f64>() * extent).collect()
}

/// Dense W-random graph: i.i.d. uniform features, edge `{i, j}` with
/// probability `W(x_i, x_j)`.
pub fn sample_dense<W: Graphon + ?Sized>(w: &W, n: usize, seed: u64) -> Result<SampleTrace> {
    if !w.is_bounded() {
        return Err(invalid("dense sampling needs a graphon bounded by 1; use sample_sparse"));
    }
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    let mut rng = rng_from_seed(seed);
    let x = draw_features(n, w.extent(), &mut rng);
    let (graph, prob_matrix) = realize(n, &mut rng, |i, j| w.value(x[i], x[j]))?;
    Ok(SampleTrace {
        graph,
        latents: Latents::Features(x),
        prob_matrix,
    })
}

/// Sparse W-random graph with edge probability `min(1, rho W(x_i, x_j))`.
/// Unbounded `W` is allowed.
pub fn sample_sparse<W: Graphon + ?Sized>(w: &W, n: usize, rho: f64, seed: u64) -> Result<SampleTrace> {
    if !(rho.is_finite() && rho > 0.0) {
        return Err(invalid(format!("rho must be positive, got {rho}")));
    }
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    let mut rng = rng_from_seed(seed);
    let x = draw_features(n, w.extent(), &mut rng);
    let (graph, prob_matrix) = realize(n, &mut rng, |i, j| (rho * w.value(x[i], x[j])).min(1.0))?;
    Ok(SampleTrace {
        graph,
        latents: Latents::Features(x),
        prob_matrix,
    })
}

/// Stochastic block model. Species come from one uniform draw per vertex
/// mapped through the cumulative proportions, so this is draw-for-draw the
/// dense sampler on [`BlockModel::graphon`].
pub fn sample_sbm(model: &BlockModel, n: usize, seed: u64) -> Result<SampleTrace> {
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    let mut rng = rng_from_seed(seed);
    let s: Vec<usize> = draw_features(n, 1.0, &mut rng)
        .into_iter()
        .map(|x| model.species_at(x))
        .collect();
    let (graph, prob_matrix) = realize(n, &mut rng, |i, j| model.b[s[i]][s[j]])?;
    Ok(SampleTrace {
        graph,
        latents: Latents::Species(s),
        prob_matrix,
    })
}

/// Poisson-process graphex snapshot at time `t_end` on features
/// `[0, x_max]`. Candidates arrive with intensity `lambda` per unit time and
/// unit feature length; after the pair coins, isolated candidates are
/// dropped and survivors relabeled in birth order.
pub fn sample_graphex<W: Graphon + ?Sized>(
    w: &W,
    lambda: f64,
    t_end: f64,
    x_max: f64,
    seed: u64,
) -> Result<SampleTrace> {
    for (name, v) in [("lambda", lambda), ("T", t_end), ("x_max", x_max)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(invalid(format!("{name} must be positive, got {v}")));
        }
    }
    if !w.is_bounded() {
        return Err(invalid("graphex sampling needs a graphon bounded by 1"));
    }
    if x_max > w.extent() {
        return Err(invalid(format!(
            "x_max = {x_max} exceeds the graphon domain [0, {}]",
            w.extent()
        )));
    }
    let mut rng = rng_from_seed(seed);
    let mean = lambda * t_end * x_max;
    let count = Poisson::new(mean)
        .map_err(|e| invalid(format!("Poisson mean {mean}: {e}")))?
        .sample(&mut rng) as usize;
    let births = draw_features(count, t_end, &mut rng);
    let features = draw_features(count, x_max, &mut rng);
    let mut order: Vec<usize> = (0..count).collect();
    order.sort_by(|&a, &b| births[a].total_cmp(&births[b]).then(a.cmp(&b)));
    let births: Vec<f64> = order.iter().map(|&i| births[i]).collect();
    let features: Vec<f64> = order.iter().map(|&i| features[i]).collect();

    // coins without materializing: candidates can be many more than survivors
    let full = LabeledGraph::from_fn(count, |i, j| rng.random::<f64>() < w.value(features[i], features[j]));
    let keep: Vec<usize> = (0..count).filter(|&v| full.degree(v) > 0).collect();
    let mut new_id = vec![usize::MAX; count];
    for (id, &v) in keep.iter().enumerate() {
        new_id[v] = id;
    }
    let graph = LabeledGraph::from_edges(keep.len(), full.edges().map(|(u, v)| (new_id[u], new_id[v])))?;
    let births: Vec<f64> = keep.iter().map(|&v| births[v]).collect();
    let features: Vec<f64> = keep.iter().map(|&v| features[v]).collect();
    let m = keep.len();
    let prob_matrix = if m <= MAX_MATERIALIZED {
        let p = DMatrix::from_fn(m, m, |i, j| if i == j { 0.0 } else { w.value(features[i], features[j]) });
        Some(ProbMatrix::new(p)?)
    } else {
        None
    };
    Ok(SampleTrace {
        graph,
        latents: Latents::Graphex { births, features },
        prob_matrix,
    })
}

/// Where a model's graphon comes from, as recorded in sample metadata.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphonSource {
    /// A named kernel, see [`KernelGraphon::named`].
    Kernel(String),
    Grid(StepGraphon),
}

impl GraphonSource {
    pub fn build(&self) -> Result<Box<dyn Graphon>> {
        Ok(match self {
            GraphonSource::Kernel(name) => Box::new(KernelGraphon::named(name)?),
            GraphonSource::Grid(g) => Box::new(g.clone()),
        })
    }

    fn build_with_extent(&self, extent: f64) -> Result<Box<dyn Graphon>> {
        Ok(match self {
            GraphonSource::Kernel(name) => Box::new(KernelGraphon::named(name)?.with_extent(extent)?),
            GraphonSource::Grid(g) => {
                if g.scale() != extent {
                    return Err(invalid(format!(
                        "grid scale {} does not match x_max {extent}",
                        g.scale()
                    )));
                }
                Box::new(g.clone())
            }
        })
    }
}

/// Serializable description of a sampling model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ModelSpec {
    Dense {
        graphon: GraphonSource,
        n: usize,
    },
    Sparse {
        graphon: GraphonSource,
        n: usize,
        rho: f64,
    },
    Sbm {
        #[serde(flatten)]
        model: BlockModel,
        n: usize,
    },
    Graphex {
        graphon: GraphonSource,
        lambda: f64,
        #[serde(rename = "T")]
        t_end: f64,
        x_max: f64,
    },
}

impl ModelSpec {
    pub fn sample(&self, seed: u64) -> Result<SampleTrace> {
        match self {
            ModelSpec::Dense { graphon, n } => sample_dense(graphon.build()?.as_ref(), *n, seed),
            ModelSpec::Sparse { graphon, n, rho } => sample_sparse(graphon.build()?.as_ref(), *n, *rho, seed),
            ModelSpec::Sbm { model, n } => sample_sbm(model, *n, seed),
            ModelSpec::Graphex {
                graphon,
                lambda,
                t_end,
                x_max,
            } => sample_graphex(graphon.build_with_extent(*x_max)?.as_ref(), *lambda, *t_end, *x_max, seed),
        }
    }

    /// Rebuilds the realized probability matrix from recorded latents.
    pub fn prob_matrix(&self, latents: &Latents) -> Result<ProbMatrix> {
        let mismatch = || invalid("latents do not match the model type");
        let m = match (self, latents) {
            (ModelSpec::Dense { graphon, .. }, Latents::Features(x)) => {
                let w = graphon.build()?;
                pair_matrix(x.len(), |i, j| w.value(x[i], x[j]))
            }
            (ModelSpec::Sparse { graphon, rho, .. }, Latents::Features(x)) => {
                let w = graphon.build()?;
                pair_matrix(x.len(), |i, j| (rho * w.value(x[i], x[j])).min(1.0))
            }
            (ModelSpec::Sbm { model, .. }, Latents::Species(s)) => {
                if s.iter().any(|&a| a >= model.k()) {
                    return Err(invalid("species label out of range"));
                }
                pair_matrix(s.len(), |i, j| model.b[s[i]][s[j]])
            }
            (ModelSpec::Graphex { graphon, x_max, .. }, Latents::Graphex { features, .. }) => {
                let w = graphon.build_with_extent(*x_max)?;
                pair_matrix(features.len(), |i, j| w.value(features[i], features[j]))
            }
            _ => return Err(mismatch()),
        };
        ProbMatrix::new(m)
    }
}

fn pair_matrix(n: usize, f: impl Fn(usize, usize) -> f64) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            0.0
        } else {
            let (a, b) = if i < j { (i, j) } else { (j, i) };
            f(a, b)
        }
    })
}
