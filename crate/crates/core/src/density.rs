//! Homomorphism densities of small motifs.
//!
//! The primitive is the (non-induced) homomorphism density
//! `t(F, W) = sum over maps phi: V(F) -> [k] of prod_{uv in E(F)} W[phi(u)][phi(v)] / k^|V(F)|`.

use rand::Rng as _;

use crate::error::{invalid, Error, Result};
use crate::graph::LabeledGraph;
use crate::graphons::StepGraphon;
use crate::rng::rng_from_seed;

pub const MAX_MOTIF_VERTICES: usize = 8;

/// Largest number of vertex maps `hom_density` will enumerate.
pub const MAX_HOM_MAPS: f64 = 1e8;

/// A small probe graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Motif {
    graph: LabeledGraph,
}

impl Motif {
    pub fn new(graph: LabeledGraph) -> Result<Self> {
        let n = graph.n();
        if n == 0 || n > MAX_MOTIF_VERTICES {
            return Err(invalid(format!(
                "motif must have 1..={MAX_MOTIF_VERTICES} vertices, got {n}"
            )));
        }
        Ok(Motif { graph })
    }

    pub fn edge() -> Self {
        Motif { graph: LabeledGraph::complete(2) }
    }

    pub fn triangle() -> Self {
        Motif { graph: LabeledGraph::complete(3) }
    }

    pub fn complete(k: usize) -> Result<Self> {
        Self::new(LabeledGraph::complete(k))
    }

    pub fn cycle(k: usize) -> Result<Self> {
        if k < 3 {
            return Err(invalid("cycle motif needs at least 3 vertices"));
        }
        Self::new(LabeledGraph::cycle(k))
    }

    /// Path with `k` vertices.
    pub fn path(k: usize) -> Result<Self> {
        Self::new(LabeledGraph::path(k))
    }

    /// `edge`, `triangle`, `k<m>`, `cycle<m>`/`c<m>`, `path<m>`/`p<m>`.
    pub fn named(name: &str) -> Result<Self> {
        let num = |prefix: &str| name.strip_prefix(prefix).and_then(|s| s.parse::<usize>().ok());
        match name {
            "edge" => Ok(Self::edge()),
            "triangle" => Ok(Self::triangle()),
            _ => {
                if let Some(k) = num("cycle").or_else(|| num("c")) {
                    Self::cycle(k)
                } else if let Some(k) = num("path").or_else(|| num("p")) {
                    Self::path(k)
                } else if let Some(k) = num("k") {
                    Self::complete(k)
                } else {
                    Err(invalid(format!("unknown motif `{name}`")))
                }
            }
        }
    }

    pub fn graph(&self) -> &LabeledGraph {
        &self.graph
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.n()
    }

    fn is_edge(&self) -> bool {
        self.graph.n() == 2 && self.graph.edge_count() == 1
    }

    fn is_triangle(&self) -> bool {
        self.graph.n() == 3 && self.graph.edge_count() == 3
    }
}

/// Exact `t(F, W)` by enumerating all `k^|V(F)|` vertex maps.
pub fn hom_density(f: &Motif, w: &StepGraphon) -> Result<f64> {
    if w.scale() != 1.0 {
        return Err(invalid("homomorphism density expects a graphon on the unit square"));
    }
    let v = f.vertex_count();
    let k = w.k();
    let maps = (k as f64).powi(v as i32);
    if maps > MAX_HOM_MAPS {
        return Err(Error::SizeLimit(format!(
            "{k}^{v} vertex maps exceed the enumeration limit {MAX_HOM_MAPS:e}"
        )));
    }
    // edges to earlier vertices, so each factor is known once its later end is placed
    let back: Vec<Vec<usize>> = (0..v)
        .map(|u| f.graph.neighbors(u).iter().copied().filter(|&p| p < u).collect())
        .collect();
    let mut phi = vec![0usize; v];
    let total = extend(0, 1.0, &back, &mut phi, w);
    Ok(total / maps)
}

fn extend(u: usize, acc: f64, back: &[Vec<usize>], phi: &mut [usize], w: &StepGraphon) -> f64 {
    if u == back.len() {
        return acc;
    }
    let mut sum = 0.0;
    for c in 0..w.k() {
        let factor: f64 = back[u].iter().map(|&p| w.get(phi[p], c)).product();
        if factor != 0.0 {
            phi[u] = c;
            sum += extend(u + 1, acc * factor, back, phi, w);
        }
    }
    sum
}

/// Number of triangles in `g`.
pub fn triangle_count(g: &LabeledGraph) -> u64 {
    let mut count = 0;
    for (u, v) in g.edges() {
        // common neighbors above v, counting each triangle once
        let (a, b) = (g.neighbors(u), g.neighbors(v));
        let (mut i, mut j) = (a.partition_point(|&x| x <= v), b.partition_point(|&x| x <= v));
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    count += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
    }
    count
}

/// `t(F, empirical graphon of G)`. Edges and triangles use exact counts;
/// other motifs are estimated from `samples` uniform vertex maps.
pub fn subgraph_density_empirical(g: &LabeledGraph, f: &Motif, samples: usize, seed: u64) -> Result<f64> {
    let n = g.n();
    if samples == 0 {
        return Err(invalid("samples must be at least 1"));
    }
    if f.vertex_count() > n {
        return Err(invalid("motif has more vertices than the graph"));
    }
    if f.is_edge() {
        return Ok(g.edge_density());
    }
    let nf = n as f64;
    if f.is_triangle() {
        // a map of a triangle into a loopless graph is injective: 6 per triangle
        return Ok(6.0 * triangle_count(g) as f64 / (nf * nf * nf));
    }
    let words = n.div_ceil(64);
    let mut bits = vec![0u64; n * words];
    for (u, v) in g.edges() {
        bits[u * words + v / 64] |= 1 << (v % 64);
        bits[v * words + u / 64] |= 1 << (u % 64);
    }
    let adjacent = |u: usize, v: usize| bits[u * words + v / 64] >> (v % 64) & 1 == 1;
    let edges: Vec<(usize, usize)> = f.graph.edges().collect();
    let mut rng = rng_from_seed(seed);
    let mut phi = vec![0usize; f.vertex_count()];
    let mut hits = 0u64;
    for _ in 0..samples {
        phi.iter_mut().for_each(|p| *p = rng.random_range(0..n));
        if edges.iter().all(|&(a, b)| adjacent(phi[a], phi[b])) {
            hits += 1;
        }
    }
    Ok(hits as f64 / samples as f64)
}
