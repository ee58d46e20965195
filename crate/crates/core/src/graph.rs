//! Simple undirected graphs on vertices `0..n`.

use nalgebra::DMatrix;

use crate::error::{invalid, Result};

/// A simple undirected graph: no self-loops, no parallel edges.
///
/// Neighbor lists are kept sorted, so equality is structural.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledGraph {
    adj: Vec<Vec<usize>>,
    edge_count: usize,
}

impl LabeledGraph {
    /// The edgeless graph on `n` vertices.
    pub fn empty(n: usize) -> Self {
        LabeledGraph {
            adj: vec![Vec::new(); n],
            edge_count: 0,
        }
    }

    pub fn complete(n: usize) -> Self {
        let adj = (0..n)
            .map(|i| (0..n).filter(|&j| j != i).collect())
            .collect();
        LabeledGraph {
            adj,
            edge_count: n * n.saturating_sub(1) / 2,
        }
    }

    /// Builds a graph from an edge iterator. Self-loops, duplicates (in either
    /// orientation) and out-of-range endpoints are rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut adj = vec![Vec::new(); n];
        let mut edge_count = 0;
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(invalid(format!("edge ({u}, {v}) out of range for n = {n}")));
            }
            if u == v {
                return Err(invalid(format!("self-loop at vertex {u}")));
            }
            adj[u].push(v);
            adj[v].push(u);
            edge_count += 1;
        }
        for (u, nbrs) in adj.iter_mut().enumerate() {
            nbrs.sort_unstable();
            if let Some(w) = nbrs.windows(2).find(|w| w[0] == w[1]) {
                return Err(invalid(format!("duplicate edge ({u}, {})", w[0])));
            }
        }
        Ok(LabeledGraph { adj, edge_count })
    }

    /// Builds a graph from a symmetric 0/1 adjacency predicate over `i < j`.
    pub fn from_fn(n: usize, mut has_edge: impl FnMut(usize, usize) -> bool) -> Self {
        let mut adj = vec![Vec::new(); n];
        let mut edge_count = 0;
        for i in 0..n {
            for j in (i + 1)..n {
                if has_edge(i, j) {
                    adj[i].push(j);
                    adj[j].push(i);
                    edge_count += 1;
                }
            }
        }
        // pushes happen in increasing order of the partner, so lists are sorted
        LabeledGraph { adj, edge_count }
    }

    /// The half-graph `H_{2m}`: bipartite between `0..m` and `m..2m` with
    /// edge `{i, m + j}` iff `j <= i`.
    pub fn half_graph(m: usize) -> Self {
        Self::from_fn(2 * m, |a, b| a < m && b >= m && b - m <= a)
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycle needs at least 3 vertices");
        Self::from_fn(n, |i, j| j == i + 1 || (i == 0 && j == n - 1))
    }

    pub fn path(n: usize) -> Self {
        Self::from_fn(n, |i, j| j == i + 1)
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, nbrs)| nbrs.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// Edge density `2|E| / n^2`, the integral of the empirical graphon.
    pub fn edge_density(&self) -> f64 {
        let n = self.n() as f64;
        if self.n() == 0 {
            return 0.0;
        }
        2.0 * self.edge_count as f64 / (n * n)
    }

    pub fn adjacency_matrix(&self) -> DMatrix<f64> {
        let n = self.n();
        let mut a = DMatrix::zeros(n, n);
        for (u, nbrs) in self.adj.iter().enumerate() {
            for &v in nbrs {
                a[(u, v)] = 1.0;
            }
        }
        a
    }

    /// Relabels vertices: vertex `v` of `self` becomes `perm[v]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.n())?;
        Self::from_edges(self.n(), self.edges().map(|(u, v)| (perm[u], perm[v])))
    }

    /// Replaces each vertex by `k` clones; clones of adjacent vertices are
    /// completely joined, clones of one vertex stay independent.
    pub fn blow_up(&self, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(invalid("blow-up factor must be at least 1"));
        }
        let n = self.n();
        let adj = (0..n * k)
            .map(|c| {
                self.adj[c / k]
                    .iter()
                    .flat_map(|&j| (k * j)..(k * j + k))
                    .collect()
            })
            .collect();
        Ok(LabeledGraph {
            adj,
            edge_count: self.edge_count * k * k,
        })
    }

    /// Number of degree-zero vertices.
    pub fn isolated_count(&self) -> usize {
        self.adj.iter().filter(|a| a.is_empty()).count()
    }
}

pub(crate) fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(invalid(format!("permutation has length {}, expected {n}", perm.len())));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(invalid("not a permutation"));
        }
        seen[p] = true;
    }
    Ok(())
}

pub fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// Blow-up factors `(k1, k2)`, the smallest with `k1 * n1 == k2 * n2`.
pub fn blowup_factors(n1: usize, n2: usize) -> (usize, usize) {
    let l = lcm(n1, n2);
    (l / n1, l / n2)
}

/// Blows both graphs up to the common size `lcm(n1, n2)`.
pub fn common_blowup_pair(g1: &LabeledGraph, g2: &LabeledGraph) -> Result<(LabeledGraph, LabeledGraph)> {
    if g1.n() == 0 || g2.n() == 0 {
        return Err(invalid("common blow-up needs nonempty graphs"));
    }
    let (k1, k2) = blowup_factors(g1.n(), g2.n());
    Ok((g1.blow_up(k1)?, g2.blow_up(k2)?))
}
