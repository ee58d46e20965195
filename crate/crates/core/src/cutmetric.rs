//! Cut norm and cut distance.
//!
//! The cut norm of an `n x n` matrix `A` is
//! `max_{S,T} |sum_{i in S, j in T} A_ij| / n^2`. For fixed `S` the best `T`
//! is the set of columns whose partial sums over `S` are positive (or the set
//! with negative sums, whichever total is larger in absolute value), so exact
//! evaluation only enumerates `S`. The heuristic alternates that closed form
//! between the two sides from random starts and is always a lower bound.
//!
//! The cut distance of two graphs blows both up to a common vertex count and
//! minimizes the cut norm of the adjacency difference over relabelings.

use nalgebra::DMatrix;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::{common_blowup_pair, LabeledGraph};
use crate::graphons::StepGraphon;
use crate::rng::{derive_seed, rng_from_seed};

/// Largest matrix side accepted by [`cut_norm_exact`].
pub const EXACT_CUT_LIMIT: usize = 22;

/// Largest common blow-up size for exact relabeling search (`N!` orders).
pub const EXACT_RELABEL_LIMIT: usize = 8;

/// Resync partial sums from scratch this often during Gray-code enumeration.
const RESYNC_EVERY: u64 = 1 << 10;

/// Half-step cap for one alternating-maximization run.
const MAX_ALTERNATIONS: usize = 200;

/// A cut norm value together with the sets achieving it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutResult {
    /// `|sum_{S x T} A| / n^2`.
    pub value: f64,
    pub witness_s: Vec<usize>,
    pub witness_t: Vec<usize>,
    /// `true` only for full enumeration.
    pub exact: bool,
}

/// Rows of `a` as contiguous vectors.
fn rows_of(a: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..a.nrows())
        .map(|i| a.row(i).iter().copied().collect())
        .collect()
}

fn check_square(a: &DMatrix<f64>) -> Result<usize> {
    if a.nrows() != a.ncols() {
        return Err(invalid(format!("matrix is {} x {}, expected square", a.nrows(), a.ncols())));
    }
    Ok(a.nrows())
}

/// `sum_{i in s, j in t} a_ij`.
pub fn bilinear_sum(a: &DMatrix<f64>, s: &[usize], t: &[usize]) -> f64 {
    s.iter()
        .map(|&i| t.iter().map(|&j| a[(i, j)]).sum::<f64>())
        .sum()
}

/// For fixed partial sums `c`, returns the best index set and its absolute total.
fn best_side(c: &[f64]) -> (Vec<usize>, f64) {
    let pos: f64 = c.iter().filter(|&&v| v > 0.0).sum();
    let neg: f64 = -c.iter().filter(|&&v| v < 0.0).sum::<f64>();
    if pos >= neg {
        ((0..c.len()).filter(|&j| c[j] > 0.0).collect(), pos)
    } else {
        ((0..c.len()).filter(|&j| c[j] < 0.0).collect(), neg)
    }
}

fn finish(a: &DMatrix<f64>, s: Vec<usize>, exact: bool) -> CutResult {
    let n = a.nrows();
    let col: Vec<f64> = (0..n).map(|j| s.iter().map(|&i| a[(i, j)]).sum()).collect();
    let (t, _) = best_side(&col);
    let value = bilinear_sum(a, &s, &t).abs() / (n * n) as f64;
    CutResult {
        value,
        witness_s: s,
        witness_t: t,
        exact,
    }
}

/// Exact cut norm by enumerating every row subset in Gray-code order.
pub fn cut_norm_exact(a: &DMatrix<f64>) -> Result<CutResult> {
    let n = check_square(a)?;
    if n > EXACT_CUT_LIMIT {
        return Err(Error::SizeLimit(format!(
            "exact cut norm enumerates 2^n subsets; n = {n} exceeds {EXACT_CUT_LIMIT}, use the heuristic"
        )));
    }
    if n == 0 {
        return Ok(CutResult {
            value: 0.0,
            witness_s: vec![],
            witness_t: vec![],
            exact: true,
        });
    }
    let rows = rows_of(a);
    let mut col = vec![0.0; n];
    let mut best = 0.0;
    let mut best_mask = 0u64;
    for step in 1u64..(1u64 << n) {
        let gray = step ^ (step >> 1);
        if step % RESYNC_EVERY == 0 {
            col.iter_mut().for_each(|c| *c = 0.0);
            for (i, row) in rows.iter().enumerate() {
                if gray >> i & 1 == 1 {
                    col.iter_mut().zip(row).for_each(|(c, v)| *c += v);
                }
            }
        } else {
            let i = step.trailing_zeros() as usize;
            if gray >> i & 1 == 1 {
                col.iter_mut().zip(&rows[i]).for_each(|(c, v)| *c += v);
            } else {
                col.iter_mut().zip(&rows[i]).for_each(|(c, v)| *c -= v);
            }
        }
        let mut pos = 0.0;
        let mut neg = 0.0;
        for &c in &col {
            if c > 0.0 {
                pos += c;
            } else {
                neg -= c;
            }
        }
        let v = pos.max(neg);
        if v > best {
            best = v;
            best_mask = gray;
        }
    }
    let s = (0..n).filter(|&i| best_mask >> i & 1 == 1).collect();
    Ok(finish(a, s, true))
}

/// Alternating maximization from `restarts` starting sets. Restart 0 starts
/// from the full row set; the rest start from seeded random subsets. The
/// best run wins, ties going to the lowest restart index.
pub fn cut_norm_heuristic(a: &DMatrix<f64>, restarts: usize, seed: u64) -> Result<CutResult> {
    let n = check_square(a)?;
    if n == 0 {
        return Err(invalid("cut norm heuristic needs n >= 1"));
    }
    if restarts == 0 {
        return Err(invalid("restarts must be at least 1"));
    }
    let rows = rows_of(a);
    let mut best: Option<CutResult> = None;
    for r in 0..restarts {
        let mut in_s = if r == 0 {
            vec![true; n]
        } else {
            let mut rng = rng_from_seed(derive_seed(seed, &[r as u64]));
            (0..n).map(|_| rng.random::<bool>()).collect::<Vec<_>>()
        };
        let s = alternate(&rows, &mut in_s);
        let run = finish(a, s, false);
        if best.as_ref().is_none_or(|b| run.value > b.value) {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one restart"))
}

/// Runs the alternation to a fixed point and returns the final row set.
fn alternate(rows: &[Vec<f64>], in_s: &mut [bool]) -> Vec<usize> {
    let n = rows.len();
    let mut current = f64::NEG_INFINITY;
    for _ in 0..MAX_ALTERNATIONS {
        // best T for the current S
        let mut col = vec![0.0; n];
        for (i, row) in rows.iter().enumerate() {
            if in_s[i] {
                col.iter_mut().zip(row).for_each(|(c, v)| *c += v);
            }
        }
        let (t, _) = best_side(&col);
        // best S for that T
        let rsum: Vec<f64> = rows.iter().map(|row| t.iter().map(|&j| row[j]).sum()).collect();
        let (s, v) = best_side(&rsum);
        if v <= current {
            break;
        }
        current = v;
        in_s.iter_mut().for_each(|b| *b = false);
        for &i in &s {
            in_s[i] = true;
        }
    }
    (0..n).filter(|&i| in_s[i]).collect()
}

/// Tuning for heuristic cut-norm evaluations.
#[derive(Clone, Copy, Debug)]
pub struct CutOptions {
    pub restarts: usize,
    pub seed: u64,
}

impl Default for CutOptions {
    fn default() -> Self {
        CutOptions {
            restarts: 20,
            seed: 0,
        }
    }
}

/// Exact below [`EXACT_CUT_LIMIT`], heuristic above.
pub fn cut_norm_auto(a: &DMatrix<f64>, opts: CutOptions) -> Result<CutResult> {
    if a.nrows() <= EXACT_CUT_LIMIT {
        cut_norm_exact(a)
    } else {
        cut_norm_heuristic(a, opts.restarts, opts.seed)
    }
}

/// Cut norm of `w1 - w2` after refining both to a common grid.
pub fn cut_distance_labeled_with(
    w1: &StepGraphon,
    w2: &StepGraphon,
    opts: CutOptions,
) -> Result<CutResult> {
    if w1.scale() != w2.scale() {
        return Err(invalid(format!(
            "labeled cut distance needs equal domains, got scales {} and {}",
            w1.scale(),
            w2.scale()
        )));
    }
    let mut res = match merged_cut_norm(w1, w2)? {
        Some(res) => res,
        None => {
            let (a, b) = w1.common_refinement(w2)?;
            cut_norm_auto(&(a.to_matrix() - b.to_matrix()), opts)?
        }
    };
    res.value *= w1.scale() * w1.scale();
    Ok(res)
}

/// Exact cut norm of `w1 - w2` over the intervals between the merged grid
/// breakpoints, each cell weighted by its area. A step function attains its
/// cut norm on unions of its cells, so this equals the norm on the common
/// refinement. Witnesses are reported as refinement cells. `None` when there
/// are more than [`EXACT_CUT_LIMIT`] intervals.
fn merged_cut_norm(w1: &StepGraphon, w2: &StepGraphon) -> Result<Option<CutResult>> {
    let (k1, k2) = (w1.k(), w2.k());
    let l = crate::graph::lcm(k1, k2);
    let (f1, f2) = (l / k1, l / k2);
    let mut cuts: Vec<usize> = (0..k1).map(|a| a * f1).chain((0..k2).map(|b| b * f2)).collect();
    cuts.sort_unstable();
    cuts.dedup();
    let m = cuts.len();
    if m > EXACT_CUT_LIMIT {
        return Ok(None);
    }
    cuts.push(l);
    let width = |t: usize| (cuts[t + 1] - cuts[t]) as f64 / l as f64;
    let c = DMatrix::from_fn(m, m, |t, u| {
        let d = w1.get(cuts[t] / f1, cuts[u] / f1) - w2.get(cuts[t] / f2, cuts[u] / f2);
        d * width(t) * width(u)
    });
    let res = cut_norm_exact(&c)?;
    let cells = |set: &[usize]| -> Vec<usize> { set.iter().flat_map(|&t| cuts[t]..cuts[t + 1]).collect() };
    Ok(Some(CutResult {
        value: res.value * (m * m) as f64,
        witness_s: cells(&res.witness_s),
        witness_t: cells(&res.witness_t),
        exact: true,
    }))
}

pub fn cut_distance_labeled(w1: &StepGraphon, w2: &StepGraphon) -> Result<f64> {
    Ok(cut_distance_labeled_with(w1, w2, CutOptions::default())?.value)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistanceMode {
    Exact,
    Heuristic,
}

/// Tuning for the heuristic relabeling search.
#[derive(Clone, Copy, Debug)]
pub struct RelabelOptions {
    /// Local-search runs; run 0 starts from the canonical alignment.
    pub restarts: usize,
    /// Restarts used for each cut-norm evaluation inside the search.
    pub cut_restarts: usize,
    pub max_sweeps: usize,
}

impl Default for RelabelOptions {
    fn default() -> Self {
        RelabelOptions {
            restarts: 2,
            cut_restarts: 8,
            max_sweeps: 10,
        }
    }
}

/// Result of a cut-distance computation.
#[derive(Clone, Debug, Serialize)]
pub struct CutDistance {
    pub value: f64,
    pub mode: DistanceMode,
    /// Common blown-up vertex count.
    pub size: usize,
    /// Vertex `v` of the second blown-up graph is placed at `alignment[v]`.
    pub alignment: Vec<usize>,
    pub cut: CutResult,
}

/// Cut metric between two graphs of possibly different sizes.
pub fn cut_distance(g1: &LabeledGraph, g2: &LabeledGraph, mode: DistanceMode, seed: u64) -> Result<CutDistance> {
    cut_distance_with(g1, g2, mode, seed, RelabelOptions::default())
}

pub fn cut_distance_with(
    g1: &LabeledGraph,
    g2: &LabeledGraph,
    mode: DistanceMode,
    seed: u64,
    opts: RelabelOptions,
) -> Result<CutDistance> {
    if g1.n() == 0 || g2.n() == 0 {
        return Err(invalid("cut distance needs nonempty graphs"));
    }
    let size = crate::graph::lcm(g1.n(), g2.n());
    if mode == DistanceMode::Exact && size > EXACT_RELABEL_LIMIT {
        return Err(Error::SizeLimit(format!(
            "exact cut distance enumerates N! relabelings; N = {size} exceeds {EXACT_RELABEL_LIMIT}, use heuristic mode"
        )));
    }
    let (b1, b2) = common_blowup_pair(g1, g2)?;
    let a1 = b1.adjacency_matrix();
    let a2 = b2.adjacency_matrix();
    match mode {
        DistanceMode::Exact => exact_relabel(&a1, &a2),
        DistanceMode::Heuristic => heuristic_relabel(&b1, &b2, &a1, &a2, seed, opts),
    }
}

/// `a1 - pi(a2)` where `pi` sends vertex `v` of graph 2 to `pi[v]`.
fn aligned_difference(a1: &DMatrix<f64>, a2: &DMatrix<f64>, pi: &[usize]) -> DMatrix<f64> {
    let n = a1.nrows();
    let mut d = a1.clone();
    for u in 0..n {
        for v in 0..n {
            d[(pi[u], pi[v])] -= a2[(u, v)];
        }
    }
    d
}

fn exact_relabel(a1: &DMatrix<f64>, a2: &DMatrix<f64>) -> Result<CutDistance> {
    let n = a1.nrows();
    let mut pi: Vec<usize> = (0..n).collect();
    let mut best = (cut_norm_exact(&aligned_difference(a1, a2, &pi))?, pi.clone());
    // Heap's algorithm, iterative form
    let mut c = vec![0usize; n];
    let mut i = 1;
    while i < n && best.0.value > 0.0 {
        if c[i] < i {
            if i % 2 == 0 {
                pi.swap(0, i);
            } else {
                pi.swap(c[i], i);
            }
            let r = cut_norm_exact(&aligned_difference(a1, a2, &pi))?;
            if r.value < best.0.value {
                best = (r, pi.clone());
            }
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    let (cut, alignment) = best;
    Ok(CutDistance {
        value: cut.value,
        mode: DistanceMode::Exact,
        size: n,
        alignment,
        cut,
    })
}

/// Color refinement run on the disjoint union of both graphs so that color
/// ids are comparable. The initial color is the degree, so sorting by final
/// color is a degree sort with label-invariant tie-breaking.
fn refined_colors(g1: &LabeledGraph, g2: &LabeledGraph) -> (Vec<usize>, Vec<usize>) {
    let n1 = g1.n();
    let nbrs = |v: usize| -> Vec<usize> {
        if v < n1 {
            g1.neighbors(v).to_vec()
        } else {
            g2.neighbors(v - n1).iter().map(|&u| u + n1).collect()
        }
    };
    let total = n1 + g2.n();
    let adj: Vec<Vec<usize>> = (0..total).map(nbrs).collect();
    let mut colors: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut classes = 0;
    loop {
        let sigs: Vec<(usize, Vec<usize>)> = adj
            .iter()
            .enumerate()
            .map(|(v, a)| {
                let mut s: Vec<usize> = a.iter().map(|&u| colors[u]).collect();
                s.sort_unstable();
                (colors[v], s)
            })
            .collect();
        let mut uniq = sigs.clone();
        uniq.sort();
        uniq.dedup();
        let next: Vec<usize> = sigs
            .iter()
            .map(|s| uniq.binary_search(s).expect("present"))
            .collect();
        let count = uniq.len();
        colors = next;
        if count == classes {
            break;
        }
        classes = count;
    }
    let c2 = colors.split_off(n1);
    (colors, c2)
}

fn heuristic_relabel(
    g1: &LabeledGraph,
    g2: &LabeledGraph,
    a1: &DMatrix<f64>,
    a2: &DMatrix<f64>,
    seed: u64,
    opts: RelabelOptions,
) -> Result<CutDistance> {
    let n = g1.n();
    let (c1, c2) = refined_colors(g1, g2);
    let order = |c: &[usize]| {
        let mut o: Vec<usize> = (0..n).collect();
        o.sort_by_key(|&v| (c[v], v));
        o
    };
    let o1 = order(&c1);
    let o2 = order(&c2);
    let cut_opts = CutOptions {
        restarts: opts.cut_restarts.max(1),
        seed,
    };
    let eval = |pi: &[usize]| cut_norm_auto(&aligned_difference(a1, a2, pi), cut_opts);

    let mut best: Option<(CutResult, Vec<usize>)> = None;
    for r in 0..opts.restarts.max(1) {
        let mut o2r = o2.clone();
        if r > 0 {
            // shuffle inside classes of equal refined color
            let mut rng = rng_from_seed(derive_seed(seed, &[r as u64]));
            let mut start = 0;
            while start < n {
                let mut end = start + 1;
                while end < n && c2[o2r[end]] == c2[o2r[start]] {
                    end += 1;
                }
                for i in (start + 1..end).rev() {
                    let j = rng.random_range(start..=i);
                    o2r.swap(i, j);
                }
                start = end;
            }
        }
        let mut pi = vec![0; n];
        for (rank, &v) in o2r.iter().enumerate() {
            pi[v] = o1[rank];
        }
        let mut cur = eval(&pi)?;
        let mut sweeps = 0;
        while cur.value > 0.0 && sweeps < opts.max_sweeps {
            sweeps += 1;
            let mut improved = false;
            for u in 0..n {
                for v in (u + 1)..n {
                    pi.swap(u, v);
                    let cand = eval(&pi)?;
                    if cand.value < cur.value {
                        cur = cand;
                        improved = true;
                    } else {
                        pi.swap(u, v);
                    }
                }
            }
            if !improved {
                break;
            }
        }
        if best.as_ref().is_none_or(|b| cur.value < b.0.value) {
            best = Some((cur, pi));
        }
        if best.as_ref().is_some_and(|b| b.0.value == 0.0) {
            break;
        }
    }
    let (cut, alignment) = best.expect("at least one restart");
    Ok(CutDistance {
        value: cut.value,
        mode: DistanceMode::Heuristic,
        size: n,
        alignment,
        cut,
    })
}
