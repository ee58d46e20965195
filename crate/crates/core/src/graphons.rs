//! Graphon representations: dense step grids and kernel handles.
//!
//! A [`StepGraphon`] is a `k x k` symmetric grid of nonnegative values laid
//! over the square `[0, scale]^2`. Empirical graphons (one cell per vertex
//! pair, value 0 on the diagonal since simple graphs have no loops), rescaled
//! graphons (`W / rho`) and stretched graphons (domain side `1 / sqrt(rho)`)
//! all share this type. A [`KernelGraphon`] wraps a closed-form symmetric
//! function for sampling and discretization.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::graph::{lcm, LabeledGraph};

/// Anything that can be evaluated as a symmetric function on `[0, extent]^2`.
pub trait Graphon: Send + Sync {
    /// Side length of the square domain.
    fn extent(&self) -> f64;

    /// `true` when every value lies in `[0, 1]`.
    fn is_bounded(&self) -> bool;

    /// Evaluates without a domain check.
    fn value(&self, x: f64, y: f64) -> f64;

    fn eval(&self, x: f64, y: f64) -> Result<f64> {
        let e = self.extent();
        if !(0.0..=e).contains(&x) || !(0.0..=e).contains(&y) {
            return Err(invalid(format!("({x}, {y}) outside domain [0, {e}]^2")));
        }
        Ok(self.value(x, y))
    }

    /// Short human-readable description, recorded in sample metadata.
    fn describe(&self) -> String;
}

/// Symmetric step function on `[0, scale]^2` with `k x k` cells.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridFile", into = "GridFile")]
pub struct StepGraphon {
    k: usize,
    scale: f64,
    grid: Vec<f64>,
}

/// On-disk layout of a step graphon.
#[derive(Serialize, Deserialize)]
struct GridFile {
    k: usize,
    scale: f64,
    grid: Vec<Vec<f64>>,
}

/// Symmetry tolerance applied when loading grids from files.
pub const GRID_FILE_SYMMETRY_TOL: f64 = 1e-12;

impl TryFrom<GridFile> for StepGraphon {
    type Error = crate::Error;

    fn try_from(f: GridFile) -> Result<Self> {
        if f.grid.len() != f.k || f.grid.iter().any(|r| r.len() != f.k) {
            return Err(invalid(format!("grid is not {0} x {0}", f.k)));
        }
        let mut flat: Vec<f64> = f.grid.into_iter().flatten().collect();
        for a in 0..f.k {
            for b in (a + 1)..f.k {
                let (x, y) = (flat[a * f.k + b], flat[b * f.k + a]);
                if (x - y).abs() > GRID_FILE_SYMMETRY_TOL {
                    return Err(invalid(format!("grid asymmetric at ({a}, {b}): {x} vs {y}")));
                }
                flat[b * f.k + a] = x;
            }
        }
        StepGraphon::new(f.k, f.scale, flat)
    }
}

impl From<StepGraphon> for GridFile {
    fn from(w: StepGraphon) -> Self {
        GridFile {
            k: w.k,
            scale: w.scale,
            grid: w.grid.chunks(w.k.max(1)).map(<[f64]>::to_vec).collect(),
        }
    }
}

impl StepGraphon {
    /// Builds a step graphon from a row-major grid. The grid must be exactly
    /// symmetric, finite and nonnegative; nothing is repaired silently.
    pub fn new(k: usize, scale: f64, grid: Vec<f64>) -> Result<Self> {
        if k == 0 {
            return Err(invalid("grid resolution must be positive"));
        }
        if !(scale.is_finite() && scale > 0.0) {
            return Err(invalid(format!("scale must be positive, got {scale}")));
        }
        if grid.len() != k * k {
            return Err(invalid(format!("grid has {} entries, expected {}", grid.len(), k * k)));
        }
        if let Some(v) = grid.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(invalid(format!("grid entry {v} is not a finite nonnegative value")));
        }
        for a in 0..k {
            for b in (a + 1)..k {
                if grid[a * k + b] != grid[b * k + a] {
                    return Err(invalid(format!("grid is not symmetric at ({a}, {b})")));
                }
            }
        }
        Ok(StepGraphon { k, scale, grid })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let k = rows.len();
        if rows.iter().any(|r| r.len() != k) {
            return Err(invalid("grid rows must form a square"));
        }
        Self::new(k, 1.0, rows.concat())
    }

    pub fn constant(k: usize, c: f64) -> Result<Self> {
        Self::new(k, 1.0, vec![c; k * k])
    }

    /// The matrix must already be exactly symmetric.
    pub fn from_matrix(m: &DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(invalid("matrix must be square"));
        }
        let k = m.nrows();
        let grid = (0..k).flat_map(|a| (0..k).map(move |b| m[(a, b)])).collect();
        Self::new(k, 1.0, grid)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.grid[a * self.k + b]
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.grid.chunks(self.k)
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.k, self.k, &self.grid)
    }

    /// Mean cell value.
    pub fn mean(&self) -> f64 {
        self.grid.iter().sum::<f64>() / (self.k * self.k) as f64
    }

    /// Integral over `[0, scale]^2`.
    pub fn integral(&self) -> f64 {
        self.mean() * self.scale * self.scale
    }

    pub fn max_value(&self) -> f64 {
        self.grid.iter().copied().fold(0.0, f64::max)
    }

    /// Cell index containing coordinate `t`; `t == scale` maps to the last cell.
    fn cell(&self, t: f64) -> usize {
        let c = (t * self.k as f64 / self.scale).floor();
        (c.max(0.0) as usize).min(self.k - 1)
    }

    /// Divides every value by `rho`, keeping the domain.
    pub fn rescale(&self, rho: f64) -> Result<Self> {
        check_rho(rho)?;
        Self::new(self.k, self.scale, self.grid.iter().map(|v| v / rho).collect())
    }

    /// Keeps the values and enlarges the domain side to `scale / sqrt(rho)`,
    /// so the integral is multiplied by `1 / rho`.
    pub fn stretch(&self, rho: f64) -> Result<Self> {
        check_rho(rho)?;
        if self.scale != 1.0 {
            return Err(invalid("stretch expects a graphon on the unit square"));
        }
        Self::new(self.k, 1.0 / rho.sqrt(), self.grid.clone())
    }

    /// Replicates each cell into a `factor x factor` block.
    pub fn refine(&self, factor: usize) -> Result<Self> {
        if factor == 0 {
            return Err(invalid("refinement factor must be positive"));
        }
        let k2 = self.k * factor;
        let grid = (0..k2)
            .flat_map(|a| (0..k2).map(move |b| (a / factor, b / factor)))
            .map(|(a, b)| self.get(a, b))
            .collect();
        Self::new(k2, self.scale, grid)
    }

    /// Refines both graphons to the common resolution `lcm(k1, k2)`.
    pub fn common_refinement(&self, other: &Self) -> Result<(Self, Self)> {
        let l = lcm(self.k, other.k);
        Ok((self.refine(l / self.k)?, other.refine(l / other.k)?))
    }

    /// Reads the graph back from a {0,1}-valued grid with zero diagonal.
    pub fn to_graph(&self) -> Result<LabeledGraph> {
        for a in 0..self.k {
            if self.get(a, a) != 0.0 {
                return Err(invalid("diagonal must be zero to represent a simple graph"));
            }
        }
        if self.grid.iter().any(|&v| v != 0.0 && v != 1.0) {
            return Err(invalid("grid is not 0/1 valued"));
        }
        Ok(LabeledGraph::from_fn(self.k, |a, b| self.get(a, b) == 1.0))
    }
}

impl Graphon for StepGraphon {
    fn extent(&self) -> f64 {
        self.scale
    }

    fn is_bounded(&self) -> bool {
        self.max_value() <= 1.0
    }

    fn value(&self, x: f64, y: f64) -> f64 {
        self.get(self.cell(x), self.cell(y))
    }

    fn describe(&self) -> String {
        format!("step grid k={} scale={}", self.k, self.scale)
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if !(rho.is_finite() && rho > 0.0) {
        return Err(invalid(format!("rho must be positive, got {rho}")));
    }
    Ok(())
}

/// The empirical graphon of `g`: an `n x n` 0/1 grid on the unit square.
pub fn empirical_graphon(g: &LabeledGraph) -> Result<StepGraphon> {
    let n = g.n();
    if n == 0 {
        return Err(invalid("empirical graphon needs at least one vertex"));
    }
    let mut grid = vec![0.0; n * n];
    for (u, v) in g.edges() {
        grid[u * n + v] = 1.0;
        grid[v * n + u] = 1.0;
    }
    StepGraphon::new(n, 1.0, grid)
}

type KernelFn = dyn Fn(f64, f64) -> f64 + Send + Sync;

/// A symmetric closed-form kernel on `[0, extent]^2`.
#[derive(Clone)]
pub struct KernelGraphon {
    name: String,
    extent: f64,
    bounded: bool,
    f: Arc<KernelFn>,
}

impl fmt::Debug for KernelGraphon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KernelGraphon")
            .field("name", &self.name)
            .field("extent", &self.extent)
            .field("bounded", &self.bounded)
            .finish()
    }
}

impl KernelGraphon {
    pub fn new(
        name: impl Into<String>,
        extent: f64,
        bounded: bool,
        f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if !(extent.is_finite() && extent > 0.0) {
            return Err(invalid(format!("kernel extent must be positive, got {extent}")));
        }
        Ok(KernelGraphon {
            name: name.into(),
            extent,
            bounded,
            f: Arc::new(f),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Same function on a different domain, e.g. a truncated feature space.
    pub fn with_extent(&self, extent: f64) -> Result<Self> {
        if !(extent.is_finite() && extent > 0.0) {
            return Err(invalid(format!("kernel extent must be positive, got {extent}")));
        }
        Ok(KernelGraphon {
            extent,
            ..self.clone()
        })
    }

    pub fn constant(c: f64) -> Result<Self> {
        if !(c.is_finite() && c >= 0.0) {
            return Err(invalid(format!("constant kernel value must be nonnegative, got {c}")));
        }
        Self::new(format!("const:{c}"), 1.0, c <= 1.0, move |_, _| c)
    }

    /// `W(x, y) = x y`.
    pub fn product() -> Self {
        Self::new("product", 1.0, true, |x, y| x * y).expect("valid extent")
    }

    /// `W(x, y) = 1[x + y >= 1]`.
    pub fn halfplane() -> Self {
        Self::new("halfplane", 1.0, true, |x, y| if x + y >= 1.0 { 1.0 } else { 0.0 })
            .expect("valid extent")
    }

    /// Limit of the half-graphs [`LabeledGraph::half_graph`] in their natural
    /// labeling: 1 when `x` and `y` lie in different halves of `[0, 1]` and
    /// `|x - y| <= 1/2`.
    pub fn half_graph_limit() -> Self {
        Self::new("halfgraph", 1.0, true, |x, y| {
            let split = (x < 0.5) != (y < 0.5);
            if split && (x - y).abs() <= 0.5 {
                1.0
            } else {
                0.0
            }
        })
        .expect("valid extent")
    }

    /// `W(x, y) = exp(-x - y)` on `[0, x_max]^2`.
    pub fn exp_decay(x_max: f64) -> Result<Self> {
        Self::new("expdecay", x_max, true, |x, y| (-(x + y)).exp())
    }

    /// `W(x, y) = (x y)^(-alpha)`, unbounded near the axes for `alpha > 0`.
    pub fn power_law(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(invalid("power-law exponent must be nonnegative"));
        }
        Self::new(format!("powerlaw:{alpha}"), 1.0, alpha == 0.0, move |x, y| {
            (x * y).powf(-alpha)
        })
    }

    /// Parses a named kernel: `const:<c>`, `product`, `halfplane`,
    /// `halfgraph`, `expdecay` (extent 1; use [`Self::with_extent`] to widen)
    /// or `powerlaw:<alpha>`.
    pub fn named(spec: &str) -> Result<Self> {
        let (head, arg) = match spec.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (spec, None),
        };
        let num = |a: Option<&str>| -> Result<f64> {
            a.ok_or_else(|| invalid(format!("kernel `{spec}` needs a numeric argument")))?
                .parse::<f64>()
                .map_err(|e| invalid(format!("kernel `{spec}`: {e}")))
        };
        match head {
            "const" => Self::constant(num(arg)?),
            "product" => Ok(Self::product()),
            "halfplane" => Ok(Self::halfplane()),
            "halfgraph" => Ok(Self::half_graph_limit()),
            "expdecay" | "exp" => Self::exp_decay(1.0),
            "powerlaw" => Self::power_law(num(arg)?),
            _ => Err(invalid(format!("unknown kernel `{spec}`"))),
        }
    }
}

impl Graphon for KernelGraphon {
    fn extent(&self) -> f64 {
        self.extent
    }

    fn is_bounded(&self) -> bool {
        self.bounded
    }

    fn value(&self, x: f64, y: f64) -> f64 {
        (self.f)(x, y)
    }

    fn describe(&self) -> String {
        format!("kernel {} on [0,{}]^2", self.name, self.extent)
    }
}

/// Cell averages of `w` on a `k x k` grid, each cell estimated with an
/// `sub x sub` midpoint rule. Only the upper triangle is evaluated; the
/// lower triangle is mirrored so the result is exactly symmetric.
pub fn discretize<W: Graphon + ?Sized>(w: &W, k: usize, sub: usize) -> Result<StepGraphon> {
    if k == 0 || sub == 0 {
        return Err(invalid("discretization needs k >= 1 and sub >= 1"));
    }
    let scale = w.extent();
    let h = scale / (k * sub) as f64;
    let mut grid = vec![0.0; k * k];
    for a in 0..k {
        for b in a..k {
            let mut acc = 0.0;
            for p in 0..sub {
                let x = ((a * sub + p) as f64 + 0.5) * h;
                for q in 0..sub {
                    let y = ((b * sub + q) as f64 + 0.5) * h;
                    acc += w.value(x, y);
                }
            }
            let v = acc / (sub * sub) as f64;
            grid[a * k + b] = v;
            grid[b * k + a] = v;
        }
    }
    StepGraphon::new(k, scale, grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empirical_graphon_examples() {
        let w = empirical_graphon(&LabeledGraph::complete(3)).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                assert_eq!(w.get(a, b), if a == b { 0.0 } else { 1.0 });
            }
        }
        let z = empirical_graphon(&LabeledGraph::empty(4)).unwrap();
        assert!(z.grid().iter().all(|&v| v == 0.0));
        assert!(empirical_graphon(&LabeledGraph::empty(0)).is_err());
    }

    #[test]
    fn half_graph_staircase() {
        let w = empirical_graphon(&LabeledGraph::half_graph(4)).unwrap();
        let expected = [
            "00001000", "00001100", "00001110", "00001111", //
            "11110000", "01110000", "00110000", "00010000",
        ];
        for (a, row) in expected.iter().enumerate() {
            for (b, c) in row.chars().enumerate() {
                assert_eq!(w.get(a, b), if c == '1' { 1.0 } else { 0.0 }, "cell ({a},{b})");
            }
        }
    }

    #[test]
    fn rejects_asymmetric_and_negative() {
        assert!(StepGraphon::new(2, 1.0, vec![0.0, 1.0, 0.5, 0.0]).is_err());
        assert!(StepGraphon::new(1, 1.0, vec![-1.0]).is_err());
        assert!(StepGraphon::new(1, 0.0, vec![1.0]).is_err());
    }

    #[test]
    fn rescale_k4() {
        let w = empirical_graphon(&LabeledGraph::complete(4)).unwrap();
        let r = w.rescale(0.75).unwrap();
        assert!(r.grid().iter().all(|&v| v == 0.0 || v == 4.0 / 3.0));
        assert!((r.integral() - 1.0).abs() < 1e-15);
        assert_eq!(w.rescale(1.0).unwrap(), w);
        assert!(w.rescale(0.0).is_err());
        assert!(w.rescale(-1.0).is_err());
    }

    #[test]
    fn stretch_k4() {
        let w = empirical_graphon(&LabeledGraph::complete(4)).unwrap();
        let s = w.stretch(0.75).unwrap();
        assert!((s.scale() - 1.154_700_538_379_251_5).abs() < 1e-15);
        assert_eq!(s.grid(), w.grid());
        assert!((s.integral() - 1.0).abs() < 1e-15);
        assert_eq!(w.stretch(1.0).unwrap(), w);
        assert!(w.stretch(0.0).is_err());
        assert!(s.stretch(0.5).is_err());
    }

    #[test]
    fn eval_examples() {
        let c = StepGraphon::constant(3, 0.3).unwrap();
        assert_eq!(c.eval(0.0, 1.0).unwrap(), 0.3);
        let w = StepGraphon::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(w.eval(0.25, 0.75).unwrap(), 1.0);
        assert_eq!(w.eval(1.0, 1.0).unwrap(), 0.0);
        assert_eq!(w.eval(0.5, 0.0).unwrap(), 1.0);
        assert!(w.eval(1.5, 0.0).is_err());
        assert!(w.eval(-0.1, 0.0).is_err());
        let k = KernelGraphon::product();
        assert_eq!(k.eval(0.5, 0.5).unwrap(), 0.25);
        assert!(k.eval(1.01, 0.5).is_err());
    }

    #[test]
    fn named_kernels_parse() {
        assert_eq!(KernelGraphon::named("const:0.5").unwrap().value(0.1, 0.9), 0.5);
        assert_eq!(KernelGraphon::named("halfplane").unwrap().value(0.4, 0.6), 1.0);
        assert_eq!(KernelGraphon::named("halfplane").unwrap().value(0.4, 0.5), 0.0);
        assert!(KernelGraphon::named("powerlaw:0.25").unwrap().value(0.0, 0.3).is_infinite());
        assert!(!KernelGraphon::named("powerlaw:0.25").unwrap().is_bounded());
        assert!(KernelGraphon::named("nope").is_err());
        assert!(KernelGraphon::named("const").is_err());
    }

    #[test]
    fn discretize_is_symmetric_and_averages() {
        let d = discretize(&KernelGraphon::product(), 4, 8).unwrap();
        // the midpoint rule is exact for bilinear functions
        for a in 0..4 {
            for b in 0..4 {
                let expected = (a as f64 + 0.5) * (b as f64 + 0.5) / 16.0;
                assert!((d.get(a, b) - expected).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn grid_file_roundtrip_and_tolerance() {
        let w = StepGraphon::from_rows(&[vec![0.1, 0.2], vec![0.2, 0.3]]).unwrap();
        let s = serde_json::to_string(&w).unwrap();
        assert_eq!(s, r#"{"k":2,"scale":1.0,"grid":[[0.1,0.2],[0.2,0.3]]}"#);
        let back: StepGraphon = serde_json::from_str(&s).unwrap();
        assert_eq!(back, w);
        let near = r#"{"k":2,"scale":1.0,"grid":[[0.1,0.2],[0.2000000000000001,0.3]]}"#;
        assert!(serde_json::from_str::<StepGraphon>(near).is_ok());
        let far = r#"{"k":2,"scale":1.0,"grid":[[0.1,0.2],[0.21,0.3]]}"#;
        assert!(serde_json::from_str::<StepGraphon>(far).is_err());
    }
}
