//! Text and JSON file formats.
//!
//! - edge lists: header `n=<count>`, then one `u<TAB>v` line per edge;
//! - observations: header `n=<count>`, optional `bipartite=<rows>,<cols>`,
//!   then one `u<TAB>v<TAB>{0|1}` line per observed pair;
//! - dense matrices: header `n=<count>`, then `n` comma-separated rows with
//!   17 significant digits;
//! - graphon grids and sample metadata: JSON.
//!
//! Blank lines and lines starting with `#` are skipped when reading.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::completion::{CompletionRow, ObservedNetwork};
use crate::error::{Error, Result};
use crate::estimation::SweepRow;
use crate::graph::LabeledGraph;
use crate::graphons::StepGraphon;
use crate::samplers::{Latents, ModelSpec};

/// Fixed 17-significant-digit rendering used in every CSV.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

struct Lines<'a> {
    path: &'a Path,
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str, path: &'a Path) -> Self {
        Lines {
            path,
            inner: text.lines().enumerate(),
        }
    }

    fn err(&self, line: usize, msg: impl Into<String>) -> Error {
        Error::Parse {
            path: self.path.to_path_buf(),
            line,
            msg: msg.into(),
        }
    }
}

impl<'a> Iterator for Lines<'a> {
    type Item = (usize, &'a str);

    fn next(&mut self) -> Option<Self::Item> {
        for (i, line) in self.inner.by_ref() {
            let t = line.trim();
            if !t.is_empty() && !t.starts_with('#') {
                return Some((i + 1, t));
            }
        }
        None
    }
}

fn header<'a>(lines: &mut Lines<'a>, key: &str) -> Result<(usize, &'a str)> {
    let (no, line) = lines.next().ok_or_else(|| lines.err(1, format!("missing `{key}=` header")))?;
    let value = line
        .strip_prefix(key)
        .and_then(|r| r.strip_prefix('='))
        .ok_or_else(|| lines.err(no, format!("expected `{key}=...`, found `{line}`")))?;
    Ok((no, value.trim()))
}

fn parse_num<T: std::str::FromStr>(lines: &Lines, no: usize, field: &str) -> Result<T> {
    field
        .trim()
        .parse()
        .map_err(|_| lines.err(no, format!("cannot parse `{field}`")))
}

pub fn parse_edge_list(text: &str, path: &Path) -> Result<LabeledGraph> {
    let mut lines = Lines::new(text, path);
    let (no, n) = header(&mut lines, "n")?;
    let n: usize = parse_num(&lines, no, n)?;
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut line_of = Vec::new();
    while let Some((no, line)) = lines.next() {
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 2 {
            return Err(lines.err(no, "expected `u<TAB>v`"));
        }
        edges.push((parse_num(&lines, no, fields[0])?, parse_num(&lines, no, fields[1])?));
        line_of.push(no);
    }
    // report the offending line when the graph rejects an edge
    let mut seen = std::collections::HashSet::new();
    for (&(u, v), &no) in edges.iter().zip(&line_of) {
        if u >= n || v >= n || u == v || !seen.insert((u.min(v), u.max(v))) {
            return Err(lines.err(no, format!("invalid edge ({u}, {v}) for n = {n}")));
        }
    }
    LabeledGraph::from_edges(n, edges)
}

pub fn format_edge_list(g: &LabeledGraph) -> String {
    let mut out = format!("n={}\n", g.n());
    for (u, v) in g.edges() {
        let _ = writeln!(out, "{u}\t{v}");
    }
    out
}

pub fn read_edge_list(path: &Path) -> Result<LabeledGraph> {
    parse_edge_list(&fs::read_to_string(path)?, path)
}

pub fn write_edge_list(path: &Path, g: &LabeledGraph) -> Result<()> {
    Ok(fs::write(path, format_edge_list(g))?)
}

pub fn parse_observations(text: &str, path: &Path) -> Result<ObservedNetwork> {
    let mut lines = Lines::new(text, path);
    let (no, n) = header(&mut lines, "n")?;
    let n: usize = parse_num(&lines, no, n)?;
    let mut bipartite = None;
    let mut triplets = Vec::new();
    let mut first = true;
    while let Some((no, line)) = lines.next() {
        if first {
            first = false;
            if let Some(split) = line.strip_prefix("bipartite=") {
                let (r, c) = split
                    .split_once(',')
                    .ok_or_else(|| lines.err(no, "expected `bipartite=<rows>,<cols>`"))?;
                bipartite = Some((parse_num(&lines, no, r)?, parse_num(&lines, no, c)?));
                continue;
            }
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(lines.err(no, "expected `u<TAB>v<TAB>value`"));
        }
        let x: u8 = parse_num(&lines, no, fields[2])?;
        if x > 1 {
            return Err(lines.err(no, format!("value {x} is not 0 or 1")));
        }
        triplets.push((parse_num(&lines, no, fields[0])?, parse_num(&lines, no, fields[1])?, x));
    }
    ObservedNetwork::new(n, triplets, bipartite)
}

pub fn format_observations(obs: &ObservedNetwork) -> String {
    let mut out = format!("n={}\n", obs.n());
    if let Some((r, c)) = obs.bipartite() {
        let _ = writeln!(out, "bipartite={r},{c}");
    }
    for (u, v, x) in obs.triplets() {
        let _ = writeln!(out, "{u}\t{v}\t{x}");
    }
    out
}

pub fn read_observations(path: &Path) -> Result<ObservedNetwork> {
    parse_observations(&fs::read_to_string(path)?, path)
}

pub fn write_observations(path: &Path, obs: &ObservedNetwork) -> Result<()> {
    Ok(fs::write(path, format_observations(obs))?)
}

/// Dense square matrix, row-major, header `n=<n>`.
pub fn format_matrix_csv(m: &DMatrix<f64>) -> String {
    let n = m.nrows();
    let mut out = format!("n={n}\n");
    for i in 0..n {
        let row: Vec<String> = (0..m.ncols()).map(|j| fmt_f64(m[(i, j)])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn parse_matrix_csv(text: &str, path: &Path) -> Result<DMatrix<f64>> {
    let mut lines = Lines::new(text, path);
    let (no, n) = header(&mut lines, "n")?;
    let n: usize = parse_num(&lines, no, n)?;
    let mut data = Vec::with_capacity(n * n);
    let mut rows = 0;
    let mut last = no;
    while let Some((no, line)) = lines.next() {
        let row: Vec<f64> = line
            .split(',')
            .map(|f| parse_num(&lines, no, f))
            .collect::<Result<_>>()?;
        if row.len() != n {
            return Err(lines.err(no, format!("expected {n} values, found {}", row.len())));
        }
        data.extend(row);
        rows += 1;
        last = no;
    }
    if rows != n {
        return Err(lines.err(last, format!("expected {n} rows, found {rows}")));
    }
    Ok(DMatrix::from_row_slice(n, n, &data))
}

pub fn write_matrix_csv(path: &Path, m: &DMatrix<f64>) -> Result<()> {
    Ok(fs::write(path, format_matrix_csv(m))?)
}

pub fn read_matrix_csv(path: &Path) -> Result<DMatrix<f64>> {
    parse_matrix_csv(&fs::read_to_string(path)?, path)
}

pub fn read_grid(path: &Path) -> Result<StepGraphon> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

pub fn write_grid(path: &Path, w: &StepGraphon) -> Result<()> {
    Ok(fs::write(path, to_json(w)?)?)
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum LatentValues {
    Labels(Vec<usize>),
    Reals(Vec<f64>),
}

/// Metadata written next to a sampled edge list: enough to rerun the
/// sampler and to rebuild the realized probability matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSidecar {
    pub model: ModelSpec,
    pub seed: u64,
    latents: LatentValues,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    births: Option<Vec<f64>>,
}

impl SampleSidecar {
    pub fn new(model: ModelSpec, seed: u64, latents: &Latents) -> Self {
        let (latents, births) = match latents {
            Latents::Features(x) => (LatentValues::Reals(x.clone()), None),
            Latents::Species(s) => (LatentValues::Labels(s.clone()), None),
            Latents::Graphex { births, features } => (LatentValues::Reals(features.clone()), Some(births.clone())),
        };
        SampleSidecar {
            model,
            seed,
            latents,
            births,
        }
    }

    pub fn latents(&self) -> Result<Latents> {
        let reals = || match &self.latents {
            LatentValues::Reals(x) => x.clone(),
            LatentValues::Labels(s) => s.iter().map(|&v| v as f64).collect(),
        };
        Ok(match (&self.model, &self.births) {
            (ModelSpec::Sbm { .. }, _) => match &self.latents {
                LatentValues::Labels(s) => Latents::Species(s.clone()),
                LatentValues::Reals(_) => return Err(crate::error::invalid("block labels must be integers")),
            },
            (ModelSpec::Graphex { .. }, Some(b)) => Latents::Graphex {
                births: b.clone(),
                features: reals(),
            },
            (ModelSpec::Graphex { .. }, None) => return Err(crate::error::invalid("graphex metadata lacks births")),
            _ => Latents::Features(reals()),
        })
    }
}

pub fn read_sidecar(path: &Path) -> Result<SampleSidecar> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

pub fn format_sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("n,rho,seed_count,mse_mean,mse_std\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.n,
            fmt_f64(r.rho),
            r.seed_count,
            fmt_f64(r.mse_mean),
            fmt_f64(r.mse_std)
        );
    }
    out
}

pub fn format_completion_csv(rows: &[CompletionRow]) -> String {
    let mut out = String::from("p,mse_complete,mse_usvt\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{}", fmt_f64(r.p), fmt_f64(r.mse_complete), fmt_f64(r.mse_usvt));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samplers::GraphonSource;

    fn p() -> &'static Path {
        Path::new("mem")
    }

    #[test]
    fn edge_list_round_trip() {
        let g = LabeledGraph::half_graph(4);
        let text = format_edge_list(&g);
        assert!(text.starts_with("n=8\n0\t4\n"));
        assert_eq!(parse_edge_list(&text, p()).unwrap(), g);
        let with_comments = "# sample\nn=3\n\n0\t2\n";
        assert_eq!(parse_edge_list(with_comments, p()).unwrap().edge_count(), 1);
    }

    #[test]
    fn edge_list_errors_carry_lines() {
        let err = parse_edge_list("n=3\n0\t1\n1\t1\n", p()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let err = parse_edge_list("n=3\n0 1\n", p()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        assert!(parse_edge_list("3\n", p()).is_err());
        assert!(parse_edge_list("n=3\n0\t1\n1\t0\n", p()).is_err());
    }

    #[test]
    fn observation_round_trip() {
        let text = "n=4\nbipartite=2,2\n0\t2\t1\n1\t3\t0\n";
        let obs = parse_observations(text, p()).unwrap();
        assert_eq!(obs.bipartite(), Some((2, 2)));
        assert_eq!(obs.value(3, 1), Some(0));
        assert_eq!(format_observations(&obs), text);
        assert!(parse_observations("n=4\n0\t2\t2\n", p()).is_err());
        assert!(parse_observations("n=4\n0\t2\n", p()).is_err());
    }

    #[test]
    fn matrix_csv_round_trip_is_exact() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0 / 3.0, 1.0 / 3.0, 0.0]);
        let text = format_matrix_csv(&m);
        assert_eq!(text, "n=2\n0.0000000000000000e0,3.3333333333333331e-1\n3.3333333333333331e-1,0.0000000000000000e0\n");
        assert_eq!(parse_matrix_csv(&text, p()).unwrap(), m);
        assert!(parse_matrix_csv("n=2\n0,1\n", p()).is_err());
    }

    #[test]
    fn sidecar_round_trip() {
        let spec = ModelSpec::Dense {
            graphon: GraphonSource::Kernel("product".into()),
            n: 3,
        };
        let t = spec.sample(4).unwrap();
        let side = SampleSidecar::new(spec.clone(), 4, &t.latents);
        let json = to_json(&side).unwrap();
        let back: SampleSidecar = serde_json::from_str(&json).unwrap();
        assert_eq!(back.latents().unwrap(), t.latents);
        assert_eq!(back.model.prob_matrix(&back.latents().unwrap()).unwrap(), *t.probs().unwrap());

        let spec = ModelSpec::Graphex {
            graphon: GraphonSource::Kernel("const:1".into()),
            lambda: 2.0,
            t_end: 2.0,
            x_max: 1.0,
        };
        let t = spec.sample(1).unwrap();
        let back: SampleSidecar = serde_json::from_str(&to_json(&SampleSidecar::new(spec, 1, &t.latents)).unwrap()).unwrap();
        assert_eq!(back.latents().unwrap(), t.latents);
    }
}
