//! Cut distance between graphs, with and without relabeling.
use graphon::{cut_distance, cut_distance_labeled, empirical_graphon, DistanceMode, LabeledGraph, Result, StepGraphon};

fn main() -> Result<()> {
    let k4 = LabeledGraph::complete(4);
    let e4 = LabeledGraph::empty(4);
    let d = cut_distance(&k4, &e4, DistanceMode::Exact, 0)?;
    println!("K4 vs empty4: {} ({:?})", d.value, d.mode);

    // A path and its relabeling are at distance zero once relabelings are allowed.
    let p = LabeledGraph::path(5);
    let q = p.permute(&[3, 0, 4, 1, 2])?;
    let labeled = cut_distance_labeled(&empirical_graphon(&p)?, &empirical_graphon(&q)?)?;
    let unlabeled = cut_distance(&p, &q, DistanceMode::Exact, 0)?;
    println!("path vs relabeled path: labeled {labeled:.4}, unlabeled {:.4}", unlabeled.value);

    // Random graphs approach the constant graphon.
    let half = StepGraphon::constant(1, 0.5)?;
    for n in [32, 64, 128] {
        let g = graphon::sample_dense(&graphon::KernelGraphon::constant(0.5)?, n, 1)?.graph;
        let v = cut_distance_labeled(&empirical_graphon(&g)?, &half)?;
        println!("G({n},1/2) vs 1/2: {v:.4}");
    }
    Ok(())
}
