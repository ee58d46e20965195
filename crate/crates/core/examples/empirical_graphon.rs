//! Empirical graphons, blow-ups and the sparse rescale/stretch transforms.
use graphon::{empirical_graphon, LabeledGraph, Result};

fn main() -> Result<()> {
    let g = LabeledGraph::half_graph(3);
    let w = empirical_graphon(&g)?;
    println!("half-graph H_6: n={} edges={} density={:.4}", g.n(), g.edge_count(), g.edge_density());
    for row in w.rows() {
        println!("  {row:?}");
    }

    // Blowing up leaves the graphon unchanged up to refinement.
    let big = g.blow_up(2)?;
    let wb = empirical_graphon(&big)?;
    println!("blow_up(2): n={} integral={:.4} (was {:.4})", big.n(), wb.integral(), w.integral());

    let rho = g.edge_density();
    let r = w.rescale(rho)?;
    let s = w.stretch(rho)?;
    println!("rescaled: max={:.4} integral={:.4}", r.max_value(), r.integral());
    println!("stretched: scale={:.4} integral={:.4}", s.scale(), s.integral());
    Ok(())
}
