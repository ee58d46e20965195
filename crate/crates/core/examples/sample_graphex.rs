//! Graphex snapshots: the graph grows with T and isolated vertices are dropped.
use graphon::{sample_graphex, KernelGraphon, Result};

fn main() -> Result<()> {
    let x_max = 5.0;
    let w = KernelGraphon::exp_decay(x_max)?;
    for t_end in [1.0, 2.0, 4.0, 8.0] {
        let t = sample_graphex(&w, 5.0, t_end, x_max, 3)?;
        println!(
            "T={t_end}: vertices={} edges={} isolated={}",
            t.graph.n(),
            t.graph.edge_count(),
            t.graph.isolated_count()
        );
    }
    Ok(())
}
