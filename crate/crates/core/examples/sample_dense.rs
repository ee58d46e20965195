//! W-random graphs from a named kernel.
use graphon::{sample_dense, KernelGraphon, Result};

fn main() -> Result<()> {
    let w = KernelGraphon::product();
    let trace = sample_dense(&w, 500, 42)?;
    let p = trace.probs()?;
    println!(
        "n={} edges={} density={:.4} expected={:.4}",
        trace.graph.n(),
        trace.graph.edge_count(),
        trace.graph.edge_density(),
        p.off_diagonal_mean()
    );
    Ok(())
}
