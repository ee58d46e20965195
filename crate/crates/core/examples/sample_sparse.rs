//! Sparse W-random graphs with edge probabilities min(1, rho W).
use graphon::{sample_sparse, KernelGraphon, Result};

fn main() -> Result<()> {
    let w = KernelGraphon::product();
    for n in [200, 800, 3200] {
        let rho = 4.0 * (n as f64).ln() / n as f64;
        let t = sample_sparse(&w, n, rho, 1)?;
        let avg_degree = 2.0 * t.graph.edge_count() as f64 / n as f64;
        println!("n={n:>5} rho={rho:.4} edges={:>6} avg degree={avg_degree:.2}", t.graph.edge_count());
    }
    Ok(())
}
