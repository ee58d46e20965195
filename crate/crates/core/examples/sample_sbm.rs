//! Stochastic block model with two assortative species.
use graphon::{sample_sbm, BlockModel, Latents, Result};

fn main() -> Result<()> {
    let model = BlockModel::new(vec![0.3, 0.7], vec![vec![0.9, 0.05], vec![0.05, 0.4]])?;
    let t = sample_sbm(&model, 300, 7)?;
    if let Latents::Species(s) = &t.latents {
        let first = s.iter().filter(|&&c| c == 0).count();
        println!("species sizes: {first} / {}", s.len() - first);
    }
    println!("edges={} density={:.4}", t.graph.edge_count(), t.graph.edge_density());
    Ok(())
}
