//! Motif densities of a graphon and of a sample drawn from it.
use graphon::{hom_density, sample_dense, subgraph_density_empirical, BlockModel, Motif, Result};

fn main() -> Result<()> {
    let model = BlockModel::new(vec![0.5, 0.5], vec![vec![0.8, 0.1], vec![0.1, 0.8]])?;
    let w = model.step_graphon()?;
    let g = sample_dense(&model.graphon(), 400, 11)?.graph;
    for name in ["edge", "triangle", "cycle4", "k4"] {
        let f = Motif::named(name)?;
        let t = hom_density(&f, &w)?;
        let e = subgraph_density_empirical(&g, &f, 200_000, 0)?;
        println!("{name:>8}: t(F,W)={t:.5} sample={e:.5}");
    }
    Ok(())
}
