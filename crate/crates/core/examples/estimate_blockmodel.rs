//! Least-squares block model fit on a planted partition.
use graphon::estimation::estimate_blockmodel;
use graphon::{sample_sbm, BlockModel, Result};

fn main() -> Result<()> {
    let model = BlockModel::balanced(2, &[0.8, 0.1, 0.1, 0.8])?;
    let t = sample_sbm(&model, 300, 4)?;
    let rep = estimate_blockmodel(&t.graph, 2, 50, 0)?.with_truth(t.probs()?)?;
    println!("pi_hat={:?}", rep.pi.as_ref().unwrap());
    println!("B_hat={:?}", rep.w_hat.as_ref().unwrap().rows().collect::<Vec<_>>());
    println!("objective by sweep: {:?}", rep.objective_trace);
    println!("mse={:.6}", rep.mse.unwrap());
    Ok(())
}
