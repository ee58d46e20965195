//! Singular value thresholding on a low-rank graphon.
use graphon::estimation::{estimate_usvt, DEFAULT_USVT_ETA};
use graphon::{sample_dense, KernelGraphon, Result};

fn main() -> Result<()> {
    let t = sample_dense(&KernelGraphon::product(), 400, 2)?;
    let rep = estimate_usvt(&t.graph, DEFAULT_USVT_ETA)?.with_truth(t.probs()?)?;
    println!("usvt mse={:.6}", rep.mse.unwrap());
    Ok(())
}
