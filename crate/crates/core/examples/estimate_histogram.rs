//! Degree-sorted network histogram.
use graphon::estimation::{default_bins, estimate_histogram};
use graphon::{sample_dense, KernelGraphon, Result};

fn main() -> Result<()> {
    let w = KernelGraphon::product();
    let t = sample_dense(&w, 600, 9)?;
    let b = default_bins(600);
    let rep = estimate_histogram(&t.graph, b)?.with_truth(t.probs()?)?;
    println!("b={b} mse={:.5}", rep.mse.unwrap());
    for row in rep.w_hat.as_ref().unwrap().rows() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.2}")).collect();
        println!("  {}", cells.join(" "));
    }
    Ok(())
}
