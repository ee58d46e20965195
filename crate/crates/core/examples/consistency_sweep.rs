//! Estimation error as the graph grows with log(n)/n sparsity.
use graphon::estimation::{consistency_sweep, strictly_decreasing, DensityRule, Estimator};
use graphon::{KernelGraphon, Result};

fn main() -> Result<()> {
    let w = KernelGraphon::product();
    let rows = consistency_sweep(&w, &[100, 200, 400], DensityRule::LogOverN { c: 4.0 }, Estimator::Histogram { b: None }, 5, 0)?;
    print!("{}", graphon::io::format_sweep_csv(&rows));
    let mse: Vec<f64> = rows.iter().map(|r| r.mse_mean).collect();
    println!("decreasing: {}", strictly_decreasing(&mse));
    Ok(())
}
