//! Exact cut norm against the alternating heuristic on a random signed matrix.
use graphon::cutmetric::{cut_norm_exact, cut_norm_heuristic};
use graphon::Result;
use nalgebra::DMatrix;
use rand::Rng;

fn main() -> Result<()> {
    let n = 12;
    let mut rng = graphon::rng::rng_from_seed(5);
    let mut a = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = if rng.random::<bool>() { 1.0 } else { -1.0 };
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
    let exact = cut_norm_exact(&a)?;
    let heur = cut_norm_heuristic(&a, 50, 0)?;
    println!("exact     {:.6}  |S|={} |T|={}", exact.value, exact.witness_s.len(), exact.witness_t.len());
    println!("heuristic {:.6}  |S|={} |T|={}", heur.value, heur.witness_s.len(), heur.witness_t.len());
    Ok(())
}
