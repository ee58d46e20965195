//! Completing a sparsely observed network from expanded neighborhoods.
use graphon::completion::{complete, observe, CompletionConfig};
use graphon::estimation::{usvt_partial, DEFAULT_USVT_ETA};
use graphon::{mse_vs_truth, sample_dense, KernelGraphon, Result};

fn main() -> Result<()> {
    let truth = sample_dense(&KernelGraphon::product(), 400, 0)?;
    let p = truth.probs()?;
    let obs = observe(p, 0.1, 1)?;
    println!("observed {} of {} pairs", obs.observed_pairs(), obs.possible_pairs());

    let done = complete(&obs, &CompletionConfig::default())?;
    println!("r={} h={:.4e} fallback={} warning={}", done.r, done.h, done.fallback_pairs, done.warning);
    println!("completion mse={:.5}", mse_vs_truth(&done.p_hat, p)?);

    let base = usvt_partial(obs.values(), obs.p_hat(), DEFAULT_USVT_ETA)?;
    println!("usvt mse={:.5}", mse_vs_truth(&base, p)?);
    Ok(())
}
