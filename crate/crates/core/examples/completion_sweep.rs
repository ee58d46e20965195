//! Completion error against the observation probability, with a USVT baseline.
use graphon::completion::{completion_sweep, CompletionConfig};
use graphon::{KernelGraphon, Result};

fn main() -> Result<()> {
    let rows = completion_sweep(&KernelGraphon::product(), 300, &[0.1, 0.2, 0.4], &CompletionConfig::default(), 3, 0)?;
    print!("{}", graphon::io::format_completion_csv(&rows));
    Ok(())
}
