//! Edge lists, grid JSON and sample metadata on disk.
use graphon::io::{self, SampleSidecar};
use graphon::samplers::{GraphonSource, ModelSpec};
use graphon::Result;

fn main() -> Result<()> {
    let dir = std::env::temp_dir().join("graphon-formats");
    std::fs::create_dir_all(&dir)?;
    let spec = ModelSpec::Dense { graphon: GraphonSource::Kernel("halfplane".into()), n: 8 };
    let t = spec.sample(1)?;
    io::write_edge_list(&dir.join("g.edges"), &t.graph)?;
    std::fs::write(dir.join("g.json"), io::to_json(&SampleSidecar::new(spec, 1, &t.latents))?)?;
    print!("{}", io::format_edge_list(&t.graph));

    // The sidecar is enough to rebuild the probability matrix.
    let side = io::read_sidecar(&dir.join("g.json"))?;
    let p = side.model.prob_matrix(&side.latents()?)?;
    println!("rebuilt P matches: {}", p == *t.probs()?);
    Ok(())
}
