//! User-item completion: only cross pairs are observed and radii are even.
use graphon::completion::{complete, CompletionConfig, ObservedNetwork, Radius};
use graphon::Result;
use rand::Rng;

fn main() -> Result<()> {
    let (users, items) = (60, 40);
    let mut rng = graphon::rng::rng_from_seed(8);
    let taste = |u: usize, i: usize| if (u < 30) == (i < 20) { 0.9 } else { 0.1 };
    let mut triplets = Vec::new();
    for u in 0..users {
        for i in 0..items {
            if rng.random::<f64>() < 0.3 {
                let x = u8::from(rng.random::<f64>() < taste(u, i));
                triplets.push((u, users + i, x));
            }
        }
    }
    let obs = ObservedNetwork::new(users + items, triplets, Some((users, items)))?;
    let cfg = CompletionConfig { radius: Radius::Fixed(2), ..CompletionConfig::default() };
    let done = complete(&obs, &cfg)?;
    let m = done.p_hat.as_matrix();
    println!("r={} h={:.4}", done.r, done.h);
    println!("user 0 on item 0: {:.3}, on item 39: {:.3}", m[(0, users)], m[(0, users + 39)]);
    println!("within-side entry: {}", m[(0, 1)]);

    let odd = CompletionConfig { radius: Radius::Fixed(3), ..cfg };
    println!("odd radius: {}", complete(&obs, &odd).unwrap_err());
    Ok(())
}
