//! The continuous local-search baseline next to the exhaustive discrete
//! optimum on a random instance.

use std::sync::Arc;

use rand::Rng;
use samds::core::{kk_stress, Instance};
use samds::net::EpsNet;
use samds::oracle::{brute_force_net_opt, local_search_opt};
use samds::rng::rng_from_seed;

fn main() -> samds::Result<()> {
    let mut rng = rng_from_seed(9);
    let n = 6;
    let d: Vec<f64> = (0..samds::core::num_pairs(n))
        .map(|_| rng.random_range(1.0..3.0))
        .collect();
    let inst = Instance::new(n, 1, d)?;

    let emb = local_search_opt(&inst, 6, 500, &mut rng)?;
    let ls = kk_stress(&emb, &inst)?;

    let net = Arc::new(EpsNet::from_points(
        1,
        1.0,
        (0..7).map(|i| vec![0.5 * i as f64]).collect(),
    )?);
    let (_, brute) = brute_force_net_opt(&inst, &net)?;

    println!("local search stress:          {ls:.6}");
    println!("discrete optimum over 7 pts:  {brute:.6}");
    println!("(the continuous search is free of the net's quantization)");
    Ok(())
}
