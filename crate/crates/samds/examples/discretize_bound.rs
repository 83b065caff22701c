//! Snapping an embedding onto a net costs at most 3 eps extra stress, and
//! the realized cost shrinks quadratically as eps halves.

use samds::core::{kk_stress, Embedding, Instance, Provenance};
use samds::net::discretize_embedding;
use samds::rng::rng_from_seed;
use rand::Rng;

fn main() -> samds::Result<()> {
    let mut rng = rng_from_seed(11);
    println!("{:>5} {:>12} {:>12} {:>10}", "eps", "mean stress", "3 eps", "ratio");
    let mut prev_mean: Option<f64> = None;
    for eps in [0.5, 0.25, 0.125] {
        let mut total = 0.0;
        let runs = 10;
        for _ in 0..runs {
            // a zero-stress line instance with unit-scale gaps
            let mut x = 0.0;
            let points: Vec<Vec<f64>> = (0..6)
                .map(|_| {
                    let p = vec![x];
                    x += rng.random_range(1.0..1.7);
                    p
                })
                .collect();
            let inst = Instance::from_points(&points)?;
            let scale = 1.0 / inst.min_d();
            let norm = inst.normalize();
            let emb = Embedding::new(1, points, Provenance::LocalSearch).scaled(scale);
            let disc = discretize_embedding(&emb, &norm, eps)?;
            total += kk_stress(&disc, &norm)?;
        }
        let mean = total / runs as f64;
        let ratio = prev_mean.map(|p| mean / p).unwrap_or(f64::NAN);
        println!("{eps:>5.3} {mean:>12.6} {:>12.3} {ratio:>10.3}", 3.0 * eps);
        prev_mean = Some(mean);
    }
    println!("halving eps roughly quarters the realized cost (quadratic snapping error)");
    Ok(())
}
