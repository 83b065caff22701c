//! Gaussian-sketch dimension reduction: the chi mean, its 1/k rate, and the
//! sketched stress of a perfectly embeddable instance.

use samds::core::{stress_of_points, Instance};
use samds::oracle::{chi_mean, gaussian_sketch};
use samds::rng::rng_from_seed;
use rand::Rng;

fn main() -> samds::Result<()> {
    println!("{:>4} {:>12} {:>14}", "k", "chi mean", "k*(1 - mean)");
    for k in [1usize, 2, 4, 8, 16, 64, 256] {
        let v = chi_mean(k);
        println!("{k:>4} {v:>12.6} {:>14.4}", k as f64 * (1.0 - v));
    }

    // zero-stress instance in R^4, sketched down to the plane and the line:
    // per pair, E (1 - |Sx|/|x|)^2 = 2 (1 - chi_mean(k')), so the sketched
    // stress decays like 1/(2 k')
    let mut rng = rng_from_seed(5);
    let points: Vec<Vec<f64>> = (0..12)
        .map(|_| (0..4).map(|_| rng.random_range(-3.0..3.0)).collect())
        .collect();
    let inst4 = Instance::from_points(&points)?;
    println!("\nsketching a zero-stress 4-dimensional instance:");
    println!("{:>4} {:>14} {:>14} {:>12}", "k'", "mean stress", "2(1-chi)", "measured C");
    for k_target in [1usize, 2, 3] {
        let sketches = 100;
        let mut acc = 0.0;
        for _ in 0..sketches {
            let imaged = gaussian_sketch(&points, k_target, &mut rng);
            acc += stress_of_points(&imaged, &inst4);
        }
        let mean = acc / sketches as f64;
        println!(
            "{k_target:>4} {mean:>14.6} {:>14.6} {:>12.4}",
            2.0 * (1.0 - chi_mean(k_target)),
            mean * k_target as f64
        );
    }
    Ok(())
}
