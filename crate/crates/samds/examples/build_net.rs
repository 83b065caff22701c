//! Epsilon-net construction: sizes, realized separation, and cover radius at
//! a few parameter settings, plus the JSON dump format.

use samds::core::dist;
use samds::net::{build_net, snap};
use samds::rng::rng_from_seed;
use rand::Rng;

fn main() -> samds::Result<()> {
    let mut rng = rng_from_seed(3);
    println!(
        "{:>2} {:>6} {:>6} {:>7} {:>10} {:>12} {:>12}",
        "k", "R", "eps", "|net|", "min sep", "worst cover", "cover const"
    );
    for (k, r, eps) in [
        (1usize, 2.0, 0.5),
        (1, 8.0, 1.0),
        (2, 1.0, 0.5),
        (2, 4.0, 1.0),
        (3, 1.0, 0.8),
    ] {
        let net = build_net(k, r, eps)?;
        // Monte Carlo cover check
        let mut worst: f64 = 0.0;
        for _ in 0..5000 {
            let v: Vec<f64> = (0..k).map(|_| rng.random_range(-r..r)).collect();
            worst = worst.max(dist(&v, net.point(snap(&v, &net))));
        }
        let meta = net.meta();
        println!(
            "{k:>2} {r:>6.1} {eps:>6.2} {:>7} {:>10.4} {:>12.4} {:>12.3}",
            net.len(),
            net.min_separation(),
            worst,
            meta.cover_constant
        );
        assert!(worst <= eps + 1e-9);
    }

    let net = build_net(1, 2.0, 0.5)?;
    let path = std::env::temp_dir().join("samds_net_dump.json");
    net.dump_json_file(&path)?;
    println!("\ndumped a net to {}", path.display());
    Ok(())
}
