//! The relaxation property, empirically: on random instances the LP optimum
//! never exceeds the exhaustive discrete optimum over the same net.

use std::sync::Arc;

use rand::Rng;
use samds::core::Instance;
use samds::lp::solve_lp;
use samds::net::EpsNet;
use samds::oracle::brute_force_net_opt;
use samds::rng::rng_from_seed;
use samds::sa::{build_sa_lp, SubsetFamily};

fn main() -> samds::Result<()> {
    let mut rng = rng_from_seed(42);
    println!("{:<6} {:>4} {:>6} {:>12} {:>12} {:>10}", "inst", "n", "|net|", "lp value", "brute opt", "gap");
    for trial in 0..8 {
        let n = 3 + trial % 4;
        let net = Arc::new(EpsNet::from_points(
            1,
            1.0,
            (0..4).map(|i| vec![-1.5 + i as f64]).collect(),
        )?);
        let d: Vec<f64> = (0..samds::core::num_pairs(n))
            .map(|_| rng.random_range(0.5..3.5))
            .collect();
        let inst = Instance::new(n, 1, d)?;

        let family = SubsetFamily::full(n, 2)?;
        let (lp, _) = build_sa_lp(&inst, &net, &family)?;
        let sol = solve_lp(&lp)?;
        let (_, opt) = brute_force_net_opt(&inst, &net)?;
        println!(
            "{:<6} {:>4} {:>6} {:>12.6} {:>12.6} {:>10.2e}",
            trial,
            n,
            net.len(),
            sol.objective_value,
            opt,
            opt - sol.objective_value
        );
        assert!(sol.objective_value <= opt + 1e-6);
    }
    println!("lp <= brute held on every instance");
    Ok(())
}
