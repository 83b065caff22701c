use std::time::Instant;
use samds::oracle::brute_force_net_opt;
use samds::rng::{derive_rng, sample_distinct};
use samds::rounding::{solve_mds_on_net, SolverParams};
use samds::net::{build_net, EpsNet};
use samds::core::Instance;
use std::sync::Arc;

fn fixture(seed: u64) -> (Arc<EpsNet>, usize) {
    match seed % 4 {
        0 => (Arc::new(build_net(1, 2.5, 1.0).unwrap()), 5),
        1 => (Arc::new(build_net(1, 2.0, 1.0).unwrap()), 4),
        2 => {
            let grid: Vec<Vec<f64>> = vec![vec![0.0,0.0],vec![1.0,0.0],vec![0.0,1.0],vec![1.0,1.0]];
            (Arc::new(EpsNet::from_points(2, 1.0, grid).unwrap()), 4)
        }
        _ => {
            let ell: Vec<Vec<f64>> = vec![vec![0.0,0.0],vec![1.0,0.0],vec![2.0,0.0],vec![0.0,1.0],vec![1.0,1.0]];
            (Arc::new(EpsNet::from_points(2, 1.0, ell).unwrap()), 5)
        }
    }
}

fn main() {
    let mut ok = 0;
    for seed in 0..20u64 {
        let (net, n) = fixture(seed);
        let mut rng = derive_rng(202, seed);
        let picked = sample_distinct(&mut rng, net.len(), n.min(net.len()));
        let pts: Vec<Vec<f64>> = picked.iter().map(|&i| net.point(i).to_vec()).collect();
        let inst = Instance::from_points(&pts).unwrap();
        let (_, brute) = brute_force_net_opt(&inst, &net).unwrap();
        let mut params = SolverParams::new(0.5, 2);
        params.trials = 5;
        params.seed = seed;
        let t = Instant::now();
        let out = solve_mds_on_net(&inst, &params, net).unwrap();
        let s = out.report.best_stress;
        if s <= 1e-6 { ok += 1; }
        println!("seed {seed} (cfg {}): n={n} brute={brute:.1e} lp={:.2e} stress={s:.3e} pivots={} in {:.2?}",
            seed % 4, out.report.lp_value, out.report.lp_iterations, t.elapsed());
    }
    println!("recovered {ok}/20");
}
