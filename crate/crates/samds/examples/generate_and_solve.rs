//! Generate a small instance, run the hierarchy solver on it, and print the
//! report: LP value, per-trial rounded stress, and pseudo-deviations.
//!
//! ```text
//! cargo run --release --example generate_and_solve
//! ```

use samds::gen::{generate, InstanceKind};
use samds::rounding::{solve_mds, NetOverride, SolverParams};

fn main() -> samds::Result<()> {
    let inst = generate(&InstanceKind::TwoCluster { n: 6, k: 1, delta: 6.0 }, 1)?;
    println!(
        "two-cluster instance: n = {}, k = {}, aspect ratio = {}",
        inst.n,
        inst.k,
        inst.aspect_ratio()
    );

    let mut params = SolverParams::new(0.5, 2);
    params.trials = 4;
    params.seed = 7;
    // keep the LP small: a handful of net points is plenty at this scale
    params.net_override = Some(NetOverride {
        half_width: 6.0,
        eps: 4.0,
    });

    let out = solve_mds(&inst, &params)?;
    let r = &out.report;
    println!(
        "net: {} points, LP: {} vars x {} rows, value {:.6} in {} pivots",
        r.net_meta.size, r.lp_vars, r.lp_rows, r.lp_value, r.lp_iterations
    );
    println!(
        "pseudo-deviations before conditioning: {:?}",
        r.pdevs_before.iter().map(|p| (p * 100.0).round() / 100.0).collect::<Vec<_>>()
    );
    for (t, trial) in r.trials.iter().enumerate() {
        println!(
            "trial {t}: conditioned {:?} -> stress {:.6}, max pdev after {:.4}",
            trial.t_set,
            trial.stress,
            trial.pdevs.iter().cloned().fold(0.0f64, f64::max)
        );
    }
    println!("best stress {:.6} (trial {})", r.best_stress, r.best_trial);
    for (i, p) in out.embedding.points.iter().enumerate() {
        println!("  x_{i} = {p:?}");
    }
    Ok(())
}
