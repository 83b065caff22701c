//! The end-to-end solver: build a net over the target cube, optimize a
//! pseudo-distribution with the relaxation LP, then round by conditioning.
//!
//! Each trial draws a random conditioning set `T` (for sparsified families, a
//! random base tuple), samples an assignment for `T` from its local
//! distribution, conditions the pseudo-distribution on it, and reads off the
//! pseudo-expected positions. The best-stress trial is returned; per-trial
//! statistics stay in the report so expectation-level claims remain testable.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::core::{dist, kk_stress, num_pairs, Embedding, Instance, Provenance};
use crate::error::{Error, Result};
use crate::lp::{solve_lp, LpStatus};
use crate::net::{build_net_capped, EpsNet, NetMeta, DEFAULT_NET_CAP};
use crate::rng::{derive_rng, sample_distinct};
use crate::sa::{build_sa_lp_with, extract_pd, PseudoDistribution, SaLpOptions, SubsetFamily};

/// Evaluate the conditioning-size formula with every hidden constant set
/// to 1; a reference calculation only, never used to size desk-scale runs.
/// Natural logarithms; non-positive intermediate values clamp the result
/// at 0.
pub fn tau_formula(k: usize, delta: f64, eps: f64) -> f64 {
    assert!(k >= 1 && delta >= 1.0 && eps > 0.0);
    let log_delta = delta.ln();
    let loglog = (log_delta / eps).ln();
    let log_ratio = (delta / eps).ln();
    let raw = match k {
        1 => loglog * log_ratio / eps,
        2 => loglog * loglog * log_ratio / eps,
        _ => {
            let kf = k as f64;
            kf * loglog * log_ratio.powf(kf / 2.0) / eps.powf(kf / 2.0)
        }
    };
    raw.max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyChoice {
    Full,
    #[serde(alias = "sparse")]
    Sparsified,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetOverride {
    pub half_width: f64,
    pub eps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverParams {
    /// Target accuracy in (0, 1); sizes the default net.
    pub eps: f64,
    /// Conditioning size: how many variables each trial pins.
    pub tau: usize,
    pub family: FamilyChoice,
    /// Replaces the default net cube (`half_width = aspect_ratio / eps`,
    /// cover radius 1) when set.
    pub net_override: Option<NetOverride>,
    pub seed: u64,
    /// Independent conditioning draws; the best-stress one is returned.
    pub trials: usize,
    /// Base-count multiplier for sparsified families:
    /// `|base| = ceil(c0 * n / eps)`.
    pub c0: f64,
    /// Resampling budget for zero-probability conditioning draws.
    pub retry_cap: usize,
    pub net_cap: usize,
}

impl SolverParams {
    pub fn new(eps: f64, tau: usize) -> Self {
        SolverParams {
            eps,
            tau,
            family: FamilyChoice::Full,
            net_override: None,
            seed: 0,
            trials: 1,
            c0: 1.0,
            retry_cap: 10,
            net_cap: DEFAULT_NET_CAP,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(Error::InvalidParameter("eps must lie in (0, 1)".into()));
        }
        if self.tau < 1 {
            return Err(Error::InvalidParameter("tau must be >= 1".into()));
        }
        if self.trials < 1 {
            return Err(Error::InvalidParameter("trials must be >= 1".into()));
        }
        if !(self.c0 > 0.0) {
            return Err(Error::InvalidParameter("c0 must be > 0".into()));
        }
        Ok(())
    }

    /// Family level backing a conditioning size of `tau`: the algorithm asks
    /// for degree `2 tau`, and pair marginals must survive conditioning, so
    /// the level never drops below `tau + 2`. It also cannot exceed `n`;
    /// whenever fewer than two variables stay unconditioned, no pair marginal
    /// is needed afterwards, so the clamp is harmless.
    pub fn full_level(&self, n: usize) -> usize {
        (2 * self.tau).max(self.tau + 2).min(n)
    }

    pub fn sparsified_level(&self) -> usize {
        self.tau + 2
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialReport {
    pub t_set: Vec<usize>,
    /// Sampled net indices for `t_set`, in the same order.
    pub assignment: Vec<usize>,
    pub stress: f64,
    /// Pseudo-deviations after conditioning, one per variable.
    pub pdevs: Vec<f64>,
    /// Worst slack of the rounding inequality over all pairs (<= 0 when it
    /// holds exactly).
    pub fact33_max_violation: f64,
    pub resamples: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveReport {
    pub lp_value: f64,
    pub lp_vars: usize,
    pub lp_rows: usize,
    pub lp_iterations: usize,
    pub net_meta: NetMeta,
    pub family_subsets: usize,
    /// Pseudo-deviations of the unconditioned optimizer.
    pub pdevs_before: Vec<f64>,
    pub trials: Vec<TrialReport>,
    pub best_trial: usize,
    pub best_stress: f64,
}

#[derive(Debug, Clone)]
pub struct SolveOutput {
    pub embedding: Embedding,
    pub report: SolveReport,
    /// The unconditioned optimizer, for diagnostics.
    pub pd: PseudoDistribution,
}

/// Pseudo-deviation of variable `i` under `pd`.
pub fn pseudo_deviation(pd: &PseudoDistribution, i: usize) -> Result<f64> {
    pd.pdev(i)
}

/// Embedding read off a (conditioned) pseudo-distribution: conditioned
/// variables sit exactly on their assigned net points, the rest at their
/// pseudo-expected positions.
pub fn round_pd(pd: &PseudoDistribution) -> Result<Embedding> {
    let n = pd.n();
    let mut points = Vec::with_capacity(n);
    for i in 0..n {
        points.push(pd.pe_position(i)?);
    }
    Ok(Embedding::new(pd.net.k, points, Provenance::Rounded))
}

/// Worst violation over all pairs of the rounding inequality
/// `(1 - |pE x_i - pE x_j| / d)^2 <= 2 pE (1 - |x_i - x_j| / d)^2
///  + 2 ((pdev_i + pdev_j) / d)^2`,
/// with every quantity read from the pair's designated covering table so the
/// inequality is exact mathematics per table. Nonpositive means it holds.
pub fn fact33_max_violation(pd: &PseudoDistribution, inst: &Instance) -> Result<f64> {
    let k = pd.net.k;
    let mut worst = f64::NEG_INFINITY;
    for (i, j) in inst.pairs() {
        let support = pd.pair_support(i, j)?;
        let d = inst.d(i, j);
        let mut mean_i = vec![0.0; k];
        let mut mean_j = vec![0.0; k];
        let mut pair_cost = 0.0;
        for &(p, a, b) in &support {
            let (za, zb) = (pd.net.point(a), pd.net.point(b));
            for c in 0..k {
                mean_i[c] += p * za[c];
                mean_j[c] += p * zb[c];
            }
            let r = 1.0 - dist(za, zb) / d;
            pair_cost += p * r * r;
        }
        let mut pdev_i = 0.0;
        let mut pdev_j = 0.0;
        for &(p, a, b) in &support {
            pdev_i += p * dist(pd.net.point(a), &mean_i);
            pdev_j += p * dist(pd.net.point(b), &mean_j);
        }
        let lhs = {
            let r = 1.0 - dist(&mean_i, &mean_j) / d;
            r * r
        };
        let rhs = 2.0 * pair_cost + 2.0 * ((pdev_i + pdev_j) / d) * ((pdev_i + pdev_j) / d);
        worst = worst.max(lhs - rhs);
    }
    Ok(worst)
}

/// One conditioning draw: pick `T`, sample its assignment, condition.
/// Zero-probability draws are resampled up to `retry_cap` times.
fn draw_conditioned<R: Rng>(
    pd: &PseudoDistribution,
    family: &SubsetFamily,
    params: &SolverParams,
    rng: &mut R,
) -> Result<(Vec<usize>, Vec<usize>, PseudoDistribution, usize)> {
    let n = pd.n();
    let mut resamples = 0;
    loop {
        let t_set: Vec<usize> = match params.family {
            FamilyChoice::Full => sample_distinct(rng, n, params.tau),
            FamilyChoice::Sparsified => {
                let base = family
                    .base
                    .as_ref()
                    .expect("sparsified families carry their base");
                base[rng.random_range(0..base.len())].clone()
            }
        };
        let assignment = pd.sample_local(&t_set, rng)?;
        let zeta: BTreeMap<usize, usize> =
            t_set.iter().cloned().zip(assignment.iter().cloned()).collect();
        match pd.condition(&zeta) {
            Ok(cond) => return Ok((t_set, assignment, cond, resamples)),
            Err(Error::ZeroProbability { var }) => {
                resamples += 1;
                if resamples > params.retry_cap {
                    return Err(Error::ZeroProbability { var });
                }
            }
            Err(e) => return Err(e),
        }
    }
}

pub fn solve_mds(inst: &Instance, params: &SolverParams) -> Result<SolveOutput> {
    params.validate()?;
    inst.validate()?;
    let scale = inst.min_d();
    let norm = inst.normalize();
    let net = match params.net_override {
        Some(o) => build_net_capped(norm.k, o.half_width, o.eps, params.net_cap)?,
        None => build_net_capped(
            norm.k,
            norm.aspect_ratio() / params.eps,
            1.0,
            params.net_cap,
        )?,
    };
    let out = solve_mds_on_net(&norm, params, Arc::new(net))?;
    // map back to the original scale; stress is invariant under the rescale
    let embedding = out.embedding.scaled(scale);
    Ok(SolveOutput {
        embedding,
        report: out.report,
        pd: out.pd,
    })
}

/// Solver core on an explicit net. Unlike [`solve_mds`], no normalization is
/// applied: the caller owns the relationship between the net scale and the
/// dissimilarities.
pub fn solve_mds_on_net(
    inst: &Instance,
    params: &SolverParams,
    net: Arc<EpsNet>,
) -> Result<SolveOutput> {
    params.validate()?;
    inst.validate()?;
    let n = inst.n;
    if params.tau > n {
        return Err(Error::InvalidParameter(format!(
            "conditioning size {} exceeds n = {n}",
            params.tau
        )));
    }
    let family = match params.family {
        FamilyChoice::Full => SubsetFamily::full(n, params.full_level(n))?,
        FamilyChoice::Sparsified => {
            let count = (params.c0 * n as f64 / params.eps).ceil() as usize;
            let mut rng = derive_rng(params.seed, 0x5eed_fa41);
            SubsetFamily::sparsified(n, params.sparsified_level(), count.max(1), &mut rng)?
        }
    };

    let (lp, map) = build_sa_lp_with(inst, &net, &family, SaLpOptions::default())?;
    let sol = solve_lp(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::SaLpNotOptimal {
            status: sol.status.as_str(),
        });
    }
    let pd = extract_pd(&sol, &map, &family, Arc::clone(&net))?;

    let mut pdevs_before = Vec::with_capacity(n);
    for i in 0..n {
        pdevs_before.push(pd.pdev(i)?);
    }

    let mut trials = Vec::with_capacity(params.trials);
    let mut best_trial = 0;
    let mut best_stress = f64::INFINITY;
    let mut best_embedding = None;
    for t in 0..params.trials {
        let mut rng = derive_rng(params.seed, 1 + t as u64);
        let (t_set, assignment, cond, resamples) =
            draw_conditioned(&pd, &family, params, &mut rng)?;
        let emb = round_pd(&cond)?;
        let stress = kk_stress(&emb, inst)?;
        let mut pdevs = Vec::with_capacity(n);
        for i in 0..n {
            pdevs.push(cond.pdev(i)?);
        }
        let fact33 = fact33_max_violation(&cond, inst)?;
        if stress < best_stress {
            best_stress = stress;
            best_trial = t;
            best_embedding = Some(emb);
        }
        trials.push(TrialReport {
            t_set,
            assignment,
            stress,
            pdevs,
            fact33_max_violation: fact33,
            resamples,
        });
    }

    let report = SolveReport {
        lp_value: sol.objective_value,
        lp_vars: lp.num_vars,
        lp_rows: lp.num_rows(),
        lp_iterations: sol.iterations,
        net_meta: net.meta(),
        family_subsets: family.subsets.len(),
        pdevs_before,
        trials,
        best_trial,
        best_stress,
    };
    Ok(SolveOutput {
        embedding: best_embedding.expect("at least one trial"),
        report,
        pd,
    })
}

/// Empirical check of the bounded-rounded-cost inequality on a pair subset:
/// over conditioning draws for a fixed `t_set`, the mean of
/// `sum_{(i,j) in pairs} (1 - |pE_cond x_i - pE_cond x_j| / d_ij)^2`
/// is compared against `4 |S| + 4 * lp_value * C(n,2)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SmallSubsetCostReport {
    pub draws: usize,
    pub mean_cost: f64,
    pub std_error: f64,
    pub bound: f64,
    pub holds_within_3se: bool,
}

pub fn check_small_subset_cost<R: Rng>(
    pd: &PseudoDistribution,
    inst: &Instance,
    t_set: &[usize],
    pairs: &[(usize, usize)],
    draws: usize,
    rng: &mut R,
) -> Result<SmallSubsetCostReport> {
    let lp_value = pd.sa_objective(inst)?;
    let mut costs = Vec::with_capacity(draws);
    for _ in 0..draws {
        let assignment = pd.sample_local(t_set, rng)?;
        let zeta: BTreeMap<usize, usize> = t_set.iter().cloned().zip(assignment).collect();
        let cond = pd.condition(&zeta)?;
        let mut cost = 0.0;
        for &(i, j) in pairs {
            let pi = cond.pe_position(i)?;
            let pj = cond.pe_position(j)?;
            let r = 1.0 - dist(&pi, &pj) / inst.d(i, j);
            cost += r * r;
        }
        costs.push(cost);
    }
    let mean = costs.iter().sum::<f64>() / draws as f64;
    let var = costs.iter().map(|c| (c - mean) * (c - mean)).sum::<f64>() / draws as f64;
    let se = (var / draws as f64).sqrt();
    let bound = 4.0 * pairs.len() as f64 + 4.0 * lp_value * num_pairs(inst.n) as f64;
    Ok(SmallSubsetCostReport {
        draws,
        mean_cost: mean,
        std_error: se,
        bound,
        holds_within_3se: mean <= bound + 3.0 * se,
    })
}

/// Empirical check of conditioning-driven variance reduction for a fixed
/// `t_set`: per variable, the mean over draws of `pdev^2(x_i)` after
/// conditioning against `4 * min_{j in T} pE |x_i - x_j|^2` before it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DeviationToConditioningReport {
    pub draws: usize,
    pub mean_sq_pdev: Vec<f64>,
    pub std_error: Vec<f64>,
    pub bound: Vec<f64>,
    pub violations: usize,
}

pub fn check_deviation_to_conditioning<R: Rng>(
    pd: &PseudoDistribution,
    t_set: &[usize],
    draws: usize,
    rng: &mut R,
) -> Result<DeviationToConditioningReport> {
    let n = pd.n();
    let mut samples: Vec<Vec<f64>> = vec![Vec::with_capacity(draws); n];
    for _ in 0..draws {
        let assignment = pd.sample_local(t_set, rng)?;
        let zeta: BTreeMap<usize, usize> = t_set.iter().cloned().zip(assignment).collect();
        let cond = pd.condition(&zeta)?;
        for (i, bucket) in samples.iter_mut().enumerate() {
            let p = cond.pdev(i)?;
            bucket.push(p * p);
        }
    }
    let mut mean_sq = Vec::with_capacity(n);
    let mut ses = Vec::with_capacity(n);
    let mut bounds = Vec::with_capacity(n);
    let mut violations = 0;
    for i in 0..n {
        let mean = samples[i].iter().sum::<f64>() / draws as f64;
        let var = samples[i]
            .iter()
            .map(|v| (v - mean) * (v - mean))
            .sum::<f64>()
            / draws as f64;
        let se = (var / draws as f64).sqrt();
        let mut closest = f64::INFINITY;
        for &j in t_set {
            if j == i {
                closest = 0.0;
                break;
            }
            closest = closest.min(pd.pe_dist2(i, j)?);
        }
        let bound = 4.0 * closest;
        if mean > bound + 3.0 * se {
            violations += 1;
        }
        mean_sq.push(mean);
        ses.push(se);
        bounds.push(bound);
    }
    Ok(DeviationToConditioningReport {
        draws,
        mean_sq_pdev: mean_sq,
        std_error: ses,
        bound: bounds,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    #[test]
    fn tau_formula_degenerate_input_hits_the_guard() {
        // log log(delta)/eps vanishes at delta = e, eps = 1
        let v = tau_formula(3, std::f64::consts::E, 1.0);
        assert_eq!(v, 0.0);
    }

    #[test]
    fn tau_formula_k1_matches_direct_evaluation() {
        let delta = std::f64::consts::E.exp(); // e^e, so ln(delta) = e
        let eps = 0.5;
        let want = (std::f64::consts::E / eps).ln() * (delta / eps).ln() / eps;
        let got = tau_formula(1, delta, eps);
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
    }

    #[test]
    fn tau_formula_monotone_in_eps() {
        for k in 1..=4 {
            for delta in [std::f64::consts::E, 10.0, 1e3] {
                for eps in [0.8, 0.5, 0.3, 0.1] {
                    let a = tau_formula(k, delta, eps);
                    let b = tau_formula(k, delta, eps / 2.0);
                    assert!(b >= a, "k={k} delta={delta} eps={eps}: {b} < {a}");
                }
            }
        }
    }

    #[test]
    fn two_points_on_a_tiny_net_recover_exactly() {
        let inst = Instance::new(2, 1, vec![1.0]).unwrap();
        let net = Arc::new(
            EpsNet::from_points(1, 1.0, vec![vec![-1.0], vec![0.0], vec![1.0]]).unwrap(),
        );
        let mut params = SolverParams::new(0.5, 2);
        params.trials = 5;
        params.seed = 3;
        let out = solve_mds_on_net(&inst, &params, net).unwrap();
        assert!(out.report.lp_value.abs() < 1e-9);
        assert!(out.report.best_stress < 1e-9);
        let gap = (out.embedding.points[0][0] - out.embedding.points[1][0]).abs();
        assert!((gap - 1.0).abs() < 1e-7);
    }

    #[test]
    fn colinear_integers_recover_zero_stress() {
        let pts: Vec<Vec<f64>> = (0..4).map(|i| vec![i as f64]).collect();
        let inst = Instance::from_points(&pts).unwrap();
        let net = Arc::new(
            EpsNet::from_points(1, 1.0, (0..4).map(|i| vec![i as f64]).collect()).unwrap(),
        );
        let mut params = SolverParams::new(0.5, 2);
        params.trials = 3;
        params.seed = 11;
        let out = solve_mds_on_net(&inst, &params, net).unwrap();
        assert!(out.report.lp_value.abs() < 1e-9, "lp {}", out.report.lp_value);
        assert!(
            out.report.best_stress <= out.report.lp_value + 1e-7,
            "stress {}",
            out.report.best_stress
        );
    }

    #[test]
    fn one_point_net_forces_everything_coincident() {
        let inst = Instance::new(3, 1, vec![1.0, 1.0, 1.0]).unwrap();
        let net = Arc::new(EpsNet::from_points(1, 1.0, vec![vec![0.0]]).unwrap());
        let mut params = SolverParams::new(0.5, 1);
        params.seed = 1;
        let out = solve_mds_on_net(&inst, &params, net).unwrap();
        assert!((out.report.best_stress - 1.0).abs() < 1e-12);
        for p in &out.embedding.points {
            assert_eq!(p[0], 0.0);
        }
    }

    #[test]
    fn pdev_examples() {
        let net = Arc::new(EpsNet::from_points(1, 1.0, vec![vec![-3.0], vec![3.0]]).unwrap());
        let family = SubsetFamily::full(2, 2).unwrap();
        // uniform on {-delta, +delta}: mean 0, pdev = delta
        let pd = PseudoDistribution::from_tables(
            Arc::clone(&net),
            family.clone(),
            vec![vec![0.25; 4]],
        )
        .unwrap();
        assert!((pd.pdev(0).unwrap() - 3.0).abs() < 1e-12);
        assert_eq!(pd.pe_position(0).unwrap(), vec![0.0]);
        // point mass: 0
        let pm = PseudoDistribution::point_mass(Arc::clone(&net), family, &[1, 0]);
        assert_eq!(pm.pdev(0).unwrap(), 0.0);
        // uniform on {0, 1}: pdev = 1/2
        let net01 = Arc::new(EpsNet::from_points(1, 1.0, vec![vec![0.0], vec![1.0]]).unwrap());
        let fam2 = SubsetFamily::full(2, 2).unwrap();
        let pd01 = PseudoDistribution::from_tables(Arc::clone(&net01), fam2, vec![vec![0.25; 4]])
            .unwrap();
        assert!((pd01.pdev(0).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn round_pd_maps_mixture_means_to_zero() {
        let net = Arc::new(EpsNet::from_points(1, 1.0, vec![vec![-1.0], vec![1.0]]).unwrap());
        let family = SubsetFamily::full(3, 2).unwrap();
        let pd = PseudoDistribution::mixture(
            Arc::clone(&net),
            family,
            &[vec![0, 0, 1], vec![1, 1, 0]],
        );
        let emb = round_pd(&pd).unwrap();
        for p in &emb.points {
            assert!(p[0].abs() < 1e-12);
        }
    }

    #[test]
    fn round_pd_uses_exact_net_points_for_conditioned_vars() {
        let net = Arc::new(EpsNet::from_points(1, 1.0, vec![vec![-4.0], vec![4.0]]).unwrap());
        let family = SubsetFamily::full(4, 2).unwrap();
        let a = vec![0usize, 0, 1, 1];
        let pd = PseudoDistribution::mixture(
            Arc::clone(&net),
            family,
            &[a.clone(), vec![1, 1, 0, 0]],
        );
        let mut zeta = BTreeMap::new();
        zeta.insert(1usize, 0usize);
        let cond = pd.condition(&zeta).unwrap();
        let emb = round_pd(&cond).unwrap();
        assert_eq!(emb.points[1], vec![-4.0]); // pinned exactly
        // the mixture collapsed to the intended cluster layout
        assert_eq!(emb.points[0], vec![-4.0]);
        assert_eq!(emb.points[2], vec![4.0]);
        assert_eq!(emb.points[3], vec![4.0]);
    }

    #[test]
    fn fixed_seed_reproduces_the_embedding() {
        let pts: Vec<Vec<f64>> = (0..4).map(|i| vec![i as f64]).collect();
        let inst = Instance::from_points(&pts).unwrap();
        let mut params = SolverParams::new(0.4, 2);
        params.trials = 3;
        params.seed = 12345;
        params.net_override = Some(NetOverride {
            half_width: 4.0,
            eps: 1.0,
        });
        let a = solve_mds(&inst, &params).unwrap();
        let b = solve_mds(&inst, &params).unwrap();
        assert_eq!(a.embedding.points, b.embedding.points);
        assert_eq!(a.report.best_stress.to_bits(), b.report.best_stress.to_bits());
    }

    #[test]
    fn fact33_holds_on_solved_and_conditioned_pds() {
        let mut rng = rng_from_seed(42);
        for _ in 0..4 {
            let ds: Vec<f64> = (0..6)
                .map(|_| rand::Rng::random_range(&mut rng, 0.8..3.0))
                .collect();
            let inst = Instance::new(4, 1, ds).unwrap().normalize();
            let net = Arc::new(
                EpsNet::from_points(1, 1.0, vec![vec![-2.0], vec![0.0], vec![2.0]]).unwrap(),
            );
            let mut params = SolverParams::new(0.5, 2);
            params.trials = 4;
            params.seed = rand::Rng::random(&mut rng);
            let out = solve_mds_on_net(&inst, &params, net).unwrap();
            for trial in &out.report.trials {
                assert!(
                    trial.fact33_max_violation <= 1e-8,
                    "violation {}",
                    trial.fact33_max_violation
                );
            }
        }
    }
}
