//! Ground-truth references: the exhaustive discrete optimum over a net, a
//! smoothed gradient-descent baseline, and Gaussian-sketch dimension
//! reduction.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use statrs::function::gamma::ln_gamma;

use crate::core::{dist, num_pairs, Embedding, Instance, Provenance};
use crate::error::{Error, Result};
use crate::net::EpsNet;

pub const DEFAULT_ENUM_CAP: u128 = 10_000_000;

/// Smoothing width for the non-differentiable norm at coincident points.
pub const SMOOTHING_DELTA: f64 = 1e-6;

/// Exact minimizer of the discrete stress over all net assignments, with the
/// default enumeration cap. Ties resolve to the lexicographically least
/// assignment (point 0 most significant).
pub fn brute_force_net_opt(inst: &Instance, net: &EpsNet) -> Result<(Embedding, f64)> {
    brute_force_net_opt_capped(inst, net, DEFAULT_ENUM_CAP, false)
}

/// `symmetry`: when the net is closed under negation, enumerate only
/// assignments whose first coordinate is on the canonical side of that
/// involution. Halves the work; ties may then resolve to a reflected
/// assignment of the same value.
pub fn brute_force_net_opt_capped(
    inst: &Instance,
    net: &EpsNet,
    cap: u128,
    symmetry: bool,
) -> Result<(Embedding, f64)> {
    inst.validate()?;
    if net.k != inst.k {
        return Err(Error::DimensionMismatch(
            "net and instance disagree on k".into(),
        ));
    }
    let n = inst.n;
    let m = net.len();
    let total = (m as u128)
        .checked_pow(n as u32)
        .ok_or(Error::EnumerationCapExceeded {
            assignments: u128::MAX,
            cap,
        })?;
    if total > cap {
        return Err(Error::EnumerationCapExceeded {
            assignments: total,
            cap,
        });
    }

    // per-pair cost lookup over net point pairs
    let pairs: Vec<(usize, usize)> = inst.pairs().collect();
    let mut cost: Vec<f64> = Vec::with_capacity(pairs.len() * m * m);
    for &(i, j) in &pairs {
        let d = inst.d(i, j);
        for a in 0..m {
            for b in 0..m {
                let r = 1.0 - dist(net.point(a), net.point(b)) / d;
                cost.push(r * r);
            }
        }
    }

    let negation = if symmetry { negation_permutation(net) } else { None };

    let mut best_code: Option<Vec<usize>> = None;
    let mut best = f64::INFINITY;
    let mut assign = vec![0usize; n];
    loop {
        let admissible = match &negation {
            Some(pi) => assign[0] <= pi[assign[0]],
            None => true,
        };
        if admissible {
            let mut s = 0.0;
            for (pi, &(i, j)) in pairs.iter().enumerate() {
                s += cost[pi * m * m + assign[i] * m + assign[j]];
            }
            if s < best {
                best = s;
                best_code = Some(assign.clone());
            }
        }
        // advance, point 0 most significant: bump the last coordinate first
        let mut pos = n;
        loop {
            if pos == 0 {
                let assign = best_code.expect("nonempty enumeration");
                let points = assign.iter().map(|&a| net.point(a).to_vec()).collect();
                let emb = Embedding::new(inst.k, points, Provenance::BruteForce);
                return Ok((emb, best / num_pairs(n) as f64));
            }
            pos -= 1;
            assign[pos] += 1;
            if assign[pos] < m {
                break;
            }
            assign[pos] = 0;
        }
    }
}

/// Permutation `pi` with `net[pi[a]] = -net[a]` for every point, if one
/// exists exactly.
fn negation_permutation(net: &EpsNet) -> Option<Vec<usize>> {
    let mut pi = Vec::with_capacity(net.len());
    for a in 0..net.len() {
        let neg: Vec<f64> = net.point(a).iter().map(|v| -v).collect();
        let hit = net
            .points
            .iter()
            .position(|p| p.iter().zip(&neg).all(|(x, y)| (x - y).abs() < 1e-12))?;
        pi.push(hit);
    }
    Some(pi)
}

/// Smoothed stress `avg (1 - sqrt(|x_i - x_j|^2 + delta^2) / d_ij)^2`; the
/// true objective is non-smooth exactly at coincident points.
pub fn smoothed_stress(points: &[Vec<f64>], inst: &Instance) -> f64 {
    let mut total = 0.0;
    for (i, j) in inst.pairs() {
        let d2: f64 = points[i]
            .iter()
            .zip(&points[j])
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        let s = (d2 + SMOOTHING_DELTA * SMOOTHING_DELTA).sqrt();
        let r = 1.0 - s / inst.d(i, j);
        total += r * r;
    }
    total / num_pairs(inst.n) as f64
}

/// Gradient of [`smoothed_stress`] with respect to every coordinate.
pub fn smoothed_stress_grad(points: &[Vec<f64>], inst: &Instance) -> Vec<Vec<f64>> {
    let n = inst.n;
    let k = inst.k;
    let w = 1.0 / num_pairs(n) as f64;
    let mut grad = vec![vec![0.0; k]; n];
    for (i, j) in inst.pairs() {
        let d = inst.d(i, j);
        let d2: f64 = points[i]
            .iter()
            .zip(&points[j])
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        let s = (d2 + SMOOTHING_DELTA * SMOOTHING_DELTA).sqrt();
        // d/ds of (1 - s/d)^2 = -2 (1 - s/d) / d, then ds/dx = (x_i - x_j)/s
        let f = w * (-2.0) * (1.0 - s / d) / (d * s);
        for c in 0..k {
            let diff = points[i][c] - points[j][c];
            grad[i][c] += f * diff;
            grad[j][c] -= f * diff;
        }
    }
    grad
}

/// Gradient descent on the smoothed stress with backtracking from a fixed
/// base step; monotone per accepted step. Returns the best final embedding
/// over `restarts` random starts.
pub fn local_search_opt<R: Rng>(
    inst: &Instance,
    restarts: usize,
    steps: usize,
    rng: &mut R,
) -> Result<Embedding> {
    inst.validate()?;
    let n = inst.n;
    let k = inst.k;
    let span = inst.max_d();
    let mut best: Option<(f64, Vec<Vec<f64>>)> = None;
    for _ in 0..restarts.max(1) {
        let mut x: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..k).map(|_| rng.random_range(-span..span)).collect())
            .collect();
        let mut fx = smoothed_stress(&x, inst);
        let base_step = span;
        for _ in 0..steps {
            let g = smoothed_stress_grad(&x, inst);
            let g2: f64 = g.iter().flatten().map(|v| v * v).sum();
            if g2 < 1e-24 {
                break;
            }
            let mut step = base_step;
            let mut accepted = false;
            for _ in 0..60 {
                let cand: Vec<Vec<f64>> = x
                    .iter()
                    .zip(&g)
                    .map(|(p, gp)| p.iter().zip(gp).map(|(v, gv)| v - step * gv).collect())
                    .collect();
                let fc = smoothed_stress(&cand, inst);
                if fc < fx - 1e-4 * step * g2 {
                    x = cand;
                    fx = fc;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        if best.as_ref().is_none_or(|(bf, _)| fx < *bf) {
            best = Some((fx, x));
        }
    }
    let (_, points) = best.expect("at least one restart");
    Ok(Embedding::new(k, points, Provenance::LocalSearch))
}

/// Apply a `k_target x m` Gaussian sketch (entries `N(0, 1/k_target)`) to
/// every point.
pub fn gaussian_sketch<R: Rng>(
    points: &[Vec<f64>],
    k_target: usize,
    rng: &mut R,
) -> Vec<Vec<f64>> {
    assert!(k_target >= 1);
    let m = points.first().map_or(0, |p| p.len());
    let sd = (1.0 / k_target as f64).sqrt();
    let sketch: Vec<Vec<f64>> = (0..k_target)
        .map(|_| {
            (0..m)
                .map(|_| {
                    let z: f64 = StandardNormal.sample(rng);
                    sd * z
                })
                .collect()
        })
        .collect();
    points
        .iter()
        .map(|p| {
            sketch
                .iter()
                .map(|row| row.iter().zip(p).map(|(s, v)| s * v).sum())
                .collect()
        })
        .collect()
}

/// `E |S x|` for a unit vector under the sketch above: the mean of a
/// chi-distributed variable scaled by `1/sqrt(k)`, i.e.
/// `sqrt(2/k) * Gamma((k+1)/2) / Gamma(k/2)`. Lies in (0, 1], approaches 1
/// at rate `O(1/k)`.
pub fn chi_mean(k: usize) -> f64 {
    assert!(k >= 1);
    let kf = k as f64;
    (0.5 * (2.0 / kf).ln() + ln_gamma((kf + 1.0) / 2.0) - ln_gamma(kf / 2.0)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::kk_stress;
    use crate::rng::rng_from_seed;

    fn line_net(coords: &[f64]) -> EpsNet {
        EpsNet::from_points(1, 1.0, coords.iter().map(|&c| vec![c]).collect()).unwrap()
    }

    #[test]
    fn brute_force_two_points() {
        let inst = Instance::new(2, 1, vec![1.0]).unwrap();
        let net = line_net(&[0.0, 1.0]);
        let (emb, value) = brute_force_net_opt(&inst, &net).unwrap();
        assert_eq!(value, 0.0);
        // lexicographically least optimum is (0, 1)
        assert_eq!(emb.points, vec![vec![0.0], vec![1.0]]);
    }

    #[test]
    fn brute_force_three_points_two_slots() {
        let inst = Instance::new(3, 1, vec![1.0, 1.0, 1.0]).unwrap();
        let net = line_net(&[0.0, 1.0]);
        let (_, value) = brute_force_net_opt(&inst, &net).unwrap();
        // direct 8-case enumeration: one coincident pair is forced
        assert!((value - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn brute_force_cap() {
        let inst = Instance::new(5, 1, vec![1.0; 10]).unwrap();
        let net = line_net(&[0.0, 0.5, 1.0, 1.5]);
        assert!(matches!(
            brute_force_net_opt_capped(&inst, &net, 100, false),
            Err(Error::EnumerationCapExceeded { .. })
        ));
    }

    #[test]
    fn symmetry_reduction_matches_full_enumeration() {
        let mut rng = rng_from_seed(6);
        for _ in 0..5 {
            let ds: Vec<f64> = (0..6)
                .map(|_| rng.random_range(0.5..3.0))
                .collect();
            let inst = Instance::new(4, 1, ds).unwrap();
            let net = line_net(&[-1.5, -0.5, 0.5, 1.5]); // negation-symmetric
            let (_, full) = brute_force_net_opt(&inst, &net).unwrap();
            let (_, halved) =
                brute_force_net_opt_capped(&inst, &net, DEFAULT_ENUM_CAP, true).unwrap();
            assert!((full - halved).abs() < 1e-12);
        }
    }

    #[test]
    fn brute_force_is_permutation_equivariant() {
        let mut rng = rng_from_seed(14);
        let ds: Vec<f64> = (0..6).map(|_| rng.random_range(0.5..3.0)).collect();
        let inst = Instance::new(4, 1, ds).unwrap();
        let net = line_net(&[0.0, 1.0, 2.0]);
        let (emb, value) = brute_force_net_opt(&inst, &net).unwrap();

        // relabel via the reversal permutation
        let perm: Vec<usize> = (0..4).rev().collect();
        let mut pd = vec![0.0; 6];
        for i in 0..4 {
            for j in i + 1..4 {
                let (a, b) = (perm[i].min(perm[j]), perm[i].max(perm[j]));
                pd[crate::core::pair_index(4, a, b)] = inst.d(i, j);
            }
        }
        let pinst = Instance::new(4, 1, pd).unwrap();
        let (pemb, pvalue) = brute_force_net_opt(&pinst, &net).unwrap();
        assert!((value - pvalue).abs() < 1e-12);
        for i in 0..4 {
            assert_eq!(emb.points[i], pemb.points[perm[i]]);
        }
    }

    #[test]
    fn local_search_stays_at_global_optimum() {
        let pts: Vec<Vec<f64>> = (0..4).map(|i| vec![i as f64, 0.0]).collect();
        let inst = Instance::from_points(&pts).unwrap();
        // start exactly at the optimum: smoothed gradient is ~0, so descent
        // stays put
        let s0 = smoothed_stress(&pts, &inst);
        assert!(s0 < 1e-8);
        let g = smoothed_stress_grad(&pts, &inst);
        let gnorm: f64 = g.iter().flatten().map(|v| v * v).sum::<f64>();
        assert!(gnorm < 1e-12);
    }

    #[test]
    fn local_search_two_points_converges() {
        let inst = Instance::new(2, 1, vec![1.0]).unwrap();
        let mut rng = rng_from_seed(7);
        let emb = local_search_opt(&inst, 1, 200, &mut rng).unwrap();
        let stress = kk_stress(&emb, &inst).unwrap();
        assert!(stress < 1e-8, "stress {stress}");
    }

    #[test]
    fn local_search_descends_on_random_instances() {
        let mut rng = rng_from_seed(15);
        let ds: Vec<f64> = (0..10).map(|_| rng.random_range(0.5..4.0)).collect();
        let inst = Instance::new(5, 2, ds).unwrap();
        let emb = local_search_opt(&inst, 3, 300, &mut rng).unwrap();
        let stress = kk_stress(&emb, &inst).unwrap();
        assert!(stress < 1.0, "no descent from the coincident benchmark");
    }

    #[test]
    fn gradient_matches_central_differences() {
        let mut rng = rng_from_seed(19);
        let ds: Vec<f64> = (0..6).map(|_| rng.random_range(0.5..3.0)).collect();
        let inst = Instance::new(4, 2, ds).unwrap();
        let points: Vec<Vec<f64>> = (0..4)
            .map(|_| vec![rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)])
            .collect();
        let grad = smoothed_stress_grad(&points, &inst);
        let h = 1e-6;
        let mut max_rel = 0.0f64;
        for i in 0..4 {
            for c in 0..2 {
                let mut plus = points.clone();
                plus[i][c] += h;
                let mut minus = points.clone();
                minus[i][c] -= h;
                let fd = (smoothed_stress(&plus, &inst) - smoothed_stress(&minus, &inst))
                    / (2.0 * h);
                let rel = (grad[i][c] - fd).abs() / fd.abs().max(1e-8);
                max_rel = max_rel.max(rel);
            }
        }
        assert!(max_rel <= 1e-4, "max relative error {max_rel}");
    }

    #[test]
    fn sketch_of_zero_is_zero() {
        let mut rng = rng_from_seed(3);
        let out = gaussian_sketch(&[vec![0.0; 5]], 2, &mut rng);
        assert_eq!(out, vec![vec![0.0, 0.0]]);
    }

    #[test]
    fn chi_mean_closed_forms() {
        // k = 1: sqrt(2/pi); k = 2: sqrt(pi)/2 (Gamma(3/2) = sqrt(pi)/2)
        assert!((chi_mean(1) - (2.0 / std::f64::consts::PI).sqrt()).abs() < 1e-12);
        assert!((chi_mean(2) - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn chi_mean_rate_is_one_over_k() {
        for k in 1..=1000 {
            let v = chi_mean(k);
            assert!(v > 0.0 && v <= 1.0);
            // k * (1 - chi_mean(k)) stays bounded (limit 1/4)
            assert!(k as f64 * (1.0 - v) <= 0.5, "k = {k}");
        }
    }

    #[test]
    fn sketching_a_perfect_embedding_costs_two_over_k() {
        // for a zero-stress instance, each pair's expected sketched cost is
        // E (1 - |S x| / |x|)^2 = 1 - 2 chi_mean(k') + 1 = 2 (1 - chi_mean(k')),
        // since the sketch preserves squared norms in expectation; this is
        // the O(1/k') decay that makes sketching useful
        let mut rng = rng_from_seed(31);
        let points: Vec<Vec<f64>> = (0..10)
            .map(|_| (0..4).map(|_| rng.random_range(-3.0..3.0)).collect())
            .collect();
        let inst4 = Instance::from_points(&points).unwrap();
        for k_target in [1usize, 2] {
            let want = 2.0 * (1.0 - chi_mean(k_target));
            let sketches = 100;
            let mut acc = 0.0;
            let mut accsq = 0.0;
            for _ in 0..sketches {
                let imaged = gaussian_sketch(&points, k_target, &mut rng);
                let s = crate::core::stress_of_points(&imaged, &inst4);
                acc += s;
                accsq += s * s;
            }
            let mean = acc / sketches as f64;
            let var = (accsq / sketches as f64 - mean * mean).max(0.0);
            let se = (var / sketches as f64).sqrt();
            // measured constant C in "stress <= C / k_target"
            let measured_c = mean * k_target as f64;
            assert!(
                (mean - want).abs() <= 3.0 * se + 0.02,
                "k'={k_target}: mean {mean} vs {want} (se {se}, C {measured_c})"
            );
        }
    }

    #[test]
    fn sketch_norm_matches_chi_mean() {
        let mut rng = rng_from_seed(8);
        for k in [1usize, 2] {
            let draws = 20_000;
            let x = vec![vec![1.0, 0.0, 0.0]];
            let mut sum = 0.0;
            let mut sumsq = 0.0;
            for _ in 0..draws {
                let y = gaussian_sketch(&x, k, &mut rng);
                let norm: f64 = y[0].iter().map(|v| v * v).sum::<f64>().sqrt();
                sum += norm;
                sumsq += norm * norm;
            }
            let mean = sum / draws as f64;
            let var = sumsq / draws as f64 - mean * mean;
            let se = (var / draws as f64).sqrt();
            let want = chi_mean(k);
            assert!(
                (mean - want).abs() <= 4.0 * se,
                "k = {k}: {mean} vs {want} (se {se})"
            );
        }
    }
}
