//! Executable property checks for the geometric inequalities behind the
//! rounding analysis: quantiles of pairwise distances, distortion statistics
//! of optimizers, and conditioning-driven deviation reduction.
//!
//! Each check measures concrete counts or fractions and reports them next to
//! the bound it was run against; hidden constants from asymptotic statements
//! are exposed as parameters with defaults read off the printed proofs.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::core::{dist, num_pairs, Embedding, Instance};
use crate::error::{Error, Result};
use crate::sa::PseudoDistribution;

/// The `ceil(q * |values|)`-th least element (clamped to the first), for
/// `q` in (0, 1].
pub fn quantile(values: &[f64], q: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::InvalidParameter("quantile of an empty set".into()));
    }
    if !(q > 0.0 && q <= 1.0) {
        return Err(Error::InvalidParameter("quantile parameter must lie in (0, 1]".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let rank = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    Ok(sorted[rank - 1])
}

fn quantile_of_sorted(sorted: &[f64], q: f64) -> f64 {
    let rank = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    sorted[rank - 1]
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct QuantileLemmaConfig {
    /// Multiplier on `(eta / delta)^(1/k)`; the printed proof carries 4.
    pub c: f64,
    /// Multiplier on `delta * log2(aspect)` in the reported bound.
    pub c_prime: f64,
}

impl Default for QuantileLemmaConfig {
    fn default() -> Self {
        QuantileLemmaConfig { c: 4.0, c_prime: 8.0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuantileLemmaReport {
    pub eta: f64,
    pub delta: f64,
    /// Pairs at distance >= 1 whose quantile sum exceeds
    /// `c * (eta/delta)^(1/k) * distance`, as a fraction of all pairs.
    pub violating_fraction: f64,
    pub worst_ratio: f64,
    /// Pairs at distance < 1: outside the lemma's hypothesis, counted apart.
    pub excluded_pairs: usize,
    /// `c_prime * delta * log2(max(aspect, 2))` with the measured max
    /// pairwise distance as the aspect.
    pub bound: f64,
}

/// Count pairs whose eta-quantile neighborhoods fail to shrink against the
/// pair distance.
pub fn check_quantile_lemma(
    points: &[Vec<f64>],
    eta: f64,
    delta: f64,
    cfg: QuantileLemmaConfig,
) -> Result<QuantileLemmaReport> {
    let n = points.len();
    if n < 2 {
        return Err(Error::InvalidParameter("need at least two points".into()));
    }
    let k = points[0].len();
    // per-index sorted distance multisets (self included, matching the
    // quantile convention over {|x_i - x_l|}_{l in [n]})
    let mut sorted: Vec<Vec<f64>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut row: Vec<f64> = (0..n).map(|l| dist(&points[i], &points[l])).collect();
        row.sort_by(|a, b| a.partial_cmp(b).unwrap());
        sorted.push(row);
    }
    let q: Vec<f64> = (0..n).map(|i| quantile_of_sorted(&sorted[i], eta)).collect();

    let shrink = cfg.c * (eta / delta).powf(1.0 / k as f64);
    let mut violations = 0usize;
    let mut excluded = 0usize;
    let mut worst = 0.0f64;
    let mut max_dist = 0.0f64;
    for i in 0..n {
        for j in i + 1..n {
            let d = dist(&points[i], &points[j]);
            max_dist = max_dist.max(d);
            if d < 1.0 {
                excluded += 1;
                continue;
            }
            let ratio = (q[i] + q[j]) / d;
            worst = worst.max(ratio);
            if ratio > shrink {
                violations += 1;
            }
        }
    }
    let pairs = num_pairs(n) as f64;
    Ok(QuantileLemmaReport {
        eta,
        delta,
        violating_fraction: violations as f64 / pairs,
        worst_ratio: worst,
        excluded_pairs: excluded,
        bound: cfg.c_prime * delta * max_dist.max(2.0).log2(),
    })
}

/// Fraction of pairs `(i, j)` where some endpoint has no third point within
/// `ratio * |x_i - x_j|`. Geometric sequences keep this fraction large no
/// matter how many points there are, which is why a `log(aspect)` discard is
/// unavoidable in the quantile lemma.
pub fn no_witness_fraction(points: &[Vec<f64>], ratio: f64) -> f64 {
    let n = points.len();
    let mut count = 0usize;
    for i in 0..n {
        for j in i + 1..n {
            let d = dist(&points[i], &points[j]);
            let isolated = |e: usize| {
                (0..n)
                    .filter(|&l| l != i && l != j)
                    .all(|l| dist(&points[e], &points[l]) > ratio * d)
            };
            if isolated(i) || isolated(j) {
                count += 1;
            }
        }
    }
    count as f64 / num_pairs(n) as f64
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TypicalDistortionReport {
    pub c: f64,
    pub opt_stress: f64,
    /// Pairs violating `(1-2 sqrt(c)) |x*_i-x*_j|^2 <= d^2 <= (1+2 sqrt(c)) |x*_i-x*_j|^2`.
    pub input_vs_opt: usize,
    /// Pairs violating `(1-2 sqrt(c)) |x*| <= pE |x_i-x_j| <= (1+2 sqrt(c)) |x*|`.
    pub pe_vs_opt: usize,
    /// Pairs violating `(1-2 sqrt(c)) d^2 <= pE |x_i-x_j|^2 <= (2+2c) d^2`.
    pub pe_sq_vs_input: usize,
    /// `(opt_stress / c) * C(n,2)`: the per-display budget the counts are
    /// measured against (the middle display unions two events of this size).
    pub budget: f64,
}

/// Count pairs where the relaxation's distances and the reference optimum
/// disagree beyond the `c`-level thresholds.
pub fn check_typical_distortion(
    inst: &Instance,
    opt_emb: &Embedding,
    pd: &PseudoDistribution,
    c: f64,
) -> Result<TypicalDistortionReport> {
    if !(c > 0.0 && c < 0.25) {
        return Err(Error::InvalidParameter("c must lie in (0, 1/4)".into()));
    }
    let s = crate::core::kk_stress(opt_emb, inst)?;
    let lo = 1.0 - 2.0 * c.sqrt();
    let hi = 1.0 + 2.0 * c.sqrt();
    let mut input_vs_opt = 0usize;
    let mut pe_vs_opt = 0usize;
    let mut pe_sq_vs_input = 0usize;
    for (i, j) in inst.pairs() {
        let d = inst.d(i, j);
        let opt_d = dist(opt_emb.point(i), opt_emb.point(j));
        let pe_d = pd.pe(&[i.min(j), j.max(i)], |vals| {
            dist(pd.net.point(vals[0]), pd.net.point(vals[1]))
        })?;
        let pe_d2 = pd.pe_dist2(i, j)?;

        if d * d < lo * opt_d * opt_d || d * d > hi * opt_d * opt_d {
            input_vs_opt += 1;
        }
        if pe_d < lo * opt_d || pe_d > hi * opt_d {
            pe_vs_opt += 1;
        }
        if pe_d2 < lo * d * d || pe_d2 > (2.0 + 2.0 * c) * d * d {
            pe_sq_vs_input += 1;
        }
    }
    Ok(TypicalDistortionReport {
        c,
        opt_stress: s,
        input_vs_opt,
        pe_vs_opt,
        pe_sq_vs_input,
        budget: s / c * num_pairs(inst.n) as f64,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DeviationReductionReport {
    pub eps: f64,
    pub delta: f64,
    /// Conditioning size `ceil(ln(1/delta) / eps)` used per draw.
    pub tau_cond: usize,
    pub trials: usize,
    /// Per variable: fraction of conditioning-set draws whose estimated mean
    /// squared deviation exceeded the eps-quantile bound.
    pub fail_rate: Vec<f64>,
    /// Variables whose fail rate exceeds `delta` plus 3 binomial standard
    /// errors.
    pub failing_variables: usize,
    pub fraction_failing: f64,
}

/// Empirical check that conditioning on a random `tau_cond`-set drives the
/// squared pseudo-deviation of each variable below the eps-quantile of its
/// pseudo-expected squared distances, for all but a `delta` fraction of
/// conditioning sets.
pub fn check_deviation_reduction<R: Rng>(
    pd: &PseudoDistribution,
    eps: f64,
    delta: f64,
    trials: usize,
    inner_draws: usize,
    rng: &mut R,
) -> Result<DeviationReductionReport> {
    if !(eps > 0.0 && eps <= 1.0) || !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter("need eps in (0,1], delta in (0,1)".into()));
    }
    let n = pd.n();
    let tau_cond = ((1.0 / delta).ln() / eps).ceil().max(1.0) as usize;
    if tau_cond > n {
        return Err(Error::InvalidParameter(format!(
            "conditioning size {tau_cond} exceeds n = {n}"
        )));
    }

    // quantile bounds from the unconditioned pseudo-distribution
    let mut bounds = Vec::with_capacity(n);
    for i in 0..n {
        let mut vals = Vec::with_capacity(n);
        for j in 0..n {
            vals.push(if i == j { 0.0 } else { pd.pe_dist2(i, j)? });
        }
        bounds.push(quantile(&vals, eps)?);
    }

    let mut fails = vec![0usize; n];
    for _ in 0..trials {
        let t_set = crate::rng::sample_distinct(rng, n, tau_cond);
        // estimate E over the local draw of pdev^2, per variable
        let mut means = vec![0.0f64; n];
        let mut sq = vec![0.0f64; n];
        for _ in 0..inner_draws {
            let assignment = pd.sample_local(&t_set, rng)?;
            let zeta: std::collections::BTreeMap<usize, usize> =
                t_set.iter().cloned().zip(assignment).collect();
            let cond = pd.condition(&zeta)?;
            for i in 0..n {
                let p = cond.pdev(i)?;
                means[i] += p * p;
                sq[i] += p * p * p * p;
            }
        }
        for i in 0..n {
            let mean = means[i] / inner_draws as f64;
            let var = (sq[i] / inner_draws as f64 - mean * mean).max(0.0);
            let se = (var / inner_draws as f64).sqrt();
            if mean > bounds[i] + 3.0 * se {
                fails[i] += 1;
            }
        }
    }
    let fail_rate: Vec<f64> = fails.iter().map(|&f| f as f64 / trials as f64).collect();
    let slack = 3.0 * (delta * (1.0 - delta) / trials as f64).sqrt();
    let failing = fail_rate.iter().filter(|&&r| r > delta + slack).count();
    Ok(DeviationReductionReport {
        eps,
        delta,
        tau_cond,
        trials,
        fail_rate,
        failing_variables: failing,
        fraction_failing: failing as f64 / n as f64,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TranslatingQuantilesReport {
    pub eps: f64,
    pub opt_stress: f64,
    /// Indices where the eps-quantile of pseudo-expected squared distances
    /// exceeds 10x the widened quantile of the optimizer's squared distances.
    pub violating_indices: usize,
    pub violating_fraction: f64,
    /// `sqrt(opt_stress) + eps`: the fraction budget.
    pub budget: f64,
}

/// Per-index comparison of relaxation distance quantiles against quantiles of
/// a reference optimal embedding.
pub fn check_translating_quantiles(
    pd: &PseudoDistribution,
    opt_emb: &Embedding,
    inst: &Instance,
    eps: f64,
) -> Result<TranslatingQuantilesReport> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidParameter("eps must lie in (0, 1]".into()));
    }
    let n = inst.n;
    let s = crate::core::kk_stress(opt_emb, inst)?;
    let widened = (16.0 * s.sqrt() + eps).min(1.0);
    let mut violations = 0usize;
    for i in 0..n {
        let mut pe_sq = Vec::with_capacity(n);
        let mut opt_sq = Vec::with_capacity(n);
        for j in 0..n {
            pe_sq.push(if i == j { 0.0 } else { pd.pe_dist2(i, j)? });
            let od = dist(opt_emb.point(i), opt_emb.point(j));
            opt_sq.push(od * od);
        }
        let lhs = quantile(&pe_sq, eps)?;
        let rhs = 10.0 * quantile(&opt_sq, widened)?;
        if lhs > rhs {
            violations += 1;
        }
    }
    Ok(TranslatingQuantilesReport {
        eps,
        opt_stress: s,
        violating_indices: violations,
        violating_fraction: violations as f64 / n as f64,
        budget: s.sqrt() + eps,
    })
}
