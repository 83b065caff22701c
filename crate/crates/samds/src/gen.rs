//! Instance generators: noisy Euclidean point clouds, graph shortest-path
//! metrics, and the two adversarial layouts (two clusters, geometric line).

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::core::{dist, num_pairs, Instance};
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

const GRAPH_RETRY_CAP: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InstanceKind {
    /// Uniform points in `[0, 10]^k`; `d = true distance * (1 + u)` with `u`
    /// uniform in `[-noise, noise]`. At `noise = 0` the continuous optimum
    /// is 0.
    EuclideanNoise { n: usize, k: usize, noise: f64 },
    /// Hop distances of a connected Erdos-Renyi graph; disconnected draws are
    /// regenerated.
    GraphShortestPath { n: usize, k: usize, edge_prob: f64 },
    /// Two blocks: dissimilarity 1 inside a block, `delta` across.
    TwoCluster { n: usize, k: usize, delta: f64 },
    /// Points `x_i = 2^i` on the line, exact pairwise distances.
    GeometricLine { n: usize },
}

pub fn generate(kind: &InstanceKind, seed: u64) -> Result<Instance> {
    match *kind {
        InstanceKind::EuclideanNoise { n, k, noise } => euclidean_noise(n, k, noise, seed),
        InstanceKind::GraphShortestPath { n, k, edge_prob } => graph_metric(n, k, edge_prob, seed),
        InstanceKind::TwoCluster { n, k, delta } => two_cluster(n, k, delta),
        InstanceKind::GeometricLine { n } => geometric_line(n),
    }
}

fn euclidean_noise(n: usize, k: usize, noise: f64, seed: u64) -> Result<Instance> {
    if !(0.0..1.0).contains(&noise) {
        return Err(Error::InvalidParameter("noise must lie in [0, 1)".into()));
    }
    let mut rng = rng_from_seed(seed);
    let points: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..k).map(|_| rng.random_range(0.0..10.0)).collect())
        .collect();
    let mut d = Vec::with_capacity(num_pairs(n));
    for i in 0..n {
        for j in i + 1..n {
            let factor = if noise > 0.0 {
                1.0 + rng.random_range(-noise..noise)
            } else {
                1.0
            };
            d.push(dist(&points[i], &points[j]) * factor);
        }
    }
    Instance::new(n, k, d)
}

fn graph_metric(n: usize, k: usize, edge_prob: f64, seed: u64) -> Result<Instance> {
    if !(0.0..=1.0).contains(&edge_prob) {
        return Err(Error::InvalidParameter("edge_prob must lie in [0, 1]".into()));
    }
    let mut rng = rng_from_seed(seed);
    for _ in 0..GRAPH_RETRY_CAP {
        let mut adj = vec![Vec::new(); n];
        for i in 0..n {
            for j in i + 1..n {
                if rng.random::<f64>() < edge_prob {
                    adj[i].push(j);
                    adj[j].push(i);
                }
            }
        }
        if let Some(d) = all_pairs_hops(&adj) {
            return Instance::new(n, k, d);
        }
    }
    Err(Error::DisconnectedGraph {
        tries: GRAPH_RETRY_CAP,
    })
}

/// BFS hop counts for every pair; `None` when the graph is disconnected.
fn all_pairs_hops(adj: &[Vec<usize>]) -> Option<Vec<f64>> {
    let n = adj.len();
    let mut d = vec![0.0; num_pairs(n)];
    for start in 0..n {
        let mut hops = vec![usize::MAX; n];
        hops[start] = 0;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if hops[v] == usize::MAX {
                    hops[v] = hops[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        for j in start + 1..n {
            if hops[j] == usize::MAX {
                return None;
            }
            d[crate::core::pair_index(n, start, j)] = hops[j] as f64;
        }
    }
    Some(d)
}

fn two_cluster(n: usize, k: usize, delta: f64) -> Result<Instance> {
    if delta < 1.0 {
        return Err(Error::InvalidParameter("delta must be >= 1".into()));
    }
    let half = n.div_ceil(2);
    let mut d = Vec::with_capacity(num_pairs(n));
    for i in 0..n {
        for j in i + 1..n {
            let same = (i < half) == (j < half);
            d.push(if same { 1.0 } else { delta });
        }
    }
    Instance::new(n, k, d)
}

fn geometric_line(n: usize) -> Result<Instance> {
    if n > 50 {
        return Err(Error::InvalidParameter(
            "geometric line overflows past n = 50".into(),
        ));
    }
    let mut d = Vec::with_capacity(num_pairs(n));
    for i in 0..n {
        for j in i + 1..n {
            d.push(((2.0f64).powi(j as i32) - (2.0f64).powi(i as i32)).abs());
        }
    }
    Instance::new(n, 1, d)
}

/// The point layout `x_i = 2^i` itself, for checks that want coordinates.
pub fn geometric_line_points(n: usize) -> Vec<Vec<f64>> {
    (0..n).map(|i| vec![(2.0f64).powi(i as i32)]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::{kk_stress, stress_of_points, Embedding, Provenance};

    #[test]
    fn noiseless_euclidean_instances_embed_exactly() {
        let inst = generate(&InstanceKind::EuclideanNoise { n: 6, k: 2, noise: 0.0 }, 3).unwrap();
        // rebuild the generating points and check zero stress
        let mut rng = rng_from_seed(3);
        let points: Vec<Vec<f64>> = (0..6)
            .map(|_| (0..2).map(|_| rng.random_range(0.0..10.0)).collect())
            .collect();
        assert!(stress_of_points(&points, &inst) < 1e-24);
    }

    #[test]
    fn noisy_euclidean_instances_stay_positive() {
        let inst =
            generate(&InstanceKind::EuclideanNoise { n: 8, k: 1, noise: 0.5 }, 9).unwrap();
        assert!(inst.d.iter().all(|&v| v > 0.0));
    }

    #[test]
    fn graph_metric_is_connected_hop_counts() {
        let inst =
            generate(&InstanceKind::GraphShortestPath { n: 8, k: 2, edge_prob: 0.4 }, 7).unwrap();
        assert!(inst.min_d() >= 1.0);
        assert!(inst.d.iter().all(|&v| v.fract() == 0.0));
    }

    #[test]
    fn two_cluster_matches_its_spec() {
        let inst = generate(&InstanceKind::TwoCluster { n: 6, k: 1, delta: 8.0 }, 0).unwrap();
        for i in 0..6 {
            for j in i + 1..6 {
                let same = (i < 3) == (j < 3);
                assert_eq!(inst.d(i, j), if same { 1.0 } else { 8.0 });
            }
        }
        assert_eq!(inst.aspect_ratio(), 8.0);
    }

    #[test]
    fn geometric_line_aspect_ratio() {
        let inst = generate(&InstanceKind::GeometricLine { n: 8 }, 0).unwrap();
        // min gap 2^1 - 2^0 = 1, max 2^7 - 2^0 = 127
        assert_eq!(inst.min_d(), 1.0);
        assert_eq!(inst.aspect_ratio(), 127.0);
        // the generating layout achieves zero stress
        let emb = Embedding::new(1, geometric_line_points(8), Provenance::LocalSearch);
        assert!(kk_stress(&emb, &inst).unwrap() < 1e-24);
    }

    #[test]
    fn generators_are_deterministic_per_seed() {
        let kind = InstanceKind::GraphShortestPath { n: 7, k: 1, edge_prob: 0.5 };
        assert_eq!(generate(&kind, 11).unwrap(), generate(&kind, 11).unwrap());
        let kind = InstanceKind::EuclideanNoise { n: 5, k: 2, noise: 0.3 };
        assert_eq!(generate(&kind, 4).unwrap(), generate(&kind, 4).unwrap());
    }
}
