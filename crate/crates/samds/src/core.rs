//! Dissimilarity instances, embeddings, and the Kamada-Kawai stress objective.
//!
//! Stress is always the average over unordered pairs `i < j` of
//! `(1 - ||x_i - x_j|| / d_ij)^2`, so it lies in `[0, 1]` for any instance
//! (placing every point at the same location scores exactly 1).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Squared Euclidean distance between two coordinate slices.
pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Euclidean distance between two coordinate slices.
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    dist2(a, b).sqrt()
}

pub fn num_pairs(n: usize) -> usize {
    n * (n - 1) / 2
}

/// Position of unordered pair `(i, j)` in row-major upper-triangular order.
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

/// A symmetric dissimilarity instance: `n` objects, target dimension `k`, and
/// one positive dissimilarity per unordered pair, stored row-major
/// upper-triangular: `(0,1), (0,2), ..., (0,n-1), (1,2), ...`.
///
/// Dissimilarities are not required to satisfy the triangle inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub n: usize,
    pub k: usize,
    pub d: Vec<f64>,
}

impl Instance {
    pub fn new(n: usize, k: usize, d: Vec<f64>) -> Result<Self> {
        let inst = Instance { n, k, d };
        inst.validate()?;
        Ok(inst)
    }

    /// Instance whose dissimilarities are the exact pairwise distances of
    /// `points`; its optimal stress in dimension `k = points[0].len()` is 0.
    pub fn from_points(points: &[Vec<f64>]) -> Result<Self> {
        let n = points.len();
        if n < 2 {
            return Err(Error::InvalidInstance("need at least 2 points".into()));
        }
        let k = points[0].len();
        let mut d = Vec::with_capacity(num_pairs(n));
        for i in 0..n {
            for j in i + 1..n {
                d.push(dist(&points[i], &points[j]));
            }
        }
        Instance::new(n, k, d)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidInstance("need n >= 2 objects".into()));
        }
        if self.k < 1 {
            return Err(Error::InvalidInstance("target dimension must be >= 1".into()));
        }
        if self.d.len() != num_pairs(self.n) {
            return Err(Error::InvalidInstance(format!(
                "expected {} dissimilarities for n = {}, got {}",
                num_pairs(self.n),
                self.n,
                self.d.len()
            )));
        }
        if !self.d.iter().all(|v| v.is_finite() && *v > 0.0) {
            return Err(Error::InvalidInstance(
                "dissimilarities must be finite and > 0".into(),
            ));
        }
        Ok(())
    }

    /// Dissimilarity between objects `i` and `j` (`i != j`).
    pub fn d(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        self.d[pair_index(self.n, i, j)]
    }

    /// All unordered pairs `(i, j)` with `i < j`, in storage order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.n;
        (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
    }

    pub fn min_d(&self) -> f64 {
        self.d.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max_d(&self) -> f64 {
        self.d.iter().cloned().fold(0.0, f64::max)
    }

    pub fn is_normalized(&self) -> bool {
        (self.min_d() - 1.0).abs() <= 1e-12
    }

    /// Rescaled copy with `min d = 1`. Stress is invariant when the embedding
    /// is rescaled by the same factor, and the aspect ratio is unchanged.
    pub fn normalize(&self) -> Instance {
        let m = self.min_d();
        Instance {
            n: self.n,
            k: self.k,
            d: self.d.iter().map(|v| v / m).collect(),
        }
    }

    /// Aspect ratio `max d / min d`; always >= 1.
    pub fn aspect_ratio(&self) -> f64 {
        self.max_d() / self.min_d()
    }

    pub fn to_json_file<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text + "\n")?;
        Ok(())
    }

    pub fn from_json_file<P: AsRef<Path>>(path: P) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let inst: Instance = serde_json::from_str(&text)?;
        inst.validate()?;
        Ok(inst)
    }
}

/// How an embedding was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Rounded,
    BruteForce,
    LocalSearch,
    Discretized,
}

/// `n` points in `R^k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Embedding {
    pub k: usize,
    pub points: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

impl Embedding {
    pub fn new(k: usize, points: Vec<Vec<f64>>, provenance: Provenance) -> Self {
        Embedding {
            k,
            points,
            provenance: Some(provenance),
        }
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    /// Copy with every coordinate multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Embedding {
        Embedding {
            k: self.k,
            points: self
                .points
                .iter()
                .map(|p| p.iter().map(|v| v * s).collect())
                .collect(),
            provenance: self.provenance,
        }
    }

    pub fn to_json_file<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text + "\n")?;
        Ok(())
    }

    pub fn from_json_file<P: AsRef<Path>>(path: P) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Kamada-Kawai stress of `emb` against `inst`: the unordered-pair average of
/// `(1 - ||x_i - x_j|| / d_ij)^2`.
pub fn kk_stress(emb: &Embedding, inst: &Instance) -> Result<f64> {
    if emb.n() != inst.n {
        return Err(Error::DimensionMismatch(format!(
            "embedding has {} points, instance has {}",
            emb.n(),
            inst.n
        )));
    }
    if emb.k != inst.k || emb.points.iter().any(|p| p.len() != inst.k) {
        return Err(Error::DimensionMismatch(format!(
            "embedding dimension {} does not match instance k = {}",
            emb.k, inst.k
        )));
    }
    let mut total = 0.0;
    for (i, j) in inst.pairs() {
        let r = 1.0 - dist(emb.point(i), emb.point(j)) / inst.d(i, j);
        total += r * r;
    }
    Ok(total / num_pairs(inst.n) as f64)
}

/// Stress of raw coordinate rows against `inst`, bypassing `Embedding`.
pub fn stress_of_points(points: &[Vec<f64>], inst: &Instance) -> f64 {
    let mut total = 0.0;
    for (i, j) in inst.pairs() {
        let r = 1.0 - dist(&points[i], &points[j]) / inst.d(i, j);
        total += r * r;
    }
    total / num_pairs(inst.n) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn line_instance() -> Instance {
        // x_i = i on the line, exact distances
        Instance::from_points(&[vec![0.0], vec![1.0], vec![2.0], vec![3.0]]).unwrap()
    }

    #[test]
    fn coincident_embedding_scores_one() {
        let inst = line_instance();
        let emb = Embedding::new(1, vec![vec![5.0]; 4], Provenance::LocalSearch);
        assert_eq!(kk_stress(&emb, &inst).unwrap(), 1.0);
    }

    #[test]
    fn perfect_embedding_scores_zero() {
        let inst = line_instance();
        let emb = Embedding::new(
            1,
            vec![vec![0.0], vec![1.0], vec![2.0], vec![3.0]],
            Provenance::LocalSearch,
        );
        assert!(kk_stress(&emb, &inst).unwrap().abs() < 1e-15);
    }

    #[test]
    fn two_points_at_double_distance() {
        let inst = Instance::new(2, 1, vec![1.0]).unwrap();
        let emb = Embedding::new(1, vec![vec![0.0], vec![2.0]], Provenance::LocalSearch);
        assert_eq!(kk_stress(&emb, &inst).unwrap(), 1.0);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let inst = line_instance();
        let emb = Embedding::new(2, vec![vec![0.0, 0.0]; 4], Provenance::LocalSearch);
        assert!(matches!(
            kk_stress(&emb, &inst),
            Err(Error::DimensionMismatch(_))
        ));
        let short = Embedding::new(1, vec![vec![0.0]; 3], Provenance::LocalSearch);
        assert!(kk_stress(&short, &inst).is_err());
    }

    #[test]
    fn aspect_ratio_examples() {
        let all_equal = Instance::new(3, 1, vec![2.0, 2.0, 2.0]).unwrap();
        assert_eq!(all_equal.aspect_ratio(), 1.0);
        let two = Instance::new(3, 1, vec![1.0, 5.0, 1.0]).unwrap();
        assert_eq!(two.aspect_ratio(), 5.0);
        let three = Instance::new(3, 1, vec![2.0, 3.0, 8.0]).unwrap();
        assert_eq!(three.aspect_ratio(), 4.0);
    }

    #[test]
    fn normalize_examples() {
        let inst = Instance::new(2, 1, vec![2.0]).unwrap();
        // single-pair case plus the {2,4} example
        let pair = Instance::new(3, 1, vec![2.0, 4.0, 2.0]).unwrap().normalize();
        assert_eq!(pair.d, vec![1.0, 2.0, 1.0]);
        assert!(inst.normalize().is_normalized());

        let already = Instance::new(3, 1, vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(already.normalize(), already);

        let frac = Instance::new(2, 1, vec![0.5]).unwrap();
        let frac3 = Instance::new(3, 1, vec![0.5, 1.5, 0.5]).unwrap().normalize();
        assert_eq!(frac3.d, vec![1.0, 3.0, 1.0]);
        assert!(frac.normalize().is_normalized());
    }

    #[test]
    fn normalize_preserves_aspect_ratio() {
        let inst = Instance::new(3, 1, vec![0.5, 4.0, 2.0]).unwrap();
        let norm = inst.normalize();
        assert!((norm.aspect_ratio() - inst.aspect_ratio()).abs() < 1e-12);
        assert!(norm.is_normalized());
    }

    #[test]
    fn pair_index_roundtrip() {
        let n = 7;
        let mut seen = vec![false; num_pairs(n)];
        for i in 0..n {
            for j in i + 1..n {
                let idx = pair_index(n, i, j);
                assert!(!seen[idx]);
                seen[idx] = true;
            }
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn invalid_instances_are_rejected() {
        assert!(Instance::new(3, 1, vec![1.0, 2.0]).is_err());
        assert!(Instance::new(3, 1, vec![1.0, -2.0, 1.0]).is_err());
        assert!(Instance::new(3, 0, vec![1.0, 2.0, 1.0]).is_err());
        assert!(Instance::new(1, 1, vec![]).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn stress_nonnegative_and_permutation_invariant(
            coords in proptest::collection::vec(-10.0f64..10.0, 10),
            ds in proptest::collection::vec(0.1f64..10.0, 10),
        ) {
            let n = 5;
            let points: Vec<Vec<f64>> = coords.chunks(2).map(|c| c.to_vec()).collect();
            let inst = Instance::new(n, 2, ds.clone()).unwrap();
            let emb = Embedding::new(2, points.clone(), Provenance::LocalSearch);
            let s = kk_stress(&emb, &inst).unwrap();
            prop_assert!(s >= 0.0);

            // reverse the labels
            let perm: Vec<usize> = (0..n).rev().collect();
            let mut pd = vec![0.0; num_pairs(n)];
            for i in 0..n {
                for j in i + 1..n {
                    let (pi, pj) = (perm[i].min(perm[j]), perm[i].max(perm[j]));
                    pd[pair_index(n, pi, pj)] = inst.d(i, j);
                }
            }
            let pinst = Instance::new(n, 2, pd).unwrap();
            let mut ppoints = vec![vec![]; n];
            for i in 0..n {
                ppoints[perm[i]] = points[i].clone();
            }
            let pemb = Embedding::new(2, ppoints, Provenance::LocalSearch);
            let ps = kk_stress(&pemb, &pinst).unwrap();
            prop_assert!((s - ps).abs() <= 1e-12);
        }

        #[test]
        fn stress_invariant_under_rigid_motion(
            coords in proptest::collection::vec(-10.0f64..10.0, 10),
            ds in proptest::collection::vec(0.1f64..10.0, 10),
            angle in 0.0f64..std::f64::consts::TAU,
            tx in -5.0f64..5.0,
            ty in -5.0f64..5.0,
            reflect in proptest::bool::ANY,
        ) {
            let points: Vec<Vec<f64>> = coords.chunks(2).map(|c| c.to_vec()).collect();
            let inst = Instance::new(5, 2, ds).unwrap();
            let emb = Embedding::new(2, points.clone(), Provenance::LocalSearch);
            let s = kk_stress(&emb, &inst).unwrap();

            let (c, sn) = (angle.cos(), angle.sin());
            let moved: Vec<Vec<f64>> = points
                .iter()
                .map(|p| {
                    let x = if reflect { -p[0] } else { p[0] };
                    vec![c * x - sn * p[1] + tx, sn * x + c * p[1] + ty]
                })
                .collect();
            let memb = Embedding::new(2, moved, Provenance::LocalSearch);
            let ms = kk_stress(&memb, &inst).unwrap();
            prop_assert!((s - ms).abs() <= 1e-9);
        }

        #[test]
        fn stress_invariant_under_normalization(
            coords in proptest::collection::vec(-10.0f64..10.0, 5),
            ds in proptest::collection::vec(0.1f64..10.0, 10),
        ) {
            let points: Vec<Vec<f64>> = coords.iter().map(|&c| vec![c]).collect();
            let inst = Instance::new(5, 1, ds).unwrap();
            let emb = Embedding::new(1, points, Provenance::LocalSearch);
            let s = kk_stress(&emb, &inst).unwrap();
            let scaled = emb.scaled(1.0 / inst.min_d());
            let ns = kk_stress(&scaled, &inst.normalize()).unwrap();
            prop_assert!((s - ns).abs() <= 1e-9);
        }
    }
}
