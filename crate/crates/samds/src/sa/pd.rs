//! Pseudo-distributions: families of consistent local probability tables over
//! net assignments, with marginalization, pseudo-expectation, conditioning,
//! and sampling.
//!
//! A table for subset `T` is a dense array over net assignments of `T`,
//! indexed mixed-radix with the sorted subset order as digits (position 0 is
//! the least significant digit). Conditioning on an assignment `zeta` follows
//! the local-distribution rule: the residual table on `T \ zeta` is the table
//! on `T` restricted to the event, so only subsets containing all of `zeta`
//! contribute, and the degree drops by `|zeta|`. Conditioned variables are
//! carried along as exact point masses.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::core::{dist, Instance};
use crate::error::{Error, Result};
use crate::net::EpsNet;
use crate::sa::family::SubsetFamily;

/// Smallest event probability conditioning accepts.
pub const MIN_CONDITION_PROB: f64 = 1e-9;

/// A conditioning event `{x_v = net point a_v}` for a set of variables.
pub type Conditioning = BTreeMap<usize, usize>;

#[derive(Debug, Clone)]
pub struct PseudoDistribution {
    pub net: Arc<EpsNet>,
    pub family: SubsetFamily,
    /// One probability table per family subset.
    pub tables: Vec<Vec<f64>>,
    /// Variables pinned by conditioning, as exact net indices.
    pub fixed: Conditioning,
}

fn decode(mut idx: usize, len: usize, m: usize, out: &mut Vec<usize>) {
    out.clear();
    for _ in 0..len {
        out.push(idx % m);
        idx /= m;
    }
}

impl PseudoDistribution {
    pub fn from_tables(
        net: Arc<EpsNet>,
        family: SubsetFamily,
        tables: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if tables.len() != family.subsets.len() {
            return Err(Error::InvalidParameter(
                "one table per family subset required".into(),
            ));
        }
        let m = net.len();
        for (s, t) in family.subsets.iter().zip(&tables) {
            if t.len() != m.pow(s.len() as u32) {
                return Err(Error::InvalidParameter(format!(
                    "table for {s:?} has wrong size {}",
                    t.len()
                )));
            }
        }
        Ok(PseudoDistribution {
            net,
            family,
            tables,
            fixed: BTreeMap::new(),
        })
    }

    /// Point mass on one full assignment (net index per variable).
    pub fn point_mass(net: Arc<EpsNet>, family: SubsetFamily, assignment: &[usize]) -> Self {
        let m = net.len();
        let tables = family
            .subsets
            .iter()
            .map(|s| {
                let mut t = vec![0.0; m.pow(s.len() as u32)];
                let mut idx = 0;
                let mut stride = 1;
                for &v in s {
                    idx += assignment[v] * stride;
                    stride *= m;
                }
                t[idx] = 1.0;
                t
            })
            .collect();
        PseudoDistribution {
            net,
            family,
            tables,
            fixed: BTreeMap::new(),
        }
    }

    /// Uniform mixture of full assignments; handy for mixtures like the
    /// two-cluster fixture.
    pub fn mixture(net: Arc<EpsNet>, family: SubsetFamily, assignments: &[Vec<usize>]) -> Self {
        let m = net.len();
        let w = 1.0 / assignments.len() as f64;
        let tables = family
            .subsets
            .iter()
            .map(|s| {
                let mut t = vec![0.0; m.pow(s.len() as u32)];
                for a in assignments {
                    let mut idx = 0;
                    let mut stride = 1;
                    for &v in s {
                        idx += a[v] * stride;
                        stride *= m;
                    }
                    t[idx] += w;
                }
                t
            })
            .collect();
        PseudoDistribution {
            net,
            family,
            tables,
            fixed: BTreeMap::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.family.n
    }

    pub fn m(&self) -> usize {
        self.net.len()
    }

    /// Max deviation of any table sum from 1.
    pub fn sum_residual(&self) -> f64 {
        self.tables
            .iter()
            .map(|t| (t.iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Marginal of table `si` onto `keep` (subset of its variables, sorted).
    pub fn marginal_of_table(&self, si: usize, keep: &[usize]) -> Vec<f64> {
        let s = &self.family.subsets[si];
        let m = self.m();
        let keep_pos: Vec<usize> = keep
            .iter()
            .map(|v| s.iter().position(|w| w == v).expect("keep must be inside the subset"))
            .collect();
        let mut out = vec![0.0; m.pow(keep.len() as u32)];
        let mut digits = Vec::with_capacity(s.len());
        for (idx, &p) in self.tables[si].iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            decode(idx, s.len(), m, &mut digits);
            let mut out_idx = 0;
            let mut stride = 1;
            for &pos in &keep_pos {
                out_idx += digits[pos] * stride;
                stride *= m;
            }
            out[out_idx] += p;
        }
        out
    }

    /// Max entrywise disagreement of marginals over every pair of family
    /// subsets with nonempty intersection (exhaustive).
    pub fn consistency_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        let subsets = &self.family.subsets;
        for p in 0..subsets.len() {
            for q in p + 1..subsets.len() {
                let inter: Vec<usize> = subsets[p]
                    .iter()
                    .filter(|v| subsets[q].binary_search(v).is_ok())
                    .cloned()
                    .collect();
                if inter.is_empty() {
                    continue;
                }
                let a = self.marginal_of_table(p, &inter);
                let b = self.marginal_of_table(q, &inter);
                for (x, y) in a.iter().zip(&b) {
                    worst = worst.max((x - y).abs());
                }
            }
        }
        worst
    }

    /// Marginal over free (unconditioned) variables `vars` (sorted,
    /// distinct), read from the lowest-index covering subset.
    pub fn marginal(&self, vars: &[usize]) -> Result<Vec<f64>> {
        debug_assert!(vars.windows(2).all(|w| w[0] < w[1]));
        if vars.iter().any(|v| self.fixed.contains_key(v)) {
            return Err(Error::InvalidParameter(
                "marginal over conditioned variables".into(),
            ));
        }
        let si = self
            .family
            .covering_subset(vars)
            .ok_or_else(|| Error::NotCovered {
                subset: vars.to_vec(),
            })?;
        Ok(self.marginal_of_table(si, vars))
    }

    /// Pseudo-expectation of `f` over `vars` (sorted, distinct). `f` receives
    /// net indices aligned with `vars`; conditioned variables contribute
    /// their pinned values.
    pub fn pe<F: Fn(&[usize]) -> f64>(&self, vars: &[usize], f: F) -> Result<f64> {
        let free: Vec<usize> = vars
            .iter()
            .filter(|v| !self.fixed.contains_key(v))
            .cloned()
            .collect();
        let mut values: Vec<usize> = vars
            .iter()
            .map(|v| self.fixed.get(v).cloned().unwrap_or(0))
            .collect();
        if free.is_empty() {
            return Ok(f(&values));
        }
        let table = self.marginal(&free)?;
        let m = self.m();
        let free_slots: Vec<usize> = vars
            .iter()
            .enumerate()
            .filter(|(_, v)| !self.fixed.contains_key(v))
            .map(|(slot, _)| slot)
            .collect();
        let mut digits = Vec::with_capacity(free.len());
        let mut acc = 0.0;
        for (idx, &p) in table.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            decode(idx, free.len(), m, &mut digits);
            for (rank, &slot) in free_slots.iter().enumerate() {
                values[slot] = digits[rank];
            }
            acc += p * f(&values);
        }
        Ok(acc)
    }

    /// Pseudo-expected position of variable `i` in `R^k`.
    pub fn pe_position(&self, i: usize) -> Result<Vec<f64>> {
        if let Some(&a) = self.fixed.get(&i) {
            return Ok(self.net.point(a).to_vec());
        }
        let probs = self.marginal(&[i])?;
        let k = self.net.k;
        let mut mean = vec![0.0; k];
        for (a, &p) in probs.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            for (c, z) in mean.iter_mut().zip(self.net.point(a)) {
                *c += p * z;
            }
        }
        Ok(mean)
    }

    /// Pseudo-deviation `pE || x_i - pE x_i ||`; zero iff the marginal is a
    /// point mass (and exactly zero for conditioned variables).
    pub fn pdev(&self, i: usize) -> Result<f64> {
        if self.fixed.contains_key(&i) {
            return Ok(0.0);
        }
        let probs = self.marginal(&[i])?;
        let mean = {
            let k = self.net.k;
            let mut mean = vec![0.0; k];
            for (a, &p) in probs.iter().enumerate() {
                if p == 0.0 {
                    continue;
                }
                for (c, z) in mean.iter_mut().zip(self.net.point(a)) {
                    *c += p * z;
                }
            }
            mean
        };
        Ok(probs
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(a, &p)| p * dist(self.net.point(a), &mean))
            .sum())
    }

    /// Joint pair distribution as `(prob, net index of i, net index of j)`
    /// triples, from the designated covering table; conditioned variables are
    /// exact point masses.
    pub fn pair_support(&self, i: usize, j: usize) -> Result<Vec<(f64, usize, usize)>> {
        assert!(i != j);
        let (lo, hi) = (i.min(j), i.max(j));
        let mut support = Vec::new();
        match (self.fixed.get(&lo).cloned(), self.fixed.get(&hi).cloned()) {
            (Some(a), Some(b)) => support.push((1.0, a, b)),
            (Some(a), None) => {
                for (b, &p) in self.marginal(&[hi])?.iter().enumerate() {
                    if p > 0.0 {
                        support.push((p, a, b));
                    }
                }
            }
            (None, Some(b)) => {
                for (a, &p) in self.marginal(&[lo])?.iter().enumerate() {
                    if p > 0.0 {
                        support.push((p, a, b));
                    }
                }
            }
            (None, None) => {
                let table = self.marginal(&[lo, hi])?;
                let m = self.m();
                for (idx, &p) in table.iter().enumerate() {
                    if p > 0.0 {
                        support.push((p, idx % m, idx / m));
                    }
                }
            }
        }
        if i < j {
            Ok(support)
        } else {
            Ok(support.into_iter().map(|(p, a, b)| (p, b, a)).collect())
        }
    }

    /// `pE ||x_i - x_j||^2`.
    pub fn pe_dist2(&self, i: usize, j: usize) -> Result<f64> {
        Ok(self
            .pair_support(i, j)?
            .iter()
            .map(|&(p, a, b)| {
                let d = dist(self.net.point(a), self.net.point(b));
                p * d * d
            })
            .sum())
    }

    /// `pE (1 - ||x_i - x_j|| / d)^2`: the pair's objective contribution.
    pub fn pair_cost(&self, i: usize, j: usize, d: f64) -> Result<f64> {
        Ok(self
            .pair_support(i, j)?
            .iter()
            .map(|&(p, a, b)| {
                let r = 1.0 - dist(self.net.point(a), self.net.point(b)) / d;
                p * r * r
            })
            .sum())
    }

    /// The relaxation objective value this pseudo-distribution attains.
    pub fn sa_objective(&self, inst: &Instance) -> Result<f64> {
        let mut total = 0.0;
        for (i, j) in inst.pairs() {
            total += self.pair_cost(i, j, inst.d(i, j))?;
        }
        Ok(total / crate::core::num_pairs(inst.n) as f64)
    }

    /// Condition on the event `{x_v = zeta[v]}`. Residual tables come from
    /// subsets containing all of `zeta`; everything else is dropped, and the
    /// assigned variables become exact point masses.
    pub fn condition(&self, zeta: &Conditioning) -> Result<Self> {
        if zeta.is_empty() {
            return Err(Error::InvalidParameter("empty conditioning".into()));
        }
        let m = self.m();
        for (&v, &a) in zeta {
            if v >= self.n() || a >= m {
                return Err(Error::InvalidParameter(format!(
                    "conditioning {v} -> {a} out of range"
                )));
            }
            if self.fixed.contains_key(&v) {
                return Err(Error::InvalidParameter(format!(
                    "variable {v} is already conditioned"
                )));
            }
        }
        let zvars: Vec<usize> = zeta.keys().cloned().collect();
        if self.family.covering_subset(&zvars).is_none() {
            // the event must be jointly visible to at least one table
            return Err(Error::NotCovered { subset: zvars });
        }

        let mut new_subsets: Vec<Vec<usize>> = Vec::new();
        let mut new_tables: Vec<Vec<f64>> = Vec::new();
        let mut seen: std::collections::HashSet<Vec<usize>> = std::collections::HashSet::new();
        for (si, s) in self.family.subsets.iter().enumerate() {
            if !zvars.iter().all(|v| s.binary_search(v).is_ok()) {
                continue;
            }
            let residual: Vec<usize> = s
                .iter()
                .filter(|v| !zeta.contains_key(v))
                .cloned()
                .collect();
            // fixed digits of this table
            let mut fixed_part = 0usize;
            let mut stride = 1usize;
            let mut res_strides = Vec::new();
            for &v in s {
                if let Some(&a) = zeta.get(&v) {
                    fixed_part += a * stride;
                } else {
                    res_strides.push(stride);
                }
                stride *= m;
            }
            let table = &self.tables[si];
            let size = m.pow(residual.len() as u32);
            let mut restricted = vec![0.0; size];
            let mut mass = 0.0;
            let mut digits = Vec::new();
            for (ri, slot) in restricted.iter_mut().enumerate() {
                decode(ri, residual.len(), m, &mut digits);
                let mut idx = fixed_part;
                for (rank, &st) in res_strides.iter().enumerate() {
                    idx += digits[rank] * st;
                }
                let p = table[idx];
                *slot = p;
                mass += p;
            }
            if mass < MIN_CONDITION_PROB {
                // name a variable whose single marginal vanishes, if any
                let var = zeta
                    .iter()
                    .find(|(v, &a)| {
                        self.marginal_of_table(si, &[**v])[a] < MIN_CONDITION_PROB
                    })
                    .map(|(v, _)| *v)
                    .unwrap_or(zvars[0]);
                return Err(Error::ZeroProbability { var });
            }
            if residual.is_empty() {
                continue; // fully assigned subsets are removed
            }
            if seen.insert(residual.clone()) {
                for v in &mut restricted {
                    *v /= mass;
                }
                new_subsets.push(residual);
                new_tables.push(restricted);
            }
        }
        let mut fixed = self.fixed.clone();
        fixed.extend(zeta.iter().map(|(&v, &a)| (v, a)));
        Ok(PseudoDistribution {
            net: Arc::clone(&self.net),
            family: SubsetFamily {
                n: self.family.n,
                kind: self.family.kind.clone(),
                subsets: new_subsets,
                base: None,
            },
            tables: new_tables,
            fixed,
        })
    }

    /// Draw a joint assignment for `vars` (sorted, distinct, unconditioned)
    /// from its local distribution by inverse CDF over the flattened table.
    pub fn sample_local<R: Rng>(&self, vars: &[usize], rng: &mut R) -> Result<Vec<usize>> {
        if vars.is_empty() || vars.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(
                "sample_local needs sorted distinct variables".into(),
            ));
        }
        if vars.iter().any(|v| self.fixed.contains_key(v)) {
            return Err(Error::InvalidParameter(
                "sample_local over conditioned variables".into(),
            ));
        }
        let table = self.marginal(vars)?;
        let total: f64 = table.iter().sum();
        let u: f64 = rng.random::<f64>() * total;
        let mut acc = 0.0;
        let mut chosen = table.len() - 1;
        for (idx, &p) in table.iter().enumerate() {
            acc += p;
            if u < acc {
                chosen = idx;
                break;
            }
        }
        let mut digits = Vec::with_capacity(vars.len());
        decode(chosen, vars.len(), self.m(), &mut digits);
        Ok(digits)
    }

    pub fn to_json(&self) -> Result<String> {
        let mirror = PdJson {
            net: (*self.net).clone(),
            family: self.family.clone(),
            tables: self.tables.clone(),
            fixed: self.fixed.clone(),
        };
        Ok(serde_json::to_string_pretty(&mirror)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let mirror: PdJson = serde_json::from_str(text)?;
        let mut pd = PseudoDistribution::from_tables(
            Arc::new(mirror.net),
            mirror.family,
            mirror.tables,
        )?;
        pd.fixed = mirror.fixed;
        Ok(pd)
    }
}

#[derive(Serialize, Deserialize)]
struct PdJson {
    net: EpsNet,
    family: SubsetFamily,
    tables: Vec<Vec<f64>>,
    fixed: Conditioning,
}
