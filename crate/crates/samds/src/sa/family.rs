//! Subset families: which groups of variables get a joint probability table.
//!
//! `full(t)` is every size-`t` subset of `[n]`. The sparsified family keeps a
//! small random base of `(t-2)`-subsets and augments each with every pair, so
//! pair marginals survive conditioning on a base tuple while the LP stays
//! `poly(n)`-sized.

use itertools::Itertools;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    Full { t: usize },
    Sparsified { tau: usize, base_count: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetFamily {
    pub n: usize,
    pub kind: FamilyKind,
    /// Sorted variable-index sets, in construction order.
    pub subsets: Vec<Vec<usize>>,
    /// Sparsified families remember their base tuples; conditioning sets are
    /// drawn from here.
    pub base: Option<Vec<Vec<usize>>>,
}

fn binom(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let mut r: u128 = 1;
    for i in 0..k.min(n - k) {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r
}

impl SubsetFamily {
    /// All `C(n, t)` subsets of size `t`, in lexicographic order.
    pub fn full(n: usize, t: usize) -> Result<Self> {
        if t < 2 {
            return Err(Error::InvalidParameter("family level must be >= 2".into()));
        }
        if t > n {
            return Err(Error::InvalidParameter(format!(
                "family level {t} exceeds n = {n}"
            )));
        }
        if binom(n, t) > 1_000_000 {
            return Err(Error::InvalidParameter(format!(
                "full({t}) family over n = {n} is too large"
            )));
        }
        let subsets: Vec<Vec<usize>> = (0..n).combinations(t).collect();
        Ok(SubsetFamily {
            n,
            kind: FamilyKind::Full { t },
            subsets,
            base: None,
        })
    }

    /// `base_count` distinct random `(tau-2)`-subsets, each augmented with
    /// every pair `{i, j}`; duplicates are dropped keeping the first
    /// occurrence. Sampling is without replacement, so the base is clamped to
    /// `C(n, tau-2)` tuples.
    pub fn sparsified<R: Rng>(n: usize, tau: usize, base_count: usize, rng: &mut R) -> Result<Self> {
        if tau < 2 {
            return Err(Error::InvalidParameter("family level must be >= 2".into()));
        }
        if tau > n {
            return Err(Error::InvalidParameter(format!(
                "family level {tau} exceeds n = {n}"
            )));
        }
        if base_count == 0 {
            return Err(Error::InvalidParameter("need at least one base tuple".into()));
        }
        let total = binom(n, tau - 2);
        if total > 2_000_000 {
            return Err(Error::InvalidParameter(
                "sparsified base enumeration too large".into(),
            ));
        }
        let mut all: Vec<Vec<usize>> = (0..n).combinations(tau - 2).collect();
        let picked = base_count.min(all.len());
        for i in 0..picked {
            let j = rng.random_range(i..all.len());
            all.swap(i, j);
        }
        all.truncate(picked);
        let base = all;

        let mut subsets: Vec<Vec<usize>> = Vec::new();
        let mut seen: std::collections::HashSet<Vec<usize>> = std::collections::HashSet::new();
        for t in &base {
            for i in 0..n {
                for j in i + 1..n {
                    let mut s = t.clone();
                    if !s.contains(&i) {
                        s.push(i);
                    }
                    if !s.contains(&j) {
                        s.push(j);
                    }
                    s.sort_unstable();
                    if seen.insert(s.clone()) {
                        subsets.push(s);
                    }
                }
            }
        }
        Ok(SubsetFamily {
            n,
            kind: FamilyKind::Sparsified { tau, base_count },
            subsets,
            base: Some(base),
        })
    }

    /// Lowest-index subset containing every variable in `vars`.
    pub fn covering_subset(&self, vars: &[usize]) -> Option<usize> {
        self.subsets
            .iter()
            .position(|s| vars.iter().all(|v| s.binary_search(v).is_ok()))
    }

    /// Every unordered pair must have a joint table for the objective.
    pub fn covers_all_pairs(&self) -> bool {
        for i in 0..self.n {
            for j in i + 1..self.n {
                if self.covering_subset(&[i, j]).is_none() {
                    return false;
                }
            }
        }
        true
    }

    pub fn max_subset_len(&self) -> usize {
        self.subsets.iter().map(|s| s.len()).max().unwrap_or(0)
    }
}
