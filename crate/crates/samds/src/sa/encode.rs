//! Encoding a pseudo-distribution optimization as a standard-form LP and
//! decoding the solved vector back into probability tables.
//!
//! Variables are all table entries, laid out family subset by family subset
//! in mixed-radix order. Constraints are one sum-to-1 row per table plus
//! marginal-consistency equalities for every ordered pair of family subsets
//! with nonempty intersection (one row per assignment of the intersection).
//! The objective charges each unordered variable pair `1/C(n,2)` times its
//! distortion cost through a designated covering table: the lowest-index
//! covering subset, a choice the consistency constraints make immaterial at
//! the optimum.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::core::{dist, num_pairs, Instance};
use crate::error::{Error, Result};
use crate::lp::{LinearProgram, LpSolution, LpStatus};
use crate::net::EpsNet;
use crate::sa::family::SubsetFamily;
use crate::sa::pd::PseudoDistribution;

/// Negative table entries smaller than this are solver noise and clip to 0;
/// anything more negative is an invariant violation.
pub const CLIP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy)]
pub struct SaLpOptions {
    pub var_cap: usize,
    /// Cap on (rows + 1) * (vars + rows + 1), the phase-1 tableau size.
    pub tableau_cap: usize,
}

impl Default for SaLpOptions {
    fn default() -> Self {
        SaLpOptions {
            var_cap: 200_000,
            tableau_cap: 60_000_000,
        }
    }
}

/// Where each subset's table lives inside the LP variable vector.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SaIndexMap {
    pub offsets: Vec<usize>,
    pub sizes: Vec<usize>,
    pub total: usize,
}

pub fn build_sa_lp(
    inst: &Instance,
    net: &EpsNet,
    family: &SubsetFamily,
) -> Result<(LinearProgram, SaIndexMap)> {
    build_sa_lp_with(inst, net, family, SaLpOptions::default())
}

pub fn build_sa_lp_with(
    inst: &Instance,
    net: &EpsNet,
    family: &SubsetFamily,
    opts: SaLpOptions,
) -> Result<(LinearProgram, SaIndexMap)> {
    if family.n != inst.n {
        return Err(Error::DimensionMismatch(
            "family and instance disagree on n".into(),
        ));
    }
    if net.k != inst.k {
        return Err(Error::DimensionMismatch(
            "net and instance disagree on k".into(),
        ));
    }
    if !family.covers_all_pairs() {
        return Err(Error::InvalidParameter(
            "family must cover every unordered pair".into(),
        ));
    }

    let m = net.len();
    let mut offsets = Vec::with_capacity(family.subsets.len());
    let mut sizes = Vec::with_capacity(family.subsets.len());
    let mut total: usize = 0;
    for s in &family.subsets {
        let size = (m as u128).checked_pow(s.len() as u32);
        let size = match size {
            Some(sz) if sz <= opts.var_cap as u128 => sz as usize,
            _ => return Err(Error::LpSizeExceeded { vars: usize::MAX, rows: 0 }),
        };
        offsets.push(total);
        sizes.push(size);
        total += size;
        if total > opts.var_cap {
            return Err(Error::LpSizeExceeded { vars: total, rows: 0 });
        }
    }

    // intersections drive the row count; compute it before allocating
    let subsets = &family.subsets;
    let mut intersections: Vec<(usize, usize, Vec<usize>)> = Vec::new();
    let mut rows_needed = subsets.len();
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
            rows_needed += m.pow(inter.len() as u32);
            intersections.push((p, q, inter));
        }
    }
    let tableau = (rows_needed as u128 + 1) * (total as u128 + rows_needed as u128 + 1);
    if tableau > opts.tableau_cap as u128 {
        return Err(Error::LpSizeExceeded {
            vars: total,
            rows: rows_needed,
        });
    }

    let mut lp = LinearProgram::new(total);

    // objective: each pair through its designated covering table
    let w = 1.0 / num_pairs(inst.n) as f64;
    for (i, j) in inst.pairs() {
        let si = family.covering_subset(&[i, j]).expect("checked above");
        let s = &subsets[si];
        let pos_i = s.iter().position(|&v| v == i).unwrap();
        let pos_j = s.iter().position(|&v| v == j).unwrap();
        let stride_i = m.pow(pos_i as u32);
        let stride_j = m.pow(pos_j as u32);
        let d = inst.d(i, j);
        let off = offsets[si];
        for idx in 0..sizes[si] {
            let a = (idx / stride_i) % m;
            let b = (idx / stride_j) % m;
            let r = 1.0 - dist(net.point(a), net.point(b)) / d;
            lp.objective[off + idx] += w * r * r;
        }
    }

    // sum-to-1 per table
    for (si, _) in subsets.iter().enumerate() {
        let row = lp.push_empty_row(1.0);
        for v in &mut row[offsets[si]..offsets[si] + sizes[si]] {
            *v = 1.0;
        }
    }

    // marginal consistency for every intersecting pair of subsets
    for (p, q, inter) in &intersections {
        let rows = m.pow(inter.len() as u32);
        let base = lp.num_rows();
        for _ in 0..rows {
            lp.push_empty_row(0.0);
        }
        for (&si, sign) in [(p, 1.0f64), (q, -1.0f64)].iter().map(|(s, g)| (*s, *g)) {
            let s = &subsets[si];
            let strides: Vec<usize> = inter
                .iter()
                .map(|v| m.pow(s.iter().position(|w| w == v).unwrap() as u32))
                .collect();
            let off = offsets[si];
            for idx in 0..sizes[si] {
                let mut row_idx = 0;
                let mut out_stride = 1;
                for &st in &strides {
                    row_idx += ((idx / st) % m) * out_stride;
                    out_stride *= m;
                }
                lp.row_mut(base + row_idx)[off + idx] += sign;
            }
        }
    }

    Ok((
        lp,
        SaIndexMap {
            offsets,
            sizes,
            total,
        },
    ))
}

/// Decode an optimal LP solution into a pseudo-distribution: clip negative
/// noise at `CLIP_TOL`, renormalize each table, and verify the invariants.
pub fn extract_pd(
    sol: &LpSolution,
    map: &SaIndexMap,
    family: &SubsetFamily,
    net: Arc<EpsNet>,
) -> Result<PseudoDistribution> {
    if sol.status != LpStatus::Optimal {
        return Err(Error::SaLpNotOptimal {
            status: sol.status.as_str(),
        });
    }
    let mut tables = Vec::with_capacity(family.subsets.len());
    for (si, _) in family.subsets.iter().enumerate() {
        let slice = &sol.x[map.offsets[si]..map.offsets[si] + map.sizes[si]];
        let mut table = Vec::with_capacity(slice.len());
        for &v in slice {
            if v < -CLIP_TOL {
                return Err(Error::InvariantViolation(format!(
                    "table entry {v} below -{CLIP_TOL}"
                )));
            }
            table.push(v.max(0.0));
        }
        let sum: f64 = table.iter().sum();
        if (sum - 1.0).abs() > 1e-7 {
            return Err(Error::InvariantViolation(format!(
                "table sums to {sum}, expected 1"
            )));
        }
        for v in &mut table {
            *v /= sum;
        }
        tables.push(table);
    }
    let pd = PseudoDistribution::from_tables(net, family.clone(), tables)?;
    let residual = pd.consistency_residual();
    if residual > 1e-6 {
        return Err(Error::InvariantViolation(format!(
            "pairwise marginal disagreement {residual} above 1e-6"
        )));
    }
    Ok(pd)
}
