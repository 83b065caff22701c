//! Epsilon-nets over cubes `[-R, R]^k`: construction, nearest-point snapping,
//! and discretization of an embedding onto a net.
//!
//! The net doubles as the finite domain of the relaxation LP, so construction
//! is deterministic: a greedy maximal separated subset of an axis-aligned
//! lattice, scanned in lexicographic order. A candidate lattice point is kept
//! iff it is farther than `sep` from every kept point, so kept points are
//! pairwise more than `sep` apart and every lattice point is within `sep` of
//! a kept one. The lattice has spacing `sep / 2` and includes both cube faces
//! per axis, so any cube point is within `sqrt(k) * sep / 4` of the lattice,
//! for a total cover radius of `sep * (1 + sqrt(k) / 4)`. `sep` is pre-scaled
//! so that this bound equals the requested `eps`.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::core::{dist, dist2, Embedding, Instance, Provenance};
use crate::error::{Error, Result};

pub const DEFAULT_NET_CAP: usize = 1_000_000;

/// Ball radius used by [`discretize_embedding`], as a multiple of
/// `aspect_ratio / eps`.
pub const DEFAULT_BALL_FACTOR: f64 = 10.0;

const LATTICE_CAP: u128 = 200_000_000;

/// A finite cover of `[-half_width, half_width]^k`.
///
/// Every cube point is within `eps` of some net point and distinct net points
/// are more than `sep` apart (`sep = eps / (1 + sqrt(k)/4)` for built nets).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsNet {
    pub k: usize,
    pub half_width: f64,
    pub eps: f64,
    pub sep: f64,
    pub points: Vec<Vec<f64>>,
}

/// Metadata block used by the net dump format and solver reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetMeta {
    pub k: usize,
    pub half_width: f64,
    pub eps: f64,
    pub sep: f64,
    pub size: usize,
    /// Realized constant `c` in `|points| = (c * half_width / eps)^k`.
    pub cover_constant: f64,
}

impl EpsNet {
    /// Net with explicitly given points (test fixtures, external domains).
    pub fn from_points(k: usize, eps: f64, points: Vec<Vec<f64>>) -> Result<Self> {
        if points.is_empty() || points.iter().any(|p| p.len() != k) {
            return Err(Error::InvalidParameter(
                "net points must be nonempty and of dimension k".into(),
            ));
        }
        let half_width = points
            .iter()
            .flat_map(|p| p.iter())
            .fold(0.0f64, |m, &v| m.max(v.abs()));
        let mut sep = f64::INFINITY;
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                sep = sep.min(dist(&points[i], &points[j]));
            }
        }
        Ok(EpsNet {
            k,
            half_width,
            eps,
            sep: if sep.is_finite() { sep * 0.999 } else { eps },
            points,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    pub fn meta(&self) -> NetMeta {
        let size = self.points.len() as f64;
        NetMeta {
            k: self.k,
            half_width: self.half_width,
            eps: self.eps,
            sep: self.sep,
            size: self.points.len(),
            cover_constant: size.powf(1.0 / self.k as f64) * self.eps / self.half_width,
        }
    }

    /// Smallest pairwise distance between net points (exhaustive).
    pub fn min_separation(&self) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..self.points.len() {
            for j in i + 1..self.points.len() {
                best = best.min(dist(&self.points[i], &self.points[j]));
            }
        }
        best
    }

    pub fn dump_json_file<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        #[derive(Serialize)]
        struct Dump<'a> {
            meta: NetMeta,
            points: &'a [Vec<f64>],
        }
        let dump = Dump {
            meta: self.meta(),
            points: &self.points,
        };
        std::fs::write(path, serde_json::to_string_pretty(&dump)? + "\n")?;
        Ok(())
    }
}

/// Lattice coordinates for one axis: `-r, -r + step, ...` plus the face `r`.
fn axis_coords(r: f64, step: f64) -> Vec<f64> {
    let m = ((2.0 * r) / step).ceil() as usize;
    let mut coords: Vec<f64> = (0..=m).map(|t| (-r + t as f64 * step).min(r)).collect();
    coords.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    coords
}

fn cell_key(p: &[f64], cell: f64) -> Vec<i64> {
    p.iter().map(|&v| (v / cell).floor() as i64).collect()
}

/// Deterministic eps-cover of `[-half_width, half_width]^k` with the default
/// size cap.
pub fn build_net(k: usize, half_width: f64, eps: f64) -> Result<EpsNet> {
    build_net_capped(k, half_width, eps, DEFAULT_NET_CAP)
}

pub fn build_net_capped(k: usize, half_width: f64, eps: f64, cap: usize) -> Result<EpsNet> {
    if k == 0 || !(half_width > 0.0) || !(eps > 0.0) {
        return Err(Error::InvalidParameter(
            "build_net needs k >= 1, half_width > 0, eps > 0".into(),
        ));
    }
    let sep = eps / (1.0 + (k as f64).sqrt() / 4.0);
    let step = sep / 2.0;
    let coords = axis_coords(half_width, step);
    let lattice_size = (coords.len() as u128).checked_pow(k as u32);
    match lattice_size {
        Some(sz) if sz <= LATTICE_CAP => {}
        _ => return Err(Error::NetCapExceeded { cap }),
    }

    let mut points: Vec<Vec<f64>> = Vec::new();
    // grid buckets of side `sep`: any point within `sep` lies in a 3^k block.
    // candidates exactly at distance `sep` must reject regardless of lattice
    // round-off, hence the relative slack on the rejection radius
    let mut buckets: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    let sep2 = (sep * (1.0 + 1e-9)) * (sep * (1.0 + 1e-9));

    let mut odo = vec![0usize; k];
    let mut candidate = vec![0.0f64; k];
    'scan: loop {
        for a in 0..k {
            candidate[a] = coords[odo[a]];
        }
        let key = cell_key(&candidate, sep);
        let mut free = true;
        let mut neighbor = vec![0i64; k];
        let mut offs = vec![-1i64; k];
        'cells: loop {
            for a in 0..k {
                neighbor[a] = key[a] + offs[a];
            }
            if let Some(ids) = buckets.get(&neighbor) {
                for &id in ids {
                    if dist2(&points[id], &candidate) <= sep2 {
                        free = false;
                        break 'cells;
                    }
                }
            }
            let mut a = 0;
            loop {
                if a == k {
                    break 'cells;
                }
                offs[a] += 1;
                if offs[a] <= 1 {
                    break;
                }
                offs[a] = -1;
                a += 1;
            }
        }
        if free {
            if points.len() == cap {
                return Err(Error::NetCapExceeded { cap });
            }
            buckets.entry(key).or_default().push(points.len());
            points.push(candidate.clone());
        }

        // advance the lattice odometer in lexicographic order
        let mut a = k;
        loop {
            if a == 0 {
                break 'scan;
            }
            a -= 1;
            odo[a] += 1;
            if odo[a] < coords.len() {
                break;
            }
            odo[a] = 0;
        }
    }

    Ok(EpsNet {
        k,
        half_width,
        eps,
        sep,
        points,
    })
}

/// Index of the net point nearest to `v`; ties go to the lowest index.
/// Points outside the cube snap to the nearest net point all the same.
pub fn snap(v: &[f64], net: &EpsNet) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, p) in net.points.iter().enumerate() {
        let d = dist2(v, p);
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, Copy)]
pub struct DiscretizeOptions {
    pub ball_factor: f64,
    pub net_cap: usize,
}

impl Default for DiscretizeOptions {
    fn default() -> Self {
        DiscretizeOptions {
            ball_factor: DEFAULT_BALL_FACTOR,
            net_cap: DEFAULT_NET_CAP,
        }
    }
}

/// Move an embedding onto net points while giving up at most `3 * eps`
/// stress on zero-stress inputs (and `stress + 3 * eps` in general):
///
/// 1. center `c` = input point minimizing the sum of distances to the rest
///    (ties to the lowest index);
/// 2. project every point onto the ball of radius
///    `ball_factor * aspect_ratio / eps` around `c` (a contraction);
/// 3. snap to an eps-net of the enclosing cube.
///
/// The instance must be normalized (`min d = 1`). The output lives in the
/// frame centered at `c`, so its points are exactly net points; snapping may
/// make points coincide.
pub fn discretize_embedding(emb: &Embedding, inst: &Instance, eps: f64) -> Result<Embedding> {
    discretize_embedding_with(emb, inst, eps, DiscretizeOptions::default())
}

pub fn discretize_embedding_with(
    emb: &Embedding,
    inst: &Instance,
    eps: f64,
    opts: DiscretizeOptions,
) -> Result<Embedding> {
    if emb.n() != inst.n || emb.k != inst.k {
        return Err(Error::DimensionMismatch(
            "embedding does not match instance".into(),
        ));
    }
    if !inst.is_normalized() {
        return Err(Error::InvalidParameter(
            "discretize_embedding expects a normalized instance (min d = 1)".into(),
        ));
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter("eps must be > 0".into()));
    }

    let n = inst.n;
    let center = (0..n)
        .min_by(|&a, &b| {
            let sa: f64 = (0..n).map(|j| dist(emb.point(a), emb.point(j))).sum();
            let sb: f64 = (0..n).map(|j| dist(emb.point(b), emb.point(j))).sum();
            sa.partial_cmp(&sb).unwrap()
        })
        .unwrap();
    let c = emb.point(center).to_vec();

    let radius = opts.ball_factor * inst.aspect_ratio() / eps;
    let projected: Vec<Vec<f64>> = emb
        .points
        .iter()
        .map(|p| {
            let shifted: Vec<f64> = p.iter().zip(&c).map(|(v, cv)| v - cv).collect();
            let norm = dist2(&shifted, &vec![0.0; inst.k]).sqrt();
            if norm > radius {
                shifted.iter().map(|v| v * radius / norm).collect()
            } else {
                shifted
            }
        })
        .collect();

    let net = build_net_capped(inst.k, radius, eps, opts.net_cap)?;
    let snapped: Vec<Vec<f64>> = projected
        .iter()
        .map(|p| net.point(snap(p, &net)).to_vec())
        .collect();

    Ok(Embedding::new(inst.k, snapped, Provenance::Discretized))
}

/// Ball projection used by step (2) of [`discretize_embedding`], exposed so
/// the contraction property can be checked directly.
pub fn project_to_ball(points: &[Vec<f64>], center: &[f64], radius: f64) -> Vec<Vec<f64>> {
    points
        .iter()
        .map(|p| {
            let shifted: Vec<f64> = p.iter().zip(center).map(|(v, cv)| v - cv).collect();
            let norm = shifted.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > radius {
                shifted.iter().map(|v| v * radius / norm).collect()
            } else {
                shifted
            }
        })
        .collect()
}
