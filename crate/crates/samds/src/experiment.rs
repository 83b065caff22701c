//! Batch experiments: a JSON config describing instances x methods x seeds,
//! executed on a worker pool, with rows emitted in config order so outputs
//! are reproducible byte for byte.
//!
//! Wall-clock timings are never part of the result rows; they go to an
//! optional sidecar so the primary output stays deterministic.

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::core::{kk_stress, Instance};
use crate::error::Result;
use crate::net::build_net_capped;
use crate::oracle::{brute_force_net_opt_capped, local_search_opt, DEFAULT_ENUM_CAP};
use crate::rng::derive_rng;
use crate::rounding::{solve_mds, FamilyChoice, NetOverride, SolverParams};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    SaRound,
    BruteNet,
    LocalSearch,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::SaRound => "sa-round",
            Method::BruteNet => "brute-net",
            Method::LocalSearch => "local-search",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceRef {
    pub name: String,
    pub path: PathBuf,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub eps: f64,
    pub tau: usize,
    pub family: FamilyChoice,
    pub trials: usize,
    pub net_halfwidth: Option<f64>,
    pub net_eps: Option<f64>,
    pub c0: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            eps: 0.5,
            tau: 2,
            family: FamilyChoice::Full,
            trials: 3,
            net_halfwidth: None,
            net_eps: None,
            c0: 1.0,
        }
    }
}

impl SolverConfig {
    pub fn to_params(&self, seed: u64) -> SolverParams {
        let mut p = SolverParams::new(self.eps, self.tau);
        p.family = self.family;
        p.trials = self.trials;
        p.seed = seed;
        p.c0 = self.c0;
        if let (Some(h), Some(e)) = (self.net_halfwidth, self.net_eps) {
            p.net_override = Some(NetOverride {
                half_width: h,
                eps: e,
            });
        }
        p
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct LocalSearchConfig {
    pub restarts: usize,
    pub steps: usize,
}

impl Default for LocalSearchConfig {
    fn default() -> Self {
        LocalSearchConfig {
            restarts: 4,
            steps: 400,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default = "default_schema")]
    pub schema_version: u32,
    pub instances: Vec<InstanceRef>,
    pub methods: Vec<Method>,
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub local_search: LocalSearchConfig,
}

fn default_schema() -> u32 {
    SCHEMA_VERSION
}

impl ExperimentConfig {
    pub fn from_json_file<P: AsRef<Path>>(path: P) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// One row of results. Failures carry the error text; the run continues.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub schema_version: u32,
    pub instance: String,
    pub method: String,
    pub seed: u64,
    pub status: String,
    pub stress: Option<f64>,
    pub lp_value: Option<f64>,
    pub net_size: Option<usize>,
    pub lp_vars: Option<usize>,
    pub lp_rows: Option<usize>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TimingRow {
    pub instance: String,
    pub method: String,
    pub seed: u64,
    pub wall_ms: f64,
}

fn run_row(
    name: &str,
    inst: &Instance,
    method: Method,
    seed: u64,
    cfg: &ExperimentConfig,
) -> ResultRow {
    let mut row = ResultRow {
        schema_version: SCHEMA_VERSION,
        instance: name.to_string(),
        method: method.as_str().to_string(),
        seed,
        status: "ok".to_string(),
        stress: None,
        lp_value: None,
        net_size: None,
        lp_vars: None,
        lp_rows: None,
        error: None,
    };
    let outcome: Result<()> = (|| {
        match method {
            Method::SaRound => {
                let params = cfg.solver.to_params(seed);
                let out = solve_mds(inst, &params)?;
                row.stress = Some(out.report.best_stress);
                row.lp_value = Some(out.report.lp_value);
                row.net_size = Some(out.report.net_meta.size);
                row.lp_vars = Some(out.report.lp_vars);
                row.lp_rows = Some(out.report.lp_rows);
            }
            Method::BruteNet => {
                let norm = inst.normalize();
                let half = cfg
                    .solver
                    .net_halfwidth
                    .unwrap_or(norm.aspect_ratio() / cfg.solver.eps);
                let eps = cfg.solver.net_eps.unwrap_or(1.0);
                let net = build_net_capped(norm.k, half, eps, crate::net::DEFAULT_NET_CAP)?;
                let (_, value) = brute_force_net_opt_capped(&norm, &net, DEFAULT_ENUM_CAP, false)?;
                row.stress = Some(value);
                row.net_size = Some(net.len());
            }
            Method::LocalSearch => {
                let mut rng = derive_rng(seed, 0x10ca_15ea);
                let emb = local_search_opt(
                    inst,
                    cfg.local_search.restarts,
                    cfg.local_search.steps,
                    &mut rng,
                )?;
                row.stress = Some(kk_stress(&emb, inst)?);
            }
        }
        Ok(())
    })();
    if let Err(e) = outcome {
        row.status = "error".to_string();
        row.error = Some(e.to_string());
    }
    row
}

/// Run every (instance, method, seed) cell. Rows come back in config order
/// regardless of scheduling; timings are reported separately.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    base_dir: &Path,
) -> Result<(Vec<ResultRow>, Vec<TimingRow>)> {
    let mut instances: Vec<(String, Arc<Instance>)> = Vec::new();
    for r in &cfg.instances {
        let path = if r.path.is_absolute() {
            r.path.clone()
        } else {
            base_dir.join(&r.path)
        };
        instances.push((r.name.clone(), Arc::new(Instance::from_json_file(path)?)));
    }
    let mut cells = Vec::new();
    for (name, inst) in &instances {
        for &method in &cfg.methods {
            for &seed in &cfg.seeds {
                cells.push((name.clone(), Arc::clone(inst), method, seed));
            }
        }
    }
    let results: Vec<(ResultRow, TimingRow)> = cells
        .par_iter()
        .map(|(name, inst, method, seed)| {
            let start = Instant::now();
            let row = run_row(name, inst, *method, *seed, cfg);
            let timing = TimingRow {
                instance: name.clone(),
                method: method.as_str().to_string(),
                seed: *seed,
                wall_ms: start.elapsed().as_secs_f64() * 1e3,
            };
            (row, timing)
        })
        .collect();
    Ok(results.into_iter().unzip())
}

pub fn write_rows_csv<P: AsRef<Path>>(rows: &[ResultRow], path: P) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(io_of_csv)?;
    for row in rows {
        w.serialize(row).map_err(io_of_csv)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_rows_json<P: AsRef<Path>>(rows: &[ResultRow], path: P) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(rows)? + "\n")?;
    Ok(())
}

pub fn write_timings_csv<P: AsRef<Path>>(rows: &[TimingRow], path: P) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(io_of_csv)?;
    for row in rows {
        w.serialize(row).map_err(io_of_csv)?;
    }
    w.flush()?;
    Ok(())
}

fn io_of_csv(e: csv::Error) -> crate::error::Error {
    crate::error::Error::Io(std::io::Error::other(e))
}

/// CSV with a header only, used when the config lists no work.
pub fn rows_csv_string(rows: &[ResultRow]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    if rows.is_empty() {
        // serde-based writers emit headers lazily; write them explicitly
        w.write_record([
            "schema_version",
            "instance",
            "method",
            "seed",
            "status",
            "stress",
            "lp_value",
            "net_size",
            "lp_vars",
            "lp_rows",
            "error",
        ])
        .map_err(io_of_csv)?;
    }
    for row in rows {
        w.serialize(row).map_err(io_of_csv)?;
    }
    let bytes = w.into_inner().map_err(|e| {
        crate::error::Error::Io(std::io::Error::other(e.to_string()))
    })?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{generate, InstanceKind};

    fn write_instance(dir: &Path, name: &str) -> PathBuf {
        let inst = generate(&InstanceKind::EuclideanNoise { n: 4, k: 1, noise: 0.0 }, 5).unwrap();
        let path = dir.join(name);
        inst.to_json_file(&path).unwrap();
        path
    }

    #[test]
    fn empty_config_yields_header_only_csv() {
        let cfg = ExperimentConfig {
            schema_version: SCHEMA_VERSION,
            instances: vec![],
            methods: vec![Method::SaRound],
            seeds: vec![1],
            solver: SolverConfig::default(),
            local_search: LocalSearchConfig::default(),
        };
        let (rows, _) = run_experiment(&cfg, Path::new(".")).unwrap();
        assert!(rows.is_empty());
        let text = rows_csv_string(&rows).unwrap();
        assert_eq!(
            text.trim(),
            "schema_version,instance,method,seed,status,stress,lp_value,net_size,lp_vars,lp_rows,error"
        );
    }

    #[test]
    fn zero_stress_instance_all_methods() {
        let dir = tempfile::tempdir().unwrap();
        write_instance(dir.path(), "inst.json");
        let mut solver = SolverConfig::default();
        solver.net_halfwidth = Some(1.2);
        solver.net_eps = Some(0.4);
        let cfg = ExperimentConfig {
            schema_version: SCHEMA_VERSION,
            instances: vec![InstanceRef {
                name: "zero".into(),
                path: PathBuf::from("inst.json"),
            }],
            methods: vec![Method::SaRound, Method::BruteNet, Method::LocalSearch],
            seeds: vec![1],
            solver,
            local_search: LocalSearchConfig::default(),
        };
        let (rows, timings) = run_experiment(&cfg, dir.path()).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(timings.len(), 3);
        for row in &rows {
            assert_eq!(row.status, "ok", "{:?}", row.error);
            assert!(row.stress.is_some());
        }
        // local search should land near zero on an exactly embeddable input
        let ls = rows.iter().find(|r| r.method == "local-search").unwrap();
        assert!(ls.stress.unwrap() < 0.05, "{:?}", ls.stress);
    }

    #[test]
    fn repeated_runs_are_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        write_instance(dir.path(), "inst.json");
        let mut solver = SolverConfig::default();
        solver.net_halfwidth = Some(1.2);
        solver.net_eps = Some(0.4);
        let cfg = ExperimentConfig {
            schema_version: SCHEMA_VERSION,
            instances: vec![InstanceRef {
                name: "zero".into(),
                path: PathBuf::from("inst.json"),
            }],
            methods: vec![Method::SaRound, Method::LocalSearch],
            seeds: vec![3, 4],
            solver,
            local_search: LocalSearchConfig::default(),
        };
        let (rows_a, _) = run_experiment(&cfg, dir.path()).unwrap();
        let (rows_b, _) = run_experiment(&cfg, dir.path()).unwrap();
        assert_eq!(
            rows_csv_string(&rows_a).unwrap(),
            rows_csv_string(&rows_b).unwrap()
        );
    }
}
