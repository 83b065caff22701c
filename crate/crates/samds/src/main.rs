//! Thin command-line front end over the library: instance generation,
//! solving, exhaustive baselines, lemma diagnostics, batch experiments, and
//! the conditioning-size calculator.
//!
//! Exit codes: 0 ok, 1 usage error, 2 runtime failure.

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use serde::Serialize;

use samds::core::{kk_stress, Instance};
use samds::diagnostics::{
    check_deviation_reduction, check_quantile_lemma, check_translating_quantiles,
    check_typical_distortion, no_witness_fraction, QuantileLemmaConfig,
};
use samds::error::Result;
use samds::experiment::{
    run_experiment, write_rows_csv, write_rows_json, write_timings_csv, ExperimentConfig,
};
use samds::gen::{generate, InstanceKind};
use samds::lp::solve_lp;
use samds::net::build_net_capped;
use samds::oracle::{brute_force_net_opt_capped, local_search_opt, DEFAULT_ENUM_CAP};
use samds::rng::derive_rng;
use samds::rounding::{solve_mds, tau_formula, FamilyChoice, NetOverride, SolverParams};
use samds::sa::{build_sa_lp, extract_pd, SubsetFamily};

#[derive(Parser)]
#[command(name = "samds", version, about = "Kamada-Kawai MDS via LP-hierarchy rounding")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a generated instance to a JSON file.
    Generate {
        /// euclidean-noise | graph | two-cluster | geometric-line
        #[arg(long)]
        kind: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Noise width for euclidean-noise.
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        /// Edge probability for graph.
        #[arg(long, default_value_t = 0.4)]
        edge_prob: f64,
        /// Across-cluster dissimilarity for two-cluster.
        #[arg(long, default_value_t = 8.0)]
        delta: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve an instance and write the solve report (and optionally the
    /// embedding) as JSON.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
        #[arg(long, default_value_t = 2)]
        tau: usize,
        /// full | sparse
        #[arg(long, default_value = "full")]
        family: String,
        #[arg(long)]
        net_halfwidth: Option<f64>,
        #[arg(long)]
        net_eps: Option<f64>,
        #[arg(long, default_value_t = 3)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        c0: f64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        emb_out: Option<PathBuf>,
        /// Plain-text dump of the relaxation LP for external cross-checking.
        #[arg(long)]
        dump_lp: Option<PathBuf>,
    },
    /// Exhaustive discrete optimum over a net.
    Brute {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        net_halfwidth: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        net_eps: f64,
        /// Default cap is 10^7 assignments.
        #[arg(long)]
        cap: Option<u128>,
        /// Halve the search when the net is negation-symmetric.
        #[arg(long, default_value_t = false)]
        symmetry: bool,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every lemma check on one instance; one JSON verdict per lemma.
    Diagnose {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
        /// Failure budget for the deviation-reduction check.
        #[arg(long, default_value_t = 0.4)]
        delta: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        net_halfwidth: Option<f64>,
        #[arg(long)]
        net_eps: Option<f64>,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a config of instances x methods x seeds; CSV or JSON by extension.
    Bench {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Wall-clock sidecar (non-deterministic, kept out of --out).
        #[arg(long)]
        timings: Option<PathBuf>,
    },
    /// Print the conditioning-size formula value.
    Tau {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
    },
}

fn parse_family(name: &str) -> Result<FamilyChoice> {
    match name {
        "full" => Ok(FamilyChoice::Full),
        "sparse" | "sparsified" => Ok(FamilyChoice::Sparsified),
        other => Err(samds::Error::InvalidParameter(format!(
            "unknown family '{other}' (expected full or sparse)"
        ))),
    }
}

#[derive(Serialize)]
struct Verdict {
    lemma: &'static str,
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn verdict<T: Serialize>(lemma: &'static str, outcome: Result<T>) -> Verdict {
    match outcome {
        Ok(rep) => Verdict {
            lemma,
            status: "ok",
            report: Some(serde_json::to_value(rep).expect("serializable report")),
            error: None,
        },
        Err(e) => Verdict {
            lemma,
            status: "error",
            report: None,
            error: Some(e.to_string()),
        },
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Generate {
            kind,
            n,
            k,
            noise,
            edge_prob,
            delta,
            seed,
            out,
        } => {
            let kind = match kind.as_str() {
                "euclidean-noise" => InstanceKind::EuclideanNoise { n, k, noise },
                "graph" | "graph-shortest-path" => {
                    InstanceKind::GraphShortestPath { n, k, edge_prob }
                }
                "two-cluster" => InstanceKind::TwoCluster { n, k, delta },
                "geometric-line" => InstanceKind::GeometricLine { n },
                other => {
                    return Err(samds::Error::InvalidParameter(format!(
                        "unknown kind '{other}'"
                    )))
                }
            };
            let inst = generate(&kind, seed)?;
            inst.to_json_file(&out)?;
            println!(
                "wrote {} (n = {}, k = {}, aspect ratio = {})",
                out.display(),
                inst.n,
                inst.k,
                inst.aspect_ratio()
            );
        }
        Cmd::Solve {
            instance,
            eps,
            tau,
            family,
            net_halfwidth,
            net_eps,
            trials,
            seed,
            c0,
            out,
            emb_out,
            dump_lp,
        } => {
            let inst = Instance::from_json_file(&instance)?;
            let mut params = SolverParams::new(eps, tau);
            params.family = parse_family(&family)?;
            params.trials = trials;
            params.seed = seed;
            params.c0 = c0;
            if let (Some(h), Some(e)) = (net_halfwidth, net_eps) {
                params.net_override = Some(NetOverride {
                    half_width: h,
                    eps: e,
                });
            }
            if let Some(path) = dump_lp {
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
                let level = params.full_level(norm.n);
                let fam = SubsetFamily::full(norm.n, level)?;
                let (lp, _) = build_sa_lp(&norm, &net, &fam)?;
                let mut f = std::fs::File::create(path)?;
                lp.write_text(&mut f)?;
            }
            let solved = solve_mds(&inst, &params)?;
            std::fs::write(&out, serde_json::to_string_pretty(&solved.report)? + "\n")?;
            if let Some(path) = emb_out {
                solved.embedding.to_json_file(path)?;
            }
            println!(
                "lp value {:.6}, best stress {:.6} (trial {})",
                solved.report.lp_value, solved.report.best_stress, solved.report.best_trial
            );
        }
        Cmd::Brute {
            instance,
            net_halfwidth,
            net_eps,
            cap,
            symmetry,
            eps,
            out,
        } => {
            let inst = Instance::from_json_file(&instance)?;
            let norm = inst.normalize();
            let half = net_halfwidth.unwrap_or(norm.aspect_ratio() / eps);
            let net = build_net_capped(norm.k, half, net_eps, samds::net::DEFAULT_NET_CAP)?;
            let (emb, value) = brute_force_net_opt_capped(
                &norm,
                &net,
                cap.unwrap_or(DEFAULT_ENUM_CAP),
                symmetry,
            )?;
            println!("discrete optimum over {} net points: {value:.9}", net.len());
            if let Some(path) = out {
                emb.scaled(inst.min_d()).to_json_file(path)?;
            }
        }
        Cmd::Diagnose {
            instance,
            eps,
            delta,
            seed,
            net_halfwidth,
            net_eps,
            trials,
            out,
        } => {
            let inst = Instance::from_json_file(&instance)?;
            let verdicts = diagnose(&inst, eps, delta, seed, net_halfwidth, net_eps, trials)?;
            let text = serde_json::to_string_pretty(&verdicts)? + "\n";
            match out {
                Some(path) => std::fs::write(path, text)?,
                None => print!("{text}"),
            }
        }
        Cmd::Bench {
            config,
            out,
            timings,
        } => {
            let cfg = ExperimentConfig::from_json_file(&config)?;
            let base = config
                .parent()
                .map(|p| p.to_path_buf())
                .unwrap_or_else(|| PathBuf::from("."));
            let (rows, times) = run_experiment(&cfg, &base)?;
            let failed = rows.iter().filter(|r| r.status != "ok").count();
            if out.extension().is_some_and(|e| e == "json") {
                write_rows_json(&rows, &out)?;
            } else {
                write_rows_csv(&rows, &out)?;
            }
            if let Some(path) = timings {
                write_timings_csv(&times, path)?;
            }
            println!(
                "{} rows written to {} ({failed} failed)",
                rows.len(),
                out.display()
            );
        }
        Cmd::Tau { k, delta, eps } => {
            println!("{}", tau_formula(k, delta, eps));
        }
    }
    Ok(())
}

/// The full diagnostics pipeline: a relaxation optimizer, a local-search
/// reference, and every lemma check.
fn diagnose(
    inst: &Instance,
    eps: f64,
    delta: f64,
    seed: u64,
    net_halfwidth: Option<f64>,
    net_eps: Option<f64>,
    trials: usize,
) -> Result<Vec<Verdict>> {
    let norm = inst.normalize();
    let mut verdicts = Vec::new();

    // reference embedding from the baseline
    let mut ls_rng = derive_rng(seed, 1);
    let opt_emb = local_search_opt(&norm, 4, 400, &mut ls_rng)?;
    let opt_stress = kk_stress(&opt_emb, &norm)?;

    // point-set checks run on the reference layout
    verdicts.push(verdict(
        "quantile-shrinking",
        check_quantile_lemma(&opt_emb.points, 0.1, 0.3, QuantileLemmaConfig::default()),
    ));
    verdicts.push(verdict(
        "no-contracting-witness",
        Ok(serde_json::json!({
            "fraction": no_witness_fraction(&opt_emb.points, 1.0 / 3.0),
            "opt_stress": opt_stress,
        })),
    ));

    // pseudo-distribution checks need a solved relaxation
    let pd = (|| -> Result<samds::sa::PseudoDistribution> {
        let tau_cond = ((1.0 / delta).ln() / eps).ceil().max(1.0) as usize;
        let level = (tau_cond + 1).clamp(2, norm.n);
        let net = match (net_halfwidth, net_eps) {
            (Some(h), Some(e)) => build_net_capped(norm.k, h, e, samds::net::DEFAULT_NET_CAP)?,
            _ => build_net_capped(
                norm.k,
                norm.aspect_ratio() / eps,
                1.0,
                samds::net::DEFAULT_NET_CAP,
            )?,
        };
        let family = SubsetFamily::full(norm.n, level)?;
        let (lp, map) = build_sa_lp(&norm, &net, &family)?;
        let sol = solve_lp(&lp)?;
        extract_pd(&sol, &map, &family, Arc::new(net))
    })();

    match pd {
        Ok(pd) => {
            verdicts.push(verdict(
                "typical-distortion",
                check_typical_distortion(&norm, &opt_emb, &pd, 0.2),
            ));
            let mut rng = derive_rng(seed, 2);
            verdicts.push(verdict(
                "deviation-reduction",
                check_deviation_reduction(&pd, eps, delta, trials, 8, &mut rng),
            ));
            verdicts.push(verdict(
                "translating-quantiles",
                check_translating_quantiles(&pd, &opt_emb, &norm, eps),
            ));
        }
        Err(e) => {
            let msg = e.to_string();
            for lemma in [
                "typical-distortion",
                "deviation-reduction",
                "translating-quantiles",
            ] {
                verdicts.push(Verdict {
                    lemma,
                    status: "error",
                    report: None,
                    error: Some(msg.clone()),
                });
            }
        }
    }
    Ok(verdicts)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap help/version requests are not usage errors
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
