use std::time::Instant;

use modecluster::data::format_f64;
use modecluster::{
    default_sigma_start, gms_cluster, kmeans_run, kmodes_fixed_run_from, kmodes_run_from,
    knn_avg_bandwidth, load_csv, load_labels, make_schedule, save_labels, Centroids, GmsConfig,
    KMeansConfig, KModesConfig, KModesResult, Labels,
};
use serde::Serialize;

use crate::args::{Algo, ClusterArgs, SigmaArg};
use crate::commands::{check_finite, save_centroids, scores, write_centroid_path, Scores};
use crate::{display, sibling, to_json, CliError, CliResult};

/// Neighbour count behind `--sigma-target auto`.
pub(crate) const AUTO_KNN: usize = 10;

#[derive(Debug, Serialize)]
struct KModesEcho {
    sigma_start: f64,
    sigma_target: f64,
    sigma_target_auto: bool,
    steps: usize,
    j_iters: usize,
    i_iters: usize,
    ms_tol: f64,
    fixed: bool,
    max_outer: usize,
    schedule: Vec<f64>,
}

#[derive(Debug, Serialize)]
struct GmsEcho {
    sigma: f64,
    ms_tol: f64,
    ms_max_iters: usize,
    merge_radius_factor: f64,
}

#[derive(Debug, Serialize)]
struct ConfigEcho {
    data: String,
    header: bool,
    algo: &'static str,
    seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    restarts: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_iters: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    kmodes: Option<KModesEcho>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gms: Option<GmsEcho>,
    #[serde(skip_serializing_if = "Option::is_none")]
    truth: Option<String>,
    labels_out: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    centroids_out: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    emit_path: Option<String>,
}

#[derive(Debug, Default, Serialize)]
struct Objectives {
    #[serde(skip_serializing_if = "Option::is_none")]
    kmeans: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    kmodes: Option<f64>,
}

#[derive(Debug, Serialize)]
struct PathEntry {
    sigma: f64,
    centroids: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize)]
struct EmptyEvent {
    sigma_index: usize,
    iter: usize,
    cluster: usize,
}

#[derive(Debug, Default, Serialize)]
struct Diagnostics {
    #[serde(skip_serializing_if = "Option::is_none")]
    kmeans_iters: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    kmeans_best_restart: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    kmeans_empty_cluster_repairs: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    kmodes_outer_iters: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    kmodes_converged: Option<bool>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    empty_cluster_events: Vec<EmptyEvent>,
    #[serde(skip_serializing_if = "Option::is_none")]
    nonconverged_mode_seeks: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gms_iters_total: Option<usize>,
}

#[derive(Debug, Default, Serialize)]
struct Timings {
    load_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    bandwidth_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    kmeans_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    kmodes_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gms_s: Option<f64>,
    total_s: f64,
}

#[derive(Debug, Serialize)]
struct RunReport {
    algorithm: &'static str,
    config: ConfigEcho,
    /// Arguments that rerun this exact configuration.
    reproduce: Vec<String>,
    objective: Objectives,
    labels_path: String,
    cluster_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    mode_count: Option<usize>,
    cluster_sizes: Vec<usize>,
    centroids: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    centroid_path: Option<Vec<PathEntry>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    metrics: Option<Scores>,
    timings: Timings,
    diagnostics: Diagnostics,
}

fn secs(t: Instant) -> f64 {
    t.elapsed().as_secs_f64()
}

fn require_k(a: &ClusterArgs) -> CliResult<usize> {
    a.k.ok_or_else(|| CliError::usage(format!("--algo {} requires --k", a.algo.id())))
}

fn kmeans_cfg(a: &ClusterArgs, k: usize) -> KMeansConfig {
    KMeansConfig {
        k,
        restarts: a.restarts,
        max_iters: a.max_iters,
        seed: a.seed,
    }
}

pub(crate) fn cluster(a: &ClusterArgs) -> CliResult<String> {
    let started = Instant::now();
    let data = load_csv(&a.data, a.header)?;
    let truth = a.truth.as_ref().map(load_labels).transpose()?;
    if let Some(t) = &truth {
        if t.len() != data.n() {
            return Err(CliError::data(format!(
                "truth has {} labels for {} points",
                t.len(),
                data.n()
            )));
        }
    }
    let mut timings = Timings {
        load_s: secs(started),
        ..Timings::default()
    };
    let labels_out = a
        .labels_out
        .clone()
        .unwrap_or_else(|| sibling(&a.data, &format!(".{}.labels.csv", a.algo.id())));
    if a.algo != Algo::Kmodes && a.emit_path.is_some() {
        return Err(CliError::usage("--emit-path only applies to --algo kmodes"));
    }
    if a.algo != Algo::Gms && a.sigma.is_some() {
        return Err(CliError::usage(
            "--sigma only applies to --algo gms; use --sigma-target",
        ));
    }

    let mut echo = ConfigEcho {
        data: display(&a.data),
        header: a.header,
        algo: a.algo.id(),
        seed: a.seed,
        k: None,
        restarts: None,
        max_iters: None,
        kmodes: None,
        gms: None,
        truth: a.truth.as_deref().map(display),
        labels_out: display(&labels_out),
        centroids_out: a.centroids_out.as_deref().map(display),
        emit_path: a.emit_path.as_deref().map(display),
    };
    let mut objective = Objectives::default();
    let mut diagnostics = Diagnostics::default();
    let mut centroid_path = None;
    let mut mode_count = None;

    let (labels, centroids): (Labels, Centroids) = match a.algo {
        Algo::Kmeans => {
            let k = require_k(a)?;
            echo.k = Some(k);
            echo.restarts = Some(a.restarts);
            echo.max_iters = Some(a.max_iters);
            let t = Instant::now();
            let r = kmeans_run(&data, &kmeans_cfg(a, k))?;
            timings.kmeans_s = Some(secs(t));
            objective.kmeans = Some(r.objective);
            diagnostics.kmeans_iters = Some(r.iters);
            diagnostics.kmeans_best_restart = Some(r.best_restart);
            diagnostics.kmeans_empty_cluster_repairs = Some(r.empty_cluster_repairs);
            (r.labels, r.centroids)
        }
        Algo::Kmodes => {
            let k = require_k(a)?;
            echo.k = Some(k);
            echo.restarts = Some(a.restarts);
            echo.max_iters = Some(a.max_iters);
            let target = match a.sigma_target {
                SigmaArg::Value(v) => v,
                SigmaArg::Auto => {
                    let t = Instant::now();
                    let v = knn_avg_bandwidth(&data, AUTO_KNN)?;
                    timings.bandwidth_s = Some(secs(t));
                    v
                }
            };
            let start = match a.sigma_start {
                Some(s) => s,
                None => default_sigma_start(&data).max(target),
            };
            let schedule = if a.fixed {
                make_schedule(target, target, 1)?
            } else {
                make_schedule(start, target, a.steps)?
            };
            let cfg = KModesConfig {
                k,
                inner_ms_iters: a.i_iters,
                iters_per_sigma: a.j_iters,
                ms_tol: a.ms_tol,
                max_outer_iters: a.max_outer,
                kmeans: kmeans_cfg(a, k),
            };
            cfg.validate()?;
            echo.kmodes = Some(KModesEcho {
                sigma_start: start,
                sigma_target: target,
                sigma_target_auto: a.sigma_target == SigmaArg::Auto,
                steps: a.steps,
                j_iters: a.j_iters,
                i_iters: a.i_iters,
                ms_tol: a.ms_tol,
                fixed: a.fixed,
                max_outer: a.max_outer,
                schedule: schedule.sigmas().to_vec(),
            });

            let t = Instant::now();
            let init = kmeans_run(&data, &cfg.kmeans)?;
            timings.kmeans_s = Some(secs(t));
            diagnostics.kmeans_iters = Some(init.iters);
            diagnostics.kmeans_best_restart = Some(init.best_restart);
            diagnostics.kmeans_empty_cluster_repairs = Some(init.empty_cluster_repairs);
            objective.kmeans = Some(init.objective);

            let t = Instant::now();
            let r = if a.fixed {
                kmodes_fixed_run_from(&data, target, &cfg, init)?
            } else {
                kmodes_run_from(&data, &schedule, &cfg, init)?
            };
            timings.kmodes_s = Some(secs(t));
            record_kmodes(&r, &mut objective, &mut diagnostics, a.fixed);
            if let Some(p) = &a.emit_path {
                write_centroid_path(p, &r.centroid_path)?;
            }
            centroid_path = Some(
                r.centroid_path
                    .iter()
                    .map(|p| PathEntry {
                        sigma: p.sigma,
                        centroids: p.centroids.to_vecs(),
                    })
                    .collect(),
            );
            (r.labels, r.centroids)
        }
        Algo::Gms => {
            let sigma = a
                .sigma
                .ok_or_else(|| CliError::usage("--algo gms requires --sigma"))?;
            if a.k.is_some() {
                return Err(CliError::usage(
                    "--algo gms picks the cluster count itself; drop --k",
                ));
            }
            let cfg = GmsConfig {
                sigma,
                tol: a.ms_tol,
                max_iters: a.ms_max_iters,
                merge_radius_factor: a.merge_radius_factor,
            };
            echo.gms = Some(GmsEcho {
                sigma,
                ms_tol: a.ms_tol,
                ms_max_iters: a.ms_max_iters,
                merge_radius_factor: a.merge_radius_factor,
            });
            let t = Instant::now();
            let r = gms_cluster(&data, &cfg)?;
            timings.gms_s = Some(secs(t));
            mode_count = Some(r.modes.k());
            diagnostics.gms_iters_total = Some(r.iters_total);
            diagnostics.nonconverged_mode_seeks = Some(r.nonconverged);
            (r.labels, r.modes)
        }
    };
    check_finite(&centroids)?;

    save_labels(&labels, &labels_out)?;
    if let Some(p) = &a.centroids_out {
        save_centroids(p, &centroids)?;
    }
    let metrics = truth.as_ref().map(|t| scores(t, &labels)).transpose()?;
    timings.total_s = secs(started);
    let reproduce = reproduce_args(&echo);
    to_json(&RunReport {
        algorithm: a.algo.id(),
        config: echo,
        reproduce,
        objective,
        labels_path: display(&labels_out),
        cluster_count: centroids.k(),
        mode_count,
        cluster_sizes: labels.cluster_sizes(),
        centroids: centroids.to_vecs(),
        centroid_path,
        metrics,
        timings,
        diagnostics,
    })
}

fn record_kmodes(
    r: &KModesResult,
    objective: &mut Objectives,
    diagnostics: &mut Diagnostics,
    fixed: bool,
) {
    objective.kmodes = Some(r.objective);
    let d = &r.diagnostics;
    diagnostics.kmodes_outer_iters = Some(d.outer_iters);
    if fixed {
        diagnostics.kmodes_converged = Some(d.converged);
    }
    diagnostics.nonconverged_mode_seeks = Some(d.nonconverged_modes);
    diagnostics.empty_cluster_events = d
        .empty_clusters
        .iter()
        .map(|e| EmptyEvent {
            sigma_index: e.sigma_index,
            iter: e.iter,
            cluster: e.cluster,
        })
        .collect();
}

/// Command-line arguments equivalent to `echo`, with every derived value
/// (start and target bandwidth) pinned.
fn reproduce_args(echo: &ConfigEcho) -> Vec<String> {
    let mut v: Vec<String> = vec![
        "cluster".into(),
        echo.data.clone(),
        "--algo".into(),
        echo.algo.into(),
    ];
    let mut push = |flag: &str, value: String| {
        v.push(flag.into());
        v.push(value);
    };
    push("--seed", echo.seed.to_string());
    if let Some(k) = echo.k {
        push("--k", k.to_string());
    }
    if let Some(r) = echo.restarts {
        push("--restarts", r.to_string());
    }
    if let Some(m) = echo.max_iters {
        push("--max-iters", m.to_string());
    }
    if let Some(m) = &echo.kmodes {
        push("--sigma-start", format_f64(m.sigma_start));
        push("--sigma-target", format_f64(m.sigma_target));
        push("--steps", m.steps.to_string());
        push("--j-iters", m.j_iters.to_string());
        push("--i-iters", m.i_iters.to_string());
        push("--ms-tol", format_f64(m.ms_tol));
        push("--max-outer", m.max_outer.to_string());
    }
    if let Some(g) = &echo.gms {
        push("--sigma", format_f64(g.sigma));
        push("--ms-tol", format_f64(g.ms_tol));
        push("--ms-max-iters", g.ms_max_iters.to_string());
        push("--merge-radius-factor", format_f64(g.merge_radius_factor));
    }
    if let Some(t) = &echo.truth {
        push("--truth", t.clone());
    }
    push("--labels-out", echo.labels_out.clone());
    if let Some(c) = &echo.centroids_out {
        push("--centroids-out", c.clone());
    }
    if let Some(p) = &echo.emit_path {
        push("--emit-path", p.clone());
    }
    if echo.header {
        v.push("--header".into());
    }
    if echo.kmodes.as_ref().is_some_and(|m| m.fixed) {
        v.push("--fixed".into());
    }
    v
}
