use std::fmt::Write as _;
use std::path::Path;

use modecluster::data::format_f64;
use modecluster::{
    adjusted_rand_index, gms_mode_count_scan, knn_avg_bandwidth, load_csv, load_labels,
    normalized_mutual_information, save_csv, save_labels, Centroids, DegreeMixture, GeneratorSpec,
    GmsConfig, PathPoint,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{BandwidthArgs, DatasetKind, EvaluateArgs, GenerateArgs, GmsScanArgs};
use crate::{display, sibling, to_json, write_text, CliError, CliResult};

pub(crate) fn generate(a: &GenerateArgs) -> CliResult<String> {
    let spec = generator_spec(a)?;
    let g = spec.generate()?;
    let labels_out = a
        .labels_out
        .clone()
        .unwrap_or_else(|| sibling(&a.out, ".labels.csv"));
    save_csv(&g.data, &a.out)?;
    save_labels(&g.labels, &labels_out)?;
    to_json(&json!({
        "kind": spec.kind(),
        "params": describe_spec(&spec),
        "n": g.data.n(),
        "dim": g.data.dim(),
        "data_path": display(&a.out),
        "labels_path": display(&labels_out),
        "warnings": g.warnings,
    }))
}

fn generator_spec(a: &GenerateArgs) -> CliResult<GeneratorSpec> {
    let degree_only = [
        a.n_gauss.is_some(),
        a.n_power.is_some(),
        a.power_exponent.is_some(),
        a.power_xmin.is_some(),
        a.power_xmax.is_some(),
    ];
    if a.kind != DatasetKind::DegreeMixture && degree_only.contains(&true) {
        return Err(CliError::usage(
            "--n-gauss/--n-power/--power-* only apply to degree-mixture",
        ));
    }
    let spec = match a.kind {
        DatasetKind::GaussianBlobs => {
            let GeneratorSpec::GaussianBlobs {
                centers,
                points_per_center,
                stddev,
                ..
            } = GeneratorSpec::three_gaussians(a.seed)
            else {
                unreachable!()
            };
            let points_per_center = a.n.map_or(points_per_center, |n| vec![n; centers.len()]);
            GeneratorSpec::GaussianBlobs {
                centers,
                points_per_center,
                stddev: a.noise.unwrap_or(stddev),
                seed: a.seed,
            }
        }
        DatasetKind::TwoMoons => {
            let GeneratorSpec::TwoMoons {
                n_per_moon, noise, ..
            } = GeneratorSpec::two_moons(a.seed)
            else {
                unreachable!()
            };
            GeneratorSpec::TwoMoons {
                n_per_moon: a.n.unwrap_or(n_per_moon),
                noise: a.noise.unwrap_or(noise),
                seed: a.seed,
            }
        }
        DatasetKind::DegreeMixture => {
            if a.n.is_some() || a.noise.is_some() {
                return Err(CliError::usage(
                    "degree-mixture takes --n-gauss/--n-power instead of --n/--noise",
                ));
            }
            let d = DegreeMixture::default();
            GeneratorSpec::DegreeMixture(DegreeMixture {
                n_gauss: a.n_gauss.unwrap_or(d.n_gauss),
                n_power: a.n_power.unwrap_or(d.n_power),
                power_exponent: a.power_exponent.unwrap_or(d.power_exponent),
                power_xmin: a.power_xmin.unwrap_or(d.power_xmin),
                power_xmax: a.power_xmax.unwrap_or(d.power_xmax),
                seed: a.seed,
                ..d
            })
        }
    };
    Ok(spec)
}

pub(crate) fn describe_spec(spec: &GeneratorSpec) -> Value {
    match spec {
        GeneratorSpec::GaussianBlobs {
            centers,
            points_per_center,
            stddev,
            seed,
        } => json!({
            "centers": centers,
            "points_per_center": points_per_center,
            "stddev": stddev,
            "seed": seed,
        }),
        GeneratorSpec::TwoMoons {
            n_per_moon,
            noise,
            seed,
        } => json!({
            "n_per_moon": n_per_moon,
            "noise": noise,
            "seed": seed,
        }),
        GeneratorSpec::DegreeMixture(d) => json!({
            "n_gauss": d.n_gauss,
            "gauss_mean": d.gauss_mean,
            "gauss_std": d.gauss_std,
            "n_power": d.n_power,
            "power_exponent": d.power_exponent,
            "power_xmin": d.power_xmin,
            "power_xmax": d.power_xmax,
            "seed": d.seed,
        }),
    }
}

#[derive(Debug, Serialize)]
pub(crate) struct Scores {
    pub ari: f64,
    pub nmi: f64,
}

pub(crate) fn scores(truth: &modecluster::Labels, pred: &modecluster::Labels) -> CliResult<Scores> {
    Ok(Scores {
        ari: adjusted_rand_index(truth, pred)?,
        nmi: normalized_mutual_information(truth, pred)?,
    })
}

pub(crate) fn evaluate(a: &EvaluateArgs) -> CliResult<String> {
    let truth = load_labels(&a.truth)?;
    let pred = load_labels(&a.pred)?;
    to_json(&scores(&truth, &pred)?)
}

pub(crate) fn bandwidth(a: &BandwidthArgs) -> CliResult<String> {
    let data = load_csv(&a.data, a.header)?;
    Ok(knn_avg_bandwidth(&data, a.knn)?.to_string())
}

pub(crate) fn gms_scan(a: &GmsScanArgs) -> CliResult<String> {
    let data = load_csv(&a.data, a.header)?;
    let base = GmsConfig {
        tol: a.ms_tol,
        max_iters: a.ms_max_iters,
        merge_radius_factor: a.merge_radius_factor,
        ..GmsConfig::new(a.sigma_lo)
    };
    let scan = gms_mode_count_scan(&data, a.sigma_lo, a.sigma_hi, a.steps, a.target_k, &base)?;
    let points: Vec<Value> = scan
        .points
        .iter()
        .map(|p| json!({ "sigma": p.sigma, "modes": p.modes }))
        .collect();
    to_json(&json!({
        "data": display(&a.data),
        "sigma_lo": a.sigma_lo,
        "sigma_hi": a.sigma_hi,
        "steps": a.steps,
        "target_k": a.target_k,
        "points": points,
        "best_sigma": scan.best_sigma,
    }))
}

/// `sigma,cluster,dim_0,..` with one row per centroid per bandwidth.
pub(crate) fn write_centroid_path(path: &Path, snapshots: &[PathPoint]) -> CliResult<()> {
    let dim = snapshots.first().map_or(0, |p| p.centroids.dim());
    let mut out = String::from("sigma,cluster");
    for d in 0..dim {
        write!(out, ",dim_{d}").unwrap();
    }
    out.push('\n');
    for snap in snapshots {
        for (k, row) in snap.centroids.rows().enumerate() {
            write!(out, "{},{k}", format_f64(snap.sigma)).unwrap();
            for v in row {
                write!(out, ",{}", format_f64(*v)).unwrap();
            }
            out.push('\n');
        }
    }
    write_text(path, &out)
}

pub(crate) fn save_centroids(path: &Path, c: &Centroids) -> CliResult<()> {
    Ok(save_csv(&c.to_data()?, path)?)
}

pub(crate) fn check_finite(c: &Centroids) -> CliResult<()> {
    if c.as_slice().iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(CliError::numerical("non-finite centroid coordinates"))
    }
}
