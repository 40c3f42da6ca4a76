use std::path::PathBuf;
use std::time::Instant;

use modecluster::{
    gms_cluster, kmodes_run, make_schedule, save_csv, save_labels, GeneratorSpec, GmsConfig,
    KMeansConfig, KModesConfig, Kde, Labels,
};
use serde_json::{json, Value};

use crate::args::{Experiment, ReproduceArgs};
use crate::commands::{describe_spec, save_centroids, scores, write_centroid_path};
use crate::{display, to_json, write_text, CliError, CliResult};

/// Dataset, cluster count, homotopy schedule and mean-shift bandwidth of
/// each toy experiment.
struct Setup {
    spec: GeneratorSpec,
    k: usize,
    sigma_start: f64,
    sigma_target: f64,
    steps: usize,
    gms_sigma: f64,
}

fn setup(e: Experiment, seed: u64) -> Setup {
    match e {
        Experiment::ThreeGaussians => Setup {
            spec: GeneratorSpec::three_gaussians(seed),
            k: 2,
            sigma_start: 3.0,
            sigma_target: 1.0,
            steps: 20,
            gms_sigma: 1.0,
        },
        Experiment::TwoMoons => Setup {
            spec: GeneratorSpec::two_moons(seed),
            k: 2,
            sigma_start: 1.0,
            sigma_target: 0.1,
            steps: 20,
            gms_sigma: 0.1,
        },
        Experiment::Degree => Setup {
            spec: GeneratorSpec::degree_mixture(seed),
            k: 2,
            sigma_start: 200.0,
            sigma_target: 1.0,
            steps: 40,
            gms_sigma: 1.0,
        },
    }
}

pub(crate) fn reproduce(a: &ReproduceArgs) -> CliResult<String> {
    let started = Instant::now();
    let id = a.experiment.id();
    let dir = a
        .out_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("reproduce-{id}")));
    std::fs::create_dir_all(&dir)
        .map_err(|e| CliError::data(format!("cannot create {}: {e}", dir.display())))?;
    let s = setup(a.experiment, a.seed);

    let g = s.spec.generate()?;
    let data = &g.data;
    let truth = &g.labels;
    let schedule = make_schedule(s.sigma_start, s.sigma_target, s.steps)?;
    let cfg = KModesConfig {
        kmeans: KMeansConfig {
            seed: a.seed,
            ..KMeansConfig::new(s.k)
        },
        ..KModesConfig::new(s.k)
    };

    let t = Instant::now();
    let km = kmodes_run(data, &schedule, &cfg)?;
    let kmodes_s = t.elapsed().as_secs_f64();
    let t = Instant::now();
    let gms = gms_cluster(data, &GmsConfig::new(s.gms_sigma))?;
    let gms_s = t.elapsed().as_secs_f64();
    let kmeans = &km.init;

    let file = |name: &str| -> PathBuf { dir.join(name) };
    let files = [
        "data.csv",
        "truth.labels.csv",
        "kmeans.labels.csv",
        "kmeans.centroids.csv",
        "kmodes.labels.csv",
        "kmodes.centroids.csv",
        "kmodes.path.csv",
        "gms.labels.csv",
        "gms.modes.csv",
        "manifest.json",
    ];
    save_csv(data, file(files[0]))?;
    save_labels(truth, file(files[1]))?;
    save_labels(&kmeans.labels, file(files[2]))?;
    save_centroids(&file(files[3]), &kmeans.centroids)?;
    save_labels(&km.labels, file(files[4]))?;
    save_centroids(&file(files[5]), &km.centroids)?;
    write_centroid_path(&file(files[6]), &km.centroid_path)?;
    save_labels(&gms.labels, file(files[7]))?;
    save_centroids(&file(files[8]), &gms.modes)?;

    let manifest = json!({
        "experiment": id,
        "seed": a.seed,
        "command": ["reproduce", id, "--seed", a.seed.to_string(), "--out-dir", display(&dir)],
        "dataset": {
            "kind": s.spec.kind(),
            "params": describe_spec(&s.spec),
            "n": data.n(),
            "dim": data.dim(),
            "warnings": g.warnings,
        },
        "k": s.k,
        "kmeans": {
            "restarts": cfg.kmeans.restarts,
            "objective": kmeans.objective,
            "centroids": kmeans.centroids.to_vecs(),
            "metrics": scores(truth, &kmeans.labels)?,
        },
        "kmodes": {
            "schedule": schedule.sigmas(),
            "j_iters": cfg.iters_per_sigma,
            "i_iters": cfg.inner_ms_iters,
            "objective": km.objective,
            "centroids": km.centroids.to_vecs(),
            "metrics": scores(truth, &km.labels)?,
            "nonconverged_mode_seeks": km.diagnostics.nonconverged_modes,
            "empty_cluster_events": km.diagnostics.empty_clusters.len(),
        },
        "gms": {
            "sigma": s.gms_sigma,
            "mode_count": gms.modes.k(),
            "nonconverged": gms.nonconverged,
            "metrics": scores(truth, &gms.labels)?,
        },
        "density": density_table(data, &km.labels, &km.centroids, &kmeans.centroids, s.sigma_target)?,
        "timings": {
            "kmodes_s": kmodes_s,
            "gms_s": gms_s,
            "total_s": started.elapsed().as_secs_f64(),
        },
        "files": files,
    });
    let text = to_json(&manifest)?;
    write_text(&file("manifest.json"), &text)?;
    Ok(text)
}

/// For every K-modes cluster: its kde at the K-modes centroid and at the
/// K-means centroid it started from.
fn density_table(
    data: &modecluster::DataMatrix,
    labels: &Labels,
    kmodes: &modecluster::Centroids,
    kmeans: &modecluster::Centroids,
    sigma: f64,
) -> CliResult<Value> {
    let mut rows = Vec::new();
    for (k, members) in labels.members().iter().enumerate() {
        if members.is_empty() {
            continue;
        }
        let pts = data.select(members)?;
        let kde = Kde::new(&pts, sigma)?;
        rows.push(json!({
            "cluster": k,
            "size": members.len(),
            "kde_at_kmodes": kde.eval(kmodes.row(k))?,
            "kde_at_kmeans": kde.eval(kmeans.row(k))?,
        }));
    }
    Ok(Value::Array(rows))
}
