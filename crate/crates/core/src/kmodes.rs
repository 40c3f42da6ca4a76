//! K-modes clustering: maximize `L(R, C) = Σ_n G(‖(x_n − c_{r(n)})/σ‖²)`
//! by alternating a nearest-centroid assignment with a per-cluster
//! mean-shift mode step, and follow the optimum from large to small σ.
//!
//! As σ → ∞ the mode step reduces to the cluster mean (K-means); as σ → 0
//! every centroid is pulled onto a data point of its cluster. The homotopy
//! driver starts from the best K-means solution (the σ = ∞ optimum) and
//! runs `J` fixed-σ iterations at each value of a decreasing schedule.
//! Given that initialization it is fully deterministic.
//!
//! The mode step runs mean-shift for at most `I` iterations. With `I` large
//! enough for every mode search to converge, the mode is a deterministic
//! function of the assignment and the fixed-σ loop terminates in finitely
//! many steps; with a small `I` the objective still never decreases but
//! finite termination is no longer guaranteed.

use rayon::prelude::*;

use crate::data::{sq_dist, Centroids, DataMatrix, Labels};
use crate::error::{invalid, Error, Result};
use crate::kde::{Kde, ModeSeekConfig};
use crate::kmeans::{assign_unchecked, kmeans_run, KMeansConfig, KMeansResult};

#[derive(Debug, Clone, PartialEq)]
pub struct KModesConfig {
    pub k: usize,
    /// `I`: cap on mean-shift iterations per centroid per mode step.
    pub inner_ms_iters: usize,
    /// `J`: fixed-σ iterations per schedule value.
    pub iters_per_sigma: usize,
    /// Relative tolerance of the mode step (see [`ModeSeekConfig::tol`]).
    pub ms_tol: f64,
    /// Outer-iteration cap for [`kmodes_fixed_run`].
    pub max_outer_iters: usize,
    /// Restarts used to find the initial K-means optimum.
    pub kmeans: KMeansConfig,
}

impl KModesConfig {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            inner_ms_iters: 100,
            iters_per_sigma: 2,
            ms_tol: 1e-8,
            max_outer_iters: 500,
            kmeans: KMeansConfig::new(k),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(invalid("k", "must be >= 1"));
        }
        if self.kmeans.k != self.k {
            return Err(invalid(
                "kmeans.k",
                format!("{} differs from k = {}", self.kmeans.k, self.k),
            ));
        }
        if self.inner_ms_iters == 0 {
            return Err(invalid("inner_ms_iters", "must be >= 1"));
        }
        if self.iters_per_sigma == 0 {
            return Err(invalid("iters_per_sigma", "must be >= 1"));
        }
        if self.ms_tol.is_nan() || self.ms_tol <= 0.0 {
            return Err(invalid(
                "ms_tol",
                format!("must be > 0, got {}", self.ms_tol),
            ));
        }
        if self.max_outer_iters == 0 {
            return Err(invalid("max_outer_iters", "must be >= 1"));
        }
        Ok(())
    }

    fn mode_seek(&self) -> ModeSeekConfig {
        ModeSeekConfig {
            tol: self.ms_tol,
            max_iters: self.inner_ms_iters,
        }
    }
}

/// Strictly decreasing sequence of positive bandwidths.
#[derive(Debug, Clone, PartialEq)]
pub struct HomotopySchedule {
    sigmas: Vec<f64>,
}

impl HomotopySchedule {
    pub fn new(sigmas: Vec<f64>) -> Result<Self> {
        if sigmas.is_empty() {
            return Err(invalid("schedule", "needs at least one bandwidth"));
        }
        if let Some(s) = sigmas.iter().find(|s| !(s.is_finite() && **s > 0.0)) {
            return Err(invalid(
                "schedule",
                format!("bandwidth {s} is not finite and positive"),
            ));
        }
        if sigmas.windows(2).any(|w| w[1] >= w[0]) {
            return Err(invalid(
                "schedule",
                "bandwidths must be strictly decreasing",
            ));
        }
        Ok(Self { sigmas })
    }

    pub fn sigmas(&self) -> &[f64] {
        &self.sigmas
    }

    pub fn len(&self) -> usize {
        self.sigmas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigmas.is_empty()
    }

    pub fn target(&self) -> f64 {
        *self.sigmas.last().expect("schedule is nonempty")
    }
}

/// `steps` geometrically spaced bandwidths from `start` down to `target`
/// (both included exactly). A single step yields `[target]`.
pub fn make_schedule(start: f64, target: f64, steps: usize) -> Result<HomotopySchedule> {
    if steps == 0 {
        return Err(invalid("steps", "must be >= 1"));
    }
    if !(target > 0.0 && target.is_finite() && start.is_finite()) {
        return Err(invalid(
            "sigma_target",
            format!("must be finite and > 0, got {target}"),
        ));
    }
    if start < target {
        return Err(invalid(
            "sigma_start",
            format!("{start} is below the target {target}"),
        ));
    }
    if steps == 1 {
        return HomotopySchedule::new(vec![target]);
    }
    let log_ratio = (target / start).ln();
    let last = (steps - 1) as f64;
    let sigmas = (0..steps)
        .map(|i| match i {
            0 => start,
            i if i == steps - 1 => target,
            i => start * (log_ratio * i as f64 / last).exp(),
        })
        .collect();
    HomotopySchedule::new(sigmas)
}

/// Bounding-box diagonal of the data: the default first bandwidth of a
/// homotopy, large enough that every cluster kde is unimodal near its mean.
pub fn default_sigma_start(data: &DataMatrix) -> f64 {
    data.diagonal()
}

/// `L = Σ_n G(‖(x_n − c_{label(n)})/σ‖²)` with the unnormalized kernel.
pub fn kmodes_objective(
    data: &DataMatrix,
    labels: &Labels,
    centroids: &Centroids,
    sigma: f64,
) -> Result<f64> {
    check_state(data, labels, centroids)?;
    check_sigma(sigma)?;
    Ok(objective_unchecked(
        data,
        labels.as_slice(),
        centroids,
        sigma,
    ))
}

fn objective_unchecked(
    data: &DataMatrix,
    labels: &[usize],
    centroids: &Centroids,
    sigma: f64,
) -> f64 {
    data.rows()
        .zip(labels)
        .map(|(x, &l)| (-0.5 * (sq_dist(x, centroids.row(l)) / sigma / sigma)).exp())
        .sum()
}

fn check_sigma(sigma: f64) -> Result<()> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(invalid(
            "sigma",
            format!("must be finite and > 0, got {sigma}"),
        ));
    }
    Ok(())
}

fn check_state(data: &DataMatrix, labels: &Labels, centroids: &Centroids) -> Result<()> {
    if labels.len() != data.n() {
        return Err(Error::LengthMismatch {
            left: labels.len(),
            right: data.n(),
        });
    }
    if centroids.dim() != data.dim() {
        return Err(Error::DimensionMismatch {
            expected: data.dim(),
            got: centroids.dim(),
        });
    }
    if labels.k_count() > centroids.k() {
        return Err(invalid(
            "labels",
            format!(
                "{} clusters but {} centroids",
                labels.k_count(),
                centroids.k()
            ),
        ));
    }
    Ok(())
}

/// Outcome of one assignment + mode step.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedSigmaStep {
    pub labels: Labels,
    pub centroids: Centroids,
    /// Objective after the assignment step, before the mode step.
    pub assigned_objective: f64,
    /// Objective of the new state.
    pub objective: f64,
    /// Clusters left without points; their centroids were not moved.
    pub empty_clusters: Vec<usize>,
    /// Mode searches that hit the `I` cap before meeting the tolerance.
    pub nonconverged_modes: usize,
}

/// One fixed-σ iteration: assign every point to its nearest centroid, then
/// move each nonempty cluster's centroid uphill on that cluster's kde by
/// mean-shift started at the current centroid.
pub fn kmodes_fixed_sigma_iter(
    data: &DataMatrix,
    labels: &Labels,
    centroids: &Centroids,
    sigma: f64,
    cfg: &KModesConfig,
) -> Result<FixedSigmaStep> {
    check_state(data, labels, centroids)?;
    check_sigma(sigma)?;
    cfg.validate()?;
    Ok(fixed_sigma_iter(data, centroids, sigma, &cfg.mode_seek()))
}

fn fixed_sigma_iter(
    data: &DataMatrix,
    centroids: &Centroids,
    sigma: f64,
    ms: &ModeSeekConfig,
) -> FixedSigmaStep {
    let k = centroids.k();
    let dim = data.dim();
    let assignment = assign_unchecked(data, centroids);
    let assigned_objective = objective_unchecked(data, &assignment, centroids, sigma);

    let mut members: Vec<Vec<f64>> = vec![Vec::new(); k];
    for (x, &l) in data.rows().zip(&assignment) {
        members[l].extend_from_slice(x);
    }
    let moved: Vec<Option<(Vec<f64>, bool)>> = members
        .par_iter()
        .enumerate()
        .map(|(j, pts)| {
            if pts.is_empty() {
                return None;
            }
            let kde = Kde::from_slice(pts, dim, sigma).expect("nonempty support, valid sigma");
            let r = kde
                .mode_seek(centroids.row(j), ms)
                .expect("dimension and config checked");
            Some((r.mode, r.converged))
        })
        .collect();

    let mut next = centroids.clone();
    let mut empty_clusters = Vec::new();
    let mut nonconverged_modes = 0;
    for (j, m) in moved.into_iter().enumerate() {
        match m {
            Some((mode, converged)) => {
                next.row_mut(j).copy_from_slice(&mode);
                nonconverged_modes += usize::from(!converged);
            }
            None => empty_clusters.push(j),
        }
    }
    let objective = objective_unchecked(data, &assignment, &next, sigma);
    FixedSigmaStep {
        labels: Labels::new(assignment, k).expect("nearest() returns a valid index"),
        centroids: next,
        assigned_objective,
        objective,
        empty_clusters,
        nonconverged_modes,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TracePhase {
    /// State carried in from the previous bandwidth, evaluated at this one.
    Entry,
    /// After the assignment step.
    Assign,
    /// After the mode step.
    Mode,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub sigma_index: usize,
    pub sigma: f64,
    /// Outer iteration at this bandwidth, starting at 1 (0 for `Entry`).
    pub iter: usize,
    pub phase: TracePhase,
    pub objective: f64,
}

/// Centroids at the end of one schedule value.
#[derive(Debug, Clone, PartialEq)]
pub struct PathPoint {
    pub sigma: f64,
    pub centroids: Centroids,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EmptyClusterEvent {
    pub sigma_index: usize,
    pub iter: usize,
    pub cluster: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct KModesDiagnostics {
    pub empty_clusters: Vec<EmptyClusterEvent>,
    pub nonconverged_modes: usize,
    pub outer_iters: usize,
    /// For fixed-σ runs: whether the stopping rule fired before the cap.
    /// Always true for homotopy runs.
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KModesResult {
    pub labels: Labels,
    pub centroids: Centroids,
    /// `L` of the final state at the final bandwidth.
    pub objective: f64,
    pub sigma: f64,
    /// One snapshot per schedule value.
    pub centroid_path: Vec<PathPoint>,
    pub objective_trace: Vec<TracePoint>,
    /// The K-means solution the run started from.
    pub init: KMeansResult,
    pub diagnostics: KModesDiagnostics,
}

/// Homotopy K-modes: best-of-restarts K-means, then `J` fixed-σ iterations
/// at every bandwidth of `schedule`.
pub fn kmodes_run(
    data: &DataMatrix,
    schedule: &HomotopySchedule,
    cfg: &KModesConfig,
) -> Result<KModesResult> {
    cfg.validate()?;
    let init = kmeans_run(data, &cfg.kmeans)?;
    kmodes_run_from(data, schedule, cfg, init)
}

/// Homotopy K-modes from a given K-means solution.
pub fn kmodes_run_from(
    data: &DataMatrix,
    schedule: &HomotopySchedule,
    cfg: &KModesConfig,
    init: KMeansResult,
) -> Result<KModesResult> {
    cfg.validate()?;
    check_init(data, cfg, &init)?;
    let ms = cfg.mode_seek();
    let mut labels = init.labels.clone();
    let mut centroids = init.centroids.clone();
    let mut trace = Vec::new();
    let mut path = Vec::with_capacity(schedule.len());
    let mut diagnostics = KModesDiagnostics {
        converged: true,
        ..KModesDiagnostics::default()
    };
    let mut objective = 0.0;

    for (sigma_index, &sigma) in schedule.sigmas().iter().enumerate() {
        objective = objective_unchecked(data, labels.as_slice(), &centroids, sigma);
        trace.push(TracePoint {
            sigma_index,
            sigma,
            iter: 0,
            phase: TracePhase::Entry,
            objective,
        });
        for iter in 1..=cfg.iters_per_sigma {
            let step = fixed_sigma_iter(data, &centroids, sigma, &ms);
            record(
                &mut trace,
                &mut diagnostics,
                sigma_index,
                sigma,
                iter,
                &step,
            );
            objective = step.objective;
            labels = step.labels;
            centroids = step.centroids;
        }
        path.push(PathPoint {
            sigma,
            centroids: centroids.clone(),
        });
    }

    Ok(KModesResult {
        labels,
        centroids,
        objective,
        sigma: schedule.target(),
        centroid_path: path,
        objective_trace: trace,
        init,
        diagnostics,
    })
}

/// Fixed-σ K-modes from the best K-means solution, iterated until the
/// labels stop changing and no centroid moves more than `ms_tol · σ`.
pub fn kmodes_fixed_run(data: &DataMatrix, sigma: f64, cfg: &KModesConfig) -> Result<KModesResult> {
    cfg.validate()?;
    check_sigma(sigma)?;
    let init = kmeans_run(data, &cfg.kmeans)?;
    kmodes_fixed_run_from(data, sigma, cfg, init)
}

pub fn kmodes_fixed_run_from(
    data: &DataMatrix,
    sigma: f64,
    cfg: &KModesConfig,
    init: KMeansResult,
) -> Result<KModesResult> {
    cfg.validate()?;
    check_sigma(sigma)?;
    check_init(data, cfg, &init)?;
    let ms = cfg.mode_seek();
    let mut labels = init.labels.clone();
    let mut centroids = init.centroids.clone();
    let mut objective = objective_unchecked(data, labels.as_slice(), &centroids, sigma);
    let mut trace = vec![TracePoint {
        sigma_index: 0,
        sigma,
        iter: 0,
        phase: TracePhase::Entry,
        objective,
    }];
    let mut diagnostics = KModesDiagnostics::default();

    for iter in 1..=cfg.max_outer_iters {
        let step = fixed_sigma_iter(data, &centroids, sigma, &ms);
        record(&mut trace, &mut diagnostics, 0, sigma, iter, &step);
        let stable = step.labels == labels
            && step.centroids.max_displacement(&centroids) <= cfg.ms_tol * sigma;
        objective = step.objective;
        labels = step.labels;
        centroids = step.centroids;
        if stable {
            diagnostics.converged = true;
            break;
        }
    }

    Ok(KModesResult {
        labels,
        centroid_path: vec![PathPoint {
            sigma,
            centroids: centroids.clone(),
        }],
        centroids,
        objective,
        sigma,
        objective_trace: trace,
        init,
        diagnostics,
    })
}

fn check_init(data: &DataMatrix, cfg: &KModesConfig, init: &KMeansResult) -> Result<()> {
    if cfg.k > data.n() {
        return Err(Error::TooManyClusters {
            k: cfg.k,
            n: data.n(),
        });
    }
    if init.centroids.k() != cfg.k {
        return Err(invalid(
            "init",
            format!("{} centroids for k = {}", init.centroids.k(), cfg.k),
        ));
    }
    check_state(data, &init.labels, &init.centroids)
}

fn record(
    trace: &mut Vec<TracePoint>,
    diagnostics: &mut KModesDiagnostics,
    sigma_index: usize,
    sigma: f64,
    iter: usize,
    step: &FixedSigmaStep,
) {
    for (phase, objective) in [
        (TracePhase::Assign, step.assigned_objective),
        (TracePhase::Mode, step.objective),
    ] {
        trace.push(TracePoint {
            sigma_index,
            sigma,
            iter,
            phase,
            objective,
        });
    }
    diagnostics.outer_iters += 1;
    diagnostics.nonconverged_modes += step.nonconverged_modes;
    diagnostics
        .empty_clusters
        .extend(
            step.empty_clusters
                .iter()
                .map(|&cluster| EmptyClusterEvent {
                    sigma_index,
                    iter,
                    cluster,
                }),
        );
}
