//! Lloyd's algorithm with seeded Forgy initialization and best-of-restarts
//! selection.

use rand::seq::index;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::data::{sq_dist, Centroids, DataMatrix, Labels};
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansConfig {
    pub k: usize,
    pub restarts: usize,
    pub max_iters: usize,
    pub seed: u64,
}

impl KMeansConfig {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            restarts: 20,
            max_iters: 300,
            seed: 0,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.k == 0 {
            return Err(invalid("k", "must be >= 1"));
        }
        if self.k > n {
            return Err(Error::TooManyClusters { k: self.k, n });
        }
        if self.restarts == 0 {
            return Err(invalid("restarts", "must be >= 1"));
        }
        if self.max_iters == 0 {
            return Err(invalid("max_iters", "must be >= 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    pub centroids: Centroids,
    pub labels: Labels,
    /// Sum of squared distances of points to their assigned centroid.
    pub objective: f64,
    /// Update steps taken by the winning restart.
    pub iters: usize,
    /// Objective after the initial assignment and after every iteration of
    /// the winning restart.
    pub objective_trace: Vec<f64>,
    /// Final objective of every restart, in restart order.
    pub restart_objectives: Vec<f64>,
    pub best_restart: usize,
    /// Empty clusters re-seeded during the winning restart.
    pub empty_cluster_repairs: usize,
}

fn check_shapes(data: &DataMatrix, labels: &Labels, centroids: &Centroids) -> Result<()> {
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
                "{} clusters but only {} centroids",
                labels.k_count(),
                centroids.k()
            ),
        ));
    }
    Ok(())
}

/// `E = Σ_n ‖x_n − c_{label(n)}‖²`.
pub fn kmeans_objective(data: &DataMatrix, labels: &Labels, centroids: &Centroids) -> Result<f64> {
    check_shapes(data, labels, centroids)?;
    Ok(objective_unchecked(data, labels.as_slice(), centroids))
}

fn objective_unchecked(data: &DataMatrix, labels: &[usize], centroids: &Centroids) -> f64 {
    data.rows()
        .zip(labels)
        .map(|(x, &l)| sq_dist(x, centroids.row(l)))
        .sum()
}

/// Index of the closest centroid; ties go to the lowest index.
#[inline]
pub(crate) fn nearest(x: &[f64], centroids: &Centroids) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (k, c) in centroids.rows().enumerate() {
        let d = sq_dist(x, c);
        if d < best_d {
            best_d = d;
            best = k;
        }
    }
    best
}

/// Assigns every point to its nearest centroid in Euclidean distance.
pub fn assign_nearest(data: &DataMatrix, centroids: &Centroids) -> Result<Labels> {
    if centroids.dim() != data.dim() {
        return Err(Error::DimensionMismatch {
            expected: data.dim(),
            got: centroids.dim(),
        });
    }
    Ok(
        Labels::new(assign_unchecked(data, centroids), centroids.k())
            .expect("nearest() returns a valid index"),
    )
}

pub(crate) fn assign_unchecked(data: &DataMatrix, centroids: &Centroids) -> Vec<usize> {
    data.as_slice()
        .par_chunks(data.dim())
        .map(|x| nearest(x, centroids))
        .collect()
}

/// Runs `cfg.restarts` seeded restarts and keeps the one with the smallest
/// objective (lowest restart index on ties).
pub fn kmeans_run(data: &DataMatrix, cfg: &KMeansConfig) -> Result<KMeansResult> {
    cfg.validate(data.n())?;
    let runs: Vec<KMeansResult> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(r as u64);
            let picks = index::sample(&mut rng, data.n(), cfg.k).into_vec();
            let init = data.select(&picks).expect("k >= 1 rows selected");
            let init =
                Centroids::new(init.as_slice().to_vec(), cfg.k, data.dim()).expect("shape checked");
            lloyd(data, init, cfg.max_iters)
        })
        .collect();

    let restart_objectives: Vec<f64> = runs.iter().map(|r| r.objective).collect();
    let best_restart = restart_objectives
        .iter()
        .enumerate()
        .fold(0, |best, (i, &e)| {
            if e < restart_objectives[best] {
                i
            } else {
                best
            }
        });
    let mut best = runs.into_iter().nth(best_restart).expect("restarts >= 1");
    best.restart_objectives = restart_objectives;
    best.best_restart = best_restart;
    Ok(best)
}

/// A single Lloyd run from the given centroids.
pub fn kmeans_from(data: &DataMatrix, init: Centroids, max_iters: usize) -> Result<KMeansResult> {
    if init.dim() != data.dim() {
        return Err(Error::DimensionMismatch {
            expected: data.dim(),
            got: init.dim(),
        });
    }
    if init.k() > data.n() {
        return Err(Error::TooManyClusters {
            k: init.k(),
            n: data.n(),
        });
    }
    if max_iters == 0 {
        return Err(invalid("max_iters", "must be >= 1"));
    }
    let mut result = lloyd(data, init, max_iters);
    result.restart_objectives = vec![result.objective];
    Ok(result)
}

fn lloyd(data: &DataMatrix, mut centroids: Centroids, max_iters: usize) -> KMeansResult {
    let k = centroids.k();
    let mut labels = assign_unchecked(data, &centroids);
    let mut trace = vec![objective_unchecked(data, &labels, &centroids)];
    let mut iters = 0;
    let mut repairs = 0;
    while iters < max_iters {
        iters += 1;
        repairs += update_means(data, &labels, &mut centroids);
        let next = assign_unchecked(data, &centroids);
        trace.push(objective_unchecked(data, &next, &centroids));
        let done = next == labels;
        labels = next;
        if done {
            break;
        }
    }
    KMeansResult {
        objective: *trace.last().expect("trace is never empty"),
        labels: Labels::new(labels, k).expect("labels come from nearest()"),
        centroids,
        iters,
        objective_trace: trace,
        restart_objectives: Vec::new(),
        best_restart: 0,
        empty_cluster_repairs: repairs,
    }
}

/// Moves each centroid to the mean of its points. An empty cluster is
/// re-seeded at the point farthest from its own (updated) centroid; points
/// already used for re-seeding are skipped. Returns the number of re-seeds.
fn update_means(data: &DataMatrix, labels: &[usize], centroids: &mut Centroids) -> usize {
    let dim = data.dim();
    let k = centroids.k();
    let mut sums = vec![0.0; k * dim];
    let mut counts = vec![0usize; k];
    for (x, &l) in data.rows().zip(labels) {
        counts[l] += 1;
        for (s, &v) in sums[l * dim..(l + 1) * dim].iter_mut().zip(x) {
            *s += v;
        }
    }
    let mut empty = Vec::new();
    for j in 0..k {
        if counts[j] == 0 {
            empty.push(j);
            continue;
        }
        let inv = counts[j] as f64;
        for (c, s) in centroids
            .row_mut(j)
            .iter_mut()
            .zip(&sums[j * dim..(j + 1) * dim])
        {
            *c = s / inv;
        }
    }
    if empty.is_empty() {
        return 0;
    }
    let mut dist: Vec<f64> = data
        .rows()
        .zip(labels)
        .map(|(x, &l)| sq_dist(x, centroids.row(l)))
        .collect();
    for &j in &empty {
        let far = dist
            .iter()
            .enumerate()
            .fold(0, |best, (i, &d)| if d > dist[best] { i } else { best });
        centroids.row_mut(j).copy_from_slice(data.row(far));
        dist[far] = f64::NEG_INFINITY;
    }
    empty.len()
}
