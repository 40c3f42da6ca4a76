//! Gaussian mean-shift clustering: every point climbs the kde of the whole
//! dataset, and endpoints closer than `merge_radius_factor · σ` (single
//! linkage) share a mode.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::data::{sq_dist, Centroids, DataMatrix, Labels};
use crate::error::{invalid, Result};
use crate::kde::{Kde, ModeSeekConfig};
use crate::kmodes::make_schedule;

#[derive(Debug, Clone, PartialEq)]
pub struct GmsConfig {
    pub sigma: f64,
    pub tol: f64,
    pub max_iters: usize,
    pub merge_radius_factor: f64,
}

impl GmsConfig {
    pub fn new(sigma: f64) -> Self {
        Self {
            sigma,
            tol: 1e-8,
            max_iters: 1000,
            merge_radius_factor: 1e-2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(invalid(
                "sigma",
                format!("must be finite and > 0, got {}", self.sigma),
            ));
        }
        if !(self.merge_radius_factor > 0.0 && self.merge_radius_factor.is_finite()) {
            return Err(invalid(
                "merge_radius_factor",
                format!("must be finite and > 0, got {}", self.merge_radius_factor),
            ));
        }
        self.mode_seek().validate()
    }

    fn mode_seek(&self) -> ModeSeekConfig {
        ModeSeekConfig {
            tol: self.tol,
            max_iters: self.max_iters,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GmsResult {
    /// Mean of the merged endpoints of each cluster.
    pub modes: Centroids,
    /// Clusters are numbered in order of first appearance in the data.
    pub labels: Labels,
    pub iters_total: usize,
    /// Points whose mode search hit `max_iters`.
    pub nonconverged: usize,
}

pub fn gms_cluster(data: &DataMatrix, cfg: &GmsConfig) -> Result<GmsResult> {
    cfg.validate()?;
    let kde = Kde::new(data, cfg.sigma)?;
    let ms = cfg.mode_seek();
    // Identical rows share a trajectory; seek once per distinct row.
    let mut first_of: HashMap<Vec<u64>, usize> = HashMap::new();
    let mut distinct = Vec::new();
    let slot: Vec<usize> = data
        .rows()
        .enumerate()
        .map(|(n, x)| {
            let key = x.iter().map(|v| (v + 0.0).to_bits()).collect();
            *first_of.entry(key).or_insert_with(|| {
                distinct.push(n);
                distinct.len() - 1
            })
        })
        .collect();
    let seeks: Vec<_> = distinct
        .par_iter()
        .map(|&n| {
            kde.mode_seek(data.row(n), &ms)
                .expect("row has data dimension")
        })
        .collect();
    let iters_total = slot.iter().map(|&s| seeks[s].iters).sum();
    let nonconverged = slot.iter().filter(|&&s| !seeks[s].converged).count();
    let ends: Vec<Vec<f64>> = slot.iter().map(|&s| seeks[s].mode.clone()).collect();

    let assignment = merge(&ends, cfg.merge_radius_factor * cfg.sigma);
    let k = assignment.iter().max().map_or(0, |m| m + 1);
    let dim = data.dim();
    let mut sums = vec![0.0; k * dim];
    let mut counts = vec![0usize; k];
    for (end, &l) in ends.iter().zip(&assignment) {
        counts[l] += 1;
        for (s, v) in sums[l * dim..(l + 1) * dim].iter_mut().zip(end) {
            *s += v;
        }
    }
    for (chunk, &c) in sums.chunks_exact_mut(dim).zip(&counts) {
        chunk.iter_mut().for_each(|s| *s /= c as f64);
    }
    Ok(GmsResult {
        modes: Centroids::new(sums, k, dim)?,
        labels: Labels::new(assignment, k)?,
        iters_total,
        nonconverged,
    })
}

/// Single-linkage components of `points` at distance `radius`, labelled
/// by first appearance.
fn merge(points: &[Vec<f64>], radius: f64) -> Vec<usize> {
    let n = points.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let r2 = radius * radius;
    // Sweep along the first coordinate so only nearby pairs are compared.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| points[a][0].total_cmp(&points[b][0]).then(a.cmp(&b)));
    for (i, &a) in order.iter().enumerate() {
        for &b in &order[i + 1..] {
            if points[b][0] - points[a][0] > radius {
                break;
            }
            if sq_dist(&points[a], &points[b]) <= r2 {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra != rb {
                    parent[ra.max(rb)] = ra.min(rb);
                }
            }
        }
    }
    let mut label_of_root = vec![usize::MAX; n];
    let mut next = 0;
    (0..n)
        .map(|i| {
            let r = find(&mut parent, i);
            if label_of_root[r] == usize::MAX {
                label_of_root[r] = next;
                next += 1;
            }
            label_of_root[r]
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanPoint {
    pub sigma: f64,
    pub modes: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GmsScan {
    pub points: Vec<ScanPoint>,
    /// Largest scanned σ that produced exactly the target number of modes.
    pub best_sigma: Option<f64>,
}

/// Mode count of [`gms_cluster`] on `steps` geometrically spaced bandwidths
/// from `sigma_lo` up to `sigma_hi`; `base.sigma` is ignored. Mode count
/// need not be monotone in σ.
pub fn gms_mode_count_scan(
    data: &DataMatrix,
    sigma_lo: f64,
    sigma_hi: f64,
    steps: usize,
    target_k: usize,
    base: &GmsConfig,
) -> Result<GmsScan> {
    if !(sigma_lo > 0.0 && sigma_lo < sigma_hi) {
        return Err(invalid(
            "sigma_lo",
            format!("need 0 < sigma_lo < sigma_hi, got {sigma_lo} and {sigma_hi}"),
        ));
    }
    if steps < 2 {
        return Err(invalid("steps", "scan needs at least two bandwidths"));
    }
    let mut sigmas = make_schedule(sigma_hi, sigma_lo, steps)?.sigmas().to_vec();
    sigmas.reverse();
    let mut points = Vec::with_capacity(sigmas.len());
    for sigma in sigmas {
        let cfg = GmsConfig {
            sigma,
            ..base.clone()
        };
        let r = gms_cluster(data, &cfg)?;
        points.push(ScanPoint {
            sigma,
            modes: r.modes.k(),
        });
    }
    let best_sigma = points
        .iter()
        .filter(|p| p.modes == target_k)
        .map(|p| p.sigma)
        .reduce(f64::max);
    Ok(GmsScan { points, best_sigma })
}
