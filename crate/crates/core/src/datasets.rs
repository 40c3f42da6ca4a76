//! Seeded generators for the toy experiments: isotropic Gaussian blobs,
//! interleaved two-moons, and a 1D Gaussian + power-law degree mixture.
//!
//! Every generator draws from a [`ChaCha8Rng`] seeded with
//! `seed_from_u64(seed)`. Draw order is fixed: components in order, points
//! in order within a component, coordinates in order within a point. The
//! output is therefore a pure function of the generator parameters and the seed.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::data::{Centroids, DataMatrix, Labels};
use crate::error::{invalid, Result};

/// Mean degree of the Erdős–Rényi component: 2 · 9918 edges / 1000 vertices.
pub const DEGREE_GAUSS_MEAN: f64 = 2.0 * 9918.0 / 1000.0;

/// Generated points, their generating component, and any warnings raised
/// while sampling.
#[derive(Debug, Clone)]
pub struct Generated {
    pub data: DataMatrix,
    pub labels: Labels,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorSpec {
    GaussianBlobs {
        centers: Vec<Vec<f64>>,
        points_per_center: Vec<usize>,
        stddev: f64,
        seed: u64,
    },
    TwoMoons {
        n_per_moon: usize,
        noise: f64,
        seed: u64,
    },
    DegreeMixture(DegreeMixture),
}

impl GeneratorSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::GaussianBlobs { .. } => "gaussian-blobs",
            Self::TwoMoons { .. } => "two-moons",
            Self::DegreeMixture(_) => "degree-mixture",
        }
    }

    /// Three unit-variance blobs at (0,0), (5,0), (2.5,4.3), 200 points each.
    pub fn three_gaussians(seed: u64) -> Self {
        Self::GaussianBlobs {
            centers: vec![vec![0.0, 0.0], vec![5.0, 0.0], vec![2.5, 4.3]],
            points_per_center: vec![200; 3],
            stddev: 1.0,
            seed,
        }
    }

    pub fn two_moons(seed: u64) -> Self {
        Self::TwoMoons {
            n_per_moon: 500,
            noise: 0.1,
            seed,
        }
    }

    pub fn degree_mixture(seed: u64) -> Self {
        Self::DegreeMixture(DegreeMixture {
            seed,
            ..DegreeMixture::default()
        })
    }

    pub fn generate(&self) -> Result<Generated> {
        match self {
            Self::GaussianBlobs {
                centers,
                points_per_center,
                stddev,
                seed,
            } => gen_gaussian_blobs(
                &Centroids::from_rows(centers)?,
                points_per_center,
                *stddev,
                *seed,
            ),
            Self::TwoMoons {
                n_per_moon,
                noise,
                seed,
            } => gen_two_moons(*n_per_moon, *noise, *seed),
            Self::DegreeMixture(spec) => gen_degree_mixture(spec),
        }
    }
}

/// Parameters of the degree-mixture dataset.
///
/// Defaults mirror a 1000-vertex Erdős–Rényi graph with 9918 edges (binomial
/// degrees, approximated by a Gaussian) joined with a 3000-vertex power-law
/// graph with 506489 edges: degree density ∝ k^-2.2 on [115, 2999], whose
/// mean is ≈ 2 · 506489 / 3000.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeMixture {
    pub n_gauss: usize,
    pub gauss_mean: f64,
    pub gauss_std: f64,
    pub n_power: usize,
    /// Pareto shape α; the untruncated mean is infinite for α ≤ 1.
    pub power_exponent: f64,
    pub power_xmin: f64,
    /// Upper cutoff of the Pareto draw (`INFINITY` for none). A simple graph
    /// on `n_power` vertices has no degree above `n_power − 1`.
    pub power_xmax: f64,
    pub seed: u64,
}

impl Default for DegreeMixture {
    fn default() -> Self {
        // Binomial(999, p) with p = 9918 / C(1000, 2).
        let p: f64 = 9918.0 / (1000.0 * 999.0 / 2.0);
        Self {
            n_gauss: 1000,
            gauss_mean: DEGREE_GAUSS_MEAN,
            gauss_std: (999.0 * p * (1.0 - p)).sqrt(),
            n_power: 3000,
            power_exponent: 1.2,
            power_xmin: 115.0,
            power_xmax: 2999.0,
            seed: 0,
        }
    }
}

pub fn gen_gaussian_blobs(
    centers: &Centroids,
    points_per_center: &[usize],
    stddev: f64,
    seed: u64,
) -> Result<Generated> {
    if !(stddev > 0.0 && stddev.is_finite()) {
        return Err(invalid("stddev", format!("must be > 0, got {stddev}")));
    }
    if points_per_center.len() != centers.k() {
        return Err(invalid(
            "points_per_center",
            format!(
                "{} counts for {} centers",
                points_per_center.len(),
                centers.k()
            ),
        ));
    }
    if points_per_center.contains(&0) {
        return Err(invalid("points_per_center", "every count must be >= 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = centers.dim();
    let total: usize = points_per_center.iter().sum();
    let mut values = Vec::with_capacity(total * dim);
    let mut labels = Vec::with_capacity(total);
    for (k, (&count, center)) in points_per_center.iter().zip(centers.rows()).enumerate() {
        for _ in 0..count {
            for &c in center {
                let z: f64 = rng.sample(StandardNormal);
                values.push(c + stddev * z);
            }
            labels.push(k);
        }
    }
    Ok(Generated {
        data: DataMatrix::new(values, total, dim)?,
        labels: Labels::new(labels, centers.k())?,
        warnings: Vec::new(),
    })
}

/// Two interleaved half-circles of radius 1: the upper one centred at
/// (0, 0) and the lower one at (1, 0.5). Angles are evenly spaced over
/// [0, π]; isotropic Gaussian noise of scale `noise` is added afterwards.
pub fn gen_two_moons(n_per_moon: usize, noise: f64, seed: u64) -> Result<Generated> {
    if n_per_moon == 0 {
        return Err(invalid("n_per_moon", "must be >= 1"));
    }
    if !(noise >= 0.0 && noise.is_finite()) {
        return Err(invalid("noise", format!("must be >= 0, got {noise}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Vec::with_capacity(4 * n_per_moon);
    let mut labels = Vec::with_capacity(2 * n_per_moon);
    for moon in 0..2 {
        for i in 0..n_per_moon {
            let t = if n_per_moon == 1 {
                0.5 * PI
            } else {
                PI * i as f64 / (n_per_moon - 1) as f64
            };
            let (x, y) = if moon == 0 {
                (t.cos(), t.sin())
            } else {
                (1.0 - t.cos(), 0.5 - t.sin())
            };
            let zx: f64 = rng.sample(StandardNormal);
            let zy: f64 = rng.sample(StandardNormal);
            values.push(x + noise * zx);
            values.push(y + noise * zy);
            labels.push(moon);
        }
    }
    Ok(Generated {
        data: DataMatrix::new(values, 2 * n_per_moon, 2)?,
        labels: Labels::new(labels, 2)?,
        warnings: Vec::new(),
    })
}

/// 1D integer-valued mixture: Gaussian degrees clamped to ≥ 1, followed by
/// Pareto degrees; both rounded to the nearest integer. Components with a
/// zero count are omitted from the labels.
pub fn gen_degree_mixture(spec: &DegreeMixture) -> Result<Generated> {
    if spec.n_gauss + spec.n_power == 0 {
        return Err(invalid("n_gauss", "at least one point is required"));
    }
    if !(spec.gauss_std >= 0.0 && spec.gauss_std.is_finite()) {
        return Err(invalid(
            "gauss_std",
            format!("must be >= 0, got {}", spec.gauss_std),
        ));
    }
    if !spec.gauss_mean.is_finite() {
        return Err(invalid("gauss_mean", "must be finite"));
    }
    let mut warnings = Vec::new();
    if spec.n_power > 0 {
        if !(spec.power_xmin > 0.0 && spec.power_xmin.is_finite()) {
            return Err(invalid(
                "power_xmin",
                format!("must be > 0, got {}", spec.power_xmin),
            ));
        }
        if spec.power_xmax.is_nan() || spec.power_xmax <= spec.power_xmin {
            return Err(invalid(
                "power_xmax",
                format!("must exceed power_xmin, got {}", spec.power_xmax),
            ));
        }
        if !(spec.power_exponent > 0.0 && spec.power_exponent.is_finite()) {
            return Err(invalid(
                "power_exponent",
                format!("must be > 0, got {}", spec.power_exponent),
            ));
        }
        if spec.power_exponent <= 1.0 {
            warnings.push(format!(
                "power_exponent {} <= 1: the untruncated power law has infinite mean",
                spec.power_exponent
            ));
        }
    }
    // Inverse CDF of the Pareto law truncated to [xmin, xmax].
    let tail_mass = 1.0 - (spec.power_xmin / spec.power_xmax).powf(spec.power_exponent);

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut values = Vec::with_capacity(spec.n_gauss + spec.n_power);
    let mut labels = Vec::with_capacity(spec.n_gauss + spec.n_power);
    for _ in 0..spec.n_gauss {
        let z: f64 = rng.sample(StandardNormal);
        values.push((spec.gauss_mean + spec.gauss_std * z).max(1.0).round());
        labels.push(0);
    }
    let power_label = usize::from(spec.n_gauss > 0);
    for _ in 0..spec.n_power {
        let u: f64 = rng.random();
        let x = spec.power_xmin * (1.0 - u * tail_mass).powf(-1.0 / spec.power_exponent);
        values.push(x.min(spec.power_xmax).round());
        labels.push(power_label);
    }
    let k_count = power_label + usize::from(spec.n_power > 0);
    Ok(Generated {
        data: DataMatrix::from_column(&values)?,
        labels: Labels::new(labels, k_count)?,
        warnings,
    })
}
