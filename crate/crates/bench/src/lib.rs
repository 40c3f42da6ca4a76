//! Fixed datasets shared by the benchmarks.

use modecluster::datasets::gen_gaussian_blobs;
use modecluster::{Centroids, DataMatrix, KMeansConfig, KMeansResult};

/// `k` unit-variance blobs in `dim` dimensions, `n / k` points each, with
/// centers on a scaled simplex-like lattice so the run is repeatable.
pub fn blobs(n: usize, dim: usize, k: usize) -> DataMatrix {
    let centers: Vec<Vec<f64>> = (0..k)
        .map(|c| {
            (0..dim)
                .map(|d| if d % k == c { 8.0 } else { 0.0 })
                .collect()
        })
        .collect();
    let centers = Centroids::from_rows(&centers).expect("centers");
    gen_gaussian_blobs(&centers, &vec![n / k; k], 1.0, 11)
        .expect("blobs")
        .data
}

/// One K-means restart, the usual K-modes starting point.
pub fn kmeans_start(data: &DataMatrix, k: usize) -> KMeansResult {
    let cfg = KMeansConfig {
        restarts: 1,
        ..KMeansConfig::new(k)
    };
    modecluster::kmeans_run(data, &cfg).expect("kmeans")
}
