//! Centroid-based clustering where each centroid is a mode of its cluster's
//! Gaussian kernel density estimate: K-modes with a bandwidth homotopy,
//! plus the K-means and Gaussian mean-shift baselines it sits between.

pub mod bandwidth;
pub mod data;
pub mod datasets;
pub mod error;
pub mod kde;
pub mod kmeans;
pub mod kmodes;
pub mod meanshift;
pub mod metrics;

pub use bandwidth::knn_avg_bandwidth;
pub use data::{
    load_csv, load_labels, save_csv, save_labels, sq_dist, Centroids, DataMatrix, Labels,
};
pub use datasets::{DegreeMixture, Generated, GeneratorSpec};
pub use error::{Error, Result};
pub use kde::{kernel_g, Kde, ModeSeek, ModeSeekConfig};
pub use kmeans::{
    assign_nearest, kmeans_from, kmeans_objective, kmeans_run, KMeansConfig, KMeansResult,
};
pub use kmodes::{
    default_sigma_start, kmodes_fixed_run, kmodes_fixed_run_from, kmodes_fixed_sigma_iter,
    kmodes_objective, kmodes_run, kmodes_run_from, make_schedule, HomotopySchedule, KModesConfig,
    KModesResult, PathPoint, TracePhase, TracePoint,
};
pub use meanshift::{gms_cluster, gms_mode_count_scan, GmsConfig, GmsResult, GmsScan, ScanPoint};
pub use metrics::{adjusted_rand_index, normalized_mutual_information};
