use rayon::prelude::*;

use crate::data::{sq_dist, DataMatrix};
use crate::error::{invalid, Error, Result};

/// Average over all points of the distance to their `k`-th nearest
/// neighbour (the point itself excluded). Exact, O(N²·D).
pub fn knn_avg_bandwidth(data: &DataMatrix, k: usize) -> Result<f64> {
    let n = data.n();
    if k == 0 || k >= n {
        return Err(invalid(
            "k",
            format!("must be in 1..{n} for {n} points, got {k}"),
        ));
    }
    let kth: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let x = data.row(i);
            let mut d: Vec<f64> = (0..n)
                .filter(|&j| j != i)
                .map(|j| sq_dist(x, data.row(j)))
                .collect();
            let (_, v, _) = d.select_nth_unstable_by(k - 1, f64::total_cmp);
            v.sqrt()
        })
        .collect();
    let avg = kth.iter().sum::<f64>() / n as f64;
    if avg == 0.0 {
        return Err(Error::Degenerate(format!(
            "average distance to the {k}-th neighbour is 0 (too many duplicate points)"
        )));
    }
    Ok(avg)
}
