//! Gaussian kernel density estimates and mean-shift mode seeking.
//!
//! The kernel is the unnormalized `G(t) = exp(-t/2)`, so a kde built on a
//! single point evaluates to 1 at that point. Sums of kernel values are
//! computed relative to the nearest support point (a max-shifted exponent
//! sum) so that responsibilities stay well defined when every raw kernel
//! value underflows.

use std::f64::consts::PI;

use crate::data::{sq_dist, DataMatrix};
use crate::error::{invalid, Error, Result};

/// `G(t) = exp(-t/2)` for `t ≥ 0`.
pub fn kernel_g(t: f64) -> f64 {
    assert!(t >= 0.0, "kernel argument must be non-negative, got {t}");
    (-0.5 * t).exp()
}

/// Convergence controls for [`Kde::mode_seek`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSeekConfig {
    /// Relative step tolerance: stop once `‖x' − x‖ ≤ tol · max(σ, ‖x‖)`.
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for ModeSeekConfig {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iters: 1000,
        }
    }
}

impl ModeSeekConfig {
    pub fn validate(&self) -> Result<()> {
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(invalid("tol", format!("must be > 0, got {}", self.tol)));
        }
        if self.max_iters == 0 {
            return Err(invalid("max_iters", "must be >= 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeSeek {
    pub mode: Vec<f64>,
    pub iters: usize,
    pub converged: bool,
}

/// Kernel density estimate over a borrowed set of support points.
#[derive(Debug, Clone, Copy)]
pub struct Kde<'a> {
    points: &'a [f64],
    dim: usize,
    sigma: f64,
}

impl<'a> Kde<'a> {
    pub fn new(data: &'a DataMatrix, sigma: f64) -> Result<Self> {
        Self::from_slice(data.as_slice(), data.dim(), sigma)
    }

    /// Support given as row-major `points` with `dim` columns.
    pub fn from_slice(points: &'a [f64], dim: usize, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(invalid(
                "sigma",
                format!("must be finite and > 0, got {sigma}"),
            ));
        }
        if dim == 0 || points.is_empty() || !points.len().is_multiple_of(dim) {
            return Err(Error::EmptyDataset("kde support".into()));
        }
        Ok(Self { points, dim, sigma })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn support(&self) -> impl Iterator<Item = &'a [f64]> + 'a {
        self.points.chunks_exact(self.dim)
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(())
    }

    /// Squared distances to every support point and their minimum.
    fn sq_dists(&self, x: &[f64], out: &mut Vec<f64>) -> f64 {
        out.clear();
        let mut min = f64::INFINITY;
        for p in self.support() {
            let d = sq_dist(x, p);
            min = min.min(d);
            out.push(d);
        }
        min
    }

    /// Exponent `-(d − d_min) / 2σ²`, dividing by σ twice so a σ² that
    /// underflows to zero does not produce 0/0.
    #[inline]
    fn shifted_exponent(&self, d: f64, d_min: f64) -> f64 {
        -0.5 * ((d - d_min) / self.sigma / self.sigma)
    }

    /// `(1/N) Σ G(‖(x − x_n)/σ‖²)`.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        Ok(self.log_eval(x)?.exp())
    }

    /// Natural log of [`Kde::eval`]. Stays accurate where the density
    /// itself underflows to zero.
    pub fn log_eval(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        let mut d = Vec::with_capacity(self.len());
        let d_min = self.sq_dists(x, &mut d);
        let s: f64 = d
            .iter()
            .map(|&di| self.shifted_exponent(di, d_min).exp())
            .sum();
        Ok(-0.5 * (d_min / self.sigma / self.sigma) + s.ln() - (self.len() as f64).ln())
    }

    /// The kde scaled by `(2πσ²)^{-D/2}`, i.e. a proper probability density.
    pub fn eval_normalized(&self, x: &[f64]) -> Result<f64> {
        let log_norm = -0.5 * self.dim as f64 * (2.0 * PI * self.sigma * self.sigma).ln();
        Ok((self.log_eval(x)? + log_norm).exp())
    }

    /// One mean-shift update `x ← Σ p(n|x) x_n`, returning the new point and
    /// the responsibilities `p(n|x)`.
    pub fn mean_shift_step(&self, x: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        self.check_dim(x)?;
        let mut resp = Vec::with_capacity(self.len());
        let mut x_new = vec![0.0; self.dim];
        self.step_into(x, &mut resp, &mut x_new);
        Ok((x_new, resp))
    }

    /// Writes responsibilities into `resp` and the updated point into
    /// `x_new`.
    fn step_into(&self, x: &[f64], resp: &mut Vec<f64>, x_new: &mut [f64]) {
        let d_min = self.sq_dists(x, resp);
        let mut total = 0.0;
        for r in resp.iter_mut() {
            *r = self.shifted_exponent(*r, d_min).exp();
            total += *r;
        }
        // The nearest point contributes exp(0) = 1, so total >= 1.
        x_new.iter_mut().for_each(|v| *v = 0.0);
        for (r, p) in resp.iter_mut().zip(self.support()) {
            *r /= total;
            if *r > 0.0 {
                for (v, &pj) in x_new.iter_mut().zip(p) {
                    *v += *r * pj;
                }
            }
        }
    }

    /// Iterates the mean-shift map from `x0` until the step is within
    /// tolerance or the iteration cap is hit. Deterministic.
    pub fn mode_seek(&self, x0: &[f64], cfg: &ModeSeekConfig) -> Result<ModeSeek> {
        self.check_dim(x0)?;
        cfg.validate()?;
        let mut x = x0.to_vec();
        let mut next = vec![0.0; self.dim];
        let mut resp = Vec::with_capacity(self.len());
        for iter in 1..=cfg.max_iters {
            self.step_into(&x, &mut resp, &mut next);
            let step = sq_dist(&x, &next).sqrt();
            let scale = self.sigma.max(norm(&x));
            std::mem::swap(&mut x, &mut next);
            if step <= cfg.tol * scale {
                return Ok(ModeSeek {
                    mode: x,
                    iters: iter,
                    converged: true,
                });
            }
        }
        Ok(ModeSeek {
            mode: x,
            iters: cfg.max_iters,
            converged: false,
        })
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}
