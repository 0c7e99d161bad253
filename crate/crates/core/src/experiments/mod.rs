//! The statistical verification suite: seeded, replicable experiments whose
//! records are pure functions of `(config, master stream)`.
//!
//! Every experiment chunks its work over substreams `stream.nth(k)` (one per
//! pair-block, outer-point block, or replication) and aggregates results in
//! chunk order, so reruns and different worker counts produce bit-identical
//! records.

mod chen_stein;
mod exponent;
mod limit;
mod overlap;
mod poisson;
mod tail;
pub mod tables;

pub use chen_stein::{chen_stein_diagnostic, ChenSteinRecord};
pub use exponent::{run_exponent_experiment, ExponentMode, ExponentReport, ExponentRow};
pub use limit::{run_limit_experiment, LimitLawReport};
pub use overlap::run_overlap_experiment;
pub use poisson::{run_poisson_experiment, PoissonRep, PoissonSummary, PoissonTSummary};
pub use tail::run_tail_experiment;

use crate::constants::ConstantsError;
use crate::diameter::DiameterError;
use crate::geometry::GeometryError;
use crate::sampling::RngStream;
use crate::stats::{weighted_linfit, LinearFit};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ExperimentError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Diameter(#[from] DiameterError),
    #[error(transparent)]
    Constants(#[from] ConstantsError),
    #[error("epsilon grid must be nonempty, finite and positive")]
    BadEpsGrid,
    #[error("t grid must be nonempty, finite and nonnegative")]
    BadTGrid,
    #[error("budget must be positive (got {what} = 0)")]
    ZeroBudget { what: &'static str },
    #[error("n grid must span at least one decade and contain entries >= 2")]
    BadNGrid,
    #[error("eps = {eps} outside the measured curve range [{lo}, {hi}]; extrapolation refused")]
    EpsOutOfRange { eps: f64, lo: f64, hi: f64 },
    #[error("curve has fewer than two retained points; cannot fit or interpolate")]
    CurveTooSparse,
    #[error("curves disagree on the shape parameter ({a1} vs {a2})")]
    CurveMismatch { a1: f64, a2: f64 },
}

/// What a [`TailCurve`] measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveKind {
    /// `p(eps) = P(W_12 <= eps)`, the two-point tail.
    Tail,
    /// `q(eps) = P(W_12 <= eps, W_13 <= eps)`, the overlap probability.
    Overlap,
}

/// One grid point of a measured curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub eps: f64,
    pub estimate: f64,
    pub std_error: f64,
    /// Tail: raw hit count. Overlap: outer draws with a nonzero inner
    /// estimate.
    pub hits: u64,
    /// Overlap only: bias-corrected squares clipped at zero.
    pub clipped: u64,
    /// Whether the point enters fits and interpolation (tail: >= 100 hits;
    /// overlap: positive estimate with finite error).
    pub retained: bool,
}

/// A measured probability curve over an epsilon grid (stored in decreasing
/// epsilon order) together with its weighted log-log fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailCurve {
    pub a: f64,
    pub kind: CurveKind,
    /// Grid points, decreasing in eps.
    pub points: Vec<CurvePoint>,
    /// Total pair evaluations (tail: n_pairs; overlap: n_outer * n_inner).
    pub n_pairs: u64,
    pub n_outer: u64,
    pub n_inner: u64,
    /// Weighted least-squares fit of `ln(estimate)` against `ln(eps)` over
    /// the retained points; `None` when fewer than two are retained.
    pub fitted_slope: Option<f64>,
    pub fitted_intercept: Option<f64>,
    pub slope_std_error: Option<f64>,
    pub stream: RngStream,
}

impl TailCurve {
    fn fit_weight(&self, p: &CurvePoint) -> f64 {
        match self.kind {
            // Var(ln p_hat) ~ (1 - p) / (N p) ~ 1 / hits
            CurveKind::Tail => p.hits as f64,
            // Var(ln q_hat) ~ (se / q_hat)^2
            CurveKind::Overlap => {
                let r = p.estimate / p.std_error;
                r * r
            }
        }
    }

    /// Weighted log-log fit restricted to retained points with
    /// `lo <= eps <= hi`.
    pub fn fit_window(&self, lo: f64, hi: f64) -> Option<LinearFit> {
        let mut x = Vec::new();
        let mut y = Vec::new();
        let mut w = Vec::new();
        for p in &self.points {
            if p.retained && p.estimate > 0.0 && (lo..=hi).contains(&p.eps) {
                x.push(p.eps.ln());
                y.push(p.estimate.ln());
                w.push(self.fit_weight(p));
            }
        }
        weighted_linfit(&x, &y, &w)
    }

    pub(crate) fn fit_all(&self) -> Option<LinearFit> {
        self.fit_window(0.0, f64::INFINITY)
    }

    /// Level ratio `estimate / eps^exponent` at the k-th smallest retained
    /// grid point (k = 0 is the smallest).
    pub fn level_ratio(&self, exponent: f64, k: usize) -> Option<f64> {
        let p = self
            .points
            .iter()
            .rev()
            .filter(|p| p.retained && p.estimate > 0.0)
            .nth(k)?;
        Some(p.estimate / p.eps.powf(exponent))
    }

    /// Log-log linear interpolation of the curve at `eps`, between retained
    /// points only. Extrapolation beyond the measured range is refused.
    pub fn interp_log(&self, eps: f64) -> Result<f64, ExperimentError> {
        // retained points in increasing eps order
        let pts: Vec<&CurvePoint> = self
            .points
            .iter()
            .rev()
            .filter(|p| p.retained && p.estimate > 0.0)
            .collect();
        if pts.len() < 2 {
            return Err(ExperimentError::CurveTooSparse);
        }
        let lo = pts.first().expect("nonempty").eps;
        let hi = pts.last().expect("nonempty").eps;
        if !(lo..=hi).contains(&eps) {
            return Err(ExperimentError::EpsOutOfRange { eps, lo, hi });
        }
        let hi_idx = pts.partition_point(|p| p.eps < eps).min(pts.len() - 1).max(1);
        let (p0, p1) = (pts[hi_idx - 1], pts[hi_idx]);
        if p0.eps == eps {
            return Ok(p0.estimate);
        }
        let t = (eps.ln() - p0.eps.ln()) / (p1.eps.ln() - p0.eps.ln());
        Ok((p0.estimate.ln() * (1.0 - t) + p1.estimate.ln() * t).exp())
    }
}

/// Validate and normalize an epsilon grid to decreasing order, deduplicated.
pub(crate) fn normalize_eps_grid(eps_grid: &[f64]) -> Result<Vec<f64>, ExperimentError> {
    if eps_grid.is_empty() || eps_grid.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
        return Err(ExperimentError::BadEpsGrid);
    }
    let mut grid = eps_grid.to_vec();
    grid.sort_unstable_by(|a, b| b.total_cmp(a));
    grid.dedup();
    Ok(grid)
}

/// Validate and normalize a t grid to increasing order, deduplicated.
pub(crate) fn normalize_t_grid(t_grid: &[f64]) -> Result<Vec<f64>, ExperimentError> {
    if t_grid.is_empty() || t_grid.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(ExperimentError::BadTGrid);
    }
    let mut grid = t_grid.to_vec();
    grid.sort_unstable_by(f64::total_cmp);
    grid.dedup();
    Ok(grid)
}
