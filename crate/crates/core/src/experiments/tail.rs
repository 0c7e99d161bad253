//! Two-point tail experiment: hit-or-miss estimation of
//! `p(eps) = P(2 - |X_1 - X_2| <= eps)` on an epsilon grid, with a weighted
//! log-log fit of the decay exponent (the limit law predicts slope 7/2 and
//! level `K_a`).

use super::{normalize_eps_grid, CurveKind, CurvePoint, ExperimentError, TailCurve};
use crate::geometry::raw_pair_deficit;
use crate::sampling::{draw_parameter_triple, RngStream};
use crate::stats::binomial_stderr;
use crate::ShapeParam;
use rayon::prelude::*;

const PAIR_CHUNK: u64 = 1 << 20;

/// Minimum hits for a grid point to enter the fit.
pub const MIN_HITS_FOR_FIT: u64 = 100;

/// Estimate the two-point tail over `eps_grid` from `n_pairs` independent
/// uniform pairs. Pairs are drawn in blocks of 2^20 on substreams
/// `stream.nth(block)`; hit counters are integers, so the record does not
/// depend on the worker count. Grid points with fewer than
/// [`MIN_HITS_FOR_FIT`] hits are excluded from the fit and flagged
/// (`retained = false`).
pub fn run_tail_experiment(
    shape: ShapeParam,
    eps_grid: &[f64],
    n_pairs: u64,
    stream: RngStream,
) -> Result<TailCurve, ExperimentError> {
    shape.require_interior("0 < a < 1")?;
    let grid = normalize_eps_grid(eps_grid)?;
    if n_pairs == 0 {
        return Err(ExperimentError::ZeroBudget { what: "n_pairs" });
    }
    let a = shape.a();
    let k = grid.len();
    let n_chunks = n_pairs.div_ceil(PAIR_CHUNK);

    let hits: Vec<u64> = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = stream.nth(chunk).rng();
            let lo = chunk * PAIR_CHUNK;
            let hi = (lo + PAIR_CHUNK).min(n_pairs);
            let mut counts = vec![0u64; k];
            for _ in lo..hi {
                let (t1, d1, w1) = draw_parameter_triple(&mut rng);
                let (t2, d2, w2) = draw_parameter_triple(&mut rng);
                let deficit = raw_pair_deficit(t1, d1, w1, t2, d2, w2, a);
                // grid is decreasing: count from the largest eps down
                for (c, &eps) in counts.iter_mut().zip(&grid) {
                    if deficit <= eps {
                        *c += 1;
                    } else {
                        break;
                    }
                }
            }
            counts
        })
        .reduce(
            || vec![0u64; k],
            |mut x, y| {
                for (a, b) in x.iter_mut().zip(y) {
                    *a += b;
                }
                x
            },
        );

    let points: Vec<CurvePoint> = grid
        .iter()
        .zip(&hits)
        .map(|(&eps, &h)| CurvePoint {
            eps,
            estimate: h as f64 / n_pairs as f64,
            std_error: binomial_stderr(h, n_pairs),
            hits: h,
            clipped: 0,
            retained: h >= MIN_HITS_FOR_FIT,
        })
        .collect();

    let mut curve = TailCurve {
        a,
        kind: CurveKind::Tail,
        points,
        n_pairs,
        n_outer: n_pairs,
        n_inner: 1,
        fitted_slope: None,
        fitted_intercept: None,
        slope_std_error: None,
        stream,
    };
    if let Some(fit) = curve.fit_all() {
        curve.fitted_slope = Some(fit.slope);
        curve.fitted_intercept = Some(fit.intercept);
        curve.slope_std_error = Some(fit.slope_stderr);
    }
    Ok(curve)
}
