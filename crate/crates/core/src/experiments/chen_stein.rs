//! Chen-Stein decay diagnostic: the Poisson-approximation error is bounded
//! by dependency-graph terms
//!
//! ```text
//! b1 ~ n^3 p(eps_n)^2 = O(n^-1),    b2 ~ n^3 q(eps_n) = O(n^-1/7),
//! ```
//!
//! with `eps_n = t n^(-4/7)`. The diagnostic evaluates both from measured
//! tail and overlap curves by log-log interpolation, refusing to
//! extrapolate beyond the measured epsilon ranges.

use super::{ExperimentError, TailCurve};
use crate::ShapeParam;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChenSteinRecord {
    pub a: f64,
    pub n: u64,
    pub t: f64,
    pub eps_n: f64,
    /// Interpolated tail probability p(eps_n).
    pub p: f64,
    /// Interpolated overlap probability q(eps_n).
    pub q: f64,
    pub b1: f64,
    pub b2: f64,
    /// `b1 * n`: approximately constant if the tail decays at rate 7/2.
    pub b1_scaled: f64,
    /// `b2 * n^(1/7)`: approximately constant if the overlap decays at 11/2.
    pub b2_scaled: f64,
}

/// Evaluate the diagnostic at one `n`. Callers sweep an n-grid to observe
/// the predicted decay rates.
pub fn chen_stein_diagnostic(
    shape: ShapeParam,
    n: u64,
    t: f64,
    tail: &TailCurve,
    overlap: &TailCurve,
) -> Result<ChenSteinRecord, ExperimentError> {
    if tail.a != shape.a() {
        return Err(ExperimentError::CurveMismatch {
            a1: tail.a,
            a2: shape.a(),
        });
    }
    if overlap.a != tail.a {
        return Err(ExperimentError::CurveMismatch {
            a1: overlap.a,
            a2: tail.a,
        });
    }
    if n < 2 {
        return Err(ExperimentError::ZeroBudget { what: "n" });
    }
    let nf = n as f64;
    let eps_n = t * nf.powf(-4.0 / 7.0);
    let p = tail.interp_log(eps_n)?;
    let q = overlap.interp_log(eps_n)?;
    let n3 = nf * nf * nf;
    let b1 = n3 * p * p;
    let b2 = n3 * q;
    Ok(ChenSteinRecord {
        a: shape.a(),
        n,
        t,
        eps_n,
        p,
        q,
        b1,
        b2,
        b1_scaled: b1 * nf,
        b2_scaled: b2 * nf.powf(1.0 / 7.0),
    })
}
