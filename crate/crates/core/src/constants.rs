//! Numerical evaluation of the limit-law constants by two independent
//! routes that must agree.
//!
//! The limit law is governed by the sublevel-set volume
//!
//! ```text
//! I_a = integral over A of 1{ G(s, s', y, y', tau) <= 1 },
//! A   = { s, s' >= 0, y^2 <= s, y'^2 <= s' },
//! G   = (s + s')/2 + tau^2/4 - (a^2/4)(y - y')^2,
//! ```
//!
//! with `Lambda_a = (9 / (64 pi)) I_a`, two-point tail constant
//! `K_a = 2 Lambda_a = (9 / (32 pi)) I_a`, and limiting survival function
//! `P(Z > t) = exp(-Lambda_a t^(7/2))`.
//!
//! # Route 1: 5-d hit-or-miss Monte Carlo
//!
//! The sublevel set is bounded. From `G <= 1`, `(y - y')^2 <= 2(y^2 + y'^2)
//! <= 2(s + s')` gives `(s + s')(1 - a^2)/2 <= 1`, so
//! `s, s' <= S_max = 2/(1 - a^2)`, hence `|y|, |y'| <= sqrt(S_max)`, and
//! `tau^2 <= 4 + a^2 (y - y')^2 <= 4 + 4 a^2 S_max = T_max^2`. Sampling the
//! box `B(a)` defined by those ranges uniformly and counting hits gives the
//! unbiased estimate `I_a = Vol(B) * hit fraction`. The box volume blows up
//! as `a -> 1`, so this route is restricted to `a <= 0.95`.
//!
//! # Route 2: deterministic 3-d reduction
//!
//! For fixed `(y, y', tau)` put `c = 1 - tau^2/4 + (a^2/4)(y - y')^2`; the
//! `(s, s')` section of the sublevel set is `{s >= y^2, s' >= y'^2,
//! (s + s')/2 <= c}`, a right triangle of area `((2c - y^2 - y'^2)_+)^2 / 2`.
//! Hence
//!
//! ```text
//! I_a = integral of ((2c - y^2 - y'^2)_+)^2 / 2  dy dy' dtau
//! ```
//!
//! over the same bounding ranges, evaluated on a midpoint tensor grid with
//! two successive refinements as the error estimate (midpoint rules are
//! robust to the kink at the positive-part boundary). Chunks are summed in
//! slab order with compensated summation, so the result is independent of
//! the worker count.

use crate::geometry::{GeometryError, LocalCoords, ShapeParam};
use crate::sampling::RngStream;
use crate::stats::neumaier_sum;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ConstantsError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("Monte Carlo route requires 0 < a <= 0.95, got a = {a}")]
    ShapeOutOfRange { a: f64 },
    #[error("budget must be positive")]
    EmptyBudget,
    #[error("I_a must be positive, got {value}")]
    NonPositiveIntegral { value: f64 },
    #[error("survival function requires t >= 0, got {t}")]
    NegativeTime { t: f64 },
}

/// Which route produced a constant estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstMethod {
    Mc5d,
    Reduced3d,
}

/// Bounding box `B(a)` of the sublevel set `{G <= 1}` inside `A`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub s_max: f64,
    pub y_max: f64,
    pub t_max: f64,
}

impl BoundingBox {
    pub fn for_shape(shape: ShapeParam) -> Result<Self, GeometryError> {
        shape.require_interior("0 < a < 1")?;
        let a = shape.a();
        let s_max = 2.0 / (1.0 - a * a);
        Ok(BoundingBox {
            s_max,
            y_max: s_max.sqrt(),
            t_max: (4.0 + 4.0 * a * a * s_max).sqrt(),
        })
    }

    pub fn volume(&self) -> f64 {
        self.s_max * self.s_max * (2.0 * self.y_max) * (2.0 * self.y_max) * (2.0 * self.t_max)
    }

    pub fn contains(&self, c: &LocalCoords) -> bool {
        (0.0..=self.s_max).contains(&c.s)
            && (0.0..=self.s_max).contains(&c.sp)
            && c.y.abs() <= self.y_max
            && c.yp.abs() <= self.y_max
            && c.tau.abs() <= self.t_max
    }

    /// Whether a point lies within `margin` of the box boundary. The
    /// sublevel set is strictly interior to `B(a)`; hit-or-miss keeps a
    /// count of shell hits as a box-validity diagnostic.
    pub fn on_boundary_shell(&self, c: &LocalCoords, margin: f64) -> bool {
        c.s <= margin
            || c.s >= self.s_max - margin
            || c.sp <= margin
            || c.sp >= self.s_max - margin
            || c.y.abs() >= self.y_max - margin
            || c.yp.abs() >= self.y_max - margin
            || c.tau.abs() >= self.t_max - margin
    }
}

/// One estimate of `I_a`, with its uncertainty and provenance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantEstimate {
    pub value: f64,
    /// Binomial standard error for `mc5d`; grid-refinement difference for
    /// `reduced3d`.
    pub std_error: f64,
    pub method: ConstMethod,
    pub a: f64,
    /// Samples for `mc5d`; finest cells-per-axis for `reduced3d`.
    pub budget: u64,
    /// For `reduced3d`: whether the refinement error decreased between the
    /// last two refinements (non-convergence is reported, not hidden).
    /// Always true for `mc5d`.
    pub converged: bool,
    /// For `mc5d`: hits within 1e-9 of the box boundary (diagnostic; the
    /// sublevel set is strictly interior, so this should be 0).
    pub shell_hits: u64,
}

/// The limit law `P(Z > t) = exp(-lambda_a t^(7/2))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitLaw {
    pub lambda_a: f64,
    pub a: f64,
}

impl LimitLaw {
    /// `Lambda_a = (9 / (64 pi)) I_a`; requires `I_a > 0`.
    pub fn from_integral(i_a: f64, shape: ShapeParam) -> Result<Self, ConstantsError> {
        if !(i_a > 0.0 && i_a.is_finite()) {
            return Err(ConstantsError::NonPositiveIntegral { value: i_a });
        }
        Ok(LimitLaw {
            lambda_a: 9.0 * i_a / (64.0 * PI),
            a: shape.a(),
        })
    }

    pub fn from_lambda(lambda: f64, shape: ShapeParam) -> Result<Self, ConstantsError> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(ConstantsError::NonPositiveIntegral { value: lambda });
        }
        Ok(LimitLaw {
            lambda_a: lambda,
            a: shape.a(),
        })
    }

    /// Two-point tail constant `K_a = 2 Lambda_a`.
    pub fn k_a(&self) -> f64 {
        2.0 * self.lambda_a
    }

    /// `P(Z > t) = exp(-Lambda_a t^(7/2))` for `t >= 0`.
    pub fn survival(&self, t: f64) -> Result<f64, ConstantsError> {
        if !(t >= 0.0) {
            return Err(ConstantsError::NegativeTime { t });
        }
        Ok((-self.lambda_a * t.powf(3.5)).exp())
    }

    /// CDF as an infallible closure-friendly form (clamps `t < 0` to 0).
    pub fn cdf(&self, t: f64) -> f64 {
        if t <= 0.0 {
            0.0
        } else {
            1.0 - (-self.lambda_a * t.powf(3.5)).exp()
        }
    }

    /// Inverse CDF: the `p`-quantile `(-ln(1 - p) / Lambda_a)^(2/7)`.
    pub fn quantile(&self, p: f64) -> f64 {
        (-(1.0 - p).ln() / self.lambda_a).powf(2.0 / 7.0)
    }
}

pub(crate) const MC_CHUNK: u64 = 1 << 20;

/// Hit-or-miss Monte Carlo estimate of `I_a` over the explicit bounding box.
/// Unbiased; `std_error` is the binomial standard error scaled by the box
/// volume. Chunks of 2^20 samples run on substreams `stream.nth(k)` and the
/// hit counters are integers, so the result is independent of the worker
/// count and reproducible for a fixed stream.
pub fn i_a_mc5d(
    shape: ShapeParam,
    n_samples: u64,
    stream: RngStream,
) -> Result<ConstantEstimate, ConstantsError> {
    let a = shape.a();
    if !(a > 0.0 && a <= 0.95) {
        return Err(ConstantsError::ShapeOutOfRange { a });
    }
    if n_samples == 0 {
        return Err(ConstantsError::EmptyBudget);
    }
    let boxb = BoundingBox::for_shape(shape)?;
    let n_chunks = n_samples.div_ceil(MC_CHUNK);
    let (hits, shell_hits) = (0..n_chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream.nth(k).rng();
            let lo = k * MC_CHUNK;
            let hi = (lo + MC_CHUNK).min(n_samples);
            let mut hits = 0u64;
            let mut shell = 0u64;
            for _ in lo..hi {
                let c = LocalCoords::new(
                    boxb.s_max * rng.random::<f64>(),
                    boxb.s_max * rng.random::<f64>(),
                    boxb.y_max * (2.0 * rng.random::<f64>() - 1.0),
                    boxb.y_max * (2.0 * rng.random::<f64>() - 1.0),
                    boxb.t_max * (2.0 * rng.random::<f64>() - 1.0),
                );
                if c.in_region_a() && crate::geometry::local_g(&c, shape) <= 1.0 {
                    hits += 1;
                    if boxb.on_boundary_shell(&c, 1e-9) {
                        shell += 1;
                    }
                }
            }
            (hits, shell)
        })
        .reduce(|| (0, 0), |x, y| (x.0 + y.0, x.1 + y.1));

    let p = hits as f64 / n_samples as f64;
    let vol = boxb.volume();
    Ok(ConstantEstimate {
        value: vol * p,
        std_error: vol * (p * (1.0 - p) / n_samples as f64).sqrt(),
        method: ConstMethod::Mc5d,
        a,
        budget: n_samples,
        converged: true,
        shell_hits,
    })
}

/// Grid specification for the deterministic route: cells per axis of the
/// finest level. Three levels `cells/4, cells/2, cells` are evaluated; the
/// value is the finest, the error estimate is the difference of the last
/// two, and `converged` records that the estimate decreased.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub cells: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { cells: 800 }
    }
}

/// The reduced integrand `((2c - y^2 - y'^2)_+)^2 / 2` with
/// `c = 1 - tau^2/4 + (a^2/4)(y - y')^2`.
#[inline]
pub fn reduced_integrand(y: f64, yp: f64, tau: f64, a: f64) -> f64 {
    let c = 1.0 - 0.25 * tau * tau + 0.25 * a * a * (y - yp) * (y - yp);
    let q = 2.0 * c - y * y - yp * yp;
    if q > 0.0 {
        0.5 * q * q
    } else {
        0.0
    }
}

fn midpoint_3d(shape: ShapeParam, cells: usize) -> f64 {
    let a = shape.a();
    let boxb = BoundingBox::for_shape(shape).expect("validated by caller");
    let m = cells;
    let hy = 2.0 * boxb.y_max / m as f64;
    let ht = 2.0 * boxb.t_max / m as f64;
    let node = |k: usize, lim: f64, h: f64| -> f64 { -lim + (k as f64 + 0.5) * h };
    // parallel over tau slabs, sequential compensated sums inside, combined
    // in slab order
    let slab_sums: Vec<f64> = (0..m)
        .into_par_iter()
        .map(|kt| {
            let tau = node(kt, boxb.t_max, ht);
            let mut sum = 0.0;
            let mut comp = 0.0;
            for ky in 0..m {
                let y = node(ky, boxb.y_max, hy);
                let mut row = 0.0;
                for kyp in 0..m {
                    let yp = node(kyp, boxb.y_max, hy);
                    row += reduced_integrand(y, yp, tau, a);
                }
                let t = sum + row;
                if sum.abs() >= row.abs() {
                    comp += (sum - t) + row;
                } else {
                    comp += (row - t) + sum;
                }
                sum = t;
            }
            sum + comp
        })
        .collect();
    neumaier_sum(slab_sums.into_iter()) * hy * hy * ht
}

/// Deterministic evaluation of `I_a` through the 3-d reduction.
pub fn i_a_reduced3d(
    shape: ShapeParam,
    spec: QuadratureSpec,
) -> Result<ConstantEstimate, ConstantsError> {
    shape.require_interior("0 < a < 1")?;
    if spec.cells < 8 {
        return Err(ConstantsError::EmptyBudget);
    }
    let coarse = midpoint_3d(shape, spec.cells / 4);
    let mid = midpoint_3d(shape, spec.cells / 2);
    let fine = midpoint_3d(shape, spec.cells);
    let err_prev = (mid - coarse).abs();
    let err = (fine - mid).abs();
    Ok(ConstantEstimate {
        value: fine,
        std_error: err,
        method: ConstMethod::Reduced3d,
        a: shape.a(),
        budget: spec.cells as u64,
        converged: err <= err_prev,
        shell_hits: 0,
    })
}
