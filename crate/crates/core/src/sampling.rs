//! Uniform random generation on the spheroid by three independent methods,
//! with a reproducible seeded-stream contract.
//!
//! # Streams
//!
//! A [`RngStream`] is a `(master_seed, stream_index)` pair mapped onto a
//! ChaCha8 generator: the 256-bit ChaCha key is derived from `master_seed`
//! by four rounds of SplitMix64, and `stream_index` selects the ChaCha
//! stream (its 64-bit nonce). ChaCha is a pure counter-based ARX cipher, so
//! identical pairs produce bit-identical output on every platform, and
//! distinct stream indices give independent substreams that can be consumed
//! concurrently. Downstream aggregation consumes substreams in index order
//! wherever bitwise reproducibility of a statistic is required.
//!
//! # The parameter sampler
//!
//! `(Theta, Delta, W)` is uniform on `{0 <= theta < 2pi, 0 <= delta <= 1,
//! w^2 <= delta}` with constant density `3/(8pi)`. Integrating out `theta`
//! and `w` leaves the marginal density `(3/2) sqrt(delta)` for `Delta`, with
//! CDF `delta^(3/2)`; inverting it gives `Delta = U^(2/3)` for `U` uniform
//! on `[0, 1]`, and `W | Delta` is uniform on `[-sqrt(Delta), sqrt(Delta)]`.
//! That avoids any rejection step.

use crate::geometry::{contains, embed_raw, GeometryError, Point3, ShapeParam};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::io::{self, Write};

/// A reproducible random substream, identified by `(master_seed, stream_index)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngStream {
    pub master_seed: u64,
    pub stream_index: u64,
}

const SPLITMIX_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 step: the standard 64-bit finalizer over an incrementing state.
#[inline]
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(SPLITMIX_GAMMA);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RngStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        RngStream {
            master_seed,
            stream_index,
        }
    }

    /// The substream at `stream_index + k`. Experiments hand substream `k`
    /// to chunk/replication `k`.
    pub fn nth(&self, k: u64) -> RngStream {
        RngStream {
            master_seed: self.master_seed,
            stream_index: self.stream_index.wrapping_add(k),
        }
    }

    /// Instantiate the generator for this stream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut state = self.master_seed;
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(self.stream_index);
        rng
    }
}

/// Derive an experiment-specific master seed from the run's master seed, so
/// different experiments of one run never share substreams. FNV-1a over the
/// purpose string, mixed with the seed through SplitMix64.
pub fn derive_master(master_seed: u64, purpose: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in purpose.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    let mut state = master_seed ^ h;
    splitmix64(&mut state)
}

/// Which generation method produced a batch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleMethod {
    Parameter,
    Rejection,
    BallScaling,
    CircleDiagnostic,
}

impl SampleMethod {
    pub fn name(self) -> &'static str {
        match self {
            SampleMethod::Parameter => "parameter",
            SampleMethod::Rejection => "rejection",
            SampleMethod::BallScaling => "ball-scaling",
            SampleMethod::CircleDiagnostic => "circle-diagnostic",
        }
    }
}

/// A batch of sampled points. Every point passes `contains()` except for
/// the circle diagnostic, which lies on the unit circle `x3 = 0`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampleBatch {
    pub points: Vec<Point3>,
    pub shape: ShapeParam,
    pub method: SampleMethod,
    pub stream: RngStream,
    /// Proposals consumed; equals `points.len()` for the exact samplers and
    /// counts rejected proposals too for the rejection sampler.
    pub proposals: u64,
}

impl SampleBatch {
    /// Acceptance rate of the generation (1.0 for exact samplers).
    pub fn acceptance_rate(&self) -> f64 {
        self.points.len() as f64 / self.proposals as f64
    }

    /// Dump the batch as CSV: `#`-prefixed header lines recording
    /// `(a, method, master_seed, stream_index, n)`, then `x1,x2,x3` rows.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "# a={}", self.shape.a())?;
        writeln!(out, "# method={}", self.method.name())?;
        writeln!(out, "# master_seed={}", self.stream.master_seed)?;
        writeln!(out, "# stream_index={}", self.stream.stream_index)?;
        writeln!(out, "# n={}", self.points.len())?;
        writeln!(out, "x1,x2,x3")?;
        for p in &self.points {
            writeln!(out, "{},{},{}", p.x1, p.x2, p.x3)?;
        }
        Ok(())
    }
}

fn require_sampler_shape(shape: ShapeParam) -> Result<(), GeometryError> {
    if shape.a() == 0.0 {
        return Err(GeometryError::ShapeNotAllowed {
            a: 0.0,
            need: "0 < a <= 1 (the a = 0 spheroid has zero volume; use the circle diagnostic)",
        });
    }
    Ok(())
}

/// Draw one `(theta, delta, w)` triple of the parameter method.
/// `u^(2/3)` is evaluated as `cbrt(u^2)`, which is cheaper than `powf`.
#[inline]
pub(crate) fn draw_parameter_triple(rng: &mut ChaCha8Rng) -> (f64, f64, f64) {
    let theta = TAU * rng.random::<f64>();
    let u = rng.random::<f64>();
    let delta = (u * u).cbrt();
    let w = (2.0 * rng.random::<f64>() - 1.0) * delta.sqrt();
    (theta, delta, w)
}

/// Exact sampler through the equatorial parameterization:
/// `Theta ~ U[0, 2pi)`, `Delta = U^(2/3)`, `W | Delta ~ U[-sqrt(Delta), sqrt(Delta)]`,
/// embedded into Cartesian coordinates. Uniform on `E` for `0 < a <= 1`.
pub fn sample_parameter(
    stream: RngStream,
    n: usize,
    shape: ShapeParam,
) -> Result<SampleBatch, GeometryError> {
    require_sampler_shape(shape)?;
    let a = shape.a();
    let mut rng = stream.rng();
    let points = (0..n)
        .map(|_| {
            let (theta, delta, w) = draw_parameter_triple(&mut rng);
            embed_raw(theta, delta, w, a)
        })
        .collect();
    Ok(SampleBatch {
        points,
        shape,
        method: SampleMethod::Parameter,
        stream,
        proposals: n as u64,
    })
}

/// Rejection sampler from the bounding box `[-1, 1]^2 x [-a, a]`. The
/// acceptance rate converges to `Vol(E) / (8a) = (4 pi a / 3) / (8a) = pi/6`,
/// independent of `a`.
pub fn sample_rejection(
    stream: RngStream,
    n: usize,
    shape: ShapeParam,
) -> Result<SampleBatch, GeometryError> {
    require_sampler_shape(shape)?;
    let a = shape.a();
    let mut rng = stream.rng();
    let mut proposals = 0u64;
    let mut points = Vec::with_capacity(n);
    while points.len() < n {
        proposals += 1;
        let p = Point3::new(
            2.0 * rng.random::<f64>() - 1.0,
            2.0 * rng.random::<f64>() - 1.0,
            a * (2.0 * rng.random::<f64>() - 1.0),
        );
        if p.x1 * p.x1 + p.x2 * p.x2 + (p.x3 / a) * (p.x3 / a) <= 1.0 {
            points.push(p);
        }
    }
    Ok(SampleBatch {
        points,
        shape,
        method: SampleMethod::Rejection,
        stream,
        proposals,
    })
}

/// Exact sampler through the unit ball: a normalized Gaussian direction with
/// radius `U^(1/3)` is uniform on the ball, and `E` is the image of the ball
/// under `(x, y, z) -> (x, y, a z)`, which preserves uniformity.
pub fn sample_ball_scaling(
    stream: RngStream,
    n: usize,
    shape: ShapeParam,
) -> Result<SampleBatch, GeometryError> {
    require_sampler_shape(shape)?;
    let a = shape.a();
    let mut rng = stream.rng();
    let mut points = Vec::with_capacity(n);
    while points.len() < n {
        let gx: f64 = StandardNormal.sample(&mut rng);
        let gy: f64 = StandardNormal.sample(&mut rng);
        let gz: f64 = StandardNormal.sample(&mut rng);
        let norm = (gx * gx + gy * gy + gz * gz).sqrt();
        if norm < 1e-150 {
            continue;
        }
        let r = rng.random::<f64>().cbrt() / norm;
        points.push(Point3::new(r * gx, r * gy, a * r * gz));
    }
    Ok(SampleBatch {
        points,
        shape,
        method: SampleMethod::BallScaling,
        stream,
        proposals: n as u64,
    })
}

/// Diagnostic sampler for the degenerate case `a = 0`: `n` points
/// `(cos Theta, sin Theta, 0)`, `Theta ~ U[0, 2pi)`, on the unit circle.
pub fn sample_circle_diagnostic(stream: RngStream, n: usize) -> SampleBatch {
    let mut rng = stream.rng();
    let points = (0..n)
        .map(|_| {
            let (sin_t, cos_t) = (TAU * rng.random::<f64>()).sin_cos();
            Point3::new(cos_t, sin_t, 0.0)
        })
        .collect();
    SampleBatch {
        points,
        shape: ShapeParam::new(0.0).expect("a = 0 is representable"),
        method: SampleMethod::CircleDiagnostic,
        stream,
        proposals: n as u64,
    }
}

/// Dispatch by method; the circle diagnostic ignores `shape`.
pub fn sample(
    method: SampleMethod,
    stream: RngStream,
    n: usize,
    shape: ShapeParam,
) -> Result<SampleBatch, GeometryError> {
    match method {
        SampleMethod::Parameter => sample_parameter(stream, n, shape),
        SampleMethod::Rejection => sample_rejection(stream, n, shape),
        SampleMethod::BallScaling => sample_ball_scaling(stream, n, shape),
        SampleMethod::CircleDiagnostic => Ok(sample_circle_diagnostic(stream, n)),
    }
}

#[allow(dead_code)]
fn sampler_membership_sanity(batch: &SampleBatch) -> bool {
    batch.points.iter().all(|p| contains(p, batch.shape))
}
