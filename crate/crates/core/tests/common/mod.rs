//! Helpers shared by the integration suites: a conditional sampler of
//! near-diametral pairs, the sampler-uniformity chi-square statistic, and
//! random region-A directions.
#![allow(dead_code)] // each test binary uses a subset

use oblate::geometry::{
    antipodal_gap, deficit, embed, extract, EquatorialCoords, LocalCoords, Point3,
};
use oblate::sampling::{RngStream, SampleBatch};
use oblate::stats::chi_square_statistic;
use oblate::ShapeParam;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{PI, TAU};

/// Uniform pairs conditioned on `deficit <= eps`, by rejection from an
/// explicit superset box of the event.
///
/// Exact localization inequalities (AM-GM inside the pair bound, no
/// asymptotics): `deficit <= eps` forces
///
/// ```text
/// delta + delta' <= B   with  B = (4 eps - eps^2) / (2 (1 - a^2)),
/// 1 - cos(psi)   <= h   with  h = (4 eps - eps^2) / (2 (1 - a^2) (1 - B)),
/// ```
///
/// so drawing `(theta, psi, delta, w, delta', w')` uniformly from the
/// parameter law restricted to `delta, delta' <= B`, `|psi| <= arccos(1-h)`
/// and rejecting on the exact deficit yields the true conditional law
/// (`delta` restricted to `[0, B]` keeps its sqrt-density:
/// `delta = B * U^(2/3)`).
pub fn conditioned_pairs(
    shape: ShapeParam,
    eps: f64,
    count: usize,
    stream: RngStream,
) -> Vec<(Point3, Point3)> {
    let a = shape.a();
    assert!(a > 0.0 && a < 1.0 && eps > 0.0 && eps < 0.5);
    let b = (4.0 * eps - eps * eps) / (2.0 * (1.0 - a * a));
    assert!(b < 1.0, "eps too large for the conditional box");
    let h = (4.0 * eps - eps * eps) / (2.0 * (1.0 - a * a) * (1.0 - b));
    let psi_max = if h >= 2.0 { PI } else { (1.0 - h).acos() };
    let mut rng = stream.rng();
    let draw_half = |rng: &mut ChaCha8Rng| -> (f64, f64) {
        let u: f64 = rng.random();
        let delta = b * (u * u).cbrt();
        let w = (2.0 * rng.random::<f64>() - 1.0) * delta.sqrt();
        (delta, w)
    };
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let theta = TAU * rng.random::<f64>();
        let psi = psi_max * (2.0 * rng.random::<f64>() - 1.0);
        let (d1, w1) = draw_half(&mut rng);
        let (d2, w2) = draw_half(&mut rng);
        let p = embed(&EquatorialCoords::new(theta, d1, w1).unwrap(), shape);
        let q = embed(
            &EquatorialCoords::new(theta + PI + psi, d2, w2).unwrap(),
            shape,
        );
        if deficit(&p, &q) <= eps {
            out.push((p, q));
        }
    }
    out
}

/// Chi-square statistic of a batch over the equiprobable 4x4x4 partition of
/// `(theta, delta-quantile, w-quantile)` space. The delta quartile cuts are
/// `(k/4)^(2/3)` (CDF `delta^(3/2)`); `w / sqrt(delta)` is uniform on
/// `[-1, 1]` given `delta`. 63 degrees of freedom.
pub fn sampler_uniformity_chi2(batch: &SampleBatch) -> f64 {
    let mut counts = [0u64; 64];
    for p in &batch.points {
        let c = extract(p, batch.shape).expect("sampler output inside E");
        let it = ((c.theta() / TAU) * 4.0).min(3.0) as usize;
        let id = (c.delta().powf(1.5) * 4.0).min(3.0) as usize;
        let ratio = if c.delta() > 0.0 {
            c.w() / c.delta().sqrt()
        } else {
            0.0
        };
        let iw = (((ratio + 1.0) / 2.0) * 4.0).clamp(0.0, 3.0) as usize;
        counts[it * 16 + id * 4 + iw] += 1;
    }
    let expected = vec![batch.points.len() as f64 / 64.0; 64];
    chi_square_statistic(&counts, &expected)
}

/// A random region-A direction with `s, s'` in `[0, 2]`, `y^2 <= s`,
/// `tau` in `[-2, 2]`.
pub fn random_direction(rng: &mut ChaCha8Rng) -> LocalCoords {
    let s = 2.0 * rng.random::<f64>();
    let sp = 2.0 * rng.random::<f64>();
    let y = (2.0 * rng.random::<f64>() - 1.0) * s.sqrt();
    let yp = (2.0 * rng.random::<f64>() - 1.0) * sp.sqrt();
    let tau = 2.0 * (2.0 * rng.random::<f64>() - 1.0);
    LocalCoords::new(s, sp, y, yp, tau)
}

/// Largest localization ratio observed over conditioned pairs: the max over
/// pairs of `max((delta+delta')/eps, psi^2/eps, (w^2+w'^2)/eps)`.
pub fn max_localization_ratio(pairs: &[(Point3, Point3)], eps: f64, shape: ShapeParam) -> f64 {
    let mut worst: f64 = 0.0;
    for (p, q) in pairs {
        let cp = extract(p, shape).unwrap();
        let cq = extract(q, shape).unwrap();
        let psi = antipodal_gap(cp.theta(), cq.theta());
        let r = (cp.delta() + cq.delta())
            .max(psi * psi)
            .max(cp.w() * cp.w() + cq.w() * cq.w())
            / eps;
        worst = worst.max(r);
    }
    worst
}
