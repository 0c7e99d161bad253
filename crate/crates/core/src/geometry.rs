//! Exact and asymptotic geometry of the oblate spheroid
//!
//! ```text
//! E = { (x1, x2, x3) : x1^2 + x2^2 + x3^2 / a^2 <= 1 },   0 < a < 1.
//! ```
//!
//! The diameter of `E` equals 2 and is attained by every antipodal pair on
//! the equatorial circle `x1^2 + x2^2 = 1, x3 = 0`. Everything in this module
//! is organized around that fact:
//!
//! * equatorial coordinates `(theta, delta, w)` with
//!   `x = (sqrt(1-delta) cos(theta), sqrt(1-delta) sin(theta), a w)`,
//!   where `delta = 1 - (x1^2 + x2^2)` is the radial defect and `w = x3 / a`;
//!   membership in `E` is exactly `w^2 <= delta`;
//! * the distance deficit `2 - |x - y|` of a nearly antipodal pair and its
//!   quadratic approximation
//!   `G(s, s', y, y', tau) = (s + s')/2 + tau^2/4 - (a^2/4)(y - y')^2`
//!   under the rescaling `delta = eps*s`, `w = sqrt(eps)*y`,
//!   `psi = sqrt(eps)*tau` (`psi` = angular deviation from antipodality);
//! * an exact upper bound on the distance of a pair in terms of the two
//!   radial defects alone, which drives the pruned diameter sweep.
//!
//! All functions are pure; nothing here touches an RNG.

use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};
use thiserror::Error;

/// Slack allowed on the defining quadratic form when testing membership in
/// `E`, and (equivalently) on `w^2 <= delta` for equatorial coordinates.
/// For a point built from valid coordinates the two checks agree exactly:
/// `form - 1 = w^2 - delta` up to rounding.
pub const CONTAINMENT_SLACK: f64 = 1e-12;

/// Tolerance for the embed/extract round trip away from the `delta = 1` axis.
pub const ROUND_TRIP_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum GeometryError {
    #[error("shape parameter a = {a} outside [0, 1]")]
    InvalidShape { a: f64 },
    #[error("shape parameter a = {a} not allowed here (need {need})")]
    ShapeNotAllowed { a: f64, need: &'static str },
    #[error("equatorial coordinates out of range: theta={theta}, delta={delta}, w={w}")]
    CoordsOutOfRange { theta: f64, delta: f64, w: f64 },
    #[error("point ({x1}, {x2}, {x3}) lies outside the spheroid (form = {form})")]
    PointOutside { x1: f64, x2: f64, x3: f64, form: f64 },
    #[error("direction has G = 0; the expansion ratio is undefined there")]
    DegenerateDirection,
    #[error("scaled coordinates leave the parameter domain (eps = {eps} too large)")]
    ScaleTooLarge { eps: f64 },
    #[error("localization predicate needs deficit <= eps, got deficit = {deficit} > eps = {eps}")]
    DeficitExceedsEps { deficit: f64, eps: f64 },
}

/// Semi-axis ratio `a` of the spheroid (vertical semi-axis; the two
/// equatorial semi-axes are 1).
///
/// The main theory requires `0 < a < 1`. The degenerate endpoints are still
/// representable: `a = 0` (unit circle support) and `a = 1` (unit ball) are
/// used by the diagnostic samplers and the exponent experiment only, and
/// operations that need an interior value validate it themselves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct ShapeParam(f64);

impl ShapeParam {
    pub fn new(a: f64) -> Result<Self, GeometryError> {
        if a.is_finite() && (0.0..=1.0).contains(&a) {
            Ok(ShapeParam(a))
        } else {
            Err(GeometryError::InvalidShape { a })
        }
    }

    #[inline]
    pub fn a(self) -> f64 {
        self.0
    }

    /// True at the endpoints `a = 0` (circle) and `a = 1` (ball).
    pub fn is_degenerate(self) -> bool {
        self.0 == 0.0 || self.0 == 1.0
    }

    pub(crate) fn require_interior(self, need: &'static str) -> Result<(), GeometryError> {
        if self.is_degenerate() {
            Err(GeometryError::ShapeNotAllowed { a: self.0, need })
        } else {
            Ok(())
        }
    }
}

impl TryFrom<f64> for ShapeParam {
    type Error = GeometryError;
    fn try_from(a: f64) -> Result<Self, Self::Error> {
        ShapeParam::new(a)
    }
}

impl From<ShapeParam> for f64 {
    fn from(s: ShapeParam) -> f64 {
        s.0
    }
}

/// A point in Cartesian coordinates. Membership in `E` is checked by
/// [`contains`], never assumed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point3 {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

impl Point3 {
    pub fn new(x1: f64, x2: f64, x3: f64) -> Self {
        Point3 { x1, x2, x3 }
    }

    #[inline]
    pub fn dist_squared(&self, other: &Point3) -> f64 {
        let dx = self.x1 - other.x1;
        let dy = self.x2 - other.x2;
        let dz = self.x3 - other.x3;
        dx * dx + dy * dy + dz * dz
    }

    #[inline]
    pub fn dist(&self, other: &Point3) -> f64 {
        self.dist_squared(other).sqrt()
    }

    #[inline]
    pub fn norm(&self) -> f64 {
        (self.x1 * self.x1 + self.x2 * self.x2 + self.x3 * self.x3).sqrt()
    }

    /// Radial defect `delta = 1 - (x1^2 + x2^2)`, the distance (in the
    /// squared planar radius) from the equatorial circle.
    #[inline]
    pub fn radial_defect(&self) -> f64 {
        1.0 - (self.x1 * self.x1 + self.x2 * self.x2)
    }

    /// Value of the defining quadratic form `x1^2 + x2^2 + x3^2/a^2`.
    ///
    /// At `a = 0` the spheroid degenerates to the unit disk in the plane
    /// `x3 = 0`; the form is the planar part there and `+inf` off the plane.
    #[inline]
    pub fn quadratic_form(&self, shape: ShapeParam) -> f64 {
        let planar = self.x1 * self.x1 + self.x2 * self.x2;
        let a = shape.a();
        if a == 0.0 {
            if self.x3 == 0.0 {
                planar
            } else {
                f64::INFINITY
            }
        } else {
            let v = self.x3 / a;
            planar + v * v
        }
    }
}

/// Equatorial coordinates `(theta, delta, w)` of a point of `E`:
/// `x = (sqrt(1-delta) cos(theta), sqrt(1-delta) sin(theta), a w)`.
///
/// Invariants enforced at construction: `delta` in `[0, 1]`,
/// `w^2 <= delta` (up to [`CONTAINMENT_SLACK`]), and `theta` normalized
/// into `[0, 2pi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquatorialCoords {
    theta: f64,
    delta: f64,
    w: f64,
}

impl EquatorialCoords {
    pub fn new(theta: f64, delta: f64, w: f64) -> Result<Self, GeometryError> {
        if !(theta.is_finite() && delta.is_finite() && w.is_finite())
            || !(0.0..=1.0).contains(&delta)
            || w * w > delta + CONTAINMENT_SLACK
        {
            return Err(GeometryError::CoordsOutOfRange { theta, delta, w });
        }
        Ok(EquatorialCoords {
            theta: normalize_angle(theta),
            delta,
            w,
        })
    }

    #[inline]
    pub fn theta(&self) -> f64 {
        self.theta
    }

    #[inline]
    pub fn delta(&self) -> f64 {
        self.delta
    }

    #[inline]
    pub fn w(&self) -> f64 {
        self.w
    }
}

/// Rescaled local coordinates `(s, s', y, y', tau)` of a nearly diametral
/// pair: `delta = eps*s`, `delta' = eps*s'`, `w = sqrt(eps)*y`,
/// `w' = sqrt(eps)*y'`, `psi = sqrt(eps)*tau`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalCoords {
    pub s: f64,
    pub sp: f64,
    pub y: f64,
    pub yp: f64,
    pub tau: f64,
}

impl LocalCoords {
    pub fn new(s: f64, sp: f64, y: f64, yp: f64, tau: f64) -> Self {
        LocalCoords { s, sp, y, yp, tau }
    }

    /// Membership in the region `A = { s, s' >= 0, y^2 <= s, y'^2 <= s' }`.
    pub fn in_region_a(&self) -> bool {
        self.s >= 0.0 && self.sp >= 0.0 && self.y * self.y <= self.s && self.yp * self.yp <= self.sp
    }
}

/// Distance deficit of a concrete pair of points, `value = 2 - |p - q|`,
/// together with the indices of the pair it was measured on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairDeficit {
    pub value: f64,
    pub pair: (usize, usize),
}

impl PairDeficit {
    pub fn measure(i: usize, j: usize, p: &Point3, q: &Point3) -> Self {
        PairDeficit {
            value: deficit(p, q),
            pair: if i <= j { (i, j) } else { (j, i) },
        }
    }
}

/// Normalize an angle into `[0, 2pi)`.
#[inline]
pub fn normalize_angle(theta: f64) -> f64 {
    let mut t = theta.rem_euclid(TAU);
    // rem_euclid can round up to exactly 2*pi for tiny negative inputs.
    if t >= TAU {
        t -= TAU;
    }
    t
}

#[inline]
pub(crate) fn embed_raw(theta: f64, delta: f64, w: f64, a: f64) -> Point3 {
    let r = (1.0 - delta).sqrt();
    let (sin_t, cos_t) = theta.sin_cos();
    Point3 {
        x1: r * cos_t,
        x2: r * sin_t,
        x3: a * w,
    }
}

/// Embed equatorial coordinates:
/// `x(theta, delta, w) = (sqrt(1-delta) cos(theta), sqrt(1-delta) sin(theta), a*w)`.
///
/// The output satisfies [`contains`] up to [`CONTAINMENT_SLACK`] on the
/// quadratic form; invalid coordinates are rejected at
/// [`EquatorialCoords::new`].
pub fn embed(c: &EquatorialCoords, shape: ShapeParam) -> Point3 {
    embed_raw(c.theta, c.delta, c.w, shape.a())
}

/// Invert [`embed`]. Rejects points outside `E` (quadratic form beyond
/// `1 + `[`CONTAINMENT_SLACK`]). At the vertical axis `x1 = x2 = 0` the
/// spatial angle is undefined and `theta = 0` by convention.
///
/// Requires `a > 0` (at `a = 0` the vertical coordinate `w = x3/a` is
/// undefined).
pub fn extract(p: &Point3, shape: ShapeParam) -> Result<EquatorialCoords, GeometryError> {
    let a = shape.a();
    if a == 0.0 {
        return Err(GeometryError::ShapeNotAllowed { a, need: "a > 0" });
    }
    let form = p.quadratic_form(shape);
    if !(form <= 1.0 + CONTAINMENT_SLACK) {
        return Err(GeometryError::PointOutside {
            x1: p.x1,
            x2: p.x2,
            x3: p.x3,
            form,
        });
    }
    let delta = p.radial_defect().clamp(0.0, 1.0);
    let theta = if p.x1 == 0.0 && p.x2 == 0.0 {
        0.0
    } else {
        normalize_angle(p.x2.atan2(p.x1))
    };
    // For points passing the containment check, w can exceed sqrt(delta)
    // only by rounding; clamp so the invariant holds exactly.
    let bound = delta.sqrt();
    let w = (p.x3 / a).clamp(-bound, bound);
    EquatorialCoords::new(theta, delta, w)
}

/// Membership in `E`: quadratic form `<= 1 + `[`CONTAINMENT_SLACK`].
pub fn contains(p: &Point3, shape: ShapeParam) -> bool {
    p.quadratic_form(shape) <= 1.0 + CONTAINMENT_SLACK
}

/// Distance deficit `2 - |p - q|`. Exactly 0 for antipodal equator points,
/// exactly 2 for coincident points.
#[inline]
pub fn deficit(p: &Point3, q: &Point3) -> f64 {
    2.0 - p.dist(q)
}

/// Deficit of a pair given in equatorial coordinates, without embedding:
///
/// ```text
/// |x - y|^2 = r^2 + r'^2 - 2 r r' cos(theta - theta') + a^2 (w - w')^2,
/// r = sqrt(1 - delta).
/// ```
///
/// Agrees with `deficit(embed(c), embed(c'))` to ~1e-15; used in sampling
/// hot loops where the Cartesian embedding would cost two extra sincos.
#[inline]
pub fn coord_deficit(c: &EquatorialCoords, cp: &EquatorialCoords, shape: ShapeParam) -> f64 {
    raw_pair_deficit(
        c.theta, c.delta, c.w, cp.theta, cp.delta, cp.w,
        shape.a(),
    )
}

#[inline]
#[allow(clippy::too_many_arguments)]
pub(crate) fn raw_pair_deficit(
    t1: f64,
    d1: f64,
    w1: f64,
    t2: f64,
    d2: f64,
    w2: f64,
    a: f64,
) -> f64 {
    let r1_sq = 1.0 - d1;
    let r2_sq = 1.0 - d2;
    let r1r2 = (r1_sq * r2_sq).sqrt();
    let dw = w1 - w2;
    let dist2 = r1_sq + r2_sq - 2.0 * r1r2 * (t1 - t2).cos() + a * a * dw * dw;
    2.0 - dist2.max(0.0).sqrt()
}

/// The unique `psi` in `[-pi, pi)` with `theta' = theta + pi + psi (mod 2pi)`:
/// the angular deviation from exact antipodality.
pub fn antipodal_gap(theta: f64, theta_p: f64) -> f64 {
    let r = (theta_p - theta - PI).rem_euclid(TAU);
    if r >= PI {
        r - TAU
    } else {
        r
    }
}

/// The limiting quadratic form of the local expansion:
/// `G(s, s', y, y', tau) = (s + s')/2 + tau^2/4 - (a^2/4) (y - y')^2`.
///
/// `G` is a polynomial, defined everywhere; membership in the region `A`
/// is checked separately by [`LocalCoords::in_region_a`].
#[inline]
pub fn local_g(c: &LocalCoords, shape: ShapeParam) -> f64 {
    let a = shape.a();
    let dy = c.y - c.yp;
    0.5 * (c.s + c.sp) + 0.25 * c.tau * c.tau - 0.25 * a * a * dy * dy
}

/// Ratio of the exact deficit of the rescaled pair to its quadratic
/// approximation `eps * G(direction)`:
///
/// ```text
/// deficit( x(theta, eps*s, sqrt(eps)*y),
///          x(theta + pi + sqrt(eps)*tau, eps*s', sqrt(eps)*y') ) / (eps * G)
/// ```
///
/// Tends to 1 as `eps -> 0`, uniformly in `theta`. Directions with `G = 0`
/// are rejected (the ratio is genuinely undefined on that measure-zero set),
/// as are scalings that leave the parameter domain (`eps*s > 1`).
pub fn expansion_ratio(
    direction: &LocalCoords,
    theta: f64,
    eps: f64,
    shape: ShapeParam,
) -> Result<f64, GeometryError> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(GeometryError::ScaleTooLarge { eps });
    }
    let g = local_g(direction, shape);
    if g == 0.0 {
        return Err(GeometryError::DegenerateDirection);
    }
    if eps * direction.s > 1.0 || eps * direction.sp > 1.0 {
        return Err(GeometryError::ScaleTooLarge { eps });
    }
    let sqrt_eps = eps.sqrt();
    let c1 = EquatorialCoords::new(theta, eps * direction.s, sqrt_eps * direction.y)?;
    let c2 = EquatorialCoords::new(
        theta + PI + sqrt_eps * direction.tau,
        eps * direction.sp,
        sqrt_eps * direction.yp,
    )?;
    let d = deficit(&embed(&c1, shape), &embed(&c2, shape));
    Ok(d / (eps * g))
}

/// Localization predicate: given a pair with `deficit(p, q) <= eps`, check
/// the three bounds
///
/// ```text
/// delta + delta' <= C*eps,   psi^2 <= C*eps,   w^2 + w'^2 <= C*eps,
/// ```
///
/// where `psi` is the antipodal gap of the extracted angles. Calls with
/// `deficit(p, q) > eps` are rejected (the predicate is not applicable).
pub fn localization_check(
    p: &Point3,
    q: &Point3,
    eps: f64,
    c: f64,
    shape: ShapeParam,
) -> Result<bool, GeometryError> {
    let d = deficit(p, q);
    if d > eps {
        return Err(GeometryError::DeficitExceedsEps { deficit: d, eps });
    }
    let cp = extract(p, shape)?;
    let cq = extract(q, shape)?;
    let psi = antipodal_gap(cp.theta(), cq.theta());
    let bound = c * eps;
    Ok(cp.delta() + cq.delta() <= bound
        && psi * psi <= bound
        && cp.w() * cp.w() + cq.w() * cq.w() <= bound)
}

/// Squared version of [`pair_upper_bound`]; the sweep hot path compares
/// squared distances and never takes the root.
#[inline]
pub fn pair_upper_bound_sq(delta_i: f64, delta_j: f64, a: f64) -> f64 {
    let planar = (1.0 - delta_i).sqrt() + (1.0 - delta_j).sqrt();
    let vertical = delta_i.sqrt() + delta_j.sqrt();
    planar * planar + a * a * vertical * vertical
}

/// Largest possible distance between two points of `E` with radial defects
/// `delta_i`, `delta_j` (attained at opposite angular directions and
/// opposite vertical signs):
///
/// ```text
/// sqrt( (sqrt(1-delta_i) + sqrt(1-delta_j))^2 + a^2 (sqrt(delta_i) + sqrt(delta_j))^2 )
/// ```
///
/// For `a < 1` the bound is strictly decreasing in the *larger* defect, and
/// `bound(d, d)^2 = 4 - 4 d (1 - a^2)` is strictly decreasing in `d`; those
/// two monotonicity facts make the pruned diameter sweep sound. (It is *not*
/// monotone in the smaller defect over the whole square; the sweep never
/// relies on that.)
pub fn pair_upper_bound(delta_i: f64, delta_j: f64, shape: ShapeParam) -> f64 {
    pair_upper_bound_sq(delta_i, delta_j, shape.a()).sqrt()
}

/// Squared bound for a pair whose defects both equal `d`:
/// `4 - 4 d (1 - a^2)`. Used as the sweep's termination bound.
#[inline]
pub fn equal_defect_bound_sq(d: f64, a: f64) -> f64 {
    4.0 - 4.0 * d * (1.0 - a * a)
}

/// Exact localization radius: if `deficit(p, q) <= eps` then both radial
/// defects satisfy `delta_i + delta_j <= (4 eps - eps^2) / (2 (1 - a^2))`.
///
/// Derivation: AM-GM inside the pair bound gives the exact inequality
/// `|x - y|^2 <= 4 - 2 (1 - a^2)(delta + delta')`, and `deficit <= eps`
/// forces `|x - y|^2 >= (2 - eps)^2`. Used to pre-filter candidate points
/// before the sweep; for `eps >= 2` there is no constraint.
#[inline]
pub fn defect_cut(eps: f64, a: f64) -> f64 {
    if eps >= 2.0 {
        f64::INFINITY
    } else {
        (4.0 * eps - eps * eps) / (2.0 * (1.0 - a * a))
    }
}
