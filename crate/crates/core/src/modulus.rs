//! Conformal moduli of ring domains.
//!
//! Two kinds of rings appear: the complement of two disjoint round disks, whose
//! modulus is `log R / 2pi` after a Moebius map makes the boundaries concentric,
//! and the complement of two disjoint arcs of one circle, whose modulus depends
//! only on the cross-ratio of the four endpoints and is evaluated with complete
//! elliptic integrals.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{bracket, ccw_distance, cross_ratio, Disk, MoebiusMap, OrientedCircle, SpherePoint};

/// Slack for the Teichmueller comparison `mod(B) <= mod(A, C)`.
pub const TEICHMULLER_SLACK: f64 = 1e-9;

/// The ring `S^2 - (closure(D1) u closure(D2))` between two disjoint round disks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoundRing {
    pub disks: [Disk; 2],
}

impl RoundRing {
    pub fn new(d1: Disk, d2: Disk) -> Result<Self> {
        let inv = d1.inversive_distance(&d2);
        if !(inv > 1.0) {
            return Err(Error::DisksNotDisjoint(inv));
        }
        Ok(RoundRing { disks: [d1, d2] })
    }

    pub fn inversive_distance(&self) -> f64 {
        self.disks[0].inversive_distance(&self.disks[1])
    }

    pub fn mapped(&self, m: &MoebiusMap) -> RoundRing {
        RoundRing {
            disks: [self.disks[0].mapped(m), self.disks[1].mapped(m)],
        }
    }
}

/// Four points on a circle in cyclic order. The removed arcs are
/// `I1 = [a1, a2]` and `I2 = [a3, a4]`, traversed in the circle's chart direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourPointConfig {
    pub circle: OrientedCircle,
    pub points: [SpherePoint; 4],
}

impl FourPointConfig {
    pub fn new(circle: OrientedCircle, points: [SpherePoint; 4]) -> Result<Self> {
        for p in &points {
            if circle.chordal_distance_to(p) > 1e-8 {
                return Err(Error::DegenerateConfig("point is not on the circle".into()));
            }
        }
        let cfg = FourPointConfig { circle, points };
        let lens = cfg.arc_lengths();
        if lens.iter().any(|l| !(*l > 0.0)) || (lens.iter().sum::<f64>() - TAU).abs() > 1e-9 {
            return Err(Error::DegenerateConfig(
                "points are not in strict cyclic order".into(),
            ));
        }
        for i in 0..4 {
            for j in (i + 1)..4 {
                if bracket(&points[i], &points[j]).norm() < 1e-12 {
                    return Err(Error::DegenerateConfig("two endpoints coincide".into()));
                }
            }
        }
        Ok(cfg)
    }

    /// Configuration given by chart angles on `circle`.
    pub fn from_angles(circle: OrientedCircle, angles: [f64; 4]) -> Result<Self> {
        let g = circle.chart();
        let pts = angles.map(|t| g.apply(&SpherePoint::finite(Complex64::from_polar(1.0, t))));
        Self::new(circle, pts)
    }

    /// On the unit circle at the given angles.
    pub fn on_unit_circle(angles: [f64; 4]) -> Result<Self> {
        Self::from_angles(OrientedCircle::unit(), angles)
    }

    /// Chart lengths `(|I1|, |A1|, |I2|, |A2|)` going around the circle.
    pub fn arc_lengths(&self) -> [f64; 4] {
        let g = self.circle.chart();
        let th = self.points.map(|p| crate::geom::angle_of_with(&g, &p));
        [
            ccw_distance(th[0], th[1]),
            ccw_distance(th[1], th[2]),
            ccw_distance(th[2], th[3]),
            ccw_distance(th[3], th[0]),
        ]
    }

    /// `min(|A1|, |A2|) / min(|I1|, |I2|)` in chart lengths.
    pub fn length_ratio(&self) -> f64 {
        let [i1, a1, i2, a2] = self.arc_lengths();
        a1.min(a2) / i1.min(i2)
    }

    pub fn mapped(&self, m: &MoebiusMap) -> FourPointConfig {
        FourPointConfig {
            circle: self.circle.mapped(m),
            points: self.points.map(|p| m.apply(&p)),
        }
    }
}

/// Arithmetic-geometric mean.
pub fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..64 {
        if (a - b).abs() <= 1e-16 * a {
            break;
        }
        let m = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = m;
    }
    a
}

/// Complete elliptic integral of the first kind `K(k)` (modulus convention).
pub fn elliptic_k(k: f64) -> f64 {
    let kp = ((1.0 - k) * (1.0 + k)).sqrt();
    PI / (2.0 * agm(1.0, kp))
}

/// Modulus of the sphere minus two disjoint arcs of a circle whose endpoints
/// have cross-ratio `-mu` (`mu > 0`).
///
/// After a Moebius map the arcs become `[-1/k, -1]` and `[1, 1/k]` with
/// `mu = 4k / (1 - k)^2`, and the ring is the double of a `2K x K'` rectangle,
/// so its modulus is `K(k) / K(k')`.
pub fn two_arc_modulus(mu: f64) -> f64 {
    if mu <= 0.0 {
        return 0.0;
    }
    if mu.is_infinite() {
        return f64::INFINITY;
    }
    let s = (1.0 + mu).sqrt();
    let k = mu / ((s + 1.0) * (s + 1.0));
    let kp = 2.0 * s.sqrt() / (s + 1.0);
    // K(k)/K(k') = agm(1, k) / agm(1, k').
    agm(1.0, k) / agm(1.0, kp)
}

/// Inverse of [`two_arc_modulus`], searched over `mu` in `[e^-700, e^700]`.
pub fn two_arc_mu(modulus: f64) -> f64 {
    let (mut lo, mut hi) = (-700.0f64, 700.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if two_arc_modulus(mid.exp()) < modulus {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (0.5 * (lo + hi)).exp()
}

fn kernel_point(m11: f64, m12: Complex64, m22: f64) -> SpherePoint {
    let v1 = (-m12, Complex64::new(m11, 0.0));
    let v2 = (Complex64::new(m22, 0.0), -m12.conj());
    if v1.0.norm_sqr() + v1.1.norm_sqr() >= v2.0.norm_sqr() + v2.1.norm_sqr() {
        SpherePoint::new(v1.0, v1.1).expect("nonzero kernel")
    } else {
        SpherePoint::new(v2.0, v2.1).expect("nonzero kernel")
    }
}

/// Common symmetric points of the two boundary circles, and the Moebius map
/// sending them to `0` and `infinity` (which makes both circles concentric).
pub fn concentric_normalization(r: &RoundRing) -> Result<MoebiusMap> {
    let c1 = r.disks[0].boundary();
    let c2 = r.disks[1].boundary();
    let p = c1.pairing(&c2);
    if p * p <= 1.0 {
        return Err(Error::DisksNotDisjoint(-p));
    }
    let root = (p * p - 1.0).sqrt();
    let (a1, b1, d1) = c1.hermitian();
    let (a2, b2, d2) = c2.hermitian();
    let limit = |lam: f64| kernel_point(a1 + lam * a2, b1 + b2 * lam, d1 + lam * d2);
    let u = limit(-p + root);
    let v = limit(-p - root);
    // z -> [z,u] / [z,v]
    let (u1, u2) = u.coords();
    let (v1, v2) = v.coords();
    MoebiusMap::new(u2, -u1, v2, -v1)
        .ok_or_else(|| Error::Numeric("limit points coincide".into()))
}

/// `log R / 2pi` after normalizing the boundary circles to `|z| = 1`, `|z| = R`.
pub fn round_ring_modulus(r: &RoundRing) -> Result<f64> {
    let inv = r.inversive_distance();
    if !(inv > 1.0) {
        return Err(Error::DisksNotDisjoint(inv));
    }
    let m = concentric_normalization(r)?;
    let radius = |d: &Disk| {
        let c = d.boundary().mapped(&m);
        c.point_at(0.0)
            .to_complex()
            .map(|z| z.norm())
            .unwrap_or(f64::INFINITY)
    };
    let r1 = radius(&r.disks[0]);
    let r2 = radius(&r.disks[1]);
    if !(r1.is_finite() && r2.is_finite() && r1 > 0.0 && r2 > 0.0) {
        return Err(Error::Numeric("concentric normalization failed".into()));
    }
    Ok((r1 / r2).ln().abs() / TAU)
}

/// Hyperbolic distance between the convex hulls of the two disks.
pub fn disk_pair_distance(r: &RoundRing) -> Result<f64> {
    let inv = r.inversive_distance();
    if !(inv > 1.0) {
        return Err(Error::DisksNotDisjoint(inv));
    }
    Ok(inv.acosh())
}

/// Modulus of `S^2 - (I1 u I2)` for the two removed arcs of `cfg`.
pub fn arc_ring_modulus(cfg: &FourPointConfig) -> Result<f64> {
    let [a1, a2, a3, a4] = &cfg.points;
    let lam = cross_ratio(a1, a2, a3, a4)
        .map_err(|_| Error::DegenerateConfig("two endpoints coincide".into()))?;
    if !(lam.re < 0.0) || lam.im.abs() > 1e-6 * lam.norm().max(1.0) {
        return Err(Error::DegenerateConfig(format!(
            "cross-ratio {lam} is not negative real; points are not in cyclic order"
        )));
    }
    Ok(two_arc_modulus(-lam.re))
}

/// Modulus of the ring removing chart arcs of lengths `(i1, a1, i2, a2)` from a
/// round circle (any order-preserving chart; lengths sum to `2pi`).
pub fn arc_ring_modulus_from_lengths(lengths: [f64; 4]) -> f64 {
    let chord = |x: f64| 2.0 * (0.5 * x).sin();
    let [i1, a1, i2, a2] = lengths;
    two_arc_modulus(chord(a1) * chord(a2) / (chord(i1) * chord(i2)))
}

/// Bounds `delta(t) < mod(A, C) < Delta(t)` in terms of the length ratio
/// `t = min(|A1|, |A2|) / min(|I1|, |I2|)`.
///
/// With chord-length cross-ratios, the extremes over all configurations with a
/// given `t` are approached as the shortest removed arc shrinks to a point,
/// giving `mu -> t^2 / (1 + 2t)` from below and `mu -> t (2 + t)` from above.
pub fn xratio_bounds(t: f64) -> Result<(f64, f64)> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::NonpositiveRatio(t));
    }
    let lo = two_arc_modulus(t * t / (1.0 + 2.0 * t));
    let hi = two_arc_modulus(t * (2.0 + t));
    Ok((lo * (1.0 - 1e-12), hi * (1.0 + 1e-12)))
}

/// The universal constant used in the same-type case of the bridge argument.
pub fn delta0() -> f64 {
    xratio_bounds(1.0).expect("t = 1 is valid").0
}

/// Checks `mod(B) <= mod(A, C)` for a round ring `B` separating the endpoints
/// of `I1` from those of `I2`.
pub fn check_teichmuller(b: &RoundRing, cfg: &FourPointConfig) -> Result<bool> {
    let tol = 1e-9;
    let [p1, p2, p3, p4] = &cfg.points;
    let holds = |d: &Disk, x: &SpherePoint, y: &SpherePoint| {
        d.closure_contains(x, tol) && d.closure_contains(y, tol)
    };
    let [d1, d2] = &b.disks;
    let separated = (holds(d1, p1, p2) && holds(d2, p3, p4)) || (holds(d2, p1, p2) && holds(d1, p3, p4));
    if !separated {
        return Err(Error::NotSeparating);
    }
    let mb = round_ring_modulus(b)?;
    let ma = arc_ring_modulus(cfg)?;
    Ok(mb <= ma + TEICHMULLER_SLACK)
}
