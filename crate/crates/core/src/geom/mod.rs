//! Points, Moebius maps and oriented circles on the Riemann sphere.
//!
//! Everything is homogeneous: points are pairs `[z1 : z2]`, maps are unimodular
//! matrices and circles are Hermitian matrices of determinant `-1`, so lines and
//! the point at infinity go through the same code paths as everything else.

mod circle;
mod moebius;
mod point;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use circle::{ccw_distance, normalize_angle, OrientedCircle};
pub(crate) use circle::{angle_of_with, point_at_with};
pub use moebius::MoebiusMap;
pub use point::{bracket, SpherePoint};

use crate::error::{Error, Result};

pub fn apply_moebius(m: &MoebiusMap, p: &SpherePoint) -> SpherePoint {
    m.apply(p)
}

pub fn circle_through(p: &SpherePoint, q: &SpherePoint, r: &SpherePoint) -> Result<OrientedCircle> {
    OrientedCircle::through(p, q, r)
}

pub fn map_circle(m: &MoebiusMap, c: &OrientedCircle) -> OrientedCircle {
    c.mapped(m)
}

/// Cross-ratio normalized so that `(p1, p2, p3) -> (0, 1, infinity)`; the value
/// is the image of `p4`.
pub fn cross_ratio(
    p1: &SpherePoint,
    p2: &SpherePoint,
    p3: &SpherePoint,
    p4: &SpherePoint,
) -> Result<Complex64> {
    let tol = 1e-12;
    let pts = [p1, p2, p3, p4];
    for i in 0..4 {
        for j in (i + 1)..4 {
            if bracket(pts[i], pts[j]).norm() < tol {
                return Err(Error::DegenerateTriple);
            }
        }
    }
    // [p4,p1][p2,p3] / ([p4,p3][p2,p1])
    let num = bracket(p4, p1) * bracket(p2, p3);
    let den = bracket(p4, p3) * bracket(p2, p1);
    Ok(num / den)
}

/// Which side of its boundary circle a disk occupies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Positive,
    Negative,
}

/// An open round disk on the sphere: one side of an oriented circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disk {
    pub circle: OrientedCircle,
    pub side: Side,
}

impl Disk {
    /// Euclidean disk `|z - center| < radius`.
    pub fn euclidean(center: Complex64, radius: f64) -> Option<Self> {
        Some(Disk {
            circle: OrientedCircle::disk_boundary(center, radius)?,
            side: Side::Positive,
        })
    }

    /// Boundary circle oriented so that the disk is its positive side.
    pub fn boundary(&self) -> OrientedCircle {
        match self.side {
            Side::Positive => self.circle,
            Side::Negative => self.circle.reversed(),
        }
    }

    pub fn contains(&self, p: &SpherePoint) -> bool {
        self.boundary().on_positive_side(p)
    }

    /// Closed disk membership with slack `tol` on the normalized form.
    pub fn closure_contains(&self, p: &SpherePoint, tol: f64) -> bool {
        self.boundary().form(p) <= tol
    }

    pub fn mapped(&self, m: &MoebiusMap) -> Disk {
        Disk {
            circle: self.boundary().mapped(m),
            side: Side::Positive,
        }
    }

    /// Inversive distance between the boundaries, signed so that it exceeds 1
    /// exactly when the two disks have disjoint closures.
    pub fn inversive_distance(&self, other: &Disk) -> f64 {
        -self.boundary().pairing(&other.boundary())
    }

    /// Spherical diameter proxy: chordal diameter of the disk on the unit sphere.
    pub fn chordal_diameter(&self) -> f64 {
        let (_, h0) = self.boundary().sphere_plane();
        let nn = (1.0 + h0 * h0).sqrt();
        // The disk is the cap {n.x + h0 < 0}; its angular radius about -n.
        let cos_r = (h0 / nn).clamp(-1.0, 1.0);
        let ang = cos_r.acos();
        if ang <= std::f64::consts::FRAC_PI_2 {
            2.0 * ang.sin()
        } else {
            2.0
        }
    }
}

/// An arc of a parent circle in that circle's angular chart.
///
/// The arc runs counterclockwise from `start` to `end`; its length is in
/// `(0, 2pi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleArc {
    pub start: f64,
    pub end: f64,
    pub closed: bool,
}

impl CircleArc {
    pub fn open(start: f64, end: f64) -> Self {
        CircleArc {
            start: normalize_angle(start),
            end: normalize_angle(end),
            closed: false,
        }
    }

    pub fn closed(start: f64, end: f64) -> Self {
        CircleArc {
            closed: true,
            ..Self::open(start, end)
        }
    }

    pub fn length(&self) -> f64 {
        ccw_distance(self.start, self.end)
    }

    pub fn midpoint(&self) -> f64 {
        normalize_angle(self.start + 0.5 * self.length())
    }

    /// Membership of an angle, honoring the open/closed flag.
    pub fn contains_angle(&self, theta: f64) -> bool {
        let d = ccw_distance(self.start, theta);
        if self.closed {
            d <= self.length() || d == 0.0
        } else {
            d > 0.0 && d < self.length()
        }
    }

    pub fn endpoints_on(&self, c: &OrientedCircle) -> (SpherePoint, SpherePoint) {
        let g = c.chart();
        (point_at_with(&g, self.start), point_at_with(&g, self.end))
    }
}
