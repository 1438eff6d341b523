use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::tolerance::Tolerances;

/// A point of the Riemann sphere in homogeneous coordinates `[z1 : z2]`.
///
/// The pair is scaled so that `max(|z1|, |z2|) = 1`; the point at infinity is
/// `[1 : 0]` and needs no special handling anywhere.
#[derive(Debug, Clone, Copy)]
pub struct SpherePoint {
    z1: Complex64,
    z2: Complex64,
}

impl SpherePoint {
    /// Builds a point from a homogeneous pair. Returns `None` for `(0, 0)`.
    pub fn new(z1: Complex64, z2: Complex64) -> Option<Self> {
        let m = z1.norm().max(z2.norm());
        if !(m > 0.0) || !m.is_finite() {
            return None;
        }
        Some(SpherePoint { z1: z1 / m, z2: z2 / m })
    }

    pub(crate) fn from_raw(z1: Complex64, z2: Complex64) -> Self {
        Self::new(z1, z2).expect("homogeneous pair must be nonzero")
    }

    pub fn finite(z: Complex64) -> Self {
        Self::from_raw(z, Complex64::new(1.0, 0.0))
    }

    pub fn real(x: f64) -> Self {
        Self::finite(Complex64::new(x, 0.0))
    }

    pub fn infinity() -> Self {
        SpherePoint {
            z1: Complex64::new(1.0, 0.0),
            z2: Complex64::new(0.0, 0.0),
        }
    }

    pub fn zero() -> Self {
        Self::real(0.0)
    }

    pub fn coords(&self) -> (Complex64, Complex64) {
        (self.z1, self.z2)
    }

    /// Affine coordinate `z1 / z2`, or `None` at infinity.
    pub fn to_complex(&self) -> Option<Complex64> {
        if self.z2.norm() < 1e-300 {
            None
        } else {
            Some(self.z1 / self.z2)
        }
    }

    /// Image on the unit sphere in R^3 under inverse stereographic projection
    /// (north pole = infinity).
    pub fn to_unit_sphere(&self) -> [f64; 3] {
        let n1 = self.z1.norm_sqr();
        let n2 = self.z2.norm_sqr();
        let s = n1 + n2;
        let w = self.z1 * self.z2.conj();
        [2.0 * w.re / s, 2.0 * w.im / s, (n1 - n2) / s]
    }

    /// Chordal distance on the sphere of diameter 2.
    pub fn chordal_distance(&self, other: &SpherePoint) -> f64 {
        let num = bracket(self, other).norm();
        let den = (self.z1.norm_sqr() + self.z2.norm_sqr()).sqrt()
            * (other.z1.norm_sqr() + other.z2.norm_sqr()).sqrt();
        2.0 * num / den
    }

    pub fn approx_eq(&self, other: &SpherePoint, tol: f64) -> bool {
        self.chordal_distance(other) <= tol
    }
}

impl PartialEq for SpherePoint {
    fn eq(&self, other: &Self) -> bool {
        self.approx_eq(other, Tolerances::DEFAULT.point_merge)
    }
}

/// The symplectic pairing `[p, q] = p1 q2 - p2 q1`; zero iff `p == q`.
pub fn bracket(p: &SpherePoint, q: &SpherePoint) -> Complex64 {
    p.z1 * q.z2 - p.z2 * q.z1
}

impl Serialize for SpherePoint {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [self.z1.re, self.z1.im, self.z2.re, self.z2.im].serialize(s)
    }
}

impl<'de> Deserialize<'de> for SpherePoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = <[f64; 4]>::deserialize(d)?;
        SpherePoint::new(Complex64::new(v[0], v[1]), Complex64::new(v[2], v[3]))
            .ok_or_else(|| serde::de::Error::custom("sphere point (0, 0) is not allowed"))
    }
}
