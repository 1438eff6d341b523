use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::moebius::MoebiusMap;
use super::point::SpherePoint;
use crate::error::Result;
use crate::tolerance::Tolerances;

/// An oriented circle (or line) on the Riemann sphere.
///
/// Stored as a Hermitian matrix `(h11 h12; conj(h12) h22)` with determinant
/// `-1`. The *positive side* of the circle is where the Hermitian form
/// `z^H H z` is negative; reversing orientation negates the matrix. Moebius maps
/// act by congruence, `H -> M^{-H} H M^{-1}`, so lines need no special case.
#[derive(Debug, Clone, Copy)]
pub struct OrientedCircle {
    h11: f64,
    h12: Complex64,
    h22: f64,
}

impl OrientedCircle {
    /// Normalizes a Hermitian matrix with negative determinant to det = -1.
    pub fn from_hermitian(h11: f64, h12: Complex64, h22: f64) -> Option<Self> {
        let det = h11 * h22 - h12.norm_sqr();
        if !(det < 0.0) || !det.is_finite() {
            return None;
        }
        let k = 1.0 / (-det).sqrt();
        Some(OrientedCircle {
            h11: h11 * k,
            h12: h12 * k,
            h22: h22 * k,
        })
    }

    /// The unit circle with the unit disk on its positive side.
    pub fn unit() -> Self {
        OrientedCircle {
            h11: 1.0,
            h12: Complex64::new(0.0, 0.0),
            h22: -1.0,
        }
    }

    /// The extended real line with the upper half-plane on its positive side.
    pub fn real_line() -> Self {
        OrientedCircle {
            h11: 0.0,
            h12: Complex64::new(0.0, -1.0),
            h22: 0.0,
        }
    }

    /// Circle `|z - center| = radius` with the open disk as positive side.
    pub fn disk_boundary(center: Complex64, radius: f64) -> Option<Self> {
        if !(radius > 0.0) {
            return None;
        }
        Self::from_hermitian(
            1.0 / radius,
            -center / radius,
            (center.norm_sqr() - radius * radius) / radius,
        )
    }

    /// The circle through `p, q, r`, oriented so that traversing `p -> q -> r`
    /// keeps the positive side on the left.
    pub fn through(p: &SpherePoint, q: &SpherePoint, r: &SpherePoint) -> Result<Self> {
        let m = MoebiusMap::to_zero_one_inf(p, q, r)?;
        Ok(Self::real_line().mapped(&m.inverse()))
    }

    pub fn hermitian(&self) -> (f64, Complex64, f64) {
        (self.h11, self.h12, self.h22)
    }

    pub fn det(&self) -> f64 {
        self.h11 * self.h22 - self.h12.norm_sqr()
    }

    pub fn reversed(&self) -> Self {
        OrientedCircle {
            h11: -self.h11,
            h12: -self.h12,
            h22: -self.h22,
        }
    }

    /// Raw Hermitian form at an unnormalized homogeneous vector.
    pub(crate) fn form_raw(&self, z1: Complex64, z2: Complex64) -> f64 {
        self.h11 * z1.norm_sqr() + self.h22 * z2.norm_sqr() + 2.0 * (z1.conj() * self.h12 * z2).re
    }

    /// Hermitian form at `p`, scaled by `|z1|^2 + |z2|^2`.
    pub fn form(&self, p: &SpherePoint) -> f64 {
        let (z1, z2) = p.coords();
        self.form_raw(z1, z2) / (z1.norm_sqr() + z2.norm_sqr())
    }

    pub fn contains(&self, p: &SpherePoint) -> bool {
        self.form(p).abs() <= Tolerances::DEFAULT.incidence * self.scale()
    }

    /// True when `p` lies strictly on the positive side.
    pub fn on_positive_side(&self, p: &SpherePoint) -> bool {
        self.form(p) < 0.0
    }

    fn scale(&self) -> f64 {
        self.h11.abs().max(self.h22.abs()).max(self.h12.norm()).max(1.0)
    }

    /// Image of the circle under `m`; incidence and orientation are preserved.
    pub fn mapped(&self, m: &MoebiusMap) -> Self {
        let n = m.inverse();
        let [a, b, c, d] = n.entries();
        // H' = N^H H N with N = (a b; c d).
        let col = |x: Complex64, y: Complex64| {
            (
                self.h11 * x + self.h12 * y,
                self.h12.conj() * x + self.h22 * y,
            )
        };
        let (h_a0, h_a1) = col(a, c);
        let (h_b0, h_b1) = col(b, d);
        let h11 = (a.conj() * h_a0 + c.conj() * h_a1).re;
        let h12 = a.conj() * h_b0 + c.conj() * h_b1;
        let h22 = (b.conj() * h_b0 + d.conj() * h_b1).re;
        Self::from_hermitian(h11, h12, h22).unwrap_or(OrientedCircle { h11, h12, h22 })
    }

    /// Symmetric bilinear pairing whose quadratic form is `-det`.
    ///
    /// For two positively oriented disk boundaries this is minus the inversive
    /// distance; disks on the positive sides are disjoint with disjoint closures
    /// iff `-pairing > 1`.
    pub fn pairing(&self, other: &OrientedCircle) -> f64 {
        (self.h12 * other.h12.conj()).re - 0.5 * (self.h11 * other.h22 + other.h11 * self.h22)
    }

    /// Frobenius distance between normalized representatives (orientation-sensitive).
    pub fn distance(&self, other: &OrientedCircle) -> f64 {
        ((self.h11 - other.h11).powi(2)
            + (self.h22 - other.h22).powi(2)
            + 2.0 * (self.h12 - other.h12).norm_sqr())
        .sqrt()
    }

    pub fn unoriented_distance(&self, other: &OrientedCircle) -> f64 {
        self.distance(other).min(self.reversed().distance(other))
    }

    /// Plane `n . x + h0 = 0` cutting the circle out of the unit sphere; the
    /// form satisfies `form(p) = n . x(p) + h0` and `|n|^2 = 1 + h0^2`.
    pub fn sphere_plane(&self) -> ([f64; 3], f64) {
        (
            [self.h12.re, self.h12.im, 0.5 * (self.h11 - self.h22)],
            0.5 * (self.h11 + self.h22),
        )
    }

    /// Chordal distance (sphere of diameter 2) from `p` to the circle.
    pub fn chordal_distance_to(&self, p: &SpherePoint) -> f64 {
        let (n, h0) = self.sphere_plane();
        let nn = (1.0 + h0 * h0).sqrt();
        let x = p.to_unit_sphere();
        let cos_p = ((n[0] * x[0] + n[1] * x[1] + n[2] * x[2]) / nn).clamp(-1.0, 1.0);
        let cos_c = (-h0 / nn).clamp(-1.0, 1.0);
        let dang = (cos_p.acos() - cos_c.acos()).abs();
        2.0 * (0.5 * dang).sin()
    }

    /// Euclidean center and radius, when the circle is not a line.
    pub fn center_radius(&self) -> Option<(Complex64, f64)> {
        if self.h11.abs() < 1e-14 {
            return None;
        }
        Some((-self.h12 / self.h11, 1.0 / self.h11.abs()))
    }

    /// A Moebius map `g` carrying the positively oriented unit circle onto this
    /// circle. The angular chart `theta -> g(e^{i theta})` runs with the
    /// positive side on the left.
    pub fn chart(&self) -> MoebiusMap {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let candidates = [
            (one, zero),
            (zero, one),
            (one * s, one * s),
            (one * s, Complex64::new(0.0, s)),
        ];
        let mut best = candidates[0];
        let mut best_val = self.form_raw(best.0, best.1);
        for &w in &candidates[1..] {
            let v = self.form_raw(w.0, w.1);
            if v.abs() > best_val.abs() {
                best = w;
                best_val = v;
            }
        }
        let orth = |w: (Complex64, Complex64)| {
            // row r = w^H H; any vector annihilated by r.
            let r1 = w.0.conj() * self.h11 + w.1.conj() * self.h12.conj();
            let r2 = w.0.conj() * self.h12 + w.1.conj() * self.h22;
            (-r2, r1)
        };
        let scaled = |w: (Complex64, Complex64), target: f64| {
            let v = self.form_raw(w.0, w.1);
            let k = (target / v).sqrt();
            (w.0 * k, w.1 * k)
        };
        let (u, v) = if best_val > 0.0 {
            let u = scaled(best, 1.0);
            (u, scaled(orth(u), -1.0))
        } else {
            let v = scaled(best, -1.0);
            (scaled(orth(v), 1.0), v)
        };
        let det = u.0 * v.1 - v.0 * u.1;
        let phase = det.conj() / det.norm();
        let v = (v.0 * phase, v.1 * phase);
        MoebiusMap::new(u.0, v.0, u.1, v.1).expect("chart matrix is unimodular")
    }

    pub fn point_at(&self, theta: f64) -> SpherePoint {
        point_at_with(&self.chart(), theta)
    }

    /// Chart angle in `[0, 2pi)` of a point on the circle.
    pub fn angle_of(&self, p: &SpherePoint) -> f64 {
        angle_of_with(&self.chart(), p)
    }
}

pub(crate) fn point_at_with(chart: &MoebiusMap, theta: f64) -> SpherePoint {
    chart.apply(&SpherePoint::finite(Complex64::from_polar(1.0, theta)))
}

pub(crate) fn angle_of_with(chart: &MoebiusMap, p: &SpherePoint) -> f64 {
    let (w1, w2) = chart.inverse().apply(p).coords();
    normalize_angle((w1 * w2.conj()).arg())
}

/// Reduces an angle into `[0, 2pi)`.
pub fn normalize_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Counterclockwise angular distance from `from` to `to`, in `[0, 2pi)`.
pub fn ccw_distance(from: f64, to: f64) -> f64 {
    normalize_angle(to - from)
}

impl PartialEq for OrientedCircle {
    fn eq(&self, other: &Self) -> bool {
        self.distance(other) <= Tolerances::DEFAULT.circle_merge
    }
}

#[derive(Serialize, Deserialize)]
struct CircleRepr {
    h: [f64; 4],
    orientation: i8,
}

impl OrientedCircle {
    /// Canonical unsigned representative and the orientation sign relative to it.
    fn canonical(&self) -> ([f64; 4], i8) {
        let h = [self.h11, self.h12.re, self.h12.im, self.h22];
        let lead = [h[0], h[3], h[1], h[2]]
            .into_iter()
            .find(|x| *x != 0.0)
            .unwrap_or(1.0);
        if lead > 0.0 {
            (h, 1)
        } else {
            (h.map(|x| -x), -1)
        }
    }
}

impl Serialize for OrientedCircle {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let (h, orientation) = self.canonical();
        CircleRepr { h, orientation }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for OrientedCircle {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = CircleRepr::deserialize(d)?;
        let sign = match r.orientation {
            1 => 1.0,
            -1 => -1.0,
            _ => return Err(serde::de::Error::custom("orientation must be 1 or -1")),
        };
        let h = r.h.map(|x| x * sign);
        let raw = OrientedCircle {
            h11: h[0],
            h12: Complex64::new(h[1], h[2]),
            h22: h[3],
        };
        if (raw.det() + 1.0).abs() <= 1e-12 {
            return Ok(raw);
        }
        OrientedCircle::from_hermitian(raw.h11, raw.h12, raw.h22)
            .ok_or_else(|| serde::de::Error::custom("Hermitian matrix must have negative determinant"))
    }
}
