use std::ops::Mul;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::point::{bracket, SpherePoint};
use crate::error::{Error, Result};

/// An element of PSL(2, C), stored as a determinant-one matrix `(a b; c d)`.
///
/// A matrix and its negation describe the same map; equality ignores the sign.
#[derive(Debug, Clone, Copy)]
pub struct MoebiusMap {
    pub(crate) a: Complex64,
    pub(crate) b: Complex64,
    pub(crate) c: Complex64,
    pub(crate) d: Complex64,
}

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

impl MoebiusMap {
    /// Builds a map from any invertible matrix, rescaling it to determinant one.
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Option<Self> {
        let det = a * d - b * c;
        let scale = (a.norm_sqr() + b.norm_sqr() + c.norm_sqr() + d.norm_sqr()).sqrt();
        if !(det.norm() > 1e-14 * scale * scale) || !det.is_finite() {
            return None;
        }
        let k = det.sqrt().inv();
        Some(MoebiusMap {
            a: a * k,
            b: b * k,
            c: c * k,
            d: d * k,
        })
    }

    pub fn from_real(a: f64, b: f64, c: f64, d: f64) -> Option<Self> {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn identity() -> Self {
        MoebiusMap { a: ONE, b: ZERO, c: ZERO, d: ONE }
    }

    /// Geodesic-flow element `a(t) = diag(e^t, e^-t)`, acting by `z -> e^{2t} z`.
    pub fn diagonal(t: f64) -> Self {
        MoebiusMap {
            a: Complex64::new(t.exp(), 0.0),
            b: ZERO,
            c: ZERO,
            d: Complex64::new((-t).exp(), 0.0),
        }
    }

    /// Unipotent `n_s = (1 s; 0 1)` for complex `s`.
    pub fn unipotent(s: Complex64) -> Self {
        MoebiusMap { a: ONE, b: s, c: ZERO, d: ONE }
    }

    /// Real horocycle element `n_s`, `s` real.
    pub fn horocyclic(s: f64) -> Self {
        Self::unipotent(Complex64::new(s, 0.0))
    }

    /// `v(s) = n_{is}`.
    pub fn vertical(s: f64) -> Self {
        Self::unipotent(Complex64::new(0.0, s))
    }

    /// The map sending `p, q, r` to `0, 1, infinity`.
    pub fn to_zero_one_inf(p: &SpherePoint, q: &SpherePoint, r: &SpherePoint) -> Result<Self> {
        let tol = 1e-12;
        if bracket(p, q).norm() < tol || bracket(q, r).norm() < tol || bracket(p, r).norm() < tol {
            return Err(Error::DegenerateTriple);
        }
        // z -> [z,p][q,r] / ([z,r][q,p]); [z,x] = z1 x2 - z2 x1.
        let (p1, p2) = p.coords();
        let (r1, r2) = r.coords();
        let qr = bracket(q, r);
        let qp = bracket(q, p);
        Self::new(p2 * qr, -p1 * qr, r2 * qp, -r1 * qp).ok_or(Error::DegenerateTriple)
    }

    pub fn entries(&self) -> [Complex64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> Complex64 {
        self.a + self.d
    }

    /// Inverse of a determinant-one matrix.
    pub fn inverse(&self) -> Self {
        MoebiusMap {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    pub fn compose(&self, rhs: &MoebiusMap) -> Self {
        let raw = MoebiusMap {
            a: self.a * rhs.a + self.b * rhs.c,
            b: self.a * rhs.b + self.b * rhs.d,
            c: self.c * rhs.a + self.d * rhs.c,
            d: self.c * rhs.b + self.d * rhs.d,
        };
        raw.renormalized()
    }

    fn renormalized(self) -> Self {
        let det = self.det();
        let scale = (self.a * self.d).norm() + (self.b * self.c).norm();
        if (det - ONE).norm() <= 8.0 * f64::EPSILON * scale {
            return self;
        }
        let k = det.sqrt().inv();
        MoebiusMap {
            a: self.a * k,
            b: self.b * k,
            c: self.c * k,
            d: self.d * k,
        }
    }

    pub fn apply(&self, p: &SpherePoint) -> SpherePoint {
        let (z1, z2) = p.coords();
        SpherePoint::from_raw(self.a * z1 + self.b * z2, self.c * z1 + self.d * z2)
    }

    pub fn apply_complex(&self, z: Complex64) -> SpherePoint {
        self.apply(&SpherePoint::finite(z))
    }

    /// Conjugate `self` by `g`: `g self g^-1`.
    pub fn conjugate_by(&self, g: &MoebiusMap) -> Self {
        g.compose(self).compose(&g.inverse())
    }

    /// True when every entry is real up to a common sign/phase ambiguity.
    pub fn is_real(&self, tol: f64) -> bool {
        let e = self.entries();
        e.iter().all(|z| z.im.abs() <= tol) || e.iter().all(|z| z.re.abs() <= tol)
    }

    /// Loxodromic (including hyperbolic) iff the trace is not in [-2, 2].
    pub fn is_loxodromic(&self, tol: f64) -> bool {
        let t = self.trace();
        !(t.im.abs() <= tol && t.re.abs() <= 2.0 + tol)
    }

    /// Attracting and repelling fixed points of a loxodromic element.
    pub fn fixed_points(&self) -> Option<(SpherePoint, SpherePoint)> {
        if !self.is_loxodromic(1e-12) {
            return None;
        }
        let tr = self.trace();
        let disc = (tr * tr - 4.0).sqrt();
        let mut l1 = (tr + disc) / 2.0;
        let mut l2 = (tr - disc) / 2.0;
        if l2.norm() > l1.norm() {
            std::mem::swap(&mut l1, &mut l2);
        }
        Some((self.eigenvector(l1), self.eigenvector(l2)))
    }

    fn eigenvector(&self, lambda: Complex64) -> SpherePoint {
        // Rows of (M - lambda) annihilate the eigenvector; use the better-conditioned one.
        let v1 = (self.b, lambda - self.a);
        let v2 = (lambda - self.d, self.c);
        let n1 = v1.0.norm_sqr() + v1.1.norm_sqr();
        let n2 = v2.0.norm_sqr() + v2.1.norm_sqr();
        if n1 >= n2 {
            SpherePoint::from_raw(v1.0, v1.1)
        } else {
            SpherePoint::from_raw(v2.0, v2.1)
        }
    }

    /// Distance between matrices modulo the sign ambiguity.
    pub fn distance(&self, other: &MoebiusMap) -> f64 {
        let d = |s: f64| {
            self.entries()
                .iter()
                .zip(other.entries().iter())
                .map(|(x, y)| (x - y * s).norm_sqr())
                .sum::<f64>()
                .sqrt()
        };
        d(1.0).min(d(-1.0))
    }
}

impl PartialEq for MoebiusMap {
    fn eq(&self, other: &Self) -> bool {
        self.distance(other) <= 1e-10
    }
}

impl Mul for MoebiusMap {
    type Output = MoebiusMap;

    fn mul(self, rhs: MoebiusMap) -> MoebiusMap {
        self.compose(&rhs)
    }
}

impl Serialize for MoebiusMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [
            self.a.re, self.a.im, self.b.re, self.b.im, self.c.re, self.c.im, self.d.re, self.d.im,
        ]
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MoebiusMap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = <[f64; 8]>::deserialize(d)?;
        let c = |i: usize| Complex64::new(v[2 * i], v[2 * i + 1]);
        let raw = MoebiusMap { a: c(0), b: c(1), c: c(2), d: c(3) };
        // Exact round-trip for already-normalized input.
        if (raw.det() - ONE).norm() <= 1e-12 {
            return Ok(raw);
        }
        MoebiusMap::new(c(0), c(1), c(2), c(3))
            .ok_or_else(|| serde::de::Error::custom("singular matrix"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_fixes_points() {
        let p = SpherePoint::finite(c(1.0, 1.0));
        assert_eq!(MoebiusMap::identity().apply(&p), p);
    }

    #[test]
    fn negative_reciprocal_sends_zero_to_infinity() {
        let m = MoebiusMap::from_real(0.0, 1.0, -1.0, 0.0).unwrap();
        assert_eq!(m.apply(&SpherePoint::zero()), SpherePoint::infinity());
    }

    #[test]
    fn diagonal_scales_by_exp_2t() {
        let m = MoebiusMap::diagonal(2f64.ln());
        assert!((m.a - c(2.0, 0.0)).norm() < 1e-15);
        let z = m.apply(&SpherePoint::real(1.0)).to_complex().unwrap();
        assert!((z - c(4.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn normalization_and_sign() {
        let m = MoebiusMap::new(c(2.0, 1.0), c(0.0, 3.0), c(1.0, -1.0), c(4.0, 0.0)).unwrap();
        assert!((m.det() - ONE).norm() < 1e-14);
        let neg = MoebiusMap { a: -m.a, b: -m.b, c: -m.c, d: -m.d };
        assert_eq!(m, neg);
    }

    #[test]
    fn singular_rejected() {
        assert!(MoebiusMap::from_real(1.0, 2.0, 2.0, 4.0).is_none());
    }

    #[test]
    fn fixed_points_of_dilation() {
        let (att, rep) = MoebiusMap::diagonal(0.5).fixed_points().unwrap();
        assert_eq!(att, SpherePoint::infinity());
        assert_eq!(rep, SpherePoint::zero());
        assert!(MoebiusMap::horocyclic(1.0).fixed_points().is_none());
    }

    #[test]
    fn three_point_normalization() {
        let p = SpherePoint::finite(c(1.0, 2.0));
        let q = SpherePoint::infinity();
        let r = SpherePoint::finite(c(-0.5, 0.0));
        let m = MoebiusMap::to_zero_one_inf(&p, &q, &r).unwrap();
        assert_eq!(m.apply(&p), SpherePoint::zero());
        assert_eq!(m.apply(&q), SpherePoint::real(1.0));
        assert_eq!(m.apply(&r), SpherePoint::infinity());
        assert_eq!(
            MoebiusMap::to_zero_one_inf(&p, &p, &r).unwrap_err(),
            Error::DegenerateTriple
        );
    }
}
