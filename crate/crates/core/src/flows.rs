//! Frames of hyperbolic 3-space as Moebius maps, with the geodesic and horocycle
//! flows acting on the right.
//!
//! A frame `g` is the image of the base frame at height 1 above the origin,
//! pointing up. Its geodesic runs from the backward endpoint `g(0)` to the
//! forward endpoint `g(inf)`; the horocycle flow moves the backward endpoint
//! along `s -> g(s)` and fixes the forward one.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::carpet::{slice_circle, DiskFamily};
use crate::error::{Error, Result};
use crate::geom::ccw_distance;
use crate::kleinian::LimitSetApprox;
use crate::slicer::{extract_cantor, CantorApprox, StopRule};
use crate::thickness::{thickness_report, ThickSetApprox, ThicknessFailure};
use crate::{MoebiusMap, OrientedCircle, SpherePoint};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub g: MoebiusMap,
}

impl Frame {
    pub fn new(g: MoebiusMap) -> Self {
        Frame { g }
    }

    pub fn base() -> Self {
        Frame { g: MoebiusMap::identity() }
    }

    pub fn backward(&self) -> SpherePoint {
        self.g.apply(&SpherePoint::zero())
    }

    pub fn forward(&self) -> SpherePoint {
        self.g.apply(&SpherePoint::infinity())
    }

    /// Base point `(z, h)` in the upper half-space model.
    pub fn base_point(&self) -> (Complex64, f64) {
        let [a, b, c, d] = self.g.entries();
        let n = c.norm_sqr() + d.norm_sqr();
        ((a * c.conj() + b * d.conj()) / n, 1.0 / n)
    }

    /// Circle `g(R^)` swept by the backward endpoint under the horocycle flow.
    pub fn horocycle_circle(&self) -> OrientedCircle {
        OrientedCircle::real_line().mapped(&self.g)
    }

    /// Left translate `h g`.
    pub fn left(&self, h: &MoebiusMap) -> Frame {
        Frame { g: h.compose(&self.g) }
    }
}

/// `x a(t)`.
pub fn geodesic_flow(x: &Frame, t: f64) -> Frame {
    Frame { g: x.g.compose(&MoebiusMap::diagonal(t)) }
}

/// `x n_s`.
pub fn horocycle_flow(x: &Frame, s: f64) -> Frame {
    Frame { g: x.g.compose(&MoebiusMap::horocyclic(s)) }
}

/// Both geodesic endpoints within `eps` of the cloud.
pub fn in_rf(x: &Frame, lam: &LimitSetApprox, eps: f64) -> bool {
    lam.distance_to(&x.backward()) <= eps && lam.distance_to(&x.forward()) <= eps
}

/// Horocycle times `s` in `[-window, window]` with `g(s)` within `eps` of the cloud.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReturnTimeSet {
    pub window: f64,
    /// Sorted, disjoint closed intervals, each fattened by `resolution / 2`.
    pub intervals: Vec<(f64, f64)>,
    pub resolution: f64,
    pub eps: f64,
    /// False when the forward endpoint is away from the cloud; the set is then empty.
    pub forward_in_cloud: bool,
}

impl ReturnTimeSet {
    pub fn thick_set(&self) -> Result<ThickSetApprox> {
        ThickSetApprox::new(self.intervals.clone(), self.window, self.resolution)
    }

    pub fn contains(&self, s: f64) -> bool {
        let i = self.intervals.partition_point(|iv| iv.1 < s);
        i < self.intervals.len() && self.intervals[i].0 <= s
    }
}

/// Solutions of `a s^2 + b s + c <= 0` inside `[-w, w]`.
fn quadratic_sublevel(a: f64, b: f64, c: f64, w: f64, out: &mut Vec<(f64, f64)>) {
    let mut push = |lo: f64, hi: f64| {
        let (lo, hi) = (lo.max(-w), hi.min(w));
        if lo <= hi {
            out.push((lo, hi));
        }
    };
    let scale = a.abs().max(b.abs()).max(c.abs());
    if scale == 0.0 {
        push(-w, w);
        return;
    }
    if a.abs() <= 1e-14 * scale {
        if b == 0.0 {
            if c <= 0.0 {
                push(-w, w);
            }
        } else if b > 0.0 {
            push(f64::NEG_INFINITY, -c / b);
        } else {
            push(-c / b, f64::INFINITY);
        }
        return;
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        if a < 0.0 {
            push(-w, w);
        }
        return;
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    let (r1, r2) = if q == 0.0 { (0.0, 0.0) } else { (q / a, c / q) };
    let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
    if a > 0.0 {
        push(lo, hi);
    } else {
        push(f64::NEG_INFINITY, lo);
        push(hi, f64::INFINITY);
    }
}

/// Times `s` with `chordal(g(s), p) <= eps`: the pull-back of a spherical cap.
fn cap_times(g: &MoebiusMap, p: &SpherePoint, eps: f64, w: f64, out: &mut Vec<(f64, f64)>) {
    let [a, b, c, d] = g.entries();
    let (p1, p2) = p.coords();
    let pn = p1.norm_sqr() + p2.norm_sqr();
    // [g(s), p] = alpha s + beta, |g(s)|^2 = |a s + b|^2 + |c s + d|^2.
    let alpha = a * p2 - c * p1;
    let beta = b * p2 - d * p1;
    let e = eps * eps * pn;
    let qa = 4.0 * alpha.norm_sqr() - e * (a.norm_sqr() + c.norm_sqr());
    let qb = 2.0 * (4.0 * (alpha * beta.conj()).re - e * (a * b.conj() + c * d.conj()).re);
    let qc = 4.0 * beta.norm_sqr() - e * (b.norm_sqr() + d.norm_sqr());
    quadratic_sublevel(qa, qb, qc, w, out);
}

fn merge_sorted(mut iv: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    iv.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(iv.len());
    for (a, b) in iv {
        match out.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("{name} must be positive, got {v}")))
    }
}

/// Return times of the horocycle through `x` to the `eps`-neighbourhood of the cloud.
pub fn return_times(x: &Frame, lam: &LimitSetApprox, window: f64, eta: f64, eps: f64) -> Result<ReturnTimeSet> {
    check_positive("window", window)?;
    check_positive("eta", eta)?;
    check_positive("eps", eps)?;
    let mut out = ReturnTimeSet { window, intervals: vec![], resolution: eta, eps, forward_in_cloud: false };
    if lam.distance_to(&x.forward()) > eps {
        return Ok(out);
    }
    out.forward_in_cloud = true;
    let exact: Vec<(f64, f64)> = lam
        .points
        .par_iter()
        .fold(Vec::new, |mut acc, p| {
            cap_times(&x.g, p, eps, window, &mut acc);
            acc
        })
        .reduce(Vec::new, |mut a, mut b| {
            a.append(&mut b);
            a
        });
    let h = 0.5 * eta;
    out.intervals = merge_sorted(exact.into_iter().map(|(a, b)| ((a - h).max(-window), (b + h).min(window))).collect());
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RfkParams {
    pub window: f64,
    pub eta: f64,
    pub eps: f64,
    pub stop: StopRule,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateOutcome {
    /// `return-times` or `cantor-residual`.
    pub name: String,
    pub contains_zero: bool,
    pub pass: bool,
    pub intervals: usize,
    pub witness: Option<ThicknessFailure>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub pass: bool,
    pub k: f64,
    /// Name of the first passing candidate.
    pub certified_by: Option<String>,
    pub candidates: Vec<CandidateOutcome>,
    pub return_times: ReturnTimeSet,
    /// The passing set `K`, with `0 in K` inside the return times.
    pub certified_set: Option<ThickSetApprox>,
}

/// Residual arcs of `ca` pulled back to the line by `g`, fattened by `h` and
/// clipped to `[-w, w]`.
fn residual_on_line(ca: &CantorApprox, g: &MoebiusMap, w: f64, h: f64) -> Vec<(f64, f64)> {
    let ginv = g.inverse();
    let s_at = |theta: f64| {
        let (z1, z2) = ginv.apply(&ca.point_at(theta)).coords();
        (z1 / z2).re
    };
    let (w1, w2) = ca.chart.inverse().apply(&g.apply(&SpherePoint::infinity())).coords();
    let theta_inf = crate::geom::normalize_angle((w1 * w2.conj()).arg());
    let mut out = Vec::new();
    for r in &ca.residual {
        let (s0, s1) = (s_at(r.start), s_at(r.start + r.length));
        let (lo, hi) = if s0 <= s1 { (s0, s1) } else { (s1, s0) };
        let through_inf = ccw_distance(r.start, theta_inf) <= r.length;
        let parts = if through_inf {
            vec![(f64::NEG_INFINITY, lo), (hi, f64::INFINITY)]
        } else {
            vec![(lo, hi)]
        };
        for (a, b) in parts {
            let (a, b) = ((a - h).max(-w), (b + h).min(w));
            if a <= b {
                out.push((a, b));
            }
        }
    }
    merge_sorted(out)
}

fn intersect(a: &[(f64, f64)], b: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        let lo = a[i].0.max(b[j].0);
        let hi = a[i].1.min(b[j].1);
        if lo <= hi {
            out.push((lo, hi));
        }
        if a[i].1 < b[j].1 {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}

fn evaluate(name: &str, t: ThickSetApprox, k: f64) -> Result<(CandidateOutcome, ThickSetApprox)> {
    let contains_zero = t.contains(0.0);
    let (pass, witness) = if contains_zero {
        let rep = thickness_report(&t, k, true)?;
        (rep.pass, rep.witness_failures.first().copied())
    } else {
        (false, None)
    };
    let outcome = CandidateOutcome { name: name.into(), contains_zero, pass, intervals: t.intervals.len(), witness };
    Ok((outcome, t))
}

/// Looks for a globally `k`-thick `K` with `0 in K` inside the return times of `x`.
///
/// Candidates are the return times themselves and, when a carpet is given, the
/// Cantor residual of its slice along the horocycle circle, intersected with
/// the return times. A failure means no certificate was found at this resolution.
pub fn rfk_certificate(
    x: &Frame,
    lam: &LimitSetApprox,
    k: f64,
    params: &RfkParams,
    carpet: Option<&DiskFamily>,
) -> Result<CertificateReport> {
    if !(k > 1.0) {
        return Err(Error::BadK(k));
    }
    if !in_rf(x, lam, params.eps) {
        return Err(Error::NotInRF);
    }
    let rt = return_times(x, lam, params.window, params.eta, params.eps)?;
    let mut candidates = Vec::new();
    let mut sets = vec![];
    let (o, t) = evaluate("return-times", rt.thick_set()?, k)?;
    candidates.push(o);
    sets.push(t);
    if let Some(f) = carpet {
        let gaps = slice_circle(f, &x.horocycle_circle());
        match extract_cantor(&gaps, &params.stop) {
            Ok(ca) => {
                let iv = intersect(&residual_on_line(&ca, &x.g, params.window, 0.5 * params.eta), &rt.intervals);
                let (o, t) = evaluate("cantor-residual", ThickSetApprox::new(iv, params.window, params.eta)?, k)?;
                candidates.push(o);
                sets.push(t);
            }
            Err(e) if e.is_validation() => {}
            Err(e) => return Err(e),
        }
    }
    let best = candidates.iter().position(|c| c.pass);
    Ok(CertificateReport {
        pass: best.is_some(),
        k,
        certified_by: best.map(|i| candidates[i].name.clone()),
        certified_set: best.map(|i| sets[i].clone()),
        candidates,
        return_times: rt,
    })
}
