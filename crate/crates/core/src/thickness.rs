//! k-thickness of closed subsets of the line.
//!
//! A closed `T` is k-thick when for every scale `y > 0` some `t` in `T` has
//! `y <= |t| <= k y`, and globally k-thick when every translate `T - x` with
//! `x` in `T` is k-thick. Sets are known only on a window `[-W, W]`, so a
//! translate by `x` is checked on scales `[eta, (W - |x|) / k]`.
//!
//! Both checks are exact for the finite union of intervals: failures are found
//! by sweeping gaps rather than by sampling scales or translates.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::modulus::two_arc_mu;
use crate::slicer::CantorApprox;
use crate::{Error, Result};

/// Relative margin added to [`k_from_modulus`] to absorb rounding in mapped data.
pub const K_SAFETY: f64 = 1e-6;

/// Cap on the number of witnesses kept in a [`ThicknessReport`].
pub const MAX_WITNESSES: usize = 32;

/// Finite union of closed intervals on the window `[-window, window]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ThickSetRepr")]
pub struct ThickSetApprox {
    /// Sorted, pairwise disjoint closed intervals.
    pub intervals: Vec<(f64, f64)>,
    pub window: f64,
    /// Smallest scale that is checked.
    pub resolution: f64,
}

#[derive(Deserialize)]
struct ThickSetRepr {
    intervals: Vec<(f64, f64)>,
    window: f64,
    resolution: f64,
}

impl TryFrom<ThickSetRepr> for ThickSetApprox {
    type Error = Error;

    fn try_from(r: ThickSetRepr) -> Result<Self> {
        ThickSetApprox::new(r.intervals, r.window, r.resolution)
    }
}

impl ThickSetApprox {
    /// Sorts and merges overlapping intervals. Every interval must lie in the window.
    pub fn new(intervals: Vec<(f64, f64)>, window: f64, resolution: f64) -> Result<Self> {
        if !(window.is_finite() && window > 0.0) {
            return Err(Error::InvalidParams(format!("window must be positive, got {window}")));
        }
        if !(resolution.is_finite() && resolution > 0.0) {
            return Err(Error::InvalidParams(format!("resolution must be positive, got {resolution}")));
        }
        for &(a, b) in &intervals {
            if !(a.is_finite() && b.is_finite() && a <= b) {
                return Err(Error::InvalidParams(format!("bad interval [{a}, {b}]")));
            }
            if a < -window || b > window {
                return Err(Error::InvalidParams(format!("interval [{a}, {b}] leaves the window")));
            }
        }
        Ok(ThickSetApprox { intervals: merge(intervals), window, resolution })
    }

    /// Like [`ThickSetApprox::new`] but clips the intervals to the window first.
    pub fn clipped(intervals: Vec<(f64, f64)>, window: f64, resolution: f64) -> Result<Self> {
        let w = window.abs();
        let kept = intervals
            .into_iter()
            .filter_map(|(a, b)| {
                let (a, b) = (a.max(-w), b.min(w));
                (a <= b).then_some((a, b))
            })
            .collect();
        Self::new(kept, window, resolution)
    }

    /// `T - x` on the largest window where it is known, `W - |x|`.
    pub fn translated(&self, x: f64) -> Result<Self> {
        let w = self.window - x.abs();
        let shifted = self.intervals.iter().map(|&(a, b)| (a - x, b - x)).collect();
        Self::clipped(shifted, w, self.resolution)
    }

    /// `lambda T` on the window `|lambda| W` at resolution `|lambda| eta`.
    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        let iv = self
            .intervals
            .iter()
            .map(|&(a, b)| if lambda >= 0.0 { (lambda * a, lambda * b) } else { (lambda * b, lambda * a) })
            .collect();
        Self::new(iv, lambda.abs() * self.window, lambda.abs() * self.resolution)
    }

    pub fn contains(&self, x: f64) -> bool {
        let i = self.intervals.partition_point(|iv| iv.1 < x);
        i < self.intervals.len() && self.intervals[i].0 <= x
    }

    /// Open gaps of the window not covered by the set, including the two edge gaps.
    pub fn gaps(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(self.intervals.len() + 1);
        let mut cur = -self.window;
        for &(a, b) in &self.intervals {
            if a > cur {
                out.push((cur, a));
            }
            cur = b;
        }
        if cur < self.window {
            out.push((cur, self.window));
        }
        out
    }
}

fn merge(mut iv: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    iv.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(iv.len());
    for (a, b) in iv {
        match out.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

/// A translate `x` and scale `y` such that no point of `T - x` has modulus in `[y, k y]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThicknessFailure {
    pub translate: f64,
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThicknessReport {
    pub pass: bool,
    pub k: f64,
    pub global: bool,
    pub window: f64,
    pub resolution: f64,
    /// At most [`MAX_WITNESSES`] failures, ordered by translate.
    pub witness_failures: Vec<ThicknessFailure>,
}

fn check_k(k: f64) -> Result<()> {
    if k > 1.0 {
        Ok(())
    } else {
        Err(Error::BadK(k))
    }
}

/// Failing scale ranges `(lo, hi)` of the set `|T|` on `[eta, ymax]`.
fn scale_failures(t: &ThickSetApprox, k: f64) -> Vec<(f64, f64)> {
    let mut mags: Vec<(f64, f64)> = t
        .intervals
        .iter()
        .map(|&(a, b)| {
            if a >= 0.0 {
                (a, b)
            } else if b <= 0.0 {
                (-b, -a)
            } else {
                (0.0, b.max(-a))
            }
        })
        .collect();
    mags.sort_by(|x, y| x.0.total_cmp(&y.0));
    let ymax = t.window / k;
    let mut out = Vec::new();
    let mut push = |p: f64, q: f64| {
        let lo = p.max(t.resolution);
        let hi = (q / k).min(ymax);
        if lo < hi {
            out.push((lo, hi));
        }
    };
    let mut cur = 0.0f64;
    for &(a, b) in &mags {
        if a > cur {
            push(cur, a);
        }
        cur = cur.max(b);
    }
    push(cur, f64::INFINITY);
    out
}

/// Exact k-thickness of `T` on the scales `[eta, W/k]`.
pub fn is_k_thick(t: &ThickSetApprox, k: f64) -> Result<bool> {
    check_k(k)?;
    Ok(scale_failures(t, k).is_empty())
}

/// Half-line constraint `c x + d < 0` (or `<= 0` when not strict).
#[derive(Clone, Copy)]
struct XRange {
    lo: f64,
    lo_open: bool,
    hi: f64,
    hi_open: bool,
}

impl XRange {
    fn closed(lo: f64, hi: f64) -> Self {
        XRange { lo, lo_open: false, hi, hi_open: false }
    }

    fn is_empty(&self) -> bool {
        self.lo > self.hi || (self.lo == self.hi && (self.lo_open || self.hi_open))
    }

    fn constrain(&mut self, c: f64, d: f64, strict: bool) {
        if c == 0.0 {
            if d > 0.0 || (strict && d == 0.0) {
                self.lo = f64::INFINITY;
            }
            return;
        }
        let r = -d / c;
        if c > 0.0 {
            if r < self.hi || (r == self.hi && strict) {
                self.hi = r;
                self.hi_open = strict;
            }
        } else if r > self.lo || (r == self.lo && strict) {
            self.lo = r;
            self.lo_open = strict;
        }
    }

    fn intersect(&self, other: &XRange) -> XRange {
        let mut r = *self;
        if other.lo > r.lo || (other.lo == r.lo && other.lo_open) {
            r.lo = other.lo;
            r.lo_open = other.lo_open;
        }
        if other.hi < r.hi || (other.hi == r.hi && other.hi_open) {
            r.hi = other.hi;
            r.hi_open = other.hi_open;
        }
        r
    }
}

/// Linear function `a x + b`.
type Lin = (f64, f64);

/// Translates in `T` between the gaps `left` and `right` that fail at some
/// scale, with a witness when nonempty.
fn gap_pair_failure(
    t: &ThickSetApprox,
    k: f64,
    left: (f64, f64),
    right: (f64, f64),
) -> Option<ThicknessFailure> {
    let (l1, l2) = left;
    let (r1, r2) = right;
    let w = t.window;
    // Lower bounds on y (the last is eta) and upper bounds on y.
    let lowers: [Lin; 3] = [(-1.0, r1), (1.0, -l2), (0.0, t.resolution)];
    for sign in [-1.0f64, 1.0] {
        let uppers: [Lin; 3] = [(-1.0 / k, r2 / k), (1.0 / k, -l1 / k), (-sign / k, w / k)];
        let half = if sign > 0.0 { XRange::closed(0.0, w) } else { XRange::closed(-w, 0.0) };
        let mut p = XRange::closed(l2, r1).intersect(&half);
        for (i, lo) in lowers.iter().enumerate() {
            for (j, up) in uppers.iter().enumerate() {
                let strict = !(i == 2 && j == 2);
                p.constrain(lo.0 - up.0, lo.1 - up.1, strict);
            }
        }
        if p.is_empty() {
            continue;
        }
        let ivs = &t.intervals;
        let mut i = ivs.partition_point(|iv| iv.1 < p.lo);
        while i < ivs.len() && ivs[i].0 <= p.hi {
            let q = p.intersect(&XRange::closed(ivs[i].0, ivs[i].1));
            if !q.is_empty() {
                let x = 0.5 * (q.lo + q.hi);
                let eval = |f: &Lin| f.0 * x + f.1;
                let ylo = lowers.iter().map(eval).fold(f64::NEG_INFINITY, f64::max);
                let yhi = uppers.iter().map(eval).fold(f64::INFINITY, f64::min);
                return Some(ThicknessFailure { translate: x, scale: 0.5 * (ylo + yhi) });
            }
            i += 1;
        }
    }
    None
}

fn global_failures(t: &ThickSetApprox, k: f64) -> Vec<ThicknessFailure> {
    let gaps = t.gaps();
    let mut out: Vec<ThicknessFailure> = (0..gaps.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let gaps = &gaps;
            ((i + 1)..gaps.len()).filter_map(move |j| gap_pair_failure(t, k, gaps[i], gaps[j]))
        })
        .collect();
    out.sort_by(|a, b| a.translate.total_cmp(&b.translate).then(a.scale.total_cmp(&b.scale)));
    out
}

/// Exact global k-thickness: every `x` in `T` is checked, not only a grid.
pub fn is_globally_k_thick(t: &ThickSetApprox, k: f64) -> Result<bool> {
    check_k(k)?;
    Ok(global_failures(t, k).is_empty())
}

/// Plain or global thickness check with failure witnesses.
pub fn thickness_report(t: &ThickSetApprox, k: f64, global: bool) -> Result<ThicknessReport> {
    check_k(k)?;
    let mut witness_failures: Vec<ThicknessFailure> = if global {
        global_failures(t, k)
    } else {
        scale_failures(t, k)
            .into_iter()
            .map(|(lo, hi)| ThicknessFailure { translate: 0.0, scale: 0.5 * (lo + hi) })
            .collect()
    };
    let pass = witness_failures.is_empty();
    witness_failures.truncate(MAX_WITNESSES);
    Ok(ThicknessReport {
        pass,
        k,
        global,
        window: t.window,
        resolution: t.resolution,
        witness_failures,
    })
}

/// Thickness constant for Cantor sets of modulus at least `delta` through infinity.
///
/// A scale `y` failing at `x` puts `[x - k y, x - y]` and `[x + y, x + k y]` in two
/// gaps whose length ratio is at most `2 / (k - 1)`. The upper cross-ratio bound
/// forces that ratio to be at least `u = sqrt(1 + mu) - 1` with `mu` the inverse
/// of the two-arc modulus at `delta`, so `k = 1 + 2/u` cannot fail.
pub fn k_from_modulus(delta: f64) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::NonpositiveDelta(delta));
    }
    let mu = two_arc_mu(delta);
    let u = mu / ((1.0 + mu).sqrt() + 1.0);
    Ok((1.0 + 2.0 / u) * (1.0 + K_SAFETY))
}

/// Sends a point of the residual set to infinity and returns `K` minus that
/// point as a subset of the line, with bridges as its gaps.
///
/// The point at infinity is the midpoint of the longest residual arc. The
/// window is twice the largest bridge endpoint; the default resolution is a
/// quarter of the shortest interval.
pub fn cantor_line_set(ca: &CantorApprox, resolution: Option<f64>) -> Result<ThickSetApprox> {
    let inf = ca
        .residual
        .iter()
        .fold(None::<&crate::slicer::ClosedArc>, |best, r| match best {
            Some(b) if b.length >= r.length => Some(b),
            _ => Some(r),
        })
        .map(|r| r.start + 0.5 * r.length)
        .ok_or_else(|| Error::InvalidParams("Cantor approximation has no residual arcs".into()))?;
    if ca.bridges.is_empty() {
        return Err(Error::TooFewBridges(0));
    }
    let line = |phi: f64| -1.0 / (0.5 * phi).tan();
    let mut gaps: Vec<(f64, f64)> = ca
        .bridges
        .iter()
        .map(|b| {
            let phi = (b.start - inf).rem_euclid(std::f64::consts::TAU);
            (line(phi), line(phi + b.length()))
        })
        .collect();
    gaps.sort_by(|a, b| a.0.total_cmp(&b.0));
    let r = gaps.iter().map(|g| g.0.abs().max(g.1.abs())).fold(0.0, f64::max);
    let w = 2.0 * r;
    let mut intervals = Vec::with_capacity(gaps.len() + 1);
    let mut cur = -w;
    for &(a, b) in &gaps {
        intervals.push((cur, a));
        cur = b;
    }
    intervals.push((cur, w));
    let eta = resolution.unwrap_or_else(|| {
        0.25 * intervals.iter().map(|iv| iv.1 - iv.0).filter(|l| *l > 0.0).fold(f64::INFINITY, f64::min)
    });
    ThickSetApprox::new(intervals, w, if eta.is_finite() { eta } else { w * 1e-12 })
}
