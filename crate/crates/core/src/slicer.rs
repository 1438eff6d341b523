//! Greedy bridge construction on a sliced circle.
//!
//! Given labeled gap arcs `U_i` on a circle `C`, a bridge of type `i` is an
//! open arc whose two endpoints are endpoints of arcs labeled `i`. Bridges are
//! chosen greedily by length with pairwise disjoint closures; what is left of
//! `C` approximates a Cantor set whose modulus is controlled by the family
//! modulus and [`crate::modulus::delta0`].

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::carpet::LabeledGapSystem;
use crate::error::{Error, Result};
use crate::geom::{ccw_distance, normalize_angle, MoebiusMap, OrientedCircle, SpherePoint};
use crate::modulus::{arc_ring_modulus_from_lengths, delta0};

/// Length of the first bridge after normalization.
pub const NORMALIZED_FIRST_LENGTH: f64 = 4.0 * PI / 3.0;

/// Which end of a gap arc an endpoint is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArcEnd {
    Start,
    End,
}

/// An endpoint of gap arc `arc` (index into the input system's arcs).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EndpointRef {
    pub arc: usize,
    pub end: ArcEnd,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bridge {
    /// Chart angles (normalized chart) of the open arc, counterclockwise.
    pub start: f64,
    pub end: f64,
    pub label: usize,
    /// 1-based position in the construction.
    pub generation: usize,
    pub from: EndpointRef,
    pub to: EndpointRef,
}

impl Bridge {
    pub fn length(&self) -> f64 {
        ccw_distance(self.start, self.end)
    }
}

/// A closed arc of the residual set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedArc {
    pub start: f64,
    pub length: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopReason {
    #[serde(rename = "length < eps")]
    LengthBelowEps,
    #[serde(rename = "count = N")]
    MaxBridges,
    #[serde(rename = "gaps exhausted")]
    GapsExhausted,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StopRule {
    pub eps: f64,
    pub max_bridges: usize,
}

impl Default for StopRule {
    fn default() -> Self {
        StopRule {
            eps: 1e-4,
            max_bridges: 500,
        }
    }
}

/// Output of [`extract_cantor`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CantorApprox {
    pub circle: OrientedCircle,
    /// Chart in which all angles below are measured.
    pub chart: MoebiusMap,
    /// Map of the unit circle taking the input chart's angles to `chart`'s.
    pub normalization: MoebiusMap,
    pub bridges: Vec<Bridge>,
    pub residual: Vec<ClosedArc>,
    /// Certified modulus `min(delta0, delta)` when the family modulus is known.
    #[serde(default, skip_serializing_if = "Option::is_none", with = "crate::serde_ext::option")]
    pub delta: Option<f64>,
    pub stop_reason: StopReason,
}

impl CantorApprox {
    pub fn point_at(&self, theta: f64) -> SpherePoint {
        crate::geom::point_at_with(&self.chart, theta)
    }
}

#[derive(Debug, Clone, Copy)]
struct Endpoint {
    angle: f64,
    label: usize,
    r: EndpointRef,
}

#[derive(Debug, Clone, Copy)]
struct Cand {
    start: Endpoint,
    end: Endpoint,
    len: f64,
}

/// Bridge lengths closer than this are ties, broken by the smaller start angle.
pub const LENGTH_TIE: f64 = 1e-10;

fn beats(c: &Cand, b: &Cand) -> bool {
    c.len > b.len + LENGTH_TIE || ((c.len - b.len).abs() <= LENGTH_TIE && c.start.angle < b.start.angle)
}

fn pick(best: Option<Cand>, c: Cand) -> Option<Cand> {
    match best {
        Some(b) if !beats(&c, &b) => Some(b),
        _ => Some(c),
    }
}

/// Circle automorphism fixing `m` and `m + pi`, stretching arcs about `m` by
/// `e^tau` in the half-angle tangent coordinate.
pub fn stabilizer_stretch(m: f64, tau: f64) -> MoebiusMap {
    let i = Complex64::i();
    let one = Complex64::new(1.0, 0.0);
    // Cayley z -> -i (z - 1) / (z + 1) takes e^{i theta} to tan(theta / 2).
    let cayley = MoebiusMap::new(-i, i, one, one).expect("invertible");
    let scale = MoebiusMap::diagonal(0.5 * tau);
    let rot = |a: f64| {
        MoebiusMap::new(
            Complex64::from_polar(1.0, 0.5 * a),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::from_polar(1.0, -0.5 * a),
        )
        .expect("rotation")
    };
    rot(m) * cayley.inverse() * scale * cayley * rot(-m)
}

fn map_angle(m: &MoebiusMap, theta: f64) -> f64 {
    let (w1, w2) = m.apply(&SpherePoint::finite(Complex64::from_polar(1.0, theta))).coords();
    normalize_angle((w1 * w2.conj()).arg())
}

/// Endpoints of `label` strictly inside the open arc `(from, from + len)`:
/// first and last in counterclockwise order, per label.
fn extreme_endpoints(
    eps: &[Endpoint],
    from: f64,
    len: f64,
    skip_label: Option<usize>,
) -> BTreeMap<usize, (Endpoint, f64, Endpoint, f64)> {
    let mut out: BTreeMap<usize, (Endpoint, f64, Endpoint, f64)> = BTreeMap::new();
    for e in eps {
        if Some(e.label) == skip_label {
            continue;
        }
        let d = ccw_distance(from, e.angle);
        if !(d > 0.0 && d < len) {
            continue;
        }
        out.entry(e.label)
            .and_modify(|v| {
                if d < v.1 {
                    v.0 = *e;
                    v.1 = d;
                }
                if d > v.3 {
                    v.2 = *e;
                    v.3 = d;
                }
            })
            .or_insert((*e, d, *e, d));
    }
    out
}

/// Longest bridge strictly inside the open arc `(from, from + len)`.
fn best_inside(eps: &[Endpoint], from: f64, len: f64, skip_label: Option<usize>) -> Option<Cand> {
    let mut best = None;
    for (_, (first, d0, last, d1)) in extreme_endpoints(eps, from, len, skip_label) {
        if d1 > d0 {
            best = pick(
                best,
                Cand {
                    start: first,
                    end: last,
                    len: ccw_distance(first.angle, last.angle),
                },
            );
        }
    }
    best
}

fn collect_endpoints(gaps: &LabeledGapSystem, m: Option<&MoebiusMap>) -> Vec<Endpoint> {
    let f = |t: f64| m.map_or(t, |m| map_angle(m, t));
    let mut v = Vec::with_capacity(2 * gaps.arcs.len());
    for (k, a) in gaps.arcs.iter().enumerate() {
        v.push(Endpoint {
            angle: f(a.start),
            label: a.label,
            r: EndpointRef { arc: k, end: ArcEnd::Start },
        });
        v.push(Endpoint {
            angle: f(a.end),
            label: a.label,
            r: EndpointRef { arc: k, end: ArcEnd::End },
        });
    }
    v
}

/// Runs the greedy bridge construction.
pub fn extract_cantor(gaps: &LabeledGapSystem, stop: &StopRule) -> Result<CantorApprox> {
    if let Some(l) = gaps.covering_label {
        return Err(Error::SingleTypeDominates(l));
    }
    if !(stop.eps >= 0.0) {
        return Err(Error::InvalidParams(format!("eps must be nonnegative, got {}", stop.eps)));
    }
    let delta = gaps.delta.map(|d| d.min(delta0()));
    let mut out = CantorApprox {
        circle: gaps.circle,
        chart: gaps.chart,
        normalization: MoebiusMap::identity(),
        bridges: Vec::new(),
        residual: vec![ClosedArc { start: 0.0, length: TAU }],
        delta,
        stop_reason: StopReason::GapsExhausted,
    };
    if gaps.arcs.is_empty() {
        return Ok(out);
    }

    // First bridge: the longest admitting a disjoint bridge of another type.
    let eps0 = collect_endpoints(gaps, None);
    let mut by_label: BTreeMap<usize, Vec<Endpoint>> = BTreeMap::new();
    for e in &eps0 {
        by_label.entry(e.label).or_default().push(*e);
    }
    let mut first: Option<Cand> = None;
    for (&label, pts) in &by_label {
        for a in pts {
            for b in pts {
                if a.r == b.r {
                    continue;
                }
                let len = ccw_distance(a.angle, b.angle);
                if first.is_some_and(|f| len < f.len - LENGTH_TIE) {
                    continue;
                }
                let comp = TAU - len;
                if best_inside(&eps0, b.angle, comp, Some(label)).is_some() {
                    first = pick(first, Cand { start: *a, end: *b, len });
                }
            }
        }
    }
    let first = first.ok_or(Error::NoBridge)?;

    // Normalize so that the first bridge fills more than half the circle.
    let (eps, first) = if first.len <= PI {
        let mid = normalize_angle(first.start.angle + 0.5 * first.len);
        let tau = ((NORMALIZED_FIRST_LENGTH / 4.0).tan() / (first.len / 4.0).tan()).ln();
        let m = stabilizer_stretch(mid, tau);
        out.normalization = m;
        out.chart = gaps.chart * m.inverse();
        let eps = collect_endpoints(gaps, Some(&m));
        let find = |r: EndpointRef| *eps.iter().find(|e| e.r == r).expect("endpoint");
        let (s, e) = (find(first.start.r), find(first.end.r));
        let f = Cand { start: s, end: e, len: ccw_distance(s.angle, e.angle) };
        (eps, f)
    } else {
        (eps0, first)
    };

    let limit = stop.max_bridges;
    let accept = |c: &Cand, count: usize| -> Option<StopReason> {
        if count >= limit {
            Some(StopReason::MaxBridges)
        } else if c.len < stop.eps {
            Some(StopReason::LengthBelowEps)
        } else {
            None
        }
    };
    if let Some(r) = accept(&first, 0) {
        out.stop_reason = r;
        return Ok(out);
    }

    // Second bridge: longest of another type disjoint from the first.
    let second = best_inside(&eps, first.end.angle, TAU - first.len, Some(first.start.label))
        .expect("first bridge admits a disjoint bridge");
    // Enlarge the first bridge inside the complement of the second.
    let first = {
        let span = ccw_distance(second.end.angle, second.start.angle);
        let ext = extreme_endpoints(&eps, second.end.angle, span, None);
        let (a, _, b, _) = ext[&first.start.label];
        Cand { start: a, end: b, len: ccw_distance(a.angle, b.angle) }
    };
    let mut chosen = vec![first];
    if let Some(r) = accept(&second, 1) {
        out.stop_reason = r;
    } else {
        chosen.push(second);
        out.stop_reason = StopReason::GapsExhausted;
        // Residual open arcs, each with its best bridge.
        let mut residual: Vec<(f64, f64, Option<Cand>)> = Vec::new();
        let add = |res: &mut Vec<(f64, f64, Option<Cand>)>, from: f64, to: f64| {
            let len = ccw_distance(from, to);
            res.push((from, len, best_inside(&eps, from, len, None)));
        };
        add(&mut residual, first.end.angle, second.start.angle);
        add(&mut residual, second.end.angle, first.start.angle);
        loop {
            let mut best: Option<(usize, Cand)> = None;
            for (k, r) in residual.iter().enumerate() {
                if let Some(c) = r.2 {
                    let better = match best {
                        None => true,
                        Some((_, b)) => beats(&c, &b),
                    };
                    if better {
                        best = Some((k, c));
                    }
                }
            }
            let Some((k, c)) = best else {
                out.stop_reason = StopReason::GapsExhausted;
                break;
            };
            if let Some(reason) = accept(&c, chosen.len()) {
                out.stop_reason = reason;
                break;
            }
            let (from, len, _) = residual.swap_remove(k);
            let to = normalize_angle(from + len);
            add(&mut residual, from, c.start.angle);
            add(&mut residual, c.end.angle, to);
            chosen.push(c);
        }
    }

    out.bridges = chosen
        .iter()
        .enumerate()
        .map(|(k, c)| Bridge {
            start: c.start.angle,
            end: c.end.angle,
            label: c.start.label,
            generation: k + 1,
            from: c.start.r,
            to: c.end.r,
        })
        .collect();
    out.residual = residual_of(&out.bridges);
    Ok(out)
}

fn residual_of(bridges: &[Bridge]) -> Vec<ClosedArc> {
    if bridges.is_empty() {
        return vec![ClosedArc { start: 0.0, length: TAU }];
    }
    let mut b: Vec<&Bridge> = bridges.iter().collect();
    b.sort_by(|x, y| x.start.total_cmp(&y.start));
    let n = b.len();
    (0..n)
        .map(|k| {
            let from = b[k].end;
            let to = b[(k + 1) % n].start;
            ClosedArc {
                start: from,
                length: ccw_distance(from, to),
            }
        })
        .collect()
}

/// Lengths `(|I_i|, |A|, |I_j|, |A'|)` for two disjoint bridges, in cyclic order.
pub fn pair_lengths(a: &Bridge, b: &Bridge) -> [f64; 4] {
    [
        a.length(),
        ccw_distance(a.end, b.start),
        b.length(),
        ccw_distance(b.end, a.start),
    ]
}

/// Modulus of `S^2` minus the closures of two bridges.
pub fn pair_modulus(a: &Bridge, b: &Bridge) -> f64 {
    arc_ring_modulus_from_lengths(pair_lengths(a, b))
}

/// Ratio `t = min(|A|, |A'|) / min(|I_i|, |I_j|)` for a pair of bridges.
pub fn pair_ratio(a: &Bridge, b: &Bridge) -> f64 {
    let [i1, a1, i2, a2] = pair_lengths(a, b);
    a1.min(a2) / i1.min(i2)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairStat {
    pub i: usize,
    pub j: usize,
    pub modulus: f64,
}

/// Result of [`verify_cantor_modulus`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub min_modulus: f64,
    pub pair: (usize, usize),
    #[serde(default, skip_serializing_if = "Option::is_none", with = "crate::serde_ext::option")]
    pub claimed_delta: Option<f64>,
    /// `min_modulus >= claimed_delta`; absent when nothing was claimed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pass: Option<bool>,
    pub pairs_checked: u64,
    pub exhaustive: bool,
    /// Smallest length ratio among same-type pairs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub same_type_min_ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub same_type_min_modulus: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub different_type_min_modulus: Option<f64>,
}

#[derive(Default, Clone, Copy)]
struct Acc {
    min: Option<(f64, usize, usize)>,
    same_ratio: Option<f64>,
    same_mod: Option<f64>,
    diff_mod: Option<f64>,
    count: u64,
}

fn omin(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) | (None, x) => x,
    }
}

impl Acc {
    fn merge(self, o: Acc) -> Acc {
        let min = match (self.min, o.min) {
            (Some(a), Some(b)) => {
                if (a.0, a.1, a.2) <= (b.0, b.1, b.2) {
                    Some(a)
                } else {
                    Some(b)
                }
            }
            (x, None) | (None, x) => x,
        };
        Acc {
            min,
            same_ratio: omin(self.same_ratio, o.same_ratio),
            same_mod: omin(self.same_mod, o.same_mod),
            diff_mod: omin(self.diff_mod, o.diff_mod),
            count: self.count + o.count,
        }
    }
}

/// Minimum pairwise modulus over pairs of bridges.
///
/// Exhaustive when the pair count is within `pair_budget`; otherwise the
/// largest bridges are paired exhaustively and every bridge is paired with its
/// nearest neighbours on the circle.
pub fn verify_cantor_modulus(ca: &CantorApprox, pair_budget: usize) -> Result<Report> {
    let b = &ca.bridges;
    let n = b.len();
    if n < 2 {
        return Err(Error::TooFewBridges(n));
    }
    let total = (n as u64) * (n as u64 - 1) / 2;
    let exhaustive = total <= pair_budget as u64;
    let pairs: Vec<(usize, usize)> = if exhaustive {
        (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect()
    } else {
        let top = ((2.0 * pair_budget as f64).sqrt() as usize / 2).clamp(2, n);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&x, &y| b[x].start.total_cmp(&b[y].start));
        let mut v: Vec<(usize, usize)> = (0..top).flat_map(|i| ((i + 1)..top).map(move |j| (i, j))).collect();
        for p in 0..n {
            for off in 1..=4usize.min(n - 1) {
                let q = (p + off) % n;
                let (i, j) = (order[p].min(order[q]), order[p].max(order[q]));
                v.push((i, j));
            }
        }
        v.sort_unstable();
        v.dedup();
        v
    };
    let acc = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (x, y) = (&b[i], &b[j]);
            let m = pair_modulus(x, y);
            let mut a = Acc {
                min: Some((m, i, j)),
                count: 1,
                ..Acc::default()
            };
            if b[i].label == b[j].label {
                a.same_ratio = Some(pair_ratio(x, y));
                a.same_mod = Some(m);
            } else {
                a.diff_mod = Some(m);
            }
            a
        })
        .reduce(Acc::default, Acc::merge);
    let (m, i, j) = acc.min.expect("at least one pair");
    Ok(Report {
        min_modulus: m,
        pair: (i, j),
        claimed_delta: ca.delta,
        pass: ca.delta.map(|d| m >= d),
        pairs_checked: acc.count,
        exhaustive,
        same_type_min_ratio: acc.same_ratio,
        same_type_min_modulus: acc.same_mod,
        different_type_min_modulus: acc.diff_mod,
    })
}
