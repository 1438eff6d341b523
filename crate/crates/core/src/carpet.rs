//! Finite round-disk approximations of Sierpinski curves, and their traces on
//! a slicing circle.
//!
//! A [`DiskFamily`] is a list of open round disks with pairwise disjoint
//! closures. Its modulus is the least ring modulus over all pairs, which for
//! round disks is `arccosh(I) / 2pi` with `I` the inversive distance.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::{PI, TAU};
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{ccw_distance, normalize_angle, Disk, MoebiusMap, OrientedCircle, Side, SpherePoint};

/// Pair count above which [`family_modulus`] switches to the pruned scan.
pub const DEFAULT_PAIR_BUDGET: usize = 2_000_000;

/// Refinement factor between consecutive levels of the grid construction.
pub const GRID_REFINEMENT: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CarpetStyle {
    Grid,
    Nested,
}

impl FromStr for CarpetStyle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "grid" => Ok(CarpetStyle::Grid),
            "nested" => Ok(CarpetStyle::Nested),
            other => Err(Error::InvalidParams(format!("unknown carpet style {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct FamilyMeta {
    #[serde(default)]
    pub construction: String,
    #[serde(default)]
    pub depth: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap: Option<f64>,
    /// Construction level of each disk, parallel to `disks`.
    #[serde(default)]
    pub levels: Vec<u32>,
    /// Lower bound on the pairwise modulus guaranteed by the construction.
    #[serde(default, skip_serializing_if = "Option::is_none", with = "crate::serde_ext::option")]
    pub design_delta: Option<f64>,
}

/// Finitely many open round disks with pairwise disjoint closures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiskFamily {
    pub disks: Vec<Disk>,
    #[serde(default)]
    pub meta: FamilyMeta,
    /// Least pairwise ring modulus; `inf` when there are fewer than two disks.
    #[serde(default, with = "crate::serde_ext::option")]
    pub delta: Option<f64>,
}

impl DiskFamily {
    pub fn new(disks: Vec<Disk>) -> Self {
        DiskFamily {
            disks,
            meta: FamilyMeta::default(),
            delta: None,
        }
    }

    pub fn len(&self) -> usize {
        self.disks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.disks.is_empty()
    }

    pub fn mapped(&self, m: &MoebiusMap) -> DiskFamily {
        DiskFamily {
            disks: self.disks.iter().map(|d| d.mapped(m)).collect(),
            meta: self.meta.clone(),
            delta: self.delta,
        }
    }

    /// Checks pairwise disjoint closures; returns the offending pair otherwise.
    pub fn validate(&self) -> Result<()> {
        let report = family_modulus_report(self, DEFAULT_PAIR_BUDGET);
        match report {
            Ok(r) if r.inversive_distance <= 1.0 => Err(Error::DisksNotDisjoint(r.inversive_distance)),
            _ => Ok(()),
        }
    }

    /// Largest chordal diameter among the disks of each construction level.
    pub fn max_diameter_by_level(&self) -> BTreeMap<u32, f64> {
        let mut out = BTreeMap::new();
        for (d, &lvl) in self.disks.iter().zip(self.meta.levels.iter()) {
            let e = out.entry(lvl).or_insert(0.0f64);
            *e = e.max(d.chordal_diameter());
        }
        out
    }
}

/// Result of a pairwise modulus scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyModulusReport {
    #[serde(with = "crate::serde_ext")]
    pub modulus: f64,
    #[serde(with = "crate::serde_ext")]
    pub inversive_distance: f64,
    pub pair: Option<(usize, usize)>,
    pub pairs_checked: u64,
    /// False when the pruned scan was used; the pruning is exact, so the
    /// minimum is still the true one.
    pub exhaustive: bool,
}

fn modulus_from_inversive(i: f64) -> f64 {
    if i <= 1.0 {
        0.0
    } else {
        i.acosh() / TAU
    }
}

/// Minimum pairwise ring modulus of the family.
pub fn family_modulus(f: &DiskFamily, pair_budget: usize) -> Result<f64> {
    family_modulus_report(f, pair_budget).map(|r| r.modulus)
}

type Best = Option<(f64, usize, usize)>;

fn better(a: Best, b: Best) -> Best {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => {
            let ord = x.0.total_cmp(&y.0).then((x.1, x.2).cmp(&(y.1, y.2)));
            if ord.is_le() {
                Some(x)
            } else {
                Some(y)
            }
        }
    }
}

pub fn family_modulus_report(f: &DiskFamily, pair_budget: usize) -> Result<FamilyModulusReport> {
    let n = f.disks.len();
    if n < 2 {
        return Err(Error::TooFewDisks(n));
    }
    let bounds: Vec<OrientedCircle> = f.disks.iter().map(|d| d.boundary()).collect();
    let pairs = (n as u64) * (n as u64 - 1) / 2;
    let (best, checked, exhaustive) = if pairs <= pair_budget as u64 {
        let best = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut b: Best = None;
                for j in (i + 1)..n {
                    b = better(b, Some((-bounds[i].pairing(&bounds[j]), i, j)));
                }
                b
            })
            .reduce(|| None, better);
        (best, pairs, true)
    } else {
        let (b, c) = pruned_scan(&bounds)?;
        (b, c, false)
    };
    let (inv, i, j) = best.ok_or_else(|| Error::Numeric("empty pair scan".into()))?;
    Ok(FamilyModulusReport {
        modulus: modulus_from_inversive(inv),
        inversive_distance: inv,
        pair: Some((i, j)),
        pairs_checked: checked,
        exhaustive,
    })
}

/// Bucket index over planar disks; each disk is registered in every cell its
/// bounding box touches.
struct DiskIndex {
    cell: f64,
    buckets: HashMap<(i64, i64), Vec<u32>>,
    big: Vec<u32>,
    max_cells: i64,
}

impl DiskIndex {
    fn new(cell: f64, max_cells: i64) -> Self {
        DiskIndex {
            cell,
            buckets: HashMap::new(),
            big: Vec::new(),
            max_cells,
        }
    }

    fn range(&self, c: Complex64, r: f64) -> (i64, i64, i64, i64) {
        let f = |x: f64| (x / self.cell).floor() as i64;
        (f(c.re - r), f(c.re + r), f(c.im - r), f(c.im + r))
    }

    fn insert(&mut self, idx: usize, c: Complex64, r: f64) {
        let (x0, x1, y0, y1) = self.range(c, r);
        if (x1 - x0 + 1).saturating_mul(y1 - y0 + 1) > self.max_cells {
            self.big.push(idx as u32);
            return;
        }
        for x in x0..=x1 {
            for y in y0..=y1 {
                self.buckets.entry((x, y)).or_default().push(idx as u32);
            }
        }
    }

    /// Calls `visit` on every disk whose box meets the box of radius `r` at `c`
    /// (possibly more than once).
    fn query(&self, c: Complex64, r: f64, mut visit: impl FnMut(usize)) {
        for &b in &self.big {
            visit(b as usize);
        }
        let (x0, x1, y0, y1) = self.range(c, r);
        if (x1 - x0 + 1).saturating_mul(y1 - y0 + 1) > self.max_cells.max(1 << 20) {
            for v in self.buckets.values() {
                for &i in v {
                    visit(i as usize);
                }
            }
            return;
        }
        for x in x0..=x1 {
            for y in y0..=y1 {
                if let Some(v) = self.buckets.get(&(x, y)) {
                    for &i in v {
                        visit(i as usize);
                    }
                }
            }
        }
    }
}

/// Moebius map sending a point outside every disk to infinity, so that all
/// disks become bounded.
fn bounding_normalization(bounds: &[OrientedCircle]) -> Result<MoebiusMap> {
    if bounds.iter().all(|b| b.hermitian().0 > 1e-9) {
        return Ok(MoebiusMap::identity());
    }
    let golden = PI * (3.0 - 5f64.sqrt());
    let m = 512;
    let mut best: Option<(f64, SpherePoint)> = None;
    for k in 0..m {
        let z = 1.0 - 2.0 * (k as f64 + 0.5) / m as f64;
        let rad = (1.0 - z * z).sqrt();
        let th = golden * k as f64;
        // Inverse stereographic projection from the north pole.
        let w = Complex64::new(rad * th.cos(), rad * th.sin()) / (1.0 - z);
        let p = SpherePoint::finite(w);
        let score = bounds.iter().map(|b| b.form(&p)).fold(f64::INFINITY, f64::min);
        if best.is_none_or(|(s, _)| score > s) {
            best = Some((score, p));
        }
    }
    let (score, p) = best.expect("nonempty sample");
    if !(score > 0.0) {
        return Err(Error::Numeric("no sample point outside all disks".into()));
    }
    let (p1, p2) = p.coords();
    MoebiusMap::new(-p1.conj(), -p2.conj(), p2, -p1)
        .ok_or_else(|| Error::Numeric("normalization failed".into()))
}

fn pruned_scan(bounds: &[OrientedCircle]) -> Result<(Best, u64)> {
    let g = bounding_normalization(bounds)?;
    let planar: Vec<(Complex64, f64)> = bounds
        .iter()
        .map(|b| b.mapped(&g).center_radius().unwrap_or((Complex64::new(0.0, 0.0), f64::INFINITY)))
        .collect();
    if planar.iter().any(|(_, r)| !r.is_finite()) {
        return Err(Error::Numeric("unbounded disk after normalization".into()));
    }
    let n = planar.len();
    let mut radii: Vec<f64> = planar.iter().map(|p| p.1).collect();
    radii.sort_by(f64::total_cmp);
    let cell = (4.0 * radii[n / 2]).max(1e-300);
    let mut index = DiskIndex::new(cell, 4 * n as i64 + 4096);
    for (i, &(c, r)) in planar.iter().enumerate() {
        index.insert(i, c, r);
    }
    // Orders pairs so each is examined from its smaller disk.
    let smaller = |i: usize, j: usize| (planar[i].1, i) < (planar[j].1, j);

    let seed = (0..n)
        .into_par_iter()
        .map(|j| {
            let mut b: Best = None;
            index.query(planar[j].0, planar[j].1 + cell, |i| {
                if i != j && smaller(j, i) {
                    b = better(b, Some((-bounds[i].pairing(&bounds[j]), i.min(j), i.max(j))));
                }
            });
            b
        })
        .reduce(|| None, better);
    let seed_inv = match seed {
        Some((v, _, _)) => v,
        None => -bounds[0].pairing(&bounds[1]),
    };
    // A pair with gap g and smaller radius r has I - 1 >= g / r, so only gaps
    // up to (I* - 1) r can beat the seed.
    let results: Vec<(Best, u64)> = (0..n)
        .into_par_iter()
        .map(|j| {
            let (c, r) = planar[j];
            let reach = r + (seed_inv - 1.0).max(0.0) * r;
            let mut b: Best = None;
            let mut count = 0u64;
            let mut seen: Vec<usize> = Vec::new();
            index.query(c, reach, |i| {
                if i != j && smaller(j, i) {
                    seen.push(i);
                }
            });
            seen.sort_unstable();
            seen.dedup();
            for i in seen {
                count += 1;
                b = better(b, Some((-bounds[i].pairing(&bounds[j]), i.min(j), i.max(j))));
            }
            (b, count)
        })
        .collect();
    let mut best = seed;
    let mut checked = 0;
    for (b, c) in results {
        best = better(best, b);
        checked += c;
    }
    Ok((best, checked))
}

fn grid_candidates(level: u32) -> (f64, usize) {
    let per_side = GRID_REFINEMENT.pow(level - 1);
    (1.0 / per_side as f64, per_side)
}

/// Builds a synthetic carpet in the unit square (`grid`) or around the unit
/// disk (`nested`).
///
/// Candidates at each level are accepted only when their inversive distance to
/// every disk already placed is at least the value realized by two adjacent
/// candidates of one level, so every pair respects the design modulus.
pub fn synth_carpet(style: CarpetStyle, depth: u32, gap: f64) -> Result<DiskFamily> {
    if depth < 1 {
        return Err(Error::InvalidParams("depth must be at least 1".into()));
    }
    if !(gap > 0.0 && gap < 1.0) {
        return Err(Error::InvalidParams(format!("gap must lie in (0, 1), got {gap}")));
    }
    let max_depth = match style {
        CarpetStyle::Grid => 3,
        CarpetStyle::Nested => 7,
    };
    if depth > max_depth {
        return Err(Error::InvalidParams(format!(
            "depth {depth} exceeds the supported maximum {max_depth} for this style"
        )));
    }
    let (planar, levels, inv_min) = match style {
        CarpetStyle::Grid => synth_grid(depth, gap),
        CarpetStyle::Nested => synth_nested(depth, gap),
    };
    let disks: Vec<Disk> = planar
        .iter()
        .map(|&(c, r)| Disk::euclidean(c, r).expect("positive radius"))
        .collect();
    let mut fam = DiskFamily::new(disks);
    fam.meta = FamilyMeta {
        construction: match style {
            CarpetStyle::Grid => "grid".into(),
            CarpetStyle::Nested => "nested".into(),
        },
        depth,
        gap: Some(gap),
        levels,
        design_delta: Some(modulus_from_inversive(inv_min)),
    };
    fam.delta = Some(if fam.len() < 2 {
        f64::INFINITY
    } else {
        family_modulus(&fam, DEFAULT_PAIR_BUDGET)?
    });
    Ok(fam)
}

fn euclid_inversive(a: (Complex64, f64), b: (Complex64, f64)) -> f64 {
    ((a.0 - b.0).norm_sqr() - a.1 * a.1 - b.1 * b.1) / (2.0 * a.1 * b.1)
}

struct Placer {
    disks: Vec<(Complex64, f64)>,
    levels: Vec<u32>,
    index: DiskIndex,
    inv_min: f64,
}

impl Placer {
    fn new(cell: f64, inv_min: f64) -> Self {
        Placer {
            disks: Vec::new(),
            levels: Vec::new(),
            index: DiskIndex::new(cell, i64::MAX),
            inv_min,
        }
    }

    fn try_place(&mut self, c: Complex64, r: f64, level: u32) -> bool {
        // Disks with gap beyond (I_min - 1) r cannot violate the threshold.
        let reach = r + (self.inv_min - 1.0) * r;
        let mut ok = true;
        let thresh = self.inv_min * (1.0 - 1e-12);
        self.index.query(c, reach, |i| {
            if ok && euclid_inversive(self.disks[i], (c, r)) < thresh {
                ok = false;
            }
        });
        if ok {
            self.index.insert(self.disks.len(), c, r);
            self.disks.push((c, r));
            self.levels.push(level);
        }
        ok
    }
}

fn synth_grid(depth: u32, gap: f64) -> (Vec<(Complex64, f64)>, Vec<u32>, f64) {
    let q = 2.0 / (1.0 - gap);
    let inv_min = (q * q - 2.0) / 2.0;
    let (finest, _) = grid_candidates(depth);
    let mut placer = Placer::new(finest, inv_min);
    for level in 1..=depth {
        let (h, per_side) = grid_candidates(level);
        let rho = (1.0 - gap) * h / 2.0;
        for a in 0..per_side {
            for b in 0..per_side {
                let c = Complex64::new((a as f64 + 0.5) * h, (b as f64 + 0.5) * h);
                placer.try_place(c, rho, level);
            }
        }
    }
    (placer.disks, placer.levels, inv_min)
}

fn synth_nested(depth: u32, gap: f64) -> (Vec<(Complex64, f64)>, Vec<u32>, f64) {
    let s = 4.0 / 3.0 + gap;
    let inv_min = (s * s - 1.0 - 1.0 / 9.0) / (2.0 / 3.0);
    let mut placer = Placer::new(3f64.powi(-(depth as i32 - 1)), inv_min);
    placer.try_place(Complex64::new(0.0, 0.0), 1.0, 1);
    let mut parents = vec![0usize];
    for level in 2..=depth {
        let mut next = Vec::new();
        for &p in &parents {
            let (c, r) = placer.disks[p];
            for j in 0..8 {
                let dir = Complex64::from_polar(1.0, TAU * j as f64 / 8.0);
                if placer.try_place(c + dir * (s * r), r / 3.0, level) {
                    next.push(placer.disks.len() - 1);
                }
            }
        }
        parents = next;
    }
    (placer.disks, placer.levels, inv_min)
}

/// An open arc of the slicing circle lying in the disk with index `label`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapArc {
    pub start: f64,
    pub end: f64,
    pub label: usize,
}

impl GapArc {
    pub fn new(start: f64, end: f64, label: usize) -> Self {
        GapArc {
            start: normalize_angle(start),
            end: normalize_angle(end),
            label,
        }
    }

    pub fn length(&self) -> f64 {
        ccw_distance(self.start, self.end)
    }
}

/// Labeled open arcs on a circle, in the circle's chart angles, sorted by start.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledGapSystem {
    pub circle: OrientedCircle,
    pub chart: MoebiusMap,
    pub arcs: Vec<GapArc>,
    /// Set when the whole circle lies inside one disk.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub covering_label: Option<usize>,
    /// Modulus of the disk family the arcs came from, when known.
    #[serde(default, skip_serializing_if = "Option::is_none", with = "crate::serde_ext::option")]
    pub delta: Option<f64>,
}

impl LabeledGapSystem {
    /// Builds a system on `circle`, checking that arcs have positive length
    /// and pairwise disjoint closures.
    pub fn new(circle: OrientedCircle, mut arcs: Vec<GapArc>) -> Result<Self> {
        arcs.sort_by(|a, b| a.start.total_cmp(&b.start).then(a.label.cmp(&b.label)));
        for a in &arcs {
            let l = a.length();
            if !(l > 0.0) {
                return Err(Error::DegenerateConfig("gap arc has no length".into()));
            }
        }
        let n = arcs.len();
        if n >= 2 {
            let total: f64 = arcs.iter().map(|a| a.length()).sum();
            for k in 0..n {
                let a = &arcs[k];
                let b = &arcs[(k + 1) % n];
                let sep = ccw_distance(a.end, b.start);
                if ccw_distance(a.start, b.start) < a.length() || !(sep > 0.0) || total >= TAU {
                    return Err(Error::DegenerateConfig("gap arcs overlap or touch".into()));
                }
            }
        }
        Ok(LabeledGapSystem {
            chart: circle.chart(),
            circle,
            arcs,
            covering_label: None,
            delta: None,
        })
    }

    pub fn empty(circle: OrientedCircle) -> Self {
        LabeledGapSystem {
            chart: circle.chart(),
            circle,
            arcs: Vec::new(),
            covering_label: None,
            delta: None,
        }
    }

    /// Arc indices grouped by label.
    pub fn groups(&self) -> BTreeMap<usize, Vec<usize>> {
        let mut g: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (k, a) in self.arcs.iter().enumerate() {
            g.entry(a.label).or_default().push(k);
        }
        g
    }

    pub fn point_at(&self, theta: f64) -> SpherePoint {
        crate::geom::point_at_with(&self.chart, theta)
    }

    pub fn angle_of(&self, p: &SpherePoint) -> f64 {
        crate::geom::angle_of_with(&self.chart, p)
    }
}

/// Trace of one disk on the unit circle of the chart: `None`, the whole
/// circle, or an open arc `(start, end)`.
enum Trace {
    Empty,
    Whole,
    Arc(f64, f64),
}

fn trace_in_chart(boundary: &OrientedCircle, chart_inv: &MoebiusMap) -> Trace {
    let (h11, h12, h22) = boundary.mapped(chart_inv).hermitian();
    // Form at (e^{i theta}, 1) is s + 2 |h12| cos(theta - phi).
    let s = h11 + h22;
    let b = h12.norm();
    if s + 2.0 * b < 0.0 {
        return Trace::Whole;
    }
    if s - 2.0 * b >= 0.0 || b == 0.0 {
        return Trace::Empty;
    }
    let w = (-s / (2.0 * b)).clamp(-1.0, 1.0).acos();
    let phi = h12.arg();
    if w <= 0.0 || w >= PI {
        return Trace::Empty;
    }
    Trace::Arc(normalize_angle(phi + w), normalize_angle(phi + TAU - w))
}

/// Traces `C n D_i` of the family on `c`, each labeled with its disk index.
pub fn slice_circle(f: &DiskFamily, c: &OrientedCircle) -> LabeledGapSystem {
    let chart = c.chart();
    let inv = chart.inverse();
    let traces: Vec<(usize, Trace)> = f
        .disks
        .par_iter()
        .enumerate()
        .map(|(i, d)| (i, trace_in_chart(&d.boundary(), &inv)))
        .collect();
    let mut arcs = Vec::new();
    let mut covering = None;
    for (i, t) in traces {
        match t {
            Trace::Empty => {}
            Trace::Whole => covering = covering.or(Some(i)),
            Trace::Arc(a, b) => arcs.push(GapArc { start: a, end: b, label: i }),
        }
    }
    arcs.sort_by(|a, b| a.start.total_cmp(&b.start).then(a.label.cmp(&b.label)));
    LabeledGapSystem {
        circle: *c,
        chart,
        arcs,
        covering_label: covering,
        delta: f.delta,
    }
}

/// A negative-side disk, i.e. the exterior of `|z - center| <= radius`.
pub fn exterior_disk(center: Complex64, radius: f64) -> Option<Disk> {
    Some(Disk {
        circle: OrientedCircle::disk_boundary(center, radius)?,
        side: Side::Negative,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_pair_modulus() {
        let f = DiskFamily::new(vec![
            Disk::euclidean(c(0.0, 0.0), 1.0).unwrap(),
            Disk::euclidean(c(5.0, 0.0), 1.0).unwrap(),
        ]);
        let m = family_modulus(&f, 10).unwrap();
        assert!((m - 11.5f64.acosh() / TAU).abs() < 1e-12);
    }

    #[test]
    fn too_few_disks() {
        let f = DiskFamily::new(vec![Disk::euclidean(c(0.0, 0.0), 1.0).unwrap()]);
        assert_eq!(family_modulus(&f, 10), Err(Error::TooFewDisks(1)));
    }

    #[test]
    fn depth_one_grid_is_one_disk() {
        let f = synth_carpet(CarpetStyle::Grid, 1, 0.5).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f.delta, Some(f64::INFINITY));
    }

    #[test]
    fn invalid_params() {
        assert!(matches!(synth_carpet(CarpetStyle::Grid, 0, 0.5), Err(Error::InvalidParams(_))));
        assert!(matches!(synth_carpet(CarpetStyle::Grid, 2, 1.0), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn nested_levels_shrink() {
        let f = synth_carpet(CarpetStyle::Nested, 4, 0.3).unwrap();
        let d: Vec<f64> = f.max_diameter_by_level().values().copied().collect();
        assert_eq!(d.len(), 4);
        assert!(d.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn slice_through_one_disk() {
        let f = DiskFamily::new(vec![Disk::euclidean(c(1.0, 0.0), 0.5).unwrap()]);
        let g = slice_circle(&f, &OrientedCircle::unit());
        assert_eq!(g.arcs.len(), 1);
        let a = g.arcs[0];
        let (p, q) = (g.point_at(a.start), g.point_at(a.end));
        for pt in [p, q] {
            let z = pt.to_complex().unwrap();
            assert!((z.norm() - 1.0).abs() < 1e-12);
            assert!(((z - c(1.0, 0.0)).norm() - 0.5).abs() < 1e-12);
        }
        let mid = g.point_at(a.start + 0.5 * a.length());
        assert!(f.disks[0].contains(&mid));
    }

    #[test]
    fn covering_disk_detected() {
        let f = DiskFamily::new(vec![Disk::euclidean(c(0.0, 0.0), 3.0).unwrap()]);
        let g = slice_circle(&f, &OrientedCircle::unit());
        assert!(g.arcs.is_empty());
        assert_eq!(g.covering_label, Some(0));
    }

    #[test]
    fn family_json_roundtrip() {
        let f = synth_carpet(CarpetStyle::Nested, 2, 0.3).unwrap();
        let s = serde_json::to_string(&f).unwrap();
        let back: DiskFamily = serde_json::from_str(&s).unwrap();
        assert_eq!(back.len(), f.len());
        assert_eq!(back.meta, f.meta);
        let one = synth_carpet(CarpetStyle::Grid, 1, 0.3).unwrap();
        let s = serde_json::to_string(&one).unwrap();
        assert!(s.contains("\"delta\":\"inf\""));
        let back: DiskFamily = serde_json::from_str(&s).unwrap();
        assert_eq!(back.delta, Some(f64::INFINITY));
    }

    #[test]
    fn overlapping_arcs_rejected() {
        let arcs = vec![GapArc::new(0.0, 1.0, 0), GapArc::new(0.5, 2.0, 1)];
        assert!(LabeledGapSystem::new(OrientedCircle::unit(), arcs).is_err());
    }
}
