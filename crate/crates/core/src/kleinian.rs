//! Finitely generated Kleinian groups: reduced words, limit-set clouds,
//! circle orbits and stabilizers.
//!
//! Generator `i` is written with the letter `a + i` and its inverse with the
//! capital letter. Words are ordered by length, then lexicographically in the
//! alphabet `a, A, b, B, ...`; a word acts as the product of its letters from
//! left to right.

use rayon::prelude::*;
use rstar::primitives::GeomWithData;
use rstar::RTree;
use serde::{Deserialize, Serialize};

use crate::{Disk, Error, MoebiusMap, OrientedCircle, Result, SpherePoint, Tolerances};

/// Tolerance for the ping-pong certificate.
pub const PING_PONG_TOL: f64 = 1e-8;

/// Words of length `L + 1` sampled when estimating the resolution of a cloud.
const RESOLUTION_SAMPLES: usize = 4096;

/// A Euclidean disk as `(center, radius)`.
pub type EuclideanDisk = (num_complex::Complex64, f64);

/// Generators of a group, with an optional Schottky ping-pong certificate.
///
/// `pairing_circles[i] = [c, d]` certifies that generator `i` maps the exterior
/// of `c` onto the interior of `d`; each circle bounds its disk on the positive side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GroupRepr")]
pub struct GroupGenerators {
    pub generators: Vec<MoebiusMap>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairing_circles: Option<Vec<[OrientedCircle; 2]>>,
}

#[derive(Deserialize)]
struct GroupRepr {
    generators: Vec<MoebiusMap>,
    #[serde(default)]
    pairing_circles: Option<Vec<[OrientedCircle; 2]>>,
}

impl TryFrom<GroupRepr> for GroupGenerators {
    type Error = Error;

    fn try_from(r: GroupRepr) -> Result<Self> {
        GroupGenerators::new(r.generators, r.pairing_circles)
    }
}

impl GroupGenerators {
    pub fn new(generators: Vec<MoebiusMap>, pairing_circles: Option<Vec<[OrientedCircle; 2]>>) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::InvalidParams("a group needs at least one generator".into()));
        }
        if generators.len() > 26 {
            return Err(Error::InvalidParams("at most 26 generators are supported".into()));
        }
        for g in &generators {
            if (g.det() - 1.0).norm() > 1e-9 {
                return Err(Error::InvalidParams("generator is not normalized".into()));
            }
        }
        let g = GroupGenerators { generators, pairing_circles };
        if let Some(pc) = &g.pairing_circles {
            g.check_ping_pong(pc)?;
        }
        Ok(g)
    }

    fn check_ping_pong(&self, pc: &[[OrientedCircle; 2]]) -> Result<()> {
        if pc.len() != self.generators.len() {
            return Err(Error::InvalidParams("one pair of circles per generator is required".into()));
        }
        let all: Vec<&OrientedCircle> = pc.iter().flatten().collect();
        for i in 0..all.len() {
            for j in (i + 1)..all.len() {
                let inv = -all[i].pairing(all[j]);
                if !(inv > 1.0) {
                    return Err(Error::InvalidParams(format!(
                        "pairing disks {i} and {j} are not disjoint (inversive distance {inv})"
                    )));
                }
            }
        }
        for (k, (g, [c, d])) in self.generators.iter().zip(pc).enumerate() {
            if c.mapped(g).distance(&d.reversed()) > PING_PONG_TOL {
                return Err(Error::InvalidParams(format!(
                    "generator {k} does not map the exterior of its circle onto its partner's disk"
                )));
            }
        }
        Ok(())
    }

    /// Schottky group pairing disks `(c1, r1)` and `(c2, r2)` for each entry.
    pub fn schottky(pairs: &[(EuclideanDisk, EuclideanDisk)]) -> Result<Self> {
        let mut gens = Vec::new();
        let mut circles = Vec::new();
        for &((c1, r1), (c2, r2)) in pairs {
            let m = MoebiusMap::new(c2, -(r1 * r2) - c1 * c2, 1.0.into(), -c1)
                .ok_or_else(|| Error::InvalidParams("degenerate pairing".into()))?;
            let d1 = Disk::euclidean(c1, r1).ok_or_else(|| Error::InvalidParams("radius must be positive".into()))?;
            let d2 = Disk::euclidean(c2, r2).ok_or_else(|| Error::InvalidParams("radius must be positive".into()))?;
            gens.push(m);
            circles.push([d1.boundary(), d2.boundary()]);
        }
        Self::new(gens, Some(circles))
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    /// Map of letter `l` (`2 i` for generator `i`, `2 i + 1` for its inverse).
    fn letter_map(&self, l: usize) -> MoebiusMap {
        let g = self.generators[l / 2];
        if l.is_multiple_of(2) {
            g
        } else {
            g.inverse()
        }
    }

    /// Images of this group under conjugation `g -> h g h^-1`.
    pub fn conjugated(&self, h: &MoebiusMap) -> Result<Self> {
        let gens = self.generators.iter().map(|g| g.conjugate_by(h)).collect();
        let pc = self
            .pairing_circles
            .as_ref()
            .map(|pc| pc.iter().map(|[c, d]| [c.mapped(h), d.mapped(h)]).collect());
        Self::new(gens, pc)
    }
}

fn letter_char(l: usize) -> char {
    let c = (b'a' + (l / 2) as u8) as char;
    if l.is_multiple_of(2) {
        c
    } else {
        c.to_ascii_uppercase()
    }
}

/// A reduced word and the map it represents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Word {
    pub letters: String,
    pub map: MoebiusMap,
    #[serde(skip)]
    last: Option<usize>,
}

impl Word {
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }
}

/// All freely reduced words of length at most `max_len`, ordered by length and
/// then lexicographically.
pub fn enumerate_words(g: &GroupGenerators, max_len: usize) -> Vec<Word> {
    let mut out = vec![Word { letters: String::new(), map: MoebiusMap::identity(), last: None }];
    let mut level_start = 0;
    let letters = 2 * g.rank();
    for _ in 0..max_len {
        let level = &out[level_start..];
        let next: Vec<Word> = level
            .par_iter()
            .flat_map_iter(|w| {
                (0..letters)
                    .filter(move |&l| w.last.is_none_or(|p| p ^ 1 != l))
                    .map(move |l| {
                        let mut letters = w.letters.clone();
                        letters.push(letter_char(l));
                        Word { letters, map: w.map.compose(&g.letter_map(l)), last: Some(l) }
                    })
            })
            .collect();
        level_start = out.len();
        out.extend(next);
    }
    out
}

/// Number of reduced words of length exactly `n` in a free group of rank `r`.
pub fn reduced_word_count(rank: usize, n: usize) -> usize {
    if n == 0 {
        1
    } else {
        2 * rank * (2 * rank - 1).pow(n as u32 - 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LimitMethod {
    /// Fixed points of loxodromic words.
    FixedPoints,
    /// Orbit of a limit point.
    Orbit,
}

impl std::str::FromStr for LimitMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixed-points" => Ok(LimitMethod::FixedPoints),
            "orbit" => Ok(LimitMethod::Orbit),
            other => Err(Error::InvalidParams(format!("unknown limit-set method {other:?}"))),
        }
    }
}

/// Finite point cloud approximating the limit set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LimitSetApprox {
    pub points: Vec<SpherePoint>,
    pub method: LimitMethod,
    pub max_len: usize,
    /// Heuristic chordal distance from orbit points one level deeper, and from
    /// generator images of the cloud, to the cloud.
    pub resolution: f64,
    #[serde(skip)]
    index: Option<PointIndex>,
}

impl PartialEq for LimitSetApprox {
    fn eq(&self, other: &Self) -> bool {
        self.points == other.points
            && self.method == other.method
            && self.max_len == other.max_len
            && self.resolution == other.resolution
    }
}

/// Nearest-neighbor index on the unit sphere; Euclidean distance in `R^3` is
/// the chordal distance.
#[derive(Debug, Clone)]
struct PointIndex {
    tree: RTree<GeomWithData<[f64; 3], usize>>,
}

impl PointIndex {
    fn new(points: &[SpherePoint]) -> Self {
        let items = points
            .iter()
            .enumerate()
            .map(|(i, p)| GeomWithData::new(p.to_unit_sphere(), i))
            .collect();
        PointIndex { tree: RTree::bulk_load(items) }
    }

    fn nearest(&self, p: &SpherePoint) -> Option<(usize, f64)> {
        let x = p.to_unit_sphere();
        self.tree.nearest_neighbor(x).map(|n| {
            let y = n.geom();
            let d = ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2) + (x[2] - y[2]).powi(2)).sqrt();
            (n.data, d)
        })
    }
}

impl LimitSetApprox {
    /// A cloud from explicit points, with a caller-supplied resolution.
    pub fn from_points(points: Vec<SpherePoint>, resolution: f64) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParams("limit-set cloud must be nonempty".into()));
        }
        let index = Some(PointIndex::new(&points));
        Ok(LimitSetApprox { points, method: LimitMethod::FixedPoints, max_len: 0, resolution, index })
    }

    fn index(&self) -> std::borrow::Cow<'_, PointIndex> {
        match &self.index {
            Some(i) => std::borrow::Cow::Borrowed(i),
            None => std::borrow::Cow::Owned(PointIndex::new(&self.points)),
        }
    }

    /// Rebuilds the search index after deserialization.
    pub fn indexed(mut self) -> Self {
        self.index = Some(PointIndex::new(&self.points));
        self
    }

    /// Chordal distance from `p` to the nearest cloud point.
    pub fn distance_to(&self, p: &SpherePoint) -> f64 {
        self.index().nearest(p).map_or(f64::INFINITY, |(_, d)| d)
    }

    /// Largest distance from a generator image of a cloud point to the cloud.
    pub fn invariance_residual(&self, g: &GroupGenerators) -> f64 {
        let idx = self.index();
        (0..2 * g.rank())
            .flat_map(|l| self.points.iter().map(move |p| (l, p)))
            .collect::<Vec<_>>()
            .par_iter()
            .map(|(l, p)| idx.nearest(&g.letter_map(*l).apply(p)).map_or(f64::INFINITY, |n| n.1))
            .reduce(|| 0.0, f64::max)
    }
}

/// Errors unless two loxodromic generators have no common fixed point.
pub fn check_nonelementary(g: &GroupGenerators) -> Result<()> {
    let lox: Vec<&MoebiusMap> = g.generators.iter().filter(|m| m.is_loxodromic(1e-9)).collect();
    for i in 0..lox.len() {
        for j in (i + 1)..lox.len() {
            let comm = lox[i].compose(lox[j]).compose(&lox[i].inverse()).compose(&lox[j].inverse());
            if (comm.trace() - 2.0).norm() > 1e-9 && (comm.trace() + 2.0).norm() > 1e-9 {
                return Ok(());
            }
        }
    }
    Err(Error::ElementaryGroup(format!(
        "{} loxodromic generator(s), none of them with disjoint fixed points",
        lox.len()
    )))
}

fn dedup_points(points: Vec<SpherePoint>, tol: f64) -> Vec<SpherePoint> {
    let mut tree: RTree<[f64; 3]> = RTree::new();
    let mut out = Vec::new();
    for p in points {
        let x = p.to_unit_sphere();
        if tree.locate_within_distance(x, tol * tol).next().is_none() {
            tree.insert(x);
            out.push(p);
        }
    }
    out
}

fn word_points(words: &[Word], method: LimitMethod, base: &SpherePoint) -> Vec<SpherePoint> {
    words
        .par_iter()
        .flat_map_iter(|w| match method {
            LimitMethod::FixedPoints => {
                w.map.fixed_points().map(|(a, r)| vec![a, r]).unwrap_or_default()
            }
            LimitMethod::Orbit => vec![w.map.apply(base)],
        })
        .collect()
}

/// Base point of the orbit method: the attracting fixed point of the first
/// loxodromic generator, so every orbit point lies in the limit set.
fn orbit_base(g: &GroupGenerators) -> SpherePoint {
    g.generators
        .iter()
        .find_map(|m| m.fixed_points())
        .map(|(a, _)| a)
        .unwrap_or_else(SpherePoint::infinity)
}

/// Approximates the limit set from words of length at most `max_len`.
pub fn limit_set_approx(g: &GroupGenerators, max_len: usize, method: LimitMethod) -> Result<LimitSetApprox> {
    limit_set_approx_with(g, max_len, method, &Tolerances::DEFAULT)
}

/// [`limit_set_approx`] merging points at `tol.point_merge`.
pub fn limit_set_approx_with(
    g: &GroupGenerators,
    max_len: usize,
    method: LimitMethod,
    tol: &Tolerances,
) -> Result<LimitSetApprox> {
    check_nonelementary(g)?;
    if max_len == 0 {
        return Err(Error::InvalidParams("max_len must be at least 1".into()));
    }
    let tol = tol.point_merge;
    let base = orbit_base(g);
    let words = enumerate_words(g, max_len);
    let points = dedup_points(word_points(&words, method, &base), tol);
    if points.is_empty() {
        return Err(Error::ElementaryGroup("no loxodromic words".into()));
    }
    let index = PointIndex::new(&points);

    // Sample the next level evenly.
    let next: Vec<Word> = enumerate_words(g, max_len + 1).split_off(words.len());
    let stride = (next.len() / RESOLUTION_SAMPLES).max(1);
    let sample: Vec<Word> = next.into_iter().step_by(stride).collect();
    let deeper = word_points(&sample, method, &base)
        .par_iter()
        .map(|p| index.nearest(p).map_or(0.0, |n| n.1))
        .reduce(|| 0.0, f64::max);
    let mut lam = LimitSetApprox { points, method, max_len, resolution: deeper, index: Some(index) };
    lam.resolution = lam.resolution.max(lam.invariance_residual(g));
    Ok(lam)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Separation {
    Separates,
    Misses,
    TouchesOneSide,
    Undecided,
}

/// Whether the cloud has points farther than `margin` from `c` on both sides.
pub fn separates_limit_set(c: &OrientedCircle, lam: &LimitSetApprox, margin: f64) -> Separation {
    let (mut pos, mut neg, mut near) = (false, false, false);
    for p in &lam.points {
        if c.chordal_distance_to(p) <= margin {
            near = true;
        } else if c.on_positive_side(p) {
            pos = true;
        } else {
            neg = true;
        }
    }
    match (pos, neg, near) {
        (true, true, _) => Separation::Separates,
        (false, false, _) => Separation::Undecided,
        (_, _, true) => Separation::TouchesOneSide,
        _ => Separation::Misses,
    }
}

/// Words of length at most `max_len` moving `c` by at most `tol`
/// (Frobenius distance of normalized representatives, orientation-sensitive).
pub fn stabilizer_search(g: &GroupGenerators, c: &OrientedCircle, max_len: usize, tol: f64) -> Vec<Word> {
    enumerate_words(g, max_len)
        .into_par_iter()
        .filter(|w| c.mapped(&w.map).distance(c) <= tol)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrbitClass {
    DiscreteLooking,
    Accumulating,
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitReport {
    /// Distinct orbit circles, in order of first appearance.
    pub circles: Vec<OrientedCircle>,
    /// Shortest word producing each circle.
    pub words: Vec<String>,
    /// `m_L`: least distance between distinct circles from words of length `<= L`,
    /// for `L = 0, ..., max_len` (infinite while fewer than two circles exist).
    #[serde(with = "inf_vec")]
    pub min_distance: Vec<f64>,
    pub classification: OrbitClass,
    pub dedup_tol: f64,
    pub unoriented: bool,
    pub metric: String,
}

mod inf_vec {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct W(#[serde(with = "crate::serde_ext")] f64);

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|x| W(*x)).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        Ok(Vec::<W>::deserialize(d)?.into_iter().map(|w| w.0).collect())
    }
}

fn circle_key(c: &OrientedCircle) -> [f64; 4] {
    let (a, b, d) = c.hermitian();
    [a, std::f64::consts::SQRT_2 * b.re, std::f64::consts::SQRT_2 * b.im, d]
}

/// Orbit `{w c}` over words of length at most `max_len`, de-duplicated at the
/// circle-merge tolerance. With `unoriented`, a circle and its reversal count once.
pub fn orbit_of_circle(g: &GroupGenerators, c: &OrientedCircle, max_len: usize, unoriented: bool) -> OrbitReport {
    orbit_of_circle_with(g, c, max_len, unoriented, &Tolerances::DEFAULT)
}

/// [`orbit_of_circle`] merging circles at `tol.circle_merge`.
pub fn orbit_of_circle_with(
    g: &GroupGenerators,
    c: &OrientedCircle,
    max_len: usize,
    unoriented: bool,
    tol: &Tolerances,
) -> OrbitReport {
    let tol = tol.circle_merge;
    let words = enumerate_words(g, max_len);
    let images: Vec<OrientedCircle> = words.par_iter().map(|w| c.mapped(&w.map)).collect();
    let mut tree: RTree<[f64; 4]> = RTree::new();
    let mut circles = Vec::new();
    let mut names = Vec::new();
    let mut min_distance = Vec::with_capacity(max_len + 1);
    let mut m = f64::INFINITY;
    let dist = |a: &[f64; 4], b: &[f64; 4]| a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let mut len = 0;
    for (w, img) in words.iter().zip(&images) {
        while w.len() > len {
            min_distance.push(m);
            len += 1;
        }
        let mut keys = vec![circle_key(img)];
        if unoriented {
            keys.push(circle_key(&img.reversed()));
        }
        let nearest = keys
            .iter()
            .filter_map(|k| tree.nearest_neighbor(*k).map(|n| dist(k, n)))
            .fold(f64::INFINITY, f64::min);
        if nearest <= tol {
            continue;
        }
        m = m.min(nearest);
        tree.insert(keys[0]);
        circles.push(*img);
        names.push(w.letters.clone());
    }
    while min_distance.len() <= max_len {
        min_distance.push(m);
    }
    let classification = classify(&min_distance, tol);
    OrbitReport {
        circles,
        words: names,
        min_distance,
        classification,
        dedup_tol: tol,
        unoriented,
        metric: "frobenius".into(),
    }
}

/// Heuristic reading of the `m_L` sequence.
fn classify(m: &[f64], tol: f64) -> OrbitClass {
    let finite: Vec<f64> = m.iter().copied().filter(|x| x.is_finite()).collect();
    let n = finite.len();
    if m.last().is_some_and(|x| x.is_infinite()) {
        return OrbitClass::DiscreteLooking;
    }
    if n < 3 {
        return OrbitClass::Undecided;
    }
    let (a, b, c) = (finite[n - 3], finite[n - 2], finite[n - 1]);
    if c > 10.0 * tol && c >= 0.999 * a {
        OrbitClass::DiscreteLooking
    } else if c < 0.5 * b && b < 0.5 * a || c <= 10.0 * tol {
        OrbitClass::Accumulating
    } else {
        OrbitClass::Undecided
    }
}
