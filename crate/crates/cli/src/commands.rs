use std::path::{Path, PathBuf};

use hypcircle::carpet::{family_modulus_report, slice_circle, synth_carpet, CarpetStyle, DiskFamily, LabeledGapSystem};
use hypcircle::flows::{in_rf, return_times, rfk_certificate, Frame, RfkParams};
use hypcircle::kleinian::{
    limit_set_approx_with, orbit_of_circle_with, separates_limit_set, stabilizer_search, GroupGenerators,
    LimitMethod, LimitSetApprox, Separation,
};
use hypcircle::modulus::{arc_ring_modulus, round_ring_modulus, FourPointConfig, RoundRing};
use hypcircle::slicer::{extract_cantor, verify_cantor_modulus, CantorApprox, StopRule};
use hypcircle::thickness::{thickness_report, ThickSetApprox};
use hypcircle::{MoebiusMap, OrientedCircle, SpherePoint, Tolerances};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::io::{
    from_value, read_circle, read_json, read_value, to_value, unwrap_envelope, CircleInput, CliError, CliResult,
    DiskInput,
};
use crate::render::{self, Artifact};

/// Accuracy reported by the closed-form modulus evaluations.
const MODULUS_TOLERANCE: f64 = 1e-9;

pub struct Output {
    pub result: Value,
    pub figure: Option<Artifact>,
}

impl Output {
    fn plain(result: Value) -> Self {
        Output { result, figure: None }
    }
}

pub fn carpet_synth(style: CarpetStyle, depth: u32, gap: f64) -> CliResult<Output> {
    let f = synth_carpet(style, depth, gap)?;
    Ok(Output { result: to_value(&f)?, figure: Some(Artifact::Carpet(f)) })
}

pub fn carpet_modulus(carpet: &Path, pair_budget: usize) -> CliResult<Output> {
    let f: DiskFamily = read_json(carpet)?;
    Ok(Output::plain(to_value(&family_modulus_report(&f, pair_budget)?)?))
}

pub fn slice_extract(
    carpet: Option<&Path>,
    circle: Option<&Path>,
    gaps: Option<&Path>,
    stop: StopRule,
) -> CliResult<Output> {
    let system: LabeledGapSystem = match (gaps, carpet, circle) {
        (Some(g), None, None) => read_json(g)?,
        (None, Some(f), Some(c)) => slice_circle(&read_json::<DiskFamily>(f)?, &read_circle(c)?),
        _ => {
            return Err(CliError::validation("InvalidParams", "give either --gaps, or both --carpet and --circle"));
        }
    };
    let ca = extract_cantor(&system, &stop)?;
    Ok(Output { result: to_value(&ca)?, figure: Some(Artifact::Cantor(ca)) })
}

pub fn slice_verify(input: &Path, pair_budget: usize) -> CliResult<Output> {
    let ca: CantorApprox = read_json(input)?;
    Ok(Output::plain(to_value(&verify_cantor_modulus(&ca, pair_budget)?)?))
}

pub fn modulus_ring(disks: &Path) -> CliResult<Output> {
    let v = unwrap_envelope(read_value(disks)?);
    let v = match v {
        Value::Object(mut m) if m.contains_key("disks") => m.remove("disks").unwrap_or(Value::Null),
        other => other,
    };
    let list: Vec<DiskInput> = from_value(v, "disk pair")?;
    let [a, b] = <[DiskInput; 2]>::try_from(list)
        .map_err(|l| CliError::validation("InvalidParams", format!("expected 2 disks, got {}", l.len())))?;
    let ring = RoundRing::new(a.disk()?, b.disk()?)?;
    Ok(Output::plain(json!({
        "modulus": round_ring_modulus(&ring)?,
        "method": "concentric-normalization",
        "tolerance": MODULUS_TOLERANCE,
        "inversive_distance": ring.inversive_distance(),
    })))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ArcsInput {
    Angles { circle: Option<CircleInput>, angles: [f64; 4] },
    Points(FourPointConfig),
}

pub fn modulus_arcs(config: &Path) -> CliResult<Output> {
    let cfg = match read_json::<ArcsInput>(config)? {
        ArcsInput::Points(p) => FourPointConfig::new(p.circle, p.points)?,
        ArcsInput::Angles { circle, angles } => {
            let c = circle.map(|c| c.circle()).transpose()?.unwrap_or_else(OrientedCircle::unit);
            FourPointConfig::from_angles(c, angles)?
        }
    };
    Ok(Output::plain(json!({
        "modulus": arc_ring_modulus(&cfg)?,
        "method": "elliptic-integral",
        "tolerance": MODULUS_TOLERANCE,
        "arc_lengths": cfg.arc_lengths(),
    })))
}

pub fn thick_check(set: &Path, k: f64, global: bool) -> CliResult<Output> {
    let t: ThickSetApprox = read_json(set)?;
    Ok(Output::plain(to_value(&thickness_report(&t, k, global)?)?))
}

#[derive(Debug, Clone, Copy, Deserialize)]
struct EuclideanDisk {
    center: [f64; 2],
    radius: f64,
}

#[derive(Debug, Clone, Copy, Deserialize)]
struct SchottkyPair {
    from: EuclideanDisk,
    to: EuclideanDisk,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum GroupInput {
    Schottky { schottky: Vec<SchottkyPair> },
    Full(GroupGenerators),
}

pub fn read_group(path: &Path) -> CliResult<GroupGenerators> {
    match read_json::<GroupInput>(path)? {
        GroupInput::Full(g) => Ok(g),
        GroupInput::Schottky { schottky } => {
            let z = |d: &EuclideanDisk| (Complex64::new(d.center[0], d.center[1]), d.radius);
            let pairs: Vec<_> = schottky.iter().map(|p| (z(&p.from), z(&p.to))).collect();
            Ok(GroupGenerators::schottky(&pairs)?)
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum FrameInput {
    Frame(Frame),
    Matrix(MoebiusMap),
}

fn read_frame(path: &Path) -> CliResult<Frame> {
    Ok(match read_json::<FrameInput>(path)? {
        FrameInput::Frame(f) => f,
        FrameInput::Matrix(m) => Frame::new(m),
    })
}

pub fn group_limit_set(group: &Path, max_len: usize, method: LimitMethod, tol: &Tolerances) -> CliResult<Output> {
    let lam = limit_set_approx_with(&read_group(group)?, max_len, method, tol)?;
    Ok(Output { result: to_value(&lam)?, figure: Some(Artifact::Cloud(lam)) })
}

pub fn group_orbit_circle(
    group: &Path,
    circle: &Path,
    max_len: usize,
    unoriented: bool,
    tol: &Tolerances,
) -> CliResult<Output> {
    let rep = orbit_of_circle_with(&read_group(group)?, &read_circle(circle)?, max_len, unoriented, tol);
    Ok(Output { result: to_value(&rep)?, figure: Some(Artifact::Orbit(rep)) })
}

pub fn group_stabilizer(group: &Path, circle: &Path, max_len: usize, tol: f64) -> CliResult<Output> {
    let words = stabilizer_search(&read_group(group)?, &read_circle(circle)?, max_len, tol);
    Ok(Output::plain(json!({ "tol": tol, "words": to_value(&words)? })))
}

/// The limit-set cloud for flow commands: a stored cloud, or one built from a group.
pub struct CloudSource<'a> {
    pub group: Option<&'a Path>,
    pub cloud: Option<&'a Path>,
    pub max_len: usize,
    pub method: LimitMethod,
}

fn load_cloud(src: &CloudSource, tol: &Tolerances) -> CliResult<LimitSetApprox> {
    match (src.group, src.cloud) {
        (Some(g), None) => Ok(limit_set_approx_with(&read_group(g)?, src.max_len, src.method, tol)?),
        (None, Some(c)) => Ok(read_json::<LimitSetApprox>(c)?.indexed()),
        _ => Err(CliError::validation("InvalidParams", "give exactly one of --group and --cloud")),
    }
}

pub fn flow_return_times(
    src: &CloudSource,
    frame: &Path,
    window: f64,
    eta: f64,
    eps: f64,
    tol: &Tolerances,
) -> CliResult<Output> {
    let lam = load_cloud(src, tol)?;
    let x = read_frame(frame)?;
    let rt = return_times(&x, &lam, window, eta, eps)?;
    Ok(Output::plain(json!({
        "in_rf": in_rf(&x, &lam, eps),
        "cloud_points": lam.points.len(),
        "cloud_resolution": lam.resolution,
        "return_times": to_value(&rt)?,
    })))
}

pub fn flow_rfk(
    src: &CloudSource,
    frame: &Path,
    k: f64,
    params: RfkParams,
    carpet: Option<&PathBuf>,
    tol: &Tolerances,
) -> CliResult<Output> {
    let lam = load_cloud(src, tol)?;
    let x = read_frame(frame)?;
    let carpet: Option<DiskFamily> = carpet.map(|p| read_json(p)).transpose()?;
    let rep = rfk_certificate(&x, &lam, k, &params, carpet.as_ref())?;
    Ok(Output::plain(to_value(&rep)?))
}

/// Unit normal of the circle's plane section of the sphere, as a point of R^4.
fn unit_plane(c: &OrientedCircle) -> [f64; 4] {
    let (n, h0) = c.sphere_plane();
    let s = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2] + h0 * h0).sqrt();
    [n[0] / s, n[1] / s, n[2] / s, h0 / s]
}

/// Distance between unoriented circles through their normalized planes.
fn plane_distance(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    let d = |s: f64| a.iter().zip(b).map(|(x, y)| (x - s * y).powi(2)).sum::<f64>().sqrt();
    d(1.0).min(d(-1.0))
}

#[derive(Serialize)]
struct DensityReport {
    illustrative: bool,
    note: &'static str,
    metric: &'static str,
    seed_circles: Vec<OrientedCircle>,
    test_circles: usize,
    orbit_sizes: Vec<usize>,
    covering_radius: Vec<f64>,
}

/// Random circles separating the cloud, drawn from the cloud's bounding box.
fn separating_circles(lam: &LimitSetApprox, n: usize, rng: &mut impl Rng) -> CliResult<Vec<OrientedCircle>> {
    let finite: Vec<Complex64> = lam.points.iter().filter_map(SpherePoint::to_complex).filter(|z| z.norm() < 1e3).collect();
    if finite.is_empty() {
        return Err(CliError::validation("InvalidParams", "cloud has no finite points"));
    }
    let (x0, x1) = finite.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |a, z| (a.0.min(z.re), a.1.max(z.re)));
    let (y0, y1) = finite.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |a, z| (a.0.min(z.im), a.1.max(z.im)));
    let span = (x1 - x0).max(y1 - y0).max(1e-6);
    let mut out = Vec::with_capacity(n);
    for _ in 0..1000 * n.max(1) {
        if out.len() == n {
            break;
        }
        let center = Complex64::new(rng.gen_range(x0..=x1), rng.gen_range(y0..=y1));
        let radius = span * rng.gen_range(0.02..0.6);
        let c = OrientedCircle::disk_boundary(center, radius).expect("positive radius");
        if separates_limit_set(&c, lam, 0.0) == Separation::Separates {
            out.push(c);
        }
    }
    if out.len() < n {
        return Err(CliError {
            code: "Numeric".into(),
            message: format!("found only {} of {n} separating circles", out.len()),
            exit: crate::io::EXIT_NUMERIC,
        });
    }
    Ok(out)
}

pub fn orbit_density(
    group: &Path,
    seeds: usize,
    tests: usize,
    max_len: usize,
    seed: u64,
    tol: &Tolerances,
) -> CliResult<Output> {
    let g = read_group(group)?;
    let lam = limit_set_approx_with(&g, 6, LimitMethod::FixedPoints, tol)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let seed_circles = separating_circles(&lam, seeds, &mut rng)?;
    let test_circles = separating_circles(&lam, tests, &mut rng)?;
    let test_planes: Vec<[f64; 4]> = test_circles.iter().map(unit_plane).collect();
    let orbits: Vec<_> = seed_circles.iter().map(|c| orbit_of_circle_with(&g, c, max_len, true, tol)).collect();
    let mut nearest = vec![f64::INFINITY; test_planes.len()];
    let mut covering_radius = Vec::with_capacity(max_len + 1);
    let mut orbit_sizes = Vec::with_capacity(max_len + 1);
    let mut size = 0;
    for len in 0..=max_len {
        for rep in &orbits {
            for (c, w) in rep.circles.iter().zip(&rep.words) {
                if w.chars().count() == len {
                    size += 1;
                    let p = unit_plane(c);
                    for (t, best) in test_planes.iter().zip(nearest.iter_mut()) {
                        *best = best.min(plane_distance(t, &p));
                    }
                }
            }
        }
        orbit_sizes.push(size);
        covering_radius.push(nearest.iter().copied().fold(0.0, f64::max));
    }
    let report = DensityReport {
        illustrative: true,
        note: "covering radius of orbit circles over a fixed sample of separating circles; an illustration, not a proof",
        metric: "unoriented unit-plane distance",
        seed_circles,
        test_circles: tests,
        orbit_sizes,
        covering_radius,
    };
    Ok(Output::plain(to_value(&report)?))
}

pub fn render_input(input: &Path) -> CliResult<String> {
    let art = render::detect(unwrap_envelope(read_value(input)?))?;
    Ok(render::render(&art))
}
