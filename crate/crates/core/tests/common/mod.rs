//! Independent numerical oracles shared by the integration tests.
#![allow(dead_code)]

pub mod bridges;

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Condenser capacity of two disjoint real slits, solved with a logarithmic
/// single-layer potential whose density is a Chebyshev series with the
/// endpoint weight `1 / sqrt(1 - s^2)`. Returns the ring modulus `1 / flux`.
pub fn slit_pair_modulus(i1: (f64, f64), i2: (f64, f64), n: usize) -> f64 {
    let slits = [i1, i2];
    let mid = slits.map(|(a, b)| 0.5 * (a + b));
    let half = slits.map(|(a, b)| 0.5 * (b - a).abs());
    let quad = 400;
    let qnodes: Vec<f64> = (1..=quad)
        .map(|k| ((2 * k - 1) as f64 * PI / (2 * quad) as f64).cos())
        .collect();
    let cheb = |k: usize, s: f64| (k as f64 * s.clamp(-1.0, 1.0).acos()).cos();

    let dim = 2 * n + 1;
    let mut a = DMatrix::<f64>::zeros(dim, dim);
    let mut rhs = DVector::<f64>::zeros(dim);
    for i in 0..2 {
        for j in 1..=n {
            let y = ((2 * j - 1) as f64 * PI / (2 * n) as f64).cos();
            let x = mid[i] + half[i] * y;
            let row = i * n + j - 1;
            for src in 0..2 {
                for k in 0..n {
                    let v = if src == i {
                        if k == 0 {
                            PI * half[i].ln() - PI * 2f64.ln()
                        } else {
                            -PI / k as f64 * cheb(k, y)
                        }
                    } else {
                        let s: f64 = qnodes
                            .iter()
                            .map(|&s| (x - mid[src] - half[src] * s).abs().ln() * cheb(k, s))
                            .sum();
                        s * PI / quad as f64
                    };
                    a[(row, src * n + k)] = v;
                }
            }
            a[(row, 2 * n)] = 1.0;
            rhs[row] = if i == 0 { 0.0 } else { 1.0 };
        }
    }
    // Zero total charge keeps the potential bounded at infinity.
    a[(2 * n, 0)] = 1.0;
    a[(2 * n, n)] = 1.0;
    let sol = a.lu().solve(&rhs).expect("nonsingular collocation system");
    let q2 = PI * sol[n];
    -1.0 / (2.0 * PI * q2)
}

/// Modulus of the sphere minus the arcs `[t1, t2]` and `[t3, t4]` of the unit
/// circle (counterclockwise, angles in cyclic order), via the slit oracle.
pub fn unit_circle_arcs_modulus(angles: [f64; 4]) -> f64 {
    let [t1, t2, t3, t4] = angles;
    let mut gap = t1 - ccw(t4, t1) / 2.0;
    if ccw(t4, t1) < ccw(t2, t3) {
        gap = t3 - ccw(t2, t3) / 2.0;
    }
    // z -> i (w + z) / (w - z) sends the unit circle to the real line and w to infinity.
    let w = Complex64::from_polar(1.0, gap);
    let f = |t: f64| {
        let z = Complex64::from_polar(1.0, t);
        (Complex64::i() * (w + z) / (w - z)).re
    };
    let x = [f(t1), f(t2), f(t3), f(t4)];
    let s1 = (x[0].min(x[1]), x[0].max(x[1]));
    let s2 = (x[2].min(x[3]), x[2].max(x[3]));
    slit_pair_modulus(s1, s2, 48)
}

fn ccw(from: f64, to: f64) -> f64 {
    (to - from).rem_euclid(2.0 * PI)
}

/// Chord of a unit-circle arc of angular length `x`.
pub fn chord(x: f64) -> f64 {
    2.0 * (0.5 * x).sin()
}

/// Inversive distance of two disjoint Euclidean disks.
pub fn euclid_inversive(c1: Complex64, r1: f64, c2: Complex64, r2: f64) -> f64 {
    let d2 = (c1 - c2).norm_sqr();
    (d2 - r1 * r1 - r2 * r2) / (2.0 * r1 * r2)
}

/// Greedy Cantor approximations from random slices of small synthetic carpets.
/// Slices that do not meet two gap types are skipped.
pub fn cantor_instances(n: usize, seed: u64) -> Vec<hypcircle::slicer::CantorApprox> {
    use hypcircle::carpet::{slice_circle, synth_carpet, CarpetStyle};
    use hypcircle::slicer::{extract_cantor, StopRule};
    use hypcircle::OrientedCircle;
    use rand::{Rng, SeedableRng};

    let families = [
        synth_carpet(CarpetStyle::Grid, 2, 0.3).unwrap(),
        synth_carpet(CarpetStyle::Nested, 3, 0.25).unwrap(),
    ];
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let rule = StopRule { eps: 1e-3, max_bridges: 120 };
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let which = out.len() % 2;
        let f = &families[which];
        let (center, radius) = if which == 0 {
            (Complex64::new(rng.gen_range(0.2..0.8), rng.gen_range(0.2..0.8)), rng.gen_range(0.1..0.5))
        } else {
            (Complex64::new(rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3)), rng.gen_range(1.1..2.0))
        };
        let circle = OrientedCircle::disk_boundary(center, radius).unwrap();
        let g = slice_circle(f, &circle);
        if let Ok(ca) = extract_cantor(&g, &rule) {
            if ca.bridges.len() >= 8 {
                out.push(ca);
            }
        }
    }
    out
}

/// True when some point of `T - x` has modulus in `[y, k y]`.
pub fn hits(iv: &[(f64, f64)], x: f64, y: f64, k: f64) -> bool {
    iv.iter().any(|&(a, b)| {
        let (a, b) = (a - x, b - x);
        (b >= y && a <= k * y) || (-a >= y && -b <= k * y)
    })
}

/// Brute-force check of one translate: tries `eta` and a scale just above
/// every endpoint modulus, each against every interval.
pub fn oracle_translate_fails(t: &hypcircle::thickness::ThickSetApprox, x: f64, k: f64) -> bool {
    let ymax = (t.window - x.abs()) / k;
    if ymax < t.resolution {
        return false;
    }
    let mut cands = vec![t.resolution];
    for &(a, b) in &t.intervals {
        for e in [(a - x).abs(), (b - x).abs()] {
            let y = e * (1.0 + 1e-9);
            if y >= t.resolution && y <= ymax {
                cands.push(y);
            }
        }
    }
    cands.iter().any(|&y| !hits(&t.intervals, x, y, k))
}

/// Translates where the worst scale can occur: endpoints and pairwise midpoints
/// of endpoints and window edges, kept when they lie in the set.
pub fn oracle_translates(t: &hypcircle::thickness::ThickSetApprox) -> Vec<f64> {
    let mut ends: Vec<f64> = t.intervals.iter().flat_map(|&(a, b)| [a, b]).collect();
    ends.extend([-t.window, t.window]);
    let mut xs = Vec::new();
    for i in 0..ends.len() {
        for j in i..ends.len() {
            let m = 0.5 * (ends[i] + ends[j]);
            if t.contains(m) {
                xs.push(m);
            }
        }
    }
    xs
}

pub fn oracle_global(t: &hypcircle::thickness::ThickSetApprox, k: f64) -> bool {
    oracle_translates(t).iter().all(|&x| !oracle_translate_fails(t, x, k))
}

/// Smallest passing k by bisection on a monotone predicate.
pub fn threshold(lo: f64, hi: f64, rel: f64, pass: impl Fn(f64) -> bool) -> (f64, f64) {
    let (mut lo, mut hi) = (lo, hi);
    assert!(pass(hi));
    while hi / lo > 1.0 + rel {
        let mid = (lo * hi).sqrt();
        if pass(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo, hi)
}

/// Frame whose horocycle circle is a slice of a synthetic grid carpet, with
/// both geodesic endpoints on bridge endpoints of the extracted Cantor set.
///
/// The cloud samples the carpet along the slice at chordal spacing well below `eps`.
pub struct CarpetFrame {
    pub carpet: hypcircle::carpet::DiskFamily,
    pub cantor: hypcircle::slicer::CantorApprox,
    pub frame: hypcircle::flows::Frame,
    pub cloud: hypcircle::kleinian::LimitSetApprox,
    pub stop: hypcircle::slicer::StopRule,
}

pub fn carpet_frame(seed: u64, samples: usize) -> CarpetFrame {
    use hypcircle::carpet::{slice_circle, synth_carpet, CarpetStyle};
    use hypcircle::flows::Frame;
    use hypcircle::kleinian::LimitSetApprox;
    use hypcircle::slicer::{extract_cantor, StopRule};
    use hypcircle::{MoebiusMap, OrientedCircle};
    use rand::{Rng, SeedableRng};

    let carpet = synth_carpet(CarpetStyle::Grid, 2, 0.3).unwrap();
    let stop = StopRule { eps: 1e-3, max_bridges: 120 };
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let (circle, cantor) = loop {
        let center = Complex64::new(rng.gen_range(0.2..0.8), rng.gen_range(0.2..0.8));
        let circle = OrientedCircle::disk_boundary(center, rng.gen_range(0.1..0.5)).unwrap();
        if let Ok(ca) = extract_cantor(&slice_circle(&carpet, &circle), &stop) {
            if ca.bridges.len() >= 8 {
                break (circle, ca);
            }
        }
    };
    let b0 = &cantor.bridges[0];
    let b1 = &cantor.bridges[1];
    let p = cantor.point_at(b0.start);
    let q = cantor.point_at(b1.end);
    let r = cantor.point_at(b0.end);
    let g = MoebiusMap::to_zero_one_inf(&p, &r, &q).unwrap().inverse();
    let mut pts: Vec<_> = (0..samples)
        .map(|j| circle.point_at(j as f64 * std::f64::consts::TAU / samples as f64))
        .filter(|z| !carpet.disks.iter().any(|d| d.contains(z)))
        .collect();
    pts.extend([p, q]);
    let cloud = LimitSetApprox::from_points(pts, 0.0).unwrap();
    CarpetFrame { carpet, cantor, frame: Frame::new(g), cloud, stop }
}

/// Limit set in the wedge `|arg z| <= pi/4`, together with `0` and `infinity`,
/// and the frame `z -> i z` whose horocycle crosses the wedge only at `0`.
pub fn divergent_toy() -> (hypcircle::flows::Frame, hypcircle::kleinian::LimitSetApprox) {
    use hypcircle::{MoebiusMap, SpherePoint};
    let mut pts = vec![SpherePoint::zero(), SpherePoint::infinity()];
    for i in -200..=200 {
        let r = 10f64.powf(i as f64 / 50.0);
        for j in -10..=10 {
            pts.push(SpherePoint::finite(Complex64::from_polar(r, j as f64 * PI / 40.0)));
        }
    }
    let rot = Complex64::from_polar(1.0, PI / 4.0);
    let g = MoebiusMap::new(rot, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), rot.conj()).unwrap();
    (hypcircle::flows::Frame::new(g), hypcircle::kleinian::LimitSetApprox::from_points(pts, 0.0).unwrap())
}
