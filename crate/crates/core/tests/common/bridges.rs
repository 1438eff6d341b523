//! Brute-force bridge selection and structural checks for Cantor approximations.

use std::f64::consts::{PI, TAU};

use hypcircle::carpet::{GapArc, LabeledGapSystem};
use hypcircle::slicer::{pair_ratio, ArcEnd, CantorApprox, EndpointRef, StopRule};
use hypcircle::{Error, OrientedCircle};

#[derive(Clone, Copy, Debug)]
struct Pt {
    angle: f64,
    label: usize,
    r: EndpointRef,
}

#[derive(Clone, Copy, Debug)]
struct Br {
    a: Pt,
    b: Pt,
}

pub fn ccw(from: f64, to: f64) -> f64 {
    (to - from).rem_euclid(TAU)
}

/// Brute-force greedy over the explicit list of all bridges.
pub fn oracle(arcs: &[GapArc]) -> Result<Vec<(EndpointRef, EndpointRef, usize)>, Error> {
    if arcs.is_empty() {
        return Ok(vec![]);
    }
    let mut pts = Vec::new();
    for (k, a) in arcs.iter().enumerate() {
        pts.push(Pt { angle: a.start, label: a.label, r: EndpointRef { arc: k, end: ArcEnd::Start } });
        pts.push(Pt { angle: a.end, label: a.label, r: EndpointRef { arc: k, end: ArcEnd::End } });
    }
    let mut all = Vec::new();
    for p in &pts {
        for q in &pts {
            if p.label == q.label && p.r != q.r {
                all.push(Br { a: *p, b: *q });
            }
        }
    }
    let len = |x: &Br, ang: &dyn Fn(&Pt) -> f64| ccw(ang(&x.a), ang(&x.b));
    let disjoint = |x: &Br, y: &Br, ang: &dyn Fn(&Pt) -> f64| {
        let off = ccw(ang(&x.b), ang(&y.a));
        off > 0.0 && off + len(y, ang) < TAU - len(x, ang)
    };
    let tie = 1e-10;
    let best = |cands: Vec<Br>, ang: &dyn Fn(&Pt) -> f64| -> Option<Br> {
        let mut out: Option<Br> = None;
        for c in cands {
            out = match out {
                None => Some(c),
                Some(o) => {
                    let (lc, lo) = (len(&c, ang), len(&o, ang));
                    if lc > lo + tie || ((lc - lo).abs() <= tie && ang(&c.a) < ang(&o.a)) {
                        Some(c)
                    } else {
                        Some(o)
                    }
                }
            }
        }
        out
    };

    let raw = |p: &Pt| p.angle;
    let admits: Vec<Br> = all
        .iter()
        .filter(|x| all.iter().any(|y| y.a.label != x.a.label && disjoint(x, y, &raw)))
        .copied()
        .collect();
    let first = best(admits, &raw).ok_or(Error::NoBridge)?;

    // Stretch about the midpoint in the half-angle tangent coordinate.
    let l1 = len(&first, &raw);
    let (mid, scale) = if l1 <= PI {
        let m = first.a.angle + 0.5 * l1;
        (m, (PI / 3.0).tan() / (l1 / 4.0).tan())
    } else {
        (0.0, 1.0)
    };
    let norm = move |p: &Pt| {
        if scale == 1.0 {
            return p.angle;
        }
        let mut d = (p.angle - mid).rem_euclid(TAU);
        if d > PI {
            d -= TAU;
        }
        (mid + 2.0 * (scale * (0.5 * d).tan()).atan()).rem_euclid(TAU)
    };

    let second = best(
        all.iter().filter(|y| y.a.label != first.a.label && disjoint(&first, y, &norm)).copied().collect(),
        &norm,
    )
    .expect("first bridge admits a partner");
    let contains = |big: &Br, small: &Br| {
        let off = ccw(norm(&big.a), norm(&small.a));
        off + len(small, &norm) <= len(big, &norm) + 1e-12 && (off == 0.0 || off < len(big, &norm))
    };
    let first = best(
        all.iter()
            .filter(|x| x.a.label == first.a.label && contains(x, &first) && disjoint(x, &second, &norm))
            .copied()
            .collect(),
        &norm,
    )
    .unwrap();
    let mut chosen = vec![first, second];
    loop {
        let cands: Vec<Br> = all
            .iter()
            .filter(|x| chosen.iter().all(|c| disjoint(c, x, &norm)))
            .copied()
            .collect();
        match best(cands, &norm) {
            Some(c) => chosen.push(c),
            None => break,
        }
    }
    Ok(chosen.iter().map(|c| (c.a.r, c.b.r, c.a.label)).collect())
}

pub fn summarize(ca: &CantorApprox) -> Vec<(EndpointRef, EndpointRef, usize)> {
    ca.bridges.iter().map(|b| (b.from, b.to, b.label)).collect()
}

pub fn exhaustive_rule() -> StopRule {
    StopRule { eps: 0.0, max_bridges: usize::MAX }
}

pub fn micro_corpus() -> Vec<LabeledGapSystem> {
    let mut out = Vec::new();
    for mask in 0u32..256 {
        let slots: Vec<u32> = (0..8).filter(|j| mask & (1 << j) != 0).collect();
        if slots.len() > 6 {
            continue;
        }
        let combos = 3usize.pow(slots.len() as u32);
        for code in 0..combos {
            let mut c = code;
            let arcs: Vec<GapArc> = slots
                .iter()
                .map(|&j| {
                    let label = c % 3;
                    c /= 3;
                    let start = (45.0 * j as f64).to_radians();
                    let len = (5.0 + 5.0 * (j % 3) as f64).to_radians();
                    GapArc::new(start, start + len, label)
                })
                .collect();
            out.push(LabeledGapSystem::new(OrientedCircle::unit(), arcs).unwrap());
        }
    }
    out
}

pub fn check_structure(ca: &CantorApprox) {
    let b = &ca.bridges;
    for w in b.windows(2) {
        assert!(w[0].length() >= w[1].length() - 1e-10, "lengths not monotone");
    }
    let mut sorted = b.clone();
    sorted.sort_by(|x, y| x.start.total_cmp(&y.start));
    let n = sorted.len();
    for k in 0..n {
        let x = &sorted[k];
        let y = &sorted[(k + 1) % n];
        if n > 1 {
            assert!(ccw(x.end, y.start) > 0.0, "closures meet");
        }
    }
    let total: f64 = b.iter().map(|x| x.length()).sum::<f64>() + ca.residual.iter().map(|r| r.length).sum::<f64>();
    assert!((total - TAU).abs() < 1e-9);
    assert!(ca.residual.iter().all(|r| r.length > 0.0));
    for k in 2..b.len() {
        let (a, c, d) = (b[0].label, b[1].label, b[k].label);
        assert!(a != c && c != d && a != d, "bridge {k} repeats a type of I_1 or I_2");
    }
}

/// Checks the same-type ratio bound; returns the number of labels shared by two bridges.
pub fn same_type_pairs(ca: &CantorApprox) -> usize {
    let b = &ca.bridges;
    let mut shared = 0;
    for i in 0..b.len() {
        for j in (i + 1)..b.len() {
            if b[i].label == b[j].label {
                shared += 1;
                let t = pair_ratio(&b[i], &b[j]);
                assert!(t >= 1.0 - 1e-12, "same-type ratio {t}");
            }
        }
    }
    shared
}
