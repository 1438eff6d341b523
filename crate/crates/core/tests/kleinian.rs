use std::collections::BTreeSet;

use hypcircle::kleinian::{
    enumerate_words, limit_set_approx, orbit_of_circle, reduced_word_count, separates_limit_set,
    stabilizer_search, GroupGenerators, LimitMethod, LimitSetApprox, OrbitClass, Separation,
};
use hypcircle::{Disk, MoebiusMap, OrientedCircle, SpherePoint};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Pairing disks centred at -1, 1 and -3, 3 with radius 1/2.
fn real_schottky() -> GroupGenerators {
    GroupGenerators::schottky(&[((c(-1.0, 0.0), 0.5), (c(1.0, 0.0), 0.5)), ((c(-3.0, 0.0), 0.5), (c(3.0, 0.0), 0.5))])
        .unwrap()
}

/// One real generator and one pairing disks off the real line.
fn mixed_schottky() -> GroupGenerators {
    GroupGenerators::schottky(&[((c(-1.0, 0.0), 0.5), (c(1.0, 0.0), 0.5)), ((c(0.0, -2.0), 0.5), (c(0.3, 2.0), 0.6))])
        .unwrap()
}

fn random_circle(rng: &mut impl Rng) -> OrientedCircle {
    let center = c(rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0));
    OrientedCircle::disk_boundary(center, rng.gen_range(0.2..3.0)).unwrap()
}

fn random_map(rng: &mut impl Rng) -> MoebiusMap {
    loop {
        let mut z = || c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        if let Some(m) = MoebiusMap::new(z(), z(), z(), z()) {
            let [a, b, cc, d] = m.entries();
            if [a, b, cc, d].iter().all(|x| x.norm() < 5.0) {
                return m;
            }
        }
    }
}

/// All reduced strings over `a, A, b, B` of length `n`, in alphabet order.
fn brute_words(n: usize) -> Vec<String> {
    let alphabet = ['a', 'A', 'b', 'B'];
    let mut out = Vec::new();
    for code in 0..4usize.pow(n as u32) {
        let mut x = code;
        let mut s: Vec<usize> = (0..n)
            .map(|_| {
                let d = x % 4;
                x /= 4;
                d
            })
            .collect();
        s.reverse();
        if s.windows(2).all(|w| w[0] ^ 1 != w[1]) {
            out.push(s.iter().map(|&i| alphabet[i]).collect());
        }
    }
    out
}

fn word_matrix(g: &GroupGenerators, w: &str) -> [Complex64; 4] {
    let mut m = [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
    for ch in w.chars() {
        let i = (ch.to_ascii_lowercase() as u8 - b'a') as usize;
        let [a, b, cc, d] = g.generators[i].entries();
        let x = if ch.is_ascii_uppercase() { [d, -b, -cc, a] } else { [a, b, cc, d] };
        m = [
            m[0] * x[0] + m[1] * x[2],
            m[0] * x[1] + m[1] * x[3],
            m[2] * x[0] + m[3] * x[2],
            m[2] * x[1] + m[3] * x[3],
        ];
    }
    m
}

#[test]
fn reduced_word_counts_and_order() {
    let g = real_schottky();
    let words = enumerate_words(&g, 6);
    for n in 0..=6 {
        let count = words.iter().filter(|w| w.len() == n).count();
        assert_eq!(count, if n == 0 { 1 } else { 4 * 3usize.pow(n as u32 - 1) });
        assert_eq!(count, reduced_word_count(2, n));
    }
    assert_eq!(enumerate_words(&g, 3).len(), 1 + 4 + 12 + 36);
    for n in 0..=4 {
        let got: Vec<String> = words.iter().filter(|w| w.len() == n).map(|w| w.letters.clone()).collect();
        let mut want = brute_words(n);
        let key = |s: &String| s.chars().map(|ch| "aAbB".find(ch).unwrap()).collect::<Vec<_>>();
        want.sort_by_key(key);
        assert_eq!(got, want);
    }
}

#[test]
fn word_maps_match_explicit_products() {
    let g = mixed_schottky();
    for w in enumerate_words(&g, 4) {
        let want = word_matrix(&g, &w.letters);
        let got = w.map.entries();
        let diff = |s: f64| want.iter().zip(&got).map(|(x, y)| (x - y * s).norm()).fold(0.0, f64::max);
        let scale = want.iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(diff(1.0).min(diff(-1.0)) < 1e-13 * scale, "{}", w.letters);
    }
}

fn pairing_disks(g: &GroupGenerators) -> Vec<Disk> {
    let pts = [(-1.0, 0.0), (1.0, 0.0), (-3.0, 0.0), (3.0, 0.0)];
    let _ = g;
    pts.iter().map(|&(x, y)| Disk::euclidean(c(x, y), 0.5).unwrap()).collect()
}

#[test]
fn schottky_cloud_is_confined_to_pairing_disks() {
    let g = real_schottky();
    let disks = pairing_disks(&g);
    for method in [LimitMethod::FixedPoints, LimitMethod::Orbit] {
        let lam = limit_set_approx(&g, 6, method).unwrap();
        assert!(lam.points.len() > 100);
        for p in &lam.points {
            assert!(disks.iter().any(|d| d.closure_contains(p, 1e-9)), "{method:?}: {p:?}");
        }
    }
}

#[test]
fn cloud_invariance_within_resolution() {
    let g = mixed_schottky();
    for method in [LimitMethod::FixedPoints, LimitMethod::Orbit] {
        let lam = limit_set_approx(&g, 6, method).unwrap();
        let r = lam.invariance_residual(&g);
        println!("{method:?}: {} points, resolution {}, residual {r}", lam.points.len(), lam.resolution);
        assert!(r <= lam.resolution);
        assert!(lam.resolution < 0.1);
    }
}

#[test]
fn clouds_grow_with_word_length() {
    let g = mixed_schottky();
    let mut prev: Option<LimitSetApprox> = None;
    for len in 2..=5 {
        let lam = limit_set_approx(&g, len, LimitMethod::FixedPoints).unwrap();
        if let Some(p) = &prev {
            for q in &p.points {
                assert!(lam.distance_to(q) <= 1e-9);
            }
            assert!(lam.points.len() > p.points.len());
        }
        prev = Some(lam);
    }
}

#[test]
fn circle_through_cluster_is_undecided_at_large_margin() {
    let center = SpherePoint::finite(c(1.0, 0.0));
    let cluster: Vec<SpherePoint> = (0..20)
        .map(|j| {
            let z = c(1.0, 0.0) + Complex64::from_polar(1e-3, j as f64);
            SpherePoint::finite(z)
        })
        .collect();
    let spread = cluster.iter().map(|p| p.chordal_distance(&center)).fold(0.0, f64::max);
    let lam = LimitSetApprox::from_points(cluster, 0.0).unwrap();
    let circle = OrientedCircle::unit();
    let mut verdicts = Vec::new();
    for margin in [0.0, 0.25 * spread, 0.5 * spread, 2.0 * spread, 10.0 * spread] {
        verdicts.push(separates_limit_set(&circle, &lam, margin));
    }
    assert_eq!(verdicts[0], Separation::Separates);
    assert_eq!(verdicts[3], Separation::Undecided);
    assert_eq!(verdicts[4], Separation::Undecided);
}

#[test]
fn real_generator_stabilizes_the_real_line() {
    let g = mixed_schottky();
    let found: BTreeSet<String> = stabilizer_search(&g, &OrientedCircle::real_line(), 3, 1e-8)
        .into_iter()
        .map(|w| w.letters)
        .collect();
    let want: BTreeSet<String> = ["", "a", "A", "aa", "AA", "aaa", "AAA"].iter().map(|s| s.to_string()).collect();
    assert_eq!(found, want);
}

#[test]
fn generic_circles_have_trivial_stabilizer() {
    let g = real_schottky();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let circle = random_circle(&mut rng);
        let found = stabilizer_search(&g, &circle, 4, 1e-8);
        assert_eq!(found.len(), 1);
        assert!(found[0].is_empty());
    }
}

#[test]
fn stabilizer_search_is_equivariant() {
    let g = mixed_schottky();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
    for _ in 0..5 {
        let w0 = random_map(&mut rng);
        let gc = g.conjugated(&w0).unwrap();
        let circle = OrientedCircle::real_line().mapped(&w0);
        let found: Vec<String> = stabilizer_search(&gc, &circle, 3, 1e-7).into_iter().map(|w| w.letters).collect();
        assert!(found.contains(&"a".to_string()) && found.contains(&"A".to_string()));
        assert!(found.iter().all(|w| w.chars().all(|ch| ch == 'a' || ch == 'A')));
    }
}

#[test]
fn stabilized_circle_has_orbit_of_size_one() {
    let g = real_schottky();
    let rep = orbit_of_circle(&g, &OrientedCircle::real_line(), 4, false);
    assert_eq!(rep.circles.len(), 1);
    assert_eq!(rep.classification, OrbitClass::DiscreteLooking);
}

#[test]
fn orientation_reversal_counts_once_when_unoriented() {
    let flip = MoebiusMap::new(c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -1.0)).unwrap();
    let g = GroupGenerators::new(vec![flip], None).unwrap();
    let line = OrientedCircle::real_line();
    assert_eq!(orbit_of_circle(&g, &line, 3, false).circles.len(), 2);
    assert_eq!(orbit_of_circle(&g, &line, 3, true).circles.len(), 1);
}

#[test]
fn generic_orbit_is_free_and_discrete_looking() {
    let g = real_schottky();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let circle = random_circle(&mut rng);
    let rep = orbit_of_circle(&g, &circle, 5, false);
    let words: usize = (0..=5).map(|n| reduced_word_count(2, n)).sum();
    assert_eq!(rep.circles.len(), words);
    assert_eq!(rep.min_distance.len(), 6);
    assert!(rep.min_distance.windows(2).all(|w| w[1] <= w[0]));
    println!("m_L = {:?}, {:?}", rep.min_distance, rep.classification);
    assert_eq!(rep.classification, OrbitClass::DiscreteLooking);

    // Conjugate inputs give the image orbit under the conjugating map.
    let w0 = random_map(&mut rng);
    let conj = orbit_of_circle(&g.conjugated(&w0).unwrap(), &circle.mapped(&w0), 5, false);
    assert_eq!(conj.words, rep.words);
    let mut worst: f64 = 0.0;
    for (a, b) in rep.circles.iter().zip(&conj.circles) {
        let (p, q) = (unit_plane(&a.mapped(&w0)), unit_plane(b));
        worst = worst.max(p.iter().zip(&q).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max));
    }
    println!("conjugated orbit: worst plane discrepancy {worst:e}");
    assert!(worst <= 1e-7);
}

/// Oriented plane of the circle on the unit sphere, scaled to unit length.
fn unit_plane(c: &OrientedCircle) -> [f64; 4] {
    let (n, h0) = c.sphere_plane();
    let s = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2] + h0 * h0).sqrt();
    [n[0] / s, n[1] / s, n[2] / s, h0 / s]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn separation_is_moebius_equivariant(seed in 0u64..10_000) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<SpherePoint> = (0..rng.gen_range(1..12))
            .map(|_| SpherePoint::finite(c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0))))
            .collect();
        let circle = random_circle(&mut rng);
        let m = random_map(&mut rng);
        let lam = LimitSetApprox::from_points(pts.clone(), 0.0).unwrap();
        let moved = LimitSetApprox::from_points(pts.iter().map(|p| m.apply(p)).collect(), 0.0).unwrap();
        prop_assert_eq!(
            separates_limit_set(&circle, &lam, 0.0),
            separates_limit_set(&circle.mapped(&m), &moved, 0.0)
        );
        // Rotations of the sphere preserve chordal distances, hence margins too.
        let (u, v) = (c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)), c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let rot = MoebiusMap::new(u, -v.conj(), v, u.conj()).unwrap();
        let rotated = LimitSetApprox::from_points(pts.iter().map(|p| rot.apply(p)).collect(), 0.0).unwrap();
        for margin in [0.01, 0.1, 0.5] {
            prop_assert_eq!(
                separates_limit_set(&circle, &lam, margin),
                separates_limit_set(&circle.mapped(&rot), &rotated, margin)
            );
        }
    }
}
