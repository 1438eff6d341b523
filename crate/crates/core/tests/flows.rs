mod common;

use hypcircle::flows::{
    geodesic_flow, horocycle_flow, in_rf, return_times, rfk_certificate, Frame, RfkParams,
};
use hypcircle::kleinian::{enumerate_words, limit_set_approx, GroupGenerators, LimitMethod, LimitSetApprox};
use hypcircle::slicer::StopRule;
use hypcircle::thickness::{is_globally_k_thick, k_from_modulus};
use hypcircle::{MoebiusMap, SpherePoint};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_frame(rng: &mut impl Rng) -> Frame {
    loop {
        let mut z = || c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        if let Some(m) = MoebiusMap::new(z(), z(), z(), z()) {
            if m.entries().iter().all(|e| e.norm() < 4.0) {
                return Frame::new(m);
            }
        }
    }
}

fn real_schottky() -> GroupGenerators {
    GroupGenerators::schottky(&[((c(-1.0, 0.0), 0.5), (c(1.0, 0.0), 0.5)), ((c(-3.0, 0.0), 0.5), (c(3.0, 0.0), 0.5))])
        .unwrap()
}

/// Frame along the axis of `m`, from its repelling to its attracting fixed point.
fn axis_frame(m: &MoebiusMap, third: &SpherePoint) -> Frame {
    let (attr, rep) = m.fixed_points().unwrap();
    Frame::new(MoebiusMap::to_zero_one_inf(&rep, third, &attr).unwrap().inverse())
}

fn params(window: f64, eta: f64, eps: f64) -> RfkParams {
    RfkParams { window, eta, eps, stop: StopRule { eps: 1e-3, max_bridges: 120 } }
}

#[test]
fn commutation_identity() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    for _ in 0..1000 {
        let (t, s) = (rng.gen_range(-1.0..1.0), rng.gen_range(-3.0..3.0));
        let x = random_frame(&mut rng);
        let lhs = horocycle_flow(&geodesic_flow(&x, t), s);
        let rhs = geodesic_flow(&horocycle_flow(&x, (2.0 * t).exp() * s), t);
        assert!(lhs.g.distance(&rhs.g) <= 1e-12, "t {t}, s {s}");
    }
}

#[test]
fn flows_are_one_parameter_groups() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
    for _ in 0..200 {
        let x = random_frame(&mut rng);
        let (t, s) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let a = geodesic_flow(&geodesic_flow(&x, t), s);
        assert!(a.g.distance(&geodesic_flow(&x, t + s).g) <= 1e-12);
        let n = horocycle_flow(&horocycle_flow(&x, t), s);
        assert!(n.g.distance(&horocycle_flow(&x, t + s).g) <= 1e-12);
        assert_eq!(geodesic_flow(&x, 0.0).g, x.g);
        assert_eq!(horocycle_flow(&x, 0.0).g, x.g);
    }
}

#[test]
fn endpoints_under_flows() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let x = random_frame(&mut rng);
        let t = rng.gen_range(-2.0..2.0);
        let y = geodesic_flow(&x, t);
        assert!(y.backward().approx_eq(&x.backward(), 1e-12));
        assert!(y.forward().approx_eq(&x.forward(), 1e-12));
        let s = rng.gen_range(-3.0..3.0);
        let z = horocycle_flow(&x, s);
        assert!(z.forward().approx_eq(&x.forward(), 1e-12));
        assert!(z.backward().approx_eq(&x.g.apply(&SpherePoint::real(s)), 1e-12));
    }
}

#[test]
fn flows_commute_with_left_translation() {
    let g = real_schottky();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
    let x = random_frame(&mut rng);
    for w in enumerate_words(&g, 3) {
        let (t, s) = (rng.gen_range(-1.0..1.0), rng.gen_range(-2.0..2.0));
        let moved = horocycle_flow(&geodesic_flow(&x.left(&w.map), t), s);
        let img = horocycle_flow(&geodesic_flow(&x, t), s);
        assert!(moved.backward().approx_eq(&w.map.apply(&img.backward()), 1e-9));
        assert!(moved.forward().approx_eq(&w.map.apply(&img.forward()), 1e-9));
    }
}

#[test]
fn axis_frames_are_in_rf_and_gap_frames_are_not() {
    let g = real_schottky();
    let lam = limit_set_approx(&g, 6, LimitMethod::FixedPoints).unwrap();
    let third = SpherePoint::real(0.0);
    for w in enumerate_words(&g, 3).iter().filter(|w| !w.is_empty()) {
        let x = axis_frame(&w.map, &third);
        assert!(in_rf(&x, &lam, 1e-9), "{}", w.letters);
    }
    // Forward endpoint at 0, midway between the pairing disks at -1 and 1.
    let x = Frame::new(MoebiusMap::from_real(0.0, -1.0, 1.0, 0.0).unwrap());
    assert!(x.forward().approx_eq(&SpherePoint::zero(), 1e-15));
    assert!(lam.distance_to(&x.forward()) > 0.1);
    assert!(!in_rf(&x, &lam, 1e-3));
    let rt = return_times(&x, &lam, 10.0, 1e-3, 1e-3).unwrap();
    assert!(!rt.forward_in_cloud && rt.intervals.is_empty());
}

#[test]
fn in_rf_is_a_invariant() {
    let g = real_schottky();
    let lam = limit_set_approx(&g, 5, LimitMethod::FixedPoints).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    let words = enumerate_words(&g, 3);
    for i in 0..300 {
        let x = if i % 2 == 0 {
            let w = &words[rng.gen_range(1..words.len())];
            axis_frame(&w.map, &SpherePoint::finite(c(rng.gen_range(-1.0..1.0), 1.0)))
        } else {
            random_frame(&mut rng)
        };
        let eps = 1e-6;
        let base = in_rf(&x, &lam, eps);
        for t in [-5.0, -1.0, 0.3, 2.0, 7.0] {
            assert_eq!(in_rf(&geodesic_flow(&x, t), &lam, eps), base);
        }
    }
}

#[test]
fn sampled_real_line_gives_full_window() {
    let mut pts: Vec<SpherePoint> = (1..2000)
        .map(|j| SpherePoint::real((std::f64::consts::PI * (j as f64 / 2000.0 - 0.5)).tan()))
        .collect();
    pts.push(SpherePoint::infinity());
    let lam = LimitSetApprox::from_points(pts, 0.0).unwrap();
    let rt = return_times(&Frame::base(), &lam, 100.0, 1e-3, 1e-2).unwrap();
    assert_eq!(rt.intervals, vec![(-100.0, 100.0)]);
}

/// Axis frame of the generator `a` of the real Schottky group, with its cloud.
fn schottky_axis() -> (Frame, LimitSetApprox) {
    let g = real_schottky();
    let lam = limit_set_approx(&g, 6, LimitMethod::FixedPoints).unwrap();
    (axis_frame(&g.generators[0], &SpherePoint::real(0.0)), lam)
}

#[test]
fn schottky_return_times_match_brute_force() {
    let (x, lam) = schottky_axis();
    let (window, eta, eps) = (3.0, 1e-3, 1e-3);
    let rt = return_times(&x, &lam, window, eta, eps).unwrap();
    let longest = rt.intervals.iter().map(|iv| iv.1 - iv.0).fold(0.0, f64::max);
    println!("{} intervals, longest {longest}", rt.intervals.len());
    assert!(rt.contains(0.0));
    assert!(rt.intervals.len() > 10 && longest < 0.1 * window);
    let dist = |s: f64| lam.distance_to(&x.g.apply(&SpherePoint::real(s)));
    let step = eta / 10.0;
    let n = (2.0 * window / step) as i64;
    for j in 0..=n {
        let s = -window + j as f64 * step;
        let d = dist(s);
        if d <= eps * (1.0 - 1e-9) {
            assert!(rt.contains(s), "s = {s}");
        } else if rt.contains(s) && d > eps {
            let near = (-100..=100).any(|i| dist(s + i as f64 * eta / 200.0) <= eps * 1.01);
            assert!(near, "s = {s} is not within eta/2 of a return");
        }
    }
}

#[test]
fn geodesic_flow_rescales_return_times() {
    let (x, lam) = schottky_axis();
    let (window, eta, eps) = (3.0, 1e-3, 1e-3);
    let rt = return_times(&x, &lam, window, eta, eps).unwrap();
    for t in [-0.7f64, 0.25, 1.0] {
        let f = (-2.0 * t).exp();
        let moved = return_times(&geodesic_flow(&x, t), &lam, f * window, f * eta, eps).unwrap();
        assert_eq!(moved.intervals.len(), rt.intervals.len(), "t = {t}");
        for (a, b) in moved.intervals.iter().zip(&rt.intervals) {
            assert!((a.0 - f * b.0).abs() <= f * eta && (a.1 - f * b.1).abs() <= f * eta);
        }
    }
}

#[test]
fn certificate_brackets_threshold() {
    let (x, lam) = schottky_axis();
    let p = params(3.0, 1e-3, 1e-3);
    let t = return_times(&x, &lam, p.window, p.eta, p.eps).unwrap().thick_set().unwrap();
    let (lo, hi) = common::threshold(1.0 + 1e-6, 1e6, 1e-3, |k| is_globally_k_thick(&t, k).unwrap());
    println!("return-time threshold in [{lo}, {hi}]");
    assert!(rfk_certificate(&x, &lam, hi * 1.01, &p, None).unwrap().pass);
    let fail = rfk_certificate(&x, &lam, lo * 0.99, &p, None).unwrap();
    assert!(!fail.pass);
    let w = fail.candidates[0].witness.unwrap();
    assert!(!common::hits(&t.intervals, w.translate, w.scale, lo * 0.99));
}

#[test]
fn certificate_requires_rf() {
    let (_, lam) = schottky_axis();
    let x = Frame::new(MoebiusMap::from_real(0.0, -1.0, 1.0, 0.0).unwrap());
    let err = rfk_certificate(&x, &lam, 3.0, &params(3.0, 1e-3, 1e-3), None).unwrap_err();
    assert_eq!(err, hypcircle::Error::NotInRF);
}

#[test]
fn carpet_frames_certify_at_k_of_delta() {
    for seed in 0..10 {
        let cf = common::carpet_frame(seed, 40_000);
        let delta = cf.cantor.delta.unwrap();
        let k = k_from_modulus(delta).unwrap();
        let p = RfkParams { window: 100.0, eta: 1e-4, eps: 1e-3, stop: cf.stop };
        assert!(in_rf(&cf.frame, &cf.cloud, p.eps));
        let rep = rfk_certificate(&cf.frame, &cf.cloud, k, &p, Some(&cf.carpet)).unwrap();
        let residual = rep.candidates.iter().find(|o| o.name == "cantor-residual").unwrap();
        println!("seed {seed}: delta {delta:.4}, k {k:.2}, {:?}", rep.candidates);
        assert!(residual.contains_zero && residual.pass, "seed {seed}");
        let kset = rep.certified_set.unwrap();
        assert!(kset.contains(0.0) && kset.intervals.len() >= 3);
        for iv in &kset.intervals {
            assert!(rep.return_times.contains(iv.0) && rep.return_times.contains(iv.1));
        }
    }
}

#[test]
fn divergent_horocycle_fails_for_every_k() {
    let (x, lam) = common::divergent_toy();
    let p = params(100.0, 1e-3, 1e-3);
    assert!(in_rf(&x, &lam, p.eps));
    let rt = return_times(&x, &lam, p.window, p.eta, p.eps).unwrap();
    println!("{:?}", rt.intervals);
    assert!(rt.contains(0.0));
    assert!(rt.intervals.iter().all(|iv| iv.0.abs().max(iv.1.abs()) < 0.01));
    for k in [1.5, 2.0, 3.0, 5.0, 10.0] {
        assert!(!rfk_certificate(&x, &lam, k, &p, None).unwrap().pass, "k = {k}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn commutation_holds_for_random_frames(seed in 0u64..100_000, t in -1.5f64..1.5, s in -4.0f64..4.0) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let x = random_frame(&mut rng);
        let lhs = horocycle_flow(&geodesic_flow(&x, t), s);
        let rhs = geodesic_flow(&horocycle_flow(&x, (2.0 * t).exp() * s), t);
        let scale = 1.0 + lhs.g.entries().iter().map(|e| e.norm()).fold(0.0, f64::max);
        prop_assert!(lhs.g.distance(&rhs.g) <= 1e-13 * scale);
    }
}
