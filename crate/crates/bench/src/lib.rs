//! Fixtures shared by the benchmarks.

use hypcircle::carpet::{slice_circle, synth_carpet, CarpetStyle, LabeledGapSystem};
use hypcircle::kleinian::GroupGenerators;
use num_complex::Complex64;

/// Classical Schottky group on two pairs of disjoint disks.
pub fn schottky_pair() -> GroupGenerators {
    let z = |x: f64, y: f64| Complex64::new(x, y);
    GroupGenerators::schottky(&[((z(-2.0, 0.0), 0.8), (z(2.0, 0.0), 0.8)), ((z(0.0, -2.0), 0.8), (z(0.0, 2.0), 0.8))])
        .expect("disjoint pairing disks")
}

/// Gaps cut by a fixed circle through a grid carpet of the given depth.
pub fn grid_slice(depth: u32) -> LabeledGapSystem {
    let f = synth_carpet(CarpetStyle::Grid, depth, 0.3).expect("valid carpet");
    let c = hypcircle::OrientedCircle::disk_boundary(Complex64::new(0.5, 0.5), 0.45).expect("positive radius");
    slice_circle(&f, &c)
}
