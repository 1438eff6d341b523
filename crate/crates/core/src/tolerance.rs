//! Centralized numerical tolerances.
//!
//! Every threshold used by the geometric kernels lives here. Operations that
//! accept a tolerance argument take it from a [`Tolerances`] record; the rest
//! use [`Tolerances::DEFAULT`].

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// A point lies on a circle when the normalized Hermitian form is below this.
    pub incidence: f64,
    /// Allowed |det - 1| for Moebius maps and |det + 1| for circles.
    pub normalization: f64,
    /// Two sphere points (chordal metric) are identified below this distance.
    pub point_merge: f64,
    /// Two circles (Frobenius distance of representatives) are identified below this.
    pub circle_merge: f64,
    /// Arcs shorter than this (radians) are dropped as tangencies.
    pub arc_min: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        incidence: 1e-10,
        normalization: 1e-12,
        point_merge: 1e-9,
        circle_merge: 1e-8,
        arc_min: 1e-12,
    };

    pub const STRICT: Tolerances = Tolerances {
        incidence: 1e-12,
        normalization: 1e-13,
        point_merge: 1e-11,
        circle_merge: 1e-10,
        arc_min: 1e-14,
    };

    pub fn by_name(name: &str) -> Option<Tolerances> {
        match name {
            "default" => Some(Self::DEFAULT),
            "strict" => Some(Self::STRICT),
            _ => None,
        }
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}
