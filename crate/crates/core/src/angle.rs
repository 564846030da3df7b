//! Angle wrapping helpers.
//!
//! The convention everywhere is the half-open interval (-pi, pi].

use std::f64::consts::{PI, TAU};

/// Wraps an arbitrary angle into (-pi, pi].
pub fn wrap_angle(x: f64) -> f64 {
    let y = x.rem_euclid(TAU);
    if y > PI {
        y - TAU
    } else {
        y
    }
}

/// Wraps a difference of two already-wrapped angles into (-pi, pi].
///
/// The input must lie in (-2pi, 2pi), which holds for any difference of two
/// values in (-pi, pi]; a single branch correction then suffices and avoids
/// the rounding of a general modular reduction.
pub fn wrap_phase_diff(d: f64) -> f64 {
    if d > PI {
        d - TAU
    } else if d <= -PI {
        d + TAU
    } else {
        d
    }
}
