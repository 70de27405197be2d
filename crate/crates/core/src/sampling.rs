//! Deterministic sample points for identity checks.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::cauchy::Region;
use crate::ratfun::RationalFn;

/// Minimum distance kept between a sample and any pole.
pub const POLE_CLEARANCE: f64 = 1e-3;

const ANGLE_OFFSET: f64 = 0.37;

/// `count` points equally spaced on `|z| = radius`, rotated off the axes.
pub fn circle_points(radius: f64, count: usize) -> Vec<Complex64> {
    (0..count)
        .map(|k| Complex64::from_polar(radius, TAU * (k as f64 + ANGLE_OFFSET) / count as f64))
        .collect()
}

/// Up to `count` points on the region's sample circle, each nudged along
/// the circle until it clears every pole of `avoid` by [`POLE_CLEARANCE`].
/// Points that cannot be cleared are dropped.
pub fn region_samples(region: Region, count: usize, avoid: &[&RationalFn]) -> Vec<Complex64> {
    let radius = region.sample_radius();
    let step = TAU / (count.max(1) as f64 * 64.0);
    let clear = |z: Complex64| {
        avoid
            .iter()
            .all(|f| f.poles().iter().all(|p| (z - p.location).norm() >= POLE_CLEARANCE))
    };
    circle_points(radius, count)
        .into_iter()
        .filter_map(|z| {
            (0..32)
                .map(|j| z * Complex64::from_polar(1.0, step * j as f64))
                .find(|&w| clear(w))
        })
        .collect()
}

/// Unimodular points `e^{i(rotation + 2 pi (k + jitter_k) / n)}` with
/// `n = jitter.len()`. Jitters in `(-1/2, 1/2)` keep the points distinct
/// and in angular order; keeping them well inside that range keeps the
/// generators they induce away from the points.
pub fn stratified_circle_points(rotation: f64, jitter: &[f64]) -> Vec<Complex64> {
    let n = jitter.len() as f64;
    jitter
        .iter()
        .enumerate()
        .map(|(k, u)| Complex64::from_polar(1.0, rotation + TAU * (k as f64 + u) / n))
        .collect()
}
