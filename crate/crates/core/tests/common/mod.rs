#![allow(dead_code)]

use std::f64::consts::TAU;

use popuc::cauchy::Region;
use popuc::opuc::MeasureSpec;
use popuc::Complex64;
use proptest::prelude::*;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn unit(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta)
}

/// Verblunsky coefficients with modulus below `bound`.
pub fn alphas(len: std::ops::RangeInclusive<usize>, bound: f64) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((0.0..bound, 0.0..TAU), len)
        .prop_map(|v| v.into_iter().map(|(r, t)| Complex64::from_polar(r, t)).collect())
}

pub fn unimodular() -> impl Strategy<Value = Complex64> {
    (0.0..TAU).prop_map(unit)
}

pub fn complex_in(bound: f64) -> impl Strategy<Value = Complex64> {
    (-bound..bound, -bound..bound).prop_map(|(a, b)| c(a, b))
}

/// Unimodular points with a rotation and bounded jitter per slot.
pub fn stratified(n: std::ops::RangeInclusive<usize>, jitter: f64) -> impl Strategy<Value = Vec<Complex64>> {
    (0.0..TAU, prop::collection::vec(-jitter..jitter, n))
        .prop_map(|(rot, u)| popuc::sampling::stratified_circle_points(rot, &u))
}

/// The named measures in scope, including two sieved orders.
pub fn named_measures() -> Vec<(&'static str, MeasureSpec)> {
    vec![
        ("lebesgue", MeasureSpec::lebesgue()),
        ("bernstein_szego", MeasureSpec::bernstein_szego(c(0.5, 0.0)).unwrap()),
        ("sieved M=2", MeasureSpec::sieved(c(0.5, 0.0), 2).unwrap()),
        ("sieved M=3", MeasureSpec::sieved(c(0.5, 0.0), 3).unwrap()),
        ("single_moment", MeasureSpec::single_moment()),
    ]
}

pub const REGIONS: [Region; 2] = [Region::Exterior, Region::Interior];

/// Sample points for a region, rotated off the axes.
pub fn ring(radius: f64, count: usize, offset: f64) -> Vec<Complex64> {
    (0..count)
        .map(|k| Complex64::from_polar(radius, TAU * (k as f64 + offset) / count as f64))
        .collect()
}
