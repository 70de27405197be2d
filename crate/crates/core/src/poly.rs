//! Dense complex polynomials.
//!
//! Coefficients are stored in ascending degree. Trailing coefficients whose
//! magnitude falls below [`TRIM_TOL`] times the largest coefficient are
//! dropped on construction, so the stored leading coefficient is never dust.

use std::f64::consts::TAU;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative threshold below which trailing coefficients are discarded.
pub const TRIM_TOL: f64 = 1e-13;

/// Relative threshold below which low-order coefficients count as zero roots
/// in [`ComplexPoly::roots`].
const ZERO_ROOT_TOL: f64 = 1e-14;

const ABERTH_MAX_ITER: usize = 1000;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "Vec<Complex64>", into = "Vec<Complex64>")]
pub struct ComplexPoly {
    coeffs: Vec<Complex64>,
}

impl From<Vec<Complex64>> for ComplexPoly {
    fn from(coeffs: Vec<Complex64>) -> Self {
        ComplexPoly::new(coeffs)
    }
}

impl From<ComplexPoly> for Vec<Complex64> {
    fn from(p: ComplexPoly) -> Self {
        p.coeffs
    }
}

impl ComplexPoly {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        trim(&mut coeffs);
        ComplexPoly { coeffs }
    }

    /// Builds a polynomial without the relative trimming pass; only exact
    /// trailing zeros are removed.
    pub(crate) fn from_exact(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.last().is_some_and(|c| *c == Complex64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        ComplexPoly { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        ComplexPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Complex64::new(1.0, 0.0))
    }

    pub fn constant(c: Complex64) -> Self {
        Self::from_exact(vec![c])
    }

    /// `c * z^k`.
    pub fn monomial(c: Complex64, k: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); k + 1];
        coeffs[k] = c;
        Self::from_exact(coeffs)
    }

    /// The monic polynomial with the given roots (repeated by multiplicity).
    pub fn from_roots(roots: &[Complex64]) -> Self {
        let mut coeffs = vec![Complex64::new(1.0, 0.0)];
        for &r in roots {
            coeffs.push(Complex64::new(0.0, 0.0));
            for k in (1..coeffs.len()).rev() {
                coeffs[k] = coeffs[k - 1] - r * coeffs[k];
            }
            coeffs[0] *= -r;
        }
        ComplexPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> Complex64 {
        self.coeffs.last().copied().unwrap_or_default()
    }

    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Value and first derivative at `z`.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let zero = Complex64::new(0.0, 0.0);
        let mut p = zero;
        let mut dp = zero;
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| c * k as f64)
            .collect();
        Self::from_exact(coeffs)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::from_exact(self.coeffs.iter().map(|&a| a * c).collect())
    }

    /// Multiplies by `z^k`.
    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Complex64::new(0.0, 0.0); k];
        coeffs.extend_from_slice(&self.coeffs);
        ComplexPoly { coeffs }
    }

    /// Coefficientwise complex conjugate.
    pub fn conj(&self) -> Self {
        ComplexPoly {
            coeffs: self.coeffs.iter().map(|c| c.conj()).collect(),
        }
    }

    /// `z^n * conj(p(1/conj(z)))`: conjugate-reverse of the coefficients
    /// padded to the declared degree `n`.
    pub fn reversed_star(&self, n: usize) -> Result<Self> {
        if !self.is_zero() && n < self.degree() {
            return Err(Error::InvalidDeclaredDegree {
                declared: n,
                actual: self.degree(),
            });
        }
        let coeffs = (0..=n).map(|k| self.coeff(n - k).conj()).collect();
        Ok(Self::from_exact(coeffs))
    }

    /// Synthetic division by `(z - x)`: returns the quotient and remainder.
    pub fn deflate(&self, x: Complex64) -> (Self, Complex64) {
        if self.coeffs.is_empty() {
            return (Self::zero(), Complex64::new(0.0, 0.0));
        }
        let d = self.coeffs.len() - 1;
        let mut q = vec![Complex64::new(0.0, 0.0); d];
        let mut acc = Complex64::new(0.0, 0.0);
        for k in (0..=d).rev() {
            acc = acc * x + self.coeffs[k];
            if k > 0 {
                q[k - 1] = acc;
            }
        }
        (Self::from_exact(q), acc)
    }

    /// Coefficients of `p(x + t)` as a polynomial in `t`.
    pub fn taylor_shift(&self, x: Complex64) -> Self {
        let mut c = self.coeffs.clone();
        let n = c.len();
        for i in 0..n {
            for k in (i..n.saturating_sub(1)).rev() {
                let next = c[k + 1];
                c[k] += x * next;
            }
        }
        Self::from_exact(c)
    }

    /// Euclidean division: `self = q * d + r` with `deg r < deg d`.
    pub fn div_rem(&self, d: &ComplexPoly) -> Result<(Self, Self)> {
        if d.is_zero() {
            return Err(Error::DivideByZero);
        }
        if self.coeffs.len() < d.coeffs.len() {
            return Ok((Self::zero(), self.clone()));
        }
        let dl = d.leading();
        let dd = d.degree();
        let mut r = self.coeffs.clone();
        let mut q = vec![Complex64::new(0.0, 0.0); r.len() - dd];
        for k in (0..q.len()).rev() {
            let t = r[k + dd] / dl;
            q[k] = t;
            for (j, &dc) in d.coeffs.iter().enumerate() {
                r[k + j] -= t * dc;
            }
            r[k + dd] = Complex64::new(0.0, 0.0);
        }
        r.truncate(dd);
        Ok((Self::from_exact(q), Self::from_exact(r)))
    }

    /// All roots with multiplicity, sorted by principal argument in
    /// `[0, 2pi)` and then by modulus.
    ///
    /// Low-order coefficients below `1e-14` of the largest coefficient are
    /// read as exact zero roots; the rest are found by Aberth-Ehrlich
    /// iteration followed by Newton polishing.
    pub fn roots(&self) -> Result<Vec<Complex64>> {
        if self.is_zero() {
            return Err(Error::UndefinedRoots);
        }
        let scale = self.max_abs();
        let zeros = self
            .coeffs
            .iter()
            .take_while(|c| c.norm() <= ZERO_ROOT_TOL * scale)
            .count()
            .min(self.degree());
        let reduced = ComplexPoly::from_exact(self.coeffs[zeros..].to_vec());
        let mut roots = vec![Complex64::new(0.0, 0.0); zeros];
        roots.extend(aberth(&reduced));
        sort_roots(&mut roots);
        Ok(roots)
    }
}

fn trim(coeffs: &mut Vec<Complex64>) {
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if scale == 0.0 || !scale.is_finite() {
        if scale == 0.0 {
            coeffs.clear();
        }
        return;
    }
    while coeffs.last().is_some_and(|c| c.norm() <= TRIM_TOL * scale) {
        coeffs.pop();
    }
}

/// Sort key: argument quantized to 1e-11 rad (with 2pi folded onto 0), then
/// modulus. Quantizing keeps the order total while treating rounding-level
/// argument differences as ties.
pub fn sort_roots(roots: &mut [Complex64]) {
    roots.sort_by(|a, b| {
        root_key(*a)
            .partial_cmp(&root_key(*b))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
}

pub(crate) fn root_key(z: Complex64) -> (i64, f64) {
    let mut arg = z.arg();
    if arg < 0.0 {
        arg += TAU;
    }
    let mut q = (arg * 1e11).round() as i64;
    if q >= (TAU * 1e11).round() as i64 {
        q = 0;
    }
    if z.norm() == 0.0 {
        q = 0;
    }
    (q, z.norm())
}

fn aberth(p: &ComplexPoly) -> Vec<Complex64> {
    let deg = p.degree();
    if deg == 0 {
        return Vec::new();
    }
    let lead = p.leading();
    if deg == 1 {
        return vec![-p.coeff(0) / lead];
    }
    let monic = p.scale(lead.inv());
    let dmonic = monic.derivative();

    let radius = 1.0
        + monic.coeffs[..deg]
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| Complex64::from_polar(radius, TAU * k as f64 / deg as f64 + 0.4))
        .collect();
    let mut done = vec![false; deg];

    for _ in 0..ABERTH_MAX_ITER {
        let mut all_done = true;
        for i in 0..deg {
            if done[i] {
                continue;
            }
            let zi = z[i];
            let pv = monic.eval(zi);
            if pv == Complex64::new(0.0, 0.0) {
                done[i] = true;
                continue;
            }
            let dv = dmonic.eval(zi);
            let ratio = pv / dv;
            let sum: Complex64 = (0..deg)
                .filter(|&j| j != i)
                .map(|j| {
                    let d = zi - z[j];
                    if d == Complex64::new(0.0, 0.0) {
                        Complex64::new(0.0, 0.0)
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let denom = Complex64::new(1.0, 0.0) - ratio * sum;
            let w = if dv == Complex64::new(0.0, 0.0) || !ratio.is_finite() {
                // stationary point: nudge off it
                Complex64::new(1e-3 * (1.0 + zi.norm()), 1e-3)
            } else if denom == Complex64::new(0.0, 0.0) {
                ratio
            } else {
                ratio / denom
            };
            z[i] = zi - w;
            if w.norm() <= 4.0 * f64::EPSILON * (1.0 + z[i].norm()) {
                done[i] = true;
            } else {
                all_done = false;
            }
        }
        if all_done {
            break;
        }
    }

    // Newton polish against the original coefficients
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let (v, dv) = monic.eval_with_derivative(*zi);
            if dv == Complex64::new(0.0, 0.0) {
                break;
            }
            let cand = *zi - v / dv;
            if monic.eval(cand).norm() < v.norm() {
                *zi = cand;
            } else {
                break;
            }
        }
    }
    z
}

/// Groups nearly coincident roots into `(root, multiplicity)` pairs. Roots
/// closer than `tol * (1 + |r|)` to a cluster's first member join it; the
/// cluster location is the mean of its members.
pub fn cluster_roots(roots: &[Complex64], tol: f64) -> Vec<(Complex64, usize)> {
    let mut clusters: Vec<(Complex64, Vec<Complex64>)> = Vec::new();
    for &r in roots {
        match clusters
            .iter_mut()
            .find(|(anchor, _)| (anchor - r).norm() < tol * (1.0 + r.norm()))
        {
            Some((_, members)) => members.push(r),
            None => clusters.push((r, vec![r])),
        }
    }
    clusters
        .into_iter()
        .map(|(_, members)| {
            let m = members.len();
            let mean = members.iter().sum::<Complex64>() / m as f64;
            (mean, m)
        })
        .collect()
}

fn add_coeffs(a: &[Complex64], b: &[Complex64], sign: f64) -> Vec<Complex64> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|k| {
            let x = a.get(k).copied().unwrap_or_default();
            let y = b.get(k).copied().unwrap_or_default();
            x + y * sign
        })
        .collect()
}

pub(crate) fn mul_coeffs(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

impl Add for &ComplexPoly {
    type Output = ComplexPoly;
    fn add(self, rhs: &ComplexPoly) -> ComplexPoly {
        ComplexPoly::new(add_coeffs(&self.coeffs, &rhs.coeffs, 1.0))
    }
}

impl Sub for &ComplexPoly {
    type Output = ComplexPoly;
    fn sub(self, rhs: &ComplexPoly) -> ComplexPoly {
        ComplexPoly::new(add_coeffs(&self.coeffs, &rhs.coeffs, -1.0))
    }
}

impl Mul for &ComplexPoly {
    type Output = ComplexPoly;
    fn mul(self, rhs: &ComplexPoly) -> ComplexPoly {
        ComplexPoly::from_exact(mul_coeffs(&self.coeffs, &rhs.coeffs))
    }
}

impl Neg for &ComplexPoly {
    type Output = ComplexPoly;
    fn neg(self) -> ComplexPoly {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for ComplexPoly {
            type Output = ComplexPoly;
            fn $m(self, rhs: ComplexPoly) -> ComplexPoly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

const DISPLAY_DUST: f64 = 1e-14;

impl fmt::Display for ComplexPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        // rounding dust from cancellation is left out of the text
        let dust = DISPLAY_DUST * self.max_abs();
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.norm() <= dust {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({})", crate::fmt_complex(*c))?;
            match k {
                0 => {}
                1 => write!(f, "z")?,
                _ => write!(f, "z^{k}")?,
            }
        }
        Ok(())
    }
}
