//! Rational functions over complex coefficients.
//!
//! A [`RationalFn`] keeps its denominator factored as a list of distinct
//! poles with multiplicities; the expanded monic denominator is derived from
//! that list. The numerator carries a magnitude envelope: for every
//! coefficient, a bound on the sum of absolute values of the terms that were
//! added to produce it. Cancellation decisions (dust coefficients, common
//! numerator/denominator roots) are made against that envelope rather than
//! against the final coefficient values, so the same test works for exact
//! zeros at the origin and for approximate roots elsewhere.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{cluster_roots, mul_coeffs, root_key, ComplexPoly};

/// Poles closer than `POLE_MERGE_TOL * (1 + |x|)` are the same pole.
pub const POLE_MERGE_TOL: f64 = 1e-9;

/// A denominator root `x` cancels against the numerator when
/// `|N(x)| <= CANCEL_TOL * sum_k env_k |x|^k`.
pub const CANCEL_TOL: f64 = 1e-10;

/// A numerator coefficient is treated as an exact zero when it is below
/// `DUST_TOL` times its magnitude envelope.
pub const DUST_TOL: f64 = 1e-12;

/// Clustering radius used when factoring a polynomial numerically.
const ROOT_CLUSTER_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pole {
    pub location: Complex64,
    pub multiplicity: usize,
}

#[derive(Clone, Debug)]
pub struct RationalFn {
    num: ComplexPoly,
    env: Vec<f64>,
    poles: Vec<Pole>,
    den: ComplexPoly,
    num_roots: OnceLock<Vec<Pole>>,
}

/// One principal-part term `coeff / (z - pole)^order`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoleTerm {
    pub pole: Complex64,
    pub order: usize,
    pub coeff: Complex64,
    /// Bound on the magnitudes combined into `coeff`.
    #[serde(skip)]
    pub envelope: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartialFractions {
    pub polynomial: ComplexPoly,
    pub terms: Vec<PoleTerm>,
    #[serde(skip)]
    polynomial_envelope: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RatOp {
    Add,
    Sub,
    Mul,
    Div,
}

fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn abs_coeffs(p: &ComplexPoly) -> Vec<f64> {
    p.coeffs().iter().map(|c| c.norm()).collect()
}

fn conv_abs(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn add_abs(a: &[f64], b: &[f64]) -> Vec<f64> {
    (0..a.len().max(b.len()))
        .map(|k| a.get(k).copied().unwrap_or(0.0) + b.get(k).copied().unwrap_or(0.0))
        .collect()
}

fn linear_product(poles: &[Pole]) -> ComplexPoly {
    let roots: Vec<Complex64> = poles
        .iter()
        .flat_map(|p| std::iter::repeat_n(p.location, p.multiplicity))
        .collect();
    ComplexPoly::from_roots(&roots)
}

fn same_pole(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() < POLE_MERGE_TOL * (1.0 + a.norm())
}

/// Merges pole lists, keeping the first representative of each location.
fn merge_poles(lists: &[&[Pole]], combine: impl Fn(usize, usize) -> usize) -> Vec<Pole> {
    let mut out: Vec<Pole> = Vec::new();
    for list in lists {
        for p in list.iter() {
            match out.iter_mut().find(|q| same_pole(q.location, p.location)) {
                Some(q) => q.multiplicity = combine(q.multiplicity, p.multiplicity),
                None => out.push(*p),
            }
        }
    }
    out
}

fn multiplicity_in(poles: &[Pole], x: Complex64) -> usize {
    poles
        .iter()
        .find(|p| same_pole(p.location, x))
        .map_or(0, |p| p.multiplicity)
}

fn sort_poles(poles: &mut [Pole]) {
    poles.sort_by(|a, b| {
        root_key(a.location)
            .partial_cmp(&root_key(b.location))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
}

impl RationalFn {
    pub fn zero() -> Self {
        Self::from_poly(ComplexPoly::zero())
    }

    pub fn constant(c: Complex64) -> Self {
        Self::from_poly(ComplexPoly::constant(c))
    }

    pub fn from_poly(p: ComplexPoly) -> Self {
        let env = abs_coeffs(&p);
        Self::assemble(p, env, Vec::new())
    }

    /// `z^k` for any integer `k`.
    pub fn z_power(k: i32) -> Self {
        let one = Complex64::new(1.0, 0.0);
        if k >= 0 {
            Self::from_poly(ComplexPoly::monomial(one, k as usize))
        } else {
            Self::from_factored(
                ComplexPoly::one(),
                &[Pole { location: czero(), multiplicity: (-k) as usize }],
            )
        }
    }

    /// `num / den`; the denominator is factored numerically.
    pub fn new(num: ComplexPoly, den: ComplexPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivideByZero);
        }
        let lead = den.leading();
        let poles = factor(&den)?;
        Ok(Self::from_factored(num.scale(lead.inv()), &poles))
    }

    /// `num / prod (z - x_i)^{m_i}` with the poles given explicitly.
    pub fn from_factored(num: ComplexPoly, poles: &[Pole]) -> Self {
        let env = abs_coeffs(&num);
        let merged = merge_poles(&[poles], |a, b| a + b);
        Self::assemble(num, env, merged)
    }

    /// Like [`RationalFn::from_factored`] with an explicit magnitude
    /// envelope for the numerator.
    pub(crate) fn from_parts(num: ComplexPoly, env: Vec<f64>, poles: &[Pole]) -> Self {
        let env = add_abs(&env, &abs_coeffs(&num));
        let merged = merge_poles(&[poles], |a, b| a + b);
        Self::assemble(num, env, merged)
    }

    fn assemble(num: ComplexPoly, env: Vec<f64>, poles: Vec<Pole>) -> Self {
        let (num, env, mut poles) = canonicalize(num, env, poles);
        sort_poles(&mut poles);
        let den = linear_product(&poles);
        RationalFn {
            num,
            env,
            poles,
            den,
            num_roots: OnceLock::new(),
        }
    }

    pub fn numerator(&self) -> &ComplexPoly {
        &self.num
    }

    /// Expanded monic denominator.
    pub fn denominator(&self) -> &ComplexPoly {
        &self.den
    }

    pub fn poles(&self) -> &[Pole] {
        &self.poles
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.poles.is_empty()
    }

    /// Largest numerator coefficient relative to the largest entry of its
    /// magnitude envelope: near machine epsilon when the numerator is the
    /// residue of a cancellation.
    pub fn cancellation_ratio(&self) -> f64 {
        let env = self.env.iter().copied().fold(0.0, f64::max);
        if env == 0.0 {
            0.0
        } else {
            self.num.max_abs() / env
        }
    }

    /// Magnitude envelope of the numerator coefficients.
    pub fn envelope(&self) -> &[f64] {
        &self.env
    }

    /// Distinct numerator roots with multiplicities, computed on first use.
    pub fn numerator_roots(&self) -> &[Pole] {
        self.num_roots.get_or_init(|| factor(&self.num).unwrap_or_default())
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut d = Complex64::new(1.0, 0.0);
        for p in &self.poles {
            d *= (z - p.location).powu(p.multiplicity as u32);
        }
        self.num.eval(z) / d
    }

    /// `None` when `z` is within `tol * (1 + |x|)` of a pole `x`.
    pub fn try_eval(&self, z: Complex64, tol: f64) -> Option<Complex64> {
        if self.near_pole(z, tol) {
            None
        } else {
            Some(self.eval(z))
        }
    }

    pub fn near_pole(&self, z: Complex64, tol: f64) -> bool {
        self.poles
            .iter()
            .any(|p| (z - p.location).norm() < tol * (1.0 + p.location.norm()))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        if c == czero() {
            return Self::zero();
        }
        let env = self.env.iter().map(|e| e * c.norm()).collect();
        Self::assemble(self.num.scale(c), env, self.poles.clone())
    }

    /// Multiplies by `z^k` for any integer `k`.
    pub fn shift(&self, k: i32) -> Self {
        self * &Self::z_power(k)
    }

    /// Applies one of the four field operations.
    pub fn combine(&self, op: RatOp, other: &RationalFn) -> Result<Self> {
        Ok(match op {
            RatOp::Add => self.add_signed(other, 1.0),
            RatOp::Sub => self.add_signed(other, -1.0),
            RatOp::Mul => self.mul_impl(other),
            RatOp::Div => self.mul_impl(&other.recip()?),
        })
    }

    pub fn checked_div(&self, other: &RationalFn) -> Result<Self> {
        self.combine(RatOp::Div, other)
    }

    /// `1 / self`; factors the numerator.
    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivideByZero);
        }
        let lead = self.num.leading();
        let num = self.den.scale(lead.inv());
        let env = abs_coeffs(&num);
        Ok(Self::assemble(num, env, self.numerator_roots().to_vec()))
    }

    fn add_signed(&self, other: &RationalFn, sign: f64) -> Self {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.scale(Complex64::new(sign, 0.0));
        }
        let lcm = merge_poles(&[&self.poles, &other.poles], usize::max);
        let cofactor = |own: &[Pole]| -> ComplexPoly {
            let extra: Vec<Pole> = lcm
                .iter()
                .map(|p| Pole {
                    location: p.location,
                    multiplicity: p.multiplicity - multiplicity_in(own, p.location),
                })
                .filter(|p| p.multiplicity > 0)
                .collect();
            linear_product(&extra)
        };
        let ca = cofactor(&self.poles);
        let cb = cofactor(&other.poles).scale(Complex64::new(sign, 0.0));
        let a = mul_coeffs(self.num.coeffs(), ca.coeffs());
        let b = mul_coeffs(other.num.coeffs(), cb.coeffs());
        let n = a.len().max(b.len());
        let num: Vec<Complex64> = (0..n)
            .map(|k| a.get(k).copied().unwrap_or_default() + b.get(k).copied().unwrap_or_default())
            .collect();
        let env = add_abs(
            &conv_abs(&self.env, &abs_coeffs(&ca)),
            &conv_abs(&other.env, &abs_coeffs(&cb)),
        );
        Self::assemble(ComplexPoly::from_exact(num), env, lcm)
    }

    fn mul_impl(&self, other: &RationalFn) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let num = ComplexPoly::from_exact(mul_coeffs(self.num.coeffs(), other.num.coeffs()));
        // first-order propagation: each factor's envelope against the
        // other factor's actual coefficients
        let env = add_abs(
            &conv_abs(&self.env, &abs_coeffs(&other.num)),
            &conv_abs(&abs_coeffs(&self.num), &other.env),
        );
        let poles = merge_poles(&[&self.poles, &other.poles], |a, b| a + b);
        Self::assemble(num, env, poles)
    }

    /// Quotient-rule derivative. With `E = prod (z - x_i)` and
    /// `F = sum m_i prod_{j != i} (z - x_j)`, `(N/D)' = (N'E - NF) / (DE)`.
    pub fn derivative(&self) -> Self {
        if self.poles.is_empty() {
            let d = self.num.derivative();
            let env: Vec<f64> = self
                .env
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, e)| e * k as f64)
                .collect();
            return Self::assemble(d, env, Vec::new());
        }
        let radical: Vec<Pole> = self
            .poles
            .iter()
            .map(|p| Pole { location: p.location, multiplicity: 1 })
            .collect();
        let e = linear_product(&radical);
        let mut f = vec![czero(); self.poles.len()];
        for (i, p) in self.poles.iter().enumerate() {
            let others: Vec<Pole> = radical
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, q)| *q)
                .collect();
            let term = linear_product(&others).scale(Complex64::new(p.multiplicity as f64, 0.0));
            for (k, c) in term.coeffs().iter().enumerate() {
                f[k] += c;
            }
        }
        let f = ComplexPoly::from_exact(f);
        let dn = self.num.derivative();
        let denv: Vec<f64> = self
            .env
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, e)| e * k as f64)
            .collect();
        let a = mul_coeffs(dn.coeffs(), e.coeffs());
        let b = mul_coeffs(self.num.coeffs(), f.coeffs());
        let n = a.len().max(b.len());
        let num: Vec<Complex64> = (0..n)
            .map(|k| a.get(k).copied().unwrap_or_default() - b.get(k).copied().unwrap_or_default())
            .collect();
        let env = add_abs(&conv_abs(&denv, &abs_coeffs(&e)), &conv_abs(&self.env, &abs_coeffs(&f)));
        let poles = merge_poles(&[&self.poles, &radical], |a, b| a + b);
        Self::assemble(ComplexPoly::from_exact(num), env, poles)
    }

    /// Splits into polynomial part plus principal parts at every pole.
    ///
    /// Principal-part coefficients at a pole `x` of order `m` are the Taylor
    /// coefficients at `x` of the deflated function `N(z) / prod_{y != x}
    /// (z - y)^{m_y}`, computed with truncated power-series arithmetic.
    pub fn partial_fractions(&self) -> PartialFractions {
        let (polynomial, polynomial_envelope) = self.polynomial_part();
        let mut terms = Vec::new();
        for (i, p) in self.poles.iter().enumerate() {
            let m = p.multiplicity;
            let x = p.location;
            let shifted = self.num.taylor_shift(x);
            let mut series: Vec<Complex64> = (0..m).map(|k| shifted.coeff(k)).collect();
            let mut bound = abs_taylor_shift(&self.env, x.norm());
            bound.resize(m, 0.0);
            for (j, q) in self.poles.iter().enumerate() {
                if j == i {
                    continue;
                }
                // (x - y + t)^{-1} = sum_k (-1)^k t^k / c^{k+1}
                let c = x - q.location;
                let inv: Vec<Complex64> = (0..m)
                    .map(|k| {
                        let s = if k % 2 == 0 { 1.0 } else { -1.0 };
                        c.powi(-(k as i32) - 1) * s
                    })
                    .collect();
                let inv_abs: Vec<f64> = inv.iter().map(|v| v.norm()).collect();
                for _ in 0..q.multiplicity {
                    series = truncated_mul(&series, &inv, m);
                    bound = conv_abs(&bound, &inv_abs);
                    bound.truncate(m);
                }
            }
            for (j, coeff) in series.into_iter().enumerate() {
                if coeff != czero() {
                    terms.push(PoleTerm { pole: x, order: m - j, coeff, envelope: bound[j] });
                }
            }
        }
        PartialFractions { polynomial, terms, polynomial_envelope }
    }

    /// Quotient of numerator by denominator, with its envelope.
    fn polynomial_part(&self) -> (ComplexPoly, Vec<f64>) {
        let a = self.num.coeffs();
        let d = self.den.coeffs();
        let dd = d.len() - 1;
        if a.len() <= dd {
            return (ComplexPoly::zero(), Vec::new());
        }
        let mut rem = a.to_vec();
        let mut renv = self.env.clone();
        renv.resize(a.len(), 0.0);
        let top = a.len() - 1 - dd;
        let mut q = vec![czero(); top + 1];
        let mut qenv = vec![0.0; top + 1];
        for k in (0..=top).rev() {
            q[k] = rem[k + dd];
            qenv[k] = renv[k + dd];
            for j in 0..dd {
                rem[k + j] -= q[k] * d[j];
                renv[k + j] += qenv[k] * d[j].norm();
            }
        }
        (ComplexPoly::from_exact(q), qenv)
    }

    /// Values at `samples` compared with `other`: largest
    /// `|a - b| / (1 + |a|)`. Samples at poles of either side are skipped.
    pub fn max_deviation(&self, other: &RationalFn, samples: &[Complex64]) -> f64 {
        samples
            .iter()
            .filter(|z| !self.near_pole(**z, 1e-6) && !other.near_pole(**z, 1e-6))
            .map(|&z| {
                let a = self.eval(z);
                (a - other.eval(z)).norm() / (1.0 + a.norm())
            })
            .fold(0.0, f64::max)
    }
}

/// Coefficients of `p(r + t)` in `t` for nonnegative `p` and `r`.
fn abs_taylor_shift(p: &[f64], r: f64) -> Vec<f64> {
    let mut c = p.to_vec();
    let n = c.len();
    for i in 0..n {
        for k in (i..n.saturating_sub(1)).rev() {
            c[k] += r * c[k + 1];
        }
    }
    c
}

fn truncated_mul(a: &[Complex64], b: &[Complex64], len: usize) -> Vec<Complex64> {
    let mut out = vec![czero(); len];
    for (i, &x) in a.iter().enumerate().take(len) {
        for (j, &y) in b.iter().enumerate().take(len - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// Distinct roots of `p` with multiplicities.
pub(crate) fn factor(p: &ComplexPoly) -> Result<Vec<Pole>> {
    let roots = p.roots()?;
    let (zeros, rest): (Vec<Complex64>, Vec<Complex64>) =
        roots.into_iter().partition(|r| r.norm() == 0.0);
    let mut poles: Vec<Pole> = cluster_roots(&rest, ROOT_CLUSTER_TOL)
        .into_iter()
        .map(|(location, multiplicity)| Pole { location, multiplicity })
        .collect();
    if !zeros.is_empty() {
        poles.push(Pole { location: czero(), multiplicity: zeros.len() });
    }
    sort_poles(&mut poles);
    Ok(poles)
}

fn canonicalize(
    num: ComplexPoly,
    mut env: Vec<f64>,
    mut poles: Vec<Pole>,
) -> (ComplexPoly, Vec<f64>, Vec<Pole>) {
    let mut coeffs = num.coeffs().to_vec();
    env.resize(coeffs.len().max(env.len()), 0.0);
    for (c, e) in coeffs.iter_mut().zip(env.iter()) {
        if c.norm() <= DUST_TOL * e {
            *c = czero();
        }
    }
    let mut num = ComplexPoly::new(coeffs);
    env.truncate(num.coeffs().len());
    if num.is_zero() {
        return (ComplexPoly::zero(), Vec::new(), Vec::new());
    }
    for pole in poles.iter_mut() {
        let x = pole.location;
        let ax = x.norm();
        while pole.multiplicity > 0 && num.degree() > 0 {
            let (value, slope) = num.eval_with_derivative(x);
            let scale: f64 = env.iter().rev().fold(0.0, |acc, e| acc * ax + e);
            // the value must be rounding-sized and a Newton step from x
            // must stay within the root-clustering radius
            let rounding = value.norm() <= CANCEL_TOL * scale;
            let nearby = value.norm() <= ROOT_CLUSTER_TOL * (1.0 + ax) * slope.norm();
            if !(rounding && nearby) {
                break;
            }
            let (q, qenv) = deflate_stable(&num, &env, x);
            num = q;
            env = qenv;
            env.truncate(num.coeffs().len());
            pole.multiplicity -= 1;
        }
    }
    poles.retain(|p| p.multiplicity > 0);
    (num, env, poles)
}

/// Divides out `(z - x)` and propagates the envelope. Synthetic division
/// runs from the top for `|x| <= 1` and from the constant term otherwise,
/// so that rounding errors are damped rather than amplified.
fn deflate_stable(num: &ComplexPoly, env: &[f64], x: Complex64) -> (ComplexPoly, Vec<f64>) {
    let a = num.coeffs();
    let d = a.len() - 1;
    let ax = x.norm();
    let mut q = vec![czero(); d];
    let mut qenv = vec![0.0; d];
    let e = |k: usize| env.get(k).copied().unwrap_or(0.0);
    if ax <= 1.0 {
        // q_{k-1} = a_k + x q_k
        let mut acc = czero();
        let mut acc_env = 0.0;
        for k in (1..=d).rev() {
            acc = a[k] + x * acc;
            acc_env = e(k) + ax * acc_env;
            q[k - 1] = acc;
            qenv[k - 1] = acc_env;
        }
    } else {
        // q_k = (q_{k-1} - a_k) / x with q_{-1} = 0
        let mut acc = czero();
        let mut acc_env = 0.0;
        for k in 0..d {
            acc = (acc - a[k]) / x;
            acc_env = (acc_env + e(k)) / ax;
            q[k] = acc;
            qenv[k] = acc_env;
        }
    }
    (ComplexPoly::from_exact(q), qenv)
}

impl PartialFractions {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.polynomial.eval(z)
            + self
                .terms
                .iter()
                .map(|t| t.coeff / (z - t.pole).powu(t.order as u32))
                .sum::<Complex64>()
    }

    pub fn to_rational(&self) -> RationalFn {
        let poly = RationalFn::from_parts(self.polynomial.clone(), self.polynomial_envelope.clone(), &[]);
        self.terms.iter().fold(poly, |acc, t| {
            let term = RationalFn::from_parts(
                ComplexPoly::constant(t.coeff),
                vec![t.envelope],
                &[Pole { location: t.pole, multiplicity: t.order }],
            );
            &acc + &term
        })
    }

    /// Envelope of the polynomial part's coefficients.
    pub fn polynomial_envelope(&self) -> &[f64] {
        &self.polynomial_envelope
    }
}

/// `f g' - g f'`.
pub fn wronskian(f: &RationalFn, g: &RationalFn) -> RationalFn {
    &(f * &g.derivative()) - &(g * &f.derivative())
}

impl Add for &RationalFn {
    type Output = RationalFn;
    fn add(self, rhs: &RationalFn) -> RationalFn {
        self.add_signed(rhs, 1.0)
    }
}

impl Sub for &RationalFn {
    type Output = RationalFn;
    fn sub(self, rhs: &RationalFn) -> RationalFn {
        self.add_signed(rhs, -1.0)
    }
}

impl Mul for &RationalFn {
    type Output = RationalFn;
    fn mul(self, rhs: &RationalFn) -> RationalFn {
        self.mul_impl(rhs)
    }
}

impl Neg for &RationalFn {
    type Output = RationalFn;
    fn neg(self) -> RationalFn {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for RationalFn {
            type Output = RationalFn;
            fn $m(self, rhs: RationalFn) -> RationalFn {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&RationalFn> for RationalFn {
            type Output = RationalFn;
            fn $m(self, rhs: &RationalFn) -> RationalFn {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl From<ComplexPoly> for RationalFn {
    fn from(p: ComplexPoly) -> Self {
        RationalFn::from_poly(p)
    }
}

impl fmt::Display for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poles.is_empty() {
            return write!(f, "{}", self.num);
        }
        write!(f, "({}) / ({})", self.num, self.den)
    }
}

#[derive(Serialize, Deserialize)]
struct RationalJson {
    num: ComplexPoly,
    den: ComplexPoly,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    factored: Option<FactoredJson>,
}

#[derive(Serialize, Deserialize)]
struct FactoredJson {
    num_roots: Vec<Complex64>,
    den_roots: Vec<Complex64>,
    scale: Complex64,
}

fn expand(poles: &[Pole]) -> Vec<Complex64> {
    poles
        .iter()
        .flat_map(|p| std::iter::repeat_n(p.location, p.multiplicity))
        .collect()
}

impl Serialize for RationalFn {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let factored = (!self.is_zero()).then(|| FactoredJson {
            num_roots: expand(self.numerator_roots()),
            den_roots: expand(&self.poles),
            scale: self.num.leading(),
        });
        RationalJson { num: self.num.clone(), den: self.den.clone(), factored }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalFn {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RationalJson::deserialize(d)?;
        match raw.factored {
            Some(f) if raw.den.degree() == f.den_roots.len() && !raw.den.is_zero() => {
                let poles: Vec<Pole> = cluster_roots(&f.den_roots, POLE_MERGE_TOL)
                    .into_iter()
                    .map(|(location, multiplicity)| Pole { location, multiplicity })
                    .collect();
                Ok(RationalFn::from_factored(raw.num.scale(raw.den.leading().inv()), &poles))
            }
            _ => RationalFn::new(raw.num, raw.den).map_err(serde::de::Error::custom),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pole(x: f64, m: usize) -> Pole {
        Pole { location: c(x, 0.0), multiplicity: m }
    }

    fn inv_z() -> RationalFn {
        RationalFn::z_power(-1)
    }

    fn samples() -> Vec<Complex64> {
        (0..32)
            .map(|k| Complex64::from_polar(1.3 + 0.05 * k as f64, 0.7 * k as f64 + 0.2))
            .collect()
    }

    #[test]
    fn add_cancels_to_zero() {
        let r = &inv_z() + &(-&inv_z());
        assert!(r.is_zero());
        assert!(r.poles().is_empty());
        assert_eq!(r.denominator(), &ComplexPoly::one());
    }

    #[test]
    fn mul_cancels_common_factor() {
        // 1/(z(2z-1)) * z = 1/(2z-1)
        let a = RationalFn::new(ComplexPoly::one(), ComplexPoly::from_real(&[0.0, -1.0, 2.0])).unwrap();
        let r = &a * &RationalFn::from_poly(ComplexPoly::from_real(&[0.0, 1.0]));
        assert_eq!(r.poles().len(), 1);
        assert!((r.poles()[0].location - c(0.5, 0.0)).norm() < 1e-15);
        assert!((r.numerator().coeff(0) - c(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn division_by_zero_is_rejected() {
        assert_eq!(inv_z().checked_div(&RationalFn::zero()).unwrap_err(), Error::DivideByZero);
        assert_eq!(
            RationalFn::new(ComplexPoly::one(), ComplexPoly::zero()).unwrap_err(),
            Error::DivideByZero
        );
    }

    #[test]
    fn derivative_examples() {
        assert!(RationalFn::constant(c(2.0, 1.0)).derivative().is_zero());
        let d = inv_z().derivative();
        let expected = RationalFn::z_power(-2).scale(c(-1.0, 0.0));
        assert!(d.max_deviation(&expected, &samples()) < 1e-15);
        assert_eq!(d.poles(), &[pole(0.0, 2)]);
    }

    #[test]
    fn wronskian_examples() {
        let k1 = RationalFn::constant(c(3.0, 0.0));
        let k2 = RationalFn::constant(c(0.0, -2.0));
        assert!(wronskian(&k1, &k2).is_zero());
        let z = RationalFn::z_power(1);
        let z2 = RationalFn::z_power(2);
        let w = wronskian(&z, &z2);
        assert!(w.max_deviation(&z2, &samples()) < 1e-15);
        let f = RationalFn::new(ComplexPoly::from_real(&[1.0, 2.0]), ComplexPoly::from_real(&[-0.5, 0.0, 1.0])).unwrap();
        assert!(wronskian(&f, &f).is_zero());
    }

    #[test]
    fn partial_fraction_examples() {
        let r = RationalFn::from_factored(ComplexPoly::one(), &[pole(0.0, 1), pole(0.5, 1)]);
        let pf = r.partial_fractions();
        assert!(pf.polynomial.is_zero());
        let find = |x: f64| pf.terms.iter().find(|t| (t.pole - c(x, 0.0)).norm() < 1e-12).unwrap();
        assert!((find(0.0).coeff - c(-2.0, 0.0)).norm() < 1e-14);
        assert!((find(0.5).coeff - c(2.0, 0.0)).norm() < 1e-14);

        let p = ComplexPoly::from_real(&[1.0, -3.0, 0.0, 2.0]);
        let pf = RationalFn::from_poly(p.clone()).partial_fractions();
        assert_eq!(pf.polynomial, p);
        assert!(pf.terms.is_empty());

        let r = RationalFn::new(ComplexPoly::from_real(&[-1.0, 2.0]), ComplexPoly::from_real(&[0.0, -1.0, 1.0])).unwrap();
        let pf = r.partial_fractions();
        assert_eq!(pf.terms.len(), 2);
        for t in &pf.terms {
            assert_eq!(t.order, 1);
            assert!((t.coeff - c(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn partial_fractions_with_repeated_poles() {
        // (z^4 + 1) / (z^3 (z - 0.5)^2 (z + 2))
        let r = RationalFn::from_factored(
            ComplexPoly::from_real(&[1.0, 0.0, 0.0, 0.0, 1.0]),
            &[pole(0.0, 3), pole(0.5, 2), pole(-2.0, 1)],
        );
        let pf = r.partial_fractions();
        for z in samples() {
            let a = r.eval(z);
            assert!((a - pf.eval(z)).norm() < 1e-12 * (1.0 + a.norm()));
        }
        let back = pf.to_rational();
        assert!(back.max_deviation(&r, &samples()) < 1e-12);
    }

    #[test]
    fn improper_input_has_polynomial_part() {
        // (z^3 + 1) / (z - 1) = z^2 + z + 1 + 2/(z-1)
        let r = RationalFn::from_factored(ComplexPoly::from_real(&[1.0, 0.0, 0.0, 1.0]), &[pole(1.0, 1)]);
        let pf = r.partial_fractions();
        assert_eq!(pf.polynomial, ComplexPoly::from_real(&[1.0, 1.0, 1.0]));
        assert!((pf.terms[0].coeff - c(2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn canonical_form_has_monic_denominator() {
        let r = RationalFn::new(ComplexPoly::from_real(&[2.0]), ComplexPoly::from_real(&[-1.0, 4.0])).unwrap();
        assert!((r.denominator().leading() - c(1.0, 0.0)).norm() < 1e-15);
        assert!((r.eval(c(2.0, 0.0)) - c(2.0 / 7.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn json_shape() {
        let r = RationalFn::from_factored(ComplexPoly::from_real(&[1.0]), &[pole(0.5, 1)]);
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["num"], serde_json::json!([[1.0, 0.0]]));
        assert_eq!(v["den"], serde_json::json!([[-0.5, 0.0], [1.0, 0.0]]));
        assert_eq!(v["factored"]["den_roots"], serde_json::json!([[0.5, 0.0]]));
        let back: RationalFn = serde_json::from_value(v).unwrap();
        assert!(back.max_deviation(&r, &samples()) < 1e-15);
        let plain: RationalFn =
            serde_json::from_str(r#"{"num":[[1,0]],"den":[[-0.5,0],[1,0]]}"#).unwrap();
        assert!(plain.max_deviation(&r, &samples()) < 1e-15);
    }
}
