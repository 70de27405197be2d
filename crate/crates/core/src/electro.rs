//! Lame normal form and electrostatic equilibria.
//!
//! A second-order equation `y'' + p y' + q y = 0` whose first coefficient is
//! `p = sum t_i / (z - w_i)` describes unit charges at the zeros of a
//! polynomial solution held in total equilibrium by fixed charges `t_i / 2`
//! at the `w_i`. Here `p = (1 - n)/z - h'/h`, so the `w_i` are the origin and
//! the zeros and poles of `h`.

use std::cmp::Ordering;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cauchy::{bernstein_szego_gdj, measure_gdj, Region};
use crate::error::{Error, Result};
use crate::ode::{h_fn, second_order_ode, OdeCoefficients};
use crate::opuc::{bernstein_szego_lift, popuc, validate_points, MeasureSpec};
use crate::poly::{root_key, sort_roots, ComplexPoly};
use crate::ratfun::RationalFn;
use crate::sampling::region_samples;

/// Lame locations closer than this are merged.
pub const MERGE_TOL: f64 = 1e-9;

/// A generator closer than this to a mobile point is a numerical failure.
pub const COLLISION_TOL: f64 = 1e-8;

/// Equilibrium residuals pass below `RESIDUAL_TOL * n`.
pub const RESIDUAL_TOL: f64 = 1e-8;

/// Modulus tolerance for the interlacing check.
const INTERLACE_UNIMODULAR_TOL: f64 = 1e-8;

/// A fixed charge creating the external field.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Generator {
    pub location: Complex64,
    pub charge: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ChargeConfiguration {
    pub generators: Vec<Generator>,
}

impl ChargeConfiguration {
    pub fn new(generators: Vec<Generator>) -> Result<Self> {
        let config = ChargeConfiguration { generators };
        config.validate()?;
        Ok(config)
    }

    /// Generator locations must be pairwise distinct.
    pub fn validate(&self) -> Result<()> {
        for (i, a) in self.generators.iter().enumerate() {
            if !a.location.is_finite() || !a.charge.is_finite() {
                return Err(Error::InvalidConfiguration(format!("generator {i} is not finite")));
            }
            for (j, b) in self.generators[..i].iter().enumerate() {
                if (a.location - b.location).norm() < MERGE_TOL {
                    return Err(Error::InvalidConfiguration(format!("generators {j} and {i} coincide")));
                }
            }
        }
        Ok(())
    }

    /// Applies `z -> e^{i phi} z` to every location.
    pub fn rotated(&self, phi: f64) -> Self {
        let r = Complex64::from_polar(1.0, phi);
        ChargeConfiguration {
            generators: self
                .generators
                .iter()
                .map(|g| Generator { location: g.location * r, charge: g.charge })
                .collect(),
        }
    }

    pub fn total_charge(&self) -> f64 {
        self.generators.iter().map(|g| g.charge).sum()
    }
}

/// Residuals of the equilibrium conditions at each mobile point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquilibriumReport {
    /// `sum_{k != j} 1/(x_j - x_k) + sum_i q_i/(x_j - a_i)`.
    pub total_residuals: Vec<Complex64>,
    /// `Im[x_j * total_j]`, the tangential component on the circle.
    pub normal_residuals: Vec<f64>,
    pub max_total: f64,
    pub max_normal: f64,
    pub tolerance: f64,
    pub total_pass: bool,
    pub normal_pass: bool,
}

/// Force sums at every point; coincident points or a point sitting on a
/// generator are rejected.
pub fn total_equilibrium_residual(config: &ChargeConfiguration, points: &[Complex64]) -> Result<Vec<Complex64>> {
    let mut out = Vec::with_capacity(points.len());
    for (j, &x) in points.iter().enumerate() {
        let mut sum = Complex64::new(0.0, 0.0);
        for (k, &y) in points.iter().enumerate() {
            if k == j {
                continue;
            }
            if x == y {
                return Err(Error::InvalidConfiguration(format!("mobile points {k} and {j} coincide")));
            }
            sum += (x - y).inv();
        }
        for (i, g) in config.generators.iter().enumerate() {
            if x == g.location {
                return Err(Error::InvalidConfiguration(format!("generator {i} sits on mobile point {j}")));
            }
            sum += g.charge / (x - g.location);
        }
        out.push(sum);
    }
    Ok(out)
}

/// `Im[x_j * total_j]` at every point.
pub fn normal_equilibrium_residual(config: &ChargeConfiguration, points: &[Complex64]) -> Result<Vec<f64>> {
    Ok(total_equilibrium_residual(config, points)?
        .into_iter()
        .zip(points)
        .map(|(s, x)| (x * s).im)
        .collect())
}

/// Both residuals with pass flags at tolerance `1e-8 n`.
pub fn equilibrium_report(config: &ChargeConfiguration, points: &[Complex64]) -> Result<EquilibriumReport> {
    let total_residuals = total_equilibrium_residual(config, points)?;
    let normal_residuals: Vec<f64> = total_residuals.iter().zip(points).map(|(s, x)| (x * s).im).collect();
    let max_total = total_residuals.iter().map(|r| r.norm()).fold(0.0, f64::max);
    let max_normal = normal_residuals.iter().map(|r| r.abs()).fold(0.0, f64::max);
    let tolerance = RESIDUAL_TOL * points.len().max(1) as f64;
    Ok(EquilibriumReport {
        total_residuals,
        normal_residuals,
        max_total,
        max_normal,
        tolerance,
        total_pass: max_total < tolerance,
        normal_pass: max_normal < tolerance,
    })
}

/// One simple pole `t / (z - w)` of the first coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LamePole {
    pub location: Complex64,
    pub weight: f64,
}

/// `p(z) = sum t_i / (z - w_i) + polynomial part`.
#[derive(Clone, Debug, Serialize)]
pub struct LameForm {
    pub poles: Vec<LamePole>,
    /// Polynomial part of `p`, zero up to rounding.
    pub polynomial_part: ComplexPoly,
    /// Numerator of `h` after cancellation.
    pub s1: ComplexPoly,
    /// Denominator of `h` after cancellation.
    pub s2: ComplexPoly,
    /// Largest relative gap between `p` and the pole expansion at samples.
    pub mismatch: f64,
}

fn merge(entries: Vec<(Complex64, f64)>) -> Vec<LamePole> {
    let mut merged: Vec<(Complex64, f64, usize)> = Vec::new();
    for (w, t) in entries {
        match merged.iter_mut().find(|(x, _, _)| (x - w).norm() < MERGE_TOL * (1.0 + w.norm())) {
            Some((x, total, count)) => {
                // keep an exact origin exact
                if *x != Complex64::new(0.0, 0.0) {
                    *x = (*x * *count as f64 + w) / (*count as f64 + 1.0);
                }
                *total += t;
                *count += 1;
            }
            None => merged.push((w, t, 1)),
        }
    }
    let mut poles: Vec<LamePole> = merged
        .into_iter()
        .filter(|(_, t, _)| t.abs() > 1e-12)
        .map(|(location, weight, _)| LamePole { location, weight })
        .collect();
    poles.sort_by(|a, b| root_key(a.location).partial_cmp(&root_key(b.location)).unwrap_or(Ordering::Equal));
    poles
}

impl LameForm {
    /// `sum t_i / (z - w_i)` plus the polynomial part.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.polynomial_part.eval(z) + self.poles.iter().map(|p| p.weight / (z - p.location)).sum::<Complex64>()
    }

    /// The pole expansion as a rational function.
    pub fn to_rational(&self) -> RationalFn {
        self.poles.iter().fold(RationalFn::from_poly(self.polynomial_part.clone()), |acc, p| {
            let term = RationalFn::from_factored(
                ComplexPoly::constant(Complex64::new(p.weight, 0.0)),
                &[crate::ratfun::Pole { location: p.location, multiplicity: 1 }],
            );
            &acc + &term
        })
    }

    /// Charges `t_i / 2` at the `w_i`.
    pub fn configuration(&self) -> ChargeConfiguration {
        ChargeConfiguration {
            generators: self
                .poles
                .iter()
                .map(|p| Generator { location: p.location, charge: p.weight / 2.0 })
                .collect(),
        }
    }

    /// Weight attached to the location nearest `w`, if within the merge tolerance.
    pub fn weight_at(&self, w: Complex64) -> Option<f64> {
        self.poles
            .iter()
            .find(|p| (p.location - w).norm() < MERGE_TOL * (1.0 + w.norm()))
            .map(|p| p.weight)
    }
}

impl fmt::Display for LameForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        if !self.polynomial_part.is_zero() {
            out.push_str(&self.polynomial_part.to_string());
        }
        for p in &self.poles {
            let term = if p.location == Complex64::new(0.0, 0.0) {
                format!("{}/z", p.weight.abs())
            } else {
                format!("{}/(z - ({}))", p.weight.abs(), crate::fmt_complex(p.location))
            };
            let sign = if p.weight < 0.0 { "-" } else { "+" };
            if out.is_empty() {
                out = if p.weight < 0.0 { format!("-{term}") } else { term };
            } else {
                out.push_str(&format!(" {sign} {term}"));
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        f.write_str(&out)
    }
}

/// Lame data read off `h = S_1 / S_2` alone: `-m` at each zero of `S_1`,
/// `+m` at each pole, `1 - n` at the origin.
pub fn lame_from_h(h: &RationalFn, n: usize) -> Result<LameForm> {
    if h.is_zero() {
        return Err(Error::Degenerate("S_1 vanishes identically".into()));
    }
    let mut entries = vec![(Complex64::new(0.0, 0.0), 1.0 - n as f64)];
    entries.extend(h.numerator_roots().iter().map(|r| (r.location, -(r.multiplicity as f64))));
    entries.extend(h.poles().iter().map(|p| (p.location, p.multiplicity as f64)));
    Ok(LameForm {
        poles: merge(entries),
        polynomial_part: ComplexPoly::zero(),
        s1: h.numerator().clone(),
        s2: h.denominator().clone(),
        mismatch: 0.0,
    })
}

/// Lame data for an assembled equation, checked against its `p`.
pub fn lame_normal_form(ode: &OdeCoefficients, h: &RationalFn) -> Result<LameForm> {
    let mut form = lame_from_h(h, ode.n)?;
    let pf = ode.p.partial_fractions();
    form.polynomial_part = pf.polynomial;
    let samples = region_samples(ode.region, 16, &[&ode.p]);
    form.mismatch = samples
        .iter()
        .map(|&z| {
            let exact = ode.p.eval(z);
            (form.eval(z) - exact).norm() / (1.0 + exact.norm())
        })
        .fold(0.0, f64::max);
    Ok(form)
}

/// Intermediate data from [`generators_from_points`].
#[derive(Clone, Debug, Serialize)]
pub struct GeneratorDiagnostics {
    pub beta: Complex64,
    /// Verblunsky coefficients of the uniform measure on the points.
    pub alphas: Vec<Complex64>,
    pub region: Region,
    /// Largest `|Phi_n(x_j; beta)|` relative to the coefficient scale.
    pub popuc_residual: f64,
    pub lame: LameForm,
    /// Generators that landed on the unit circle away from the points.
    pub on_circle: Vec<Complex64>,
}

/// Fixed charges that hold unit charges at `points` in total equilibrium.
///
/// The points are the zeros of a paraorthogonal polynomial for the uniform
/// measure on them; the Bernstein-Szego measure sharing its first `n - 1`
/// orthogonal polynomials has a rational weight, and the Lame form of the
/// resulting equation places the charges.
pub fn generators_from_points(
    points: &[Complex64],
    region: Region,
) -> Result<(ChargeConfiguration, GeneratorDiagnostics)> {
    let points = validate_points(points)?;
    let n = points.len();
    let (seq, beta) = bernstein_szego_lift(&points)?;
    // the lifted weight's integrals come in closed form
    let gdj = bernstein_szego_gdj(&seq, n, region)?;
    let h = h_fn(&seq, n, &gdj, beta, beta)?;
    let lame = lame_from_h(&h, n)?;

    let y = popuc(&seq, n, beta)?;
    let scale = y.max_abs();
    let popuc_residual = points.iter().map(|&x| y.eval(x).norm() / scale).fold(0.0, f64::max);

    let config = lame.configuration();
    for g in &config.generators {
        if let Some((index, _)) = points
            .iter()
            .enumerate()
            .find(|(_, &x)| (x - g.location).norm() < COLLISION_TOL)
        {
            return Err(Error::GeneratorCollidesWithPoint { index, re: g.location.re, im: g.location.im });
        }
    }
    let on_circle = config
        .generators
        .iter()
        .filter(|g| (g.location.norm() - 1.0).abs() < COLLISION_TOL)
        .map(|g| g.location)
        .collect();
    let alphas = seq.alphas()[..n - 1].to_vec();
    Ok((
        config,
        GeneratorDiagnostics { beta, alphas, region, popuc_residual, lame, on_circle },
    ))
}

/// Whether two unimodular point sets of equal size alternate around the circle.
pub fn interlacing_check(a: &[Complex64], b: &[Complex64]) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::InvalidInput(format!("set sizes differ: {} and {}", a.len(), b.len())));
    }
    for (index, x) in a.iter().chain(b).enumerate() {
        if (x.norm() - 1.0).abs() > INTERLACE_UNIMODULAR_TOL {
            return Err(Error::InvalidSupport { index, modulus: x.norm() });
        }
    }
    if a.iter().any(|x| b.iter().any(|y| (x - y).norm() < MERGE_TOL)) {
        return Err(Error::NotDisjoint);
    }
    let mut tagged: Vec<(f64, bool)> = a
        .iter()
        .map(|x| (x.arg(), true))
        .chain(b.iter().map(|y| (y.arg(), false)))
        .collect();
    tagged.sort_by(|p, q| p.0.total_cmp(&q.0));
    Ok(tagged.windows(2).all(|w| w[0].1 != w[1].1))
}

/// Role of a row in plot data.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PointKind {
    Mobile,
    Generator,
    Origin,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlotRow {
    pub x: f64,
    pub y: f64,
    pub charge: f64,
    pub kind: PointKind,
}

/// Mobile unit charges followed by the generators; a generator at the
/// origin is tagged separately.
pub fn plot_rows(points: &[Complex64], config: &ChargeConfiguration) -> Vec<PlotRow> {
    let mobile = points.iter().map(|p| PlotRow { x: p.re, y: p.im, charge: 1.0, kind: PointKind::Mobile });
    let fixed = config.generators.iter().map(|g| PlotRow {
        x: g.location.re,
        y: g.location.im,
        charge: g.charge,
        kind: if g.location == Complex64::new(0.0, 0.0) { PointKind::Origin } else { PointKind::Generator },
    });
    mobile.chain(fixed).collect()
}

/// The equilibrium read directly off a measure's own equation.
#[derive(Clone, Debug, Serialize)]
pub struct MeasureEquilibrium {
    /// Zeros of `Phi_n(z; beta)`.
    pub points: Vec<Complex64>,
    pub configuration: ChargeConfiguration,
    pub lame: LameForm,
    pub report: EquilibriumReport,
}

/// Zeros of `Phi_n(z; beta)` for `measure` with the charges from the Lame
/// form of its second-order equation in `region`.
pub fn measure_equilibrium(
    measure: &MeasureSpec,
    n: usize,
    beta: Complex64,
    region: Region,
) -> Result<MeasureEquilibrium> {
    let seq = measure.opuc_sequence(n)?;
    let gdj = measure_gdj(measure, &seq, n, region)?;
    let ode = second_order_ode(&seq, n, &gdj, beta)?;
    let h = h_fn(&seq, n, &gdj, beta, beta)?;
    let lame = lame_normal_form(&ode, &h)?;
    let mut points = popuc(&seq, n, beta)?.roots()?;
    sort_roots(&mut points);
    let configuration = lame.configuration();
    let report = equilibrium_report(&configuration, &points)?;
    Ok(MeasureEquilibrium { points, configuration, lame, report })
}
