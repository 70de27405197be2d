//! The circle integrals `G_n`, `D_n`, `J_n` as rational functions of `z`.
//!
//! Every integrand is first written as a rational function `R(zeta)` of the
//! circle variable alone (using `conj(zeta) = 1/zeta` on the circle) and then
//! pushed through [`circle_cauchy_transform`], which evaluates
//! `int R(e^{it}) / (z - e^{it}) dt / 2pi` from the partial fractions of `R`.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::opuc::{MeasureSpec, NamedMeasure, OpucSequence};
use crate::poly::ComplexPoly;
use crate::ratfun::{factor, Pole, RationalFn};

/// Poles this close to the unit circle make the integral singular.
const CIRCLE_TOL: f64 = 1e-10;

/// Which continuation of the integrals is used.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    /// `|z| > 1`, the component containing infinity.
    Exterior,
    /// `|z| < 1`, the component containing the origin.
    Interior,
}

impl Region {
    pub fn as_str(self) -> &'static str {
        match self {
            Region::Exterior => "exterior",
            Region::Interior => "interior",
        }
    }

    /// Radius of the circle used for identity checks inside the region.
    pub fn sample_radius(self) -> f64 {
        match self {
            Region::Exterior => 1.5,
            Region::Interior => 0.5,
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Region {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exterior" => Ok(Region::Exterior),
            "interior" => Ok(Region::Interior),
            other => Err(Error::InvalidInput(format!("unknown region {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GdjTriple {
    #[serde(rename = "G")]
    pub g: RationalFn,
    #[serde(rename = "D")]
    pub d: RationalFn,
    #[serde(rename = "J")]
    pub j: RationalFn,
    pub region: Region,
    pub n: usize,
}

/// Selects one of the three integrals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Integral {
    G,
    D,
    J,
}

fn pole_term(c: Complex64, envelope: f64, x: Complex64, m: usize) -> RationalFn {
    RationalFn::from_parts(ComplexPoly::constant(c), vec![envelope], &[Pole { location: x, multiplicity: m }])
}

/// `int_0^{2pi} R(e^{it}) / (z - e^{it}) dt / 2pi` on the chosen region.
///
/// With `R = P + sum c / (zeta - x)^m`: outside the disk the polynomial part
/// gives `P(0)/z`, a pole `|x| > 1` gives `c / (z (-x)^m)` and a pole
/// `|x| < 1` gives `c / (z (z - x)^m)`. Inside the disk the residue at
/// `zeta = z` is added, which leaves
/// `-sum_{k>=1} p_k z^{k-1} + sum_{|x|>1} sum_{j<m} c (-x)^{-1-j} / (z - x)^{m-j}`.
pub fn circle_cauchy_transform(r: &RationalFn, region: Region) -> Result<RationalFn> {
    let pf = r.partial_fractions();
    for t in &pf.terms {
        if (t.pole.norm() - 1.0).abs() < CIRCLE_TOL {
            return Err(Error::SingularIntegrand { re: t.pole.re, im: t.pole.im });
        }
    }
    let mut acc = RationalFn::zero();
    let penv = pf.polynomial_envelope();
    match region {
        Region::Exterior => {
            let mut constant = pf.polynomial.coeff(0);
            let mut envelope = penv.first().copied().unwrap_or(0.0);
            for t in &pf.terms {
                if t.pole.norm() > 1.0 {
                    let w = (-t.pole).powi(-(t.order as i32));
                    constant += t.coeff * w;
                    envelope += t.envelope * w.norm();
                } else {
                    acc = &acc + &pole_term(t.coeff, t.envelope, t.pole, t.order);
                }
            }
            acc = &acc + &RationalFn::from_parts(ComplexPoly::constant(constant), vec![envelope], &[]);
            Ok(acc.shift(-1))
        }
        Region::Interior => {
            let p = pf.polynomial.coeffs();
            if p.len() > 1 {
                let lowered: Vec<Complex64> = p[1..].iter().map(|c| -c).collect();
                let env = penv.get(1..).map(|e| e.to_vec()).unwrap_or_default();
                acc = RationalFn::from_parts(ComplexPoly::from_exact(lowered), env, &[]);
            }
            for t in pf.terms.iter().filter(|t| t.pole.norm() > 1.0) {
                let v = -t.pole;
                for j in 0..t.order {
                    let w = v.powi(-1 - j as i32);
                    acc = &acc + &pole_term(t.coeff * w, t.envelope * w.norm(), t.pole, t.order - j);
                }
            }
            Ok(acc)
        }
    }
}

/// Assembles `G_n`, `D_n`, `J_n` for the measure with weight derivative
/// `f(e^{it}) = w'(t)` and orthogonal polynomials `seq`.
pub fn build_gdj(seq: &OpucSequence, n: usize, f: &RationalFn, region: Region) -> Result<GdjTriple> {
    if n == 0 {
        return Err(Error::InvalidInput("degree must be >= 1".into()));
    }
    let d = n - 1;
    let phi = RationalFn::from_poly(seq.orthonormal(d)?);
    let star = RationalFn::from_poly(seq.orthonormal_reversed(d)?);
    let i = Complex64::new(0.0, 1.0);
    let shift = |k: usize| -> i32 { -(k as i32) };

    // |phi^*|^2 = phi^* * zeta^{-d} phi on the circle
    let rg = (&(&phi * &star) * f).shift(shift(d)).scale(i);
    let rd = (&(&star * &star) * f).shift(shift(n)).scale(-i);
    let rj = (&(&phi * &phi) * f).shift(2 - n as i32).scale(i);

    Ok(GdjTriple {
        g: circle_cauchy_transform(&rg, region)?,
        d: circle_cauchy_transform(&rd, region)?.shift(1),
        j: circle_cauchy_transform(&rj, region)?,
        region,
        n,
    })
}

/// `G_n`, `D_n`, `J_n` for the Bernstein-Szego measure with weight
/// `1 / |phi_{n-1}|^2` built from `seq`, in closed form.
///
/// With `d = n - 1`, `Phi = Phi_d`, `W = zeta^d / (phi phi^*)` and
/// `N = d Phi Phi^* - z (Phi Phi^*)'`, residue calculus reduces the integrals
/// to
///
/// * outside the disk: `G = Phi'/Phi - d/z`, `D = N / (z Phi^2)`, `J = 0`;
/// * inside the disk: `G = -Phi^*' / Phi^*`, `D = 0`, `J = N / Phi^{*2}`.
///
/// Nothing here cancels numerically, so this stays accurate when the roots
/// of `Phi` crowd the unit circle, where the general construction through
/// the weight derivative loses digits.
pub fn bernstein_szego_gdj(seq: &OpucSequence, n: usize, region: Region) -> Result<GdjTriple> {
    if n == 0 {
        return Err(Error::InvalidInput("degree must be >= 1".into()));
    }
    let d = n - 1;
    let phi = seq.monic(d)?;
    let star = seq.reversed(d)?;
    let df = Complex64::new(d as f64, 0.0);
    let product = phi * star;
    let n_poly = &product.scale(df) - &product.derivative().shift_up(1);
    // factor once so that squared denominators keep exact double poles
    let over = |num: ComplexPoly, den: &ComplexPoly, power: usize, origin: bool| -> Result<RationalFn> {
        let mut poles: Vec<Pole> = factor(den)?
            .into_iter()
            .map(|p| Pole { location: p.location, multiplicity: p.multiplicity * power })
            .collect();
        if origin {
            poles.push(Pole { location: Complex64::new(0.0, 0.0), multiplicity: 1 });
        }
        let lead = den.leading().powu(power as u32);
        Ok(RationalFn::from_factored(num.scale(lead.inv()), &poles))
    };
    let (g, dd, j) = match region {
        Region::Exterior => {
            let g_num = &phi.derivative().shift_up(1) - &phi.scale(df);
            (over(g_num, phi, 1, true)?, over(n_poly, phi, 2, true)?, RationalFn::zero())
        }
        Region::Interior => {
            (over(-&star.derivative(), star, 1, false)?, RationalFn::zero(), over(n_poly, star, 2, false)?)
        }
    };
    Ok(GdjTriple { g, d: dd, j, region, n })
}

/// `G_n`, `D_n`, `J_n` for a measure, with its orthogonal polynomials
/// `seq`. Bernstein-Szego and sieved weights whose polynomial already sits
/// in `seq` (sieved needs `n > M`) take the closed form; everything else
/// goes through the weight derivative.
pub fn measure_gdj(measure: &MeasureSpec, seq: &OpucSequence, n: usize, region: Region) -> Result<GdjTriple> {
    let closed = match (measure.name(), measure.sieve()) {
        (Some(NamedMeasure::BernsteinSzego), _) => n >= 2,
        (Some(NamedMeasure::SievedBs), Some(m)) => n > m,
        _ => false,
    };
    if closed {
        bernstein_szego_gdj(seq, n, region)
    } else {
        build_gdj(seq, n, &measure.weight_derivative()?, region)
    }
}

/// Trapezoid rule for the defining theta-integrals of `G_n`, `D_n`, `J_n`,
/// using `w'` straight from the measure (closed form for the named
/// examples). `grid` must be a power of two, at least 1024.
pub fn quadrature_oracle(
    seq: &OpucSequence,
    n: usize,
    measure: &MeasureSpec,
    which: Integral,
    z: Complex64,
    grid: usize,
) -> Result<Complex64> {
    if grid < 1024 || !grid.is_power_of_two() {
        return Err(Error::InvalidGrid(grid));
    }
    let distance = (z.norm() - 1.0).abs();
    if distance < 1e-6 {
        return Err(Error::NearSingularEvaluation { distance });
    }
    if n == 0 {
        return Err(Error::InvalidInput("degree must be >= 1".into()));
    }
    let phi = seq.orthonormal(n - 1)?;
    let star = seq.orthonormal_reversed(n - 1)?;
    let i = Complex64::new(0.0, 1.0);
    // named measures have a closed-form w'; build the rational one only once
    let rational = match measure.name() {
        Some(_) => None,
        None => Some(measure.weight_derivative()?),
    };
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..grid {
        let t = TAU * k as f64 / grid as f64;
        let e = Complex64::from_polar(1.0, t);
        let wp = match &rational {
            Some(f) => f.eval(e).re,
            None => measure.weight_derivative_at(t)?,
        };
        let kernel = wp / (z - e);
        sum += match which {
            Integral::G => star.eval(e).norm_sqr() * kernel,
            Integral::D => star.eval(e).powu(2) * kernel * Complex64::from_polar(1.0, -(n as f64) * t),
            Integral::J => phi.eval(e).powu(2) * kernel * Complex64::from_polar(1.0, -(n as f64 - 2.0) * t),
        };
    }
    let mean = sum / grid as f64;
    Ok(match which {
        Integral::G | Integral::J => i * mean,
        Integral::D => -i * z * mean,
    })
}
