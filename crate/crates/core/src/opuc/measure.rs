use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{gram_schmidt_discrete, szego_sequence, validate_points, OpucSequence};
use crate::error::{Error, Result};
use crate::poly::ComplexPoly;
use crate::ratfun::{Pole, RationalFn};

const MASS_TOL: f64 = 1e-10;
const MAX_GRID_LOG2: u32 = 20;

/// The closed-form example measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedMeasure {
    Lebesgue,
    BernsteinSzego,
    SievedBs,
    SingleMoment,
}

impl NamedMeasure {
    pub fn as_str(self) -> &'static str {
        match self {
            NamedMeasure::Lebesgue => "lebesgue",
            NamedMeasure::BernsteinSzego => "bernstein_szego",
            NamedMeasure::SievedBs => "sieved_bs",
            NamedMeasure::SingleMoment => "single_moment",
        }
    }
}

impl std::str::FromStr for NamedMeasure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lebesgue" => Ok(NamedMeasure::Lebesgue),
            "bernstein_szego" => Ok(NamedMeasure::BernsteinSzego),
            "sieved_bs" | "sieved" => Ok(NamedMeasure::SievedBs),
            "single_moment" => Ok(NamedMeasure::SingleMoment),
            other => Err(Error::InvalidInput(format!("unknown measure name {other:?}"))),
        }
    }
}

#[derive(Clone, Debug)]
enum Kind {
    Named { name: NamedMeasure, zeta: Complex64, sieve: usize },
    Rational(RationalFn),
    Discrete(Vec<Complex64>),
}

/// A probability measure on the unit circle: one of the named examples,
/// an absolutely continuous measure with rational weight, or the uniform
/// measure on finitely many points.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "MeasureJson", into = "MeasureJson")]
pub struct MeasureSpec {
    kind: Kind,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum MeasureJson {
    Named {
        name: NamedMeasure,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        zeta: Option<Complex64>,
        #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
        m: Option<usize>,
    },
    RationalWeight {
        #[serde(rename = "W")]
        w: RationalFn,
    },
    Discrete {
        points: Vec<Complex64>,
    },
}

impl TryFrom<MeasureJson> for MeasureSpec {
    type Error = Error;

    fn try_from(value: MeasureJson) -> Result<Self> {
        match value {
            MeasureJson::Named { name, zeta, m } => MeasureSpec::named(
                name,
                zeta.unwrap_or(Complex64::new(0.5, 0.0)),
                m.unwrap_or(2),
            ),
            MeasureJson::RationalWeight { w } => MeasureSpec::rational_weight(w),
            MeasureJson::Discrete { points } => MeasureSpec::discrete(&points),
        }
    }
}

impl From<MeasureSpec> for MeasureJson {
    fn from(m: MeasureSpec) -> Self {
        match m.kind {
            Kind::Named { name, zeta, sieve } => MeasureJson::Named {
                name,
                zeta: matches!(name, NamedMeasure::BernsteinSzego | NamedMeasure::SievedBs)
                    .then_some(zeta),
                m: (name == NamedMeasure::SievedBs).then_some(sieve),
            },
            Kind::Rational(w) => MeasureJson::RationalWeight { w },
            Kind::Discrete(points) => MeasureJson::Discrete { points },
        }
    }
}

impl MeasureSpec {
    pub fn lebesgue() -> Self {
        MeasureSpec {
            kind: Kind::Named { name: NamedMeasure::Lebesgue, zeta: Complex64::new(0.0, 0.0), sieve: 1 },
        }
    }

    pub fn single_moment() -> Self {
        MeasureSpec {
            kind: Kind::Named { name: NamedMeasure::SingleMoment, zeta: Complex64::new(0.0, 0.0), sieve: 1 },
        }
    }

    /// Weight `(1 - |zeta|^2) / |1 - zeta e^{i theta}|^2`.
    pub fn bernstein_szego(zeta: Complex64) -> Result<Self> {
        Self::named(NamedMeasure::BernsteinSzego, zeta, 1)
    }

    /// Weight `(1 - |zeta|^2) / |1 - zeta e^{i M theta}|^2`.
    pub fn sieved(zeta: Complex64, m: usize) -> Result<Self> {
        Self::named(NamedMeasure::SievedBs, zeta, m)
    }

    pub fn named(name: NamedMeasure, zeta: Complex64, m: usize) -> Result<Self> {
        let (zeta, sieve) = match name {
            NamedMeasure::Lebesgue | NamedMeasure::SingleMoment => (Complex64::new(0.0, 0.0), 1),
            NamedMeasure::BernsteinSzego => (zeta, 1),
            NamedMeasure::SievedBs => (zeta, m),
        };
        if !(zeta.norm() < 1.0) {
            return Err(Error::InvalidWeight(format!("|zeta| = {} must be < 1", zeta.norm())));
        }
        if sieve == 0 {
            return Err(Error::InvalidWeight("sieve order M must be >= 1".into()));
        }
        Ok(MeasureSpec { kind: Kind::Named { name, zeta, sieve } })
    }

    /// Absolutely continuous measure `W(e^{i theta}) d theta / 2 pi`; `W`
    /// must be real and positive on the circle and have unit mass.
    pub fn rational_weight(w: RationalFn) -> Result<Self> {
        let spec = Self::rational_weight_unchecked(w);
        spec.validate()?;
        Ok(spec)
    }

    pub(crate) fn rational_weight_unchecked(w: RationalFn) -> Self {
        MeasureSpec { kind: Kind::Rational(w) }
    }

    /// Uniform measure on the points (projected onto the circle).
    pub fn discrete(points: &[Complex64]) -> Result<Self> {
        Ok(MeasureSpec { kind: Kind::Discrete(validate_points(points)?) })
    }

    pub fn name(&self) -> Option<NamedMeasure> {
        match self.kind {
            Kind::Named { name, .. } => Some(name),
            _ => None,
        }
    }

    /// `zeta` of the (sieved) Bernstein-Szego examples.
    pub fn zeta(&self) -> Option<Complex64> {
        match self.kind {
            Kind::Named { name: NamedMeasure::BernsteinSzego | NamedMeasure::SievedBs, zeta, .. } => Some(zeta),
            _ => None,
        }
    }

    pub fn sieve(&self) -> Option<usize> {
        match self.kind {
            Kind::Named { name: NamedMeasure::SievedBs, sieve, .. } => Some(sieve),
            _ => None,
        }
    }

    pub fn points(&self) -> Option<&[Complex64]> {
        match &self.kind {
            Kind::Discrete(p) => Some(p),
            _ => None,
        }
    }

    /// Checks positivity on the circle and unit total mass.
    pub fn validate(&self) -> Result<()> {
        let Kind::Rational(w) = &self.kind else {
            return Ok(());
        };
        for pole in w.poles() {
            if (pole.location.norm() - 1.0).abs() < 1e-10 {
                return Err(Error::InvalidWeight(format!(
                    "pole on the unit circle at {}",
                    crate::fmt_complex(pole.location)
                )));
            }
        }
        let mut scale = 0.0f64;
        let moments = adaptive_moments(|t| w.eval(Complex64::from_polar(1.0, t)), 0, |v| {
            scale = scale.max(v.norm());
            // isolated zeros (as for 1 - cos) are allowed
            if v.re < -1e-12 * scale.max(1.0) {
                return Err(Error::InvalidWeight(format!("weight is not positive (value {})", crate::fmt_complex(v))));
            }
            Ok(())
        })?;
        // imaginary parts must vanish relative to the weight's size
        let mut worst_imag = 0.0f64;
        for k in 0..256 {
            let v = w.eval(Complex64::from_polar(1.0, TAU * (k as f64 + 0.5) / 256.0));
            worst_imag = worst_imag.max(v.im.abs());
        }
        if worst_imag > 1e-10 * scale.max(1.0) {
            return Err(Error::InvalidWeight(format!("weight is not real on the circle (imag {worst_imag:e})")));
        }
        let mass = moments[0];
        if (mass.re - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidWeight(format!("total mass {} differs from 1", mass.re)));
        }
        Ok(())
    }

    /// `W(zeta)` with `w(theta) = W(e^{i theta})`.
    pub fn weight(&self) -> Result<RationalFn> {
        match &self.kind {
            Kind::Named { name, zeta, sieve } => Ok(named_weight(*name, *zeta, *sieve)),
            Kind::Rational(w) => Ok(w.clone()),
            Kind::Discrete(_) => Err(Error::NoDerivative),
        }
    }

    /// `f(zeta) = i zeta W'(zeta)`, so that `w'(theta) = f(e^{i theta})`.
    pub fn weight_derivative(&self) -> Result<RationalFn> {
        let w = self.weight()?;
        let iz = RationalFn::from_poly(ComplexPoly::monomial(Complex64::new(0.0, 1.0), 1));
        Ok(&w.derivative() * &iz)
    }

    /// `w(theta)`, closed form for the named measures.
    pub fn weight_at(&self, theta: f64) -> Result<f64> {
        match &self.kind {
            Kind::Named { name, zeta, sieve } => Ok(match name {
                NamedMeasure::Lebesgue => 1.0,
                NamedMeasure::SingleMoment => 1.0 - theta.cos(),
                NamedMeasure::BernsteinSzego | NamedMeasure::SievedBs => {
                    let e = Complex64::from_polar(1.0, *sieve as f64 * theta);
                    (1.0 - zeta.norm_sqr()) / (Complex64::new(1.0, 0.0) - zeta * e).norm_sqr()
                }
            }),
            Kind::Rational(w) => Ok(w.eval(Complex64::from_polar(1.0, theta)).re),
            Kind::Discrete(_) => Err(Error::NoDerivative),
        }
    }

    /// `w'(theta)`, closed form for the named measures.
    pub fn weight_derivative_at(&self, theta: f64) -> Result<f64> {
        match &self.kind {
            Kind::Named { name, zeta, sieve } => Ok(match name {
                NamedMeasure::Lebesgue => 0.0,
                NamedMeasure::SingleMoment => theta.sin(),
                NamedMeasure::BernsteinSzego | NamedMeasure::SievedBs => {
                    let m = *sieve as f64;
                    let e = Complex64::from_polar(1.0, m * theta);
                    let den = (Complex64::new(1.0, 0.0) - zeta * e).norm_sqr();
                    -(1.0 - zeta.norm_sqr()) * 2.0 * m * (zeta * e).im / (den * den)
                }
            }),
            Kind::Rational(_) => Ok(self.weight_derivative()?.eval(Complex64::from_polar(1.0, theta)).re),
            Kind::Discrete(_) => Err(Error::NoDerivative),
        }
    }

    /// `alpha_0 .. alpha_{count-1}`.
    pub fn verblunsky(&self, count: usize) -> Result<Vec<Complex64>> {
        match &self.kind {
            Kind::Named { name, zeta, sieve } => Ok((0..count)
                .map(|k| match name {
                    NamedMeasure::Lebesgue => Complex64::new(0.0, 0.0),
                    NamedMeasure::SingleMoment => Complex64::new(-1.0 / (k as f64 + 2.0), 0.0),
                    NamedMeasure::BernsteinSzego | NamedMeasure::SievedBs => {
                        if k + 1 == *sieve {
                            *zeta
                        } else {
                            Complex64::new(0.0, 0.0)
                        }
                    }
                })
                .collect()),
            Kind::Rational(w) => {
                let moments = adaptive_moments(|t| w.eval(Complex64::from_polar(1.0, t)), count, |_| Ok(()))?;
                verblunsky_from_moments(&moments)
            }
            Kind::Discrete(points) => {
                let available = points.len() - 1;
                if count > available {
                    return Err(Error::InsufficientSequence { required: count, available });
                }
                Ok(gram_schmidt_discrete(points)?.alphas()[..count].to_vec())
            }
        }
    }

    /// Orthogonal polynomials through degree `degree`.
    pub fn opuc_sequence(&self, degree: usize) -> Result<OpucSequence> {
        match &self.kind {
            Kind::Discrete(points) => gram_schmidt_discrete(points)?.truncated(degree),
            _ => szego_sequence(&self.verblunsky(degree)?, degree),
        }
    }
}

fn named_weight(name: NamedMeasure, zeta: Complex64, sieve: usize) -> RationalFn {
    let one = Complex64::new(1.0, 0.0);
    match name {
        NamedMeasure::Lebesgue => RationalFn::constant(one),
        // 1 - (u + 1/u)/2 = -(u - 1)^2 / (2u)
        NamedMeasure::SingleMoment => RationalFn::from_factored(
            ComplexPoly::from_real(&[-0.5, 1.0, -0.5]),
            &[Pole { location: Complex64::new(0.0, 0.0), multiplicity: 1 }],
        ),
        NamedMeasure::BernsteinSzego | NamedMeasure::SievedBs => {
            if zeta.norm() == 0.0 {
                return RationalFn::constant(one);
            }
            // (1-|zeta|^2) u^M / ((1 - zeta u^M)(u^M - conj zeta))
            //   = -(1-|zeta|^2)/zeta * u^M / ((u^M - 1/zeta)(u^M - conj zeta))
            let m = sieve;
            let mut poles = Vec::with_capacity(2 * m);
            for target in [zeta.inv(), zeta.conj()] {
                let r = target.norm().powf(1.0 / m as f64);
                let arg = target.arg();
                for j in 0..m {
                    poles.push(Pole {
                        location: Complex64::from_polar(r, (arg + TAU * j as f64) / m as f64),
                        multiplicity: 1,
                    });
                }
            }
            let c = -(1.0 - zeta.norm_sqr()) / zeta;
            RationalFn::from_factored(ComplexPoly::monomial(c, m), &poles)
        }
    }
}

/// Trigonometric moments `m_k = int e^{i k theta} w(theta) d theta / 2 pi`
/// for `k = 0..=count`, by trapezoid sums doubled until they settle.
fn adaptive_moments(
    w: impl Fn(f64) -> Complex64,
    count: usize,
    mut inspect: impl FnMut(Complex64) -> Result<()>,
) -> Result<Vec<Complex64>> {
    let mut previous: Option<Vec<Complex64>> = None;
    for log2 in 8..=MAX_GRID_LOG2 {
        let n = 1usize << log2;
        let mut moments = vec![Complex64::new(0.0, 0.0); count + 1];
        for j in 0..n {
            let t = TAU * j as f64 / n as f64;
            let v = w(t);
            inspect(v)?;
            let e = Complex64::from_polar(1.0, t);
            let mut p = v;
            for m in moments.iter_mut() {
                *m += p;
                p *= e;
            }
        }
        for m in moments.iter_mut() {
            *m /= n as f64;
        }
        if let Some(prev) = &previous {
            let scale = 1.0 + moments.iter().map(|m| m.norm()).fold(0.0, f64::max);
            let diff = moments.iter().zip(prev).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            if diff < 1e-15 * scale {
                return Ok(moments);
            }
        }
        previous = Some(moments);
    }
    Err(Error::InvalidWeight("moment quadrature did not converge".into()))
}

/// Levinson recursion: Verblunsky coefficients from `m_0 ..= m_K`.
pub fn verblunsky_from_moments(moments: &[Complex64]) -> Result<Vec<Complex64>> {
    let Some(&m0) = moments.first() else {
        return Ok(Vec::new());
    };
    if !(m0.re > 0.0) {
        return Err(Error::DegenerateMeasure("zeroth moment is not positive".into()));
    }
    let m: Vec<Complex64> = moments.iter().map(|v| v / m0.re).collect();
    let count = m.len() - 1;
    let mut phi = vec![Complex64::new(1.0, 0.0)];
    let mut norm = 1.0;
    let mut alphas = Vec::with_capacity(count);
    for k in 0..count {
        let inner: Complex64 = phi.iter().enumerate().map(|(j, a)| a * m[j + 1]).sum();
        let alpha = (inner / norm).conj();
        if alpha.norm() >= 1.0 {
            return Err(Error::InvalidVerblunsky { index: k, modulus: alpha.norm() });
        }
        // Phi_{k+1} = z Phi_k - conj(alpha) Phi_k^*
        let mut next = vec![Complex64::new(0.0, 0.0); k + 2];
        for (j, a) in phi.iter().enumerate() {
            next[j + 1] += a;
            next[k - j] -= alpha.conj() * a.conj();
        }
        phi = next;
        norm *= 1.0 - alpha.norm_sqr();
        alphas.push(alpha);
    }
    Ok(alphas)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn named_weights_are_probability_measures() {
        let specs = [
            MeasureSpec::lebesgue(),
            MeasureSpec::single_moment(),
            MeasureSpec::bernstein_szego(c(0.5, 0.0)).unwrap(),
            MeasureSpec::bernstein_szego(c(0.3, -0.4)).unwrap(),
            MeasureSpec::sieved(c(0.5, 0.0), 3).unwrap(),
        ];
        for spec in specs {
            let w = spec.weight().unwrap();
            let checked = MeasureSpec::rational_weight(w.clone()).unwrap();
            for k in 0..32 {
                let t = TAU * k as f64 / 32.0 + 0.1;
                let exact = spec.weight_at(t).unwrap();
                assert!((checked.weight_at(t).unwrap() - exact).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn moment_alphas_match_closed_forms() {
        let specs = [
            MeasureSpec::single_moment(),
            MeasureSpec::bernstein_szego(c(0.5, 0.0)).unwrap(),
            MeasureSpec::bernstein_szego(c(0.3, -0.4)).unwrap(),
            MeasureSpec::sieved(c(0.5, 0.0), 2).unwrap(),
            MeasureSpec::sieved(c(0.2, 0.5), 3).unwrap(),
        ];
        for spec in specs {
            let closed = spec.verblunsky(8).unwrap();
            let numeric = MeasureSpec::rational_weight_unchecked(spec.weight().unwrap())
                .verblunsky(8)
                .unwrap();
            for (a, b) in closed.iter().zip(&numeric) {
                assert!((a - b).norm() < 1e-12, "{:?}: {a} vs {b}", spec.name());
            }
        }
    }

    #[test]
    fn weight_derivative_examples() {
        assert!(MeasureSpec::lebesgue().weight_derivative().unwrap().is_zero());
        let f = MeasureSpec::single_moment().weight_derivative().unwrap();
        for k in 0..16 {
            let z = Complex64::from_polar(1.0, TAU * k as f64 / 16.0 + 0.2);
            let expected = c(0.0, -1.0) * (z * z - 1.0) / (z * 2.0);
            assert!((f.eval(z) - expected).norm() < 1e-14);
        }
        let spec = MeasureSpec::bernstein_szego(c(0.5, 0.0)).unwrap();
        let f = spec.weight_derivative().unwrap();
        let h = 1e-4;
        for k in 0..16 {
            let t = TAU * k as f64 / 16.0 + 0.05;
            let v = f.eval(Complex64::from_polar(1.0, t));
            assert!(v.im.abs() < 1e-10);
            let fd = (spec.weight_at(t + h).unwrap() - spec.weight_at(t - h).unwrap()) / (2.0 * h);
            assert!((v.re - fd).abs() < 1e-6);
            assert!((v.re - spec.weight_derivative_at(t).unwrap()).abs() < 1e-12);
        }
        let d = MeasureSpec::discrete(&[c(1.0, 0.0), c(-1.0, 0.0)]).unwrap();
        assert_eq!(d.weight_derivative().unwrap_err(), Error::NoDerivative);
    }

    #[test]
    fn invalid_weights_rejected() {
        let twice = RationalFn::constant(c(2.0, 0.0));
        assert!(matches!(MeasureSpec::rational_weight(twice), Err(Error::InvalidWeight(_))));
        let signed = RationalFn::from_poly(ComplexPoly::from_real(&[1.0, 1.0]));
        assert!(matches!(MeasureSpec::rational_weight(signed), Err(Error::InvalidWeight(_))));
        assert!(MeasureSpec::bernstein_szego(c(1.0, 0.0)).is_err());
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"type":"named","name":"sieved_bs","zeta":[0.5,0.0],"M":3}"#;
        let spec: MeasureSpec = serde_json::from_str(text).unwrap();
        assert_eq!(spec.sieve(), Some(3));
        assert_eq!(serde_json::to_string(&spec).unwrap(), text);

        let spec: MeasureSpec = serde_json::from_str(r#"{"type":"named","name":"lebesgue"}"#).unwrap();
        assert_eq!(spec.name(), Some(NamedMeasure::Lebesgue));

        let spec: MeasureSpec =
            serde_json::from_str(r#"{"type":"discrete","points":[[1.0,0.0],[-1.0,0.0]]}"#).unwrap();
        assert_eq!(spec.points().unwrap().len(), 2);
        assert!(serde_json::from_str::<MeasureSpec>(r#"{"type":"discrete","points":[[1.0,0.0],[1.0,0.0]]}"#).is_err());

        let w = MeasureSpec::bernstein_szego(c(0.5, 0.0)).unwrap().weight().unwrap();
        let spec = MeasureSpec::rational_weight(w).unwrap();
        let text = serde_json::to_string(&spec).unwrap();
        let back: MeasureSpec = serde_json::from_str(&text).unwrap();
        let a = back.verblunsky(3).unwrap();
        assert!((a[0] - c(0.5, 0.0)).norm() < 1e-12);
    }
}
