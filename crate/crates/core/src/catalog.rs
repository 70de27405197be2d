//! Closed forms of the worked examples.
//!
//! Each function builds the displayed formula directly from polynomials,
//! independent of the quadrature-free pipeline in [`crate::cauchy`], so the
//! two can be compared. The Bernstein-Szego and sieved examples are worked at
//! `zeta = 1/2`.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::cauchy::Region;
use crate::error::{Error, Result};
use crate::poly::ComplexPoly;
use crate::ratfun::{Pole, RationalFn};

/// `G_n`, `D_n`, `J_n` in closed form.
#[derive(Clone, Debug)]
pub struct ClosedForms {
    pub g: RationalFn,
    pub d: RationalFn,
    pub j: RationalFn,
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn pole(location: Complex64, multiplicity: usize) -> Pole {
    Pole { location, multiplicity }
}

/// `sum c z^k` over integer powers `k`, possibly negative.
fn laurent(terms: impl IntoIterator<Item = (i32, f64)>) -> RationalFn {
    let terms: Vec<(i32, f64)> = terms.into_iter().collect();
    let low = terms.iter().map(|t| t.0).min().unwrap_or(0).min(0);
    let high = terms.iter().map(|t| t.0).max().unwrap_or(0).max(0);
    let mut coeffs = vec![real(0.0); (high - low + 1) as usize];
    for (k, c) in terms {
        coeffs[(k - low) as usize] += c;
    }
    RationalFn::from_poly(ComplexPoly::new(coeffs)).shift(low)
}

/// Roots of `2 z^M - 1`.
fn sieve_points(m: usize) -> Vec<Complex64> {
    let r = 0.5f64.powf(1.0 / m as f64);
    (1..=m)
        .map(|j| Complex64::from_polar(r, TAU * j as f64 / m as f64))
        .collect()
}

/// `(2 z^M - 1)^power` as a pole list (leading factor `2^power` left out).
fn sieve_poles(m: usize, power: usize) -> Vec<Pole> {
    sieve_points(m).into_iter().map(|x| pole(x, power)).collect()
}

fn with_origin(mut poles: Vec<Pole>, order: usize) -> Vec<Pole> {
    if order > 0 {
        poles.push(pole(real(0.0), order));
    }
    poles
}

fn require_degree(n: usize, min: usize) -> Result<()> {
    if n < min {
        Err(Error::InvalidInput(format!("closed form needs n >= {min}, got {n}")))
    } else {
        Ok(())
    }
}

/// Lebesgue measure: `w' = 0`, so all three integrals vanish and
/// `h_n(z; beta; beta) = n conj(beta)`.
pub fn lebesgue(_n: usize) -> ClosedForms {
    ClosedForms { g: RationalFn::zero(), d: RationalFn::zero(), j: RationalFn::zero() }
}

pub fn lebesgue_h(n: usize, beta: Complex64) -> RationalFn {
    RationalFn::constant(beta.conj() * n as f64)
}

/// Bernstein-Szego measure with `zeta = 1/2`. The interior forms need `n >= 2`.
pub fn bernstein_szego_half(n: usize, region: Region) -> Result<ClosedForms> {
    let half = real(0.5);
    match region {
        Region::Exterior => {
            require_degree(n, 1)?;
            // 1 / (z (2z - 1)) and 2 (z^2 - 1) / ((2z - 1)^2 z^{n-1})
            let g = RationalFn::from_factored(ComplexPoly::constant(half), &[pole(real(0.0), 1), pole(half, 1)]);
            let d = RationalFn::from_factored(
                ComplexPoly::from_real(&[-0.5, 0.0, 0.5]),
                &with_origin(vec![pole(half, 2)], n - 1),
            );
            Ok(ClosedForms { g, d, j: RationalFn::zero() })
        }
        Region::Interior => {
            require_degree(n, 2)?;
            let g = RationalFn::from_factored(ComplexPoly::constant(real(-1.0)), &[pole(real(2.0), 1)]);
            let j = RationalFn::from_factored(
                ComplexPoly::from_real(&[-2.0, 0.0, 2.0]).shift_up(n - 2),
                &[pole(real(2.0), 2)],
            );
            Ok(ClosedForms { g, d: RationalFn::zero(), j })
        }
    }
}

/// `h_n(z; beta; beta)` for the Bernstein-Szego measure with `zeta = 1/2`.
pub fn bernstein_szego_half_h(n: usize, beta: Complex64, region: Region) -> Result<RationalFn> {
    let bb = beta.conj();
    let nf = n as f64;
    match region {
        Region::Exterior => {
            require_degree(n, 1)?;
            // conj(beta) (z^n (2z-1)(n(2z-1) + 2) + 2 z conj(beta) (z^2 - 1)) / (z^n (2z-1)^2)
            let front = ComplexPoly::from_real(&[nf - 2.0, 4.0 - 4.0 * nf, 4.0 * nf]).shift_up(n);
            let back = ComplexPoly::new(vec![real(0.0), -2.0 * bb, real(0.0), 2.0 * bb]);
            let num = (&front + &back).scale(bb * 0.25);
            Ok(RationalFn::from_factored(num, &with_origin(vec![pole(real(0.5), 2)], n)))
        }
        Region::Interior => {
            require_degree(n, 2)?;
            // (conj(beta) z (z-2)(n(z-2) - 2z) - 2 z^n (z^2 - 1)) / (z (z-2)^2)
            let front = ComplexPoly::from_real(&[0.0, 4.0 * nf, 4.0 - 4.0 * nf, nf - 2.0]).scale(bb);
            let back = ComplexPoly::from_real(&[-2.0, 0.0, 2.0]).shift_up(n);
            let num = &front - &back;
            Ok(RationalFn::from_factored(num, &[pole(real(0.0), 1), pole(real(2.0), 2)]))
        }
    }
}

/// Sieved Bernstein-Szego measure with `zeta = 1/2`, exterior region, `n > M`.
pub fn sieved_half(n: usize, m: usize) -> Result<ClosedForms> {
    require_sieve(n, m)?;
    let mf = m as f64;
    // M / (z (2z^M - 1))
    let g = RationalFn::from_factored(
        ComplexPoly::constant(real(mf / 2.0)),
        &with_origin(sieve_poles(m, 1), 1),
    );
    // 2M (z^{2M} - 1) / ((2z^M - 1)^2 z^{n-M})
    let mut coeffs = vec![real(0.0); 2 * m + 1];
    coeffs[0] = real(-mf / 2.0);
    coeffs[2 * m] = real(mf / 2.0);
    let d = RationalFn::from_factored(ComplexPoly::new(coeffs), &with_origin(sieve_poles(m, 2), n - m));
    Ok(ClosedForms { g, d, j: RationalFn::zero() })
}

fn require_sieve(n: usize, m: usize) -> Result<()> {
    if m == 0 || n <= m {
        return Err(Error::InvalidInput(format!("sieved closed form needs n > M >= 1, got n = {n}, M = {m}")));
    }
    Ok(())
}

/// `conj(beta) (n + 2M / (2z^M - 1) + 2M conj(beta) (z^{2M} - 1) / ((2z^M - 1)^2 z^{n-M}))`.
pub fn sieved_half_h(n: usize, m: usize, beta: Complex64) -> Result<RationalFn> {
    require_sieve(n, m)?;
    let bb = beta.conj();
    let forms = sieved_half(n, m)?;
    let middle = RationalFn::from_factored(ComplexPoly::constant(real(m as f64)), &sieve_poles(m, 1));
    let inner = &(&RationalFn::constant(real(n as f64)) + &middle) + &forms.d.scale(bb);
    Ok(inner.scale(bb))
}

/// Measure `(1 - cos t) dt / 2pi`. The interior `D_n` carries the squared
/// factor `(n - 1 - k)^2`, checked against quadrature of the defining
/// integral.
pub fn single_moment(n: usize, region: Region) -> Result<ClosedForms> {
    let nf = n as f64;
    let norm = 1.0 / (nf * (nf + 1.0));
    match region {
        Region::Exterior => {
            require_degree(n, 1)?;
            let g = laurent((1..=n).map(|k| {
                let kf = k as f64;
                (-(k as i32) - 1, norm * (kf * kf - nf - nf * nf))
            }));
            let mut d_terms = vec![(0, -norm * nf * nf), (-(n as i32) - 1, norm * nf * nf)];
            d_terms.extend((1..=n).map(|k| {
                let kf = k as f64;
                (-(k as i32), -norm * (nf * nf + 2.0 * nf - 2.0 * kf * nf - kf * kf))
            }));
            let d = laurent(d_terms);
            let j = laurent((0..n).map(|k| {
                let diff = (n - k) as f64;
                (-(k as i32) - 1, -norm * diff * diff)
            }));
            Ok(ClosedForms { g, d, j })
        }
        Region::Interior => {
            require_degree(n, 2)?;
            let g = laurent((0..n).map(|k| {
                let kp = (k + 1) as f64;
                (k as i32, -norm * (nf * nf + nf - kp * kp))
            }));
            let d = laurent((0..=n - 2).map(|k| {
                let diff = (n - 1 - k) as f64;
                (k as i32 + 1, norm * diff * diff)
            }));
            let mut j_terms = vec![(n as i32, -norm * nf * nf)];
            j_terms.extend((0..n).map(|k| {
                let s = (k + n + 1) as f64;
                (k as i32, -norm * (s * s - 2.0 * nf - 2.0 * nf * nf))
            }));
            Ok(ClosedForms { g, d, j: laurent(j_terms) })
        }
    }
}

/// `h_n(z; -1; -1)` for the single-moment measure.
pub fn single_moment_h_minus_one(n: usize, region: Region) -> Result<RationalFn> {
    require_degree(n, if region == Region::Interior { 2 } else { 1 })?;
    let nf = n as f64;
    let mut coeffs = vec![real(0.0); n + 3];
    let (den, poles) = match region {
        Region::Exterior => {
            // -n (n z^{n+2} - (n+2) z^{n+1} + z + 1) / ((n+1) z^{n+1} (z-1))
            coeffs[n + 2] = real(nf);
            coeffs[n + 1] = real(-(nf + 2.0));
            coeffs[1] = real(1.0);
            coeffs[0] = real(1.0);
            (-(nf + 1.0), vec![pole(real(0.0), n + 1), pole(real(1.0), 1)])
        }
        Region::Interior => {
            // n (z^{n+2} + z^{n+1} - (n+2) z + n) / ((n+1)(z-1))
            coeffs[n + 2] = real(1.0);
            coeffs[n + 1] = real(1.0);
            coeffs[1] = real(-(nf + 2.0));
            coeffs[0] = real(nf);
            (nf + 1.0, vec![pole(real(1.0), 1)])
        }
    };
    let num = ComplexPoly::new(coeffs).scale(real(nf / den));
    Ok(RationalFn::from_factored(num, &poles))
}

/// `h_n(z; alpha_{n-1}; alpha_{n-1})` for the single-moment measure in the
/// exterior region, where `alpha_{n-1} = -1/(n+1)`:
/// `n ((n+1)^2 z^{n+3} - (2n^2+6n+3) z^{n+2} + (n+2)^2 z^{n+1} - z - 1)
///  / ((n+1)^3 z^{n+1} (z-1)^3)`.
pub fn single_moment_h_at_alpha(n: usize) -> Result<RationalFn> {
    require_degree(n, 1)?;
    let nf = n as f64;
    let mut coeffs = vec![real(0.0); n + 4];
    coeffs[n + 3] = real((nf + 1.0).powi(2));
    coeffs[n + 2] = real(-(2.0 * nf * nf + 6.0 * nf + 3.0));
    coeffs[n + 1] = real((nf + 2.0).powi(2));
    coeffs[1] = real(-1.0);
    coeffs[0] = real(-1.0);
    let num = ComplexPoly::new(coeffs).scale(real(nf / (nf + 1.0).powi(3)));
    Ok(RationalFn::from_factored(num, &[pole(real(0.0), n + 1), pole(real(1.0), 3)]))
}

/// Lame data `(location, t)` predicted for each example with `beta = -1`
/// (any unimodular `beta` for Bernstein-Szego and sieved): `+2` at each
/// double pole of `h`, `-1` at each simple zero, the origin carrying the
/// stated total.
pub fn expected_lame(example: Example, n: usize, beta: Complex64, region: Region) -> Result<Vec<(Complex64, f64)>> {
    let mut out = Vec::new();
    let minus_one_at = |poly: &ComplexPoly, out: &mut Vec<(Complex64, f64)>| -> Result<()> {
        for r in poly.roots()? {
            out.push((r, -1.0));
        }
        Ok(())
    };
    match (example, region) {
        (Example::Lebesgue, _) => out.push((real(0.0), 1.0 - n as f64)),
        (Example::BernsteinSzego, Region::Exterior) => {
            // P_1 = 4nz prod (z - p_j); the origin cancels against z^n
            let h = bernstein_szego_half_h(n, beta, region)?;
            out.push((real(0.5), 2.0));
            minus_one_at(h.numerator(), &mut out)?;
        }
        (Example::BernsteinSzego, Region::Interior) => {
            let h = bernstein_szego_half_h(n, beta, region)?;
            out.push((real(2.0), 2.0));
            out.push((real(0.0), 1.0 - n as f64));
            minus_one_at(h.numerator(), &mut out)?;
        }
        (Example::Sieved(m), Region::Exterior) => {
            let h = sieved_half_h(n, m, beta)?;
            out.extend(sieve_points(m).into_iter().map(|x| (x, 2.0)));
            out.push((real(0.0), 1.0 - m as f64));
            minus_one_at(h.numerator(), &mut out)?;
        }
        (Example::Sieved(_), Region::Interior) => {
            return Err(Error::InvalidInput("the sieved example is worked in the exterior region only".into()));
        }
        (Example::SingleMoment, _) => {
            let h = single_moment_h_minus_one(n, region)?;
            let origin = match region {
                Region::Exterior => 2.0,
                Region::Interior => 1.0 - n as f64,
            };
            out.push((real(0.0), origin));
            minus_one_at(h.numerator(), &mut out)?;
        }
    }
    Ok(out)
}

/// The worked examples.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Example {
    Lebesgue,
    BernsteinSzego,
    /// Sieved with the given `M`.
    Sieved(usize),
    SingleMoment,
}

/// Closed-form integrals for an example, if one is displayed for the region.
pub fn closed_forms(example: Example, n: usize, region: Region) -> Result<ClosedForms> {
    match (example, region) {
        (Example::Lebesgue, _) => Ok(lebesgue(n)),
        (Example::BernsteinSzego, _) => bernstein_szego_half(n, region),
        (Example::Sieved(m), Region::Exterior) => sieved_half(n, m),
        (Example::Sieved(_), Region::Interior) => {
            Err(Error::InvalidInput("the sieved example is worked in the exterior region only".into()))
        }
        (Example::SingleMoment, _) => single_moment(n, region),
    }
}

/// Closed-form `h_n(z; beta; beta)`. The single-moment example is displayed
/// only for `beta = -1`.
pub fn closed_h(example: Example, n: usize, beta: Complex64, region: Region) -> Result<RationalFn> {
    match example {
        Example::Lebesgue => Ok(lebesgue_h(n, beta)),
        Example::BernsteinSzego => bernstein_szego_half_h(n, beta, region),
        Example::Sieved(m) => match region {
            Region::Exterior => sieved_half_h(n, m, beta),
            Region::Interior => {
                Err(Error::InvalidInput("the sieved example is worked in the exterior region only".into()))
            }
        },
        Example::SingleMoment => {
            if (beta + 1.0).norm() > 1e-15 {
                return Err(Error::InvalidInput("the single-moment h is tabulated for beta = -1 only".into()));
            }
            single_moment_h_minus_one(n, region)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cauchy::build_gdj;
    use crate::ode::h_fn;
    use crate::opuc::MeasureSpec;
    use crate::sampling::circle_points;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rel_dev(a: &RationalFn, b: &RationalFn, region: Region) -> f64 {
        circle_points(region.sample_radius(), 16)
            .into_iter()
            .map(|z| {
                let (x, y) = (a.eval(z), b.eval(z));
                (x - y).norm() / (1.0 + y.norm())
            })
            .fold(0.0, f64::max)
    }

    fn measure(example: Example) -> MeasureSpec {
        match example {
            Example::Lebesgue => MeasureSpec::lebesgue(),
            Example::BernsteinSzego => MeasureSpec::bernstein_szego(c(0.5, 0.0)).unwrap(),
            Example::Sieved(m) => MeasureSpec::sieved(c(0.5, 0.0), m).unwrap(),
            Example::SingleMoment => MeasureSpec::single_moment(),
        }
    }

    #[test]
    fn closed_forms_match_pipeline() {
        let cases = [
            (Example::Lebesgue, Region::Exterior),
            (Example::BernsteinSzego, Region::Exterior),
            (Example::BernsteinSzego, Region::Interior),
            (Example::Sieved(2), Region::Exterior),
            (Example::Sieved(3), Region::Exterior),
            (Example::SingleMoment, Region::Exterior),
            (Example::SingleMoment, Region::Interior),
        ];
        for (example, region) in cases {
            let m = measure(example);
            for n in 2..=7 {
                let Ok(forms) = closed_forms(example, n, region) else { continue };
                let seq = m.opuc_sequence(n).unwrap();
                let gdj = build_gdj(&seq, n, &m.weight_derivative().unwrap(), region).unwrap();
                assert!(rel_dev(&gdj.g, &forms.g, region) < 1e-12, "{example:?} {region} G n={n}");
                assert!(rel_dev(&gdj.d, &forms.d, region) < 1e-12, "{example:?} {region} D n={n}");
                assert!(rel_dev(&gdj.j, &forms.j, region) < 1e-12, "{example:?} {region} J n={n}");
                let beta = c(-1.0, 0.0);
                let h = h_fn(&seq, n, &gdj, beta, beta).unwrap();
                let expected = closed_h(example, n, beta, region).unwrap();
                assert!(rel_dev(&h, &expected, region) < 1e-12, "{example:?} {region} h n={n}");
            }
        }
    }

    #[test]
    fn single_moment_h_at_alpha_matches() {
        let m = MeasureSpec::single_moment();
        for n in 2..=7 {
            let seq = m.opuc_sequence(n).unwrap();
            let gdj = build_gdj(&seq, n, &m.weight_derivative().unwrap(), Region::Exterior).unwrap();
            let a = seq.alpha(n - 1).unwrap();
            let h = h_fn(&seq, n, &gdj, a, a).unwrap();
            assert!(rel_dev(&h, &single_moment_h_at_alpha(n).unwrap(), Region::Exterior) < 1e-12, "n={n}");
        }
    }

    #[test]
    fn sieved_needs_n_above_m() {
        assert!(sieved_half(2, 2).is_err());
        assert!(sieved_half(3, 2).is_ok());
    }
}
