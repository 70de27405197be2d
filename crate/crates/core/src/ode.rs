//! The second-order equation and first-order system satisfied by
//! paraorthogonal polynomials, and residual checks for both.

use num_complex::Complex64;
use serde::Serialize;

use crate::cauchy::{GdjTriple, Region};
use crate::error::{Error, Result};
use crate::opuc::{popuc, OpucSequence};
use crate::poly::ComplexPoly;
use crate::ratfun::{wronskian, RationalFn};
use crate::sampling::region_samples;

/// Pass threshold for [`verify_ode`].
pub const ODE_TOL: f64 = 1e-8;

/// Pass threshold for the system and derivative-identity checks.
pub const IDENTITY_TOL: f64 = 1e-9;

const ODE_SAMPLES: usize = 32;
const SYSTEM_SAMPLES: usize = 16;

/// `y'' + p y' + q y = 0`.
#[derive(Clone, Debug, Serialize)]
pub struct OdeCoefficients {
    pub p: RationalFn,
    pub q: RationalFn,
    pub region: Region,
    pub n: usize,
    pub beta: Complex64,
}

/// `(u', v') = [[a11, a12], [a21, a22]] (u, v)`.
#[derive(Clone, Debug, Serialize)]
pub struct SystemCoefficients {
    pub a11: RationalFn,
    pub a12: RationalFn,
    pub a21: RationalFn,
    pub a22: RationalFn,
    pub n: usize,
    pub beta: Complex64,
    pub tau: Complex64,
}

/// Outcome of a rational identity check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualReport {
    /// Largest coefficient of the residual numerator relative to the
    /// magnitudes that were combined to produce it.
    pub coefficient_ratio: f64,
    /// Largest pointwise residual, relative to the sum of the magnitudes
    /// of the individual terms.
    pub max_residual: f64,
    pub samples: usize,
    pub tolerance: f64,
    pub pass: bool,
}

fn relative(terms: &[Complex64]) -> f64 {
    let total: Complex64 = terms.iter().sum();
    let scale: f64 = terms.iter().map(|t| t.norm()).sum();
    if total.norm() == 0.0 {
        0.0
    } else if scale == 0.0 {
        f64::INFINITY
    } else {
        total.norm() / scale
    }
}

fn z_times(f: &RationalFn) -> RationalFn {
    f.shift(1)
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn check_gdj(seq: &OpucSequence, n: usize, gdj: &GdjTriple) -> Result<Complex64> {
    if gdj.n != n {
        return Err(Error::InvalidInput(format!(
            "integrals were built for degree {}, not {n}",
            gdj.n
        )));
    }
    if n == 0 {
        return Err(Error::InvalidInput("degree must be >= 1".into()));
    }
    seq.alpha(n - 1)
}

/// `n(1 - conj(y) alpha_{n-1}) + z G + conj(y) D`, the slope of `h` in `conj(x)`.
fn slope(n: usize, alpha: Complex64, gdj: &GdjTriple, y: Complex64) -> RationalFn {
    let yb = y.conj();
    let constant = RationalFn::constant(real(n as f64) * (real(1.0) - yb * alpha));
    &(&constant + &z_times(&gdj.g)) + &gdj.d.scale(yb)
}

/// `h_n(z; x; y) = conj(x) (n(1 - conj(y) alpha_{n-1}) + z G + conj(y) D)
///  - z (J - conj(y) G)`.
pub fn h_fn(seq: &OpucSequence, n: usize, gdj: &GdjTriple, x: Complex64, y: Complex64) -> Result<RationalFn> {
    let alpha = check_gdj(seq, n, gdj)?;
    let first = slope(n, alpha, gdj, y).scale(x.conj());
    let second = z_times(&(&gdj.j - &gdj.g.scale(y.conj())));
    Ok(&first - &second)
}

/// Coefficients of the first-order system for `u = Phi_n(.; beta)`,
/// `v = Phi_n(.; tau)`.
pub fn first_order_system(
    seq: &OpucSequence,
    n: usize,
    gdj: &GdjTriple,
    beta: Complex64,
    tau: Complex64,
) -> Result<SystemCoefficients> {
    if (beta - tau).norm() <= 1e-14 * (1.0 + beta.norm()) {
        return Err(Error::DegeneratePair);
    }
    let factor = (beta.conj() - tau.conj()).inv();
    let over = |h: RationalFn, sign: f64| h.shift(-1).scale(factor * sign);
    Ok(SystemCoefficients {
        a11: over(h_fn(seq, n, gdj, tau, beta)?, -1.0),
        a12: over(h_fn(seq, n, gdj, beta, beta)?, 1.0),
        a21: over(h_fn(seq, n, gdj, tau, tau)?, -1.0),
        a22: over(h_fn(seq, n, gdj, beta, tau)?, 1.0),
        n,
        beta,
        tau,
    })
}

/// The second-order equation solved by `Phi_n(z; beta)`.
pub fn second_order_ode(seq: &OpucSequence, n: usize, gdj: &GdjTriple, beta: Complex64) -> Result<OdeCoefficients> {
    let alpha = check_gdj(seq, n, gdj)?;
    if beta.norm() == 0.0 {
        return Err(Error::UnsupportedBetaZero);
    }
    let h = h_fn(seq, n, gdj, beta, beta)?;
    if h.is_zero() {
        return Err(Error::DegenerateH);
    }
    let h_minus = h_fn(seq, n, gdj, -beta, beta)?;
    let log_derivative = h.derivative().checked_div(&h)?;
    let p = &RationalFn::z_power(-1).scale(real(1.0 - n as f64)) - &log_derivative;

    let w = wronskian(&h, &h_minus);
    let first = w.checked_div(&z_times(&h).scale(beta.conj() * 2.0))?;
    let n_c = RationalFn::constant(real(n as f64));
    let left = &(&n_c + &z_times(&gdj.g)) * &gdj.g;
    let right = &gdj.j * &(&gdj.d - &RationalFn::constant(alpha * n as f64));
    let second = (&left + &right).shift(-1);
    let q = &first - &second;
    Ok(OdeCoefficients { p, q, region: gdj.region, n, beta })
}

impl OdeCoefficients {
    /// `y'' + p y' + q y` as a rational function.
    pub fn residual(&self, y: &ComplexPoly) -> RationalFn {
        let d1 = y.derivative();
        let d2 = d1.derivative();
        let y0 = RationalFn::from_poly(y.clone());
        let y1 = RationalFn::from_poly(d1);
        let y2 = RationalFn::from_poly(d2);
        &(&y2 + &(&self.p * &y1)) + &(&self.q * &y0)
    }
}

/// Checks that `y` solves the equation, both as a rational identity and
/// pointwise at samples on the region's test circle.
pub fn verify_ode(ode: &OdeCoefficients, y: &ComplexPoly) -> Result<ResidualReport> {
    let residual = ode.residual(y);
    let samples = region_samples(ode.region, ODE_SAMPLES, &[&ode.p, &ode.q]);
    if samples.is_empty() {
        return Err(Error::MalformedOde);
    }
    let d1 = y.derivative();
    let d2 = d1.derivative();
    let max_residual = samples
        .iter()
        .map(|&z| relative(&[d2.eval(z), ode.p.eval(z) * d1.eval(z), ode.q.eval(z) * y.eval(z)]))
        .fold(0.0, f64::max);
    let coefficient_ratio = residual.cancellation_ratio();
    Ok(ResidualReport {
        coefficient_ratio,
        max_residual,
        samples: samples.len(),
        tolerance: ODE_TOL,
        pass: coefficient_ratio < ODE_TOL && max_residual < ODE_TOL,
    })
}

impl SystemCoefficients {
    /// Residuals of both rows for `u`, `v`, reported together.
    pub fn residual(&self, u: &ComplexPoly, v: &ComplexPoly, region: Region) -> Result<ResidualReport> {
        let ur = RationalFn::from_poly(u.clone());
        let vr = RationalFn::from_poly(v.clone());
        let du = u.derivative();
        let dv = v.derivative();
        let row1 = &(&RationalFn::from_poly(du.clone()) - &(&self.a11 * &ur)) - &(&self.a12 * &vr);
        let row2 = &(&RationalFn::from_poly(dv.clone()) - &(&self.a21 * &ur)) - &(&self.a22 * &vr);
        let samples = region_samples(region, SYSTEM_SAMPLES, &[&self.a11, &self.a12, &self.a21, &self.a22]);
        if samples.is_empty() {
            return Err(Error::MalformedOde);
        }
        let max_residual = samples
            .iter()
            .map(|&z| {
                let (uz, vz) = (u.eval(z), v.eval(z));
                let r1 = relative(&[du.eval(z), -self.a11.eval(z) * uz, -self.a12.eval(z) * vz]);
                let r2 = relative(&[dv.eval(z), -self.a21.eval(z) * uz, -self.a22.eval(z) * vz]);
                r1.max(r2)
            })
            .fold(0.0, f64::max);
        Ok(ResidualReport {
            coefficient_ratio: row1.cancellation_ratio().max(row2.cancellation_ratio()),
            max_residual,
            samples: samples.len(),
            tolerance: IDENTITY_TOL,
            pass: max_residual < IDENTITY_TOL,
        })
    }
}

/// Compares `Phi_n'(z; beta)` with
/// `Phi_{n-1} (n(1 - conj(beta) alpha_{n-1}) + z G + conj(beta) D) - Phi_{n-1}^* (J - conj(beta) G)`.
pub fn derivative_identity_check(
    seq: &OpucSequence,
    n: usize,
    gdj: &GdjTriple,
    beta: Complex64,
) -> Result<ResidualReport> {
    let alpha = check_gdj(seq, n, gdj)?;
    let lhs = popuc(seq, n, beta)?.derivative();
    let phi = seq.monic(n - 1)?;
    let star = seq.reversed(n - 1)?;
    let a = slope(n, alpha, gdj, beta);
    let b = &gdj.j - &gdj.g.scale(beta.conj());
    let phi_r = RationalFn::from_poly(phi.clone());
    let star_r = RationalFn::from_poly(star.clone());
    let residual = &(&RationalFn::from_poly(lhs.clone()) - &(&phi_r * &a)) + &(&star_r * &b);
    let samples = region_samples(gdj.region, ODE_SAMPLES, &[&a, &b]);
    if samples.is_empty() {
        return Err(Error::MalformedOde);
    }
    let max_residual = samples
        .iter()
        .map(|&z| relative(&[lhs.eval(z), -phi.eval(z) * a.eval(z), star.eval(z) * b.eval(z)]))
        .fold(0.0, f64::max);
    Ok(ResidualReport {
        coefficient_ratio: residual.cancellation_ratio(),
        max_residual,
        samples: samples.len(),
        tolerance: IDENTITY_TOL,
        pass: max_residual < IDENTITY_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cauchy::build_gdj;
    use crate::opuc::MeasureSpec;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn setup(m: &MeasureSpec, n: usize, region: Region) -> (OpucSequence, GdjTriple) {
        let seq = m.opuc_sequence(n).unwrap();
        let f = m.weight_derivative().unwrap();
        let gdj = build_gdj(&seq, n, &f, region).unwrap();
        (seq, gdj)
    }

    #[test]
    fn lebesgue_equation() {
        let m = MeasureSpec::lebesgue();
        let n = 5;
        let (seq, gdj) = setup(&m, n, Region::Exterior);
        let h = h_fn(&seq, n, &gdj, c(1.0, 0.0), c(1.0, 0.0)).unwrap();
        assert!(h.is_polynomial() && (h.eval(c(0.3, 0.1)) - c(5.0, 0.0)).norm() < 1e-15);
        let ode = second_order_ode(&seq, n, &gdj, c(1.0, 0.0)).unwrap();
        assert!(ode.q.is_zero());
        let y = popuc(&seq, n, c(1.0, 0.0)).unwrap();
        assert!(verify_ode(&ode, &y).unwrap().pass);
        // z^n + 1 also solves this equation (q = 0), a genuinely wrong y fails
        let wrong = ComplexPoly::from_real(&[1.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
        let report = verify_ode(&ode, &wrong).unwrap();
        assert!(!report.pass && report.max_residual > 1e-3);
    }

    #[test]
    fn lebesgue_system() {
        let m = MeasureSpec::lebesgue();
        let n = 6;
        let (seq, gdj) = setup(&m, n, Region::Exterior);
        let sys = first_order_system(&seq, n, &gdj, c(1.0, 0.0), c(-1.0, 0.0)).unwrap();
        let u = popuc(&seq, n, c(1.0, 0.0)).unwrap();
        let v = popuc(&seq, n, c(-1.0, 0.0)).unwrap();
        assert!(sys.residual(&u, &v, Region::Exterior).unwrap().pass);
        assert_eq!(
            first_order_system(&seq, n, &gdj, c(1.0, 0.0), c(1.0, 0.0)).unwrap_err(),
            Error::DegeneratePair
        );
    }

    #[test]
    fn beta_zero_rejected_and_degree_checked() {
        let m = MeasureSpec::single_moment();
        let (seq, gdj) = setup(&m, 4, Region::Exterior);
        assert_eq!(second_order_ode(&seq, 4, &gdj, c(0.0, 0.0)).unwrap_err(), Error::UnsupportedBetaZero);
        assert!(matches!(
            second_order_ode(&seq, 3, &gdj, c(1.0, 0.0)),
            Err(Error::InvalidInput(_))
        ));
        assert!(derivative_identity_check(&seq, 4, &gdj, c(0.0, 0.0)).unwrap().pass);
    }

    #[test]
    fn bernstein_szego_equations() {
        let m = MeasureSpec::bernstein_szego(c(0.5, 0.0)).unwrap();
        let n = 4;
        for region in [Region::Exterior, Region::Interior] {
            let (seq, gdj) = setup(&m, n, region);
            for beta in [c(0.0, 1.0), c(-1.0, 0.0), c(0.3, 0.4)] {
                let y = popuc(&seq, n, beta).unwrap();
                let ode = second_order_ode(&seq, n, &gdj, beta).unwrap();
                let r = verify_ode(&ode, &y).unwrap();
                assert!(r.pass, "{region} {beta}: {r:?}");
                assert!(derivative_identity_check(&seq, n, &gdj, beta).unwrap().pass);
            }
            let sys = first_order_system(&seq, n, &gdj, c(-1.0, 0.0), c(0.0, 1.0)).unwrap();
            let u = popuc(&seq, n, c(-1.0, 0.0)).unwrap();
            let v = popuc(&seq, n, c(0.0, 1.0)).unwrap();
            assert!(sys.residual(&u, &v, region).unwrap().pass);
        }
    }
}
