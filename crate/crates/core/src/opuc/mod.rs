//! Orthogonal polynomials on the unit circle and their paraorthogonal
//! relatives.

mod measure;

pub use measure::{MeasureSpec, NamedMeasure};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly::ComplexPoly;
use crate::ratfun::{Pole, RationalFn};

/// Points this close to each other are treated as duplicates.
const DUPLICATE_TOL: f64 = 1e-10;

/// Accepted deviation of an input point from the unit circle.
pub const UNIMODULAR_TOL: f64 = 1e-12;

/// Verblunsky coefficients with the monic polynomials they generate.
#[derive(Clone, Debug)]
pub struct OpucSequence {
    alphas: Vec<Complex64>,
    monic: Vec<ComplexPoly>,
    reversed: Vec<ComplexPoly>,
    kappas: Vec<f64>,
}

impl OpucSequence {
    /// Highest degree `N` for which `Phi_N` is available.
    pub fn degree(&self) -> usize {
        self.monic.len() - 1
    }

    /// `alpha_0 .. alpha_{N-1}`.
    pub fn alphas(&self) -> &[Complex64] {
        &self.alphas
    }

    pub fn alpha(&self, k: usize) -> Result<Complex64> {
        self.alphas.get(k).copied().ok_or(Error::InsufficientSequence {
            required: k + 1,
            available: self.degree(),
        })
    }

    pub fn monic(&self, k: usize) -> Result<&ComplexPoly> {
        self.check(k)?;
        Ok(&self.monic[k])
    }

    pub fn reversed(&self, k: usize) -> Result<&ComplexPoly> {
        self.check(k)?;
        Ok(&self.reversed[k])
    }

    pub fn kappa(&self, k: usize) -> Result<f64> {
        self.check(k)?;
        Ok(self.kappas[k])
    }

    /// Orthonormal `phi_k = kappa_k Phi_k`.
    pub fn orthonormal(&self, k: usize) -> Result<ComplexPoly> {
        Ok(self.monic(k)?.scale(Complex64::new(self.kappas[k], 0.0)))
    }

    /// `phi_k^* = kappa_k Phi_k^*`.
    pub fn orthonormal_reversed(&self, k: usize) -> Result<ComplexPoly> {
        Ok(self.reversed(k)?.scale(Complex64::new(self.kappas[k], 0.0)))
    }

    /// Same coefficients through degree `k`.
    pub fn truncated(&self, k: usize) -> Result<OpucSequence> {
        self.check(k)?;
        Ok(OpucSequence {
            alphas: self.alphas[..k].to_vec(),
            monic: self.monic[..=k].to_vec(),
            reversed: self.reversed[..=k].to_vec(),
            kappas: self.kappas[..=k].to_vec(),
        })
    }

    fn check(&self, k: usize) -> Result<()> {
        if k > self.degree() {
            Err(Error::InsufficientSequence {
                required: k,
                available: self.degree(),
            })
        } else {
            Ok(())
        }
    }
}

/// Runs the Szego recursion `Phi_{k+1} = z Phi_k - conj(alpha_k) Phi_k^*`
/// through degree `n`, using `alphas[0..n]`.
pub fn szego_sequence(alphas: &[Complex64], n: usize) -> Result<OpucSequence> {
    if n > alphas.len() {
        return Err(Error::InsufficientSequence {
            required: n,
            available: alphas.len(),
        });
    }
    let alphas = &alphas[..n];
    if let Some((index, a)) = alphas.iter().enumerate().find(|(_, a)| a.norm() >= 1.0) {
        return Err(Error::InvalidVerblunsky { index, modulus: a.norm() });
    }
    let mut monic = vec![ComplexPoly::one()];
    let mut reversed = vec![ComplexPoly::one()];
    let mut kappas = vec![1.0];
    for (k, &a) in alphas.iter().enumerate() {
        let phi = &monic[k];
        let star = &reversed[k];
        let next = &phi.shift_up(1) - &star.scale(a.conj());
        // dual recursion Phi*_{k+1} = Phi*_k - alpha_k z Phi_k
        let next_star = star - &phi.shift_up(1).scale(a);
        kappas.push(kappas[k] / (1.0 - a.norm_sqr()).sqrt());
        monic.push(next);
        reversed.push(next_star);
    }
    Ok(OpucSequence {
        alphas: alphas.to_vec(),
        monic,
        reversed,
        kappas,
    })
}

/// Checks and projects a point set onto the unit circle.
pub fn validate_points(points: &[Complex64]) -> Result<Vec<Complex64>> {
    if points.len() < 2 {
        return Err(Error::DegenerateMeasure(format!(
            "need at least 2 points, got {}",
            points.len()
        )));
    }
    let mut out = Vec::with_capacity(points.len());
    for (index, &x) in points.iter().enumerate() {
        let modulus = x.norm();
        if !modulus.is_finite() || (modulus - 1.0).abs() > UNIMODULAR_TOL {
            return Err(Error::InvalidSupport { index, modulus });
        }
        out.push(x / modulus);
    }
    for i in 0..out.len() {
        for j in 0..i {
            if (out[i] - out[j]).norm() < DUPLICATE_TOL {
                return Err(Error::DegenerateMeasure(format!(
                    "points {j} and {i} coincide"
                )));
            }
        }
    }
    Ok(out)
}

/// Orthonormalizes `1, z, ..., z^{n-1}` in `L^2` of the uniform measure on
/// the given `n` points (modified Gram-Schmidt with one reorthogonalization
/// pass; inner products are exact finite sums).
pub fn gram_schmidt_discrete(points: &[Complex64]) -> Result<OpucSequence> {
    let points = validate_points(points)?;
    let n = points.len();
    let weight = 1.0 / n as f64;
    let inner = |a: &[Complex64], b: &[Complex64]| -> Complex64 {
        a.iter().zip(b).map(|(x, y)| x * y.conj()).sum::<Complex64>() * weight
    };

    // orthonormal basis: coefficient vectors and values at the points
    let mut basis: Vec<(Vec<Complex64>, Vec<Complex64>)> = Vec::with_capacity(n);
    let mut monic = Vec::with_capacity(n);
    let mut kappas = Vec::with_capacity(n);
    for k in 0..n {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); k + 1];
        coeffs[k] = Complex64::new(1.0, 0.0);
        let mut values: Vec<Complex64> = points.iter().map(|x| x.powu(k as u32)).collect();
        for _pass in 0..2 {
            for (bc, bv) in &basis {
                let c = inner(&values, bv);
                for (v, b) in values.iter_mut().zip(bv) {
                    *v -= c * b;
                }
                for (v, b) in coeffs.iter_mut().zip(bc) {
                    *v -= c * b;
                }
            }
        }
        let norm = inner(&values, &values).re.sqrt();
        if norm < 1e-13 {
            return Err(Error::DegenerateMeasure(format!(
                "monomial z^{k} is numerically dependent on lower powers"
            )));
        }
        // the top coefficient stays exactly 1
        coeffs[k] = Complex64::new(1.0, 0.0);
        monic.push(ComplexPoly::new(coeffs.clone()));
        kappas.push(1.0 / norm);
        let inv = Complex64::new(1.0 / norm, 0.0);
        basis.push((
            coeffs.iter().map(|c| c * inv).collect(),
            values.iter().map(|v| v * inv).collect(),
        ));
    }
    let reversed = monic
        .iter()
        .enumerate()
        .map(|(k, p)| p.reversed_star(k))
        .collect::<Result<Vec<_>>>()?;
    let alphas = (0..n - 1).map(|k| -monic[k + 1].coeff(0).conj()).collect();
    Ok(OpucSequence {
        alphas,
        monic,
        reversed,
        kappas,
    })
}

/// `Phi_n(z; beta) = z Phi_{n-1}(z) - conj(beta) Phi_{n-1}^*(z)`.
pub fn popuc(seq: &OpucSequence, n: usize, beta: Complex64) -> Result<ComplexPoly> {
    if n == 0 {
        return Err(Error::InvalidInput("paraorthogonal degree must be >= 1".into()));
    }
    let phi = seq.monic(n - 1)?;
    let star = seq.reversed(n - 1)?;
    Ok(&phi.shift_up(1) - &star.scale(beta.conj()))
}

/// `beta = (-1)^{n+1} prod conj(x_j)`, the parameter for which the
/// paraorthogonal polynomial of the uniform measure vanishes on the points.
pub fn beta_from_points(points: &[Complex64]) -> Result<Complex64> {
    let points = validate_points(points)?;
    let n = points.len();
    let prod: Complex64 = points.iter().map(|x| x.conj()).product();
    let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
    let beta = prod * sign;
    Ok(beta / beta.norm())
}

/// Rational weight `W(zeta) = zeta^{n-1} / (phi_{n-1}(zeta) phi_{n-1}^*(zeta))`
/// with denominator factors taken from the roots of `Phi_{n-1}` and their
/// reflections `1 / conj(r)`.
pub fn bernstein_szego_weight(seq: &OpucSequence, n: usize) -> Result<MeasureSpec> {
    if n == 0 {
        return Err(Error::InvalidInput("degree must be >= 1".into()));
    }
    let d = n - 1;
    let phi = seq.monic(d)?;
    let kappa = seq.kappa(d)?;
    let star = seq.reversed(d)?;
    let roots = if d == 0 { Vec::new() } else { phi.roots()? };
    let mut poles: Vec<Pole> = Vec::with_capacity(2 * d);
    for &r in &roots {
        if (r.norm() - 1.0).abs() < 1e-10 {
            return Err(Error::InvalidWeight(format!(
                "phi_{d} has a root on the unit circle at {r}"
            )));
        }
        poles.push(Pole { location: r, multiplicity: 1 });
        if r.norm() > 0.0 {
            poles.push(Pole { location: r.conj().inv(), multiplicity: 1 });
        }
    }
    // phi * phi^* = kappa^2 * lead(Phi^*) * prod (z - r) prod (z - 1/conj r)
    let scale = kappa * kappa * star.leading();
    let num = ComplexPoly::monomial(scale.inv(), d);
    let w = RationalFn::from_factored(num, &poles);
    Ok(MeasureSpec::rational_weight_unchecked(w))
}

/// The orthogonal polynomials `Phi_0 .. Phi_n` of the Bernstein-Szego
/// measure built on the uniform measure over `points`, together with the
/// `beta` for which `Phi_n(z; beta)` vanishes on the points.
///
/// The first `n - 1` Verblunsky coefficients are those of the discrete
/// measure; the Bernstein-Szego measure continues them with zeros. Its
/// weight must be finite on the circle, which is checked here.
pub fn bernstein_szego_lift(points: &[Complex64]) -> Result<(OpucSequence, Complex64)> {
    let points = validate_points(points)?;
    let n = points.len();
    let beta = beta_from_points(&points)?;
    let discrete = gram_schmidt_discrete(&points)?;
    bernstein_szego_weight(&discrete, n)?;
    let mut alphas = discrete.alphas().to_vec();
    alphas.truncate(n - 1);
    alphas.push(Complex64::new(0.0, 0.0));
    Ok((szego_sequence(&alphas, n)?, beta))
}
