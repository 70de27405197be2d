//! Paraorthogonal polynomials on the unit circle, the second-order
//! differential equations they satisfy, and the electrostatic equilibria
//! their zeros describe.
//!
//! The pipeline runs bottom-up through the modules:
//! [`poly`] and [`ratfun`] provide the arithmetic, [`opuc`] builds orthogonal
//! and paraorthogonal polynomials from Verblunsky coefficients or point
//! measures, [`cauchy`] turns the weight-derivative integrals into rational
//! functions, [`ode`] assembles the equations, and [`electro`] reads charge
//! configurations off them.

pub mod catalog;
pub mod cauchy;
pub mod electro;
pub mod error;
pub mod ode;
pub mod opuc;
pub mod poly;
pub mod ratfun;
pub mod sampling;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use poly::ComplexPoly;
pub use ratfun::RationalFn;

/// Compact text for a complex number; a part below `1e-15` of the
/// modulus is shown as zero.
pub(crate) fn fmt_complex(c: Complex64) -> String {
    let dust = 1e-15 * c.norm();
    let re = if c.re.abs() <= dust { 0.0 } else { c.re };
    let im = if c.im.abs() <= dust { 0.0 } else { c.im };
    if im == 0.0 {
        fmt_real(re)
    } else if re == 0.0 {
        format!("{}i", fmt_real(im))
    } else {
        let sign = if im < 0.0 { "-" } else { "+" };
        format!("{}{sign}{}i", fmt_real(re), fmt_real(im.abs()))
    }
}

/// Shortest round-trip text, switching to exponent form far from 1.
fn fmt_real(x: f64) -> String {
    if x == 0.0 || (1e-4..1e15).contains(&x.abs()) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}
