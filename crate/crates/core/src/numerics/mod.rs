//! Quadrature, Chebyshev technology, Cauchy integrals and the scalar seam.

pub mod chebyshev;
pub mod linalg;
pub mod quadrature;
pub mod scalar;

use num_complex::Complex64;

pub use chebyshev::{cheb_interpolate, cheb_interpolate_first_kind, cheb_points, cheb_points_first_kind, ChebSeries};
pub use quadrature::{gauss_jacobi_rule, QuadratureRule};
pub use scalar::{DoubleDouble, Scalar};

use crate::error::{Error, Result};

/// A point of the extended complex plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Point {
    Finite(Complex64),
    Infinity,
}

impl From<Complex64> for Point {
    fn from(z: Complex64) -> Self {
        Point::Finite(z)
    }
}

impl From<f64> for Point {
    fn from(x: f64) -> Self {
        Point::Finite(Complex64::new(x, 0.0))
    }
}

/// `true` if `z` lies on the closed real segment `[a, b]`.
pub fn on_segment(z: Complex64, a: f64, b: f64) -> bool {
    z.im == 0.0 && z.re >= a && z.re <= b
}

/// `sqrt((z-a)(z-b))`, holomorphic off `[a, b]` and positive for real `z > b`.
pub fn sqrt_ab(z: Complex64, a: f64, b: f64) -> Complex64 {
    (z - a).sqrt() * (z - b).sqrt()
}

/// Inverse Joukowski map `xi + sqrt(xi^2 - 1)` onto `|w| > 1`.
pub fn joukowski_inverse(xi: Complex64) -> Complex64 {
    xi + (xi - 1.0).sqrt() * (xi + 1.0).sqrt()
}

/// `sum w_i rho_i / (z - x_i)` over the rule.
pub fn cauchy_integral(rule: &QuadratureRule, density: &[f64], z: Complex64) -> Result<Complex64> {
    if density.len() != rule.len() {
        return Err(Error::SizeMismatch {
            expected: rule.len(),
            got: density.len(),
        });
    }
    if on_segment(z, rule.a, rule.b) {
        return Err(Error::OnSupport(format!("{z}")));
    }
    Ok(cauchy_sum(&rule.nodes, &rule.weights, density, z))
}

pub fn cauchy_sum(x: &[f64], w: &[f64], rho: &[f64], z: Complex64) -> Complex64 {
    let mut s = Complex64::new(0.0, 0.0);
    for i in 0..x.len() {
        s += w[i] * rho[i] / (z - x[i]);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn arcsine_transform_at_two() {
        let r = gauss_jacobi_rule(-1.0, 1.0, -0.5, -0.5, 64).unwrap();
        let rho = vec![1.0 / PI; r.len()];
        let v = cauchy_integral(&r, &rho, Complex64::new(2.0, 0.0)).unwrap();
        assert!((v.re - 1.0 / 3f64.sqrt()).abs() < 1e-14 && v.im == 0.0);
        let far = cauchy_integral(&r, &rho, Complex64::new(1e6, 0.0)).unwrap();
        assert!((far.re - 1e-6).abs() < 1e-5 * 1e-6);
        let z = Complex64::new(0.3, 0.8);
        let a = cauchy_integral(&r, &rho, z).unwrap();
        let b = cauchy_integral(&r, &rho, z.conj()).unwrap();
        assert_eq!(a, b.conj());
        assert!(cauchy_integral(&r, &rho, Complex64::new(0.5, 0.0)).is_err());
    }

    #[test]
    fn branch_conventions() {
        assert!(sqrt_ab(Complex64::new(4.0, 0.0), 2.0, 3.0).re > 0.0);
        assert!(sqrt_ab(Complex64::new(0.0, 0.0), 2.0, 3.0).re < 0.0);
        let w = joukowski_inverse(Complex64::new(2.0, 0.0));
        assert!((w.re - (2.0 + 3f64.sqrt())).abs() < 1e-15);
        assert!(joukowski_inverse(Complex64::new(-3.0, 1e-300)).norm() > 1.0);
        assert!(joukowski_inverse(Complex64::new(-3.0, 0.0)).norm() > 1.0);
    }
}
