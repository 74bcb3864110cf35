//! Residuals certifying an `HPSolution`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{DoubleDouble, Scalar};

use super::linear::NestedData;
use super::HPSolution;

/// Relative sizes of the Laurent coefficients of `A_{n,j}` at infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaurentCheck {
    /// Largest relative coefficient among those that must vanish.
    pub vanishing: f64,
    /// Relative size of the first coefficient that must not vanish.
    pub leading: f64,
}

impl HPSolution {
    fn check_form_index(&self, j: usize) -> Result<()> {
        if j >= self.m() {
            return Err(Error::IndexOutOfRange(format!("form index {j} with m = {}", self.m())));
        }
        Ok(())
    }

    /// Values of `H_{n,j+1} / (Q_{n,j} Q_{n,j+2})` times the weights of the
    /// refined `sigma_{j+1}` rule, with the nodes and their `Delta_{j+1}` variable.
    fn refined_varying(&self, j: usize) -> Result<Vec<(f64, f64, f64)>> {
        let r = &self.check_rules[j];
        let iv = self.system.interval(j + 1);
        r.nodes
            .iter()
            .zip(&r.weights)
            .map(|(&x, &w)| {
                let h = self.weight_h(j + 1, Complex64::new(x, 0.0))?.re;
                let den = self.q_eval_real(j, x) * self.q_eval_real(j + 2, x);
                Ok((x, (x - iv.center()) / iv.half_width(), w * h / den))
            })
            .collect()
    }

    /// `max_nu |int t^nu Q_{n,j+1} H_{n,j+1} d sigma_{j+1} / (Q_{n,j} Q_{n,j+2})|`
    /// over `nu < eta_{n,j+1}`, each normalized by the integral of the absolute
    /// integrand; computed on a rule independent of the one used to solve.
    pub fn orthogonality_residual(&self, j: usize) -> Result<f64> {
        self.check_form_index(j)?;
        self.orthogonality_moments(j, self.multi_index.eta(j + 1))
            .map(|v| v.into_iter().fold(0.0, f64::max))
    }

    /// Normalized orthogonality moments for `nu = 0..count`.
    pub fn orthogonality_moments(&self, j: usize, count: usize) -> Result<Vec<f64>> {
        self.check_form_index(j)?;
        let data = self.refined_varying(j)?;
        let mut num = vec![0.0; count];
        let mut den = vec![0.0; count];
        for &(x, t, v) in &data {
            let term = self.q_eval_real(j + 1, x) * v;
            let mut tp = 1.0;
            for nu in 0..count {
                num[nu] += tp * term;
                den[nu] += (tp * term).abs();
                tp *= t;
            }
        }
        Ok(num.iter().zip(&den).map(|(a, b)| a.abs() / b).collect())
    }

    /// Laurent coefficients of `A_{n,j}` at infinity through
    /// `A_{n,j}(z) = int A_{n,j+1}(x) d sigma_{j+1}(x) / (z - x)`.
    pub fn laurent_orders(&self, j: usize) -> Result<LaurentCheck> {
        self.check_form_index(j)?;
        let order = self.multi_index.n(j + 1);
        let r = &self.check_rules[j];
        let iv = self.system.interval(j + 1);
        let mut num = vec![0.0; order + 1];
        let mut den = vec![0.0; order + 1];
        for (&x, &w) in r.nodes.iter().zip(&r.weights) {
            let term = w * self.form_eval(j + 1, Complex64::new(x, 0.0))?.re;
            let t = (x - iv.center()) / iv.half_width();
            let mut tp = 1.0;
            for nu in 0..=order {
                num[nu] += tp * term;
                den[nu] += (tp * term).abs();
                tp *= t;
            }
        }
        let rel: Vec<f64> = num.iter().zip(&den).map(|(a, b)| a.abs() / b).collect();
        Ok(LaurentCheck {
            vanishing: rel[..order].iter().copied().fold(0.0, f64::max),
            leading: rel[order],
        })
    }

    /// The vanishing Laurent coefficients of `A_{n,j}` from the polynomials
    /// `a_{n,k}` alone, relative to the sum of absolute terms.
    pub fn laurent_direct(&self, j: usize) -> Result<f64> {
        self.check_form_index(j)?;
        let order = self.multi_index.n(j + 1);
        if order == 0 {
            return Ok(0.0);
        }
        let data = NestedData::<DoubleDouble>::new(&self.system, self.multi_index.total() + 1)?;
        let (vals, scale) = data.laurent(self.a_coeffs_dd(), j, order);
        Ok(vals
            .iter()
            .zip(&scale)
            .map(|(v, s)| v.abs().to_f64() / s.to_f64())
            .fold(0.0, f64::max))
    }

    /// `|A_j/Q_j - int A_{j+1} d sigma_{j+1} / ((z - x) Q_j)|` at `z`, relative
    /// to the integral of the absolute integrand.
    pub fn formrec_residual(&self, j: usize, z: Complex64) -> Result<f64> {
        self.check_form_index(j)?;
        let lhs = self.weight_h(j, z)? / self.q_eval(j + 1, z);
        let r = &self.check_rules[j];
        let mut rhs = Complex64::new(0.0, 0.0);
        let mut scale = 0.0;
        for (&x, &w) in r.nodes.iter().zip(&r.weights) {
            let a = self.form_eval(j + 1, Complex64::new(x, 0.0))?.re;
            let term = w * a / ((z - x) * self.q_eval_real(j, x));
            rhs += term;
            scale += term.norm();
        }
        Ok((lhs - rhs).norm() / scale.max(lhs.norm()))
    }

    /// `|Q_j H_j / Q_{j+1} - A_j^{direct}|` relative to the sum of absolute
    /// terms of the direct combination.
    pub fn weight_consistency(&self, j: usize, z: Complex64) -> Result<f64> {
        let (direct, scale) = self.form_eval_direct(j, z)?;
        Ok((self.form_eval(j, z)? - direct).norm() / scale)
    }
}
