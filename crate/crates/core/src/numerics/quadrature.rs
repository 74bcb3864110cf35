use std::f64::consts::PI;

use super::linalg::tridiagonal_eigenvalues;
use crate::error::{Error, Result};

/// Largest node count the adaptive doubling will try.
pub const MAX_NODES: usize = 4096;

/// Nodes and positive weights of a quadrature rule on `[a, b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub a: f64,
    pub b: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    /// Multiply every weight by `g(node)`.
    pub fn reweighted(&self, g: impl Fn(f64) -> f64) -> QuadratureRule {
        let weights = self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * g(x)).collect();
        QuadratureRule {
            a: self.a,
            b: self.b,
            nodes: self.nodes.clone(),
            weights,
        }
    }
}

/// Recurrence coefficients of the monic Jacobi polynomials on [-1,1] for the
/// weight `(1-t)^alpha (1+t)^beta`: diagonal `a_0..a_{n-1}` and `b_1..b_n`.
pub(crate) fn jacobi_recurrence(alpha: f64, beta: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let ab = alpha + beta;
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    for k in 0..n {
        let kf = k as f64;
        if k == 0 {
            a.push((beta - alpha) / (ab + 2.0));
        } else {
            let s = 2.0 * kf + ab;
            a.push((beta * beta - alpha * alpha) / (s * (s + 2.0)));
        }
    }
    for k in 1..=n {
        let kf = k as f64;
        if k == 1 {
            b.push(4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab).powi(2) * (3.0 + ab)));
        } else {
            let s = 2.0 * kf + ab;
            b.push(4.0 * kf * (kf + alpha) * (kf + beta) * (kf + ab) / (s * s * (s + 1.0) * (s - 1.0)));
        }
    }
    (a, b)
}

pub(crate) fn jacobi_mass(alpha: f64, beta: f64) -> f64 {
    let ln = (alpha + beta + 1.0) * std::f64::consts::LN_2 + libm::lgamma(alpha + 1.0) + libm::lgamma(beta + 1.0)
        - libm::lgamma(alpha + beta + 2.0);
    ln.exp()
}

/// Gauss rule for the weight `(b-x)^alpha (x-a)^beta` on `[a, b]`.
pub fn gauss_jacobi_rule(a: f64, b: f64, alpha: f64, beta: f64, n_nodes: usize) -> Result<QuadratureRule> {
    if !(alpha > -1.0) || !alpha.is_finite() {
        return Err(Error::InvalidExponent(alpha));
    }
    if !(beta > -1.0) || !beta.is_finite() {
        return Err(Error::InvalidExponent(beta));
    }
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::DegenerateInterval(a, b));
    }
    if n_nodes == 0 {
        return Err(Error::SizeMismatch { expected: 1, got: 0 });
    }
    let (t, w) = if alpha == -0.5 && beta == -0.5 {
        chebyshev_first_kind(n_nodes)
    } else {
        reference_gauss_jacobi(alpha, beta, n_nodes)?
    };
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let scale = h.powf(alpha + beta + 1.0);
    Ok(QuadratureRule {
        a,
        b,
        nodes: t.iter().map(|&ti| c + h * ti).collect(),
        weights: w.iter().map(|&wi| wi * scale).collect(),
    })
}

fn chebyshev_first_kind(n: usize) -> (Vec<f64>, Vec<f64>) {
    let nodes = (0..n).map(|k| -((2 * k + 1) as f64 * PI / (2 * n) as f64).cos()).collect();
    (nodes, vec![PI / n as f64; n])
}

fn reference_gauss_jacobi(alpha: f64, beta: f64, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let (ra, rb) = jacobi_recurrence(alpha, beta, n);
    let sb: Vec<f64> = rb.iter().map(|v| v.sqrt()).collect();
    let mut nodes = tridiagonal_eigenvalues(&ra, &sb[..n - 1])?;
    let mu0 = jacobi_mass(alpha, beta);
    let p0 = 1.0 / mu0.sqrt();
    // orthonormal recurrence: sb[k] p_{k+1} = (x - a_k) p_k - sb[k-1] p_{k-1}
    let eval = |x: f64| -> (f64, f64, f64) {
        let (mut pm, mut p) = (0.0, p0);
        let (mut dm, mut d) = (0.0, 0.0);
        let mut sum = p * p;
        for k in 0..n {
            let prev = if k == 0 { 0.0 } else { sb[k - 1] };
            let pn = ((x - ra[k]) * p - prev * pm) / sb[k];
            let dn = ((x - ra[k]) * d + p - prev * dm) / sb[k];
            pm = p;
            p = pn;
            dm = d;
            d = dn;
            if k + 1 < n {
                sum += p * p;
            }
        }
        (p, d, sum)
    };
    let mut weights = Vec::with_capacity(n);
    for x in nodes.iter_mut() {
        for _ in 0..3 {
            let (p, d, _) = eval(*x);
            if d == 0.0 {
                break;
            }
            let step = p / d;
            if step.abs() > 1e-6 {
                break;
            }
            *x -= step;
            if step.abs() < 1e-17 {
                break;
            }
        }
        let (_, _, sum) = eval(*x);
        weights.push(1.0 / sum);
    }
    // Gauss rules integrate 1 exactly; remove the accumulated rounding drift
    let total: f64 = weights.iter().sum();
    let fix = mu0 / total;
    weights.iter_mut().for_each(|w| *w *= fix);
    Ok((nodes, weights))
}

/// Double the node count, starting at `n0`, until two successive values agree
/// to `tol` relative (or absolutely below `tol * floor`). Returns value and node count.
pub fn adaptive<T, F, D>(n0: usize, tol: f64, mut compute: F, diff: D) -> Result<(T, usize)>
where
    F: FnMut(usize) -> Result<T>,
    D: Fn(&T, &T) -> f64,
{
    let mut n = n0.max(1);
    let mut prev = compute(n)?;
    while n * 2 <= MAX_NODES {
        n *= 2;
        let cur = compute(n)?;
        if diff(&prev, &cur) <= tol {
            return Ok((cur, n));
        }
        prev = cur;
    }
    Err(Error::Divergent(format!("no agreement to {tol:e} with {MAX_NODES} nodes")))
}

/// Relative difference with a unit floor, the default comparison for `adaptive`.
pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chebyshev_mass_and_second_moment() {
        let r = gauss_jacobi_rule(-1.0, 1.0, -0.5, -0.5, 8).unwrap();
        assert!((r.mass() - PI).abs() < 1e-14);
        assert!((r.integrate(|x| x * x) - PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn legendre_cubic_exact() {
        let r = gauss_jacobi_rule(0.0, 2.0, 0.0, 0.0, 4).unwrap();
        assert!((r.integrate(|x| x.powi(3)) - 4.0).abs() < 1e-13);
    }

    #[test]
    fn generic_path_matches_chebyshev_closed_form() {
        let r = reference_gauss_jacobi(-0.5 + 1e-15, -0.5, 10).unwrap();
        let (t, w) = chebyshev_first_kind(10);
        for i in 0..10 {
            assert!((r.0[i] - t[i]).abs() < 1e-13);
            assert!((r.1[i] - w[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(gauss_jacobi_rule(-1.0, 1.0, -1.0, 0.0, 3), Err(Error::InvalidExponent(-1.0)));
        assert_eq!(gauss_jacobi_rule(1.0, 1.0, 0.0, 0.0, 3), Err(Error::DegenerateInterval(1.0, 1.0)));
    }

    #[test]
    fn large_rule_is_sane() {
        let r = gauss_jacobi_rule(2.0, 3.0, 0.3, -0.7, 2048).unwrap();
        assert!(r.nodes.windows(2).all(|p| p[0] < p[1]));
        assert!(r.nodes[0] > 2.0 && *r.nodes.last().unwrap() < 3.0);
        let exact = jacobi_mass(0.3, -0.7) * 0.5f64.powf(0.6);
        assert!((r.mass() - exact).abs() < 1e-12 * exact);
    }
}
