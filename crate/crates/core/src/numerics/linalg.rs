//! Small dense and tridiagonal linear algebra.

use super::scalar::Scalar;
use crate::error::{Error, Result};

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `d` and
/// off-diagonal `e` (`e[i]` couples rows `i` and `i+1`), ascending.
pub fn tridiagonal_eigenvalues(diag: &[f64], off: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    if off.len() + 1 < n {
        return Err(Error::SizeMismatch {
            expected: n - 1,
            got: off.len(),
        });
    }
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(&off[..n - 1]);

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut mm = l;
            while mm + 1 < n {
                let dd = d[mm].abs() + d[mm + 1].abs();
                if e[mm].abs() <= f64::EPSILON * dd {
                    break;
                }
                mm += 1;
            }
            if mm == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::NoConvergence {
                    what: "tridiagonal QL",
                    iterations: iter,
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[mm] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = mm;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[mm] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[mm] = 0.0;
        }
    }
    d.sort_by(|a, b| a.total_cmp(b));
    Ok(d)
}

/// Jacobi matrix (recurrence coefficients of the orthonormal polynomials) of the
/// discrete measure `sum w_i delta_{x_i}`, up to degree `deg`.
///
/// Lanczos with full reorthogonalization; returns `(alpha[0..deg], beta[1..deg])`
/// where `beta` are the off-diagonal entries.
pub fn discrete_jacobi_matrix(x: &[f64], w: &[f64], deg: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = x.len();
    if w.len() != n {
        return Err(Error::SizeMismatch { expected: n, got: w.len() });
    }
    if deg > n {
        return Err(Error::GramSingular(deg));
    }
    let mut q0: Vec<f64> = w.iter().map(|v| v.sqrt()).collect();
    let nrm = norm(&q0);
    if !(nrm > 0.0) {
        return Err(Error::GramSingular(0));
    }
    q0.iter_mut().for_each(|v| *v /= nrm);
    let mut basis: Vec<Vec<f64>> = vec![q0];
    let mut alpha = Vec::with_capacity(deg);
    let mut beta = Vec::with_capacity(deg);
    let mut beta_prev = 0.0;
    for k in 0..deg {
        let q = &basis[k];
        let mut v: Vec<f64> = x.iter().zip(q).map(|(xi, qi)| xi * qi).collect();
        let a = dot(q, &v);
        for i in 0..n {
            v[i] -= a * q[i];
            if k > 0 {
                v[i] -= beta_prev * basis[k - 1][i];
            }
        }
        for _ in 0..2 {
            for qq in &basis {
                let c = dot(qq, &v);
                v.iter_mut().zip(qq).for_each(|(vi, qi)| *vi -= c * qi);
            }
        }
        let b = norm(&v);
        alpha.push(a);
        if k + 1 < deg {
            if !(b > 1e-300) {
                return Err(Error::GramSingular(k + 1));
            }
            v.iter_mut().for_each(|vi| *vi /= b);
            beta.push(b);
            basis.push(v);
            beta_prev = b;
        }
    }
    Ok((alpha, beta))
}

/// Zeros of the degree-`deg` orthogonal polynomial of a positive discrete measure.
pub fn discrete_op_zeros(x: &[f64], w: &[f64], deg: usize) -> Result<Vec<f64>> {
    if deg == 0 {
        return Ok(Vec::new());
    }
    let (a, b) = discrete_jacobi_matrix(x, w, deg)?;
    tridiagonal_eigenvalues(&a, &b)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Solve `A x = b` by Gaussian elimination with partial pivoting in any scalar type.
///
/// Returns the solution and a pivot-ratio condition estimate.
pub fn solve_dense<S: Scalar>(mut a: Vec<Vec<S>>, mut b: Vec<S>) -> Result<(Vec<S>, f64)> {
    let n = b.len();
    if a.len() != n || a.iter().any(|r| r.len() != n) {
        return Err(Error::SizeMismatch { expected: n, got: a.len() });
    }
    let mut max_piv = 0.0f64;
    let mut min_piv = f64::INFINITY;
    for col in 0..n {
        let mut best = col;
        for row in col + 1..n {
            if a[row][col].abs() > a[best][col].abs() {
                best = row;
            }
        }
        a.swap(col, best);
        b.swap(col, best);
        let piv = a[col][col];
        let pa = piv.abs().to_f64();
        max_piv = max_piv.max(pa);
        min_piv = min_piv.min(pa);
        if pa == 0.0 {
            return Err(Error::SingularSystem { cond: f64::INFINITY });
        }
        for row in col + 1..n {
            let f = a[row][col] / piv;
            if f.to_f64() == 0.0 {
                continue;
            }
            for k in col..n {
                let t = a[col][k];
                a[row][k] = a[row][k] - f * t;
            }
            let t = b[col];
            b[row] = b[row] - f * t;
        }
    }
    let mut x = vec![S::zero(); n];
    for row in (0..n).rev() {
        let mut s = b[row];
        for k in row + 1..n {
            s = s - a[row][k] * x[k];
        }
        x[row] = s / a[row][row];
    }
    let cond = if n == 0 { 1.0 } else { max_piv / min_piv };
    Ok((x, cond))
}
