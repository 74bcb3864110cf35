//! Monic polynomials in product form and Chebyshev-basis polynomial algebra.

use num_complex::Complex64;

use crate::numerics::Scalar;

/// `prod (z - r_k)`.
pub fn eval_roots(roots: &[f64], z: Complex64) -> Complex64 {
    roots.iter().fold(Complex64::new(1.0, 0.0), |p, r| p * (z - r))
}

pub fn eval_roots_real(roots: &[f64], x: f64) -> f64 {
    roots.iter().fold(1.0, |p, r| p * (x - r))
}

/// Chebyshev coefficients on `[a, b]` of `prod (x - r_k)`.
pub fn cheb_from_roots(roots: &[f64], a: f64, b: f64) -> Vec<f64> {
    cheb_from_roots_s(roots, a, b)
}

pub fn cheb_from_roots_s<S: Scalar>(roots: &[f64], a: f64, b: f64) -> Vec<S> {
    let h = S::from_f64(0.5 * (b - a));
    let mid = S::from_f64(0.5 * (a + b));
    let half = S::from_f64(0.5);
    let mut c = vec![S::one()];
    for &r in roots {
        let s = (S::from_f64(r) - mid) / h;
        let mut next = vec![S::zero(); c.len() + 1];
        for (k, &ck) in c.iter().enumerate() {
            if k == 0 {
                next[1] = next[1] + ck;
            } else {
                next[k + 1] = next[k + 1] + half * ck;
                next[k - 1] = next[k - 1] + half * ck;
            }
            next[k] = next[k] - s * ck;
        }
        c = next.into_iter().map(|v| v * h).collect();
    }
    c
}

/// Chebyshev coefficient of `T_n` in the monic `x^n` on an interval of half-width `h`.
pub fn monic_leading<S: Scalar>(n: usize, h: S) -> S {
    let mut v = S::one();
    for k in 0..n {
        v = v * h;
        if k > 0 {
            v = v * S::from_f64(0.5);
        }
    }
    v
}

/// `U_0(s), ..., U_{n-1}(s)`.
pub fn cheb_u_values<S: Scalar>(s: S, n: usize) -> Vec<S> {
    let mut u = Vec::with_capacity(n);
    if n > 0 {
        u.push(S::one());
    }
    if n > 1 {
        u.push(s + s);
    }
    for k in 2..n {
        let v = (s + s) * u[k - 1] - u[k - 2];
        u.push(v);
    }
    u
}

/// Clenshaw summation of `sum c_k T_k(t)`.
pub fn clenshaw_s<S: Scalar>(c: &[S], t: S) -> S {
    let (mut b1, mut b2) = (S::zero(), S::zero());
    for &ck in c.iter().skip(1).rev() {
        let b0 = (t + t) * b1 - b2 + ck;
        b2 = b1;
        b1 = b0;
    }
    let c0 = c.first().copied().unwrap_or(S::zero());
    t * b1 - b2 + c0
}

/// Clenshaw summation at a complex argument `t = (re, im)`.
pub fn clenshaw_complex_s<S: Scalar>(c: &[S], t: (S, S)) -> (S, S) {
    let mul = |a: (S, S), b: (S, S)| (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0);
    let two_t = (t.0 + t.0, t.1 + t.1);
    let (mut b1, mut b2) = ((S::zero(), S::zero()), (S::zero(), S::zero()));
    for &ck in c.iter().skip(1).rev() {
        let p = mul(two_t, b1);
        let b0 = (p.0 - b2.0 + ck, p.1 - b2.1);
        b2 = b1;
        b1 = b0;
    }
    let c0 = c.first().copied().unwrap_or(S::zero());
    let p = mul(t, b1);
    (p.0 - b2.0 + c0, p.1 - b2.1)
}

/// Chebyshev coefficients of the polynomial part of `p(z) s^(z)`, i.e. of
/// `int (p(z) - p(x)) / (z - x) ds(x)`, given `u_moments[l] = int U_l ds` on
/// an interval of half-width `h`.
pub fn polynomial_part<S: Scalar>(c: &[S], u_moments: &[S], h: S) -> Vec<S> {
    let n = c.len();
    if n <= 1 {
        return Vec::new();
    }
    let mut out = vec![S::zero(); n - 1];
    for (deg, &cn) in c.iter().enumerate().skip(1) {
        for (k, o) in out.iter_mut().enumerate().take(deg) {
            let m = u_moments[deg - 1 - k];
            *o = *o + cn * (m + m);
        }
        out[0] = out[0] - cn * u_moments[deg - 1];
    }
    out.into_iter().map(|v| v / h).collect()
}
