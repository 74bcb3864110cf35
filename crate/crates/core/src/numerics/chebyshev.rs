use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Chebyshev expansion `sum c_k T_k((2x - a - b)/(b - a))` on `[a, b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebSeries {
    pub a: f64,
    pub b: f64,
    pub coeffs: Vec<f64>,
}

/// Chebyshev points of the second kind on `[a, b]`, ascending, `n + 1` of them.
pub fn cheb_points(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 0 {
        return vec![0.5 * (a + b)];
    }
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    (0..=n)
        .map(|k| {
            if k == 0 {
                a
            } else if k == n {
                b
            } else {
                c - h * (PI * k as f64 / n as f64).cos()
            }
        })
        .collect()
}

/// Interpolate samples taken at `cheb_points(a, b, samples.len() - 1)`.
pub fn cheb_interpolate(a: f64, b: f64, samples: &[f64]) -> Result<ChebSeries> {
    if samples.is_empty() {
        return Err(Error::SizeMismatch { expected: 1, got: 0 });
    }
    if !(a < b) {
        return Err(Error::DegenerateInterval(a, b));
    }
    let n = samples.len() - 1;
    if n == 0 {
        return Ok(ChebSeries {
            a,
            b,
            coeffs: vec![samples[0]],
        });
    }
    // t_k = -cos(pi k/n), so T_j(t_k) = cos(pi j (n - k)/n)
    let cos_table: Vec<f64> = (0..2 * n).map(|i| (PI * i as f64 / n as f64).cos()).collect();
    let mut coeffs = vec![0.0; n + 1];
    for (j, c) in coeffs.iter_mut().enumerate() {
        let mut s = 0.0;
        for (k, &f) in samples.iter().enumerate() {
            let idx = (j * (n - k)) % (2 * n);
            let term = f * cos_table[idx];
            s += if k == 0 || k == n { 0.5 * term } else { term };
        }
        *c = 2.0 * s / n as f64;
    }
    coeffs[0] *= 0.5;
    coeffs[n] *= 0.5;
    Ok(ChebSeries { a, b, coeffs })
}

/// Chebyshev points of the first kind on `[a, b]`, ascending, `n` of them.
pub fn cheb_points_first_kind(a: f64, b: f64, n: usize) -> Vec<f64> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    (0..n).map(|k| c - h * (PI * (2 * k + 1) as f64 / (2 * n) as f64).cos()).collect()
}

/// Interpolate samples taken at `cheb_points_first_kind(a, b, samples.len())`.
pub fn cheb_interpolate_first_kind(a: f64, b: f64, samples: &[f64]) -> Result<ChebSeries> {
    let n = samples.len();
    if n == 0 {
        return Err(Error::SizeMismatch { expected: 1, got: 0 });
    }
    if !(a < b) {
        return Err(Error::DegenerateInterval(a, b));
    }
    // t_k = -cos(pi (2k+1)/(2n)), T_j(t_k) = (-1)^j cos(pi j (2k+1)/(2n))
    let cos_table: Vec<f64> = (0..4 * n).map(|i| (PI * i as f64 / (2 * n) as f64).cos()).collect();
    let coeffs = (0..n)
        .map(|j| {
            let s: f64 = samples
                .iter()
                .enumerate()
                .map(|(k, &f)| f * cos_table[(j * (2 * k + 1)) % (4 * n)])
                .sum();
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            let norm = if j == 0 { 1.0 } else { 2.0 };
            sign * norm * s / n as f64
        })
        .collect();
    Ok(ChebSeries { a, b, coeffs })
}

impl ChebSeries {
    pub fn new(a: f64, b: f64, coeffs: Vec<f64>) -> Result<Self> {
        if !(a < b) {
            return Err(Error::DegenerateInterval(a, b));
        }
        Ok(ChebSeries { a, b, coeffs })
    }

    /// Constant function on `[a, b]`.
    pub fn constant(a: f64, b: f64, value: f64) -> Self {
        ChebSeries { a, b, coeffs: vec![value] }
    }

    /// Sample `f` on the second-kind grid with `n + 1` points and interpolate.
    pub fn from_fn(a: f64, b: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let pts = cheb_points(a, b, n);
        let vals: Vec<f64> = pts.iter().map(|&x| f(x)).collect();
        cheb_interpolate(a, b, &vals)
    }

    pub fn to_unit(&self, x: f64) -> f64 {
        (2.0 * x - self.a - self.b) / (self.b - self.a)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, x: f64) -> f64 {
        clenshaw(&self.coeffs, self.to_unit(x))
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        let t = (2.0 * z - self.a - self.b) / (self.b - self.a);
        let (mut b1, mut b2) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = 2.0 * t * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        let c0 = self.coeffs.first().copied().unwrap_or(0.0);
        t * b1 - b2 + c0
    }

    /// Sum of absolute coefficients: an upper bound for `|f|` on the interval.
    pub fn scale(&self) -> f64 {
        self.coeffs.iter().map(|c| c.abs()).sum()
    }

    /// Drop trailing coefficients below `rel * max|c|`.
    pub fn truncated(&self, rel: f64) -> ChebSeries {
        let cmax = self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let mut len = self.coeffs.len();
        while len > 1 && self.coeffs[len - 1].abs() <= rel * cmax {
            len -= 1;
        }
        ChebSeries {
            a: self.a,
            b: self.b,
            coeffs: self.coeffs[..len].to_vec(),
        }
    }

    pub fn derivative(&self) -> ChebSeries {
        let n = self.coeffs.len();
        if n <= 1 {
            return ChebSeries::constant(self.a, self.b, 0.0);
        }
        let mut d = vec![0.0; n + 1];
        for k in (1..n).rev() {
            d[k - 1] = d[k + 1] + 2.0 * k as f64 * self.coeffs[k];
        }
        d[0] *= 0.5;
        d.truncate(n - 1);
        let s = 2.0 / (self.b - self.a);
        ChebSeries {
            a: self.a,
            b: self.b,
            coeffs: d.into_iter().map(|c| c * s).collect(),
        }
    }

    /// All real roots strictly inside `(a, b)`, polished on the series itself.
    pub fn roots(&self) -> Result<Vec<f64>> {
        let f = |x: f64| self.eval(x);
        self.roots_polished(&f, self.scale())
    }

    /// Roots from the colleague matrix, each polished with Newton steps on `f`
    /// (derivative from the series) until `|f| < 1e-12 * scale`.
    pub fn roots_polished(&self, f: &dyn Fn(f64) -> f64, scale: f64) -> Result<Vec<f64>> {
        let s = self.truncated(1e-14);
        let d = s.degree();
        if d == 0 {
            return Ok(Vec::new());
        }
        let c = &s.coeffs;
        let lead = c[d];
        let mut m = DMatrix::<f64>::zeros(d, d);
        if d == 1 {
            m[(0, 0)] = -c[0] / lead;
        } else {
            m[(0, 1)] = 1.0;
            for i in 1..d - 1 {
                m[(i, i - 1)] = 0.5;
                m[(i, i + 1)] = 0.5;
            }
            m[(d - 1, d - 2)] += 0.5;
            for k in 0..d {
                m[(d - 1, k)] -= 0.5 * c[k] / lead;
            }
        }
        let eig = m.complex_eigenvalues();
        let deriv = s.derivative();
        let h = 0.5 * (s.b - s.a);
        let mid = 0.5 * (s.a + s.b);
        let mut roots: Vec<f64> = Vec::new();
        for ev in eig.iter() {
            if ev.im.abs() > 1e-6 || ev.re.abs() >= 1.0 + 1e-8 {
                continue;
            }
            let mut x = (mid + h * ev.re).clamp(s.a, s.b);
            let mut converged = false;
            let mut last = f64::INFINITY;
            for _ in 0..50 {
                let fx = f(x);
                if fx.abs() < 1e-12 * scale {
                    converged = true;
                    break;
                }
                let dx = deriv.eval(x);
                if dx == 0.0 || !dx.is_finite() {
                    break;
                }
                let step = fx / dx;
                let nx = (x - step).clamp(s.a, s.b);
                if nx == x || step.abs() <= 4.0 * f64::EPSILON * h.max(x.abs()) {
                    converged = true;
                    break;
                }
                // noise-limited: the step stopped shrinking at a tiny size
                if step.abs() >= 0.5 * last && step.abs() <= 1e-8 * h {
                    converged = true;
                    break;
                }
                last = step.abs();
                x = nx;
            }
            if !converged && last <= 1e-8 * h {
                converged = true;
            }
            if !converged {
                return Err(Error::NoConvergence {
                    what: "Newton root polish",
                    iterations: 50,
                });
            }
            if x > s.a && x < s.b {
                roots.push(x);
            }
        }
        roots.sort_by(|a, b| a.total_cmp(b));
        // two eigenvalues polished onto one noise-limited root
        let mut out: Vec<f64> = Vec::with_capacity(roots.len());
        for x in roots {
            match out.last_mut() {
                Some(prev) if x - *prev <= 1e-8 * h => {
                    if f(x).abs() < f(*prev).abs() {
                        *prev = x;
                    }
                }
                _ => out.push(x),
            }
        }
        Ok(out)
    }
}

fn clenshaw(c: &[f64], t: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for &ck in c.iter().skip(1).rev() {
        let b0 = 2.0 * t * b1 - b2 + ck;
        b2 = b1;
        b1 = b0;
    }
    t * b1 - b2 + c.first().copied().unwrap_or(0.0)
}
