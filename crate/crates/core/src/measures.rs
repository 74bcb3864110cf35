//! Generating measures, Nikishin systems and their Cauchy transforms.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::quadrature::{adaptive, jacobi_mass, jacobi_recurrence, rel_diff};
use crate::numerics::{cauchy_sum, cheb_points, gauss_jacobi_rule, on_segment, ChebSeries, QuadratureRule};

/// Default number of quadrature nodes per generator.
pub const DEFAULT_NODES: usize = 192;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub a: f64,
    pub b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::DegenerateInterval(a, b));
        }
        Ok(Interval { a, b })
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.a + self.b)
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.b - self.a)
    }

    pub fn len(&self) -> f64 {
        self.b - self.a
    }

    pub fn contains(&self, z: Complex64) -> bool {
        on_segment(z, self.a, self.b)
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        self.a <= other.b && other.a <= self.b
    }

    /// Distance from `z` to the segment.
    pub fn distance(&self, z: Complex64) -> f64 {
        let x = z.re.clamp(self.a, self.b);
        (z - x).norm()
    }

    /// Chebyshev points of the second kind, `n + 1` of them.
    pub fn grid(&self, n: usize) -> Vec<f64> {
        cheb_points(self.a, self.b, n)
    }
}

impl std::fmt::Display for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}, {}]", self.a, self.b)
    }
}

/// Measure `c (b-x)^alpha (x-a)^beta g(x) dx` with `g` a positive Chebyshev series.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureSpec {
    pub interval: Interval,
    pub alpha: f64,
    pub beta: f64,
    pub modifier: ChebSeries,
    pub mass_normalized: bool,
    /// Constant `c`: `1/mass` when normalized, else 1.
    pub scale: f64,
}

impl MeasureSpec {
    pub fn new(interval: Interval, alpha: f64, beta: f64, modifier: ChebSeries, mass_normalized: bool) -> Result<Self> {
        if !(alpha > -1.0) || !alpha.is_finite() {
            return Err(Error::InvalidExponent(alpha));
        }
        if !(beta > -1.0) || !beta.is_finite() {
            return Err(Error::InvalidExponent(beta));
        }
        if modifier.a != interval.a || modifier.b != interval.b {
            return Err(Error::GeometryMismatch(format!(
                "modifier lives on [{}, {}], measure on {}",
                modifier.a, modifier.b, interval
            )));
        }
        let min = cheb_points(interval.a, interval.b, 511)
            .into_iter()
            .map(|x| modifier.eval(x))
            .fold(f64::INFINITY, f64::min);
        if !(min > 0.0) {
            return Err(Error::NonpositiveWeight(format!("modifier minimum {min:e} on {interval}")));
        }
        let mut spec = MeasureSpec {
            interval,
            alpha,
            beta,
            modifier,
            mass_normalized,
            scale: 1.0,
        };
        if mass_normalized {
            let (mass, _) = adaptive(
                16,
                1e-14,
                |n| Ok(spec.jacobi_rule(n)?.integrate(|x| spec.modifier.eval(x))),
                |a, b| rel_diff(*a, *b),
            )?;
            spec.scale = 1.0 / mass;
        }
        Ok(spec)
    }

    /// Probability measure `(b-x)^alpha (x-a)^beta dx / mass`.
    pub fn jacobi(interval: Interval, alpha: f64, beta: f64) -> Result<Self> {
        let g = ChebSeries::constant(interval.a, interval.b, 1.0);
        Self::new(interval, alpha, beta, g, true)
    }

    /// Arcsine (equilibrium) probability measure of the interval.
    pub fn arcsine(interval: Interval) -> Result<Self> {
        Self::jacobi(interval, -0.5, -0.5)
    }

    /// Smooth factor `c g(x)` multiplying the Jacobi weight.
    pub fn smooth(&self, x: f64) -> f64 {
        self.scale * self.modifier.eval(x)
    }

    /// Density with respect to Lebesgue measure.
    pub fn density(&self, x: f64) -> f64 {
        let Interval { a, b } = self.interval;
        (b - x).powf(self.alpha) * (x - a).powf(self.beta) * self.smooth(x)
    }

    fn jacobi_rule(&self, n: usize) -> Result<QuadratureRule> {
        gauss_jacobi_rule(self.interval.a, self.interval.b, self.alpha, self.beta, n)
    }

    /// Gauss rule for `d sigma` with `n` nodes.
    pub fn rule(&self, n: usize) -> Result<QuadratureRule> {
        Ok(self.jacobi_rule(n)?.reweighted(|x| self.smooth(x)))
    }

    pub fn mass(&self) -> f64 {
        if self.mass_normalized {
            1.0
        } else {
            adaptive(16, 1e-14, |n| Ok(self.rule(n)?.mass()), |a, b| rel_diff(*a, *b))
                .map(|v| v.0)
                .unwrap_or(f64::NAN)
        }
    }
}

/// `int ln rho d eta` with `d eta = dx / sqrt((b-x)(x-a))`.
pub fn szego_integral(spec: &MeasureSpec) -> Result<f64> {
    let h = spec.interval.half_width();
    // int ln(b-x) d eta = int ln(x-a) d eta = pi ln(h/2)
    let singular = (spec.alpha + spec.beta) * PI * (h / 2.0).ln();
    let Interval { a, b } = spec.interval;
    let (smooth, _) = adaptive(
        16,
        1e-13,
        |n| {
            let r = gauss_jacobi_rule(a, b, -0.5, -0.5, n)?;
            Ok(r.integrate(|x| spec.smooth(x).ln()))
        },
        |p, q| (p - q).abs() / p.abs().max(1.0),
    )?;
    Ok(singular + smooth)
}

/// Cauchy transform of a single measure, adaptive in the node count.
///
/// Close to the support the smooth factor is split off,
/// `int (g(x) - g(z))/(z-x) dJ + g(z) J^(z)`, and the Jacobi part is summed as
/// a continued fraction, which is cheap to extend far beyond the Gauss node cap.
pub fn cauchy_transform(spec: &MeasureSpec, z: Complex64) -> Result<Complex64> {
    if spec.interval.contains(z) {
        return Err(Error::OnSupport(format!("{z}")));
    }
    let diff = |p: &Complex64, q: &Complex64| (p - q).norm() / p.norm().max(q.norm()).max(1e-300);
    if spec.interval.distance(z) >= 0.25 * spec.interval.len() {
        let (v, _) = adaptive(
            32,
            1e-13,
            |n| {
                let r = spec.rule(n)?;
                let ones = vec![1.0; r.len()];
                Ok(cauchy_sum(&r.nodes, &r.weights, &ones, z))
            },
            diff,
        )?;
        return Ok(v);
    }
    let gz = spec.modifier.eval_complex(z) * spec.scale;
    let (smooth, _) = adaptive(
        32,
        1e-13,
        |n| {
            let r = spec.jacobi_rule(n)?;
            let mut s = Complex64::new(0.0, 0.0);
            for (&x, &w) in r.nodes.iter().zip(&r.weights) {
                s += w * (spec.smooth(x) - gz) / (z - x);
            }
            Ok(s)
        },
        diff,
    )?;
    let Interval { a, b } = spec.interval;
    Ok(smooth + gz * jacobi_cauchy(a, b, spec.alpha, spec.beta, z)?)
}

/// `int (b-x)^alpha (x-a)^beta dx / (z - x)` by the Jacobi continued fraction.
pub fn jacobi_cauchy(a: f64, b: f64, alpha: f64, beta: f64, z: Complex64) -> Result<Complex64> {
    let h = 0.5 * (b - a);
    let t = (z - 0.5 * (a + b)) / h;
    let prefactor = h.powf(alpha + beta) * jacobi_mass(alpha, beta);
    let eval = |n: usize| {
        let (ra, rb) = jacobi_recurrence(alpha, beta, n);
        let mut q = Complex64::new(0.0, 0.0);
        for k in (0..n).rev() {
            let d = t - ra[k] - q;
            if k == 0 {
                return 1.0 / d;
            }
            q = rb[k - 1] / d;
        }
        unreachable!()
    };
    let mut n = 64;
    let mut prev = eval(n);
    while n < 1 << 22 {
        n *= 2;
        let cur = eval(n);
        if (cur - prev).norm() <= 1e-14 * cur.norm() {
            return Ok(prefactor * cur);
        }
        prev = cur;
    }
    Err(Error::Divergent(format!("continued fraction at {z}")))
}

/// Nikishin system generated by measures on consecutive disjoint intervals.
///
/// Indices in the public API are 1-based, matching `s_{j,k} = <sigma_j, ..., sigma_k>`.
#[derive(Debug, Clone)]
pub struct NikishinSystem {
    generators: Vec<MeasureSpec>,
    rules: Vec<QuadratureRule>,
    /// `inner[j][k - j][i] = s^_{j+2,k+1}(x_i)` at the nodes of generator `j+1`
    /// (0-based storage; `inner[j][0]` is all ones).
    inner: Vec<Vec<Vec<f64>>>,
}

impl NikishinSystem {
    pub fn new(generators: Vec<MeasureSpec>) -> Result<Self> {
        Self::with_nodes(generators, DEFAULT_NODES)
    }

    pub fn with_nodes(generators: Vec<MeasureSpec>, n_nodes: usize) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::IndexOutOfRange("a Nikishin system needs m >= 1 generators".into()));
        }
        for (j, w) in generators.windows(2).enumerate() {
            if w[0].interval.overlaps(&w[1].interval) {
                return Err(Error::OverlappingSupports(format!(
                    "interval {} {} meets interval {} {}",
                    j + 1,
                    w[0].interval,
                    j + 2,
                    w[1].interval
                )));
            }
        }
        let rules = generators.iter().map(|g| g.rule(n_nodes)).collect::<Result<Vec<_>>>()?;
        let m = generators.len();
        let mut inner: Vec<Vec<Vec<f64>>> = vec![Vec::new(); m];
        for j in (0..m).rev() {
            let nodes = &rules[j].nodes;
            let mut row = vec![vec![1.0; nodes.len()]];
            for k in j + 1..m {
                let next = &rules[j + 1];
                let dens = &inner[j + 1][k - j - 1];
                let vals = nodes
                    .iter()
                    .map(|&x| cauchy_sum(&next.nodes, &next.weights, dens, Complex64::new(x, 0.0)).re)
                    .collect();
                row.push(vals);
            }
            inner[j] = row;
        }
        Ok(NikishinSystem { generators, rules, inner })
    }

    pub fn m(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[MeasureSpec] {
        &self.generators
    }

    pub fn generator(&self, j: usize) -> &MeasureSpec {
        &self.generators[j - 1]
    }

    pub fn interval(&self, j: usize) -> Interval {
        self.generators[j - 1].interval
    }

    pub fn intervals(&self) -> Vec<Interval> {
        self.generators.iter().map(|g| g.interval).collect()
    }

    pub fn n_nodes(&self) -> usize {
        self.rules[0].len()
    }

    /// Quadrature rule for `d sigma_j`.
    pub fn rule(&self, j: usize) -> &QuadratureRule {
        &self.rules[j - 1]
    }

    /// The system generated by the same measures in reverse order.
    pub fn reversed(&self) -> Result<NikishinSystem> {
        let mut g = self.generators.clone();
        g.reverse();
        Self::with_nodes(g, self.n_nodes())
    }

    /// Same generators, different node count.
    pub fn refined(&self, n_nodes: usize) -> Result<NikishinSystem> {
        Self::with_nodes(self.generators.clone(), n_nodes)
    }

    fn check(&self, j: usize, k: usize) -> Result<()> {
        if j < 1 || j > k || k > self.m() {
            return Err(Error::IndexOutOfRange(format!("(j, k) = ({j}, {k}) with m = {}", self.m())));
        }
        Ok(())
    }

    /// Weights of `d s_{j,k}` on the generator-`j` nodes (signed).
    pub fn nested_weights(&self, j: usize, k: usize) -> Result<Vec<f64>> {
        self.check(j, k)?;
        let r = &self.rules[j - 1];
        let d = &self.inner[j - 1][k - j];
        Ok(r.weights.iter().zip(d).map(|(w, v)| w * v).collect())
    }

    /// Values of `s^_{j+1,k}` at the generator-`j` nodes (ones when `j = k`).
    pub fn inner_values(&self, j: usize, k: usize) -> Result<&[f64]> {
        self.check(j, k)?;
        Ok(&self.inner[j - 1][k - j])
    }

    pub fn shat_eval(&self, j: usize, k: usize, z: Complex64) -> Result<Complex64> {
        self.check(j, k)?;
        let r = &self.rules[j - 1];
        if on_segment(z, r.a, r.b) {
            return Err(Error::OnSupport(format!("{z} on interval {j}")));
        }
        Ok(cauchy_sum(&r.nodes, &r.weights, &self.inner[j - 1][k - j], z))
    }

    /// `int x^nu d s_{j,k}` for `nu = 0..=max_degree`.
    pub fn nested_moments(&self, j: usize, k: usize, max_degree: usize) -> Result<Vec<f64>> {
        let w = self.nested_weights(j, k)?;
        let x = &self.rules[j - 1].nodes;
        Ok((0..=max_degree)
            .map(|nu| x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(nu as i32)).sum())
            .collect())
    }
}

/// `s^_{k,j}` (`k >= j`) of the reversed ordering, evaluated on the reversed system
/// `rev`: `<sigma_k, sigma_{k-1}, ..., sigma_j>`.
pub fn shat_reversed(rev: &NikishinSystem, k: usize, j: usize, z: Complex64) -> Result<Complex64> {
    let m = rev.m();
    if j < 1 || j > k || k > m {
        return Err(Error::IndexOutOfRange(format!("reversed (k, j) = ({k}, {j}) with m = {m}")));
    }
    rev.shat_eval(m + 1 - k, m + 1 - j, z)
}
