//! Szego functions, harmonic extension, the operator `T_w` and its fixed point.
//!
//! A Szego function on `C \ [a, b]` is fixed by its representing weight
//! `W(x) = sqrt((b-x)(x-a)) mu'(x)`, stored as
//! `ln W = A ln(b-x) + B ln(x-a) + s(x)` with `s` a Chebyshev series. With
//! `Psi` the exterior Joukowski map and `s = sum s_k T_k`,
//! `ln G = -(s_0 + sum s_k Psi^-k)/2 + A(ln2/2 - ln(1 - 1/Psi)) + B(ln2/2 - ln(1 + 1/Psi)) - (A+B) ln(h)/2`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::measures::{Interval, MeasureSpec, NikishinSystem};
use crate::numerics::{cheb_interpolate, cheb_interpolate_first_kind, cheb_points_first_kind, joukowski_inverse, ChebSeries, Point};

/// Default grid parameter shared with the equilibrium module.
pub const DEFAULT_GRID: usize = 256;

/// Szego function of a weight with explicit endpoint exponents.
#[derive(Debug, Clone, PartialEq)]
pub struct SzegoFunction {
    pub interval: Interval,
    /// Exponent of `(b - x)` in `W`.
    pub right_exp: f64,
    /// Exponent of `(x - a)` in `W`.
    pub left_exp: f64,
    /// Smooth part `s` of `ln W`.
    pub smooth: ChebSeries,
}

impl SzegoFunction {
    pub fn new(interval: Interval, right_exp: f64, left_exp: f64, smooth: ChebSeries) -> Result<Self> {
        if smooth.a != interval.a || smooth.b != interval.b {
            return Err(Error::GeometryMismatch("smooth log-weight on a different interval".into()));
        }
        Ok(SzegoFunction {
            interval,
            right_exp,
            left_exp,
            smooth,
        })
    }

    /// Szego function `G(mu, .)` of a generator measure.
    pub fn of_measure(spec: &MeasureSpec, grid: usize) -> Result<Self> {
        let iv = spec.interval;
        let smooth = ChebSeries::from_fn(iv.a, iv.b, grid, |x| spec.smooth(x).ln())?.truncated(1e-16);
        Self::new(iv, spec.alpha + 0.5, spec.beta + 0.5, smooth)
    }

    /// `ln W(x)` on the open interval.
    pub fn log_weight(&self, x: f64) -> f64 {
        let Interval { a, b } = self.interval;
        let mut v = self.smooth.eval(x);
        if self.right_exp != 0.0 {
            v += self.right_exp * (b - x).ln();
        }
        if self.left_exp != 0.0 {
            v += self.left_exp * (x - a).ln();
        }
        v
    }

    /// Boundary modulus `|G(x +- i0)|^2 = 1/W(x)`.
    pub fn boundary_modulus_sq(&self, x: f64) -> f64 {
        (-self.log_weight(x)).exp()
    }

    pub fn log_at_infinity(&self) -> f64 {
        let h = self.interval.half_width();
        -0.5 * self.smooth.coeffs[0] + 0.5 * (self.right_exp + self.left_exp) * (2.0 / h).ln()
    }

    /// `ln G(z)` for finite `z` off the interval.
    pub fn log_eval(&self, z: Complex64) -> Result<Complex64> {
        if self.interval.contains(z) {
            return Err(Error::OnSupport(format!("{z} on {}", self.interval)));
        }
        let h = self.interval.half_width();
        let xi = (z - self.interval.center()) / h;
        let r = 1.0 / joukowski_inverse(xi);
        let c = &self.smooth.coeffs;
        let mut horner = Complex64::new(0.0, 0.0);
        for &ck in c.iter().skip(1).rev() {
            horner = (horner + ck) * r;
        }
        let ln2 = std::f64::consts::LN_2;
        let mut v = -0.5 * (c[0] + horner);
        if self.right_exp != 0.0 {
            v += self.right_exp * (0.5 * ln2 - (1.0 - r).ln());
        }
        if self.left_exp != 0.0 {
            v += self.left_exp * (0.5 * ln2 - (1.0 + r).ln());
        }
        v -= 0.5 * (self.right_exp + self.left_exp) * h.ln();
        Ok(v)
    }

    pub fn eval(&self, p: Point) -> Result<Complex64> {
        match p {
            Point::Infinity => Ok(Complex64::new(self.log_at_infinity().exp(), 0.0)),
            Point::Finite(z) => Ok(self.log_eval(z)?.exp()),
        }
    }

    /// Value at a real point off the interval (real and positive there).
    pub fn eval_real(&self, x: f64) -> Result<f64> {
        Ok(self.log_eval(Complex64::new(x, 0.0))?.re.exp())
    }

    /// Szego function of the product weight `W * V` (`G` is multiplicative
    /// in the inverse sense: `G(W V) = G(W) G(V)` with `|G|^2 = 1/(W V)`).
    pub fn product(&self, other: &SzegoFunction) -> Result<SzegoFunction> {
        if self.interval != other.interval {
            return Err(Error::GeometryMismatch("product of Szego functions on different intervals".into()));
        }
        let n = self.smooth.coeffs.len().max(other.smooth.coeffs.len());
        let coeffs = (0..n)
            .map(|k| self.smooth.coeffs.get(k).unwrap_or(&0.0) + other.smooth.coeffs.get(k).unwrap_or(&0.0))
            .collect();
        Ok(SzegoFunction {
            interval: self.interval,
            right_exp: self.right_exp + other.right_exp,
            left_exp: self.left_exp + other.left_exp,
            smooth: ChebSeries {
                a: self.smooth.a,
                b: self.smooth.b,
                coeffs,
            },
        })
    }

    /// `c G`: scales the representing weight by `1/c^2`.
    pub fn scaled(&self, c: f64) -> SzegoFunction {
        let mut s = self.clone();
        s.smooth.coeffs[0] -= 2.0 * c.ln();
        s
    }
}

/// Szego function of `mu` with density samples `mu'(x_k)` at the `n` Chebyshev
/// points of the first kind of `interval` (interior points, so endpoint
/// singularities of `mu'` do not enter).
pub fn szego_function(interval: Interval, weight_samples: &[f64], z: Point) -> Result<Complex64> {
    build_szego(interval, weight_samples)?.eval(z)
}

/// The Szego function object behind [`szego_function`].
pub fn build_szego(interval: Interval, weight_samples: &[f64]) -> Result<SzegoFunction> {
    if weight_samples.is_empty() {
        return Err(Error::SizeMismatch { expected: 1, got: 0 });
    }
    let pts = cheb_points_first_kind(interval.a, interval.b, weight_samples.len());
    let mut logs = Vec::with_capacity(pts.len());
    for (x, w) in pts.iter().zip(weight_samples) {
        if !(*w > 0.0) || !w.is_finite() {
            return Err(Error::NonpositiveWeight(format!("mu'({x}) = {w}")));
        }
        logs.push((((interval.b - x) * (x - interval.a)).sqrt() * w).ln());
    }
    let smooth = cheb_interpolate_first_kind(interval.a, interval.b, &logs)?;
    SzegoFunction::new(interval, 0.0, 0.0, smooth)
}

/// Bounded harmonic function on the complement of `interval` with boundary
/// values sampled on its second-kind Chebyshev grid, by the exterior Poisson
/// kernel after the Joukowski map.
pub fn harmonic_extension(interval: Interval, boundary_samples: &[f64], z: Point) -> Result<f64> {
    let u = cheb_interpolate(interval.a, interval.b, boundary_samples)?;
    let boundary = |theta: f64| u.eval(interval.center() + interval.half_width() * theta.cos());
    let w = match z {
        Point::Infinity => None,
        Point::Finite(z) => {
            if interval.contains(z) {
                return Err(Error::OnSupport(format!("{z} on {interval}")));
            }
            Some(joukowski_inverse((z - interval.center()) / interval.half_width()))
        }
    };
    let trapezoid = |n: usize| -> f64 {
        let mut s = 0.0;
        for k in 0..n {
            let th = 2.0 * PI * (k as f64 + 0.5) / n as f64;
            let kernel = match w {
                None => 1.0,
                Some(w) => (w.norm_sqr() - 1.0) / (w - Complex64::from_polar(1.0, th)).norm_sqr(),
            };
            s += kernel * boundary(th);
        }
        s / n as f64
    };
    let mut n = 256;
    let mut prev = trapezoid(n);
    while n < 1 << 20 {
        n *= 2;
        let cur = trapezoid(n);
        if (cur - prev).abs() <= 1e-14 * cur.abs().max(1.0) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::Divergent(format!("Poisson integral at {z:?}")))
}

/// Positive functions `f_j` on `Delta_{j-1}` and `Delta_{j+1}`, sampled on
/// second-kind Chebyshev grids with `grid + 1` points.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryVectorFunction {
    pub intervals: Vec<Interval>,
    pub grid: usize,
    /// `prev[j-1]`: samples of `f_j` on `Delta_{j-1}` (`None` for `j = 1`).
    pub prev: Vec<Option<Vec<f64>>>,
    /// `next[j-1]`: samples of `f_j` on `Delta_{j+1}` (`None` for `j = m`).
    pub next: Vec<Option<Vec<f64>>>,
}

impl BoundaryVectorFunction {
    /// `f_j(x) = value(j, x)` for every component.
    pub fn from_fn(intervals: &[Interval], grid: usize, value: impl Fn(usize, f64) -> f64) -> Self {
        let m = intervals.len();
        let sample = |j: usize, iv: usize| -> Vec<f64> { intervals[iv - 1].grid(grid).into_iter().map(|x| value(j, x)).collect() };
        BoundaryVectorFunction {
            intervals: intervals.to_vec(),
            grid,
            prev: (1..=m).map(|j| (j > 1).then(|| sample(j, j - 1))).collect(),
            next: (1..=m).map(|j| (j < m).then(|| sample(j, j + 1))).collect(),
        }
    }

    pub fn constant(intervals: &[Interval], grid: usize, c: f64) -> Self {
        Self::from_fn(intervals, grid, |_, _| c)
    }

    pub fn m(&self) -> usize {
        self.intervals.len()
    }

    fn all_samples(&self) -> impl Iterator<Item = &Vec<f64>> {
        self.prev.iter().chain(self.next.iter()).flatten()
    }

    fn check_positive(&self) -> Result<()> {
        if self.all_samples().flatten().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(Error::NonpositiveInput("boundary vector function must be positive".into()));
        }
        Ok(())
    }

    /// `ln f_j` on `Delta_i` grid, or zeros if `j` is out of range (`f_0 = f_{m+1} = 1`).
    fn log_on(&self, j: usize, i: usize) -> Vec<f64> {
        let n = self.grid + 1;
        if j == 0 || j > self.m() {
            return vec![0.0; n];
        }
        let s = if i + 1 == j { &self.prev[j - 1] } else { &self.next[j - 1] };
        s.as_ref()
            .map(|v| v.iter().map(|x| x.ln()).collect())
            .unwrap_or_else(|| vec![0.0; n])
    }
}

/// `max_j sup |ln(f_j / g_j)|`.
pub fn metric_d(f: &BoundaryVectorFunction, g: &BoundaryVectorFunction) -> Result<f64> {
    if f.intervals != g.intervals || f.grid != g.grid {
        return Err(Error::GridMismatch("boundary vector functions on different grids".into()));
    }
    f.check_positive()?;
    g.check_positive()?;
    let mut d = 0.0f64;
    for (a, b) in f.all_samples().zip(g.all_samples()) {
        if a.len() != b.len() {
            return Err(Error::GridMismatch("sample count".into()));
        }
        for (x, y) in a.iter().zip(b) {
            d = d.max((x / y).ln().abs());
        }
    }
    Ok(d)
}

/// `w_j = sqrt((b_j-x)(x-a_j)) h~_j(x) sigma_j'(x)` with
/// `h~_j = 1/sqrt(|x-b_{j+1}||x-a_{j+1}|)` for `j < m` and `h~_m = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SzegoWeightVector {
    pub intervals: Vec<Interval>,
    pub grid: usize,
    pub right_exp: Vec<f64>,
    pub left_exp: Vec<f64>,
    /// Samples of the smooth part of `ln w_j` on the `Delta_j` grid.
    pub smooth_log: Vec<Vec<f64>>,
}

impl SzegoWeightVector {
    pub fn from_measures(specs: &[MeasureSpec], grid: usize) -> Result<Self> {
        let m = specs.len();
        let intervals: Vec<Interval> = specs.iter().map(|s| s.interval).collect();
        let mut smooth_log = Vec::with_capacity(m);
        for (j, s) in specs.iter().enumerate() {
            let vals = s
                .interval
                .grid(grid)
                .into_iter()
                .map(|x| {
                    let mut v = s.smooth(x).ln();
                    if j + 1 < m {
                        let nb = intervals[j + 1];
                        v -= 0.5 * ((x - nb.b).abs() * (x - nb.a).abs()).ln();
                    }
                    v
                })
                .collect();
            smooth_log.push(vals);
        }
        Ok(SzegoWeightVector {
            intervals,
            grid,
            right_exp: specs.iter().map(|s| s.alpha + 0.5).collect(),
            left_exp: specs.iter().map(|s| s.beta + 0.5).collect(),
            smooth_log,
        })
    }

    pub fn from_system(system: &NikishinSystem, grid: usize) -> Result<Self> {
        Self::from_measures(system.generators(), grid)
    }

    pub fn m(&self) -> usize {
        self.intervals.len()
    }

    /// Grid values of `w_j`.
    pub fn samples(&self, j: usize) -> Vec<f64> {
        let iv = self.intervals[j - 1];
        iv.grid(self.grid)
            .into_iter()
            .zip(&self.smooth_log[j - 1])
            .map(|(x, s)| ((iv.b - x).powf(self.right_exp[j - 1]) * (x - iv.a).powf(self.left_exp[j - 1])) * s.exp())
            .collect()
    }

    /// Szego function with boundary weight `w_j / (f_{j-1} f_{j+1})`.
    pub fn component(&self, j: usize, f: &BoundaryVectorFunction) -> Result<SzegoFunction> {
        let iv = self.intervals[j - 1];
        let left = f.log_on(j - 1, j);
        let right = f.log_on(j + 1, j);
        let logs: Vec<f64> = self.smooth_log[j - 1]
            .iter()
            .zip(left.iter().zip(&right))
            .map(|(s, (l, r))| s - l - r)
            .collect();
        let smooth = cheb_interpolate(iv.a, iv.b, &logs)?;
        SzegoFunction::new(iv, self.right_exp[j - 1], self.left_exp[j - 1], smooth)
    }

    fn check(&self, f: &BoundaryVectorFunction) -> Result<()> {
        if f.intervals != self.intervals || f.grid != self.grid {
            return Err(Error::GeometryMismatch("weight vector and boundary function differ".into()));
        }
        Ok(())
    }
}

/// `(T_w f)_j`: the Szego function with `|T_j f|^2 = f_{j-1} f_{j+1} / w_j` on
/// `Delta_j`, sampled on the neighbouring grids.
pub fn apply_t(w: &SzegoWeightVector, f: &BoundaryVectorFunction) -> Result<BoundaryVectorFunction> {
    w.check(f)?;
    f.check_positive()?;
    let m = w.m();
    let comps = (1..=m).map(|j| w.component(j, f)).collect::<Result<Vec<_>>>()?;
    let sample = |g: &SzegoFunction, iv: Interval| -> Result<Vec<f64>> { iv.grid(w.grid).into_iter().map(|x| g.eval_real(x)).collect() };
    let mut out = BoundaryVectorFunction {
        intervals: w.intervals.clone(),
        grid: w.grid,
        prev: vec![None; m],
        next: vec![None; m],
    };
    for j in 1..=m {
        if j > 1 {
            out.prev[j - 1] = Some(sample(&comps[j - 1], w.intervals[j - 2])?);
        }
        if j < m {
            out.next[j - 1] = Some(sample(&comps[j - 1], w.intervals[j])?);
        }
    }
    Ok(out)
}

/// Exact rational contraction constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rational {
    pub num: u64,
    pub den: u64,
}

impl Rational {
    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    fn reduced(num: u64, den: u64) -> Self {
        let (mut a, mut b) = (num, den);
        while b != 0 {
            (a, b) = (b, a % b);
        }
        Rational {
            num: num / a,
            den: den / a,
        }
    }
}

/// `ceil(m/2)`: the number of steps after which `T^mbar` contracts.
pub fn m_bar(m: usize) -> usize {
    m.div_ceil(2)
}

pub fn contraction_constant(m: usize) -> Result<Rational> {
    if m < 2 {
        return Err(Error::IndexOutOfRange(format!("contraction constant needs m >= 2, got {m}")));
    }
    let mb = m_bar(m) as u32;
    let den = 1u64 << mb;
    let num = if m.is_multiple_of(2) { den - 1 } else { den - 2 };
    Ok(Rational::reduced(num, den))
}

/// The fixed point of `T_w` and the Szego functions it determines.
#[derive(Debug, Clone)]
pub struct SzegoVector {
    pub components: Vec<SzegoFunction>,
    pub fixed_point: BoundaryVectorFunction,
    /// `d(f^{k+1}, f^k)` per iteration.
    pub distances: Vec<f64>,
    pub iterations: usize,
}

impl SzegoVector {
    pub fn m(&self) -> usize {
        self.components.len()
    }

    /// `G_j(p)`, with `G_0 = G_{m+1} = 1`.
    pub fn eval(&self, j: usize, p: Point) -> Result<Complex64> {
        if j == 0 || j > self.m() {
            return Ok(Complex64::new(1.0, 0.0));
        }
        self.components[j - 1].eval(p)
    }

    pub fn at_infinity(&self, j: usize) -> f64 {
        if j == 0 || j > self.m() {
            return 1.0;
        }
        self.components[j - 1].log_at_infinity().exp()
    }
}

pub fn fixed_point_t(w: &SzegoWeightVector, tol: f64, max_iter: usize) -> Result<SzegoVector> {
    let mut f = BoundaryVectorFunction::constant(&w.intervals, w.grid, 1.0);
    let mut distances = Vec::new();
    let mut iterations = 0;
    loop {
        if iterations >= max_iter {
            return Err(Error::NoConvergence {
                what: "Szego fixed point",
                iterations,
            });
        }
        let next = apply_t(w, &f)?;
        let d = metric_d(&next, &f)?;
        distances.push(d);
        iterations += 1;
        f = next;
        if d < tol {
            break;
        }
    }
    let components = (1..=w.m()).map(|j| w.component(j, &f)).collect::<Result<Vec<_>>>()?;
    Ok(SzegoVector {
        components,
        fixed_point: f,
        distances,
        iterations,
    })
}

/// Relative defect of the boundary system on interior grid points of each `Delta_j`.
pub fn boundcond_residual(g: &SzegoVector, system: &NikishinSystem) -> Result<f64> {
    let m = system.m();
    if g.m() != m || (1..=m).any(|j| g.components[j - 1].interval != system.interval(j)) {
        return Err(Error::GeometryMismatch("Szego vector and system differ".into()));
    }
    let mut worst = 0.0f64;
    for j in 1..=m {
        let iv = system.interval(j);
        let spec = system.generator(j);
        let grid = g.fixed_point.grid;
        let pts = iv.grid(grid);
        for &x in &pts[1..pts.len() - 1] {
            let lhs = g.components[j - 1].boundary_modulus_sq(x) * ((iv.b - x) * (x - iv.a)).sqrt() * spec.density(x);
            let mut rhs = 1.0;
            if j < m {
                let nb = system.interval(j + 1);
                rhs *= ((x - nb.b).abs() * (x - nb.a).abs()).sqrt();
                rhs *= g.components[j].eval_real(x)?;
            }
            if j > 1 {
                rhs *= g.components[j - 2].eval_real(x)?;
            }
            worst = worst.max((lhs - rhs).abs() / rhs.abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::MeasureSpec;

    fn iv(a: f64, b: f64) -> Interval {
        Interval::new(a, b).unwrap()
    }

    #[test]
    fn arcsine_is_constant_sqrt_pi() {
        let i = iv(-1.0, 1.0);
        let pts = cheb_points_first_kind(-1.0, 1.0, 32);
        let w: Vec<f64> = pts.iter().map(|x| 1.0 / (PI * (1.0 - x * x).sqrt())).collect();
        for z in [Point::Infinity, Point::from(2.0), Point::Finite(Complex64::new(0.3, 0.7))] {
            let g = szego_function(i, &w, z).unwrap();
            assert!((g.re - PI.sqrt()).abs() < 1e-13 && g.im.abs() < 1e-13);
        }
        let g = SzegoFunction::of_measure(&MeasureSpec::arcsine(i).unwrap(), 64).unwrap();
        assert!((g.eval(Point::from(-3.0)).unwrap().re - PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn lebesgue_oracles() {
        let spec = MeasureSpec::new(iv(-1.0, 1.0), 0.0, 0.0, ChebSeries::constant(-1.0, 1.0, 1.0), false).unwrap();
        let g = SzegoFunction::of_measure(&spec, 16).unwrap();
        assert!((g.eval(Point::Infinity).unwrap().re - 2f64.sqrt()).abs() < 1e-14);
        let near = g.eval(Point::Finite(Complex64::new(0.0, 1e-6))).unwrap();
        assert!((near.norm_sqr() - 1.0).abs() < 1e-3);
        // closed form: G = sqrt(2) / sqrt(1 - 1/Psi^2) for the Lebesgue weight
        let z = Complex64::new(0.4, 0.9);
        let r = 1.0 / joukowski_inverse(z);
        let expected = 2f64.sqrt() / (1.0 - r * r).sqrt();
        assert!((g.eval(Point::Finite(z)).unwrap() - expected).norm() < 1e-13);
    }

    #[test]
    fn harmonic_extension_oracles() {
        let i = iv(-1.0, 1.0);
        let xs = i.grid(64);
        let ones = vec![3.5; 65];
        assert!((harmonic_extension(i, &ones, Point::from(2.0)).unwrap() - 3.5).abs() < 1e-14);
        assert!((harmonic_extension(i, &ones, Point::Infinity).unwrap() - 3.5).abs() < 1e-14);
        let lin: Vec<f64> = xs.clone();
        let v = harmonic_extension(i, &lin, Point::from(2.0)).unwrap();
        assert!((v - (2.0 - 3f64.sqrt())).abs() < 1e-13);
        assert!(harmonic_extension(i, &lin, Point::Infinity).unwrap().abs() < 1e-14);
    }

    #[test]
    fn contraction_constants() {
        let c = |m| contraction_constant(m).unwrap();
        assert_eq!(c(2), Rational { num: 1, den: 2 });
        assert_eq!(c(3), Rational { num: 1, den: 2 });
        assert_eq!(c(4), Rational { num: 3, den: 4 });
        assert_eq!(c(5), Rational { num: 3, den: 4 });
        assert!(contraction_constant(1).is_err());
    }

    #[test]
    fn constant_shift_propagates_as_half_one_half() {
        let ints = [iv(-1.0, 1.0), iv(2.0, 3.0), iv(4.0, 5.0)];
        let specs: Vec<MeasureSpec> = ints.iter().map(|&i| MeasureSpec::arcsine(i).unwrap()).collect();
        let w = SzegoWeightVector::from_measures(&specs, 32).unwrap();
        let f = BoundaryVectorFunction::constant(&ints, 32, std::f64::consts::E);
        let g = BoundaryVectorFunction::constant(&ints, 32, 1.0);
        let tf = apply_t(&w, &f).unwrap();
        let tg = apply_t(&w, &g).unwrap();
        let expected = [0.5, 1.0, 0.5];
        for j in 0..3 {
            for (a, b) in tf.prev[j]
                .iter()
                .chain(tf.next[j].iter())
                .zip(tg.prev[j].iter().chain(tg.next[j].iter()))
            {
                for (x, y) in a.iter().zip(b) {
                    assert!(((x / y).ln() - expected[j]).abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn m1_fixed_point_and_residual() {
        let spec = MeasureSpec::arcsine(iv(-1.0, 1.0)).unwrap();
        let sys = NikishinSystem::new(vec![spec.clone()]).unwrap();
        let w = SzegoWeightVector::from_measures(&[spec], 64).unwrap();
        let g = fixed_point_t(&w, 1e-12, 5).unwrap();
        assert_eq!(g.iterations, 1);
        assert!(boundcond_residual(&g, &sys).unwrap() < 1e-12);
        let mut scaled = g.clone();
        scaled.components[0] = g.components[0].scaled(2.0);
        assert!((boundcond_residual(&scaled, &sys).unwrap() - 3.0).abs() < 1e-10);
    }

    fn demo(ints: &[Interval], grid: usize) -> (NikishinSystem, SzegoWeightVector) {
        let specs: Vec<MeasureSpec> = ints.iter().map(|&i| MeasureSpec::jacobi(i, 0.0, 0.0).unwrap()).collect();
        let w = SzegoWeightVector::from_measures(&specs, grid).unwrap();
        (NikishinSystem::new(specs).unwrap(), w)
    }

    #[test]
    fn metric_examples() {
        let ints = [iv(-1.0, 1.0), iv(2.0, 3.0)];
        let e = BoundaryVectorFunction::constant(&ints, 8, std::f64::consts::E);
        let one = BoundaryVectorFunction::constant(&ints, 8, 1.0);
        assert!((metric_d(&e, &one).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(metric_d(&e, &e).unwrap(), 0.0);
        let other = BoundaryVectorFunction::constant(&ints, 16, 1.0);
        assert!(matches!(metric_d(&e, &other), Err(Error::GridMismatch(_))));
        let zero = BoundaryVectorFunction::constant(&ints, 8, 0.0);
        assert!(matches!(metric_d(&zero, &one), Err(Error::NonpositiveInput(_))));
    }

    #[test]
    fn m2_and_m3_fixed_points() {
        for ints in [vec![iv(-1.0, 1.0), iv(2.0, 3.0)], vec![iv(-1.0, 1.0), iv(2.0, 3.0), iv(4.0, 5.0)]] {
            let (sys, w) = demo(&ints, 64);
            let tol = 1e-10;
            let g = fixed_point_t(&w, tol, 200).unwrap();
            assert!(boundcond_residual(&g, &sys).unwrap() < 10.0 * tol);
            let gamma = contraction_constant(ints.len()).unwrap().value();
            let mb = m_bar(ints.len());
            for k in 0..g.distances.len().saturating_sub(mb) {
                assert!(g.distances[k + mb] <= gamma * g.distances[k] + 1e-12);
            }
            for j in 1..=ints.len() {
                assert!(g.at_infinity(j) > 0.0);
            }
        }
    }

    #[test]
    fn m1_operator_ignores_input() {
        let spec = MeasureSpec::jacobi(iv(0.0, 1.0), 0.3, -0.2).unwrap();
        let w = SzegoWeightVector::from_measures(&[spec], 16).unwrap();
        let f = BoundaryVectorFunction::constant(&w.intervals, 16, 1.0);
        let t1 = apply_t(&w, &f).unwrap();
        assert_eq!(apply_t(&w, &t1).unwrap(), t1);
    }

    #[test]
    fn multiplicativity_and_boundary_limit() {
        let i = iv(-1.0, 2.0);
        let a = SzegoFunction::of_measure(&MeasureSpec::jacobi(i, 0.5, -0.3).unwrap(), 32).unwrap();
        let b = SzegoFunction::of_measure(&MeasureSpec::jacobi(i, -0.2, 1.5).unwrap(), 32).unwrap();
        let ab = a.product(&b).unwrap();
        let z = Complex64::new(0.7, -1.3);
        let lhs = ab.eval(Point::Finite(z)).unwrap();
        let rhs = a.eval(Point::Finite(z)).unwrap() * b.eval(Point::Finite(z)).unwrap();
        assert!((lhs - rhs).norm() < 1e-10 * rhs.norm());
        for x in [-0.5, 0.4, 1.5] {
            let e1 = a.eval(Point::Finite(Complex64::new(x, 1e-5))).unwrap().norm_sqr();
            let e2 = a.eval(Point::Finite(Complex64::new(x, 2e-5))).unwrap().norm_sqr();
            let limit = 2.0 * e1 - e2;
            assert!((limit / a.boundary_modulus_sq(x) - 1.0).abs() < 1e-4);
        }
    }
}
