//! Vector equilibrium problem with the tridiagonal interaction matrix.
//!
//! Densities are stored as smooth factors `u_j` against the arcsine weight:
//! `lambda_j'(x) = u_j(x) / (pi sqrt((b_j - x)(x - a_j)))`, sampled on Chebyshev
//! points of the second kind. Potentials and the comparison functions come in
//! closed form from the Chebyshev coefficients of `u_j`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::measures::Interval;
use crate::numerics::{cheb_interpolate, joukowski_inverse, ChebSeries};

/// Default grid parameter: `n + 1` Chebyshev points per interval.
pub const DEFAULT_GRID: usize = 256;

/// Direction `p` of a straight ray of multi-indices and its partial sums `P`.
#[derive(Debug, Clone, PartialEq)]
pub struct RaySpec {
    pub p: Vec<f64>,
    pub big_p: Vec<f64>,
}

impl RaySpec {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::InvalidRay("empty ray".into()));
        }
        if !(p[0] > 0.0) {
            return Err(Error::InvalidRay("p_1 must be positive".into()));
        }
        if p.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(Error::InvalidRay("entries must be nonnegative".into()));
        }
        if p.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::InvalidRay("ray not nonincreasing".into()));
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > 1e-14 {
            return Err(Error::InvalidRay(format!("entries sum to {sum}, not 1")));
        }
        let mut big_p = Vec::with_capacity(p.len());
        let mut acc = 0.0;
        for v in &p {
            acc += v;
            big_p.push(acc);
        }
        *big_p.last_mut().unwrap() = 1.0;
        Ok(RaySpec { p, big_p })
    }

    pub fn m(&self) -> usize {
        self.p.len()
    }

    /// `P_j` with `P_0 = P_{m+1} = 0` (1-based `j`).
    pub fn big_p(&self, j: usize) -> f64 {
        if j == 0 || j > self.m() {
            0.0
        } else {
            self.big_p[j - 1]
        }
    }

    /// Multi-index `k p`, if every entry is an integer.
    pub fn multi_index(&self, k: usize) -> Result<Vec<usize>> {
        self.p
            .iter()
            .map(|&pj| {
                let v = pj * k as f64;
                let r = v.round();
                if (v - r).abs() > 1e-9 {
                    Err(Error::NonrealizableRay(k))
                } else {
                    Ok(r as usize)
                }
            })
            .collect()
    }
}

/// Symmetric tridiagonal matrix with diagonal `P_j^2` and off-diagonal `-P_j P_{j+1}/2`.
pub fn interaction_matrix(ray: &RaySpec) -> DMatrix<f64> {
    let m = ray.m();
    DMatrix::from_fn(m, m, |i, k| {
        let (pi, pk) = (ray.big_p[i], ray.big_p[k]);
        if i == k {
            pi * pi
        } else if i.abs_diff(k) == 1 {
            -0.5 * pi * pk
        } else {
            0.0
        }
    })
}

/// A measure to be swept onto an interval.
#[derive(Debug, Clone)]
pub enum SourceMeasure {
    /// `u(t) dt / (pi sqrt((b-t)(t-a)))` with `u` sampled on the second-kind grid.
    Grid {
        interval: Interval,
        samples: Vec<f64>,
        weight: f64,
    },
    /// Point masses.
    Atoms { points: Vec<f64>, masses: Vec<f64> },
}

impl SourceMeasure {
    fn overlaps(&self, target: &Interval) -> bool {
        match self {
            SourceMeasure::Grid { interval, .. } => interval.overlaps(target),
            SourceMeasure::Atoms { points, .. } => points.iter().any(|&t| t >= target.a && t <= target.b),
        }
    }

    /// `sum_i m_i f(t_i)` over a discretization of the measure.
    fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        match self {
            SourceMeasure::Grid { interval, samples, weight } => {
                let n = samples.len() - 1;
                let pts = interval.grid(n);
                let mut s = 0.0;
                for (k, (&t, &u)) in pts.iter().zip(samples).enumerate() {
                    let lw = if k == 0 || k == n { 0.5 } else { 1.0 };
                    s += lw * u * f(t);
                }
                weight * s / n as f64
            }
            SourceMeasure::Atoms { points, masses } => points.iter().zip(masses).map(|(&t, &mm)| mm * f(t)).sum(),
        }
    }
}

/// Smooth factor of the balayage of `source` onto `target`, sampled on the
/// `n + 1` Chebyshev points of `target`:
/// `u(x) = int sqrt(|(t-a)(t-b)|) / |t-x| d source(t)`.
pub fn balayage_onto(source: &SourceMeasure, target: Interval, n: usize) -> Result<Vec<f64>> {
    if source.overlaps(&target) {
        return Err(Error::OverlappingSupports(format!("source meets target {target}")));
    }
    let Interval { a, b } = target;
    Ok(target
        .grid(n)
        .into_iter()
        .map(|x| source.integrate(|t| ((t - a) * (t - b)).abs().sqrt() / (t - x).abs()))
        .collect())
}

/// Converged vector equilibrium measure.
#[derive(Debug, Clone)]
pub struct EquilibriumSolution {
    pub intervals: Vec<Interval>,
    pub ray: RaySpec,
    pub grid: usize,
    /// Samples of `u_j` on the `grid + 1` Chebyshev points of each interval.
    pub densities: Vec<Vec<f64>>,
    /// Chebyshev coefficients of `u_j` in the normalized variable.
    pub coeffs: Vec<ChebSeries>,
    pub robin_constants: Vec<f64>,
    /// Sup-norm change of the densities per sweep.
    pub sweep_changes: Vec<f64>,
    pub sweeps: usize,
}

/// Sweep options.
#[derive(Debug, Clone, Copy)]
pub struct EquilibriumOptions {
    pub tol: f64,
    pub max_sweeps: usize,
    pub grid: usize,
    /// Relaxation factor in (0, 1]; 1 is the plain sweep.
    pub damping: f64,
}

impl Default for EquilibriumOptions {
    fn default() -> Self {
        EquilibriumOptions {
            tol: 1e-13,
            max_sweeps: 1000,
            grid: DEFAULT_GRID,
            damping: 1.0,
        }
    }
}

pub fn solve_vector_equilibrium(intervals: &[Interval], ray: &RaySpec, tol: f64, max_sweeps: usize) -> Result<EquilibriumSolution> {
    let opts = EquilibriumOptions {
        tol,
        max_sweeps,
        ..Default::default()
    };
    solve_with(intervals, ray, &opts)
}

pub fn solve_with(intervals: &[Interval], ray: &RaySpec, opts: &EquilibriumOptions) -> Result<EquilibriumSolution> {
    let m = intervals.len();
    if ray.m() != m {
        return Err(Error::GeometryMismatch(format!("{} intervals, ray of length {}", m, ray.m())));
    }
    for (j, w) in intervals.windows(2).enumerate() {
        if w[0].overlaps(&w[1]) {
            return Err(Error::OverlappingSupports(format!(
                "interval {} {} meets interval {} {}",
                j + 1,
                w[0],
                j + 2,
                w[1]
            )));
        }
    }
    let n = opts.grid;
    let mut u: Vec<Vec<f64>> = vec![vec![1.0; n + 1]; m];
    let mut changes = Vec::new();
    let mut converged = m == 1;
    let mut sweeps = if m == 1 { 1 } else { 0 };
    while !converged {
        if sweeps >= opts.max_sweeps {
            return Err(Error::NoConvergence {
                what: "equilibrium sweep",
                iterations: sweeps,
            });
        }
        let mut next = Vec::with_capacity(m);
        for j in 1..=m {
            let pj = ray.big_p(j);
            let cj = (ray.big_p(j - 1) + ray.big_p(j + 1)) / pj;
            let mut bal = vec![0.0; n + 1];
            for (nb, coef) in [(j - 1, ray.big_p(j - 1) / pj), (j + 1, ray.big_p(j + 1) / pj)] {
                if nb == 0 || nb > m || coef == 0.0 {
                    continue;
                }
                let src = SourceMeasure::Grid {
                    interval: intervals[nb - 1],
                    samples: u[nb - 1].clone(),
                    weight: coef,
                };
                let part = balayage_onto(&src, intervals[j - 1], n)?;
                bal.iter_mut().zip(part).for_each(|(x, y)| *x += y);
            }
            let fresh: Vec<f64> = bal
                .iter()
                .zip(&u[j - 1])
                .map(|(bv, old)| {
                    let target = 0.5 * bv + (1.0 - 0.5 * cj);
                    opts.damping * target + (1.0 - opts.damping) * old
                })
                .collect();
            next.push(fresh);
        }
        let change = next
            .iter()
            .zip(&u)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max);
        u = next;
        changes.push(change);
        sweeps += 1;
        converged = change < opts.tol;
    }
    if let Some(rate) = observed_rate(&changes) {
        if rate >= 0.95 {
            return Err(Error::NoConvergence {
                what: "equilibrium sweep (stagnating)",
                iterations: sweeps,
            });
        }
    }
    let coeffs = intervals
        .iter()
        .zip(&u)
        .map(|(iv, s)| cheb_interpolate(iv.a, iv.b, s))
        .collect::<Result<Vec<_>>>()?;
    let mut sol = EquilibriumSolution {
        intervals: intervals.to_vec(),
        ray: ray.clone(),
        grid: n,
        densities: u,
        coeffs,
        robin_constants: vec![0.0; m],
        sweep_changes: changes,
        sweeps,
    };
    for j in 1..=m {
        let mid = intervals[j - 1].center();
        sol.robin_constants[j - 1] = sol.field_level(j, mid);
    }
    Ok(sol)
}

/// Geometric mean of successive change ratios after a burn-in of 5 sweeps,
/// ignoring changes already at rounding level.
pub fn observed_rate(changes: &[f64]) -> Option<f64> {
    let useful: Vec<f64> = changes.iter().skip(5).copied().filter(|c| *c > 1e-12).collect();
    if useful.len() < 3 {
        return None;
    }
    let k = useful.len() - 1;
    Some((useful[k] / useful[0]).powf(1.0 / k as f64))
}

impl EquilibriumSolution {
    pub fn m(&self) -> usize {
        self.intervals.len()
    }

    fn check(&self, j: usize) -> Result<()> {
        if j < 1 || j > self.m() {
            return Err(Error::IndexOutOfRange(format!("j = {j} with m = {}", self.m())));
        }
        Ok(())
    }

    /// Total mass of `lambda_j`.
    pub fn mass(&self, j: usize) -> f64 {
        self.coeffs[j - 1].coeffs[0]
    }

    /// Density `lambda_j'(x)` with respect to Lebesgue measure (interior points).
    pub fn density(&self, j: usize, x: f64) -> f64 {
        let iv = self.intervals[j - 1];
        self.coeffs[j - 1].eval(x) / (PI * ((iv.b - x) * (x - iv.a)).sqrt())
    }

    /// Smooth factor `u_j(x)`.
    pub fn smooth_factor(&self, j: usize, x: f64) -> f64 {
        self.coeffs[j - 1].eval(x)
    }

    fn xi(&self, j: usize, z: Complex64) -> Complex64 {
        let iv = self.intervals[j - 1];
        (z - iv.center()) / iv.half_width()
    }

    /// Logarithmic potential `V^{lambda_j}(z)`.
    pub fn potential(&self, j: usize, z: Complex64) -> Result<f64> {
        self.check(j)?;
        let iv = self.intervals[j - 1];
        let c = &self.coeffs[j - 1].coeffs;
        let w = joukowski_inverse(self.xi(j, z));
        let inv = 1.0 / w;
        let mut s = c[0] * ((2.0 / iv.half_width()).ln() - w.norm().ln());
        let mut pw = Complex64::new(1.0, 0.0);
        for (k, ck) in c.iter().enumerate().skip(1) {
            pw *= inv;
            s += ck * pw.re / k as f64;
        }
        Ok(s)
    }

    /// `Phi_j(z) = exp(int ln(z-x) d lambda_j(x))`.
    pub fn phi_eval(&self, j: usize, z: Complex64) -> Result<Complex64> {
        self.check(j)?;
        let iv = self.intervals[j - 1];
        if iv.contains(z) {
            return Err(Error::OnSupport(format!("{z} on interval {j}")));
        }
        Ok(self.log_phi(j, z).exp())
    }

    /// `ln Phi_j(z)` with the branch real on `(b_j, inf)`, continuous off `(-inf, b_j]`.
    pub fn log_phi(&self, j: usize, z: Complex64) -> Complex64 {
        let iv = self.intervals[j - 1];
        let c = &self.coeffs[j - 1].coeffs;
        let w = joukowski_inverse(self.xi(j, z));
        let inv = 1.0 / w;
        let mut s = (0.5 * iv.half_width()).ln() + w.ln();
        let mut pw = Complex64::new(1.0, 0.0);
        for (k, ck) in c.iter().enumerate().skip(1) {
            pw *= inv;
            s -= ck * pw / k as f64;
        }
        s
    }

    pub fn robin(&self, j: usize) -> f64 {
        self.robin_constants[j - 1]
    }

    /// `C_j = exp(omega_j)`.
    pub fn c_const(&self, j: usize) -> f64 {
        self.robin(j).exp()
    }

    /// Left side of the equilibrium relation at real `x`.
    pub fn field_level(&self, j: usize, x: f64) -> f64 {
        let m = self.m();
        let z = Complex64::new(x, 0.0);
        let pj = self.ray.big_p(j);
        let mut v = self.potential(j, z).unwrap_or(f64::NAN);
        for nb in [j - 1, j + 1] {
            if nb >= 1 && nb <= m {
                let coef = self.ray.big_p(nb) / pj;
                if coef != 0.0 {
                    v -= 0.5 * coef * self.potential(nb, z).unwrap_or(f64::NAN);
                }
            }
        }
        v
    }

    /// Max deviation of the equilibrium relation from `omega_j` over 256-point grids.
    pub fn equilibrium_residual(&self) -> f64 {
        self.residual_on(255)
    }

    pub fn residual_on(&self, n: usize) -> f64 {
        let mut worst = 0.0f64;
        for j in 1..=self.m() {
            let w = self.robin(j);
            for x in self.intervals[j - 1].grid(n) {
                worst = worst.max((self.field_level(j, x) - w).abs());
            }
        }
        worst
    }

    /// Copy with `u_j` shifted by `delta` on every grid point (sensitivity probes).
    pub fn perturbed(&self, j: usize, delta: f64) -> EquilibriumSolution {
        let mut s = self.clone();
        s.densities[j - 1].iter_mut().for_each(|v| *v += delta);
        s.coeffs[j - 1].coeffs[0] += delta;
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(a: f64, b: f64) -> Interval {
        Interval::new(a, b).unwrap()
    }

    #[test]
    fn matrices() {
        let c = interaction_matrix(&RaySpec::new(vec![1.0, 0.0]).unwrap());
        assert_eq!(c, DMatrix::from_row_slice(2, 2, &[1.0, -0.5, -0.5, 1.0]));
        let c = interaction_matrix(&RaySpec::new(vec![0.5, 0.5]).unwrap());
        assert_eq!(c, DMatrix::from_row_slice(2, 2, &[0.25, -0.25, -0.25, 1.0]));
        assert!(c.symmetric_eigenvalues().min() > 0.0);
        assert!(matches!(RaySpec::new(vec![0.3, 0.7]), Err(Error::InvalidRay(_))));
    }

    #[test]
    fn arcsine_oracle() {
        let sol = solve_vector_equilibrium(&[iv(-1.0, 1.0)], &RaySpec::new(vec![1.0]).unwrap(), 1e-12, 10).unwrap();
        assert!((sol.robin(1) - 2f64.ln()).abs() < 1e-14);
        let v = sol.potential(1, Complex64::new(2.0, 0.0)).unwrap();
        assert!((v - (2f64.ln() - (2.0 + 3f64.sqrt()).ln())).abs() < 1e-14);
        let phi = sol.phi_eval(1, Complex64::new(2.0, 0.0)).unwrap();
        assert!((phi.re - (2.0 + 3f64.sqrt()) / 2.0).abs() < 1e-14 && phi.im == 0.0);
        let sol = solve_vector_equilibrium(&[iv(0.0, 4.0)], &RaySpec::new(vec![1.0]).unwrap(), 1e-12, 10).unwrap();
        assert!(sol.robin(1).abs() < 1e-14);
    }

    #[test]
    fn point_mass_balayage() {
        let src = SourceMeasure::Atoms {
            points: vec![3.0],
            masses: vec![1.0],
        };
        let target = iv(-1.0, 1.0);
        let u = balayage_onto(&src, target, 64).unwrap();
        for (x, ux) in target.grid(64).iter().zip(&u) {
            assert!((ux - 8f64.sqrt() / (3.0 - x)).abs() < 1e-14);
        }
        let c = cheb_interpolate(-1.0, 1.0, &u).unwrap();
        assert!((c.coeffs[0] - 1.0).abs() < 1e-12);
        let bad = SourceMeasure::Grid {
            interval: target,
            samples: vec![1.0; 65],
            weight: 1.0,
        };
        assert!(matches!(balayage_onto(&bad, target, 64), Err(Error::OverlappingSupports(_))));
    }

    #[test]
    fn two_interval_solution() {
        let ints = [iv(-1.0, 1.0), iv(2.0, 3.0)];
        let sol = solve_vector_equilibrium(&ints, &RaySpec::new(vec![0.5, 0.5]).unwrap(), 1e-13, 500).unwrap();
        for j in 1..=2 {
            assert!((sol.mass(j) - 1.0).abs() < 1e-10);
            assert!(sol.densities[j - 1].iter().all(|v| *v > 0.0));
        }
        assert!(sol.equilibrium_residual() < 1e-10, "{}", sol.equilibrium_residual());
        assert!(sol.perturbed(1, 0.01).equilibrium_residual() > 1e-3);
        let z = Complex64::new(0.7, 1.9);
        for j in 1..=2 {
            let phi = sol.phi_eval(j, z).unwrap();
            assert!((phi.norm().ln() + sol.potential(j, z).unwrap()).abs() < 1e-12);
            assert_eq!(sol.phi_eval(j, z.conj()).unwrap(), phi.conj());
        }
    }

    #[test]
    fn mirror_symmetry() {
        let ints = [iv(-3.0, -2.0), iv(2.0, 3.0)];
        let tol = 1e-13;
        let sol = solve_vector_equilibrium(&ints, &RaySpec::new(vec![1.0, 0.0]).unwrap(), tol, 500).unwrap();
        let n = sol.grid;
        for i in 0..=n {
            assert!((sol.densities[0][i] - sol.densities[1][n - i]).abs() < 10.0 * tol);
        }
    }
}
