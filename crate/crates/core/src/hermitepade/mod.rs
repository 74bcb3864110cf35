//! Multi-level Hermite-Pade polynomials of a Nikishin system.
//!
//! The zero polynomials `Q_{n,j}` are computed as the fixed point of `T~_n`:
//! each `Q_{n,j}` is orthogonal with respect to `H_{n,j} d sigma_j / (Q_{n,j-1} Q_{n,j+1})`
//! and `H_{n,j-1}` is the Cauchy transform of `Q_{n,j}^2` against that measure.
//! Forms are evaluated as `A_{n,j} = Q_{n,j} H_{n,j} / Q_{n,j+1}`, which is free
//! of the cancellation in the defining linear combination.

mod checks;
pub mod linear;
pub mod poly;
pub mod tn;

use std::fmt;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::measures::{shat_reversed, Interval, NikishinSystem};
use crate::numerics::{cheb_interpolate, on_segment, ChebSeries, DoubleDouble, QuadratureRule, Scalar};

pub use checks::LaurentCheck;
pub use linear::{hull, solve_reduced_system, ReducedSolution};
pub use tn::{apply_tn, tn_distance};

use linear::NestedData;
use poly::{cheb_from_roots, cheb_from_roots_s, clenshaw_complex_s, clenshaw_s, eval_roots, eval_roots_real};

/// Default cap on `|n|` in binary64.
pub const DEFAULT_MAX_DEGREE: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    n: Vec<usize>,
}

impl MultiIndex {
    pub fn new(n: Vec<usize>) -> Result<Self> {
        if n.is_empty() || n.iter().all(|&v| v == 0) {
            return Err(Error::IndexOutOfRange(format!("multi-index {n:?} must have a nonzero entry")));
        }
        Ok(MultiIndex { n })
    }

    pub fn m(&self) -> usize {
        self.n.len()
    }

    /// `n_j`, 1-based; zero outside `1..=m`.
    pub fn n(&self, j: usize) -> usize {
        if j == 0 || j > self.m() {
            0
        } else {
            self.n[j - 1]
        }
    }

    pub fn components(&self) -> &[usize] {
        &self.n
    }

    pub fn total(&self) -> usize {
        self.n.iter().sum()
    }

    /// `eta_{n,j} = n_1 + ... + n_j` (`eta_0 = 0`, `eta_j = |n|` for `j > m`).
    pub fn eta(&self, j: usize) -> usize {
        self.n.iter().take(j).sum()
    }

    pub fn etas(&self) -> Vec<usize> {
        (1..=self.m()).map(|j| self.eta(j)).collect()
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.n.iter().map(|v| v.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

#[derive(Debug, Clone)]
pub struct HpOptions {
    pub max_degree: usize,
    /// Quadrature nodes per interval; default `max(128, 4|n| + 32)` or the
    /// system's own count if larger.
    pub nodes: Option<usize>,
    pub tol: f64,
    pub max_iter: usize,
    /// Re-solve on a rule with about twice as many nodes and record the gap.
    pub check_refinement: bool,
    /// Run the zeros route and compare with the fixed point.
    pub verify_zeros: bool,
}

impl Default for HpOptions {
    fn default() -> Self {
        HpOptions {
            max_degree: DEFAULT_MAX_DEGREE,
            nodes: None,
            tol: 1e-14,
            max_iter: 200,
            check_refinement: true,
            verify_zeros: true,
        }
    }
}

#[derive(Debug)]
pub struct HPSolution {
    pub multi_index: MultiIndex,
    pub hull: Interval,
    /// `a_{n,0}, ..., a_{n,m}` in the Chebyshev basis of the hull.
    pub a: Vec<ChebSeries>,
    /// The same coefficients in double-double, used for every evaluation:
    /// near `Delta_m` the hull coefficients exceed the values by many orders.
    a_dd: Vec<Vec<DoubleDouble>>,
    /// Zeros of `Q_{n,1}, ..., Q_{n,m}`, ascending.
    pub q_roots: Vec<Vec<f64>>,
    /// `K_{n,0}, ..., K_{n,m}`.
    pub k_const: Vec<f64>,
    /// `kappa_{n,1}, ..., kappa_{n,m}`.
    pub kappa: Vec<f64>,
    /// `epsilon_{n,1}, ..., epsilon_{n,m}`.
    pub eps: Vec<f64>,
    /// Root displacement per `T~_n` iteration.
    pub tn_changes: Vec<f64>,
    /// Largest root displacement between the base rule and the refined rule.
    pub refinement_gap: Option<f64>,
    system: NikishinSystem,
    vary: Vec<Vec<f64>>,
    check_rules: Vec<QuadratureRule>,
    reversed: OnceLock<NikishinSystem>,
}

impl Clone for HPSolution {
    fn clone(&self) -> Self {
        HPSolution {
            multi_index: self.multi_index.clone(),
            hull: self.hull,
            a: self.a.clone(),
            a_dd: self.a_dd.clone(),
            q_roots: self.q_roots.clone(),
            k_const: self.k_const.clone(),
            kappa: self.kappa.clone(),
            eps: self.eps.clone(),
            tn_changes: self.tn_changes.clone(),
            refinement_gap: self.refinement_gap,
            system: self.system.clone(),
            vary: self.vary.clone(),
            check_rules: self.check_rules.clone(),
            reversed: OnceLock::new(),
        }
    }
}

pub fn hp_solve(system: &NikishinSystem, n: &MultiIndex) -> Result<HPSolution> {
    hp_solve_with(system, n, &HpOptions::default())
}

pub fn hp_solve_with(system: &NikishinSystem, n: &MultiIndex, opts: &HpOptions) -> Result<HPSolution> {
    let m = system.m();
    if n.m() != m {
        return Err(Error::SizeMismatch { expected: m, got: n.m() });
    }
    let total = n.total();
    if total > opts.max_degree {
        return Err(Error::DegreeCapExceeded {
            n: total,
            cap: opts.max_degree,
        });
    }
    let want = opts.nodes.unwrap_or_else(|| (4 * total + 32).max(128).max(system.n_nodes()));
    let sys = if want == system.n_nodes() {
        system.clone()
    } else {
        system.refined(want)?
    };
    let intervals = sys.intervals();
    let eta = n.etas();
    let rules: Vec<&QuadratureRule> = (1..=m).map(|j| sys.rule(j)).collect();
    let (state, tn_changes) = tn::fixed_point(&rules, &intervals, &eta, opts.tol, opts.max_iter)?;

    let check_rules = sys.generators().iter().map(|g| g.rule(2 * want + 1)).collect::<Result<Vec<_>>>()?;
    let refinement_gap = if opts.check_refinement {
        let refs: Vec<&QuadratureRule> = check_rules.iter().collect();
        let (fine, _) = tn::fixed_point(&refs, &intervals, &eta, opts.tol, opts.max_iter)?;
        Some(tn::root_change(&intervals, &fine.roots, &state.roots))
    } else {
        None
    };

    let q_roots = state.roots;
    let vary = state.vary;
    let mut k_const = vec![1.0; m + 1];
    let mut eps = vec![0.0; m];
    for j in 0..m {
        let x = &rules[j].nodes;
        let mut s = 0.0;
        for (xi, v) in x.iter().zip(&vary[j]) {
            let p = eval_roots_real(&q_roots[j], *xi);
            s += p * p * v.abs();
        }
        k_const[j] = 1.0 / s.sqrt();
        eps[j] = vary[j][vary[j].len() / 2].signum();
    }
    let kappa = (0..m).map(|j| k_const[j] / k_const[j + 1]).collect();

    let hv = hull(&sys);
    let data = NestedData::<DoubleDouble>::new(&sys, total + 1)?;
    let a_dd = data.lower_polys(&cheb_from_roots_s(&q_roots[m - 1], hv.a, hv.b));
    let a = a_dd
        .iter()
        .map(|c| ChebSeries::new(hv.a, hv.b, c.iter().map(|v| v.to_f64()).collect()))
        .collect::<Result<Vec<_>>>()?;

    let sol = HPSolution {
        multi_index: n.clone(),
        hull: hv,
        a,
        a_dd,
        q_roots,
        k_const,
        kappa,
        eps,
        tn_changes,
        refinement_gap,
        system: sys,
        vary,
        check_rules,
        reversed: OnceLock::new(),
    };
    if opts.verify_zeros {
        sol.extract_q()?;
    }
    Ok(sol)
}

impl HPSolution {
    pub fn m(&self) -> usize {
        self.q_roots.len()
    }

    /// The (possibly refined) system the solution was computed on.
    pub fn system(&self) -> &NikishinSystem {
        &self.system
    }

    /// Zeros of `Q_{n,j}`; empty for `j = 0` and `j = m + 1`.
    pub fn q_zeros(&self, j: usize) -> &[f64] {
        if j == 0 || j > self.m() {
            &[]
        } else {
            &self.q_roots[j - 1]
        }
    }

    pub fn q_eval(&self, j: usize, z: Complex64) -> Complex64 {
        eval_roots(self.q_zeros(j), z)
    }

    pub fn q_eval_real(&self, j: usize, x: f64) -> f64 {
        eval_roots_real(self.q_zeros(j), x)
    }

    /// `Q_{n,j}` in the Chebyshev basis of `Delta_j`.
    pub fn q_chebyshev(&self, j: usize) -> Result<ChebSeries> {
        if j == 0 || j > self.m() {
            return Err(Error::IndexOutOfRange(format!("Q_{j} with m = {}", self.m())));
        }
        let iv = self.system.interval(j);
        ChebSeries::new(iv.a, iv.b, cheb_from_roots(self.q_zeros(j), iv.a, iv.b))
    }

    fn sign_m(&self) -> f64 {
        if self.m().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    /// `H_{n,j}(z)`, holomorphic off `Delta_{j+1}`.
    pub fn weight_h(&self, j: usize, z: Complex64) -> Result<Complex64> {
        let m = self.m();
        if j > m {
            return Err(Error::IndexOutOfRange(format!("H_{j} with m = {m}")));
        }
        if j == m {
            return Ok(Complex64::new(self.sign_m(), 0.0));
        }
        let r = self.system.rule(j + 1);
        if on_segment(z, r.a, r.b) {
            return Err(Error::OnSupport(format!("{z} on interval {}", j + 1)));
        }
        let q = self.q_zeros(j + 1);
        let mut s = Complex64::new(0.0, 0.0);
        for (&x, &v) in r.nodes.iter().zip(&self.vary[j]) {
            let p = eval_roots_real(q, x);
            s += p * p * v / (z - x);
        }
        Ok(s)
    }

    fn weight_h_real(&self, j: usize, x: f64) -> Result<f64> {
        Ok(self.weight_h(j, Complex64::new(x, 0.0))?.re)
    }

    /// `(K, kappa, epsilon)`.
    pub fn normalization_constants(&self) -> (&[f64], &[f64], &[f64]) {
        (&self.k_const, &self.kappa, &self.eps)
    }

    /// `A_{n,j}(z)`; entire for `j = m`, holomorphic off `Delta_{j+1}` otherwise.
    pub fn form_eval(&self, j: usize, z: Complex64) -> Result<Complex64> {
        let m = self.m();
        if j == m {
            return Ok(self.sign_m() * self.q_eval(m, z));
        }
        let h = self.weight_h(j, z)?;
        Ok(self.q_eval(j, z) * h / self.q_eval(j + 1, z))
    }

    /// `A_{n,j}` by the defining combination of polynomials and nested
    /// Cauchy transforms, with the sum of absolute terms.
    pub fn form_eval_direct(&self, j: usize, z: Complex64) -> Result<(Complex64, f64)> {
        let m = self.m();
        if j > m {
            return Err(Error::IndexOutOfRange(format!("A_{j} with m = {m}")));
        }
        let sgn = |k: usize| if k.is_multiple_of(2) { 1.0 } else { -1.0 };
        let first = sgn(j) * self.a_eval(j, z);
        let mut v = first;
        let mut scale = first.norm();
        for k in j + 1..=m {
            let t = sgn(k) * self.a_eval(k, z) * self.system.shat_eval(j + 1, k, z)?;
            v += t;
            scale += t.norm();
        }
        Ok((v, scale))
    }

    pub fn a_eval(&self, j: usize, z: Complex64) -> Complex64 {
        let to = |v: f64| DoubleDouble::from_f64(v);
        let (mid, h) = (to(self.hull.center()), to(self.hull.half_width()));
        let t = ((to(z.re) - mid) / h, to(z.im) / h);
        let (re, im) = clenshaw_complex_s(&self.a_dd[j], t);
        Complex64::new(re.to_f64(), im.to_f64())
    }

    pub fn a_eval_real(&self, j: usize, x: f64) -> f64 {
        let to = |v: f64| DoubleDouble::from_f64(v);
        let t = (to(x) - to(self.hull.center())) / to(self.hull.half_width());
        clenshaw_s(&self.a_dd[j], t).to_f64()
    }

    pub(crate) fn a_coeffs_dd(&self) -> &[Vec<DoubleDouble>] {
        &self.a_dd
    }

    fn reversed_system(&self) -> Result<&NikishinSystem> {
        if let Some(r) = self.reversed.get() {
            return Ok(r);
        }
        let r = self.system.reversed()?;
        Ok(self.reversed.get_or_init(|| r))
    }

    /// `a_{n,j}(z)` off `Delta_{j+1} U ... U Delta_m` through the forms:
    /// `a_j = a_m s^_{m,j+1} + (-1)^j [A_j + sum_{k=j+1}^{m-1} (-1)^{k-j} s^_{k,j+1} A_k]`.
    pub fn a_eval_identity(&self, j: usize, z: Complex64) -> Result<Complex64> {
        let m = self.m();
        if j >= m {
            return Ok(self.a_eval(m, z));
        }
        let rev = self.reversed_system()?;
        Ok(self.q_eval(m, z) * (shat_reversed(rev, m, j + 1, z)? + self.approximation_error(j, z)?))
    }

    /// `(a_{n,j} / a_{n,m} - s^_{m,j+1})(z)` for `j < m`, through
    /// `(-1)^j (A_j + sum_{k=j+1}^{m-1} (-1)^{k-j} s^_{k,j+1} A_k) / Q_{n,m}`;
    /// the direct difference cancels to far below working precision.
    pub fn approximation_error(&self, j: usize, z: Complex64) -> Result<Complex64> {
        let m = self.m();
        if j >= m {
            return Err(Error::IndexOutOfRange(format!("approximation index {j} with m = {m}")));
        }
        let rev = self.reversed_system()?;
        let mut bracket = self.form_eval(j, z)?;
        for k in j + 1..m {
            let t = shat_reversed(rev, k, j + 1, z)? * self.form_eval(k, z)?;
            bracket += if (k - j).is_multiple_of(2) { t } else { -t };
        }
        let sj = if j.is_multiple_of(2) { 1.0 } else { -1.0 };
        Ok(sj * bracket / self.q_eval(m, z))
    }

    /// Zeros of `A_{n,j}` in the open `Delta_j` (`j = 1..m`) by Chebyshev
    /// interpolation, colleague matrix and Newton polish; checks the count
    /// against `eta_{n,j}`, agreement with the fixed point, and for `j = m`
    /// agreement with direct rootfinding on `a_{n,m}`.
    pub fn extract_q(&self) -> Result<Vec<Vec<f64>>> {
        let m = self.m();
        let mut out = Vec::with_capacity(m);
        for j in 1..=m {
            let iv = self.system.interval(j);
            let eta = self.multi_index.eta(j);
            let f = |x: f64| -> f64 {
                let mut v = self.q_eval_real(j, x);
                if j < m {
                    v *= self.weight_h_real(j, x).unwrap_or(f64::NAN) / self.q_eval_real(j + 1, x);
                } else {
                    v *= self.sign_m();
                }
                v
            };
            let roots = piecewise_roots(iv, eta, &f)?;
            if roots.len() != eta {
                return Err(Error::ZeroCountMismatch {
                    j,
                    found: roots.len(),
                    expected: eta,
                });
            }
            let tol = 1e-8 * iv.half_width();
            let agree = roots.iter().zip(self.q_zeros(j)).all(|(a, b)| (a - b).abs() <= tol);
            let simple = roots.windows(2).all(|w| w[1] > w[0]) && roots.iter().all(|&x| x > iv.a && x < iv.b);
            if !agree || !simple {
                return Err(Error::ZeroCountMismatch {
                    j,
                    found: roots.len(),
                    expected: eta,
                });
            }
            if j == m {
                let g = |x: f64| self.a_eval_real(m, x);
                let local = cheb_interpolate(
                    iv.a,
                    iv.b,
                    &iv.grid(self.multi_index.total() + 8).into_iter().map(g).collect::<Vec<_>>(),
                )?
                .truncated(1e-15);
                let direct = local.roots_polished(&g, local.scale())?;
                // hull-basis evaluation floor of a_{n,m} on Delta_m
                let noise =
                    64.0 * 1.2e-32 * (self.multi_index.total() + 1) as f64 * self.a_dd[m].iter().map(|c| c.abs().to_f64()).sum::<f64>();
                let dg = local.derivative();
                let ok = direct.len() == eta
                    && direct
                        .iter()
                        .zip(&roots)
                        .all(|(a, b)| (a - b).abs() <= tol.max(noise / dg.eval(*b).abs()));
                if !ok {
                    return Err(Error::ZeroCountMismatch {
                        j,
                        found: direct.len(),
                        expected: eta,
                    });
                }
            }
            out.push(roots);
        }
        Ok(out)
    }
}

/// Zeros of `f` in the open `iv`, found separately on equal subintervals:
/// across all of `Delta_j` the forms vary over many orders of magnitude.
fn piecewise_roots(iv: Interval, eta: usize, f: &dyn Fn(f64) -> f64) -> Result<Vec<f64>> {
    let pieces = (eta / 4).clamp(1, 8);
    let deg = (2 * eta + 48).next_power_of_two();
    let step = iv.len() / pieces as f64;
    let mut roots: Vec<f64> = Vec::new();
    for i in 0..pieces {
        let a = iv.a + step * i as f64;
        let b = if i + 1 == pieces { iv.b } else { a + step };
        let series = ChebSeries::from_fn(a, b, deg, f)?.truncated(1e-15);
        let local = series.roots_polished(f, series.scale())?;
        for x in local {
            if !roots.last().is_some_and(|&p| x - p <= 1e-8 * iv.half_width()) {
                roots.push(x);
            }
        }
    }
    Ok(roots)
}
