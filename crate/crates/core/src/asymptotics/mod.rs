//! Strong-asymptotics verification: ratios of Hermite-Pade data against the
//! limits built from the equilibrium problem and the Szego fixed point.
//!
//! Left sides use `HPSolution` data only. Right sides use a [`Limits`] bundle,
//! which owns its own equilibrium solution, Szego vector and reversed system.

mod biorthogonal;

use std::f64::consts::PI;
use std::fmt;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::equilibrium::{solve_with, EquilibriumOptions, EquilibriumSolution, RaySpec};
use crate::error::{Error, Result};
use crate::hermitepade::{hp_solve_with, HPSolution, HpOptions, MultiIndex};
use crate::measures::{shat_reversed, Interval, NikishinSystem};
use crate::numerics::{sqrt_ab, Point};
use crate::szego::{fixed_point_t, SzegoVector, SzegoWeightVector, DEFAULT_GRID};

pub use biorthogonal::{biorthogonal_cross_check, biorthogonal_polys, cauchy_kernel, Bimoments, BiorthogonalPair, BiorthogonalReport};

/// Which limit relation a record checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CheckKind {
    /// `Q_{n,j} / Phi_j^eta -> G_j / G_j(inf)`.
    Polynomial,
    /// `kappa_{n,j} / C_j^eta -> G_j(inf) / sqrt(2 pi G_{j-1}(inf) G_{j+1}(inf))`.
    Kappa,
    /// `a_{n,j} / Phi_m^|n| -> G_m / G_m(inf) s^_{m,j+1}`.
    MlPolynomial,
    /// Scaled forms `A_{n,j}`.
    Form,
    /// Scaled approximation errors `a_{n,j}/a_{n,m} - s^_{m,j+1}`.
    Rate,
}

impl CheckKind {
    pub const ALL: [CheckKind; 5] = [
        CheckKind::Polynomial,
        CheckKind::Kappa,
        CheckKind::MlPolynomial,
        CheckKind::Form,
        CheckKind::Rate,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            CheckKind::Polynomial => "q_ratio",
            CheckKind::Kappa => "kappa_ratio",
            CheckKind::MlPolynomial => "ml_poly_ratio",
            CheckKind::Form => "form",
            CheckKind::Rate => "rate",
        }
    }

    /// Range of `j` the check is defined for.
    pub fn indices(&self, m: usize) -> std::ops::Range<usize> {
        match self {
            CheckKind::Polynomial | CheckKind::Kappa => 1..m + 1,
            _ => 0..m,
        }
    }
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRecord {
    pub check: CheckKind,
    pub multi_index: MultiIndex,
    /// Ray parameter, `n = k p`; zero outside sweeps.
    pub k: usize,
    pub j: usize,
    /// Position in the test-point list (`0` for checks at infinity).
    pub point_index: usize,
    pub z: Point,
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub abs_dev: f64,
    pub rel_dev: f64,
}

impl ConvergenceRecord {
    fn new(check: CheckKind, sol: &HPSolution, j: usize, z: Point, lhs: Complex64, rhs: Complex64) -> Self {
        let abs_dev = (lhs - rhs).norm();
        ConvergenceRecord {
            check,
            multi_index: sol.multi_index.clone(),
            k: 0,
            j,
            point_index: 0,
            z,
            lhs,
            rhs,
            abs_dev,
            rel_dev: abs_dev / rhs.norm(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct LimitOptions {
    pub equilibrium: EquilibriumOptions,
    pub fp_tol: f64,
    pub fp_max_iter: usize,
    pub szego_grid: usize,
}

impl Default for LimitOptions {
    fn default() -> Self {
        LimitOptions {
            equilibrium: EquilibriumOptions::default(),
            fp_tol: 1e-12,
            fp_max_iter: 500,
            szego_grid: DEFAULT_GRID,
        }
    }
}

/// Everything the limit sides need, computed without any Hermite-Pade data.
#[derive(Debug, Clone)]
pub struct Limits {
    pub ray: RaySpec,
    pub equilibrium: EquilibriumSolution,
    pub szego: SzegoVector,
    intervals: Vec<Interval>,
    reversed: NikishinSystem,
}

impl Limits {
    pub fn new(system: &NikishinSystem, ray: &RaySpec, opts: &LimitOptions) -> Result<Self> {
        if ray.m() != system.m() {
            return Err(Error::SizeMismatch {
                expected: system.m(),
                got: ray.m(),
            });
        }
        let intervals = system.intervals();
        let equilibrium = solve_with(&intervals, ray, &opts.equilibrium)?;
        let w = SzegoWeightVector::from_system(system, opts.szego_grid)?;
        let szego = fixed_point_t(&w, opts.fp_tol, opts.fp_max_iter)?;
        Ok(Limits {
            ray: ray.clone(),
            equilibrium,
            szego,
            intervals,
            reversed: system.reversed()?,
        })
    }

    pub fn from_parts(system: &NikishinSystem, equilibrium: EquilibriumSolution, szego: SzegoVector) -> Result<Self> {
        if equilibrium.m() != system.m() || szego.m() != system.m() {
            return Err(Error::GeometryMismatch("limit data and system differ in m".into()));
        }
        Ok(Limits {
            ray: equilibrium.ray.clone(),
            intervals: system.intervals(),
            reversed: system.reversed()?,
            equilibrium,
            szego,
        })
    }

    pub fn m(&self) -> usize {
        self.intervals.len()
    }

    /// `Phi_j(z)^eta`, with `Phi_0 = 1`.
    fn phi_pow(&self, j: usize, z: Complex64, eta: usize) -> Result<Complex64> {
        if j == 0 || eta == 0 {
            return Ok(Complex64::new(1.0, 0.0));
        }
        self.equilibrium.phi_eval(j, z)?;
        Ok((self.equilibrium.log_phi(j, z) * eta as f64).exp())
    }

    /// `G_j(z) / G_j(inf)`, with `G_0 = G_{m+1} = 1`.
    fn g_ratio(&self, j: usize, z: Complex64) -> Result<Complex64> {
        Ok(self.szego.eval(j, Point::Finite(z))? / self.szego.at_infinity(j))
    }

    /// `s^_{k,j}` for `k >= j` of the reversed ordering; `s^_{j-1,j} = 1`.
    fn shat(&self, k: usize, j: usize, z: Complex64) -> Result<Complex64> {
        if k + 1 == j {
            return Ok(Complex64::new(1.0, 0.0));
        }
        shat_reversed(&self.reversed, k, j, z)
    }
}

fn check_geometry(sol: &HPSolution, lim: &Limits) -> Result<()> {
    if sol.system().intervals() != lim.intervals {
        return Err(Error::GeometryMismatch("solution and limits live on different intervals".into()));
    }
    Ok(())
}

fn off(iv: Interval, z: Complex64, what: &str) -> Result<()> {
    if iv.contains(z) {
        return Err(Error::OnSupport(format!("{z} on {iv} ({what})")));
    }
    Ok(())
}

/// `Q_{n,j}(z) / Phi_j(z)^{eta_{n,j}}` against `G_j(z) / G_j(inf)`.
pub fn theorem1_ratio(sol: &HPSolution, lim: &Limits, j: usize, z: Complex64) -> Result<ConvergenceRecord> {
    check_geometry(sol, lim)?;
    if j == 0 || j > sol.m() {
        return Err(Error::IndexOutOfRange(format!("j = {j}")));
    }
    off(lim.intervals[j - 1], z, "q_ratio")?;
    let eta = sol.multi_index.eta(j);
    let lhs = sol.q_eval(j, z) / lim.phi_pow(j, z, eta)?;
    let rhs = lim.g_ratio(j, z)?;
    Ok(ConvergenceRecord::new(CheckKind::Polynomial, sol, j, Point::Finite(z), lhs, rhs))
}

/// `kappa_{n,j} / C_j^{eta_{n,j}}` against
/// `G_j(inf) / sqrt(2 pi G_{j-1}(inf) G_{j+1}(inf))`.
///
/// The neighbour factors come from the varying weight `|Q_{j-1} Q_{j+1}|`,
/// whose normalized limit is `G_{j-1} G_{j+1} / (G_{j-1}(inf) G_{j+1}(inf))`;
/// they equal one for `m = 1`.
pub fn kappa_ratio(sol: &HPSolution, lim: &Limits, j: usize) -> Result<ConvergenceRecord> {
    check_geometry(sol, lim)?;
    if j == 0 || j > sol.m() {
        return Err(Error::IndexOutOfRange(format!("j = {j}")));
    }
    let eta = sol.multi_index.eta(j) as f64;
    let lhs = (sol.kappa[j - 1].ln() - eta * lim.equilibrium.robin(j)).exp();
    let g = &lim.szego;
    let rhs = g.at_infinity(j) / (2.0 * PI * g.at_infinity(j - 1) * g.at_infinity(j + 1)).sqrt();
    Ok(ConvergenceRecord::new(
        CheckKind::Kappa,
        sol,
        j,
        Point::Infinity,
        Complex64::new(lhs, 0.0),
        Complex64::new(rhs, 0.0),
    ))
}

/// `a_{n,j}(z) / Phi_m(z)^{|n|}` against `G_m(z) / G_m(inf) s^_{m,j+1}(z)`.
/// Off `Delta_{j+1} U ... U Delta_m`, `a_{n,j}` is evaluated through the forms.
pub fn ml_poly_ratio(sol: &HPSolution, lim: &Limits, j: usize, z: Complex64) -> Result<ConvergenceRecord> {
    check_geometry(sol, lim)?;
    let m = sol.m();
    if j >= m {
        return Err(Error::IndexOutOfRange(format!("j = {j} with m = {m}")));
    }
    off(lim.intervals[m - 1], z, "ml_poly_ratio")?;
    let on_later = lim.intervals[j..].iter().any(|iv| iv.contains(z));
    let a = if on_later { sol.a_eval(j, z) } else { sol.a_eval_identity(j, z)? };
    let lhs = a / lim.phi_pow(m, z, sol.multi_index.total())?;
    let rhs = lim.g_ratio(m, z)? * lim.shat(m, j + 1, z)?;
    Ok(ConvergenceRecord::new(CheckKind::MlPolynomial, sol, j, Point::Finite(z), lhs, rhs))
}

/// `eps_{n,j+1} K_{n,j}^2 Phi_{j+1}^{eta_{j+1}} A_{n,j} / Phi_j^{eta_j}` against
/// `G_j/G_j(inf) G_{j+1}(inf)/G_{j+1} / sqrt((z-a_{j+1})(z-b_{j+1}))`.
pub fn forms_asymptotic_check(sol: &HPSolution, lim: &Limits, j: usize, z: Complex64) -> Result<ConvergenceRecord> {
    check_geometry(sol, lim)?;
    let m = sol.m();
    if j >= m {
        return Err(Error::IndexOutOfRange(format!("j = {j} with m = {m}")));
    }
    if j > 0 {
        off(lim.intervals[j - 1], z, "form")?;
    }
    let next = lim.intervals[j];
    off(next, z, "form")?;
    let n = &sol.multi_index;
    let k2 = sol.k_const[j] * sol.k_const[j];
    let lhs = sol.eps[j] * k2 * lim.phi_pow(j + 1, z, n.eta(j + 1))? * sol.form_eval(j, z)? / lim.phi_pow(j, z, n.eta(j))?;
    let rhs = lim.g_ratio(j, z)? / lim.g_ratio(j + 1, z)? / sqrt_ab(z, next.a, next.b);
    Ok(ConvergenceRecord::new(CheckKind::Form, sol, j, Point::Finite(z), lhs, rhs))
}

/// `eps_{n,m} K_{n,m-1}^2 Phi_m^{2|n|} / Phi_{m-1}^{eta_{m-1}} (a_j/a_m - s^_{m,j+1})` against
/// `G_{m-1} G_m(inf)^2 / (G_m^2 G_{m-1}(inf)) (-1)^{m-1} s^_{m-1,j+1} / sqrt((z-a_m)(z-b_m))`.
pub fn rate_of_convergence_check(sol: &HPSolution, lim: &Limits, j: usize, z: Complex64) -> Result<ConvergenceRecord> {
    check_geometry(sol, lim)?;
    let m = sol.m();
    if j >= m {
        return Err(Error::IndexOutOfRange(format!("j = {j} with m = {m}")));
    }
    for iv in &lim.intervals[j..] {
        off(*iv, z, "rate")?;
    }
    let n = &sol.multi_index;
    let k2 = sol.k_const[m - 1] * sol.k_const[m - 1];
    let scale = lim.phi_pow(m, z, 2 * n.total())? / lim.phi_pow(m - 1, z, n.eta(m - 1))?;
    let lhs = sol.eps[m - 1] * k2 * scale * sol.approximation_error(j, z)?;
    let last = lim.intervals[m - 1];
    let gm = lim.g_ratio(m, z)?;
    let sign = if (m - 1).is_multiple_of(2) { 1.0 } else { -1.0 };
    let rhs = lim.g_ratio(m - 1, z)? / (gm * gm) * sign * lim.shat(m - 1, j + 1, z)? / sqrt_ab(z, last.a, last.b);
    Ok(ConvergenceRecord::new(CheckKind::Rate, sol, j, Point::Finite(z), lhs, rhs))
}

/// Ten points on a circle about the hull of radius twice its half-width,
/// plus two real points in each gap between consecutive intervals.
pub fn default_test_points(intervals: &[Interval]) -> Vec<Complex64> {
    let a = intervals.iter().map(|iv| iv.a).fold(f64::INFINITY, f64::min);
    let b = intervals.iter().map(|iv| iv.b).fold(f64::NEG_INFINITY, f64::max);
    let c = Complex64::new(0.5 * (a + b), 0.0);
    let r = b - a;
    let mut pts: Vec<Complex64> = (0..10)
        .map(|k| c + Complex64::from_polar(r, PI * (2 * k + 1) as f64 / 10.0))
        .collect();
    for w in intervals.windows(2) {
        let (lo, hi) = (w[0].b, w[1].a);
        for t in [1.0 / 3.0, 2.0 / 3.0] {
            pts.push(Complex64::new(lo + t * (hi - lo), 0.0));
        }
    }
    pts
}

#[derive(Debug, Clone)]
pub struct SweepOptions {
    pub hp: HpOptions,
    pub limits: LimitOptions,
    pub checks: Vec<CheckKind>,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            hp: HpOptions::default(),
            limits: LimitOptions::default(),
            checks: CheckKind::ALL.to_vec(),
        }
    }
}

/// All records of one solution, in canonical order.
pub fn records_for(sol: &HPSolution, lim: &Limits, checks: &[CheckKind], points: &[Complex64]) -> Result<Vec<ConvergenceRecord>> {
    let m = sol.m();
    let mut out = Vec::new();
    for &check in checks {
        for j in check.indices(m) {
            if check == CheckKind::Kappa {
                out.push(kappa_ratio(sol, lim, j)?);
                continue;
            }
            for (i, &z) in points.iter().enumerate() {
                let mut r = match check {
                    CheckKind::Polynomial => theorem1_ratio(sol, lim, j, z)?,
                    CheckKind::MlPolynomial => ml_poly_ratio(sol, lim, j, z)?,
                    CheckKind::Form => forms_asymptotic_check(sol, lim, j, z)?,
                    CheckKind::Rate => rate_of_convergence_check(sol, lim, j, z)?,
                    CheckKind::Kappa => unreachable!(),
                };
                r.point_index = i;
                out.push(r);
            }
        }
    }
    Ok(out)
}

/// Every check over `n = k p`, `k` in `k_list`. Solutions are computed in
/// parallel; rows come back sorted by `(k, check, j, point)`.
pub fn convergence_sweep(
    system: &NikishinSystem,
    ray: &RaySpec,
    k_list: &[usize],
    test_points: &[Complex64],
    opts: &SweepOptions,
) -> Result<Vec<ConvergenceRecord>> {
    if k_list.is_empty() {
        return Ok(Vec::new());
    }
    let indices = k_list
        .iter()
        .map(|&k| MultiIndex::new(ray.multi_index(k)?).map(|n| (k, n)))
        .collect::<Result<Vec<_>>>()?;
    for iv in system.intervals() {
        for z in test_points {
            off(iv, *z, "test point")?;
        }
    }
    let lim = Limits::new(system, ray, &opts.limits)?;
    let mut rows: Vec<ConvergenceRecord> = indices
        .par_iter()
        .map(|(k, n)| {
            let sol = hp_solve_with(system, n, &opts.hp)?;
            let mut recs = records_for(&sol, &lim, &opts.checks, test_points)?;
            recs.iter_mut().for_each(|r| r.k = *k);
            Ok(recs)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    rows.sort_by_key(|a| (a.k, a.check, a.j, a.point_index));
    Ok(rows)
}

/// Deviation sequences of a sweep keyed by `(check, j, point)`, ordered by `k`.
pub fn deviation_series(rows: &[ConvergenceRecord]) -> Vec<((CheckKind, usize, usize), Vec<f64>)> {
    let mut map: std::collections::BTreeMap<(CheckKind, usize, usize), Vec<(usize, f64)>> = Default::default();
    for r in rows {
        map.entry((r.check, r.j, r.point_index)).or_default().push((r.k, r.rel_dev));
    }
    map.into_iter()
        .map(|(key, mut v)| {
            v.sort_by_key(|e| e.0);
            (key, v.into_iter().map(|e| e.1).collect())
        })
        .collect()
}

/// Geometric rate per unit `|n|` of `|a_{n,j}/a_{n,m} - s^_{m,j+1}|(z)` along the
/// ray: `|Phi_{m-1}(z)|^{P_{m-1}} / (C_m |Phi_m(z)|)^2`. The factor `C_m^2` is the
/// growth of `K_{n,m-1}^2 = kappa_{n,m}^2` in the normalization of the rate check.
pub fn predicted_rate(lim: &Limits, z: Complex64) -> Result<f64> {
    let m = lim.ray.m();
    let eq = &lim.equilibrium;
    eq.phi_eval(m, z)?;
    let mut log = -2.0 * (eq.log_phi(m, z).re + eq.robin(m));
    if m > 1 {
        eq.phi_eval(m - 1, z)?;
        log += lim.ray.big_p(m - 1) * eq.log_phi(m - 1, z).re;
    }
    Ok(log.exp())
}

/// `exp` of the least squares slope of `ln values` against `totals`.
pub fn fitted_rate(totals: &[f64], values: &[f64]) -> Option<f64> {
    if totals.len() != values.len() || totals.len() < 2 || values.iter().any(|v| !(*v > 0.0)) {
        return None;
    }
    let n = totals.len() as f64;
    let mx = totals.iter().sum::<f64>() / n;
    let ys: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = totals.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = totals.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Some((sxy / sxx).exp())
}

/// Relative deviations below this are under the accuracy of the computed
/// limits at the default fixed point tolerance.
pub const DEVIATION_FLOOR: f64 = 1e-12;

/// `true` if every step after the first third of `seq` grows by at most the
/// factor `1 + wobble` or stays below `floor`.
pub fn eventually_decreasing(seq: &[f64], wobble: f64, floor: f64) -> bool {
    let start = (seq.len() / 3).max(1);
    (start..seq.len()).all(|i| seq[i] <= floor || seq[i] <= (1.0 + wobble) * seq[i - 1])
}

pub const CSV_HEADER: [&str; 15] = [
    "check", "m", "p", "k", "n_total", "j", "point", "re_z", "im_z", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "abs_dev", "rel_dev",
];

fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes the sweep table with fixed column order and 17 significant digits.
pub fn write_csv<W: Write>(rows: &[ConvergenceRecord], ray: &RaySpec, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(CSV_HEADER).map_err(io)?;
    let p = ray.p.iter().map(|v| sci(*v)).collect::<Vec<_>>().join(";");
    for r in rows {
        let (re, im) = match r.z {
            Point::Finite(z) => (sci(z.re), sci(z.im)),
            Point::Infinity => ("inf".to_string(), "0".to_string()),
        };
        w.write_record([
            r.check.name().to_string(),
            ray.m().to_string(),
            p.clone(),
            r.k.to_string(),
            r.multi_index.total().to_string(),
            r.j.to_string(),
            r.point_index.to_string(),
            re,
            im,
            sci(r.lhs.re),
            sci(r.lhs.im),
            sci(r.rhs.re),
            sci(r.rhs.im),
            sci(r.abs_dev),
            sci(r.rel_dev),
        ])
        .map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests;
