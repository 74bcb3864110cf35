//! Multi-interval Cauchy kernel and the biorthogonal polynomials it defines.

use dashu_float::ops::Abs;
use dashu_float::FBig;

use crate::error::{Error, Result};
use crate::hermitepade::{hp_solve_with, HpOptions, MultiIndex, DEFAULT_MAX_DEGREE};
use crate::measures::{Interval, NikishinSystem};
use crate::numerics::scalar::chebyshev_t_values;
use crate::numerics::{ChebSeries, DoubleDouble, Scalar};

type Dd = DoubleDouble;
type Mp = FBig;

/// Working precision in bits of the bordered solves and the pairings. The
/// bimoment matrix of degree `n` has condition about `1/C_n`, which reaches
/// `1e33` at `n = 8` for three intervals.
pub const BIMOMENT_BITS: usize = 256;

fn mp(x: f64) -> Mp {
    Mp::try_from(x).unwrap_or(Mp::ZERO).with_precision(BIMOMENT_BITS).value()
}

fn mp_dd(x: Dd) -> Mp {
    mp(x.0.hi()) + mp(x.0.lo())
}

fn mp_f64(x: &Mp) -> f64 {
    x.to_f64().value()
}

fn dd(x: f64) -> Dd {
    Dd::from_f64(x)
}

/// `K(x_1, x_m)` at rows `xs` in `Delta_1` and columns `ys` in `Delta_m`, by
/// nested quadrature over `Delta_2, ..., Delta_{m-1}`.
fn kernel_matrix<S: Scalar>(system: &NikishinSystem, xs: &[f64], ys: &[f64]) -> Vec<Vec<S>> {
    let m = system.m();
    let recip = |a: f64, b: f64| S::one() / (S::from_f64(a) - S::from_f64(b));
    if m == 2 {
        return xs.iter().map(|&x| ys.iter().map(|&y| recip(x, y)).collect()).collect();
    }
    // f[t][y] on the Delta_i nodes, starting at i = m - 1
    let last = system.rule(m - 1);
    let mut f: Vec<Vec<S>> = last.nodes.iter().map(|&t| ys.iter().map(|&y| recip(t, y)).collect()).collect();
    let fold = |x: f64, rule: &crate::numerics::QuadratureRule, f: &[Vec<S>]| -> Vec<S> {
        let mut row = vec![S::zero(); ys.len()];
        for (s, (&t, &w)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
            let c = S::from_f64(w) * recip(x, t);
            for (r, v) in row.iter_mut().zip(&f[s]) {
                *r = *r + c * *v;
            }
        }
        row
    };
    for i in (2..m - 1).rev() {
        let (inner, outer) = (system.rule(i + 1), system.rule(i));
        f = outer.nodes.iter().map(|&t| fold(t, inner, &f)).collect();
    }
    xs.iter().map(|&x| fold(x, system.rule(2), &f)).collect()
}

fn check_kernel_args(system: &NikishinSystem, x1: f64, xm: f64) -> Result<()> {
    let m = system.m();
    if m < 2 {
        return Err(Error::IndexOutOfRange(format!("kernel needs m >= 2, got {m}")));
    }
    let (d1, dm) = (system.interval(1), system.interval(m));
    if !(d1.a..=d1.b).contains(&x1) || !(dm.a..=dm.b).contains(&xm) {
        return Err(Error::IndexOutOfRange(format!("kernel arguments ({x1}, {xm}) outside {d1} x {dm}")));
    }
    Ok(())
}

/// `K(x_1, x_m) = int ... int d sigma_2 ... d sigma_{m-1} / ((x_1 - x_2) ... (x_{m-1} - x_m))`;
/// for `m = 2` this is `1 / (x_1 - x_2)`.
pub fn cauchy_kernel(system: &NikishinSystem, x1: f64, xm: f64) -> Result<f64> {
    check_kernel_args(system, x1, xm)?;
    Ok(kernel_matrix::<f64>(system, &[x1], &[xm])[0][0])
}

/// `B_{ik} = int int T_i(x_1) K(x_1, x_m) T_k(x_m) d sigma_1 d sigma_m` in the
/// Chebyshev bases of `Delta_1` and `Delta_m`, in double-double: the pairings
/// of monic polynomials decay geometrically and cancel in binary64.
#[derive(Debug, Clone)]
pub struct Bimoments {
    pub first: Interval,
    pub last: Interval,
    pub b: Vec<Vec<DoubleDouble>>,
    b_mp: Vec<Vec<Mp>>,
}

impl Bimoments {
    pub fn new(system: &NikishinSystem, degree: usize) -> Result<Self> {
        let m = system.m();
        if m < 2 {
            return Err(Error::IndexOutOfRange(format!("bimoments need m >= 2, got {m}")));
        }
        let (r1, rm) = (system.rule(1), system.rule(m));
        let (first, last) = (system.interval(1), system.interval(m));
        let k = kernel_matrix::<Dd>(system, &r1.nodes, &rm.nodes);
        let cheb = |iv: Interval, x: f64| chebyshev_t_values((dd(x) - dd(iv.center())) / dd(iv.half_width()), degree + 1);
        let tx: Vec<Vec<Dd>> = r1.nodes.iter().map(|&x| cheb(first, x)).collect();
        let ty: Vec<Vec<Dd>> = rm.nodes.iter().map(|&y| cheb(last, y)).collect();
        // kt[x][l] = sum_y K(x, y) w_y T_l(y)
        let kt: Vec<Vec<Dd>> = k
            .iter()
            .map(|row| {
                let mut acc = vec![Dd::zero(); degree + 1];
                for ((&kv, &w), t) in row.iter().zip(&rm.weights).zip(&ty) {
                    let c = kv * dd(w);
                    for (a, &tl) in acc.iter_mut().zip(t) {
                        *a = *a + c * tl;
                    }
                }
                acc
            })
            .collect();
        let mut b = vec![vec![Dd::zero(); degree + 1]; degree + 1];
        for ((&w, t), row) in r1.weights.iter().zip(&tx).zip(&kt) {
            for i in 0..=degree {
                let c = dd(w) * t[i];
                for l in 0..=degree {
                    b[i][l] = b[i][l] + c * row[l];
                }
            }
        }
        if b.iter().flatten().any(|v| !v.to_f64().is_finite()) {
            return Err(Error::BimomentSingular(degree));
        }
        let b_mp = b.iter().map(|row| row.iter().map(|&v| mp_dd(v)).collect()).collect();
        Ok(Bimoments { first, last, b, b_mp })
    }

    pub fn degree(&self) -> usize {
        self.b.len() - 1
    }

    /// `int int P(x_1) K Q(x_m) d sigma_1 d sigma_m` for Chebyshev coefficients on `Delta_1`, `Delta_m`.
    fn pairing(&self, p: &[Mp], q: &[Mp]) -> Mp {
        let mut s = mp(0.0);
        for (pi, row) in p.iter().zip(&self.b_mp) {
            let mut t = mp(0.0);
            for (ql, bil) in q.iter().zip(row) {
                t += bil * ql;
            }
            s += pi * t;
        }
        s
    }
}

/// Monic `P_n` on `Delta_1` and `Q_n` on `Delta_m` with
/// `int int P_k K Q_n d sigma_1 d sigma_m = C_n delta_{kn}`.
#[derive(Debug, Clone)]
pub struct BiorthogonalPair {
    pub n: usize,
    pub p: ChebSeries,
    pub q: ChebSeries,
    pub c_n: f64,
    p_mp: Vec<Mp>,
    q_mp: Vec<Mp>,
}

fn monic_lead(n: usize, h: f64) -> Mp {
    let mut v = mp(1.0);
    for k in 0..n {
        v *= mp(h);
        if k > 0 {
            v *= mp(0.5);
        }
    }
    v
}

/// Monic degree-`n` solution `c` of `sum_l g(i, l) c_l = 0`, `i < n`, by
/// Gaussian elimination with partial pivoting.
fn bordered(n: usize, h: f64, g: impl Fn(usize, usize) -> Mp) -> Result<Vec<Mp>> {
    let lead = monic_lead(n, h);
    let mut a: Vec<Vec<Mp>> = (0..n)
        .map(|i| {
            let mut row: Vec<Mp> = (0..n).map(|l| g(i, l)).collect();
            row.push(-(g(i, n) * &lead));
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&x, &y| a[x][col].clone().abs().cmp(&a[y][col].clone().abs()))
            .ok_or(Error::BimomentSingular(n))?;
        if a[piv][col] == Mp::ZERO {
            return Err(Error::BimomentSingular(n));
        }
        a.swap(col, piv);
        for r in col + 1..n {
            let f = &a[r][col] / &a[col][col];
            for c in col..=n {
                let t = &f * &a[col][c];
                a[r][c] -= t;
            }
        }
    }
    let mut c = vec![mp(0.0); n];
    for r in (0..n).rev() {
        let mut v = a[r][n].clone();
        for l in r + 1..n {
            v -= &a[r][l] * &c[l];
        }
        c[r] = v / &a[r][r];
    }
    c.push(lead);
    Ok(c)
}

/// Cauchy biorthogonal polynomials of degree `n` from the bimoment matrix.
pub fn biorthogonal_polys(system: &NikishinSystem, n: usize) -> Result<BiorthogonalPair> {
    if n > DEFAULT_MAX_DEGREE {
        return Err(Error::DegreeCapExceeded {
            n,
            cap: DEFAULT_MAX_DEGREE,
        });
    }
    let bm = Bimoments::new(system, n)?;
    biorthogonal_from(&bm, n)
}

pub(crate) fn biorthogonal_from(bm: &Bimoments, n: usize) -> Result<BiorthogonalPair> {
    let b = &bm.b_mp;
    let q_mp = bordered(n, bm.last.half_width(), |i, l| b[i][l].clone())?;
    let p_mp = bordered(n, bm.first.half_width(), |i, l| b[l][i].clone())?;
    let c_n = mp_f64(&bm.pairing(&p_mp, &q_mp));
    if c_n == 0.0 || !c_n.is_finite() {
        return Err(Error::BimomentSingular(n));
    }
    let round = |v: &[Mp]| v.iter().map(mp_f64).collect::<Vec<_>>();
    Ok(BiorthogonalPair {
        n,
        p: ChebSeries::new(bm.first.a, bm.first.b, round(&p_mp))?,
        q: ChebSeries::new(bm.last.a, bm.last.b, round(&q_mp))?,
        c_n,
        p_mp,
        q_mp,
    })
}

impl BiorthogonalPair {
    /// All pairs up to degree `n` from one bimoment matrix.
    pub fn sequence(system: &NikishinSystem, n: usize) -> Result<Vec<BiorthogonalPair>> {
        if n > DEFAULT_MAX_DEGREE {
            return Err(Error::DegreeCapExceeded {
                n,
                cap: DEFAULT_MAX_DEGREE,
            });
        }
        let bm = Bimoments::new(system, n)?;
        (0..=n).map(|k| biorthogonal_from(&bm, k)).collect()
    }

    /// `|int int P_self K Q_other| / |C_other|` on the bimoments `bm`.
    pub fn residual_against(&self, other: &BiorthogonalPair, bm: &Bimoments) -> f64 {
        (mp_f64(&bm.pairing(&self.p_mp, &other.q_mp)) / other.c_n).abs()
    }
}

/// Comparison of the degree-`n` biorthogonal pair with the multi-level
/// polynomials of the multi-index `(n, 0, ..., 0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiorthogonalReport {
    pub n: usize,
    pub c_n: f64,
    /// Largest Chebyshev coefficient gap between `Q_n` and `a_{n,m}`, relative
    /// to the largest coefficient.
    pub q_dev: f64,
    /// The same for `P_n` and `a_{n,m}` of the reversed system.
    pub p_dev: f64,
    /// `max_{k<n} max(|<P_k, Q_n>|, |<P_n, Q_k>|) / |C_n|`.
    pub residual: f64,
}

fn coefficient_gap(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / scale
}

/// Biorthogonal pairs of degree `0..=n_max` against `a_{n,m}` of `(n, 0, ..., 0)`
/// for the system and for its reversal.
pub fn biorthogonal_cross_check(system: &NikishinSystem, n_max: usize, hp: &HpOptions) -> Result<Vec<BiorthogonalReport>> {
    let m = system.m();
    if m < 2 {
        return Err(Error::IndexOutOfRange(format!("biorthogonal polynomials need m >= 2, got {m}")));
    }
    if n_max > DEFAULT_MAX_DEGREE {
        return Err(Error::DegreeCapExceeded {
            n: n_max,
            cap: DEFAULT_MAX_DEGREE,
        });
    }
    let bm = Bimoments::new(system, n_max)?;
    let pairs = (0..=n_max).map(|k| biorthogonal_from(&bm, k)).collect::<Result<Vec<_>>>()?;
    let rev = system.reversed()?;
    let (first, last) = (system.interval(1), system.interval(m));
    let mut out = Vec::with_capacity(n_max + 1);
    for (n, pair) in pairs.iter().enumerate() {
        let (mut q_dev, mut p_dev) = (0.0, 0.0);
        if n > 0 {
            let mut idx = vec![0; m];
            idx[0] = n;
            let idx = MultiIndex::new(idx)?;
            let sol = hp_solve_with(system, &idx, hp)?;
            let rsol = hp_solve_with(&rev, &idx, hp)?;
            let q = ChebSeries::from_fn(last.a, last.b, n, |x| sol.a_eval_real(m, x))?;
            let p = ChebSeries::from_fn(first.a, first.b, n, |x| rsol.a_eval_real(m, x))?;
            q_dev = coefficient_gap(&pair.q.coeffs, &q.coeffs);
            p_dev = coefficient_gap(&pair.p.coeffs, &p.coeffs);
        }
        let residual = pairs[..n]
            .iter()
            .map(|other| {
                let a = mp_f64(&bm.pairing(&other.p_mp, &pair.q_mp)).abs();
                let b = mp_f64(&bm.pairing(&pair.p_mp, &other.q_mp)).abs();
                a.max(b) / pair.c_n.abs()
            })
            .fold(0.0, f64::max);
        out.push(BiorthogonalReport {
            n,
            c_n: pair.c_n,
            q_dev,
            p_dev,
            residual,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::MeasureSpec;

    fn iv(a: f64, b: f64) -> Interval {
        Interval::new(a, b).unwrap()
    }

    fn lebesgue(ivs: &[(f64, f64)]) -> NikishinSystem {
        NikishinSystem::new(ivs.iter().map(|&(a, b)| MeasureSpec::jacobi(iv(a, b), 0.0, 0.0).unwrap()).collect()).unwrap()
    }

    #[test]
    fn two_interval_kernel() {
        let s = lebesgue(&[(-1.0, 1.0), (2.0, 3.0)]);
        assert!((cauchy_kernel(&s, 0.0, 2.5).unwrap() + 0.4).abs() < 1e-15);
    }

    #[test]
    fn three_interval_kernel_against_midpoint_sum() {
        let s = lebesgue(&[(-1.0, 1.0), (2.0, 3.0), (4.0, 5.0)]);
        for (x1, x3) in [(0.3, 4.5), (-1.0, 5.0), (1.0, 4.0)] {
            let n = 20000;
            let h = 1.0 / n as f64;
            let brute: f64 = (0..n)
                .map(|i| {
                    let t = 2.0 + (i as f64 + 0.5) * h;
                    h / ((t - x3) * (x1 - t))
                })
                .sum();
            assert!((cauchy_kernel(&s, x1, x3).unwrap() - brute).abs() < 1e-6);
        }
    }

    #[test]
    fn kernel_argument_checks() {
        let s = lebesgue(&[(-1.0, 1.0), (2.0, 3.0)]);
        assert!(cauchy_kernel(&s, 1.5, 2.5).is_err());
        assert!(cauchy_kernel(&lebesgue(&[(-1.0, 1.0)]), 0.0, 0.0).is_err());
    }

    fn cauchy_double_integral(s: &NikishinSystem) -> f64 {
        let (r1, r2) = (s.rule(1), s.rule(2));
        let mut v = 0.0;
        for (x, wx) in r1.nodes.iter().zip(&r1.weights) {
            for (y, wy) in r2.nodes.iter().zip(&r2.weights) {
                v += wx * wy / (x - y);
            }
        }
        v
    }

    #[test]
    fn degree_zero_pair() {
        let s = lebesgue(&[(-1.0, 1.0), (2.0, 3.0)]);
        let p = biorthogonal_polys(&s, 0).unwrap();
        assert_eq!(p.p.coeffs, vec![1.0]);
        assert!((p.c_n - cauchy_double_integral(&s)).abs() < 1e-12 * p.c_n.abs());
        assert_eq!(p.q.coeffs, vec![1.0]);
        assert!(p.c_n < 0.0);
    }

    #[test]
    fn pairs_are_monic_and_biorthogonal() {
        let s = lebesgue(&[(-1.0, 1.0), (2.0, 3.0), (4.0, 5.0)]);
        let seq = BiorthogonalPair::sequence(&s, 6).unwrap();
        let bm = Bimoments::new(&s, 8).unwrap();
        for (n, qn) in seq.iter().enumerate() {
            assert!((qn.q.coeffs[n] - mp_f64(&monic_lead(n, 0.5))).abs() < 1e-15);
            for (k, pk) in seq.iter().enumerate() {
                if k != n {
                    assert!(pk.residual_against(qn, &bm) < 1e-9, "{k} {n}");
                }
            }
        }
    }
}
