//! The ML Hermite-Pade conditions as a linear system in the coefficients of
//! `a_{n,m}`, generic over the scalar type.
//!
//! The lower polynomials `a_{n,j}`, `j < m`, are the polynomial parts forced by
//! the cancellation at infinity and are computed from `a_{n,m}` by divided
//! differences in the Chebyshev basis of the hull interval.

use crate::error::{Error, Result};
use crate::measures::{Interval, NikishinSystem};
use crate::numerics::linalg::solve_dense;
use crate::numerics::scalar::chebyshev_t_values;
use crate::numerics::Scalar;

use super::poly::{cheb_u_values, clenshaw_s, monic_leading, polynomial_part};
use super::MultiIndex;

/// Smallest interval containing every `Delta_j`.
pub fn hull(system: &NikishinSystem) -> Interval {
    let ivs = system.intervals();
    let a = ivs.iter().map(|i| i.a).fold(f64::INFINITY, f64::min);
    let b = ivs.iter().map(|i| i.b).fold(f64::NEG_INFINITY, f64::max);
    Interval { a, b }
}

/// Quadrature data of the nested measures, in scalar type `S`.
pub(crate) struct NestedData<S> {
    m: usize,
    h: S,
    /// `u_moments[j-1][k-j][l] = int U_l(s) d s_{j,k}` in the hull variable `s`.
    u_moments: Vec<Vec<Vec<S>>>,
    /// Hull variable at the nodes of `Delta_j`.
    hull_nodes: Vec<Vec<S>>,
    /// Own-interval variable at the nodes of `Delta_j`.
    own_nodes: Vec<Vec<S>>,
    /// `weights[j-1][k-j]`: weights of `d s_{j,k}`.
    weights: Vec<Vec<Vec<S>>>,
}

impl<S: Scalar> NestedData<S> {
    pub(crate) fn new(system: &NikishinSystem, degree: usize) -> Result<Self> {
        let m = system.m();
        let hv = hull(system);
        let (mid, h) = (hv.center(), hv.half_width());
        let mut u_moments = Vec::with_capacity(m);
        let mut weights = Vec::with_capacity(m);
        let mut hull_nodes = Vec::with_capacity(m);
        let mut own_nodes = Vec::with_capacity(m);
        for j in 1..=m {
            let rule = system.rule(j);
            let iv = system.interval(j);
            let s: Vec<S> = rule.nodes.iter().map(|&x| S::from_f64((x - mid) / h)).collect();
            let t: Vec<S> = rule
                .nodes
                .iter()
                .map(|&x| S::from_f64((x - iv.center()) / iv.half_width()))
                .collect();
            let u: Vec<Vec<S>> = s.iter().map(|&si| cheb_u_values(si, degree)).collect();
            let mut mj = Vec::new();
            let mut wj = Vec::new();
            for k in j..=m {
                let w: Vec<S> = system.nested_weights(j, k)?.into_iter().map(S::from_f64).collect();
                let mom = (0..degree)
                    .map(|l| w.iter().zip(&u).fold(S::zero(), |acc, (wi, ui)| acc + *wi * ui[l]))
                    .collect();
                mj.push(mom);
                wj.push(w);
            }
            u_moments.push(mj);
            weights.push(wj);
            hull_nodes.push(s);
            own_nodes.push(t);
        }
        Ok(NestedData {
            m,
            h: S::from_f64(h),
            u_moments,
            hull_nodes,
            own_nodes,
            weights,
        })
    }

    /// `a_0, ..., a_m` (hull Chebyshev coefficients) from `a_m`.
    pub(crate) fn lower_polys(&self, a_m: &[S]) -> Vec<Vec<S>> {
        let m = self.m;
        let len = a_m.len().saturating_sub(1).max(1);
        let mut a: Vec<Vec<S>> = vec![Vec::new(); m + 1];
        a[m] = a_m.to_vec();
        for j in (0..m).rev() {
            let mut acc = vec![S::zero(); len];
            for k in j + 1..=m {
                let pp = polynomial_part(&a[k], &self.u_moments[j][k - j - 1], self.h);
                for (o, v) in acc.iter_mut().zip(pp) {
                    *o = if k % 2 == 0 { *o + v } else { *o - v };
                }
            }
            if j % 2 == 0 {
                acc.iter_mut().for_each(|v| *v = -*v);
            }
            a[j] = acc;
        }
        a
    }

    /// Laurent coefficients `sum_{k>j} (-1)^k int T_nu a_k d s_{j+1,k}` for
    /// `nu < count`, together with the sums of absolute terms.
    pub(crate) fn laurent(&self, a: &[Vec<S>], j: usize, count: usize) -> (Vec<S>, Vec<S>) {
        let m = self.m;
        let nodes = &self.hull_nodes[j];
        let mut vals = vec![S::zero(); count];
        let mut scale = vec![S::zero(); count];
        for k in j + 1..=m {
            let w = &self.weights[j][k - j - 1];
            for (i, &si) in nodes.iter().enumerate() {
                let ak = clenshaw_s(&a[k], si);
                let tv = chebyshev_t_values(self.own_nodes[j][i], count.max(1));
                for nu in 0..count {
                    let term = w[i] * tv[nu] * ak;
                    vals[nu] = if k % 2 == 0 { vals[nu] + term } else { vals[nu] - term };
                    scale[nu] = scale[nu] + term.abs();
                }
            }
        }
        (vals, scale)
    }

    fn conditions(&self, n: &MultiIndex, a_m: &[S]) -> Vec<S> {
        let a = self.lower_polys(a_m);
        let mut out = Vec::with_capacity(n.total());
        for j in 0..self.m {
            let cnt = n.n(j + 1);
            if cnt > 0 {
                out.extend(self.laurent(&a, j, cnt).0);
            }
        }
        out
    }
}

/// Solution of the reduced `|n| x |n|` system: hull Chebyshev coefficients of
/// `a_0, ..., a_m` and the pivot-ratio condition estimate.
#[derive(Debug, Clone)]
pub struct ReducedSolution<S> {
    pub hull: Interval,
    pub a: Vec<Vec<S>>,
    pub cond: f64,
}

pub fn solve_reduced_system<S: Scalar>(system: &NikishinSystem, n: &MultiIndex) -> Result<ReducedSolution<S>> {
    if n.m() != system.m() {
        return Err(Error::SizeMismatch {
            expected: system.m(),
            got: n.m(),
        });
    }
    let total = n.total();
    let data = NestedData::<S>::new(system, total + 1)?;
    let hv = hull(system);
    let lead = monic_leading(total, S::from_f64(hv.half_width()));
    let unit = |i: usize, v: S| {
        let mut c = vec![S::zero(); total + 1];
        c[i] = v;
        c
    };
    let rhs: Vec<S> = data.conditions(n, &unit(total, lead)).into_iter().map(|v| -v).collect();
    let cols: Vec<Vec<S>> = (0..total).map(|i| data.conditions(n, &unit(i, S::one()))).collect();
    let mat: Vec<Vec<S>> = (0..total).map(|r| (0..total).map(|c| cols[c][r]).collect()).collect();
    let (x, cond) = solve_dense(mat, rhs)?;
    let mut a_m = x;
    a_m.push(lead);
    Ok(ReducedSolution {
        hull: hv,
        a: data.lower_polys(&a_m),
        cond,
    })
}
