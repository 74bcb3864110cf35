//! The operator `T~_n` on vectors of monic polynomials.

use crate::error::{Error, Result};
use crate::measures::{Interval, NikishinSystem};
use crate::numerics::linalg::discrete_op_zeros;
use crate::numerics::QuadratureRule;

use super::poly::eval_roots_real;
use super::MultiIndex;

/// One application of `T~_n`, with the data needed to materialize `H_j`.
#[derive(Debug, Clone)]
pub(crate) struct TnState {
    /// Zeros of `Q*_1, ..., Q*_m`, ascending.
    pub roots: Vec<Vec<f64>>,
    /// `vary[j-1][i] = w_i H_j(x_i) / (Q_{j-1}(x_i) Q_{j+1}(x_i))` on the `Delta_j` nodes.
    pub vary: Vec<Vec<f64>>,
}

fn sign_of(v: &[f64], j: usize) -> Result<f64> {
    let s = v[v.len() / 2].signum();
    if s == 0.0 || v.iter().any(|x| x.signum() != s || !x.is_finite()) {
        return Err(Error::SignNotConstant(j));
    }
    Ok(s)
}

pub(crate) fn tn_step(rules: &[&QuadratureRule], eta: &[usize], q: &[Vec<f64>]) -> Result<TnState> {
    let m = rules.len();
    let mut roots = vec![Vec::new(); m];
    let mut vary = vec![Vec::new(); m];
    let sign_m = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
    let mut h_nodes: Vec<f64> = vec![sign_m; rules[m - 1].len()];
    for j in (1..=m).rev() {
        let r = rules[j - 1];
        let meas: Vec<f64> = r
            .nodes
            .iter()
            .zip(&r.weights)
            .zip(&h_nodes)
            .map(|((&x, &w), &h)| {
                let mut den = 1.0;
                if j > 1 {
                    den *= eval_roots_real(&q[j - 2], x);
                }
                if j < m {
                    den *= eval_roots_real(&q[j], x);
                }
                w * h / den
            })
            .collect();
        sign_of(&meas, j)?;
        let abs: Vec<f64> = meas.iter().map(|v| v.abs()).collect();
        let z = discrete_op_zeros(&r.nodes, &abs, eta[j - 1]).map_err(|e| match e {
            Error::GramSingular(_) => Error::GramSingular(j),
            other => other,
        })?;
        if j > 1 {
            let q2: Vec<f64> = r
                .nodes
                .iter()
                .zip(&meas)
                .map(|(&x, &v)| {
                    let p = eval_roots_real(&z, x);
                    p * p * v
                })
                .collect();
            h_nodes = rules[j - 2]
                .nodes
                .iter()
                .map(|&y| r.nodes.iter().zip(&q2).map(|(&x, &v)| v / (y - x)).sum())
                .collect();
        }
        roots[j - 1] = z;
        vary[j - 1] = meas;
    }
    Ok(TnState { roots, vary })
}

pub(crate) fn validate_input(intervals: &[Interval], eta: &[usize], q: &[Vec<f64>]) -> Result<()> {
    let m = intervals.len();
    if q.len() != m {
        return Err(Error::InvalidInputPolynomials(format!("expected {m} polynomials, got {}", q.len())));
    }
    for j in 1..=m {
        let r = &q[j - 1];
        if r.len() != eta[j - 1] {
            return Err(Error::InvalidInputPolynomials(format!(
                "Q_{j} has degree {} but eta = {}",
                r.len(),
                eta[j - 1]
            )));
        }
        for &x in r {
            let bad = !x.is_finite()
                || (j > 1 && intervals[j - 2].a <= x && x <= intervals[j - 2].b)
                || (j < m && intervals[j].a <= x && x <= intervals[j].b);
            if bad {
                return Err(Error::InvalidInputPolynomials(format!(
                    "zero {x} of Q_{j} on a neighbouring interval"
                )));
            }
        }
    }
    Ok(())
}

/// `T~_n(Q)`: zeros of `Q*_1, ..., Q*_m` from zeros of `Q_1, ..., Q_m`.
pub fn apply_tn(system: &NikishinSystem, n: &MultiIndex, q: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    if n.m() != system.m() {
        return Err(Error::SizeMismatch {
            expected: system.m(),
            got: n.m(),
        });
    }
    let eta = n.etas();
    validate_input(&system.intervals(), &eta, q)?;
    let rules: Vec<&QuadratureRule> = (1..=system.m()).map(|j| system.rule(j)).collect();
    Ok(tn_step(&rules, &eta, q)?.roots)
}

/// `d_n`: the largest uniform distance of `Q_j` and `Q'_j` on the
/// neighbouring intervals `Delta_{j-1} U Delta_{j+1}`, sampled on grids.
pub fn tn_distance(intervals: &[Interval], p: &[Vec<f64>], q: &[Vec<f64>]) -> Result<f64> {
    let m = intervals.len();
    if p.len() != m || q.len() != m {
        return Err(Error::SizeMismatch {
            expected: m,
            got: p.len().min(q.len()),
        });
    }
    let mut d = 0.0f64;
    for j in 1..=m {
        let mut neigh = Vec::new();
        if j > 1 {
            neigh.push(intervals[j - 2]);
        }
        if j < m {
            neigh.push(intervals[j]);
        }
        for iv in neigh {
            for x in iv.grid(256) {
                d = d.max((eval_roots_real(&p[j - 1], x) - eval_roots_real(&q[j - 1], x)).abs());
            }
        }
    }
    Ok(d)
}

/// Largest root displacement relative to the half-width of the interval.
pub(crate) fn root_change(intervals: &[Interval], p: &[Vec<f64>], q: &[Vec<f64>]) -> f64 {
    let mut d = 0.0f64;
    for (j, iv) in intervals.iter().enumerate() {
        for (a, b) in p[j].iter().zip(&q[j]) {
            d = d.max((a - b).abs() / iv.half_width());
        }
    }
    d
}

/// Seed: plain orthogonal polynomials of each `sigma_j`.
pub(crate) fn seed(rules: &[&QuadratureRule], eta: &[usize]) -> Result<Vec<Vec<f64>>> {
    rules
        .iter()
        .zip(eta)
        .map(|(r, &e)| discrete_op_zeros(&r.nodes, &r.weights, e))
        .collect()
}

/// Iterates `T~_n` from the seed until the zeros settle.
pub(crate) fn fixed_point(
    rules: &[&QuadratureRule],
    intervals: &[Interval],
    eta: &[usize],
    tol: f64,
    max_iter: usize,
) -> Result<(TnState, Vec<f64>)> {
    let mut q = seed(rules, eta)?;
    let mut changes = Vec::new();
    let mut best = f64::INFINITY;
    let mut stalled = 0;
    for _ in 0..max_iter {
        let st = tn_step(rules, eta, &q)?;
        let c = root_change(intervals, &st.roots, &q);
        changes.push(c);
        q = st.roots.clone();
        if c <= tol {
            return Ok((st, changes));
        }
        if c < 0.5 * best {
            best = c;
            stalled = 0;
        } else {
            stalled += 1;
            if stalled >= 4 && best <= 1e3 * tol {
                return Ok((st, changes));
            }
        }
    }
    Err(Error::NoConvergence {
        what: "T~_n fixed point",
        iterations: max_iter,
    })
}
