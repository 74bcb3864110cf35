use super::*;
use crate::measures::MeasureSpec;

fn iv(a: f64, b: f64) -> Interval {
    Interval::new(a, b).unwrap()
}

fn arcsine1() -> NikishinSystem {
    NikishinSystem::new(vec![MeasureSpec::arcsine(iv(-1.0, 1.0)).unwrap()]).unwrap()
}

fn demo2() -> NikishinSystem {
    NikishinSystem::new(vec![
        MeasureSpec::jacobi(iv(-1.0, 1.0), -0.5, -0.5).unwrap(),
        MeasureSpec::jacobi(iv(2.0, 3.0), -0.5, -0.5).unwrap(),
    ])
    .unwrap()
}

fn ray(p: &[f64]) -> RaySpec {
    RaySpec::new(p.to_vec()).unwrap()
}

fn solve(s: &NikishinSystem, n: &[usize]) -> HPSolution {
    crate::hermitepade::hp_solve(s, &MultiIndex::new(n.to_vec()).unwrap()).unwrap()
}

#[test]
fn arcsine_closed_forms() {
    let s = arcsine1();
    let lim = Limits::new(&s, &ray(&[1.0]), &LimitOptions::default()).unwrap();
    let sol = solve(&s, &[16]);
    let z = Complex64::new(2.0, 0.0);
    let w = 2.0 + 3f64.sqrt();
    let sq = 3f64.sqrt();
    let q = theorem1_ratio(&sol, &lim, 1, z).unwrap();
    assert!((q.lhs.re - (1.0 + w.powi(-32))).abs() < 1e-12);
    assert!((q.rhs - 1.0).norm() < 1e-10);
    let k = kappa_ratio(&sol, &lim, 1).unwrap();
    assert!((k.lhs.re - 0.5f64.sqrt()).abs() < 1e-10);
    assert!((k.rhs.re - 0.5f64.sqrt()).abs() < 1e-10);
    let f = forms_asymptotic_check(&sol, &lim, 0, z).unwrap();
    assert!((f.lhs.re - 1.0 / sq).abs() < 1e-12);
    assert!(f.rel_dev < 1e-10);
    let r = rate_of_convergence_check(&sol, &lim, 0, z).unwrap();
    assert!((r.lhs.re - 1.0 / (sq * (1.0 + w.powi(-32)))).abs() < 1e-12);
    assert!((r.rhs.re - 1.0 / sq).abs() < 1e-12);
    let a = ml_poly_ratio(&sol, &lim, 0, z).unwrap();
    assert!(a.lhs.im.abs() < 1e-14 * a.lhs.norm());
}

#[test]
fn conjugate_points_agree() {
    let s = demo2();
    let lim = Limits::new(&s, &ray(&[0.5, 0.5]), &LimitOptions::default()).unwrap();
    let sol = solve(&s, &[3, 3]);
    let z = Complex64::new(1.3, 2.1);
    for j in 1..=2 {
        let a = theorem1_ratio(&sol, &lim, j, z).unwrap();
        let b = theorem1_ratio(&sol, &lim, j, z.conj()).unwrap();
        assert!((a.rel_dev - b.rel_dev).abs() < 1e-12);
    }
    for j in 0..2 {
        let a = rate_of_convergence_check(&sol, &lim, j, z).unwrap();
        let b = rate_of_convergence_check(&sol, &lim, j, z.conj()).unwrap();
        assert!((a.rel_dev - b.rel_dev).abs() < 1e-10);
    }
}

#[test]
fn real_points_give_real_values() {
    let s = demo2();
    let lim = Limits::new(&s, &ray(&[0.5, 0.5]), &LimitOptions::default()).unwrap();
    let sol = solve(&s, &[4, 4]);
    for x in [1.5, 3.5, -2.0] {
        let z = Complex64::new(x, 0.0);
        for j in 0..2 {
            let r = ml_poly_ratio(&sol, &lim, j, z).unwrap();
            assert!(r.lhs.im.abs() <= 1e-12 * r.lhs.norm() && r.rhs.im.abs() <= 1e-12 * r.rhs.norm());
        }
    }
    // branch of the square root
    let f = forms_asymptotic_check(&sol, &lim, 1, Complex64::new(10.0, 0.0)).unwrap();
    assert!(f.rhs.re > 0.0);
}

#[test]
fn identity_error_matches_direct_difference() {
    let s = demo2();
    let sol = solve(&s, &[2, 2]);
    let rev = s.reversed().unwrap();
    let z = Complex64::new(2.5, 0.4);
    for j in 0..2 {
        let direct = sol.a_eval(j, z) / sol.a_eval(2, z) - shat_reversed(&rev, 2, j + 1, z).unwrap();
        let via = sol.approximation_error(j, z).unwrap();
        assert!((direct - via).norm() < 1e-8 * via.norm(), "{j} {direct} {via}");
    }
}

#[test]
fn support_and_index_errors() {
    let s = demo2();
    let lim = Limits::new(&s, &ray(&[0.5, 0.5]), &LimitOptions::default()).unwrap();
    let sol = solve(&s, &[2, 2]);
    let on = Complex64::new(2.5, 0.0);
    assert!(matches!(theorem1_ratio(&sol, &lim, 2, on), Err(Error::OnSupport(_))));
    assert!(matches!(ml_poly_ratio(&sol, &lim, 0, on), Err(Error::OnSupport(_))));
    assert!(matches!(forms_asymptotic_check(&sol, &lim, 1, on), Err(Error::OnSupport(_))));
    assert!(theorem1_ratio(&sol, &lim, 0, Complex64::new(0.0, 1.0)).is_err());
    assert!(ml_poly_ratio(&sol, &lim, 2, Complex64::new(0.0, 1.0)).is_err());
    assert!(theorem1_ratio(&sol, &lim, 1, on).is_ok());
}

#[test]
fn default_points_layout() {
    let pts = default_test_points(&demo2().intervals());
    assert_eq!(pts.len(), 12);
    assert!((pts[0] - Complex64::new(1.0, 0.0)).norm() - 4.0 < 1e-14);
    assert_eq!(pts[10], Complex64::new(4.0 / 3.0, 0.0));
    assert_eq!(default_test_points(&arcsine1().intervals()).len(), 10);
}

#[test]
fn sweep_indices_and_order() {
    let s = demo2();
    let r = ray(&[0.5, 0.5]);
    let pts = default_test_points(&s.intervals());
    let opts = SweepOptions::default();
    assert!(convergence_sweep(&s, &r, &[], &pts, &opts).unwrap().is_empty());
    assert!(matches!(
        convergence_sweep(&s, &r, &[3], &pts, &opts),
        Err(Error::NonrealizableRay(3))
    ));
    let rows = convergence_sweep(&s, &r, &[4, 2], &pts, &opts).unwrap();
    assert_eq!(rows[0].k, 2);
    assert_eq!(rows[0].multi_index.components(), &[1, 1]);
    assert_eq!(rows.last().unwrap().multi_index.components(), &[2, 2]);
    // per k: 2 x 12 + 2 + 3 x 2 x 12
    assert_eq!(rows.len(), 2 * (24 + 2 + 72));
    let keys: Vec<_> = rows.iter().map(|r| (r.k, r.check, r.j, r.point_index)).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    assert!(rows.iter().all(|r| r.abs_dev >= 0.0 && r.rel_dev >= 0.0));
    let corner = ray(&[1.0, 0.0]);
    let rows = convergence_sweep(&s, &corner, &[3], &pts, &opts).unwrap();
    assert_eq!(rows[0].multi_index.components(), &[3, 0]);
}

#[test]
fn trend_predicate() {
    assert!(eventually_decreasing(&[1.0, 3.0, 0.5, 0.4, 0.43, 0.3], 0.1, 0.0));
    assert!(!eventually_decreasing(&[1.0, 0.9, 0.5, 0.4, 0.6, 0.3], 0.1, 0.0));
    assert!(eventually_decreasing(&[], 0.1, 0.0));
    assert!(eventually_decreasing(&[1e-3, 1e-9, 1e-14, 3e-14, 2e-14], 0.1, DEVIATION_FLOOR));
    assert!(!eventually_decreasing(&[1e-3, 1e-9, 1e-14, 3e-12, 2e-14], 0.1, DEVIATION_FLOOR));
}

#[test]
fn csv_layout() {
    let s = demo2();
    let r = ray(&[0.5, 0.5]);
    let pts = default_test_points(&s.intervals());
    let rows = convergence_sweep(&s, &r, &[2], &pts, &SweepOptions::default()).unwrap();
    let mut buf = Vec::new();
    write_csv(&rows, &r, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first[0], "q_ratio");
    assert_eq!(first[2], "5.0000000000000000e-1;5.0000000000000000e-1");
    assert_eq!(text.lines().count(), rows.len() + 1);
}

#[test]
fn kappa_limit_includes_neighbours() {
    let s = demo2();
    let lim = Limits::new(&s, &ray(&[0.5, 0.5]), &LimitOptions::default()).unwrap();
    let sol = solve(&s, &[8, 8]);
    for j in 1..=2 {
        assert!(kappa_ratio(&sol, &lim, j).unwrap().rel_dev < 1e-6);
    }
}

fn cheb_on(iv: Interval, n: usize, f: impl Fn(f64) -> f64) -> Vec<f64> {
    crate::numerics::ChebSeries::from_fn(iv.a, iv.b, n, f).unwrap().coeffs
}

#[test]
fn biorthogonal_equals_ml_polynomial() {
    let s3 = NikishinSystem::new(vec![
        MeasureSpec::jacobi(iv(-1.0, 1.0), 0.0, 0.0).unwrap(),
        MeasureSpec::jacobi(iv(2.0, 3.0), 0.0, 0.0).unwrap(),
        MeasureSpec::jacobi(iv(4.0, 5.0), 0.0, 0.0).unwrap(),
    ])
    .unwrap();
    for s in [demo2(), s3] {
        let m = s.m();
        let rev = s.reversed().unwrap();
        let pairs = BiorthogonalPair::sequence(&s, 6).unwrap();
        for n in 1..=6 {
            let mut idx = vec![0; m];
            idx[0] = n;
            let sol = solve(&s, &idx);
            let rsol = solve(&rev, &idx);
            let (dm, d1) = (s.interval(m), s.interval(1));
            let q = cheb_on(dm, n, |x| sol.a_eval_real(m, x));
            let p = cheb_on(d1, n, |x| rsol.a_eval_real(m, x));
            let sq = q.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            let sp = p.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            for i in 0..=n {
                assert!((pairs[n].q.coeffs[i] - q[i]).abs() < 1e-8 * sq, "m {m} n {n} q {i}");
                assert!((pairs[n].p.coeffs[i] - p[i]).abs() < 1e-8 * sp, "m {m} n {n} p {i}");
            }
        }
    }
}

#[test]
fn demo_sweep_trends() {
    let s = demo2();
    let r = ray(&[0.5, 0.5]);
    let pts = default_test_points(&s.intervals());
    let ks: Vec<usize> = (4..=24).step_by(2).collect();
    let rows = convergence_sweep(&s, &r, &ks, &pts, &SweepOptions::default()).unwrap();
    let series = deviation_series(&rows);
    assert_eq!(series.len(), 24 + 2 + 3 * 24);
    for (key, v) in series {
        assert_eq!(v.len(), ks.len());
        assert!(eventually_decreasing(&v, 0.1, DEVIATION_FLOOR), "{key:?} {v:?}");
        assert!(*v.last().unwrap() < 1e-10, "{key:?} {v:?}");
    }
}

#[test]
fn observed_rate_matches_prediction() {
    let s = demo2();
    let r = ray(&[0.5, 0.5]);
    let lim = Limits::new(&s, &r, &LimitOptions::default()).unwrap();
    let pts = default_test_points(&s.intervals());
    let ks: Vec<usize> = (12..=24).step_by(2).collect();
    let sols: Vec<HPSolution> = ks.iter().map(|&k| solve(&s, &r.multi_index(k).unwrap())).collect();
    let totals: Vec<f64> = ks.iter().map(|&k| k as f64).collect();
    for z in pts {
        let predicted = predicted_rate(&lim, z).unwrap();
        assert!(predicted < 1.0);
        for j in 0..2 {
            let errs: Vec<f64> = sols.iter().map(|sol| sol.approximation_error(j, z).unwrap().norm()).collect();
            let observed = fitted_rate(&totals, &errs).unwrap();
            assert!((observed / predicted - 1.0).abs() < 0.15, "{z} {j} {observed} {predicted}");
        }
    }
}

#[test]
fn rate_fit_basics() {
    let xs = [1.0, 2.0, 3.0, 4.0];
    let ys: Vec<f64> = xs.iter().map(|x| 3.0 * 0.25f64.powf(*x)).collect();
    assert!((fitted_rate(&xs, &ys).unwrap() - 0.25).abs() < 1e-14);
    assert!(fitted_rate(&xs, &[1.0, 0.0, 1.0, 1.0]).is_none());
    assert!(fitted_rate(&[1.0], &[1.0]).is_none());
}

#[test]
fn cross_check_report() {
    let s = demo2();
    let rows = biorthogonal_cross_check(&s, 8, &HpOptions::default()).unwrap();
    assert_eq!(rows.len(), 9);
    for r in &rows {
        assert!(r.q_dev < 1e-8 && r.p_dev < 1e-8 && r.residual < 1e-9, "{r:?}");
    }
    assert!(biorthogonal_cross_check(&arcsine1(), 2, &HpOptions::default()).is_err());
}
