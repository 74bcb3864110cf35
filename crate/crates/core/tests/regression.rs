//! Frozen baselines from the first validated run. `NIKISHIN_BLESS=1` rewrites them.

use std::path::PathBuf;

use nikishin::asymptotics::{
    convergence_sweep, default_test_points, deviation_series, fitted_rate, predicted_rate, LimitOptions, Limits, SweepOptions,
    DEVIATION_FLOOR,
};
use nikishin::equilibrium::RaySpec;
use nikishin::hermitepade::{apply_tn, hp_solve, tn_distance, MultiIndex};
use nikishin::measures::{Interval, MeasureSpec, NikishinSystem};

const REL_TOL: f64 = 1e-10;

fn demo2() -> NikishinSystem {
    NikishinSystem::new(vec![
        MeasureSpec::jacobi(Interval::new(-1.0, 1.0).unwrap(), -0.5, -0.5).unwrap(),
        MeasureSpec::jacobi(Interval::new(2.0, 3.0).unwrap(), -0.5, -0.5).unwrap(),
    ])
    .unwrap()
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

/// Compares `rows` (key, value) against the fixture, or rewrites it when blessing.
fn check(name: &str, rows: &[(String, f64)]) {
    let path = fixture(name);
    if std::env::var_os("NIKISHIN_BLESS").is_some() {
        let mut w = csv::Writer::from_path(&path).unwrap();
        w.write_record(["key", "value"]).unwrap();
        for (k, v) in rows {
            w.write_record([k.clone(), format!("{v:.17e}")]).unwrap();
        }
        w.flush().unwrap();
        return;
    }
    let mut r = csv::Reader::from_path(&path).unwrap_or_else(|e| panic!("{}: {e}; run with NIKISHIN_BLESS=1", path.display()));
    let frozen: Vec<(String, f64)> = r
        .records()
        .map(|rec| {
            let rec = rec.unwrap();
            (rec[0].to_string(), rec[1].parse().unwrap())
        })
        .collect();
    assert_eq!(frozen.len(), rows.len(), "{name}: row count");
    for ((fk, fv), (k, v)) in frozen.iter().zip(rows) {
        assert_eq!(fk, k, "{name}: key order");
        let both_at_floor = fv.abs() < DEVIATION_FLOOR && v.abs() < DEVIATION_FLOOR;
        assert!(
            both_at_floor || (fv - v).abs() <= REL_TOL * fv.abs(),
            "{name} {k}: {v:e} vs frozen {fv:e}"
        );
    }
}

#[test]
fn demo_sweep_deviations() {
    let s = demo2();
    let ray = RaySpec::new(vec![0.5, 0.5]).unwrap();
    let pts = default_test_points(&s.intervals());
    let ks: Vec<usize> = (4..=24).step_by(2).collect();
    let rows = convergence_sweep(&s, &ray, &ks, &pts, &SweepOptions::default()).unwrap();
    let mut out = Vec::new();
    for ((check, j, point), v) in deviation_series(&rows) {
        for (k, d) in ks.iter().zip(v) {
            out.push((format!("{}/{j}/{point}/{k}", check.name()), d));
        }
    }
    check("demo2_sweep.csv", &out);
}

#[test]
fn tn_iteration_from_perturbed_start() {
    let s = demo2();
    let n = MultiIndex::new(vec![4, 4]).unwrap();
    let sol = hp_solve(&s, &n).unwrap();
    let mut q: Vec<Vec<f64>> = sol.q_roots.iter().map(|r| r.iter().map(|x| 0.9 * x + 0.05).collect()).collect();
    let mut out = Vec::new();
    for it in 0..=10 {
        out.push((format!("{it}"), tn_distance(&s.intervals(), &q, &sol.q_roots).unwrap()));
        q = apply_tn(sol.system(), &n, &q).unwrap();
    }
    assert!(out[10].1 < 1e-3 * out[0].1);
    check("tn_iteration.csv", &out);
}

#[test]
fn error_rate_fit() {
    let s = demo2();
    let ray = RaySpec::new(vec![0.5, 0.5]).unwrap();
    let lim = Limits::new(&s, &ray, &LimitOptions::default()).unwrap();
    let ks: Vec<usize> = (12..=24).step_by(2).collect();
    let sols: Vec<_> = ks
        .iter()
        .map(|&k| hp_solve(&s, &MultiIndex::new(ray.multi_index(k).unwrap()).unwrap()).unwrap())
        .collect();
    let totals: Vec<f64> = ks.iter().map(|&k| k as f64).collect();
    let mut out = Vec::new();
    for (i, z) in default_test_points(&s.intervals()).into_iter().enumerate() {
        let predicted = predicted_rate(&lim, z).unwrap();
        out.push((format!("predicted/{i}"), predicted));
        for j in 0..2 {
            let errs: Vec<f64> = sols.iter().map(|sol| sol.approximation_error(j, z).unwrap().norm()).collect();
            let observed = fitted_rate(&totals, &errs).unwrap();
            assert!((observed / predicted - 1.0).abs() < 0.15);
            out.push((format!("observed/{j}/{i}"), observed));
        }
    }
    assert!(out.iter().all(|(_, v)| *v < 1.0));
    check("rate_fit.csv", &out);
}
