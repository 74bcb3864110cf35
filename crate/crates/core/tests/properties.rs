use std::sync::OnceLock;

use num_complex::Complex64;
use proptest::prelude::*;

use nikishin::cli::parse_config_str;
use nikishin::equilibrium::RaySpec;
use nikishin::hermitepade::{hp_solve, HPSolution, MultiIndex};
use nikishin::measures::{Interval, MeasureSpec, NikishinSystem};
use nikishin::szego::{apply_t, metric_d, BoundaryVectorFunction, SzegoWeightVector};

fn iv(a: f64, b: f64) -> Interval {
    Interval::new(a, b).unwrap()
}

fn demo_intervals(m: usize) -> Vec<Interval> {
    (0..m).map(|j| iv(3.0 * j as f64 - 1.0, 3.0 * j as f64 + 1.0)).collect()
}

fn demo_solution() -> &'static HPSolution {
    static SOL: OnceLock<HPSolution> = OnceLock::new();
    SOL.get_or_init(|| {
        let s = NikishinSystem::new(vec![
            MeasureSpec::jacobi(iv(-1.0, 1.0), -0.5, -0.5).unwrap(),
            MeasureSpec::jacobi(iv(2.0, 3.0), -0.5, -0.5).unwrap(),
        ])
        .unwrap();
        hp_solve(&s, &MultiIndex::new(vec![4, 3]).unwrap()).unwrap()
    })
}

fn boundary(ints: &[Interval], params: &[(f64, f64, f64)]) -> BoundaryVectorFunction {
    BoundaryVectorFunction::from_fn(ints, 24, |j, x| {
        let (a, b, c) = params[j - 1];
        (a * (b * x).sin() + c * x.cos()).exp()
    })
}

fn params(m: usize) -> impl Strategy<Value = Vec<(f64, f64, f64)>> {
    prop::collection::vec((-2.0..2.0f64, 0.1..3.0f64, -1.0..1.0f64), m)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn metric_is_a_metric(f in params(3), g in params(3), h in params(3), c in 0.1..10.0f64) {
        let ints = demo_intervals(3);
        let (f, g, h) = (boundary(&ints, &f), boundary(&ints, &g), boundary(&ints, &h));
        let dfg = metric_d(&f, &g).unwrap();
        prop_assert_eq!(metric_d(&f, &f).unwrap(), 0.0);
        prop_assert!((dfg - metric_d(&g, &f).unwrap()).abs() < 1e-15);
        prop_assert!(dfg <= metric_d(&f, &h).unwrap() + metric_d(&h, &g).unwrap() + 1e-14);
        let cf = BoundaryVectorFunction::from_fn(&ints, 24, |_, _| c);
        let cg = BoundaryVectorFunction::from_fn(&ints, 24, |_, _| 1.0);
        prop_assert!((metric_d(&cf, &cg).unwrap() - c.ln().abs()).abs() < 1e-14);
    }

    #[test]
    fn t_is_non_expansive(f in params(2), g in params(2)) {
        let ints = demo_intervals(2);
        let specs: Vec<MeasureSpec> = ints.iter().map(|&i| MeasureSpec::jacobi(i, 0.2, -0.4).unwrap()).collect();
        let w = SzegoWeightVector::from_measures(&specs, 24).unwrap();
        let (f, g) = (boundary(&ints, &f), boundary(&ints, &g));
        let before = metric_d(&f, &g).unwrap();
        let after = metric_d(&apply_t(&w, &f).unwrap(), &apply_t(&w, &g).unwrap()).unwrap();
        prop_assert!(after <= before + 1e-12);
    }

    #[test]
    fn forms_are_conjugate_symmetric(r in 1.5..6.0f64, t in 0.05..3.1f64, j in 0usize..=2) {
        let sol = demo_solution();
        let z = Complex64::new(1.0, 0.0) + Complex64::from_polar(r, t);
        prop_assume!(z.im.abs() > 1e-3);
        let a = sol.form_eval(j, z).unwrap();
        let b = sol.form_eval(j, z.conj()).unwrap();
        prop_assert!((a.conj() - b).norm() <= 1e-13 * a.norm());
        let e = sol.approximation_error(j.min(1), z).unwrap();
        let ec = sol.approximation_error(j.min(1), z.conj()).unwrap();
        prop_assert!((e.conj() - ec).norm() <= 1e-10 * e.norm());
    }

    #[test]
    fn realizable_rays_give_indices_on_the_ray(n in prop::collection::vec(0usize..6, 1..5), scale in 1usize..4) {
        let mut n = n;
        n.sort_unstable_by(|a, b| b.cmp(a));
        prop_assume!(n[0] > 0);
        let total: usize = n.iter().sum();
        let ray = RaySpec::new(n.iter().map(|&v| v as f64 / total as f64).collect());
        prop_assume!(ray.is_ok());
        let ray = ray.unwrap();
        let idx = ray.multi_index(scale * total).unwrap();
        prop_assert_eq!(idx.iter().sum::<usize>(), scale * total);
        prop_assert!(idx.windows(2).all(|w| w[0] >= w[1]));
        let mi = MultiIndex::new(idx.clone()).unwrap();
        let etas = mi.etas();
        prop_assert_eq!(*etas.last().unwrap(), scale * total);
        prop_assert!(etas.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn config_rejects_overlapping_or_unordered_intervals(a in -5.0..5.0f64, w1 in 0.1..3.0f64, b in -5.0..5.0f64, w2 in 0.1..3.0f64) {
        let text = format!(
            "[[measure]]\ninterval = [{a:?}, {:?}]\n\n[[measure]]\ninterval = [{b:?}, {:?}]\n",
            a + w1,
            b + w2
        );
        let overlap = iv(a, a + w1).overlaps(&iv(b, b + w2));
        let parsed = parse_config_str(&text);
        prop_assert_eq!(parsed.is_err(), overlap || b < a, "{}", text);
        if let Err(e) = parsed {
            let msg = e.to_string();
            prop_assert!(msg.contains(if overlap { "overlap" } else { "increasing order" }), "{}", msg);
        }
    }
}
