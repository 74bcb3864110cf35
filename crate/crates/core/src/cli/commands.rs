//! Command bodies. Each writes its CSV artifacts into the output directory and
//! returns the residual gates that decide the exit code.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use crate::asymptotics::{
    biorthogonal_cross_check, convergence_sweep, default_test_points, deviation_series, eventually_decreasing, write_csv, CheckKind,
    LimitOptions, SweepOptions, DEVIATION_FLOOR,
};
use crate::equilibrium::{solve_with, EquilibriumOptions, EquilibriumSolution};
use crate::error::{Error, Result};
use crate::hermitepade::{hp_solve_with, HPSolution, HpOptions, MultiIndex};
use crate::measures::NikishinSystem;
use crate::szego::{boundcond_residual, fixed_point_t, SzegoVector, SzegoWeightVector};

use super::config::RunConfig;

pub const EQUILIBRIUM_GATE: f64 = 1e-8;
pub const BOUNDARY_GATE: f64 = 1e-8;
pub const ORTHOGONALITY_GATE: f64 = 1e-8;
pub const FORMREC_GATE: f64 = 1e-8;
pub const TREND_FINAL_GATE: f64 = 0.05;
pub const FORM_FINAL_GATE: f64 = 0.1;
pub const BIORTHOGONAL_COEFF_GATE: f64 = 1e-8;
pub const BIORTHOGONAL_RESIDUAL_GATE: f64 = 1e-9;
pub const BIORTHOGONAL_MAX_DEGREE: usize = 8;

/// A residual that passes when `value <= threshold`.
#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub command: &'static str,
    pub name: String,
    pub value: f64,
    pub threshold: f64,
}

impl Gate {
    fn new(command: &'static str, name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Gate {
            command,
            name: name.into(),
            value,
            threshold,
        }
    }

    pub fn passed(&self) -> bool {
        self.value <= self.threshold
    }
}

fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

fn io(e: impl std::fmt::Display) -> Error {
    Error::Io(e.to_string())
}

pub(crate) fn csv_writer(dir: &Path, name: &str) -> Result<csv::Writer<BufWriter<File>>> {
    let path = dir.join(name);
    let f = File::create(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Ok(csv::Writer::from_writer(BufWriter::new(f)))
}

/// Solved objects shared between commands of one run.
pub struct Context<'a> {
    pub cfg: &'a RunConfig,
    pub out: PathBuf,
    system: Option<NikishinSystem>,
    equilibrium: Option<EquilibriumSolution>,
    szego: Option<SzegoVector>,
}

impl<'a> Context<'a> {
    pub fn new(cfg: &'a RunConfig, out: PathBuf) -> Self {
        Context {
            cfg,
            out,
            system: None,
            equilibrium: None,
            szego: None,
        }
    }

    fn system(&mut self) -> Result<&NikishinSystem> {
        if self.system.is_none() {
            self.system = Some(self.cfg.system()?);
        }
        Ok(self.system.as_ref().unwrap())
    }

    fn eq_options(&self) -> EquilibriumOptions {
        EquilibriumOptions {
            tol: self.cfg.tol_eq,
            grid: self.cfg.grid_eq,
            ..Default::default()
        }
    }

    fn hp_options(&self) -> HpOptions {
        HpOptions {
            max_degree: self.cfg.max_degree,
            ..Default::default()
        }
    }

    fn equilibrium_solution(&mut self) -> Result<&EquilibriumSolution> {
        if self.equilibrium.is_none() {
            let eq = solve_with(&self.cfg.intervals(), &self.cfg.ray_spec()?, &self.eq_options())?;
            self.equilibrium = Some(eq);
        }
        Ok(self.equilibrium.as_ref().unwrap())
    }

    fn szego_vector(&mut self) -> Result<&SzegoVector> {
        if self.szego.is_none() {
            let grid = self.cfg.grid_szego;
            let w = SzegoWeightVector::from_system(self.system()?, grid)?;
            self.szego = Some(fixed_point_t(&w, self.cfg.tol_fp, LimitOptions::default().fp_max_iter)?);
        }
        Ok(self.szego.as_ref().unwrap())
    }

    fn points(&self) -> Vec<Complex64> {
        self.cfg
            .points
            .clone()
            .unwrap_or_else(|| default_test_points(&self.cfg.intervals()))
    }

    pub fn equilibrium(&mut self) -> Result<Vec<Gate>> {
        let grid = self.cfg.grid_eq;
        let ray = self.cfg.ray.clone();
        let out = self.out.clone();
        let eq = self.equilibrium_solution()?;
        let mut w = csv_writer(&out, "equilibrium_density.csv")?;
        w.write_record(["j", "x", "u", "density"]).map_err(io)?;
        for j in 1..=eq.m() {
            let pts = eq.intervals[j - 1].grid(grid);
            for &x in &pts[1..pts.len() - 1] {
                let row = [j.to_string(), sci(x), sci(eq.smooth_factor(j, x)), sci(eq.density(j, x))];
                w.write_record(&row).map_err(io)?;
            }
        }
        w.flush().map_err(io)?;
        let mut w = csv_writer(&out, "equilibrium_constants.csv")?;
        w.write_record(["j", "a", "b", "p", "big_p", "mass", "omega", "c"]).map_err(io)?;
        for j in 1..=eq.m() {
            let iv = eq.intervals[j - 1];
            let row = [
                j.to_string(),
                sci(iv.a),
                sci(iv.b),
                sci(ray[j - 1]),
                sci(eq.ray.big_p(j)),
                sci(eq.mass(j)),
                sci(eq.robin(j)),
                sci(eq.c_const(j)),
            ];
            w.write_record(&row).map_err(io)?;
        }
        w.flush().map_err(io)?;
        Ok(vec![Gate::new(
            "equilibrium",
            "equilibrium_residual",
            eq.equilibrium_residual(),
            EQUILIBRIUM_GATE,
        )])
    }

    pub fn szego_fixed_point(&mut self) -> Result<Vec<Gate>> {
        let out = self.out.clone();
        let tol_fp = self.cfg.tol_fp;
        self.szego_vector()?;
        let g = self.szego.as_ref().unwrap();
        let residual = boundcond_residual(g, self.system.as_ref().unwrap())?;
        let mut w = csv_writer(&out, "szego_iterations.csv")?;
        w.write_record(["iteration", "distance"]).map_err(io)?;
        for (i, d) in g.distances.iter().enumerate() {
            w.write_record([(i + 1).to_string(), sci(*d)]).map_err(io)?;
        }
        w.flush().map_err(io)?;
        let mut w = csv_writer(&out, "szego_values.csv")?;
        w.write_record(["j", "g_inf", "log_g_inf"]).map_err(io)?;
        for j in 1..=g.m() {
            let v = g.at_infinity(j);
            w.write_record([j.to_string(), sci(v), sci(v.ln())]).map_err(io)?;
        }
        w.flush().map_err(io)?;
        let last = g.distances.last().copied().unwrap_or(0.0);
        Ok(vec![
            Gate::new("szego-fixed-point", "fixed_point_distance", last, tol_fp),
            Gate::new("szego-fixed-point", "boundary_residual", residual, BOUNDARY_GATE),
        ])
    }

    fn solve_ray(&mut self) -> Result<Vec<HPSolution>> {
        let ray = self.cfg.ray_spec()?;
        let opts = self.hp_options();
        let ks = self.cfg.k_list.clone();
        let system = self.system()?;
        ks.iter()
            .map(|&k| hp_solve_with(system, &MultiIndex::new(ray.multi_index(k)?)?, &opts))
            .collect()
    }

    pub fn hp_solve(&mut self) -> Result<Vec<Gate>> {
        let sols = self.solve_ray()?;
        let points = self.points();
        let out = self.out.clone();
        let mut wc = csv_writer(&out, "hp_coefficients.csv")?;
        wc.write_record(["k", "n", "j", "index", "coefficient"]).map_err(io)?;
        let mut wr = csv_writer(&out, "hp_residuals.csv")?;
        wr.write_record(["k", "n", "j", "orthogonality", "laurent_vanishing", "laurent_leading", "formrec"])
            .map_err(io)?;
        let (mut ortho, mut laurent, mut formrec) = (0.0f64, 0.0f64, 0.0f64);
        for (sol, &k) in sols.iter().zip(&self.cfg.k_list) {
            let n = sol.multi_index.to_string();
            for (j, a) in sol.a.iter().enumerate() {
                for (i, c) in a.coeffs.iter().enumerate() {
                    wc.write_record([k.to_string(), n.clone(), j.to_string(), i.to_string(), sci(*c)])
                        .map_err(io)?;
                }
            }
            for j in 0..sol.m() {
                let o = sol.orthogonality_residual(j)?;
                let l = sol.laurent_orders(j)?;
                let mut f = 0.0f64;
                for &z in &points {
                    f = f.max(sol.formrec_residual(j, z)?);
                }
                ortho = ortho.max(o);
                laurent = laurent.max(l.vanishing);
                formrec = formrec.max(f);
                wr.write_record([
                    k.to_string(),
                    n.clone(),
                    j.to_string(),
                    sci(o),
                    sci(l.vanishing),
                    sci(l.leading),
                    sci(f),
                ])
                .map_err(io)?;
            }
        }
        wc.flush().map_err(io)?;
        wr.flush().map_err(io)?;
        Ok(vec![
            Gate::new("hp-solve", "orthogonality_residual", ortho, ORTHOGONALITY_GATE),
            Gate::new("hp-solve", "laurent_vanishing", laurent, ORTHOGONALITY_GATE),
            Gate::new("hp-solve", "formrec_residual", formrec, FORMREC_GATE),
        ])
    }

    pub fn verify(&mut self) -> Result<Vec<Gate>> {
        let points = self.points();
        let ray = self.cfg.ray_spec()?;
        let opts = SweepOptions {
            hp: self.hp_options(),
            limits: LimitOptions {
                equilibrium: self.eq_options(),
                fp_tol: self.cfg.tol_fp,
                szego_grid: self.cfg.grid_szego,
                ..Default::default()
            },
            ..Default::default()
        };
        let ks = self.cfg.k_list.clone();
        let out = self.out.clone();
        let rows = convergence_sweep(self.system()?, &ray, &ks, &points, &opts)?;
        let f = File::create(out.join("sweep.csv")).map_err(io)?;
        write_csv(&rows, &ray, BufWriter::new(f))?;

        let mut w = csv_writer(&out, "trends.csv")?;
        w.write_record(["check", "j", "point", "first", "last", "eventually_decreasing"])
            .map_err(io)?;
        let (mut broken, mut worst_main, mut worst_form) = (0usize, 0.0f64, 0.0f64);
        for ((check, j, point), v) in deviation_series(&rows) {
            let ok = eventually_decreasing(&v, 0.1, DEVIATION_FLOOR);
            let last = *v.last().unwrap_or(&0.0);
            broken += usize::from(!ok);
            match check {
                CheckKind::Form | CheckKind::Rate => worst_form = worst_form.max(last),
                _ => worst_main = worst_main.max(last),
            }
            let row = [
                check.name().to_string(),
                j.to_string(),
                point.to_string(),
                sci(v[0]),
                sci(last),
                ok.to_string(),
            ];
            w.write_record(&row).map_err(io)?;
        }
        w.flush().map_err(io)?;
        Ok(vec![
            Gate::new("verify", "series_not_decreasing", broken as f64, 0.0),
            Gate::new("verify", "final_rel_dev_limits", worst_main, TREND_FINAL_GATE),
            Gate::new("verify", "final_rel_dev_forms", worst_form, FORM_FINAL_GATE),
        ])
    }

    pub fn biorthogonal(&mut self) -> Result<Vec<Gate>> {
        let n_max = BIORTHOGONAL_MAX_DEGREE.min(self.cfg.max_degree);
        let opts = self.hp_options();
        let out = self.out.clone();
        let rows = biorthogonal_cross_check(self.system()?, n_max, &opts)?;
        let mut w = csv_writer(&out, "biorthogonal.csv")?;
        w.write_record(["n", "c_n", "q_dev", "p_dev", "residual"]).map_err(io)?;
        let (mut coeff, mut resid) = (0.0f64, 0.0f64);
        for r in &rows {
            coeff = coeff.max(r.q_dev).max(r.p_dev);
            resid = resid.max(r.residual);
            w.write_record([r.n.to_string(), sci(r.c_n), sci(r.q_dev), sci(r.p_dev), sci(r.residual)])
                .map_err(io)?;
        }
        w.flush().map_err(io)?;
        Ok(vec![
            Gate::new("biorthogonal", "coefficient_gap", coeff, BIORTHOGONAL_COEFF_GATE),
            Gate::new("biorthogonal", "biorthogonality_residual", resid, BIORTHOGONAL_RESIDUAL_GATE),
        ])
    }
}

pub fn write_gates(dir: &Path, gates: &[Gate]) -> Result<()> {
    let mut w = csv_writer(dir, "gates.csv")?;
    w.write_record(["command", "gate", "value", "threshold", "pass"]).map_err(io)?;
    for g in gates {
        w.write_record([
            g.command.to_string(),
            g.name.clone(),
            sci(g.value),
            sci(g.threshold),
            g.passed().to_string(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(io)
}
