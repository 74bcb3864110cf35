//! Run configuration: TOML text, validated into a `RunConfig`.
//!
//! ```toml
//! out = "out/demo2"
//!
//! [[measure]]
//! interval = [-1.0, 1.0]
//! alpha = -0.5          # exponent of (b - x)
//! beta = -0.5           # exponent of (x - a)
//! modifier = [1.0]      # Chebyshev coefficients of the smooth factor, optional
//!
//! [[measure]]
//! interval = [2.0, 3.0]
//!
//! [ray]
//! p = [0.5, 0.5]
//! k = [4, 8, 12]
//!
//! [tolerances]
//! equilibrium = 1e-13
//! fixed_point = 1e-12
//! max_degree = 24
//!
//! [grid]
//! equilibrium = 256
//! szego = 256
//! nodes = 192
//!
//! [points]
//! z = [[4.0, 1.0], [1.5, 0.0]]
//! ```

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Deserialize;
use toml::Spanned;

use crate::equilibrium::RaySpec;
use crate::error::{Error, Result};
use crate::hermitepade::DEFAULT_MAX_DEGREE;
use crate::measures::{Interval, MeasureSpec, NikishinSystem, DEFAULT_NODES};
use crate::numerics::ChebSeries;
use crate::szego::DEFAULT_GRID;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    out: Option<Spanned<String>>,
    #[serde(default)]
    measure: Vec<Spanned<RawMeasure>>,
    ray: Option<RawRay>,
    tolerances: Option<RawTolerances>,
    grid: Option<RawGrid>,
    points: Option<RawPoints>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMeasure {
    interval: Spanned<Vec<f64>>,
    alpha: Option<Spanned<f64>>,
    beta: Option<Spanned<f64>>,
    modifier: Option<Spanned<Vec<f64>>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRay {
    p: Option<Spanned<Vec<f64>>>,
    k: Option<Spanned<Vec<i64>>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTolerances {
    equilibrium: Option<Spanned<f64>>,
    fixed_point: Option<Spanned<f64>>,
    max_degree: Option<Spanned<i64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    equilibrium: Option<Spanned<i64>>,
    szego: Option<Spanned<i64>>,
    nodes: Option<Spanned<i64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPoints {
    z: Spanned<Vec<Vec<f64>>>,
}

/// One generating measure `(b-x)^alpha (x-a)^beta g(x) dx`, normalized to mass one.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureConfig {
    pub interval: Interval,
    pub alpha: f64,
    pub beta: f64,
    pub modifier: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub measures: Vec<MeasureConfig>,
    pub ray: Vec<f64>,
    pub k_list: Vec<usize>,
    pub tol_eq: f64,
    pub tol_fp: f64,
    pub max_degree: usize,
    pub grid_eq: usize,
    pub grid_szego: usize,
    pub nodes: usize,
    /// Test points; `None` selects the default layout.
    pub points: Option<Vec<Complex64>>,
    pub out: PathBuf,
}

pub const DEFAULT_TOL_EQ: f64 = 1e-13;
pub const DEFAULT_TOL_FP: f64 = 1e-12;

impl RunConfig {
    pub fn m(&self) -> usize {
        self.measures.len()
    }

    pub fn intervals(&self) -> Vec<Interval> {
        self.measures.iter().map(|g| g.interval).collect()
    }

    pub fn system(&self) -> Result<NikishinSystem> {
        let specs = self
            .measures
            .iter()
            .map(|g| {
                let iv = g.interval;
                MeasureSpec::new(iv, g.alpha, g.beta, ChebSeries::new(iv.a, iv.b, g.modifier.clone())?, true)
            })
            .collect::<Result<Vec<_>>>()?;
        NikishinSystem::with_nodes(specs, self.nodes)
    }

    pub fn ray_spec(&self) -> Result<RaySpec> {
        RaySpec::new(self.ray.clone())
    }

    /// Checks that do not depend on where the values came from; rerun after
    /// command line overrides.
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        if !(self.tol_eq > 0.0) {
            errs.push(format!("equilibrium tolerance must be positive, got {}", self.tol_eq));
        }
        if !(self.tol_fp > 0.0) {
            errs.push(format!("fixed point tolerance must be positive, got {}", self.tol_fp));
        }
        if self.max_degree == 0 || self.max_degree > DEFAULT_MAX_DEGREE {
            errs.push(format!("max_degree must lie in 1..={DEFAULT_MAX_DEGREE}, got {}", self.max_degree));
        }
        if self.grid_eq < 8 || self.grid_szego < 8 {
            errs.push(format!(
                "grid sizes must be at least 8, got {} and {}",
                self.grid_eq, self.grid_szego
            ));
        }
        if let Some(&k) = self.k_list.iter().find(|&&k| k > self.max_degree) {
            errs.push(format!("k = {k} exceeds max_degree {}", self.max_degree));
        }
        if let Some(pts) = &self.points {
            for z in pts {
                if let Some(iv) = self.intervals().iter().find(|iv| iv.contains(*z)) {
                    errs.push(format!("test point {z} lies on {iv}"));
                }
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Schema(errs))
        }
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].bytes().filter(|&b| b == b'\n').count() + 1
}

struct Errors<'a> {
    text: &'a str,
    list: Vec<String>,
}

impl Errors<'_> {
    fn at<T>(&mut self, s: &Spanned<T>, msg: impl AsRef<str>) {
        self.list
            .push(format!("line {}: {}", line_of(self.text, s.span().start), msg.as_ref()));
    }

    fn plain(&mut self, msg: impl Into<String>) {
        self.list.push(msg.into());
    }
}

fn positive_count(errs: &mut Errors, v: &Option<Spanned<i64>>, name: &str, default: usize) -> usize {
    match v {
        None => default,
        Some(s) if *s.get_ref() > 0 => *s.get_ref() as usize,
        Some(s) => {
            errs.at(s, format!("{name} must be positive, got {}", s.get_ref()));
            default
        }
    }
}

fn positive_real(errs: &mut Errors, v: &Option<Spanned<f64>>, name: &str, default: f64) -> f64 {
    match v {
        None => default,
        Some(s) if *s.get_ref() > 0.0 && s.get_ref().is_finite() => *s.get_ref(),
        Some(s) => {
            errs.at(s, format!("{name} must be positive, got {}", s.get_ref()));
            default
        }
    }
}

/// Every `k p_j` is an integer.
fn realizable(p: &[f64], k: usize) -> bool {
    p.iter().all(|&pj| {
        let v = pj * k as f64;
        (v - v.round()).abs() <= 1e-9 * k as f64
    })
}

pub fn parse_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_config_str(&text)
}

pub fn parse_config_str(text: &str) -> Result<RunConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let line = e.span().map(|s| line_of(text, s.start)).unwrap_or(0);
        Error::Schema(vec![format!("line {line}: {}", e.message())])
    })?;
    let mut errs = Errors { text, list: Vec::new() };

    if raw.measure.is_empty() {
        errs.plain("at least one [[measure]] is required");
    }
    let mut measures: Vec<(MeasureConfig, usize)> = Vec::new();
    for (i, sm) in raw.measure.iter().enumerate() {
        let g = sm.get_ref();
        let ends = g.interval.get_ref();
        let line = line_of(text, sm.span().start);
        let interval = if ends.len() != 2 {
            errs.at(
                &g.interval,
                format!("measure {}: interval needs two endpoints, got {}", i + 1, ends.len()),
            );
            None
        } else {
            match Interval::new(ends[0], ends[1]) {
                Ok(iv) => Some(iv),
                Err(e) => {
                    errs.at(&g.interval, format!("measure {}: {e}", i + 1));
                    None
                }
            }
        };
        let mut exponent = |v: &Option<Spanned<f64>>, name: &str| -> f64 {
            match v {
                None => -0.5,
                Some(s) if *s.get_ref() > -1.0 && s.get_ref().is_finite() => *s.get_ref(),
                Some(s) => {
                    errs.at(s, format!("measure {}: {name} must exceed -1, got {}", i + 1, s.get_ref()));
                    -0.5
                }
            }
        };
        let alpha = exponent(&g.alpha, "alpha");
        let beta = exponent(&g.beta, "beta");
        let modifier = match &g.modifier {
            None => vec![1.0],
            Some(s) if s.get_ref().is_empty() => {
                errs.at(s, format!("measure {}: modifier has no coefficients", i + 1));
                vec![1.0]
            }
            Some(s) => s.get_ref().clone(),
        };
        if let Some(iv) = interval {
            let mc = MeasureConfig {
                interval: iv,
                alpha,
                beta,
                modifier,
            };
            if let Some(sm_mod) = &g.modifier {
                let ok = ChebSeries::new(iv.a, iv.b, mc.modifier.clone()).and_then(|c| MeasureSpec::new(iv, mc.alpha, mc.beta, c, true));
                if let Err(e) = ok {
                    errs.at(sm_mod, format!("measure {}: {e}", i + 1));
                }
            }
            measures.push((mc, line));
        }
    }
    for w in measures.windows(2) {
        let (a, la) = (&w[0].0.interval, w[0].1);
        let (b, lb) = (&w[1].0.interval, w[1].1);
        if a.overlaps(b) {
            errs.plain(format!("lines {la} and {lb}: intervals {a} and {b} overlap"));
        } else if b.a <= a.b {
            errs.plain(format!("lines {la} and {lb}: intervals {a} and {b} are not in increasing order"));
        }
    }
    let m = raw.measure.len();

    let (p, p_span) = match raw.ray.as_ref().and_then(|r| r.p.as_ref()) {
        Some(s) => (s.get_ref().clone(), Some(s)),
        None => (vec![1.0 / m.max(1) as f64; m], None),
    };
    let mut ray_ok = true;
    if let Some(s) = p_span {
        let mut ray_err = |msg: String| {
            errs.at(s, msg);
            ray_ok = false;
        };
        if p.len() != m {
            ray_err(format!("ray has {} entries for {m} measures", p.len()));
        }
        if p.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            ray_err("ray entries must be nonnegative".into());
        }
        if p.windows(2).any(|w| w[1] > w[0]) {
            ray_err("ray not nonincreasing".into());
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            ray_err(format!("ray entries sum to {sum}, expected 1"));
        }
    }

    let tol = raw.tolerances.as_ref();
    let tol_eq = positive_real(
        &mut errs,
        &tol.and_then(|t| t.equilibrium.clone()),
        "equilibrium tolerance",
        DEFAULT_TOL_EQ,
    );
    let tol_fp = positive_real(
        &mut errs,
        &tol.and_then(|t| t.fixed_point.clone()),
        "fixed point tolerance",
        DEFAULT_TOL_FP,
    );
    let max_degree = positive_count(&mut errs, &tol.and_then(|t| t.max_degree.clone()), "max_degree", DEFAULT_MAX_DEGREE);
    let grid = raw.grid.as_ref();
    let grid_eq = positive_count(
        &mut errs,
        &grid.and_then(|g| g.equilibrium.clone()),
        "equilibrium grid",
        DEFAULT_GRID,
    );
    let grid_szego = positive_count(&mut errs, &grid.and_then(|g| g.szego.clone()), "szego grid", DEFAULT_GRID);
    let nodes = positive_count(&mut errs, &grid.and_then(|g| g.nodes.clone()), "nodes", DEFAULT_NODES);

    let k_list = match raw.ray.as_ref().and_then(|r| r.k.as_ref()) {
        None if ray_ok => (2..=max_degree).filter(|&k| realizable(&p, k)).collect(),
        None => Vec::new(),
        Some(s) => {
            let mut out = Vec::new();
            for &k in s.get_ref() {
                if k <= 0 {
                    errs.at(s, format!("k = {k} must be positive"));
                } else if ray_ok && !realizable(&p, k as usize) {
                    errs.at(s, format!("k = {k} does not give integer indices on the ray"));
                } else {
                    out.push(k as usize);
                }
            }
            if out.windows(2).any(|w| w[1] <= w[0]) {
                errs.at(s, "k values must be strictly increasing");
            }
            out
        }
    };

    let points = raw.points.as_ref().map(|pts| {
        let mut zs = Vec::new();
        for v in pts.z.get_ref() {
            match v.as_slice() {
                [re] => zs.push(Complex64::new(*re, 0.0)),
                [re, im] => zs.push(Complex64::new(*re, *im)),
                _ => errs.at(&pts.z, format!("test point {v:?} must be [re] or [re, im]")),
            }
        }
        zs
    });
    let out = raw
        .out
        .as_ref()
        .map(|s| PathBuf::from(s.get_ref()))
        .unwrap_or_else(|| PathBuf::from("out"));

    let cfg = RunConfig {
        measures: measures.into_iter().map(|(g, _)| g).collect(),
        ray: p,
        k_list,
        tol_eq,
        tol_fp,
        max_degree,
        grid_eq,
        grid_szego,
        nodes,
        points,
        out,
    };
    if cfg.measures.len() == m {
        if let Err(Error::Schema(more)) = cfg.validate() {
            errs.list.extend(more);
        }
    }
    if errs.list.is_empty() {
        Ok(cfg)
    } else {
        Err(Error::Schema(errs.list))
    }
}
