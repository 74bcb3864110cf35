//! Command line front end of the `nikishin` binary.
//!
//! Exit codes: 0 all gates pass, 1 a residual gate failed, 2 usage error,
//! 3 schema error in the configuration, 4 io error, 5 numerical failure.

pub mod commands;
pub mod config;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, ValueEnum};
use num_complex::Complex64;

use crate::error::Error;

pub use commands::{Context, Gate};
pub use config::{parse_config, parse_config_str, MeasureConfig, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_GATE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_SCHEMA: i32 = 3;
pub const EXIT_IO: i32 = 4;
pub const EXIT_NUMERICAL: i32 = 5;

/// Environment variable fixing the worker thread count.
pub const THREADS_ENV: &str = "NIKISHIN_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Equilibrium,
    SzegoFixedPoint,
    HpSolve,
    Verify,
    Biorthogonal,
    All,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Equilibrium => "equilibrium",
            Command::SzegoFixedPoint => "szego-fixed-point",
            Command::HpSolve => "hp-solve",
            Command::Verify => "verify",
            Command::Biorthogonal => "biorthogonal",
            Command::All => "all",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "nikishin", version, about = "Hermite-Pade polynomials of Nikishin systems")]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// TOML run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory (overrides `out` in the configuration).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub tol_eq: Option<f64>,
    #[arg(long)]
    pub tol_fp: Option<f64>,
    /// Grid size for both the equilibrium and the Szego boundary functions.
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long)]
    pub max_degree: Option<usize>,
    /// Test points, e.g. "4+1i, 1.5, -0.5-2i".
    #[arg(long)]
    pub points: Option<String>,
}

pub fn parse_points(s: &str) -> Result<Vec<Complex64>, String> {
    s.split(|c: char| c == ',' || c == ';' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| Complex64::from_str(t).map_err(|_| format!("cannot parse test point {t:?}")))
        .collect()
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Schema(_) => EXIT_SCHEMA,
        Error::Io(_) => EXIT_IO,
        _ => EXIT_NUMERICAL,
    }
}

fn apply_overrides(cfg: &mut RunConfig, cli: &Cli) -> Result<(), String> {
    if let Some(o) = &cli.out {
        cfg.out = o.clone();
    }
    if let Some(t) = cli.tol_eq {
        cfg.tol_eq = t;
    }
    if let Some(t) = cli.tol_fp {
        cfg.tol_fp = t;
    }
    if let Some(g) = cli.grid {
        cfg.grid_eq = g;
        cfg.grid_szego = g;
    }
    if let Some(d) = cli.max_degree {
        cfg.max_degree = d;
        cfg.k_list.retain(|&k| k <= d);
    }
    if let Some(p) = &cli.points {
        cfg.points = Some(parse_points(p)?);
    }
    Ok(())
}

fn configure_threads() -> Result<Option<usize>, String> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(None);
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("{THREADS_ENV} must be a positive integer, got {v:?}"))?;
    // a pool built earlier in this process wins
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(Some(n))
}

fn write_metadata(cli: &Cli, cfg: &RunConfig, gates: &[Gate], threads: Option<usize>) -> Result<(), Error> {
    let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let mut s = String::new();
    s.push_str(&format!("version = \"{}\"\n", env!("CARGO_PKG_VERSION")));
    s.push_str(&format!("command = \"{}\"\n", cli.command.name()));
    s.push_str(&format!("config = {:?}\n", cli.config.display().to_string()));
    s.push_str(&format!("unix_time = {secs}\n"));
    s.push_str(&format!("threads = {}\n", threads.unwrap_or_else(rayon::current_num_threads)));
    s.push_str(&format!("m = {}\n", cfg.m()));
    s.push_str(&format!("k_list = {:?}\n", cfg.k_list));
    s.push_str(&format!("gates_passed = {}\n", gates.iter().all(Gate::passed)));
    std::fs::write(cfg.out.join("metadata.toml"), s).map_err(|e| Error::Io(e.to_string()))
}

fn execute(cli: &Cli, cfg: &RunConfig) -> Result<Vec<Gate>, Error> {
    std::fs::create_dir_all(&cfg.out).map_err(|e| Error::Io(format!("{}: {e}", cfg.out.display())))?;
    let needs_pair = matches!(cli.command, Command::Biorthogonal);
    if needs_pair && cfg.m() < 2 {
        return Err(Error::Schema(vec!["biorthogonal needs at least two measures".into()]));
    }
    let mut ctx = Context::new(cfg, cfg.out.clone());
    let mut gates = Vec::new();
    let all = cli.command == Command::All;
    if all || cli.command == Command::Equilibrium {
        gates.extend(ctx.equilibrium()?);
    }
    if all || cli.command == Command::SzegoFixedPoint {
        gates.extend(ctx.szego_fixed_point()?);
    }
    if all || cli.command == Command::HpSolve {
        gates.extend(ctx.hp_solve()?);
    }
    if all || cli.command == Command::Verify {
        gates.extend(ctx.verify()?);
    }
    if needs_pair || (all && cfg.m() >= 2) {
        gates.extend(ctx.biorthogonal()?);
    }
    commands::write_gates(&cfg.out, &gates)?;
    Ok(gates)
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let threads = match configure_threads() {
        Ok(t) => t,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
    };
    let mut cfg = match parse_config(&cli.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    if let Err(msg) = apply_overrides(&mut cfg, &cli) {
        eprintln!("error: {msg}");
        return EXIT_USAGE;
    }
    if let Err(e) = cfg.validate() {
        eprintln!("error: {e}");
        return exit_code(&e);
    }
    let gates = match execute(&cli, &cfg) {
        Ok(g) => g,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    let mut stdout = std::io::stdout().lock();
    for g in &gates {
        let verdict = if g.passed() { "pass" } else { "FAIL" };
        let _ = writeln!(
            stdout,
            "{:<18} {:<26} {:.3e} <= {:.1e}  {verdict}",
            g.command, g.name, g.value, g.threshold
        );
    }
    if let Err(e) = write_metadata(&cli, &cfg, &gates, threads) {
        eprintln!("error: {e}");
        return exit_code(&e);
    }
    if gates.iter().all(Gate::passed) {
        EXIT_OK
    } else {
        EXIT_GATE
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_lists() {
        let p = parse_points("4+1i, 1.5;-0.5-2i").unwrap();
        assert_eq!(
            p,
            vec![Complex64::new(4.0, 1.0), Complex64::new(1.5, 0.0), Complex64::new(-0.5, -2.0)]
        );
        assert!(parse_points("4+x").is_err());
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run(["nikishin", "frobnicate", "--config", "x.toml"]), EXIT_USAGE);
        assert_eq!(run(["nikishin", "verify"]), EXIT_USAGE);
    }

    #[test]
    fn missing_config_is_io() {
        assert_eq!(run(["nikishin", "verify", "--config", "/nonexistent/cfg.toml"]), EXIT_IO);
    }

    #[test]
    fn error_classes() {
        assert_eq!(exit_code(&Error::Schema(vec![])), EXIT_SCHEMA);
        assert_eq!(exit_code(&Error::Io(String::new())), EXIT_IO);
        assert_eq!(exit_code(&Error::BimomentSingular(3)), EXIT_NUMERICAL);
    }
}
