//! Experiment runner: exact data of the benchmark problems, error tables,
//! convergence rates and CSV output.

pub mod check;
mod experiments;

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

pub use experiments::{
    hydrostatic_gradient, hydrostatic_pressure, vorticity_gradient, vorticity_laplacian, vorticity_pressure_gradient,
    vorticity_velocity, Experiment,
};

use crate::error::{Error, Result};
use crate::mesh::{build_paper_mesh, load_mesh, PolygonalMesh};
use crate::stokes::{error_pressure, error_velocity, solve_problem, Discretization, RhsMode};

pub const CSV_HEADER: [&str; 10] =
    ["experiment", "mode", "nu", "level", "ndof", "err_vel", "rate_vel", "err_p", "rate_p", "seconds"];

/// What to run.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub experiment: Experiment,
    pub k: usize,
    pub modes: Vec<RhsMode>,
    pub nus: Vec<f64>,
    pub levels: Vec<usize>,
    /// Overrides the quadrature exactness degree.
    pub exactness: Option<usize>,
    /// Use this mesh instead of the generated family; `levels` is ignored.
    pub mesh_file: Option<PathBuf>,
    /// Fill the `seconds` column. Off by default so that output is reproducible.
    pub record_timing: bool,
}

impl ExperimentSpec {
    /// Default grid of an experiment with `k = 2` and all four modes.
    pub fn new(experiment: Experiment) -> Self {
        Self {
            experiment,
            k: 2,
            modes: RhsMode::ALL.to_vec(),
            nus: experiment.default_viscosities(),
            levels: experiment.default_levels(),
            exactness: None,
            mesh_file: None,
            record_timing: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        if self.k < 2 {
            return bad(format!("k must be at least 2, got {}", self.k));
        }
        if self.modes.is_empty() {
            return bad("no modes given".into());
        }
        if self.nus.is_empty() {
            return bad("no viscosities given".into());
        }
        if let Some(nu) = self.nus.iter().find(|nu| !(**nu > 0.0 && nu.is_finite())) {
            return bad(format!("viscosity must be positive, got {nu}"));
        }
        if self.levels.is_empty() && self.mesh_file.is_none() {
            return bad("no mesh levels given".into());
        }
        if let Some(&l) = self.levels.iter().find(|&&l| l > 8) {
            return bad(format!("level {l} is too fine"));
        }
        Ok(())
    }
}

/// One line of the result table.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub experiment: Experiment,
    pub mode: RhsMode,
    pub nu: f64,
    pub level: usize,
    pub ndof: usize,
    pub err_vel: f64,
    pub rate_vel: Option<f64>,
    pub err_p: f64,
    pub rate_p: Option<f64>,
    pub seconds: Option<f64>,
}

/// Parses `a..b` (inclusive), `a..=b`, `a,b,c` or a single level.
pub fn parse_levels(s: &str) -> Result<Vec<usize>> {
    let bad = || Error::InvalidSpec(format!("cannot parse levels '{s}'"));
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
    let s = s.trim();
    if let Some((a, b)) = s.split_once("..") {
        let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
        if a > b {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    s.split(',').map(num).collect()
}

/// Comma-separated list of parseable items.
pub fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse::<T>().map_err(|_| Error::InvalidSpec(format!("cannot parse {what} '{t}'"))))
        .collect()
}

fn meshes(spec: &ExperimentSpec) -> Result<Vec<PolygonalMesh>> {
    match &spec.mesh_file {
        Some(path) => Ok(vec![load_mesh(path)?]),
        None => Ok(spec.levels.iter().map(|&l| build_paper_mesh(l)).collect()),
    }
}

/// Runs every (mode, viscosity, level) combination and returns the rows
/// grouped by mode, then viscosity, then level, with rates filled in.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<ResultRow>> {
    spec.validate()?;
    let pairs: Vec<(RhsMode, f64)> =
        spec.modes.iter().flat_map(|&m| spec.nus.iter().map(move |&nu| (m, nu))).collect();
    let mut rows = Vec::new();
    for mesh in meshes(spec)? {
        let level = mesh.level();
        let disc = Discretization::new(mesh, spec.k, spec.exactness)?;
        let ndof = disc.ndof();
        let results = pairs
            .par_iter()
            .map(|&(mode, nu)| {
                let start = Instant::now();
                let problem = spec.experiment.problem(nu);
                let sol = solve_problem(&disc, &problem, mode)?;
                let exact = problem.exact.as_ref().expect("benchmark problems carry their solution");
                let err_vel = error_velocity(&disc, &sol.velocity, &*exact.gradient);
                let err_p = error_pressure(&disc, &sol.pressure, &*exact.pressure);
                let seconds = spec.record_timing.then(|| start.elapsed().as_secs_f64());
                Ok(ResultRow {
                    experiment: spec.experiment,
                    mode,
                    nu,
                    level,
                    ndof,
                    err_vel,
                    rate_vel: None,
                    err_p,
                    rate_p: None,
                    seconds,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.extend(results);
    }
    // stable: levels keep their run order inside each group
    let key = |r: &ResultRow| {
        (
            spec.modes.iter().position(|&m| m == r.mode).unwrap_or(usize::MAX),
            spec.nus.iter().position(|&n| n == r.nu).unwrap_or(usize::MAX),
        )
    };
    rows.sort_by_key(key);
    compute_rates(&mut rows);
    Ok(rows)
}

fn rate(e0: f64, e1: f64, n0: usize, n1: usize) -> Option<f64> {
    let r = (e0 / e1).ln() / (n1 as f64 / n0 as f64).sqrt().ln();
    r.is_finite().then_some(r)
}

/// Fills `rate_vel` and `rate_p` from consecutive rows of the same
/// experiment, mode and viscosity.
pub fn compute_rates(rows: &mut [ResultRow]) {
    for i in 0..rows.len() {
        let prev = i
            .checked_sub(1)
            .map(|j| &rows[j])
            .filter(|p| p.experiment == rows[i].experiment && p.mode == rows[i].mode && p.nu == rows[i].nu)
            .map(|p| (p.err_vel, p.err_p, p.ndof));
        let (rv, rp) = match prev {
            Some((ev, ep, n0)) => {
                let r = &rows[i];
                (rate(ev, r.err_vel, n0, r.ndof), rate(ep, r.err_p, n0, r.ndof))
            }
            None => (None, None),
        };
        rows[i].rate_vel = rv;
        rows[i].rate_p = rp;
    }
}

fn sci(v: f64) -> String {
    format!("{v:.5e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(sci).unwrap_or_default()
}

/// Writes the rows as CSV to any writer.
pub fn write_csv<W: Write>(rows: &[ResultRow], out: W, path: &Path) -> Result<()> {
    let err = |source| Error::Csv { path: path.to_path_buf(), source };
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(err)?;
    for r in rows {
        w.write_record([
            r.experiment.name().to_string(),
            r.mode.name().to_string(),
            sci(r.nu),
            r.level.to_string(),
            r.ndof.to_string(),
            sci(r.err_vel),
            opt(r.rate_vel),
            sci(r.err_p),
            opt(r.rate_p),
            opt(r.seconds),
        ])
        .map_err(err)?;
    }
    w.flush().map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

pub fn emit_csv(rows: &[ResultRow], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    write_csv(rows, file, path)
}
