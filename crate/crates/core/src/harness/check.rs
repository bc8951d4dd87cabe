//! Quick invariant suite behind `polystokes check`.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::{hydrostatic_gradient, run_experiment, write_csv, Experiment, ExperimentSpec};
use crate::error::Result;
use crate::mesh::{build_paper_mesh, check_shape_regularity, parse_mesh, subtriangulate, write_mesh};
use crate::polybasis::monomials::vector_dim;
use crate::stokes::{error_velocity, solve_problem, Discretization, RhsMode, StokesProblem};

/// Outcome of one invariant.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn result(name: &'static str, value: f64, bound: f64) -> CheckResult {
    CheckResult { name, passed: value <= bound, detail: format!("{value:.3e} (bound {bound:.1e})") }
}

fn published_counts() -> Result<CheckResult> {
    let n: Vec<usize> =
        (0..2).map(|l| Discretization::new(build_paper_mesh(l), 2, None).map(|d| d.ndof())).collect::<Result<_>>()?;
    Ok(CheckResult { name: "ndof of published meshes", passed: n == [177, 763], detail: format!("{n:?}") })
}

fn shape_and_subtriangulation() -> Result<CheckResult> {
    let mut worst = 0.0f64;
    let mut gamma = f64::INFINITY;
    for level in 0..=2 {
        let mesh = build_paper_mesh(level);
        let report = check_shape_regularity(&mesh);
        gamma = gamma.min(report.min_gamma1()).min(report.min_gamma2());
        for c in 0..mesh.num_cells() {
            let sub = subtriangulate(&mesh, c)?;
            let area: f64 = sub.areas().iter().sum();
            worst = worst.max((area - mesh.geometry(c).area).abs() / mesh.geometry(c).area);
        }
    }
    Ok(CheckResult {
        name: "subtriangulations partition the cells",
        passed: worst <= 1e-13 && gamma > 0.0,
        detail: format!("area defect {worst:.3e}, min shape ratio {gamma:.3}"),
    })
}

fn projectors() -> Result<(CheckResult, CheckResult)> {
    let disc = Discretization::new(build_paper_mesh(1), 2, None)?;
    let n = vector_dim(2);
    let (worst, poincare) = disc
        .spaces
        .par_iter()
        .map(|s| -> Result<(f64, f64)> {
            let dofs = s.polynomial_dofs();
            let id = DMatrix::<f64>::identity(n, n);
            let err = (s.gradient_projector() * dofs - &id).amax();
            let pi = (s.l2_projector(2, true)? * dofs - id).amax();
            Ok((err.max(pi), s.poincare_constant()))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold((0.0f64, 0.0f64), |a, b| (a.0.max(b.0), a.1.max(b.1)));
    Ok((result("projectors reproduce P2", worst, 1e-11), result("Poincare constants", poincare, 10.0)))
}

fn reconstruction() -> Result<CheckResult> {
    let disc = Discretization::new(build_paper_mesh(1), 2, None)?;
    let mut worst = 0.0f64;
    for m in 0..=1 {
        let recs = disc.reconstructions(m)?;
        for (c, (s, r)) in disc.spaces.iter().zip(recs.iter()).enumerate() {
            let v = DVector::from_fn(s.ndof(), |i, _| ((i + 7 * c) as f64 * 0.754_877_666).sin());
            let w = r.apply(&v);
            let div = s.divergence_from_dofs(&v);
            let frame = s.domain.frame;
            for t in 0..r.rt.triangles.len() {
                let got = r.rt.divergence_coefficients(&w, t);
                let want = r.rt.project_scalar(t, |x| frame.eval_poly(1, div.as_slice(), x));
                worst = worst.max((got - want).amax());
            }
        }
    }
    Ok(result("reconstruction preserves the divergence", worst, 1e-10))
}

fn hydrostatic() -> Result<CheckResult> {
    let disc = Discretization::new(build_paper_mesh(0), 2, None)?;
    let mut worst = 0.0f64;
    for mode in [RhsMode::Prvem1, RhsMode::Prvem0] {
        for nu in [1.0, 1e-6] {
            let problem = StokesProblem {
                nu,
                force: std::sync::Arc::new(hydrostatic_gradient),
                dirichlet: std::sync::Arc::new(|_| [0.0, 0.0]),
                exact: None,
            };
            let sol = solve_problem(&disc, &problem, mode)?;
            worst = worst.max(nu * error_velocity(&disc, &sol.velocity, &|_| [[0.0; 2]; 2]));
        }
    }
    Ok(result("hydrostatic flow is resolved exactly", worst, 1e-10))
}

fn round_trips() -> Result<CheckResult> {
    let mesh = build_paper_mesh(1);
    let text = write_mesh(&mesh);
    let back = parse_mesh(&text)?;
    let mesh_ok = back.vertices() == mesh.vertices() && back.cells() == mesh.cells() && write_mesh(&back) == text;
    let mut spec = ExperimentSpec::new(Experiment::PotFlow2);
    spec.levels = vec![0];
    spec.nus = vec![1e-2];
    let csv = || -> Result<Vec<u8>> {
        let mut out = Vec::new();
        write_csv(&run_experiment(&spec)?, &mut out, std::path::Path::new("<memory>"))?;
        Ok(out)
    };
    let csv_ok = csv()? == csv()?;
    Ok(CheckResult {
        name: "mesh and CSV round trips",
        passed: mesh_ok && csv_ok,
        detail: format!("mesh identical: {mesh_ok}, CSV identical: {csv_ok}"),
    })
}

/// Runs all checks; errors abort the suite.
pub fn run_checks() -> Result<Vec<CheckResult>> {
    let (proj, poincare) = projectors()?;
    Ok(vec![
        published_counts()?,
        shape_and_subtriangulation()?,
        proj,
        poincare,
        reconstruction()?,
        hydrostatic()?,
        round_trips()?,
    ])
}
