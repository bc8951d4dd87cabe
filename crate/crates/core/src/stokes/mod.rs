//! Global Stokes problem: assembly with the four load discretizations,
//! boundary values, sparse solve, error norms and consistency dual norms.

mod discretization;
mod dual;
mod errors;
mod system;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

pub use discretization::Discretization;
pub use dual::{consistency_dual_norm, ForceSplit};
pub use errors::{error_pressure, error_velocity, max_divergence};
pub use system::{
    apply_dirichlet, assemble, assemble_with_local_loads, solve, SaddleSystem, StokesSolution, RESIDUAL_TOLERANCE,
};

use crate::error::{Error, Result};
use crate::Point;

pub type VectorField = Arc<dyn Fn(Point) -> [f64; 2] + Send + Sync>;
pub type ScalarField = Arc<dyn Fn(Point) -> f64 + Send + Sync>;
/// Rows are the gradients of the two velocity components.
pub type TensorField = Arc<dyn Fn(Point) -> [[f64; 2]; 2] + Send + Sync>;

/// How the load `int f . v` is discretized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RhsMode {
    /// `int f . pi_{k-2} v`.
    Cvem,
    /// `int f . pi_k v` in the enhanced space.
    Evem,
    /// `int f . I_RT v` with RT order `k-1`.
    Prvem1,
    /// `int f . I_RT v` with RT order 0.
    Prvem0,
}

impl RhsMode {
    pub const ALL: [RhsMode; 4] = [RhsMode::Cvem, RhsMode::Evem, RhsMode::Prvem1, RhsMode::Prvem0];

    pub fn name(self) -> &'static str {
        match self {
            RhsMode::Cvem => "cvem",
            RhsMode::Evem => "evem",
            RhsMode::Prvem1 => "prvem1",
            RhsMode::Prvem0 => "prvem0",
        }
    }

    /// RT order used by the reconstruction modes.
    pub fn reconstruction_order(self, k: usize) -> Option<usize> {
        match self {
            RhsMode::Prvem1 => Some(k - 1),
            RhsMode::Prvem0 => Some(0),
            _ => None,
        }
    }

    pub fn is_pressure_robust(self) -> bool {
        self.reconstruction_order(2).is_some()
    }
}

impl fmt::Display for RhsMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RhsMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RhsMode::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidSpec(format!("unknown mode '{s}'")))
    }
}

/// Exact velocity, velocity gradient and pressure.
#[derive(Clone)]
pub struct ExactSolution {
    pub velocity: VectorField,
    pub gradient: TensorField,
    pub pressure: ScalarField,
}

/// `-nu Laplace u + grad p = f` with `u = g` on the boundary.
#[derive(Clone)]
pub struct StokesProblem {
    pub nu: f64,
    pub force: VectorField,
    pub dirichlet: VectorField,
    pub exact: Option<ExactSolution>,
}

impl fmt::Debug for StokesProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StokesProblem").field("nu", &self.nu).field("exact", &self.exact.is_some()).finish()
    }
}

/// Assembles, applies the boundary values and solves.
pub fn solve_problem(disc: &Discretization, problem: &StokesProblem, mode: RhsMode) -> Result<StokesSolution> {
    let system = assemble(disc, problem.nu, mode, &*problem.force)?;
    let system = apply_dirichlet(disc, system, &*problem.dirichlet);
    solve(&system)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build_paper_mesh;

    fn disc(level: usize) -> Discretization {
        Discretization::new(build_paper_mesh(level), 2, None).unwrap()
    }

    fn hydrostatic_q(x: Point) -> f64 {
        (0..=7).map(|j| x[0].powi(j) * x[1].powi(7 - j)).sum::<f64>() - 761.0 / 1260.0
    }

    fn hydrostatic_f(x: Point) -> [f64; 2] {
        let mut g = [0.0; 2];
        for j in 0..=7i32 {
            if j > 0 {
                g[0] += j as f64 * x[0].powi(j - 1) * x[1].powi(7 - j);
            }
            if j < 7 {
                g[1] += (7 - j) as f64 * x[0].powi(j) * x[1].powi(6 - j);
            }
        }
        g
    }

    #[test]
    fn modes_parse() {
        assert_eq!("PRVEM1".parse::<RhsMode>().unwrap(), RhsMode::Prvem1);
        assert!("rt2".parse::<RhsMode>().is_err());
        assert_eq!(RhsMode::Prvem1.reconstruction_order(3), Some(2));
    }

    #[test]
    fn ndof_matches_published_counts() {
        assert_eq!(disc(0).ndof(), 177);
        assert_eq!(disc(1).ndof(), 763);
    }

    #[test]
    fn zero_load_gives_zero_solution() {
        let d = disc(0);
        for mode in RhsMode::ALL {
            let s = assemble(&d, 1.0, mode, &|_| [0.0, 0.0]).unwrap();
            assert!(s.load.amax() == 0.0);
            let sol = solve(&apply_dirichlet(&d, s, &|_| [0.0, 0.0])).unwrap();
            assert!(sol.velocity.amax() == 0.0 && sol.pressure.amax() == 0.0);
        }
    }

    #[test]
    fn boundary_midpoint_value() {
        let d = disc(0);
        let pts = d.boundary_points();
        let mid = pts.iter().find(|(_, x, c)| *c == 0 && (x[0] - 0.125).abs() < 1e-14 && x[1] == 0.0);
        let (i, x, _) = *mid.expect("midpoint of the first bottom edge");
        let s = assemble(&d, 1.0, RhsMode::Cvem, &|_| [0.0, 0.0]).unwrap();
        let s = apply_dirichlet(&d, s, &|x| [2.0 * x[0], -2.0 * x[1]]);
        assert_eq!(s.fixed[i], Some(0.25));
        assert_eq!(x, [0.125, 0.0]);
    }

    #[test]
    fn hydrostatic_pressure_robust_modes_give_zero_velocity() {
        let d = disc(0);
        for mode in [RhsMode::Prvem1, RhsMode::Prvem0] {
            for nu in [1.0, 1e-4] {
                let sys = apply_dirichlet(&d, assemble(&d, nu, mode, &hydrostatic_f).unwrap(), &|_| [0.0, 0.0]);
                let sol = solve(&sys).unwrap();
                let err = error_velocity(&d, &sol.velocity, &|_| [[0.0; 2]; 2]);
                assert!(nu * err < 1e-12, "{mode} nu={nu}: {err}");
            }
        }
        let sys = apply_dirichlet(&d, assemble(&d, 1.0, RhsMode::Cvem, &hydrostatic_f).unwrap(), &|_| [0.0, 0.0]);
        let sol = solve(&sys).unwrap();
        assert!(error_velocity(&d, &sol.velocity, &|_| [[0.0; 2]; 2]) > 1e-4);
        assert!(max_divergence(&d, &sol.velocity) < 1e-10);
    }

    #[test]
    fn errors_vanish_on_exact_polynomials() {
        let d = disc(1);
        let u = |x: Point| [x[0] * x[0] - x[1], -2.0 * x[0] * x[1] + 1.0];
        let grad = |x: Point| [[2.0 * x[0], -1.0], [-2.0 * x[1], -2.0 * x[0]]];
        let uh = d.interpolate(&u, &|_| 0.0);
        assert!(error_velocity(&d, &uh, &grad) < 1e-12);
        let p = |x: Point| 3.0 * x[0] - x[1] - 1.0;
        let ph = d.project_pressure(&p);
        assert!(error_pressure(&d, &ph, &p) < 1e-13);
    }

    #[test]
    fn potential_flow_is_reproduced_by_the_reconstruction() {
        let d = disc(0);
        let sys = assemble(&d, 1e-4, RhsMode::Prvem1, &|x| [4.0 * x[0], 4.0 * x[1]]).unwrap();
        let sol = solve(&apply_dirichlet(&d, sys, &|x| [2.0 * x[0], -2.0 * x[1]])).unwrap();
        assert!(error_velocity(&d, &sol.velocity, &|_| [[2.0, 0.0], [0.0, -2.0]]) < 1e-10);
        let p = |x: Point| 2.0 * x[0] * x[0] + 2.0 * x[1] * x[1] - 4.0 / 3.0;
        let best = error_pressure(&d, &d.project_pressure(&p), &p);
        assert!((error_pressure(&d, &sol.pressure, &p) - best).abs() < 1e-8);
    }

    #[test]
    fn load_scales_linearly() {
        let d = disc(0);
        for mode in RhsMode::ALL {
            let s1 = solve(&apply_dirichlet(&d, assemble(&d, 0.1, mode, &hydrostatic_f).unwrap(), &|_| [0.0; 2])).unwrap();
            let s3 = solve(&apply_dirichlet(
                &d,
                assemble(&d, 0.1, mode, &|x| {
                    let f = hydrostatic_f(x);
                    [3.0 * f[0], 3.0 * f[1]]
                })
                .unwrap(),
                &|_| [0.0; 2],
            ))
            .unwrap();
            // relative deviation of the pair (u_h, p_h)
            let dv = (&s3.velocity - &s1.velocity * 3.0).norm_squared();
            let dp = (&s3.pressure - &s1.pressure * 3.0).norm_squared();
            let size = s3.velocity.norm_squared() + s3.pressure.norm_squared();
            assert!((dv + dp).sqrt() <= 1e-12 * size.sqrt(), "{mode}");
        }
    }

    #[test]
    fn gradient_forces_are_invisible_to_the_reconstruction_on_the_kernel() {
        let d = disc(0);
        let force = ForceSplit { potential: Some((&hydrostatic_q, &hydrostatic_f)), remainder: &|_| [0.0, 0.0] };
        for mode in [RhsMode::Prvem1, RhsMode::Prvem0] {
            let n = consistency_dual_norm(&d, mode, force, true).unwrap();
            assert!(n < 1e-11, "{mode}: {n}");
        }
        assert!(consistency_dual_norm(&d, RhsMode::Cvem, force, true).unwrap() > 1e-4);
    }
}
