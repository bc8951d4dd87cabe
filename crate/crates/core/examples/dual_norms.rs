//! Consistency errors of the four load discretizations measured in the
//! discrete dual norm, for a gradient force and for a rotational one.

use std::f64::consts::PI;

use polystokes::harness::{hydrostatic_gradient, hydrostatic_pressure};
use polystokes::mesh::build_paper_mesh;
use polystokes::stokes::{consistency_dual_norm, Discretization, ForceSplit, RhsMode};

fn rotational(x: [f64; 2]) -> [f64; 2] {
    let (s, c) = ((PI * x[0]).sin_cos(), (PI * x[1]).sin_cos());
    [s.0 * c.1, -c.0 * s.1 + x[0] * x[0]]
}

fn main() -> polystokes::Result<()> {
    let gradient = ForceSplit { potential: Some((&hydrostatic_pressure, &hydrostatic_gradient)), remainder: &|_| [0.0; 2] };
    let curl = ForceSplit { potential: None, remainder: &rotational };
    for level in 0..=2 {
        let disc = Discretization::new(build_paper_mesh(level), 2, None)?;
        println!("level {level} (ndof {})", disc.ndof());
        for mode in RhsMode::ALL {
            let g = consistency_dual_norm(&disc, mode, gradient, true)?;
            let r = consistency_dual_norm(&disc, mode, curl, true)?;
            println!("  {mode:<7} gradient force {g:.3e}   rotational force {r:.3e}");
        }
    }
    Ok(())
}
