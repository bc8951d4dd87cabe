//! Potential flows `u = grad(x^2 - y^2)` and `u = grad(x^3 - 3xy^2)`, where
//! the force is itself a gradient. Prints the velocity errors on the first
//! levels for both viscosities.

use polystokes::harness::{run_experiment, Experiment, ExperimentSpec};

fn main() -> polystokes::Result<()> {
    for experiment in [Experiment::PotFlow2, Experiment::PotFlow3] {
        let mut spec = ExperimentSpec::new(experiment);
        spec.levels = vec![0, 1, 2];
        let rows = run_experiment(&spec)?;
        println!("{experiment}");
        for r in rows {
            println!("  {:<7} nu={:<6.0e} level {} err_vel {:.3e} err_p {:.3e}", r.mode, r.nu, r.level, r.err_vel, r.err_p);
        }
    }
    Ok(())
}
