//! Hydrostatic benchmark: the exact velocity is zero and the force is a
//! gradient. Only the pressure-robust loads keep the velocity error
//! independent of the viscosity.

use polystokes::harness::{run_experiment, Experiment, ExperimentSpec};

fn main() -> polystokes::Result<()> {
    let mut spec = ExperimentSpec::new(Experiment::Hydrostatic);
    let level = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(1);
    spec.levels = vec![level];
    let rows = run_experiment(&spec)?;
    println!("level {level}, ndof {}", rows[0].ndof);
    println!("{:<8} {:>8} {:>12} {:>12}", "mode", "nu", "err_vel", "nu*err_vel");
    for r in rows {
        println!("{:<8} {:>8.0e} {:>12.4e} {:>12.4e}", r.mode, r.nu, r.err_vel, r.nu * r.err_vel);
    }
    Ok(())
}
