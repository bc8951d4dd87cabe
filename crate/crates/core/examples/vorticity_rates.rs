//! Vorticity benchmark on the mesh family with convergence rates.

use polystokes::harness::{run_experiment, Experiment, ExperimentSpec};

fn main() -> polystokes::Result<()> {
    let mut spec = ExperimentSpec::new(Experiment::Vorticity);
    let top = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(3);
    spec.levels = (0..=top).collect();
    let rows = run_experiment(&spec)?;
    println!("{:<7} {:>6} {:>5} {:>6} {:>11} {:>5} {:>11} {:>5}", "mode", "nu", "level", "ndof", "err_vel", "rate", "err_p", "rate");
    let rate = |r: Option<f64>| r.map(|r| format!("{r:.2}")).unwrap_or_default();
    for r in &rows {
        println!(
            "{:<7} {:>6.0e} {:>5} {:>6} {:>11.4e} {:>5} {:>11.4e} {:>5}",
            r.mode,
            r.nu,
            r.level,
            r.ndof,
            r.err_vel,
            rate(r.rate_vel),
            r.err_p,
            rate(r.rate_p)
        );
    }
    Ok(())
}
