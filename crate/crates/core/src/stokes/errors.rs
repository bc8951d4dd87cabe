use nalgebra::DVector;
use rayon::prelude::*;

use super::Discretization;
use crate::polybasis::monomials::scalar_dim;
use crate::Point;

/// `|| grad(u - Pi_grad u_h) ||_{L2}` with `grad u` given row-wise
/// (`[grad u_x, grad u_y]`).
pub fn error_velocity(
    disc: &Discretization,
    velocity: &DVector<f64>,
    grad_u: &(dyn Fn(Point) -> [[f64; 2]; 2] + Sync),
) -> f64 {
    let k = disc.k;
    let n = scalar_dim(k);
    let parts: Vec<f64> = (0..disc.num_cells())
        .into_par_iter()
        .map(|c| {
            let s = &disc.spaces[c];
            let q = s.gradient_projector() * disc.local_dofs(c, velocity);
            let frame = s.domain.frame;
            s.domain
                .quad
                .points
                .iter()
                .zip(&s.domain.quad.weights)
                .map(|(x, w)| {
                    let g = frame.grad(k, *x);
                    let exact = grad_u(*x);
                    let mut sum = 0.0;
                    for comp in 0..2 {
                        let mut gh = [0.0; 2];
                        for (a, ga) in g.iter().enumerate() {
                            gh[0] += q[comp * n + a] * ga[0];
                            gh[1] += q[comp * n + a] * ga[1];
                        }
                        sum += (exact[comp][0] - gh[0]).powi(2) + (exact[comp][1] - gh[1]).powi(2);
                    }
                    w * sum
                })
                .sum()
        })
        .collect();
    parts.iter().sum::<f64>().sqrt()
}

/// `|| p - p_h ||_{L2}`.
pub fn error_pressure(disc: &Discretization, pressure: &DVector<f64>, p: &(dyn Fn(Point) -> f64 + Sync)) -> f64 {
    let k = disc.k;
    let parts: Vec<f64> = (0..disc.num_cells())
        .into_par_iter()
        .map(|c| {
            let s = &disc.spaces[c];
            let coeffs = &s.pressure_basis * disc.local_pressure(c, pressure);
            let frame = s.domain.frame;
            s.domain
                .quad
                .points
                .iter()
                .zip(&s.domain.quad.weights)
                .map(|(x, w)| w * (p(*x) - frame.eval_poly(k - 1, coeffs.as_slice(), *x)).powi(2))
                .sum()
        })
        .collect();
    parts.iter().sum::<f64>().sqrt()
}

/// Largest divergence coefficient of a velocity over all cells.
pub fn max_divergence(disc: &Discretization, velocity: &DVector<f64>) -> f64 {
    (0..disc.num_cells())
        .map(|c| disc.spaces[c].divergence_from_dofs(&disc.local_dofs(c, velocity)).amax())
        .fold(0.0, f64::max)
}
