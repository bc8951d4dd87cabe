use nalgebra::DVector;
use rayon::prelude::*;

use super::discretization::projected_load;
use super::system::{apply_dirichlet, assemble_with_local_loads, solve};
use super::{Discretization, RhsMode};
use crate::error::Result;
use crate::polybasis::monomials::scalar_dim;
use crate::Point;

/// A body force written as `f = grad q + g`.
///
/// The functional `v -> int f . v` is evaluated exactly on the gradient part,
/// by integration by parts, and through the enhanced `L2` projection on `g`.
#[derive(Clone, Copy)]
pub struct ForceSplit<'a> {
    /// `(q, grad q)`.
    pub potential: Option<(&'a (dyn Fn(Point) -> f64 + Sync), &'a (dyn Fn(Point) -> [f64; 2] + Sync))>,
    pub remainder: &'a (dyn Fn(Point) -> [f64; 2] + Sync),
}

impl ForceSplit<'_> {
    pub fn eval(&self, x: Point) -> [f64; 2] {
        let g = (self.remainder)(x);
        match self.potential {
            Some((_, grad)) => {
                let d = grad(x);
                [d[0] + g[0], d[1] + g[1]]
            }
            None => g,
        }
    }
}

/// Reference values of `int f . phi_i` on one cell.
fn reference_load(disc: &Discretization, cell: usize, force: &ForceSplit<'_>) -> Result<DVector<f64>> {
    let s = &disc.spaces[cell];
    let k = disc.k;
    let mut out = projected_load(s, k, true, force.remainder)?;
    if let Some((q, _)) = force.potential {
        let div = &s.pressure_basis * s.divergence_map();
        let nkm1 = scalar_dim(k - 1);
        let frame = s.domain.frame;
        let mut row = DVector::zeros(nkm1);
        for (x, w) in s.domain.quad.points.iter().zip(&s.domain.quad.weights) {
            let m = frame.eval(k - 1, *x);
            let qx = q(*x);
            for a in 0..nkm1 {
                row[a] += w * qx * m[a];
            }
        }
        out -= div.transpose() * row;
        for side in 0..s.points.len() {
            let n = s.normals[side];
            let b = s.side_rows(side, 1, disc.exactness, |x, _| {
                let qx = q(x);
                vec![[qx * n[0], qx * n[1]]]
            });
            out += b.row(0).transpose();
        }
    }
    Ok(out)
}

/// Dual norm of `F - F_mode` with respect to the unit-viscosity discrete
/// energy, over the discretely divergence-free subspace when
/// `restrict_to_kernel` is set and over all of `V_h` otherwise. Test
/// functions vanish on the boundary.
pub fn consistency_dual_norm(
    disc: &Discretization,
    mode: RhsMode,
    force: ForceSplit<'_>,
    restrict_to_kernel: bool,
) -> Result<f64> {
    if let Some(m) = mode.reconstruction_order(disc.k) {
        disc.reconstructions(m)?;
    }
    let f = |x: Point| force.eval(x);
    let diffs = (0..disc.num_cells())
        .into_par_iter()
        .map(|c| Ok(reference_load(disc, c, &force)? - disc.local_load(c, mode, &f)?))
        .collect::<Result<Vec<_>>>()?;
    let system = assemble_with_local_loads(disc, 1.0, &diffs, restrict_to_kernel)?;
    let mut system = apply_dirichlet(disc, system, &|_| [0.0, 0.0]);
    let mut sol = solve(&system)?;
    if restrict_to_kernel {
        // Deflate the part of the functional balanced by the pressure, which
        // may be much larger than the kernel part, and solve again.
        for &(p, j, v) in &system.b {
            system.load[j] += v * sol.pressure[p];
        }
        sol = solve(&system)?;
    }
    let r = &sol.velocity;
    let energy: f64 = system.a.iter().map(|&(i, j, v)| r[i] * v * r[j]).sum();
    Ok(energy.max(0.0).sqrt())
}
