use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::{Discretization, RhsMode};
use crate::error::{Error, Result};
use crate::Point;

/// Relative residual the linear solve must reach.
pub const RESIDUAL_TOLERANCE: f64 = 1e-12;

/// The discrete Stokes saddle-point problem before elimination of boundary
/// values.
///
/// Blocks are stored as triplets in global numbering: `a` is the velocity
/// block for unit viscosity, `b` has rows `int_K q_j div phi_i` for the
/// pressure basis functions, `mean` holds `int_K q_j`. The load is unscaled.
#[derive(Debug, Clone)]
pub struct SaddleSystem {
    pub nu: f64,
    pub n_velocity: usize,
    pub n_pressure: usize,
    pub a: Vec<(usize, usize, f64)>,
    pub b: Vec<(usize, usize, f64)>,
    pub mean: DVector<f64>,
    pub load: DVector<f64>,
    /// Prescribed velocity values; `None` for free unknowns.
    pub fixed: Vec<Option<f64>>,
    /// Whether the divergence constraint and pressure are part of the system.
    pub constrained: bool,
}

/// Discrete velocity and pressure.
#[derive(Debug, Clone)]
pub struct StokesSolution {
    pub velocity: DVector<f64>,
    /// Cellwise coefficients in the orthonormal pressure bases; zero mean.
    pub pressure: DVector<f64>,
    /// Relative residual of the scaled linear system.
    pub residual: f64,
}

/// Assembles the saddle-point system with the load of `mode`.
pub fn assemble(
    disc: &Discretization,
    nu: f64,
    mode: RhsMode,
    f: &(dyn Fn(Point) -> [f64; 2] + Sync),
) -> Result<SaddleSystem> {
    if !(nu > 0.0) {
        return Err(Error::InvalidSpec(format!("viscosity must be positive, got {nu}")));
    }
    if mode.reconstruction_order(disc.k).is_some() {
        // build the cache once, in parallel, before the per-cell loop
        disc.reconstructions(mode.reconstruction_order(disc.k).expect("checked"))?;
    }
    let loads = (0..disc.num_cells())
        .into_par_iter()
        .map(|c| disc.local_load(c, mode, f))
        .collect::<Result<Vec<_>>>()?;
    assemble_with_local_loads(disc, nu, &loads, true)
}

/// Assembles the operator blocks with given local load vectors.
pub fn assemble_with_local_loads(
    disc: &Discretization,
    nu: f64,
    loads: &[DVector<f64>],
    constrained: bool,
) -> Result<SaddleSystem> {
    let lay = &disc.layout;
    let (nv, np) = (lay.num_velocity(), lay.num_pressure());
    if loads.len() != disc.num_cells() {
        return Err(Error::Assembly(format!("{} local loads for {} cells", loads.len(), disc.num_cells())));
    }
    let locals: Vec<(DMatrix<f64>, DMatrix<f64>)> = disc.spaces.par_iter().map(|s| s.local_matrices(1.0)).collect();
    let mut a = Vec::new();
    let mut b = Vec::new();
    let mut mean = DVector::zeros(np);
    let mut load = DVector::zeros(nv);
    for (c, (al, bl)) in locals.iter().enumerate() {
        let map = disc.map(c);
        if map.len() != al.nrows() || loads[c].len() != map.len() || bl.nrows() != lay.pressure_per_cell() {
            return Err(Error::Assembly(format!("cell {c}: local size does not match the layout")));
        }
        for (j, &gj) in map.iter().enumerate() {
            for (i, &gi) in map.iter().enumerate() {
                let v = al[(i, j)];
                if v != 0.0 {
                    a.push((gi, gj, v));
                }
            }
            load[gj] += loads[c][j];
        }
        let p0 = lay.pressure(c);
        for r in 0..bl.nrows() {
            for (j, &gj) in map.iter().enumerate() {
                let v = bl[(r, j)];
                if v != 0.0 {
                    b.push((p0 + r, gj, v));
                }
            }
        }
        // q_0 = 1 and the other basis members are mean-free
        mean[p0] = disc.spaces[c].area();
    }
    Ok(SaddleSystem { nu, n_velocity: nv, n_pressure: np, a, b, mean, load, fixed: vec![None; nv], constrained })
}

/// Prescribes the boundary velocity unknowns by point values of `g`.
pub fn apply_dirichlet(
    disc: &Discretization,
    mut system: SaddleSystem,
    g: &(dyn Fn(Point) -> [f64; 2] + Sync),
) -> SaddleSystem {
    for (i, x, c) in disc.boundary_points() {
        system.fixed[i] = Some(g(x)[c]);
    }
    system
}

fn residual_norm(entries: &[Triplet<usize, usize, f64>], x: &[f64], rhs: &[f64]) -> f64 {
    let mut r: Vec<f64> = rhs.to_vec();
    for t in entries {
        r[t.row] -= t.val * x[t.col];
    }
    r.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Solves the system scaled by `1/nu` with a sparse LU factorization.
pub fn solve(system: &SaddleSystem) -> Result<StokesSolution> {
    let nv = system.n_velocity;
    let np = if system.constrained { system.n_pressure } else { 0 };
    let mut index = vec![usize::MAX; nv];
    let mut nf = 0;
    for (i, f) in system.fixed.iter().enumerate() {
        if f.is_none() {
            index[i] = nf;
            nf += 1;
        }
    }
    // Pressure unknowns are offset by nf; the first pressure is pinned and the
    // zero-mean multiplier is eliminated in closed form below.
    let n = nf + if system.constrained { np - 1 } else { 0 };
    let mut rhs = vec![0.0; nf + np];
    for i in 0..nv {
        if index[i] != usize::MAX {
            rhs[index[i]] = system.load[i] / system.nu;
        }
    }
    let mut entries = Vec::with_capacity(system.a.len() + 2 * system.b.len());
    for &(i, j, v) in &system.a {
        match (index[i], system.fixed[j]) {
            (usize::MAX, _) => {}
            (fi, Some(g)) => rhs[fi] -= v * g,
            (fi, None) => entries.push(Triplet::new(fi, index[j], v)),
        }
    }
    if system.constrained {
        for &(p, j, v) in &system.b {
            match system.fixed[j] {
                Some(g) => rhs[nf + p] += v * g,
                None if p > 0 => {
                    entries.push(Triplet::new(nf + p - 1, index[j], -v));
                    entries.push(Triplet::new(index[j], nf + p - 1, -v));
                }
                None => {}
            }
        }
        // The constant pressure is orthogonal to every free velocity column,
        // so the multiplier of the zero-mean condition follows from the data:
        // lambda = <1, rhs_p> / <1, mean>.
        let ones = |p: usize| if system.mean[p] != 0.0 { 1.0 } else { 0.0 };
        let num: f64 = (0..np).map(|p| ones(p) * rhs[nf + p]).sum();
        let den: f64 = (0..np).map(|p| ones(p) * system.mean[p]).sum();
        let lambda = num / den;
        for p in 0..np {
            rhs[nf + p] -= lambda * system.mean[p];
        }
    }
    // drop the row of the pinned pressure; it is implied by the others
    if system.constrained {
        rhs.remove(nf);
    }

    let rhs_norm = rhs.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut x = vec![0.0; n];
    let mut residual = 0.0;
    if rhs_norm > 0.0 {
        faer::set_global_parallelism(faer::Par::Seq);
        let mat = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &entries)
            .map_err(|e| Error::SolverFailure(format!("matrix construction: {e:?}")))?;
        let lu = mat.sp_lu().map_err(|e| Error::SolverFailure(format!("factorization: {e:?}")))?;
        let mut r = rhs.clone();
        for _ in 0..4 {
            let mut m = Mat::from_fn(n, 1, |i, _| r[i]);
            lu.solve_in_place(&mut m);
            for (i, xi) in x.iter_mut().enumerate() {
                *xi += m[(i, 0)];
            }
            residual = residual_norm(&entries, &x, &rhs) / rhs_norm;
            if residual <= RESIDUAL_TOLERANCE * 1e-2 {
                break;
            }
            r = rhs.clone();
            for t in &entries {
                r[t.row] -= t.val * x[t.col];
            }
        }
        if !(residual <= RESIDUAL_TOLERANCE) {
            return Err(Error::SolverFailure(format!("relative residual {residual:.3e} above {RESIDUAL_TOLERANCE:e}")));
        }
    }

    let mut velocity = DVector::zeros(nv);
    for i in 0..nv {
        velocity[i] = match system.fixed[i] {
            Some(g) => g,
            None => x[index[i]],
        };
    }
    let mut pressure = DVector::zeros(system.n_pressure);
    if system.constrained {
        for p in 1..np {
            pressure[p] = x[nf + p - 1];
        }
        let ones = |p: usize| if system.mean[p] != 0.0 { 1.0 } else { 0.0 };
        let shift = system.mean.dot(&pressure) / (0..np).map(|p| ones(p) * system.mean[p]).sum::<f64>();
        for p in 0..np {
            pressure[p] = system.nu * (pressure[p] - ones(p) * shift);
        }
    }
    Ok(StokesSolution { velocity, pressure, residual })
}
