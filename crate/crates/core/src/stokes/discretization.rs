use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use nalgebra::DVector;
use rayon::prelude::*;

use super::RhsMode;
use crate::error::Result;
use crate::mesh::PolygonalMesh;
use crate::polybasis::default_exactness;
use crate::polybasis::monomials::scalar_dim;
use crate::reconstruction::Reconstruction;
use crate::vem::{DofLayout, LocalSpace};
use crate::Point;

/// A mesh together with the local spaces of all its cells.
///
/// Reconstruction operators are built on first use and cached per order.
pub struct Discretization {
    pub mesh: PolygonalMesh,
    pub k: usize,
    pub exactness: usize,
    pub layout: DofLayout,
    pub spaces: Vec<LocalSpace>,
    maps: Vec<Vec<usize>>,
    recon: Mutex<HashMap<usize, Arc<Vec<Reconstruction>>>>,
}

impl std::fmt::Debug for Discretization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Discretization")
            .field("k", &self.k)
            .field("cells", &self.mesh.num_cells())
            .field("exactness", &self.exactness)
            .finish()
    }
}

impl Discretization {
    /// `exactness` defaults to `max(2k + 3, 10)`.
    pub fn new(mesh: PolygonalMesh, k: usize, exactness: Option<usize>) -> Result<Self> {
        let exactness = exactness.unwrap_or_else(|| default_exactness(k));
        let spaces = (0..mesh.num_cells())
            .into_par_iter()
            .map(|c| LocalSpace::new(&mesh, c, k, exactness))
            .collect::<Result<Vec<_>>>()?;
        let layout = DofLayout::new(&mesh, k);
        let maps = (0..mesh.num_cells()).map(|c| layout.local_to_global(&mesh, c)).collect();
        Ok(Self { mesh, k, exactness, layout, spaces, maps, recon: Mutex::new(HashMap::new()) })
    }

    pub fn num_cells(&self) -> usize {
        self.spaces.len()
    }

    /// Global index of every local velocity unknown of `cell`.
    pub fn map(&self, cell: usize) -> &[usize] {
        &self.maps[cell]
    }

    /// Velocity plus pressure unknowns plus the pressure multiplier, with
    /// boundary velocity values counted as eliminated.
    pub fn ndof(&self) -> usize {
        let fixed = self.boundary_dofs().len();
        self.layout.num_velocity() - fixed + self.layout.num_pressure() + 1
    }

    /// Global velocity unknowns attached to boundary vertices and edges.
    pub fn boundary_dofs(&self) -> Vec<usize> {
        let lay = &self.layout;
        let mut out = Vec::new();
        for v in (0..self.mesh.num_vertices()).filter(|&v| self.mesh.is_boundary_vertex(v)) {
            out.extend([lay.vertex(v, 0), lay.vertex(v, 1)]);
        }
        for (e, edge) in self.mesh.edges().iter().enumerate() {
            if edge.is_boundary() {
                for j in 0..self.k - 1 {
                    out.extend([lay.edge(e, j, 0), lay.edge(e, j, 1)]);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Location of every boundary unknown: `(global index, point, component)`.
    pub fn boundary_points(&self) -> Vec<(usize, Point, usize)> {
        let lay = &self.layout;
        let nodes = &self.spaces[0].nodes;
        let mut out = Vec::new();
        for v in (0..self.mesh.num_vertices()).filter(|&v| self.mesh.is_boundary_vertex(v)) {
            for c in 0..2 {
                out.push((lay.vertex(v, c), self.mesh.vertex(v), c));
            }
        }
        for (e, edge) in self.mesh.edges().iter().enumerate() {
            if edge.is_boundary() {
                let (a, b) = (self.mesh.vertex(edge.vertices[0]), self.mesh.vertex(edge.vertices[1]));
                for j in 0..self.k - 1 {
                    let t = nodes[j + 1];
                    let x = [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
                    for c in 0..2 {
                        out.push((lay.edge(e, j, c), x, c));
                    }
                }
            }
        }
        out.sort_by_key(|p| p.0);
        out
    }

    /// Reconstruction operators of order `m` on every cell.
    pub fn reconstructions(&self, m: usize) -> Result<Arc<Vec<Reconstruction>>> {
        if let Some(r) = self.recon.lock().expect("cache lock").get(&m) {
            return Ok(Arc::clone(r));
        }
        let built = self
            .spaces
            .par_iter()
            .map(|s| Reconstruction::new(s, m, self.exactness))
            .collect::<Result<Vec<_>>>()?;
        let built = Arc::new(built);
        self.recon.lock().expect("cache lock").insert(m, Arc::clone(&built));
        Ok(built)
    }

    /// Restriction of a global velocity vector to `cell`.
    pub fn local_dofs(&self, cell: usize, global: &DVector<f64>) -> DVector<f64> {
        let map = &self.maps[cell];
        DVector::from_iterator(map.len(), map.iter().map(|&g| global[g]))
    }

    /// Pressure coefficients of `cell` in its orthonormal basis.
    pub fn local_pressure(&self, cell: usize, global: &DVector<f64>) -> DVector<f64> {
        let n = self.layout.pressure_per_cell();
        global.rows(self.layout.pressure(cell), n).into_owned()
    }

    /// Local load vector `F_i` of one cell for the given mode.
    pub fn local_load(
        &self,
        cell: usize,
        mode: RhsMode,
        f: &(dyn Fn(Point) -> [f64; 2] + Sync),
    ) -> Result<DVector<f64>> {
        let s = &self.spaces[cell];
        match mode {
            RhsMode::Cvem => projected_load(s, self.k - 2, false, f),
            RhsMode::Evem => projected_load(s, self.k, true, f),
            RhsMode::Prvem1 | RhsMode::Prvem0 => {
                let m = mode.reconstruction_order(self.k).expect("reconstruction mode");
                Ok(self.reconstructions(m)?[cell].load(f))
            }
        }
    }

    /// Global DOFs of a pointwise velocity field with known divergence.
    pub fn interpolate(
        &self,
        u: &(dyn Fn(Point) -> [f64; 2] + Sync),
        div: &(dyn Fn(Point) -> f64 + Sync),
    ) -> DVector<f64> {
        let locals: Vec<DVector<f64>> = self.spaces.par_iter().map(|s| s.interpolate(u, div)).collect();
        let mut out = DVector::zeros(self.layout.num_velocity());
        for (c, v) in locals.iter().enumerate() {
            for (l, &g) in self.maps[c].iter().enumerate() {
                out[g] = v[l];
            }
        }
        out
    }

    /// Cellwise `L2` projection of a scalar onto `P_{k-1}`, in the
    /// orthonormal pressure bases.
    pub fn project_pressure(&self, p: &(dyn Fn(Point) -> f64 + Sync)) -> DVector<f64> {
        let n = scalar_dim(self.k - 1);
        let locals: Vec<DVector<f64>> = self
            .spaces
            .par_iter()
            .map(|s| {
                let frame = s.domain.frame;
                let mut out = DVector::zeros(n);
                for (x, w) in s.domain.quad.points.iter().zip(&s.domain.quad.weights) {
                    let m = frame.eval(self.k - 1, *x);
                    let px = p(*x);
                    for j in 0..n {
                        let qj: f64 = (0..n).map(|a| s.pressure_basis[(a, j)] * m[a]).sum();
                        out[j] += w * px * qj / s.area();
                    }
                }
                out
            })
            .collect();
        let mut out = DVector::zeros(self.layout.num_pressure());
        for (c, v) in locals.iter().enumerate() {
            out.rows_mut(self.layout.pressure(c), n).copy_from(v);
        }
        out
    }
}

/// `int_K f . pi_s phi_i` through the `L2` projector of degree `s`.
pub(super) fn projected_load(
    s: &LocalSpace,
    degree: usize,
    enhanced: bool,
    f: &(dyn Fn(Point) -> [f64; 2] + Sync),
) -> Result<DVector<f64>> {
    let proj = s.l2_projector(degree, enhanced)?;
    let n = scalar_dim(degree);
    let frame = s.domain.frame;
    let mut r = DVector::zeros(2 * n);
    for (x, w) in s.domain.quad.points.iter().zip(&s.domain.quad.weights) {
        let fx = f(*x);
        let m = frame.eval(degree, *x);
        for a in 0..n {
            r[a] += w * m[a] * fx[0];
            r[n + a] += w * m[a] * fx[1];
        }
    }
    Ok(proj.transpose() * r)
}
