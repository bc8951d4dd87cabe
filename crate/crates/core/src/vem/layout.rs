use crate::mesh::PolygonalMesh;
use crate::polybasis::{scalar_dim, vector_dim};

/// Dimension of the complement of `grad P_{s+1}` in `P_s^2`.
pub const fn gperp_dim(s: usize) -> usize {
    vector_dim(s) + 1 - scalar_dim(s + 1)
}

/// Local degrees of freedom of one cell, in the order
/// vertex values (x, y per vertex), edge-point values (x, y per point, points
/// in counterclockwise traversal order of each side), complement moments,
/// divergence moments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalLayout {
    pub k: usize,
    pub n_vertices: usize,
}

impl LocalLayout {
    pub fn new(k: usize, n_vertices: usize) -> Self {
        Self { k, n_vertices }
    }

    pub fn n_gperp(&self) -> usize {
        gperp_dim(self.k - 2)
    }

    pub fn n_div(&self) -> usize {
        scalar_dim(self.k - 1) - 1
    }

    pub fn vertex(&self, i: usize, comp: usize) -> usize {
        2 * i + comp
    }

    pub fn edge(&self, side: usize, j: usize, comp: usize) -> usize {
        2 * self.n_vertices + 2 * (side * (self.k - 1) + j) + comp
    }

    pub fn gperp(&self, j: usize) -> usize {
        2 * self.n_vertices * self.k + j
    }

    pub fn div(&self, j: usize) -> usize {
        self.gperp(self.n_gperp()) + j
    }

    /// Number of boundary (vertex and edge-point) unknowns.
    pub fn n_boundary(&self) -> usize {
        2 * self.n_vertices * self.k
    }

    pub fn len(&self) -> usize {
        self.n_boundary() + self.n_gperp() + self.n_div()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Local index of the trace node `m` (`0..=k`) of `side`, where nodes 0
    /// and `k` are the side's start and end vertices.
    pub fn side_node(&self, side: usize, m: usize, comp: usize) -> usize {
        if m == 0 {
            self.vertex(side, comp)
        } else if m == self.k {
            self.vertex((side + 1) % self.n_vertices, comp)
        } else {
            self.edge(side, m - 1, comp)
        }
    }
}

/// Global numbering of velocity and pressure unknowns.
///
/// Velocity: two per vertex, `2 (k-1)` per edge (points ordered from the lower
/// to the higher vertex index), then the interior moments cell by cell.
/// Pressure: `dim P_{k-1}` coefficients per cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DofLayout {
    pub k: usize,
    pub n_vertices: usize,
    pub n_edges: usize,
    pub n_cells: usize,
}

impl DofLayout {
    pub fn new(mesh: &PolygonalMesh, k: usize) -> Self {
        Self { k, n_vertices: mesh.num_vertices(), n_edges: mesh.num_edges(), n_cells: mesh.num_cells() }
    }

    pub fn interior_per_cell(&self) -> usize {
        gperp_dim(self.k - 2) + scalar_dim(self.k - 1) - 1
    }

    pub fn pressure_per_cell(&self) -> usize {
        scalar_dim(self.k - 1)
    }

    pub fn vertex(&self, v: usize, comp: usize) -> usize {
        2 * v + comp
    }

    pub fn edge(&self, e: usize, j: usize, comp: usize) -> usize {
        2 * self.n_vertices + 2 * (self.k - 1) * e + 2 * j + comp
    }

    pub fn cell_interior(&self, c: usize) -> usize {
        2 * self.n_vertices + 2 * (self.k - 1) * self.n_edges + c * self.interior_per_cell()
    }

    pub fn num_velocity(&self) -> usize {
        self.cell_interior(self.n_cells)
    }

    pub fn num_pressure(&self) -> usize {
        self.n_cells * self.pressure_per_cell()
    }

    pub fn pressure(&self, c: usize) -> usize {
        c * self.pressure_per_cell()
    }

    /// Global index of every local velocity unknown of `cell`.
    pub fn local_to_global(&self, mesh: &PolygonalMesh, cell: usize) -> Vec<usize> {
        let loop_ = mesh.cell(cell);
        let local = LocalLayout::new(self.k, loop_.len());
        let mut map = vec![0; local.len()];
        for (i, &v) in loop_.iter().enumerate() {
            for c in 0..2 {
                map[local.vertex(i, c)] = self.vertex(v, c);
            }
        }
        for (i, side) in mesh.sides(cell).iter().enumerate() {
            for j in 0..self.k - 1 {
                let g = if side.forward { j } else { self.k - 2 - j };
                for c in 0..2 {
                    map[local.edge(i, j, c)] = self.edge(side.edge, g, c);
                }
            }
        }
        let base = self.cell_interior(cell);
        for j in 0..self.interior_per_cell() {
            map[local.gperp(0) + j] = base + j;
        }
        map
    }
}
