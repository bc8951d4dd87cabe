//! Polygonal meshes: topology, cell geometry, subtriangulation, the composite
//! mesh family used by the experiments, and a small text file format.

mod family;
mod published;
mod io;
mod shape;
mod subtri;

use std::collections::HashMap;

pub use family::{build_paper_mesh, faces_from_edges};
pub use io::{load_mesh, parse_mesh, save_mesh, write_mesh};
pub use shape::{check_shape_regularity, kernel_center, ShapeReport, KERNEL_SAMPLES};
pub use subtri::{subtriangulate, SubTriangulation};

use crate::error::{Error, Result};
use crate::Point;

/// A mesh edge stored with its vertices in increasing index order.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub vertices: [usize; 2],
    /// The cell traversing the edge from `vertices[0]` to `vertices[1]`, or
    /// the only cell for a boundary edge.
    pub first: usize,
    pub second: Option<usize>,
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        self.second.is_none()
    }

    pub fn cells(&self) -> impl Iterator<Item = usize> + '_ {
        std::iter::once(self.first).chain(self.second)
    }
}

/// One side of a cell: the global edge and whether the cell's counterclockwise
/// traversal agrees with the global `low -> high` direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellSide {
    pub edge: usize,
    pub forward: bool,
}

#[derive(Debug, Clone)]
pub struct CellGeometry {
    pub area: f64,
    pub centroid: Point,
    pub diameter: f64,
    /// Outward unit normals of the sides `loop[i] -> loop[i+1]`.
    pub normals: Vec<[f64; 2]>,
    pub lengths: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct PolygonalMesh {
    vertices: Vec<Point>,
    cells: Vec<Vec<usize>>,
    edges: Vec<Edge>,
    sides: Vec<Vec<CellSide>>,
    geometry: Vec<CellGeometry>,
    boundary_vertex: Vec<bool>,
    level: usize,
}

pub fn signed_area(points: &[Point]) -> f64 {
    let n = points.len();
    (0..n)
        .map(|i| {
            let (a, b) = (points[i], points[(i + 1) % n]);
            a[0] * b[1] - a[1] * b[0]
        })
        .sum::<f64>()
        / 2.0
}

pub fn polygon_geometry(points: &[Point]) -> CellGeometry {
    let n = points.len();
    let area = signed_area(points);
    let (mut cx, mut cy) = (0.0, 0.0);
    // centroid relative to the first vertex for accuracy
    let o = points[0];
    for i in 0..n {
        let a = [points[i][0] - o[0], points[i][1] - o[1]];
        let b = [points[(i + 1) % n][0] - o[0], points[(i + 1) % n][1] - o[1]];
        let cr = a[0] * b[1] - a[1] * b[0];
        cx += (a[0] + b[0]) * cr;
        cy += (a[1] + b[1]) * cr;
    }
    let centroid = [o[0] + cx / (6.0 * area), o[1] + cy / (6.0 * area)];
    let mut diameter: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            diameter = diameter.max(dist(points[i], points[j]));
        }
    }
    let mut normals = Vec::with_capacity(n);
    let mut lengths = Vec::with_capacity(n);
    for i in 0..n {
        let (a, b) = (points[i], points[(i + 1) % n]);
        let len = dist(a, b);
        normals.push([(b[1] - a[1]) / len, -(b[0] - a[0]) / len]);
        lengths.push(len);
    }
    CellGeometry { area, centroid, diameter, normals, lengths }
}

#[inline]
pub fn dist(a: Point, b: Point) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

#[inline]
fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn segments_intersect(p1: Point, p2: Point, q1: Point, q2: Point, tol: f64) -> bool {
    let d1 = cross(q1, q2, p1);
    let d2 = cross(q1, q2, p2);
    let d3 = cross(p1, p2, q1);
    let d4 = cross(p1, p2, q2);
    if ((d1 > tol && d2 < -tol) || (d1 < -tol && d2 > tol)) && ((d3 > tol && d4 < -tol) || (d3 < -tol && d4 > tol)) {
        return true;
    }
    let on = |a: Point, b: Point, p: Point, d: f64| {
        d.abs() <= tol
            && p[0] >= a[0].min(b[0]) - tol
            && p[0] <= a[0].max(b[0]) + tol
            && p[1] >= a[1].min(b[1]) - tol
            && p[1] <= a[1].max(b[1]) + tol
    };
    on(q1, q2, p1, d1) || on(q1, q2, p2, d2) || on(p1, p2, q1, d3) || on(p1, p2, q2, d4)
}

fn check_simple(cell: usize, points: &[Point]) -> Result<()> {
    let n = points.len();
    let scale = points.iter().map(|p| dist(*p, points[0])).fold(0.0, f64::max);
    let tol = 1e-12 * scale * scale;
    for i in 0..n {
        if dist(points[i], points[(i + 1) % n]) <= 1e-14 * scale {
            return Err(Error::Topology(format!("cell {cell} has a degenerate side")));
        }
        // a side folding back onto its predecessor
        let (a, b, c) = (points[(i + n - 1) % n], points[i], points[(i + 1) % n]);
        let u = [b[0] - a[0], b[1] - a[1]];
        let v = [c[0] - b[0], c[1] - b[1]];
        if cross(a, b, c).abs() <= tol && u[0] * v[0] + u[1] * v[1] < 0.0 {
            return Err(Error::Topology(format!("cell {cell} folds back at local vertex {i}")));
        }
    }
    for i in 0..n {
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            if segments_intersect(points[i], points[(i + 1) % n], points[j], points[(j + 1) % n], tol) {
                return Err(Error::Topology(format!("cell {cell} is not a simple polygon")));
            }
        }
    }
    Ok(())
}

impl PolygonalMesh {
    /// Builds a mesh from vertex coordinates and cell vertex loops. Clockwise
    /// loops are reversed.
    pub fn new(vertices: Vec<Point>, mut cells: Vec<Vec<usize>>, level: usize) -> Result<Self> {
        for (c, cell) in cells.iter_mut().enumerate() {
            if cell.len() < 3 {
                return Err(Error::Topology(format!("cell {c} has fewer than three vertices")));
            }
            if let Some(&bad) = cell.iter().find(|&&v| v >= vertices.len()) {
                return Err(Error::Topology(format!("cell {c} references missing vertex {bad}")));
            }
            let pts: Vec<Point> = cell.iter().map(|&v| vertices[v]).collect();
            let a = signed_area(&pts);
            if a == 0.0 || !a.is_finite() {
                return Err(Error::Topology(format!("cell {c} has zero area")));
            }
            if a < 0.0 {
                cell.reverse();
            }
        }

        let mut index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut edges: Vec<Edge> = Vec::new();
        let mut first_forward: Vec<bool> = Vec::new();
        let mut sides = Vec::with_capacity(cells.len());
        let mut geometry = Vec::with_capacity(cells.len());
        for (c, cell) in cells.iter().enumerate() {
            let pts: Vec<Point> = cell.iter().map(|&v| vertices[v]).collect();
            check_simple(c, &pts)?;
            let n = cell.len();
            let mut cs = Vec::with_capacity(n);
            for i in 0..n {
                let (a, b) = (cell[i], cell[(i + 1) % n]);
                if a == b {
                    return Err(Error::Topology(format!("cell {c} repeats vertex {a}")));
                }
                let key = (a.min(b), a.max(b));
                let forward = a < b;
                let e = match index.get(&key) {
                    None => {
                        index.insert(key, edges.len());
                        edges.push(Edge { vertices: [key.0, key.1], first: c, second: None });
                        first_forward.push(forward);
                        edges.len() - 1
                    }
                    Some(&e) => {
                        if edges[e].second.is_some() {
                            return Err(Error::Topology(format!("edge ({}, {}) has more than two cells", key.0, key.1)));
                        }
                        if first_forward[e] == forward {
                            return Err(Error::Topology(format!(
                                "edge ({}, {}) is traversed twice in the same direction",
                                key.0, key.1
                            )));
                        }
                        // keep `first` as the cell traversing the edge forward
                        if forward {
                            edges[e].second = Some(edges[e].first);
                            edges[e].first = c;
                        } else {
                            edges[e].second = Some(c);
                        }
                        e
                    }
                };
                cs.push(CellSide { edge: e, forward });
            }
            sides.push(cs);
            geometry.push(polygon_geometry(&pts));
        }

        let mut boundary_vertex = vec![false; vertices.len()];
        for e in edges.iter().filter(|e| e.is_boundary()) {
            boundary_vertex[e.vertices[0]] = true;
            boundary_vertex[e.vertices[1]] = true;
        }
        Ok(Self { vertices, cells, edges, sides, geometry, boundary_vertex, level })
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> Point {
        self.vertices[v]
    }

    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    pub fn cell(&self, c: usize) -> &[usize] {
        &self.cells[c]
    }

    pub fn cell_points(&self, c: usize) -> Vec<Point> {
        self.cells[c].iter().map(|&v| self.vertices[v]).collect()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    /// Sides of cell `c` in loop order.
    pub fn sides(&self, c: usize) -> &[CellSide] {
        &self.sides[c]
    }

    pub fn geometry(&self, c: usize) -> &CellGeometry {
        &self.geometry[c]
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.boundary_vertex[v]
    }

    /// Mesh size: the largest cell diameter.
    pub fn h(&self) -> f64 {
        self.geometry.iter().map(|g| g.diameter).fold(0.0, f64::max)
    }

    pub fn total_area(&self) -> f64 {
        self.geometry.iter().map(|g| g.area).sum()
    }
}
