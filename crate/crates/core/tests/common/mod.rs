#![allow(dead_code)]

use polystokes::mesh::PolygonalMesh;

/// `n x n` grid on the unit square with interior vertices moved by up to
/// `jitter / n`; cells with `split[c]` set are cut into two triangles.
pub fn jittered_grid(n: usize, offsets: &[(f64, f64)], jitter: f64, split: &[bool]) -> PolygonalMesh {
    let h = 1.0 / n as f64;
    let mut vertices = Vec::new();
    for j in 0..=n {
        for i in 0..=n {
            let mut p = [i as f64 * h, j as f64 * h];
            if i > 0 && i < n && j > 0 && j < n {
                let (dx, dy) = offsets[(j * (n + 1) + i) % offsets.len()];
                p[0] += jitter * h * dx;
                p[1] += jitter * h * dy;
            }
            vertices.push(p);
        }
    }
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let mut cells = Vec::new();
    for j in 0..n {
        for i in 0..n {
            let q = [id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)];
            if split[(j * n + i) % split.len()] {
                cells.push(vec![q[0], q[1], q[2]]);
                cells.push(vec![q[0], q[2], q[3]]);
            } else {
                cells.push(q.to_vec());
            }
        }
    }
    PolygonalMesh::new(vertices, cells, 0).expect("valid grid")
}
