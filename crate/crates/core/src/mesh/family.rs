use std::collections::HashMap;
use std::f64::consts::PI;

use super::published::{T0_EDGES, T0_VERTICES, T1_EDGES, T1_VERTICES};
use super::{signed_area, PolygonalMesh};
use crate::error::{Error, Result};
use crate::Point;

/// Recovers the bounded faces of a planar straight-line graph.
///
/// Each face is returned counterclockwise, rotated to start at its smallest
/// vertex index; faces are sorted by their loops.
pub fn faces_from_edges(vertices: &[Point], edges: &[[usize; 2]]) -> Result<Vec<Vec<usize>>> {
    let mut nbrs: Vec<Vec<usize>> = vec![Vec::new(); vertices.len()];
    for &[a, b] in edges {
        if a >= vertices.len() || b >= vertices.len() || a == b {
            return Err(Error::Topology(format!("invalid edge ({a}, {b})")));
        }
        nbrs[a].push(b);
        nbrs[b].push(a);
    }
    for (v, list) in nbrs.iter_mut().enumerate() {
        let o = vertices[v];
        list.sort_by(|&p, &q| {
            let ap = (vertices[p][1] - o[1]).atan2(vertices[p][0] - o[0]);
            let aq = (vertices[q][1] - o[1]).atan2(vertices[q][0] - o[0]);
            ap.total_cmp(&aq)
        });
    }
    let mut used: HashMap<(usize, usize), bool> = HashMap::new();
    let mut faces = Vec::new();
    for &[a, b] in edges {
        for (u0, v0) in [(a, b), (b, a)] {
            if used.contains_key(&(u0, v0)) {
                continue;
            }
            let mut face = vec![u0];
            let (mut u, mut v) = (u0, v0);
            loop {
                used.insert((u, v), true);
                let list = &nbrs[v];
                let i = list.iter().position(|&x| x == u).expect("adjacency is symmetric");
                let w = list[(i + list.len() - 1) % list.len()];
                u = v;
                v = w;
                if (u, v) == (u0, v0) {
                    break;
                }
                face.push(u);
                if face.len() > edges.len() + 1 {
                    return Err(Error::Topology("face traversal did not close".into()));
                }
            }
            let pts: Vec<Point> = face.iter().map(|&i| vertices[i]).collect();
            if signed_area(&pts) > 0.0 {
                let start = face.iter().enumerate().min_by_key(|(_, &v)| v).map(|(i, _)| i).unwrap();
                face.rotate_left(start);
                faces.push(face);
            }
        }
    }
    faces.sort();
    Ok(faces)
}

fn published(level: usize) -> PolygonalMesh {
    let (v, e): (&[[f64; 2]], &[[usize; 2]]) = match level {
        0 => (&T0_VERTICES, &T0_EDGES),
        _ => (&T1_VERTICES, &T1_EDGES),
    };
    let faces = faces_from_edges(v, e).expect("published meshes are planar");
    PolygonalMesh::new(v.to_vec(), faces, level).expect("published meshes are valid")
}

/// Rounded coordinates used to merge vertices shared by adjacent copies.
fn key(p: Point) -> (i64, i64) {
    ((p[0] * 1e9).round() as i64, (p[1] * 1e9).round() as i64)
}

fn generated(level: usize) -> PolygonalMesh {
    let base = published(0);
    let n = 1usize << level;
    let s = 0.5 / n as f64;

    let mut vertices: Vec<Point> = Vec::new();
    let mut index: HashMap<(i64, i64), usize> = HashMap::new();
    let mut cells: Vec<Vec<usize>> = Vec::new();
    for quadrant in [[0.0, 0.0], [0.5, 0.0], [0.0, 0.5], [0.5, 0.5]] {
        let pattern: Vec<Vec<[f64; 2]>> = (0..base.num_cells())
            .filter(|&c| {
                let g = base.geometry(c).centroid;
                (g[0] >= 0.5) == (quadrant[0] == 0.5) && (g[1] >= 0.5) == (quadrant[1] == 0.5)
            })
            .map(|c| {
                base.cell_points(c)
                    .into_iter()
                    .map(|p| [(p[0] - quadrant[0]) / 0.5, (p[1] - quadrant[1]) / 0.5])
                    .collect()
            })
            .collect();
        for j in 0..n {
            for i in 0..n {
                for cell in &pattern {
                    let lp = cell
                        .iter()
                        .map(|r| {
                            let p = [quadrant[0] + s * (i as f64 + r[0]), quadrant[1] + s * (j as f64 + r[1])];
                            *index.entry(key(p)).or_insert_with(|| {
                                vertices.push(p);
                                vertices.len() - 1
                            })
                        })
                        .collect();
                    cells.push(lp);
                }
            }
        }
    }
    insert_hanging_nodes(&vertices, &mut cells, s / 4.0);

    let amp = 0.1 / n as f64;
    let eps = 1e-12;
    for p in &mut vertices {
        let [x, y] = *p;
        if x > eps && x < 0.5 - eps && y > eps && y < 0.5 - eps {
            p[0] += amp * (2.0 * PI * x).sin() * (2.0 * PI * y).sin();
            p[1] += amp * (4.0 * PI * x).sin() * (2.0 * PI * y).sin();
        }
    }
    PolygonalMesh::new(vertices, cells, level).expect("generated meshes are valid")
}

/// Splits every cell side that passes through another vertex, so that loops
/// list the vertices lying on their sides.
fn insert_hanging_nodes(vertices: &[Point], cells: &mut [Vec<usize>], bucket: f64) {
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    let cell_of = |p: Point| ((p[0] / bucket).floor() as i64, (p[1] / bucket).floor() as i64);
    for (v, p) in vertices.iter().enumerate() {
        grid.entry(cell_of(*p)).or_default().push(v);
    }
    for cell in cells.iter_mut() {
        let m = cell.len();
        let mut out = Vec::with_capacity(m);
        for i in 0..m {
            let (a, b) = (cell[i], cell[(i + 1) % m]);
            out.push(a);
            let (pa, pb) = (vertices[a], vertices[b]);
            let d = [pb[0] - pa[0], pb[1] - pa[1]];
            let len2 = d[0] * d[0] + d[1] * d[1];
            let (lo, hi) = (cell_of([pa[0].min(pb[0]), pa[1].min(pb[1])]), cell_of([pa[0].max(pb[0]), pa[1].max(pb[1])]));
            let mut on: Vec<(f64, usize)> = Vec::new();
            for gx in lo.0..=hi.0 {
                for gy in lo.1..=hi.1 {
                    for &v in grid.get(&(gx, gy)).into_iter().flatten() {
                        if v == a || v == b {
                            continue;
                        }
                        let p = vertices[v];
                        let w = [p[0] - pa[0], p[1] - pa[1]];
                        let t = (w[0] * d[0] + w[1] * d[1]) / len2;
                        let cr = w[0] * d[1] - w[1] * d[0];
                        if t > 1e-9 && t < 1.0 - 1e-9 && cr.abs() <= 1e-9 * len2 {
                            on.push((t, v));
                        }
                    }
                }
            }
            on.sort_by(|x, y| x.0.total_cmp(&y.0));
            out.extend(on.into_iter().map(|(_, v)| v));
        }
        *cell = out;
    }
}

/// The composite mesh family on the unit square.
///
/// The lower-left quadrant holds distorted quadrilaterals, the lower-right
/// squares, the upper-left triangles and non-convex pentagons, and the
/// upper-right squares and L-shaped octagons. Levels 0 and 1 are the published
/// coordinate tables. Level `l >= 2` tiles each quadrant with `4^l` scaled
/// copies of its level-0 pattern and then displaces the interior vertices of
/// the lower-left quadrant by
/// `0.1 * 2^-l * (sin 2 pi x sin 2 pi y, sin 4 pi x sin 2 pi y)`.
pub fn build_paper_mesh(level: usize) -> PolygonalMesh {
    match level {
        0 | 1 => published(level),
        _ => generated(level),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{check_shape_regularity, subtriangulate};

    fn has_vertex(m: &PolygonalMesh, p: Point) -> bool {
        m.vertices().iter().any(|v| v == &p)
    }

    /// Free velocity plus pressure unknowns plus one multiplier for order 2:
    /// two per interior vertex and per interior edge, five per cell.
    fn ndof_k2(m: &PolygonalMesh) -> usize {
        let iv = (0..m.num_vertices()).filter(|&v| !m.is_boundary_vertex(v)).count();
        let ie = m.edges().iter().filter(|e| !e.is_boundary()).count();
        2 * iv + 2 * ie + 5 * m.num_cells() + 1
    }

    #[test]
    fn level_zero_matches_published_table() {
        let m = build_paper_mesh(0);
        assert_eq!(m.num_vertices(), 29);
        assert_eq!(m.num_edges(), 46);
        assert_eq!(m.num_cells(), 18);
        assert!(has_vertex(&m, [0.3, 0.3]));
        assert!(has_vertex(&m, [0.125, 0.625]));
        assert!(has_vertex(&m, [0.375, 0.875]));
        assert_eq!(ndof_k2(&m), 177);
        let mut sizes: Vec<usize> = m.cells().iter().map(Vec::len).collect();
        sizes.sort();
        assert_eq!(sizes, [[3; 4].as_slice(), &[4; 9], &[5; 4], &[8]].concat());
    }

    #[test]
    fn level_one_matches_published_table() {
        let m = build_paper_mesh(1);
        assert_eq!(m.num_vertices(), 97);
        assert_eq!(m.num_cells(), 72);
        assert!(has_vertex(&m, [0.275, 0.275]));
        assert!(has_vertex(&m, [0.0625, 0.5625]));
        assert_eq!(ndof_k2(&m), 763);
    }

    #[test]
    fn generated_levels_cover_the_square() {
        for level in 2..=3 {
            let m = build_paper_mesh(level);
            assert_eq!(m.num_cells(), 18 << (2 * level));
            assert!((m.total_area() - 1.0).abs() < 1e-12);
            let boundary: f64 = m
                .edges()
                .iter()
                .filter(|e| e.is_boundary())
                .map(|e| crate::mesh::dist(m.vertex(e.vertices[0]), m.vertex(e.vertices[1])))
                .sum();
            assert!((boundary - 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn level_two_dof_count() {
        assert_eq!(ndof_k2(&build_paper_mesh(2)), 3171);
    }

    #[test]
    fn mesh_size_halves() {
        let h: Vec<f64> = (0..=4).map(|l| build_paper_mesh(l).h()).collect();
        for w in h.windows(2) {
            let r = w[1] / w[0];
            assert!((0.45..=0.55).contains(&r), "ratio {r}");
        }
    }

    #[test]
    fn subtriangulations_partition_every_cell() {
        for level in 0..=3 {
            let m = build_paper_mesh(level);
            for c in 0..m.num_cells() {
                let s = subtriangulate(&m, c).unwrap();
                let total: f64 = s.areas().iter().sum();
                let a = m.geometry(c).area;
                assert!((total - a).abs() <= 1e-12 * a);
                assert!(s.areas().iter().all(|&t| t > 0.0));
            }
        }
    }

    #[test]
    fn shape_regularity_is_uniform() {
        let r0 = check_shape_regularity(&build_paper_mesh(0));
        assert!(r0.min_gamma1() > 0.05 && r0.min_gamma2() > 0.05);
        for level in 1..=4 {
            let r = check_shape_regularity(&build_paper_mesh(level));
            assert!(r.min_gamma1() >= 0.9 * r0.min_gamma1(), "level {level}: {}", r.min_gamma1());
            assert!(r.min_gamma2() >= 0.9 * r0.min_gamma2(), "level {level}: {}", r.min_gamma2());
        }
    }
}
