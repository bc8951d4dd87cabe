use super::shape::kernel_center;
use super::{dist, signed_area, PolygonalMesh};
use crate::error::{Error, Result};
use crate::Point;

/// A triangulation of one cell without extra points on its boundary.
///
/// `points` holds the cell loop followed by the star point, if one was
/// inserted. Triangles index into `points` and are counterclockwise.
#[derive(Debug, Clone, PartialEq)]
pub struct SubTriangulation {
    pub cell: usize,
    pub points: Vec<Point>,
    pub triangles: Vec<[usize; 3]>,
    pub star: Option<Point>,
    /// Local index of the fan apex (`points.len() - 1` for a star point).
    pub apex: usize,
}

impl SubTriangulation {
    pub fn num_loop_vertices(&self) -> usize {
        self.points.len() - usize::from(self.star.is_some())
    }

    pub fn triangle_points(&self) -> Vec<[Point; 3]> {
        self.triangles.iter().map(|t| [self.points[t[0]], self.points[t[1]], self.points[t[2]]]).collect()
    }

    pub fn areas(&self) -> Vec<f64> {
        self.triangle_points().iter().map(|t| signed_area(t)).collect()
    }

    /// Sub-edges, as local point pairs `(a, b)` with `a < b`: first the cell
    /// sides in loop order, then the interior fan edges.
    pub fn edges(&self) -> Vec<[usize; 2]> {
        let n = self.num_loop_vertices();
        let mut out: Vec<[usize; 2]> = (0..n).map(|i| sorted(i, (i + 1) % n)).collect();
        match self.star {
            Some(_) => out.extend((0..n).map(|i| [i, n])),
            None => {
                let a = self.apex;
                out.extend((2..n - 1).map(|j| sorted(a, (a + j) % n)));
            }
        }
        out
    }
}

fn sorted(a: usize, b: usize) -> [usize; 2] {
    [a.min(b), a.max(b)]
}

/// Mean-ratio quality `4 sqrt(3) area / sum of squared sides`, 1 for equilateral.
fn quality(t: &[Point; 3]) -> f64 {
    let d2 = |a: Point, b: Point| (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2);
    4.0 * 3f64.sqrt() * signed_area(t) / (d2(t[0], t[1]) + d2(t[1], t[2]) + d2(t[2], t[0]))
}

fn fan(points: &[Point], apex: usize) -> Vec<[usize; 3]> {
    let n = points.len();
    (1..n - 1).map(|j| [apex, (apex + j) % n, (apex + j + 1) % n]).collect()
}

/// Splits a cell into triangles. A fan from a cell vertex is used when some
/// vertex sees the whole cell, choosing the vertex whose worst fan triangle has
/// the best shape (ties go to the lowest loop index). Otherwise a star point is
/// sampled from the kernel and the cell is fanned from it.
pub fn subtriangulate(mesh: &PolygonalMesh, cell: usize) -> Result<SubTriangulation> {
    let points = mesh.cell_points(cell);
    let h = mesh.geometry(cell).diameter;
    let n = points.len();
    let tol = 1e-10 * h;

    let mut best: Option<(usize, f64)> = None;
    for apex in 0..n {
        let sees_all = kernel_depth_excluding(&points, apex) >= -tol;
        if !sees_all {
            continue;
        }
        let tris = fan(&points, apex);
        let q = tris
            .iter()
            .map(|t| quality(&[points[t[0]], points[t[1]], points[t[2]]]))
            .fold(f64::INFINITY, f64::min);
        if q <= 1e-10 {
            continue;
        }
        if best.is_none_or(|(_, bq)| q > bq * (1.0 + 1e-12)) {
            best = Some((apex, q));
        }
    }
    if let Some((apex, _)) = best {
        return Ok(SubTriangulation { cell, triangles: fan(&points, apex), points, star: None, apex });
    }

    let (star, _) = kernel_center(&points).ok_or(Error::NotStarShaped { cell })?;
    let triangles = (0..n).map(|i| [n, i, (i + 1) % n]).collect();
    let mut pts = points;
    pts.push(star);
    Ok(SubTriangulation { cell, points: pts, triangles, star: Some(star), apex: n })
}

/// Kernel depth of a vertex, ignoring its two incident sides (on whose lines
/// it lies).
fn kernel_depth_excluding(points: &[Point], v: usize) -> f64 {
    let n = points.len();
    let x = points[v];
    (0..n)
        .filter(|&i| i != v && (i + 1) % n != v)
        .map(|i| {
            let (a, b) = (points[i], points[(i + 1) % n]);
            ((b[0] - a[0]) * (x[1] - a[1]) - (b[1] - a[1]) * (x[0] - a[0])) / dist(a, b)
        })
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(points: Vec<Point>) -> PolygonalMesh {
        let n = points.len();
        PolygonalMesh::new(points, vec![(0..n).collect()], 0).unwrap()
    }

    #[test]
    fn unit_square_fans_from_vertex_zero() {
        let m = single(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]);
        let s = subtriangulate(&m, 0).unwrap();
        assert_eq!(s.apex, 0);
        assert_eq!(s.triangles, vec![[0, 1, 2], [0, 2, 3]]);
        assert_eq!(s.areas(), vec![0.5, 0.5]);
    }

    #[test]
    fn hexagon_fans_from_first_vertex() {
        let polar = [(280.0, 2.0), (60.0, 10.0), (110.0, 11.0), (150.0, 11.0), (180.0, 11.0), (230.0, 11.0)];
        let pts: Vec<Point> = polar
            .iter()
            .map(|&(a, r): &(f64, f64)| [r * a.to_radians().cos(), r * a.to_radians().sin()])
            .collect();
        let m = single(pts);
        let s = subtriangulate(&m, 0).unwrap();
        assert_eq!(s.apex, 0);
        assert_eq!(s.triangles.len(), 4);
        assert!(s.star.is_none());
    }

    #[test]
    fn regular_pentagon_areas() {
        let pts: Vec<Point> = (0..5)
            .map(|i| {
                let t = 2.0 * std::f64::consts::PI * i as f64 / 5.0;
                [t.cos(), t.sin()]
            })
            .collect();
        // shoelace oracle, independent of the subtriangulation
        let mut shoelace = 0.0;
        for i in 0..5 {
            let (a, b) = (pts[i], pts[(i + 1) % 5]);
            shoelace += 0.5 * (a[0] * b[1] - a[1] * b[0]);
        }
        let s = subtriangulate(&single(pts), 0).unwrap();
        assert_eq!(s.triangles.len(), 3);
        let total: f64 = s.areas().iter().sum();
        assert!((total - shoelace).abs() < 1e-12 * shoelace);
    }

    #[test]
    fn neighbors_of_flat_vertex_are_not_fan_apexes() {
        // (1, 0.5) is a 180 degree vertex: fanning from either neighbor of it
        // would create a zero-area triangle
        let m = single(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 0.5], [1.0, 1.0], [0.0, 1.0]]);
        let s = subtriangulate(&m, 0).unwrap();
        assert!(s.apex != 1 && s.apex != 3);
        assert!(s.areas().iter().all(|&a| a > 0.1));
    }

    #[test]
    fn star_point_when_no_vertex_sees_everything() {
        // a plus-shaped cross: no vertex sees the opposite arm
        let m = single(vec![
            [1.0, 0.0],
            [2.0, 0.0],
            [2.0, 1.0],
            [3.0, 1.0],
            [3.0, 2.0],
            [2.0, 2.0],
            [2.0, 3.0],
            [1.0, 3.0],
            [1.0, 2.0],
            [0.0, 2.0],
            [0.0, 1.0],
            [1.0, 1.0],
        ]);
        let s = subtriangulate(&m, 0).unwrap();
        let star = s.star.expect("star point");
        assert!(star[0] > 1.0 && star[0] < 2.0 && star[1] > 1.0 && star[1] < 2.0);
        assert_eq!(s.triangles.len(), 12);
        let total: f64 = s.areas().iter().sum();
        assert!((total - 5.0).abs() < 1e-12);
        assert_eq!(s.edges().len(), 24);
    }

    #[test]
    fn comb_is_not_star_shaped() {
        let m = single(vec![
            [0.0, 0.0],
            [3.0, 0.0],
            [3.0, 3.0],
            [2.0, 3.0],
            [2.0, 0.2],
            [1.0, 0.2],
            [1.0, 3.0],
            [0.0, 3.0],
        ]);
        assert!(matches!(subtriangulate(&m, 0), Err(Error::NotStarShaped { cell: 0 })));
    }
}
