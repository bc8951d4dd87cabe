use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::mesh::{dist, signed_area, SubTriangulation};
use crate::polybasis::monomials::{scalar_dim, ScaledFrame};
use crate::polybasis::quadrature::{segment_points, triangle_rule, CellQuadrature};
use crate::Point;

/// Shifted Legendre polynomials `P_j(2t - 1)`, `j = 0..=m`, at `t`.
pub fn legendre_unit(m: usize, t: f64) -> Vec<f64> {
    let x = 2.0 * t - 1.0;
    let mut out = Vec::with_capacity(m + 1);
    out.push(1.0);
    if m >= 1 {
        out.push(x);
    }
    for j in 2..=m {
        let jf = j as f64;
        out.push(((2.0 * jf - 1.0) * x * out[j - 1] - (jf - 1.0) * out[j - 2]) / jf);
    }
    out
}

/// Values and divergences of the spanning set of `RT_m` on a triangle:
/// `m_a e_x`, `m_a e_y` for `|a| <= m`, then `x_hat m_b` for `|b| = m`.
fn span(m: usize, frame: &ScaledFrame, x: Point) -> (Vec<[f64; 2]>, Vec<f64>) {
    let n = scalar_dim(m);
    let vals = frame.eval(m, x);
    let grads = frame.grad(m, x);
    let xh = frame.local(x);
    let mut v = Vec::with_capacity(2 * n + m + 1);
    let mut d = Vec::with_capacity(2 * n + m + 1);
    for i in 0..n {
        v.push([vals[i], 0.0]);
        d.push(grads[i][0]);
    }
    for i in 0..n {
        v.push([0.0, vals[i]]);
        d.push(grads[i][1]);
    }
    for i in scalar_dim(m) - (m + 1)..n {
        v.push([xh[0] * vals[i], xh[1] * vals[i]]);
        d.push((2 + m) as f64 * vals[i] / frame.h);
    }
    (v, d)
}

/// One triangle of the subtriangulation with its nodal `RT_m` basis.
#[derive(Debug, Clone)]
pub struct RtTriangle {
    pub vertices: [usize; 3],
    pub points: [Point; 3],
    pub frame: ScaledFrame,
    pub area: f64,
    /// Cell-level index of each local basis function.
    pub dofs: Vec<usize>,
    coeffs: DMatrix<f64>,
    pub quad: CellQuadrature,
}

impl RtTriangle {
    /// Values and divergences of the local basis functions at `x`.
    pub fn basis(&self, m: usize, x: Point) -> (Vec<[f64; 2]>, Vec<f64>) {
        let (sv, sd) = span(m, &self.frame, x);
        let n = self.coeffs.ncols();
        let mut v = vec![[0.0; 2]; n];
        let mut d = vec![0.0; n];
        for i in 0..n {
            for s in 0..sv.len() {
                let c = self.coeffs[(s, i)];
                v[i][0] += c * sv[s][0];
                v[i][1] += c * sv[s][1];
                d[i] += c * sd[s];
            }
        }
        (v, d)
    }

    pub fn contains(&self, x: Point, tol: f64) -> bool {
        let [a, b, c] = self.points;
        let s = |p: Point, q: Point| (q[0] - p[0]) * (x[1] - p[1]) - (q[1] - p[1]) * (x[0] - p[0]);
        let scale = tol * self.area;
        s(a, b) >= -scale && s(b, c) >= -scale && s(c, a) >= -scale
    }
}

/// The Raviart-Thomas space `RT_m` on the subtriangulation of one cell.
///
/// Degrees of freedom: on every sub-edge `E = (a, b)` (local point indices,
/// `a < b`, normal `n_E` pointing right of `a -> b`) the moments
/// `|E|^-1 int_E (w . n_E) l_j`, with `l_j` the shifted Legendre polynomials
/// in the parameter running from `a` to `b`; on every triangle the moments
/// `|T|^-1 int_T w . p` against vector scaled monomials of degree `m-1`.
#[derive(Debug, Clone)]
pub struct RtSpace {
    pub m: usize,
    pub sub: SubTriangulation,
    /// Sub-edges as local point pairs, cell sides first.
    pub edges: Vec<[usize; 2]>,
    pub triangles: Vec<RtTriangle>,
    pub mass: DMatrix<f64>,
    pub exactness: usize,
}

impl RtSpace {
    pub fn new(sub: &SubTriangulation, m: usize, exactness: usize) -> Result<Self> {
        let edges = sub.edges();
        let index: HashMap<[usize; 2], usize> = edges.iter().enumerate().map(|(i, e)| (*e, i)).collect();
        let n_edge_dofs = edges.len() * (m + 1);
        let n_int = m * (m + 1);
        let exactness = exactness.max(2 * m + 4);
        let rule = triangle_rule(exactness)?;
        let nloc = 3 * (m + 1) + n_int;

        let mut triangles = Vec::with_capacity(sub.triangles.len());
        for (t, tri) in sub.triangles.iter().enumerate() {
            let points = [sub.points[tri[0]], sub.points[tri[1]], sub.points[tri[2]]];
            let area = signed_area(&points);
            let centroid = [
                (points[0][0] + points[1][0] + points[2][0]) / 3.0,
                (points[0][1] + points[1][1] + points[2][1]) / 3.0,
            ];
            let diameter = dist(points[0], points[1]).max(dist(points[1], points[2])).max(dist(points[2], points[0]));
            let frame = ScaledFrame::new(centroid, diameter);
            let mut quad = CellQuadrature::default();
            quad.append_triangle(&points, &rule);

            let mut dofs = Vec::with_capacity(nloc);
            let mut functionals = DMatrix::zeros(nloc, 2 * scalar_dim(m) + m + 1);
            let mut row = 0;
            for j in 0..3 {
                let key = [tri[j].min(tri[(j + 1) % 3]), tri[j].max(tri[(j + 1) % 3])];
                let e = *index.get(&key).ok_or_else(|| Error::Topology("sub-edge missing".into()))?;
                let (pa, pb) = (sub.points[key[0]], sub.points[key[1]]);
                let len = dist(pa, pb);
                let nrm = [(pb[1] - pa[1]) / len, -(pb[0] - pa[0]) / len];
                for (x, s, w) in segment_points(pa, pb, 2 * m + 2)? {
                    let (sv, _) = span(m, &frame, x);
                    let l = legendre_unit(m, s);
                    for (jj, lj) in l.iter().enumerate() {
                        for (c, v) in sv.iter().enumerate() {
                            functionals[(row + jj, c)] += w * lj * (v[0] * nrm[0] + v[1] * nrm[1]) / len;
                        }
                    }
                }
                for jj in 0..=m {
                    dofs.push(e * (m + 1) + jj);
                }
                row += m + 1;
            }
            if m >= 1 {
                let nq = scalar_dim(m - 1);
                for (x, w) in quad.points.iter().zip(&quad.weights) {
                    let (sv, _) = span(m, &frame, *x);
                    let p = frame.eval(m - 1, *x);
                    for (c, v) in sv.iter().enumerate() {
                        for i in 0..nq {
                            functionals[(row + i, c)] += w * p[i] * v[0] / area;
                            functionals[(row + nq + i, c)] += w * p[i] * v[1] / area;
                        }
                    }
                }
                for i in 0..n_int {
                    dofs.push(n_edge_dofs + t * n_int + i);
                }
            }
            let coeffs = functionals
                .try_inverse()
                .ok_or_else(|| Error::Rank { expected: nloc, found: 0 })?;
            triangles.push(RtTriangle { vertices: *tri, points, frame, area, dofs, coeffs, quad });
        }

        let ndof = n_edge_dofs + sub.triangles.len() * n_int;
        let mut mass = DMatrix::zeros(ndof, ndof);
        for tri in &triangles {
            for (x, w) in tri.quad.points.iter().zip(&tri.quad.weights) {
                let (v, _) = tri.basis(m, *x);
                for (i, vi) in v.iter().enumerate() {
                    for (j, vj) in v.iter().enumerate() {
                        mass[(tri.dofs[i], tri.dofs[j])] += w * (vi[0] * vj[0] + vi[1] * vj[1]);
                    }
                }
            }
        }
        Ok(Self { m, sub: sub.clone(), edges, triangles, mass, exactness })
    }

    pub fn ndof(&self) -> usize {
        self.mass.nrows()
    }

    /// Evaluates an RT function on triangle `t`.
    pub fn eval_on(&self, coeffs: &DVector<f64>, t: usize, x: Point) -> ([f64; 2], f64) {
        let tri = &self.triangles[t];
        let (v, d) = tri.basis(self.m, x);
        let mut out = [0.0; 2];
        let mut div = 0.0;
        for (i, &g) in tri.dofs.iter().enumerate() {
            out[0] += coeffs[g] * v[i][0];
            out[1] += coeffs[g] * v[i][1];
            div += coeffs[g] * d[i];
        }
        (out, div)
    }

    /// Evaluates an RT function at a point of the cell.
    pub fn eval(&self, coeffs: &DVector<f64>, x: Point) -> [f64; 2] {
        let t = self.triangles.iter().position(|t| t.contains(x, 1e-12)).unwrap_or(0);
        self.eval_on(coeffs, t, x).0
    }

    /// The canonical functionals applied to a pointwise field.
    pub fn interpolate(&self, f: impl Fn(Point) -> [f64; 2]) -> DVector<f64> {
        let m = self.m;
        let mut out = DVector::zeros(self.ndof());
        let exact = self.exactness;
        for (e, &[a, b]) in self.edges.iter().enumerate() {
            let (pa, pb) = (self.sub.points[a], self.sub.points[b]);
            let len = dist(pa, pb);
            let nrm = [(pb[1] - pa[1]) / len, -(pb[0] - pa[0]) / len];
            for (x, s, w) in segment_points(pa, pb, exact).expect("edge exactness within range") {
                let v = f(x);
                for (j, lj) in legendre_unit(m, s).iter().enumerate() {
                    out[e * (m + 1) + j] += w * lj * (v[0] * nrm[0] + v[1] * nrm[1]) / len;
                }
            }
        }
        if m >= 1 {
            let nq = scalar_dim(m - 1);
            let n_int = m * (m + 1);
            let base = self.edges.len() * (m + 1);
            for (t, tri) in self.triangles.iter().enumerate() {
                for (x, w) in tri.quad.points.iter().zip(&tri.quad.weights) {
                    let v = f(*x);
                    let p = tri.frame.eval(m - 1, *x);
                    for i in 0..nq {
                        out[base + t * n_int + i] += w * p[i] * v[0] / tri.area;
                        out[base + t * n_int + nq + i] += w * p[i] * v[1] / tri.area;
                    }
                }
            }
        }
        out
    }

    /// `int_K f . phi_i` for every basis function.
    pub fn load(&self, f: impl Fn(Point) -> [f64; 2]) -> DVector<f64> {
        let mut out = DVector::zeros(self.ndof());
        for tri in &self.triangles {
            for (x, w) in tri.quad.points.iter().zip(&tri.quad.weights) {
                let fx = f(*x);
                let (v, _) = tri.basis(self.m, *x);
                for (i, vi) in v.iter().enumerate() {
                    out[tri.dofs[i]] += w * (fx[0] * vi[0] + fx[1] * vi[1]);
                }
            }
        }
        out
    }

    /// `L2(T)` projection onto `P_m(T)` of the divergence of an RT function,
    /// in the triangle's scaled monomials.
    pub fn divergence_coefficients(&self, coeffs: &DVector<f64>, t: usize) -> DVector<f64> {
        self.project_scalar(t, |x| self.eval_on(coeffs, t, x).1)
    }

    /// `L2(T)` projection onto `P_m(T)` of a scalar function.
    pub fn project_scalar(&self, t: usize, f: impl Fn(Point) -> f64) -> DVector<f64> {
        let tri = &self.triangles[t];
        let n = scalar_dim(self.m);
        let mut g = DMatrix::zeros(n, n);
        let mut r = DVector::zeros(n);
        for (x, w) in tri.quad.points.iter().zip(&tri.quad.weights) {
            let p = tri.frame.eval(self.m, *x);
            let fx = f(*x);
            for i in 0..n {
                r[i] += w * p[i] * fx;
                for j in 0..n {
                    g[(i, j)] += w * p[i] * p[j];
                }
            }
        }
        g.lu().solve(&r).expect("triangle Gram matrix is nonsingular")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{subtriangulate, PolygonalMesh};

    fn square_sub() -> SubTriangulation {
        let m = PolygonalMesh::new(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]], vec![vec![0, 1, 2, 3]], 0)
            .unwrap();
        subtriangulate(&m, 0).unwrap()
    }

    #[test]
    fn legendre_values() {
        let l = legendre_unit(3, 0.75);
        let x: f64 = 0.5;
        assert_eq!(l[0], 1.0);
        assert!((l[1] - x).abs() < 1e-15);
        assert!((l[2] - 0.5 * (3.0 * x * x - 1.0)).abs() < 1e-15);
        assert!((l[3] - 0.5 * (5.0 * x.powi(3) - 3.0 * x)).abs() < 1e-15);
    }

    #[test]
    fn dimensions() {
        let s = square_sub();
        for m in 0..3 {
            let rt = RtSpace::new(&s, m, 10).unwrap();
            assert_eq!(rt.ndof(), 5 * (m + 1) + 2 * m * (m + 1));
        }
    }

    #[test]
    fn nodal_basis_is_dual_to_the_functionals() {
        let s = square_sub();
        for m in 0..3 {
            let rt = RtSpace::new(&s, m, 10).unwrap();
            for i in 0..rt.ndof() {
                let mut c = DVector::zeros(rt.ndof());
                c[i] = 1.0;
                let back = rt.interpolate(|x| rt.eval(&c, x));
                assert!((back - c).amax() < 1e-11, "m={m} i={i}");
            }
        }
    }

    #[test]
    fn constants_are_reproduced() {
        let s = square_sub();
        for m in 0..3 {
            let rt = RtSpace::new(&s, m, 10).unwrap();
            let c = rt.interpolate(|_| [0.3, -2.0]);
            for x in [[0.2, 0.1], [0.7, 0.9], [0.5, 0.5]] {
                let v = rt.eval(&c, x);
                assert!((v[0] - 0.3).abs() < 1e-12 && (v[1] + 2.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn mass_matrix_is_symmetric_positive() {
        let rt = RtSpace::new(&square_sub(), 1, 10).unwrap();
        assert!((&rt.mass - rt.mass.transpose()).amax() < 1e-14);
        assert!(rt.mass.clone().cholesky().is_some());
    }
}
