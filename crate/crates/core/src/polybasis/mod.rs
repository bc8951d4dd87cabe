//! Scaled polynomial bases on cells, the gradient / orthogonal-complement
//! splitting of vector polynomials, and quadrature.

mod gperp;
pub mod monomials;
pub mod quadrature;

use nalgebra::{DMatrix, DVector};

pub use gperp::{decompose_poly, gperp_basis, orthonormalize_against, GPerpBasis, PolyDecomposition};
pub use monomials::{scalar_dim, vector_dim, ScaledFrame};
pub use quadrature::{edge_rule, triangle_rule, CellQuadrature, QuadratureRule};

use crate::error::Result;
use crate::mesh::{PolygonalMesh, SubTriangulation};
use crate::Point;

/// Quadrature exactness used by assembly for order `k`.
pub fn default_exactness(k: usize) -> usize {
    (2 * k + 3).max(10)
}

/// A cell seen as an integration domain with its scaled-monomial frame.
///
/// Inner products are normalized by the cell area, `((f, g)) = |K|^{-1} int_K f g`,
/// so that Gram matrices and moment values are independent of the cell size.
#[derive(Debug, Clone)]
pub struct CellDomain {
    pub area: f64,
    pub frame: ScaledFrame,
    pub quad: CellQuadrature,
}

impl CellDomain {
    pub fn new(mesh: &PolygonalMesh, sub: &SubTriangulation, exactness: usize) -> Result<Self> {
        let geo = mesh.geometry(sub.cell);
        let quad = CellQuadrature::on_triangles(&sub.triangle_points(), exactness)?;
        Ok(Self { area: geo.area, frame: ScaledFrame::new(geo.centroid, geo.diameter), quad })
    }

    /// Normalized scalar Gram matrix of the monomials of degree `<= degree`.
    pub fn gram(&self, degree: usize) -> DMatrix<f64> {
        let n = scalar_dim(degree);
        let mut g = DMatrix::zeros(n, n);
        for (p, w) in self.quad.points.iter().zip(&self.quad.weights) {
            let v = self.frame.eval(degree, *p);
            for i in 0..n {
                let wi = w * v[i];
                for j in 0..=i {
                    g[(i, j)] += wi * v[j];
                }
            }
        }
        for i in 0..n {
            for j in 0..i {
                g[(j, i)] = g[(i, j)];
            }
        }
        g / self.area
    }

    /// Block-diagonal normalized Gram matrix of the vector monomials.
    pub fn vector_gram(&self, degree: usize) -> DMatrix<f64> {
        let g = self.gram(degree);
        let n = g.nrows();
        let mut out = DMatrix::zeros(2 * n, 2 * n);
        out.view_mut((0, 0), (n, n)).copy_from(&g);
        out.view_mut((n, n), (n, n)).copy_from(&g);
        out
    }

    /// Normalized means `((m_a, 1))` of the monomials.
    pub fn monomial_means(&self, degree: usize) -> DVector<f64> {
        let mut out = DVector::zeros(scalar_dim(degree));
        for (p, w) in self.quad.points.iter().zip(&self.quad.weights) {
            for (o, v) in out.iter_mut().zip(self.frame.eval(degree, *p)) {
                *o += w * v;
            }
        }
        out / self.area
    }

    /// Coefficients (columns) of a basis of `P_degree` orthonormal in the
    /// normalized inner product; column 0 is the constant 1 and all other
    /// columns have zero mean.
    pub fn orthonormal_scalar_basis(&self, degree: usize) -> DMatrix<f64> {
        let g = self.gram(degree);
        let l = g.cholesky().expect("monomial Gram matrix is positive definite").l();
        let n = l.nrows();
        l.transpose()
            .solve_upper_triangular(&DMatrix::identity(n, n))
            .expect("triangular factor is nonsingular")
    }

    pub fn integrate(&self, f: impl Fn(Point) -> f64) -> f64 {
        self.quad.integrate(f)
    }
}

/// `int_K f` over a cell via its subtriangulation.
pub fn integrate_on_cell(
    mesh: &PolygonalMesh,
    sub: &SubTriangulation,
    integrand: impl Fn(Point) -> f64,
    exactness: usize,
) -> Result<f64> {
    debug_assert!(sub.cell < mesh.num_cells());
    let quad = CellQuadrature::on_triangles(&sub.triangle_points(), exactness)?;
    Ok(quad.integrate(integrand))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{subtriangulate, PolygonalMesh};

    fn unit_square() -> PolygonalMesh {
        PolygonalMesh::new(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]], vec![vec![0, 1, 2, 3]], 0)
            .unwrap()
    }

    #[test]
    fn integrate_constants_and_linears() {
        let m = unit_square();
        let s = subtriangulate(&m, 0).unwrap();
        assert!((integrate_on_cell(&m, &s, |_| 1.0, 4).unwrap() - 1.0).abs() < 1e-15);
        assert!((integrate_on_cell(&m, &s, |x| x[0], 4).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn hydrostatic_pressure_has_zero_mean() {
        // 761/1260 is the exact mean of sum_j x^j y^(7-j) on the unit square
        // (sum_j 1/((j+1)(8-j)) evaluated in rationals).
        let mean: f64 = (0..=7).map(|j| 1.0 / ((j + 1) as f64 * (8 - j) as f64)).sum();
        assert!((mean - 761.0 / 1260.0).abs() < 1e-15);
        let m = unit_square();
        let s = subtriangulate(&m, 0).unwrap();
        let p = |x: Point| (0..=7).map(|j| x[0].powi(j) * x[1].powi(7 - j)).sum::<f64>() - 761.0 / 1260.0;
        assert!(integrate_on_cell(&m, &s, p, 10).unwrap().abs() < 1e-13);
    }

    #[test]
    fn orthonormal_basis_starts_with_constant() {
        let m = unit_square();
        let s = subtriangulate(&m, 0).unwrap();
        let d = CellDomain::new(&m, &s, 10).unwrap();
        let c = d.orthonormal_scalar_basis(2);
        assert!((c[(0, 0)] - 1.0).abs() < 1e-14);
        let g = d.gram(2);
        let id = c.transpose() * g * &c;
        assert!((id - DMatrix::<f64>::identity(6, 6)).amax() < 1e-12);
        let means = d.monomial_means(2);
        for j in 1..6 {
            assert!(c.column(j).dot(&means).abs() < 1e-13);
        }
    }
}
