//! Scaled monomials `m_a(x) = ((x - x_K) / h_K)^a` and the linear maps
//! (gradient, divergence, Laplacian) between their coefficient spaces.
//!
//! Scalar monomials are ordered by total degree, and within a degree by
//! decreasing power of `x`: `1, x, y, x^2, xy, y^2, ...`. Vector polynomials
//! of degree `s` use `2 * dim(s)` coefficients, x-component block first.

use nalgebra::{DMatrix, DVector};

use crate::Point;

pub const fn scalar_dim(degree: usize) -> usize {
    (degree + 1) * (degree + 2) / 2
}

pub const fn vector_dim(degree: usize) -> usize {
    (degree + 1) * (degree + 2)
}

/// Exponent pairs of all monomials of total degree `<= degree`.
pub fn exponents(degree: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(scalar_dim(degree));
    for d in 0..=degree {
        for b in 0..=d {
            out.push((d - b, b));
        }
    }
    out
}

pub fn index_of(a: usize, b: usize) -> usize {
    let d = a + b;
    d * (d + 1) / 2 + b
}

/// Affine frame of a scaled monomial basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledFrame {
    pub center: Point,
    pub h: f64,
}

impl ScaledFrame {
    pub fn new(center: Point, h: f64) -> Self {
        Self { center, h }
    }

    #[inline]
    pub fn local(&self, x: Point) -> Point {
        [(x[0] - self.center[0]) / self.h, (x[1] - self.center[1]) / self.h]
    }

    /// Values of all monomials of degree `<= degree` at `x`.
    pub fn eval(&self, degree: usize, x: Point) -> Vec<f64> {
        let [u, v] = self.local(x);
        let mut out = Vec::with_capacity(scalar_dim(degree));
        let mut row = vec![1.0];
        out.push(1.0);
        for _ in 1..=degree {
            let mut next = Vec::with_capacity(row.len() + 1);
            for r in &row {
                next.push(r * u);
            }
            next.push(row.last().unwrap() * v);
            out.extend_from_slice(&next);
            row = next;
        }
        out
    }

    /// True gradients (with respect to `x`, not the scaled variable).
    pub fn grad(&self, degree: usize, x: Point) -> Vec<[f64; 2]> {
        let vals = self.eval(degree.saturating_sub(1), x);
        exponents(degree)
            .into_iter()
            .map(|(a, b)| {
                let gx = if a > 0 { a as f64 * vals[index_of(a - 1, b)] } else { 0.0 };
                let gy = if b > 0 { b as f64 * vals[index_of(a, b - 1)] } else { 0.0 };
                [gx / self.h, gy / self.h]
            })
            .collect()
    }

    pub fn eval_poly(&self, degree: usize, coeffs: &[f64], x: Point) -> f64 {
        self.eval(degree, x).iter().zip(coeffs).map(|(a, b)| a * b).sum()
    }

    pub fn eval_vector_poly(&self, degree: usize, coeffs: &[f64], x: Point) -> [f64; 2] {
        let n = scalar_dim(degree);
        let vals = self.eval(degree, x);
        let mut out = [0.0; 2];
        for i in 0..n {
            out[0] += vals[i] * coeffs[i];
            out[1] += vals[i] * coeffs[n + i];
        }
        out
    }

    /// Matrix of the true gradient `P_s -> P_{s-1}^2`.
    pub fn gradient_matrix(&self, degree: usize) -> DMatrix<f64> {
        assert!(degree >= 1);
        let n_out = scalar_dim(degree - 1);
        let mut g = DMatrix::zeros(2 * n_out, scalar_dim(degree));
        for (j, (a, b)) in exponents(degree).into_iter().enumerate() {
            if a > 0 {
                g[(index_of(a - 1, b), j)] = a as f64 / self.h;
            }
            if b > 0 {
                g[(n_out + index_of(a, b - 1), j)] = b as f64 / self.h;
            }
        }
        g
    }

    /// Matrix of the divergence `P_s^2 -> P_{s-1}`.
    pub fn divergence_matrix(&self, degree: usize) -> DMatrix<f64> {
        let g = self.gradient_matrix(degree);
        let n_in = scalar_dim(degree);
        let n_out = scalar_dim(degree - 1);
        let mut d = DMatrix::zeros(n_out, 2 * n_in);
        d.view_mut((0, 0), (n_out, n_in)).copy_from(&g.rows(0, n_out));
        d.view_mut((0, n_in), (n_out, n_in)).copy_from(&g.rows(n_out, n_out));
        d
    }

    /// Matrix of the componentwise Laplacian `P_s^2 -> P_{s-2}^2`.
    pub fn vector_laplacian_matrix(&self, degree: usize) -> DMatrix<f64> {
        assert!(degree >= 2);
        let n_in = scalar_dim(degree);
        let n_out = scalar_dim(degree - 2);
        let mut lap = DMatrix::zeros(n_out, n_in);
        let h2 = self.h * self.h;
        for (j, (a, b)) in exponents(degree).into_iter().enumerate() {
            if a >= 2 {
                lap[(index_of(a - 2, b), j)] += (a * (a - 1)) as f64 / h2;
            }
            if b >= 2 {
                lap[(index_of(a, b - 2), j)] += (b * (b - 1)) as f64 / h2;
            }
        }
        let mut out = DMatrix::zeros(2 * n_out, 2 * n_in);
        out.view_mut((0, 0), (n_out, n_in)).copy_from(&lap);
        out.view_mut((n_out, n_in), (n_out, n_in)).copy_from(&lap);
        out
    }
}

/// Embeds coefficients of a degree-`from` polynomial into degree `to >= from`.
pub fn embed_scalar(coeffs: &DVector<f64>, to: usize) -> DVector<f64> {
    let mut out = DVector::zeros(scalar_dim(to));
    out.rows_mut(0, coeffs.len()).copy_from(coeffs);
    out
}

pub fn embed_vector(coeffs: &DVector<f64>, from: usize, to: usize) -> DVector<f64> {
    let (n_from, n_to) = (scalar_dim(from), scalar_dim(to));
    let mut out = DVector::zeros(2 * n_to);
    out.rows_mut(0, n_from).copy_from(&coeffs.rows(0, n_from));
    out.rows_mut(n_to, n_from).copy_from(&coeffs.rows(n_from, n_from));
    out
}

/// Column-wise [`embed_vector`].
pub fn embed_vector_columns(m: &DMatrix<f64>, from: usize, to: usize) -> DMatrix<f64> {
    let (n_from, n_to) = (scalar_dim(from), scalar_dim(to));
    let mut out = DMatrix::zeros(2 * n_to, m.ncols());
    out.view_mut((0, 0), (n_from, m.ncols())).copy_from(&m.rows(0, n_from));
    out.view_mut((n_to, 0), (n_from, m.ncols())).copy_from(&m.rows(n_from, n_from));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering() {
        assert_eq!(exponents(2), vec![(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]);
        for (i, (a, b)) in exponents(5).into_iter().enumerate() {
            assert_eq!(index_of(a, b), i);
        }
    }

    #[test]
    fn gradient_matches_pointwise() {
        let f = ScaledFrame::new([0.3, -0.2], 0.7);
        let g = f.gradient_matrix(3);
        let x = [0.41, 0.05];
        let pts = f.grad(3, x);
        let lower = f.eval(2, x);
        for j in 0..scalar_dim(3) {
            let gx: f64 = (0..scalar_dim(2)).map(|i| g[(i, j)] * lower[i]).sum();
            let gy: f64 = (0..scalar_dim(2)).map(|i| g[(scalar_dim(2) + i, j)] * lower[i]).sum();
            assert!((gx - pts[j][0]).abs() < 1e-13 && (gy - pts[j][1]).abs() < 1e-13);
        }
    }

    #[test]
    fn laplacian_of_quadratic() {
        let f = ScaledFrame::new([0.0, 0.0], 2.0);
        // (x^2 + y^2, xy) in scaled variables -> Laplacian (4/h^2, 0)
        let mut c = DVector::zeros(12);
        c[3] = 1.0;
        c[5] = 1.0;
        c[6 + 4] = 1.0;
        let lap = f.vector_laplacian_matrix(2) * c;
        assert!((lap[0] - 1.0).abs() < 1e-15 && lap[1].abs() < 1e-15);
    }
}
