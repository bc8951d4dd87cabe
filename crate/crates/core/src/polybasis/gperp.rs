use nalgebra::{DMatrix, DVector};

use super::monomials::{scalar_dim, vector_dim};
use super::CellDomain;
use crate::error::{Error, Result};

/// Basis of the orthogonal complement of `grad P_{s+1}` inside `P_s^2`,
/// orthonormal in the normalized inner product of the cell.
///
/// Besides the basis itself this carries the linear maps that split any
/// `q in P_s^2` as `q = grad r + g` with `r` mean-free.
#[derive(Debug, Clone)]
pub struct GPerpBasis {
    pub degree: usize,
    /// Columns: basis members in vector-monomial coefficients of degree `s`.
    pub coeffs: DMatrix<f64>,
    potential_map: DMatrix<f64>,
    perp_map: DMatrix<f64>,
}

#[derive(Debug, Clone)]
pub struct PolyDecomposition {
    /// Mean-free scalar potential of degree `s + 1`.
    pub potential: DVector<f64>,
    /// The complement part, in vector-monomial coefficients of degree `s`.
    pub perp: DVector<f64>,
    /// The complement part in the orthonormal basis.
    pub perp_coords: DVector<f64>,
}

impl GPerpBasis {
    pub fn dim(&self) -> usize {
        self.coeffs.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.ncols() == 0
    }

    /// Maps `P_s^2` coefficients to the mean-free potential coefficients.
    pub fn potential_map(&self) -> &DMatrix<f64> {
        &self.potential_map
    }

    /// Maps `P_s^2` coefficients to coordinates in the orthonormal basis.
    pub fn perp_map(&self) -> &DMatrix<f64> {
        &self.perp_map
    }

    pub fn decompose(&self, q: &DVector<f64>) -> PolyDecomposition {
        let perp_coords = &self.perp_map * q;
        PolyDecomposition { potential: &self.potential_map * q, perp: &self.coeffs * &perp_coords, perp_coords }
    }
}

/// Modified Gram-Schmidt of `candidates` (columns) in the inner product
/// `gram`, against an already orthonormal `basis`. Candidates whose residual
/// norm falls below `tol` times their own norm are skipped.
pub fn orthonormalize_against(
    gram: &DMatrix<f64>,
    basis: &[DVector<f64>],
    candidates: impl IntoIterator<Item = DVector<f64>>,
    tol: f64,
) -> Vec<DVector<f64>> {
    let mut all: Vec<DVector<f64>> = basis.to_vec();
    let mut accepted = Vec::new();
    for c in candidates {
        let norm0 = c.dot(&(gram * &c)).max(0.0).sqrt();
        if norm0 == 0.0 {
            continue;
        }
        let mut r = c;
        for _ in 0..2 {
            for b in &all {
                let proj = b.dot(&(gram * &r));
                r -= b * proj;
            }
        }
        let norm = r.dot(&(gram * &r)).max(0.0).sqrt();
        if norm > tol * norm0 {
            r /= norm;
            all.push(r.clone());
            accepted.push(r);
        }
    }
    accepted
}

pub fn gperp_basis(domain: &CellDomain, s: usize) -> Result<GPerpBasis> {
    let n = vector_dim(s);
    let m = domain.vector_gram(s);
    let grad = domain.frame.gradient_matrix(s + 1);
    let n_grad = scalar_dim(s + 1) - 1;
    let grad_cols: Vec<DVector<f64>> =
        (1..=n_grad).map(|j| grad.column(j).into_owned() * domain.frame.h).collect();
    let grad_basis = orthonormalize_against(&m, &[], grad_cols, 1e-8);
    if grad_basis.len() != n_grad {
        return Err(Error::Rank { expected: n_grad, found: grad_basis.len() });
    }
    let candidates = (0..n).map(|i| {
        let mut e = DVector::zeros(n);
        e[i] = 1.0;
        e
    });
    let perp = orthonormalize_against(&m, &grad_basis, candidates, 1e-6);
    let expected = n - n_grad;
    if perp.len() != expected {
        return Err(Error::Rank { expected, found: perp.len() });
    }
    let coeffs = if perp.is_empty() { DMatrix::zeros(n, 0) } else { DMatrix::from_columns(&perp) };

    let perp_map = coeffs.transpose() * &m;
    let residual = DMatrix::identity(n, n) - &coeffs * &perp_map;
    let grad_nc = grad.columns(1, n_grad).into_owned();
    let pinv = grad_nc.pseudo_inverse(1e-13).map_err(|_| Error::Rank { expected: n_grad, found: 0 })?;
    let lifted = pinv * residual;
    let means = domain.monomial_means(s + 1);
    let mut potential_map = DMatrix::zeros(scalar_dim(s + 1), n);
    potential_map.rows_mut(1, n_grad).copy_from(&lifted);
    for j in 0..n {
        let mean: f64 = (1..=n_grad).map(|i| lifted[(i - 1, j)] * means[i]).sum();
        potential_map[(0, j)] = -mean;
    }
    Ok(GPerpBasis { degree: s, coeffs, potential_map, perp_map })
}

/// Splits `q in P_s^2` into `grad r + g` with `g` orthogonal to `grad P_{s+1}`.
pub fn decompose_poly(domain: &CellDomain, s: usize, q: &DVector<f64>) -> Result<PolyDecomposition> {
    Ok(gperp_basis(domain, s)?.decompose(q))
}
