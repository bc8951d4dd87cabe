use nalgebra::{DMatrix, DVector};

use super::rt::{legendre_unit, RtSpace};
use crate::error::{Error, Result};
use crate::polybasis::monomials::{embed_vector_columns, scalar_dim, vector_dim, ScaledFrame};
use crate::polybasis::quadrature::segment_points;
use crate::polybasis::gperp_basis;
use crate::vem::LocalSpace;
use crate::Point;

/// Relative pivot threshold used to discard dependent constraint rows.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Linear constraints `C w = G v` tying an RT field `w` to a virtual element
/// function `v` of the same cell.
///
/// Rows, all normalized by the measure of their support: divergence moments
/// per triangle against `P_m`, moments against the complement of
/// `grad P_m` in `P_{m-1}^2` on the cell, and normal flux moments against
/// `P_m` on every cell side.
#[derive(Debug, Clone)]
pub struct ConstraintSet {
    pub matrix: DMatrix<f64>,
    pub data: DMatrix<f64>,
    pub n_divergence: usize,
    pub n_moments: usize,
    pub n_flux: usize,
}

impl ConstraintSet {
    /// Right-hand side for the DOF vector `v`.
    pub fn rhs(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.data * v
    }

    pub fn len(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.matrix.nrows() == 0
    }
}

pub fn build_constraints(space: &LocalSpace, rt: &RtSpace) -> Result<ConstraintSet> {
    let m = rt.m;
    let k = space.k;
    if m + 1 > k {
        return Err(Error::OrderTooHigh { order: m, bound: k - 1 });
    }
    let nrt = rt.ndof();
    let nd = space.ndof();
    let frame = space.domain.frame;
    let div_mono = &space.pressure_basis * space.divergence_map();
    let nm = scalar_dim(m);

    let mut c_rows: Vec<DVector<f64>> = Vec::new();
    let mut g_rows: Vec<DVector<f64>> = Vec::new();

    for tri in &rt.triangles {
        let mut c = DMatrix::zeros(nm, nrt);
        let mut g = DMatrix::zeros(nm, scalar_dim(k - 1));
        for (x, w) in tri.quad.points.iter().zip(&tri.quad.weights) {
            let q = tri.frame.eval(m, *x);
            let (_, d) = tri.basis(m, *x);
            let mk = frame.eval(k - 1, *x);
            for i in 0..nm {
                let wq = w * q[i] / tri.area;
                for (l, dl) in d.iter().enumerate() {
                    c[(i, tri.dofs[l])] += wq * dl;
                }
                for (l, ml) in mk.iter().enumerate() {
                    g[(i, l)] += wq * ml;
                }
            }
        }
        let g = g * &div_mono;
        for i in 0..nm {
            c_rows.push(c.row(i).transpose());
            g_rows.push(g.row(i).transpose());
        }
    }
    let n_divergence = c_rows.len();

    if m >= 1 {
        let basis = gperp_basis(&space.domain, m - 1)?;
        if !basis.is_empty() {
            let emb = embed_vector_columns(&basis.coeffs, m - 1, k - 2);
            let g = emb.transpose() * space.classical_moments();
            let mut c = DMatrix::zeros(basis.dim(), nrt);
            for tri in &rt.triangles {
                for (x, w) in tri.quad.points.iter().zip(&tri.quad.weights) {
                    let (v, _) = tri.basis(m, *x);
                    for j in 0..basis.dim() {
                        let gj = frame.eval_vector_poly(m - 1, basis.coeffs.column(j).as_slice(), *x);
                        for (l, vl) in v.iter().enumerate() {
                            c[(j, tri.dofs[l])] += w * (gj[0] * vl[0] + gj[1] * vl[1]) / space.area();
                        }
                    }
                }
            }
            for j in 0..basis.dim() {
                c_rows.push(c.row(j).transpose());
                g_rows.push(g.row(j).transpose());
            }
        }
    }
    let n_moments = c_rows.len() - n_divergence;

    let n = space.points.len();
    let exactness = rt.exactness;
    for side in 0..n {
        let (a, b) = (space.points[side], space.points[(side + 1) % n]);
        let nrm = space.normals[side];
        let len = space.lengths[side];
        let t = side_triangle(rt, side, (side + 1) % n);
        let tri = &rt.triangles[t];
        let mut c = DMatrix::zeros(m + 1, nrt);
        for (x, s, w) in segment_points(a, b, exactness)? {
            let (v, _) = tri.basis(m, x);
            let l = legendre_unit(m, s);
            for j in 0..=m {
                for (i, vi) in v.iter().enumerate() {
                    c[(j, tri.dofs[i])] += w * l[j] * (vi[0] * nrm[0] + vi[1] * nrm[1]) / len;
                }
            }
        }
        let g = space.side_rows(side, m + 1, exactness, |_, s| {
            legendre_unit(m, s).into_iter().map(|l| [l * nrm[0] / len, l * nrm[1] / len]).collect()
        });
        for j in 0..=m {
            c_rows.push(c.row(j).transpose());
            g_rows.push(g.row(j).transpose());
        }
    }
    let n_flux = c_rows.len() - n_divergence - n_moments;

    let to_matrix = |rows: &[DVector<f64>], cols: usize| {
        let mut out = DMatrix::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            out.row_mut(i).copy_from(&r.transpose());
        }
        out
    };
    Ok(ConstraintSet {
        matrix: to_matrix(&c_rows, nrt),
        data: to_matrix(&g_rows, nd),
        n_divergence,
        n_moments,
        n_flux,
    })
}

fn side_triangle(rt: &RtSpace, a: usize, b: usize) -> usize {
    rt.triangles
        .iter()
        .position(|t| t.vertices.contains(&a) && t.vertices.contains(&b))
        .expect("every cell side belongs to a triangle")
}

/// Indices of a maximal independent subset of the rows of `c`, chosen by
/// column-pivoted Gram-Schmidt on `c^T` with a pivot threshold relative to
/// the largest pivot.
pub fn independent_rows(c: &DMatrix<f64>, tol: f64) -> Vec<usize> {
    let mut rows: Vec<DVector<f64>> = (0..c.nrows()).map(|i| c.row(i).transpose()).collect();
    let mut chosen = Vec::new();
    let mut remaining: Vec<usize> = (0..rows.len()).collect();
    let mut first = None;
    while !remaining.is_empty() {
        let (pos, norm) = remaining
            .iter()
            .enumerate()
            .map(|(p, &i)| (p, rows[i].norm()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty");
        let top = *first.get_or_insert(norm);
        if norm <= tol * top || norm == 0.0 {
            break;
        }
        let i = remaining.swap_remove(pos);
        let q = &rows[i] / norm;
        for &j in &remaining {
            for _ in 0..2 {
                let proj = rows[j].dot(&q);
                rows[j].axpy(-proj, &q, 1.0);
            }
        }
        chosen.push(i);
    }
    chosen.sort_unstable();
    chosen
}

/// The constrained reconstruction operator of one cell: `w = W v` minimizes
/// `|| w - Pi_grad v ||_{L2(K)}` over the RT fields satisfying the
/// [`ConstraintSet`].
#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub m: usize,
    pub rt: RtSpace,
    /// `dim RT x ndof`.
    pub matrix: DMatrix<f64>,
    pub constraints: ConstraintSet,
    /// Number of independent constraint rows.
    pub rank: usize,
}

impl Reconstruction {
    /// `exactness` is the quadrature exactness on the subtriangles.
    pub fn new(space: &LocalSpace, m: usize, exactness: usize) -> Result<Self> {
        if m + 1 > space.k {
            return Err(Error::OrderTooHigh { order: m, bound: space.k - 1 });
        }
        let rt = RtSpace::new(&space.sub, m, exactness.max(2 * space.k + 2))?;
        let constraints = build_constraints(space, &rt)?;
        let nrt = rt.ndof();
        let nd = space.ndof();
        let keep = independent_rows(&constraints.matrix, RANK_TOLERANCE);
        let r = keep.len();

        // objective: (1/|K|) || w - q ||^2 with q = Pi_grad v
        let area = space.area();
        let frame = space.domain.frame;
        let k = space.k;
        let nvk = vector_dim(k);
        let mut p = DMatrix::zeros(nrt, nvk);
        for tri in &rt.triangles {
            for (x, w) in tri.quad.points.iter().zip(&tri.quad.weights) {
                let (v, _) = tri.basis(m, *x);
                let mono = frame.eval(k, *x);
                let nk = mono.len();
                for (i, vi) in v.iter().enumerate() {
                    for (a, ma) in mono.iter().enumerate() {
                        p[(tri.dofs[i], a)] += w * ma * vi[0] / area;
                        p[(tri.dofs[i], nk + a)] += w * ma * vi[1] / area;
                    }
                }
            }
        }
        let mut kkt = DMatrix::zeros(nrt + r, nrt + r);
        kkt.view_mut((0, 0), (nrt, nrt)).copy_from(&(&rt.mass / area));
        let mut rhs = DMatrix::zeros(nrt + r, nd);
        rhs.view_mut((0, 0), (nrt, nd)).copy_from(&(p * space.gradient_projector()));
        for (row, &i) in keep.iter().enumerate() {
            let ci = constraints.matrix.row(i);
            kkt.view_mut((nrt + row, 0), (1, nrt)).copy_from(&ci);
            kkt.view_mut((0, nrt + row), (nrt, 1)).copy_from(&ci.transpose());
            rhs.view_mut((nrt + row, 0), (1, nd)).copy_from(&constraints.data.row(i));
        }
        let sol = kkt.lu().solve(&rhs).ok_or(Error::SingularLocalSystem { cell: space.cell })?;
        let matrix = sol.rows(0, nrt).into_owned();

        let residual = (&constraints.matrix * &matrix - &constraints.data).amax();
        let scale = constraints.data.amax().max(1.0);
        if !(residual <= 1e-8 * scale) {
            return Err(Error::InfeasibleConstraints { cell: space.cell, residual });
        }
        Ok(Self { m, rt, matrix, constraints, rank: r })
    }

    /// RT coefficients of the reconstruction of a local DOF vector.
    pub fn apply(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.matrix * v
    }

    /// `int_K f . (W phi_i)` for every local basis function `phi_i`.
    pub fn load(&self, f: impl Fn(Point) -> [f64; 2]) -> DVector<f64> {
        self.matrix.transpose() * self.rt.load(f)
    }
}

/// Reconstructs the RT field of a local DOF vector.
pub fn reconstruct(space: &LocalSpace, m: usize, v: &DVector<f64>) -> Result<DVector<f64>> {
    Ok(Reconstruction::new(space, m, 2 * space.k + 2)?.apply(v))
}

/// Canonical RT interpolant of a vector polynomial given in `frame`.
pub fn rt_interpolate_polynomial(rt: &RtSpace, frame: &ScaledFrame, degree: usize, coeffs: &DVector<f64>) -> DVector<f64> {
    rt.interpolate(|x| frame.eval_vector_poly(degree, coeffs.as_slice(), x))
}
