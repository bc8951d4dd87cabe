use nalgebra::{DMatrix, DVector};

use super::layout::LocalLayout;
use crate::error::{Error, Result};
use crate::mesh::{subtriangulate, CellSide, PolygonalMesh, SubTriangulation};
use crate::polybasis::monomials::{embed_vector_columns, exponents, scalar_dim, vector_dim};
use crate::polybasis::quadrature::{gauss_lobatto_unit, segment_points};
use crate::polybasis::{gperp_basis, orthonormalize_against, CellDomain, GPerpBasis};
use crate::Point;

/// The local virtual element space of one cell with all computable
/// operators precomputed from its degrees of freedom.
///
/// Polynomial coefficients refer to the cell's scaled monomials; vector
/// polynomials of degree `s` store the x block then the y block. Pressure-like
/// scalars of degree `k-1` are stored in the orthonormal basis
/// [`LocalSpace::pressure_basis`], whose first member is the constant 1.
#[derive(Debug, Clone)]
pub struct LocalSpace {
    pub cell: usize,
    pub k: usize,
    pub layout: LocalLayout,
    pub points: Vec<Point>,
    pub sides: Vec<CellSide>,
    pub normals: Vec<[f64; 2]>,
    pub lengths: Vec<f64>,
    pub sub: SubTriangulation,
    pub domain: CellDomain,
    /// Trace interpolation nodes on `[0, 1]`, endpoints included.
    pub nodes: Vec<f64>,
    pub gperp: GPerpBasis,
    pub pressure_basis: DMatrix<f64>,
    gram: DMatrix<f64>,
    flux: DMatrix<f64>,
    div_map: DMatrix<f64>,
    moments: DMatrix<f64>,
    pi_grad: DMatrix<f64>,
    pi_k: DMatrix<f64>,
    poly_dofs: DMatrix<f64>,
    stiffness: DMatrix<f64>,
}

/// Values of the Lagrange basis on `nodes` at `t`.
pub fn lagrange(nodes: &[f64], t: f64) -> Vec<f64> {
    (0..nodes.len())
        .map(|m| {
            nodes
                .iter()
                .enumerate()
                .filter(|&(l, _)| l != m)
                .map(|(_, &tl)| (t - tl) / (nodes[m] - tl))
                .product()
        })
        .collect()
}

fn block_diag(g: &DMatrix<f64>) -> DMatrix<f64> {
    let n = g.nrows();
    let mut out = DMatrix::zeros(2 * n, 2 * n);
    out.view_mut((0, 0), (n, n)).copy_from(g);
    out.view_mut((n, n), (n, n)).copy_from(g);
    out
}

/// Rows of a degree-`s` vector polynomial inside the degree-`t` layout.
pub(crate) fn vector_rows(s: usize, t: usize) -> Vec<usize> {
    let (ns, nt) = (scalar_dim(s), scalar_dim(t));
    (0..ns).chain(nt..nt + ns).collect()
}

impl LocalSpace {
    pub fn new(mesh: &PolygonalMesh, cell: usize, k: usize, exactness: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidSpec(format!("order k = {k} is not supported (k >= 2)")));
        }
        let sub = subtriangulate(mesh, cell)?;
        let domain = CellDomain::new(mesh, &sub, exactness.max(2 * k + 2))?;
        let geo = mesh.geometry(cell);
        let points = mesh.cell_points(cell);
        let layout = LocalLayout::new(k, points.len());
        let gperp = gperp_basis(&domain, k - 2)?;
        let pressure_basis = domain.orthonormal_scalar_basis(k - 1);
        let gram = domain.gram(k + 1);
        let mut space = Self {
            cell,
            k,
            layout,
            points,
            sides: mesh.sides(cell).to_vec(),
            normals: geo.normals.clone(),
            lengths: geo.lengths.clone(),
            sub,
            domain,
            nodes: gauss_lobatto_unit(k + 1),
            gperp,
            pressure_basis,
            gram,
            flux: DMatrix::zeros(0, 0),
            div_map: DMatrix::zeros(0, 0),
            moments: DMatrix::zeros(0, 0),
            pi_grad: DMatrix::zeros(0, 0),
            pi_k: DMatrix::zeros(0, 0),
            poly_dofs: DMatrix::zeros(0, 0),
            stiffness: DMatrix::zeros(0, 0),
        };
        space.build()?;
        Ok(space)
    }

    pub fn ndof(&self) -> usize {
        self.layout.len()
    }

    pub fn area(&self) -> f64 {
        self.domain.area
    }

    pub fn h(&self) -> f64 {
        self.domain.frame.h
    }

    /// Normalized Gram matrix of scalar monomials up to degree `s <= k+1`.
    pub fn gram(&self, s: usize) -> DMatrix<f64> {
        let n = scalar_dim(s);
        self.gram.view((0, 0), (n, n)).into_owned()
    }

    pub fn vector_gram(&self, s: usize) -> DMatrix<f64> {
        block_diag(&self.gram(s))
    }

    /// `sum_E int_E f(x) . v ds` for every row of `f`, as a `rows x ndof`
    /// matrix acting on local DOF vectors. The trace of `v` on each side is the
    /// degree-`k` interpolant of its vertex and edge-point values.
    pub fn boundary_rows(&self, rows: usize, f: impl Fn(usize, Point) -> Vec<[f64; 2]>) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(rows, self.ndof());
        for side in 0..self.points.len() {
            self.add_side_rows(&mut out, side, 2 * self.k + 2, |x, _| f(side, x));
        }
        out
    }

    /// Like [`LocalSpace::boundary_rows`] for a single side; the integrand also
    /// receives the side parameter `t in [0, 1]` (counterclockwise).
    pub fn side_rows(
        &self,
        side: usize,
        rows: usize,
        exactness: usize,
        f: impl Fn(Point, f64) -> Vec<[f64; 2]>,
    ) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(rows, self.ndof());
        self.add_side_rows(&mut out, side, exactness, f);
        out
    }

    fn add_side_rows(
        &self,
        out: &mut DMatrix<f64>,
        side: usize,
        exactness: usize,
        f: impl Fn(Point, f64) -> Vec<[f64; 2]>,
    ) {
        let n = self.points.len();
        let (a, b) = (self.points[side], self.points[(side + 1) % n]);
        for (x, t, w) in segment_points(a, b, exactness).expect("edge exactness within range") {
            let lag = lagrange(&self.nodes, t);
            let vals = f(x, t);
            for (r, fv) in vals.iter().enumerate() {
                for (m, l) in lag.iter().enumerate() {
                    for c in 0..2 {
                        out[(r, self.layout.side_node(side, m, c))] += w * l * fv[c];
                    }
                }
            }
        }
    }

    /// Trace of a local DOF vector at parameter `t` of `side`.
    pub fn trace(&self, v: &DVector<f64>, side: usize, t: f64) -> [f64; 2] {
        let lag = lagrange(&self.nodes, t);
        let mut out = [0.0; 2];
        for (m, l) in lag.iter().enumerate() {
            for (c, o) in out.iter_mut().enumerate() {
                *o += l * v[self.layout.side_node(side, m, c)];
            }
        }
        out
    }

    fn build(&mut self) -> Result<()> {
        let k = self.k;
        let area = self.area();
        let h = self.h();
        let frame = self.domain.frame;
        let lay = self.layout;
        let nd = self.ndof();
        let (n1, nk, nkm1, nkm2) = (scalar_dim(k + 1), scalar_dim(k), scalar_dim(k - 1), scalar_dim(k - 2));

        // (1/|K|) int_dK m_b (v . n) for monomials up to degree k+1
        let normals = self.normals.clone();
        self.flux = self.boundary_rows(n1, |side, x| {
            let nrm = normals[side];
            frame.eval(k + 1, x).into_iter().map(|m| [m * nrm[0], m * nrm[1]]).collect()
        }) / area;

        // divergence in the orthonormal pressure basis
        let mut div_map = DMatrix::zeros(nkm1, nd);
        div_map.row_mut(0).copy_from(&self.flux.row(0));
        for j in 1..nkm1 {
            div_map[(j, lay.div(j - 1))] = 1.0 / h;
        }
        self.div_map = div_map;
        let div_mono = &self.pressure_basis * &self.div_map;

        // normalized moments against vector monomials of degree k-2
        let g_km1 = self.gram(k - 1);
        let r_div = &g_km1 * &div_mono;
        let flux_km1 = self.flux.rows(0, nkm1).into_owned();
        let mut moments = DMatrix::zeros(2 * nkm2, nd);
        for e in 0..2 * nkm2 {
            let mut q = DVector::zeros(2 * nkm2);
            q[e] = 1.0;
            let dec = self.gperp.decompose(&q);
            let mut row = (dec.potential.transpose() * (&flux_km1 - &r_div)).transpose();
            for (j, c) in dec.perp_coords.iter().enumerate() {
                row[lay.gperp(j)] += c;
            }
            moments.row_mut(e).copy_from(&row.transpose());
        }
        self.moments = moments;

        // DOFs of every vector monomial of degree k
        let nvk = vector_dim(k);
        let mass_k = self.vector_gram(k);
        let g_emb = embed_vector_columns(&self.gperp.coeffs, k - 2, k);
        let div_k = frame.divergence_matrix(k);
        let mut poly_dofs = DMatrix::zeros(nd, nvk);
        for col in 0..nvk {
            let mut q = DVector::zeros(nvk);
            q[col] = 1.0;
            poly_dofs.set_column(col, &self.dofs_from_coeffs(&q, &mass_k, &g_emb, &div_k, &g_km1));
        }
        self.poly_dofs = poly_dofs;

        // energy projector
        let grad_k = frame.gradient_matrix(k);
        let stiff_scalar = grad_k.transpose() * self.vector_gram(k - 1) * &grad_k;
        self.stiffness = block_diag(&stiff_scalar);
        let normals = self.normals.clone();
        let bnd_grad = self.boundary_rows(nvk, |side, x| {
            let nrm = normals[side];
            let g = frame.grad(k, x);
            let mut rows = vec![[0.0; 2]; nvk];
            for (a, ga) in g.iter().enumerate() {
                let dn = ga[0] * nrm[0] + ga[1] * nrm[1];
                rows[a] = [dn, 0.0];
                rows[nk + a] = [0.0, dn];
            }
            rows
        }) / area;
        let lap = frame.vector_laplacian_matrix(k);
        let mut rhs = bnd_grad - lap.transpose() * &self.moments;
        let mut lhs = self.stiffness.clone();
        let means = self.gram.row(0).columns(0, nk).into_owned();
        for (c, row) in [0, nk].into_iter().enumerate() {
            lhs.row_mut(row).fill(0.0);
            lhs.view_mut((row, c * nk), (1, nk)).copy_from(&means);
            rhs.row_mut(row).copy_from(&self.moments.row(c * nkm2));
        }
        let lu = lhs.lu();
        let pi_grad = lu.solve(&rhs).ok_or(Error::SingularLocalSystem { cell: self.cell })?;
        let check = &pi_grad * &self.poly_dofs - DMatrix::identity(nvk, nvk);
        if !(check.amax() < 1e-8) {
            return Err(Error::SingularLocalSystem { cell: self.cell });
        }
        self.pi_grad = pi_grad;

        // enhanced L2 projection onto P_k^2
        let grad_k1 = frame.gradient_matrix(k + 1);
        let mut cols: Vec<DVector<f64>> = Vec::new();
        let mut rows: Vec<DVector<f64>> = Vec::new();
        let div_in_k1 = self.gram.columns(0, nkm1) * &div_mono;
        for b in 1..n1 {
            cols.push(grad_k1.column(b).into_owned() * h);
            rows.push(((self.flux.row(b) - div_in_k1.row(b)) * h).transpose());
        }
        for j in 0..self.gperp.dim() {
            cols.push(g_emb.column(j).into_owned());
            let mut r = DVector::zeros(nd);
            r[lay.gperp(j)] = 1.0;
            rows.push(r);
        }
        let spanned = orthonormalize_against(&mass_k, &[], cols.clone(), 1e-10);
        if spanned.len() != cols.len() {
            return Err(Error::Rank { expected: cols.len(), found: spanned.len() });
        }
        let units = (0..nvk).map(|i| {
            let mut e = DVector::zeros(nvk);
            e[i] = 1.0;
            e
        });
        let extra = orthonormalize_against(&mass_k, &spanned, units, 1e-6);
        if extra.len() != nvk - cols.len() {
            return Err(Error::Rank { expected: nvk - cols.len(), found: extra.len() });
        }
        let mk_pi = &mass_k * &self.pi_grad;
        for hcol in extra {
            rows.push((hcol.transpose() * &mk_pi).transpose());
            cols.push(hcol);
        }
        let basis = DMatrix::from_columns(&cols);
        let tmat = DMatrix::from_rows(&rows.iter().map(|r| r.transpose()).collect::<Vec<_>>());
        let sys = basis.transpose() * &mass_k;
        self.pi_k = sys.lu().solve(&tmat).ok_or(Error::SingularLocalSystem { cell: self.cell })?;
        Ok(())
    }

    fn dofs_from_coeffs(
        &self,
        q: &DVector<f64>,
        mass_k: &DMatrix<f64>,
        g_emb: &DMatrix<f64>,
        div_k: &DMatrix<f64>,
        g_km1: &DMatrix<f64>,
    ) -> DVector<f64> {
        let k = self.k;
        let lay = self.layout;
        let frame = self.domain.frame;
        let mut out = DVector::zeros(self.ndof());
        let n = self.points.len();
        for side in 0..n {
            let (a, b) = (self.points[side], self.points[(side + 1) % n]);
            for m in 0..k {
                let t = self.nodes[m];
                let x = [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
                let v = frame.eval_vector_poly(k, q.as_slice(), x);
                for c in 0..2 {
                    out[lay.side_node(side, m, c)] = v[c];
                }
            }
        }
        let g = g_emb.transpose() * (mass_k * q);
        for j in 0..g.len() {
            out[lay.gperp(j)] = g[j];
        }
        let d = self.pressure_basis.transpose() * (g_km1 * (div_k * q));
        for j in 1..d.len() {
            out[lay.div(j - 1)] = self.h() * d[j];
        }
        out
    }

    /// DOFs of a vector polynomial of degree `<= k` (coefficients of degree `k`).
    pub fn dofs_of_polynomial(&self, q: &DVector<f64>) -> DVector<f64> {
        &self.poly_dofs * q
    }

    /// `ndof x dim P_k^2`: DOFs of each vector monomial.
    pub fn polynomial_dofs(&self) -> &DMatrix<f64> {
        &self.poly_dofs
    }

    /// Energy projector `ndof -> P_k^2` coefficients.
    pub fn gradient_projector(&self) -> &DMatrix<f64> {
        &self.pi_grad
    }

    /// `L2` projector onto `P_s^2` (coefficients of degree `s`). The classical
    /// space reaches `s <= k-2`; the enhanced space reaches `s <= k`.
    pub fn l2_projector(&self, s: usize, enhanced: bool) -> Result<DMatrix<f64>> {
        let k = self.k;
        let bound = if enhanced { k } else { k - 2 };
        if s > bound {
            return Err(Error::OrderTooHigh { order: s, bound });
        }
        let mom = if enhanced { self.vector_gram(k) * &self.pi_k } else { self.moments.clone() };
        let from = if enhanced { k } else { k - 2 };
        let rows = vector_rows(s, from);
        let sel = mom.select_rows(rows.iter());
        let g = self.vector_gram(s);
        Ok(g.lu().solve(&sel).expect("monomial Gram matrix is nonsingular"))
    }

    /// Normalized moments `((v, m e_c))` against all vector monomials of
    /// degree `k-2`.
    pub fn classical_moments(&self) -> &DMatrix<f64> {
        &self.moments
    }

    /// Normalized boundary fluxes `(1/|K|) int_dK m_b (v . n)` for scalar
    /// monomials of degree `<= k+1`.
    pub fn flux_moments(&self) -> &DMatrix<f64> {
        &self.flux
    }

    /// DOFs -> divergence in the orthonormal pressure basis.
    pub fn divergence_map(&self) -> &DMatrix<f64> {
        &self.div_map
    }

    /// Divergence of a local DOF vector in scalar monomial coefficients of
    /// degree `k-1`.
    pub fn divergence_from_dofs(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.pressure_basis * (&self.div_map * v)
    }

    /// The stabilization form: the identity on DOF vectors.
    pub fn stabilization(&self) -> DMatrix<f64> {
        DMatrix::identity(self.ndof(), self.ndof())
    }

    /// Normalized stiffness `((grad p, grad q))` of vector monomials of degree `k`.
    pub fn stiffness(&self) -> &DMatrix<f64> {
        &self.stiffness
    }

    /// Local velocity matrix `a_h^K` and divergence matrix `b^K(q, v) =
    /// int_K q div v` with `q` in the orthonormal pressure basis.
    pub fn local_matrices(&self, nu: f64) -> (DMatrix<f64>, DMatrix<f64>) {
        let pi = &self.pi_grad;
        let consistency = pi.transpose() * &self.stiffness * pi * self.area();
        let r = DMatrix::identity(self.ndof(), self.ndof()) - &self.poly_dofs * pi;
        let a = (consistency + r.transpose() * self.stabilization() * &r) * nu;
        let b = &self.div_map * self.area();
        (a, b)
    }

    /// `L2` projection onto `P_k^2` of a pointwise field, by quadrature.
    pub fn project_field(&self, f: impl Fn(Point) -> [f64; 2]) -> DVector<f64> {
        let k = self.k;
        let nk = scalar_dim(k);
        let mut rhs = DVector::zeros(2 * nk);
        for (x, w) in self.domain.quad.points.iter().zip(&self.domain.quad.weights) {
            let v = f(*x);
            let m = self.domain.frame.eval(k, *x);
            for i in 0..nk {
                rhs[i] += w * m[i] * v[0];
                rhs[nk + i] += w * m[i] * v[1];
            }
        }
        rhs /= self.area();
        self.vector_gram(k).lu().solve(&rhs).expect("monomial Gram matrix is nonsingular")
    }

    /// DOFs of a pointwise field with known divergence: point values, and
    /// moments by quadrature.
    pub fn interpolate(&self, f: impl Fn(Point) -> [f64; 2], div: impl Fn(Point) -> f64) -> DVector<f64> {
        let k = self.k;
        let lay = self.layout;
        let frame = self.domain.frame;
        let mut out = DVector::zeros(self.ndof());
        let n = self.points.len();
        for side in 0..n {
            let (a, b) = (self.points[side], self.points[(side + 1) % n]);
            for m in 0..k {
                let t = self.nodes[m];
                let v = f([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
                for c in 0..2 {
                    out[lay.side_node(side, m, c)] = v[c];
                }
            }
        }
        let nkm2 = scalar_dim(k - 2);
        let nkm1 = scalar_dim(k - 1);
        let mut vm = DVector::zeros(2 * nkm2);
        let mut dm = DVector::zeros(nkm1);
        for (x, w) in self.domain.quad.points.iter().zip(&self.domain.quad.weights) {
            let v = f(*x);
            let d = div(*x);
            let m = frame.eval(k - 1, *x);
            for i in 0..nkm2 {
                vm[i] += w * m[i] * v[0];
                vm[nkm2 + i] += w * m[i] * v[1];
            }
            for i in 0..nkm1 {
                dm[i] += w * m[i] * d;
            }
        }
        let g = self.gperp.coeffs.transpose() * vm / self.area();
        for j in 0..g.len() {
            out[lay.gperp(j)] = g[j];
        }
        let d = self.pressure_basis.transpose() * dm / self.area();
        for j in 1..d.len() {
            out[lay.div(j - 1)] = self.h() * d[j];
        }
        out
    }

    /// Largest `||v - Pi_grad v_I|| / (h_K ||grad v||)` over vector polynomials
    /// `v` of degree `k+2`, where `v_I` is the DOF interpolant of `v`.
    pub fn poincare_constant(&self) -> f64 {
        let k = self.k;
        let s = k + 2;
        let n = scalar_dim(s);
        let frame = self.domain.frame;
        let exps = exponents(s);
        // error coefficients of every vector monomial
        let mut e = DMatrix::<f64>::identity(2 * n, 2 * n);
        for j in 0..2 * n {
            let (a, b) = exps[j % n];
            let comp = j / n;
            let mono = |x: Point| {
                let [u, v] = frame.local(x);
                let val = u.powi(a as i32) * v.powi(b as i32);
                if comp == 0 { [val, 0.0] } else { [0.0, val] }
            };
            let div = |x: Point| {
                let [u, v] = frame.local(x);
                let (p, q) = if comp == 0 { (a, b) } else { (b, a) };
                let t = if comp == 0 { u } else { v };
                let o = if comp == 0 { v } else { u };
                if p == 0 { 0.0 } else { p as f64 * t.powi(p as i32 - 1) * o.powi(q as i32) / frame.h }
            };
            let pi = &self.pi_grad * self.interpolate(mono, div);
            let pi = embed_vector_columns(&DMatrix::from_column_slice(pi.len(), 1, pi.as_slice()), k, s);
            for i in 0..2 * n {
                e[(i, j)] -= pi[(i, 0)];
            }
        }
        let mass = block_diag(&self.domain.gram(s));
        let mut stiff = DMatrix::zeros(n, n);
        for (x, w) in self.domain.quad.points.iter().zip(&self.domain.quad.weights) {
            let g = frame.grad(s, *x);
            for i in 0..n {
                for j in 0..n {
                    stiff[(i, j)] += w * (g[i][0] * g[j][0] + g[i][1] * g[j][1]);
                }
            }
        }
        let stiff = block_diag(&(stiff / self.area()));
        // constants lie in the kernel of both forms
        let keep: Vec<usize> = (0..2 * n).filter(|&j| j % n != 0).collect();
        let num: DMatrix<f64> = e.transpose() * mass * &e;
        let num = num.select_rows(keep.iter()).select_columns(keep.iter());
        let den = stiff.select_rows(keep.iter()).select_columns(keep.iter());
        let Some(chol) = den.cholesky() else { return f64::INFINITY };
        let l = chol.l();
        let li = l.clone().try_inverse().expect("Cholesky factor is invertible");
        let sym = &li * num * li.transpose();
        let sym = (&sym + sym.transpose()) * 0.5;
        let lmax = sym.symmetric_eigenvalues().max();
        lmax.max(0.0).sqrt() / self.h()
    }
}
