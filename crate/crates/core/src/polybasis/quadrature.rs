//! Gauss rules on edges, collapsed-product rules on triangles, and their
//! pullback onto subtriangulated cells.

use crate::error::{Error, Result};
use crate::Point;

pub const MAX_EXACTNESS: usize = 20;

/// Points and weights on a reference domain.
///
/// Triangle rules live on the unit triangle `(0,0),(1,0),(0,1)` (weights sum
/// to 1/2); edge rules live on `[-1, 1]` (weights sum to 2).
#[derive(Debug, Clone)]
pub struct QuadratureRule<P> {
    pub points: Vec<P>,
    pub weights: Vec<f64>,
    pub exactness: usize,
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss-Lobatto nodes on `[0, 1]` with `n >= 2` points, endpoints included.
pub fn gauss_lobatto_unit(n: usize) -> Vec<f64> {
    assert!(n >= 2);
    let m = n - 1;
    // interior nodes are the roots of P'_m
    let mut nodes = vec![-1.0; n];
    nodes[n - 1] = 1.0;
    for i in 1..m {
        let mut x = -(std::f64::consts::PI * i as f64 / m as f64).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(m, x);
            // P'' from the Legendre ODE
            let d2 = (2.0 * x * dp - (m * (m + 1)) as f64 * p) / (1.0 - x * x);
            let dx = dp / d2;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
    }
    let mut out: Vec<f64> = nodes.into_iter().map(|x| 0.5 * (x + 1.0)).collect();
    // enforce exact symmetry about the midpoint
    for i in 0..n / 2 {
        let a = 0.5 * (out[i] + 1.0 - out[n - 1 - i]);
        out[i] = a;
        out[n - 1 - i] = 1.0 - a;
    }
    if n % 2 == 1 {
        out[n / 2] = 0.5;
    }
    out
}

pub fn edge_rule(exactness: usize) -> Result<QuadratureRule<f64>> {
    if exactness > MAX_EXACTNESS {
        return Err(Error::UnsupportedDegree(exactness));
    }
    let n = exactness / 2 + 1;
    let (points, weights) = gauss_legendre(n);
    Ok(QuadratureRule { points, weights, exactness })
}

pub fn triangle_rule(exactness: usize) -> Result<QuadratureRule<Point>> {
    if exactness > MAX_EXACTNESS {
        return Err(Error::UnsupportedDegree(exactness));
    }
    match exactness {
        0 | 1 => Ok(QuadratureRule {
            points: vec![[1.0 / 3.0, 1.0 / 3.0]],
            weights: vec![0.5],
            exactness: 1,
        }),
        2 => Ok(QuadratureRule {
            points: vec![[1.0 / 6.0, 1.0 / 6.0], [2.0 / 3.0, 1.0 / 6.0], [1.0 / 6.0, 2.0 / 3.0]],
            weights: vec![1.0 / 6.0; 3],
            exactness: 2,
        }),
        _ => Ok(collapsed_rule(exactness)),
    }
}

/// Duffy-collapsed tensor Gauss rule: `(u, v) -> (u, (1-u) v)` with Jacobian
/// `1 - u`, exact for total degree `exactness`.
fn collapsed_rule(exactness: usize) -> QuadratureRule<Point> {
    let n = (exactness + 2).div_ceil(2);
    let (x, w) = gauss_legendre(n);
    let mut points = Vec::with_capacity(n * n);
    let mut weights = Vec::with_capacity(n * n);
    for i in 0..n {
        let u = 0.5 * (x[i] + 1.0);
        let wu = 0.5 * w[i];
        for j in 0..n {
            let v = 0.5 * (x[j] + 1.0);
            let wv = 0.5 * w[j];
            points.push([u, (1.0 - u) * v]);
            weights.push(wu * wv * (1.0 - u));
        }
    }
    QuadratureRule { points, weights, exactness }
}

/// Physical quadrature points over a union of triangles.
#[derive(Debug, Clone, Default)]
pub struct CellQuadrature {
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
}

impl CellQuadrature {
    pub fn on_triangles(triangles: &[[Point; 3]], exactness: usize) -> Result<Self> {
        let rule = triangle_rule(exactness)?;
        let mut out = CellQuadrature::default();
        for tri in triangles {
            out.append_triangle(tri, &rule);
        }
        Ok(out)
    }

    pub fn append_triangle(&mut self, tri: &[Point; 3], rule: &QuadratureRule<Point>) {
        let [a, b, c] = *tri;
        let jac = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
        for (p, w) in rule.points.iter().zip(&rule.weights) {
            self.points.push([
                a[0] + p[0] * (b[0] - a[0]) + p[1] * (c[0] - a[0]),
                a[1] + p[0] * (b[1] - a[1]) + p[1] * (c[1] - a[1]),
            ]);
            self.weights.push(w * jac.abs());
        }
    }

    pub fn integrate(&self, f: impl Fn(Point) -> f64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(p, w)| w * f(*p)).sum()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Gauss points on the segment `a -> b`: `(point, parameter in [0,1], weight)`
/// with weights summing to the segment length.
pub fn segment_points(a: Point, b: Point, exactness: usize) -> Result<Vec<(Point, f64, f64)>> {
    let rule = edge_rule(exactness)?;
    let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
    Ok(rule
        .points
        .iter()
        .zip(&rule.weights)
        .map(|(&x, &w)| {
            let t = 0.5 * (x + 1.0);
            ([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])], t, 0.5 * w * len)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u32) -> f64 {
        (1..=n).map(f64::from).product()
    }

    // int_T x^a y^b over the unit triangle = a! b! / (a+b+2)!
    fn exact_monomial(a: u32, b: u32) -> f64 {
        factorial(a) * factorial(b) / factorial(a + b + 2)
    }

    #[test]
    fn centroid_rule() {
        let r = triangle_rule(1).unwrap();
        assert_eq!(r.points.len(), 1);
        assert_eq!(r.weights[0], 0.5);
        assert!((r.points[0][0] - 1.0 / 3.0).abs() < 1e-16);
    }

    #[test]
    fn two_point_gauss() {
        let r = edge_rule(3).unwrap();
        assert_eq!(r.points.len(), 2);
        let s = 1.0 / 3f64.sqrt();
        assert!((r.points[0] + s).abs() < 1e-15 && (r.points[1] - s).abs() < 1e-15);
        assert!((r.weights[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn x4y6_with_degree_ten_rule() {
        let r = triangle_rule(10).unwrap();
        let got: f64 = r.points.iter().zip(&r.weights).map(|(p, w)| w * p[0].powi(4) * p[1].powi(6)).sum();
        let want = exact_monomial(4, 6);
        assert!((got - want).abs() < 1e-13 * want, "{got} vs {want}");
    }

    #[test]
    fn triangle_rules_exact_up_to_degree() {
        for e in 0..=MAX_EXACTNESS {
            let r = triangle_rule(e).unwrap();
            let wsum: f64 = r.weights.iter().sum();
            assert!((wsum - 0.5).abs() < 1e-14);
            let deg = e.max(1) as u32;
            for d in 0..=deg {
                for a in 0..=d {
                    let b = d - a;
                    let got: f64 = r
                        .points
                        .iter()
                        .zip(&r.weights)
                        .map(|(p, w)| w * p[0].powi(a as i32) * p[1].powi(b as i32))
                        .sum();
                    let want = exact_monomial(a, b);
                    assert!((got - want).abs() <= 1e-13 * want, "e={e} a={a} b={b}: {got} vs {want}");
                }
            }
        }
    }

    #[test]
    fn edge_rules_exact_up_to_degree() {
        for e in 0..=MAX_EXACTNESS {
            let r = edge_rule(e).unwrap();
            for d in 0..=e as i32 {
                let got: f64 = r.points.iter().zip(&r.weights).map(|(x, w)| w * x.powi(d)).sum();
                let want = if d % 2 == 1 { 0.0 } else { 2.0 / (d as f64 + 1.0) };
                assert!((got - want).abs() <= 1e-13 * want.max(1.0), "e={e} d={d}");
            }
        }
    }

    #[test]
    fn unsupported_degree() {
        assert!(matches!(triangle_rule(21), Err(Error::UnsupportedDegree(21))));
        assert!(matches!(edge_rule(25), Err(Error::UnsupportedDegree(25))));
    }

    #[test]
    fn lobatto_nodes() {
        let n3 = gauss_lobatto_unit(3);
        assert_eq!(n3, vec![0.0, 0.5, 1.0]);
        let n4 = gauss_lobatto_unit(4);
        let s = 0.5 * (1.0 - 1.0 / 5f64.sqrt());
        assert!((n4[1] - s).abs() < 1e-15 && (n4[2] - (1.0 - s)).abs() < 1e-15);
    }
}
