use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::stokes::{ExactSolution, StokesProblem};
use crate::Point;

/// The benchmark problems on the unit square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Experiment {
    /// `u = 0`, `p = sum_j x^j y^(7-j) - 761/1260`, `f = grad p`.
    Hydrostatic,
    /// `u = curl(x^2 (x-1)^2 y^2 (y-1)^2)`, `p = sin(2 pi x) cos(2 pi y)`.
    Vorticity,
    /// `u = grad(x^2 - y^2)`, `f = (u . grad) u`.
    PotFlow2,
    /// `u = grad(x^3 - 3 x y^2)`, `f = (u . grad) u`.
    PotFlow3,
}

impl Experiment {
    pub const ALL: [Experiment; 4] =
        [Experiment::Hydrostatic, Experiment::Vorticity, Experiment::PotFlow2, Experiment::PotFlow3];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Hydrostatic => "hydrostatic",
            Experiment::Vorticity => "vorticity",
            Experiment::PotFlow2 => "potflow2",
            Experiment::PotFlow3 => "potflow3",
        }
    }

    /// Default viscosities.
    pub fn default_viscosities(self) -> Vec<f64> {
        match self {
            Experiment::Hydrostatic => (0..=6).map(|e| 10f64.powi(-e)).collect(),
            _ => vec![1.0, 1e-4],
        }
    }

    /// Default mesh levels.
    pub fn default_levels(self) -> Vec<usize> {
        match self {
            Experiment::Hydrostatic => vec![2],
            Experiment::Vorticity => (0..=4).collect(),
            Experiment::PotFlow2 | Experiment::PotFlow3 => (0..=3).collect(),
        }
    }

    /// The problem with exact solution for viscosity `nu`.
    pub fn problem(self, nu: f64) -> StokesProblem {
        match self {
            Experiment::Hydrostatic => {
                let exact = ExactSolution {
                    velocity: Arc::new(|_| [0.0, 0.0]),
                    gradient: Arc::new(|_| [[0.0; 2]; 2]),
                    pressure: Arc::new(hydrostatic_pressure),
                };
                StokesProblem {
                    nu,
                    force: Arc::new(hydrostatic_gradient),
                    dirichlet: Arc::clone(&exact.velocity),
                    exact: Some(exact),
                }
            }
            Experiment::Vorticity => {
                let exact = ExactSolution {
                    velocity: Arc::new(vorticity_velocity),
                    gradient: Arc::new(vorticity_gradient),
                    pressure: Arc::new(|x: Point| (2.0 * PI * x[0]).sin() * (2.0 * PI * x[1]).cos()),
                };
                let force = move |x: Point| {
                    let l = vorticity_laplacian(x);
                    let g = vorticity_pressure_gradient(x);
                    [-nu * l[0] + g[0], -nu * l[1] + g[1]]
                };
                StokesProblem {
                    nu,
                    force: Arc::new(force),
                    dirichlet: Arc::clone(&exact.velocity),
                    exact: Some(exact),
                }
            }
            Experiment::PotFlow2 => {
                let exact = ExactSolution {
                    velocity: Arc::new(|x: Point| [2.0 * x[0], -2.0 * x[1]]),
                    gradient: Arc::new(|_| [[2.0, 0.0], [0.0, -2.0]]),
                    pressure: Arc::new(|x: Point| 2.0 * x[0] * x[0] + 2.0 * x[1] * x[1] - 4.0 / 3.0),
                };
                StokesProblem {
                    nu,
                    force: Arc::new(|x: Point| [4.0 * x[0], 4.0 * x[1]]),
                    dirichlet: Arc::clone(&exact.velocity),
                    exact: Some(exact),
                }
            }
            Experiment::PotFlow3 => {
                let exact = ExactSolution {
                    velocity: Arc::new(|x: Point| [3.0 * x[0] * x[0] - 3.0 * x[1] * x[1], -6.0 * x[0] * x[1]]),
                    gradient: Arc::new(|x: Point| [[6.0 * x[0], -6.0 * x[1]], [-6.0 * x[1], -6.0 * x[0]]]),
                    pressure: Arc::new(|x: Point| {
                        let (x2, y2) = (x[0] * x[0], x[1] * x[1]);
                        4.5 * (x2 * x2 + y2 * y2) + 9.0 * x2 * y2 - 2.8
                    }),
                };
                StokesProblem {
                    nu,
                    force: Arc::new(|x: Point| {
                        let (x0, y0) = (x[0], x[1]);
                        [18.0 * (x0 * x0 * x0 + x0 * y0 * y0), 18.0 * (y0 * y0 * y0 + x0 * x0 * y0)]
                    }),
                    dirichlet: Arc::clone(&exact.velocity),
                    exact: Some(exact),
                }
            }
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidSpec(format!("unknown experiment '{s}'")))
    }
}

pub fn hydrostatic_pressure(x: Point) -> f64 {
    (0..=7).map(|j| x[0].powi(j) * x[1].powi(7 - j)).sum::<f64>() - 761.0 / 1260.0
}

pub fn hydrostatic_gradient(x: Point) -> [f64; 2] {
    let mut g = [0.0; 2];
    for j in 0..=7i32 {
        if j > 0 {
            g[0] += j as f64 * x[0].powi(j - 1) * x[1].powi(7 - j);
        }
        if j < 7 {
            g[1] += (7 - j) as f64 * x[0].powi(j) * x[1].powi(6 - j);
        }
    }
    g
}

/// `t^2 (t-1)^2` and its first three derivatives.
fn bump(t: f64) -> [f64; 4] {
    [
        t * t * (t - 1.0) * (t - 1.0),
        4.0 * t * t * t - 6.0 * t * t + 2.0 * t,
        12.0 * t * t - 12.0 * t + 2.0,
        24.0 * t - 12.0,
    ]
}

pub fn vorticity_velocity(x: Point) -> [f64; 2] {
    let (a, b) = (bump(x[0]), bump(x[1]));
    [-a[0] * b[1], a[1] * b[0]]
}

pub fn vorticity_gradient(x: Point) -> [[f64; 2]; 2] {
    let (a, b) = (bump(x[0]), bump(x[1]));
    [[-a[1] * b[1], -a[0] * b[2]], [a[2] * b[0], a[1] * b[1]]]
}

pub fn vorticity_laplacian(x: Point) -> [f64; 2] {
    let (a, b) = (bump(x[0]), bump(x[1]));
    [-(a[2] * b[1] + a[0] * b[3]), a[3] * b[0] + a[1] * b[2]]
}

pub fn vorticity_pressure_gradient(x: Point) -> [f64; 2] {
    let (s, c) = ((2.0 * PI * x[0]).sin_cos(), (2.0 * PI * x[1]).sin_cos());
    [2.0 * PI * s.1 * c.1, -2.0 * PI * s.0 * c.0]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_grad(f: impl Fn(Point) -> f64, x: Point) -> [f64; 2] {
        let h = 1e-5;
        [
            (f([x[0] + h, x[1]]) - f([x[0] - h, x[1]])) / (2.0 * h),
            (f([x[0], x[1] + h]) - f([x[0], x[1] - h])) / (2.0 * h),
        ]
    }

    #[test]
    fn forces_match_finite_differences() {
        let x = [0.31, 0.77];
        let g = fd_grad(hydrostatic_pressure, x);
        let h = hydrostatic_gradient(x);
        assert!((g[0] - h[0]).abs() < 1e-7 && (g[1] - h[1]).abs() < 1e-7);
        for c in 0..2 {
            let g = fd_grad(|y| vorticity_velocity(y)[c], x);
            let d = vorticity_gradient(x)[c];
            assert!((g[0] - d[0]).abs() < 1e-8 && (g[1] - d[1]).abs() < 1e-8);
        }
        // divergence-free
        let d = vorticity_gradient(x);
        assert!((d[0][0] + d[1][1]).abs() < 1e-15);
        // Laplacian from second differences
        let h = 1e-4;
        for c in 0..2 {
            let u = |y: Point| vorticity_velocity(y)[c];
            let lap = (u([x[0] + h, x[1]]) + u([x[0] - h, x[1]]) + u([x[0], x[1] + h]) + u([x[0], x[1] - h])
                - 4.0 * u(x))
                / (h * h);
            assert!((lap - vorticity_laplacian(x)[c]).abs() < 1e-6);
        }
        for e in [Experiment::PotFlow2, Experiment::PotFlow3] {
            let pr = e.problem(1.0);
            let ex = pr.exact.unwrap();
            let g = fd_grad(|y| (ex.pressure)(y), x);
            let f = (pr.force)(x);
            assert!((g[0] - f[0]).abs() < 1e-7 && (g[1] - f[1]).abs() < 1e-7);
        }
    }

    #[test]
    fn names_round_trip() {
        for e in Experiment::ALL {
            assert_eq!(e.name().parse::<Experiment>().unwrap(), e);
        }
    }
}
