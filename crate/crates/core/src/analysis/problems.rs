use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Result, VemError};
use crate::mesh::Point;

/// Polynomial in ambient coordinates, stored as `(coefficient, exponents)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Polynomial {
    pub dimension: usize,
    pub terms: Vec<(f64, [u32; 3])>,
}

impl Polynomial {
    pub fn new(dimension: usize, terms: Vec<(f64, [u32; 3])>) -> Self {
        Polynomial { dimension, terms }
    }

    /// The single monomial `x^a y^b z^c`.
    pub fn monomial(dimension: usize, exps: [u32; 3]) -> Self {
        Polynomial::new(dimension, vec![(1.0, exps)])
    }

    pub fn degree(&self) -> usize {
        self.terms
            .iter()
            .map(|(_, e)| e.iter().sum::<u32>() as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, x: &Point) -> f64 {
        self.terms
            .iter()
            .map(|(c, e)| c * x.x.powi(e[0] as i32) * x.y.powi(e[1] as i32) * x.z.powi(e[2] as i32))
            .sum()
    }

    pub fn gradient(&self, x: &Point) -> Point {
        let mut g = Point::zeros();
        for (c, e) in &self.terms {
            for j in 0..3 {
                if e[j] == 0 {
                    continue;
                }
                let mut t = *e;
                t[j] -= 1;
                g[j] += c
                    * e[j] as f64
                    * x.x.powi(t[0] as i32)
                    * x.y.powi(t[1] as i32)
                    * x.z.powi(t[2] as i32);
            }
        }
        g
    }

    pub fn laplacian(&self, x: &Point) -> f64 {
        let mut s = 0.0;
        for (c, e) in &self.terms {
            for j in 0..3 {
                if e[j] < 2 {
                    continue;
                }
                let mut t = *e;
                t[j] -= 2;
                s += c
                    * (e[j] * (e[j] - 1)) as f64
                    * x.x.powi(t[0] as i32)
                    * x.y.powi(t[1] as i32)
                    * x.z.powi(t[2] as i32);
            }
        }
        s
    }

    /// All monomials `x^a y^b (z^c)` of total degree ≤ `degree`.
    pub fn monomial_basis(dimension: usize, degree: usize) -> Vec<Polynomial> {
        crate::polybasis::enumerate_multi_indices(dimension, degree)
            .into_iter()
            .map(|m| {
                let mut e = [0u32; 3];
                for (j, &s) in m.exponents().iter().enumerate() {
                    e[j] = s as u32;
                }
                Polynomial::monomial(dimension, e)
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum ExactSolution {
    /// `Π_j sin(π x_j)` over the first `dimension` coordinates.
    SinProduct {
        dimension: usize,
    },
    /// `r^{2/3} sin(2θ/3)` around the origin: harmonic, gradient singular at the corner.
    Corner,
    Polynomial(Polynomial),
}

/// Exact solution with forcing `f = -Δu` and boundary data `g = u`.
#[derive(Debug, Clone, Serialize)]
pub struct ManufacturedProblem {
    pub name: String,
    pub dimension: usize,
    pub exact: ExactSolution,
    /// Sobolev regularity index `s` with `u ∈ H^{s+1}`; `None` for smooth solutions.
    pub regularity: Option<f64>,
    /// Rate-limited problems are reported but never judged.
    pub informational: bool,
}

pub const PROBLEM_NAMES: [&str; 7] = [
    "sin2d", "sin3d", "corner2d", "poly1", "poly2", "poly3", "poly4",
];

impl ManufacturedProblem {
    pub fn by_name(name: &str) -> Result<Self> {
        let smooth = |name: &str, dimension, exact| ManufacturedProblem {
            name: name.to_string(),
            dimension,
            exact,
            regularity: None,
            informational: false,
        };
        let poly =
            |terms: Vec<(f64, [u32; 3])>| ExactSolution::Polynomial(Polynomial::new(2, terms));
        Ok(match name {
            "sin2d" => smooth(name, 2, ExactSolution::SinProduct { dimension: 2 }),
            "sin3d" => smooth(name, 3, ExactSolution::SinProduct { dimension: 3 }),
            "corner2d" => ManufacturedProblem {
                name: name.to_string(),
                dimension: 2,
                exact: ExactSolution::Corner,
                regularity: Some(2.0 / 3.0),
                informational: true,
            },
            "poly1" => smooth(
                name,
                2,
                poly(vec![(2.0, [1, 0, 0]), (3.0, [0, 1, 0]), (-1.0, [0, 0, 0])]),
            ),
            "poly2" => smooth(
                name,
                2,
                poly(vec![
                    (1.0, [2, 0, 0]),
                    (-1.0, [0, 2, 0]),
                    (0.5, [1, 1, 0]),
                    (1.0, [1, 0, 0]),
                ]),
            ),
            "poly3" => smooth(
                name,
                2,
                poly(vec![
                    (1.0, [3, 0, 0]),
                    (-2.0, [1, 2, 0]),
                    (1.0, [0, 2, 0]),
                    (0.3, [0, 0, 0]),
                ]),
            ),
            "poly4" => smooth(
                name,
                2,
                poly(vec![
                    (1.0, [4, 0, 0]),
                    (-3.0, [2, 2, 0]),
                    (0.5, [1, 3, 0]),
                    (1.0, [0, 1, 0]),
                ]),
            ),
            other => {
                return Err(VemError::InvalidInput(format!(
                    "unknown problem '{other}' (expected one of {})",
                    PROBLEM_NAMES.join(", ")
                )))
            }
        })
    }

    pub fn polynomial(p: Polynomial) -> Self {
        ManufacturedProblem {
            name: "polynomial".into(),
            dimension: p.dimension,
            exact: ExactSolution::Polynomial(p),
            regularity: None,
            informational: false,
        }
    }

    pub fn u(&self, x: &Point) -> f64 {
        match &self.exact {
            ExactSolution::SinProduct { dimension } => {
                (0..*dimension).map(|j| (PI * x[j]).sin()).product()
            }
            ExactSolution::Corner => {
                let r = x.x.hypot(x.y);
                r.powf(2.0 / 3.0) * (2.0 / 3.0 * x.y.atan2(x.x)).sin()
            }
            ExactSolution::Polynomial(p) => p.eval(x),
        }
    }

    pub fn gradient(&self, x: &Point) -> Point {
        match &self.exact {
            ExactSolution::SinProduct { dimension } => {
                let d = *dimension;
                let mut g = Point::zeros();
                for j in 0..d {
                    g[j] = (0..d)
                        .map(|i| {
                            if i == j {
                                PI * (PI * x[i]).cos()
                            } else {
                                (PI * x[i]).sin()
                            }
                        })
                        .product();
                }
                g
            }
            ExactSolution::Corner => {
                let r2 = x.x * x.x + x.y * x.y;
                if r2 == 0.0 {
                    return Point::zeros();
                }
                let r = r2.sqrt();
                let t = x.y.atan2(x.x);
                let a = 2.0 / 3.0;
                let dr = a * r.powf(a - 1.0) * (a * t).sin();
                let dt = r.powf(a) * a * (a * t).cos();
                // ∇ = u_r r̂ + (u_θ / r) θ̂
                Point::new(
                    dr * t.cos() - dt / r * t.sin(),
                    dr * t.sin() + dt / r * t.cos(),
                    0.0,
                )
            }
            ExactSolution::Polynomial(p) => p.gradient(x),
        }
    }

    pub fn laplacian(&self, x: &Point) -> f64 {
        match &self.exact {
            ExactSolution::SinProduct { dimension } => -(*dimension as f64) * PI * PI * self.u(x),
            ExactSolution::Corner => 0.0,
            ExactSolution::Polynomial(p) => p.laplacian(x),
        }
    }

    pub fn forcing(&self, x: &Point) -> f64 {
        -self.laplacian(x)
    }

    /// Expected energy and L² rates for order `k`.
    pub fn expected_rates(&self, k: usize) -> (f64, f64) {
        let e = match self.regularity {
            Some(s) => s.min(k as f64),
            None => k as f64,
        };
        (e, e + 1.0)
    }
}
