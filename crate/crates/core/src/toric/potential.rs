use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{DelzantPolytope, QuadratureRule};
use crate::{Error, Result};

/// Polynomial `Σ c_e x^e` added to the canonical symplectic potential.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Perturbation {
    pub terms: Vec<([u32; 2], f64)>,
}

impl Perturbation {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `ε x²(1−x)²` on the interval.
    pub fn bump_1d(eps: f64) -> Self {
        Self { terms: vec![([2, 0], eps), ([3, 0], -2.0 * eps), ([4, 0], eps)] }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|(_, c)| *c == 0.0)
    }

    /// Partial derivative of order `d = (d0, d1)` at `x`.
    fn derivative(&self, d: [u32; 2], x: &[f64; 2]) -> f64 {
        let mut s = 0.0;
        for (e, c) in &self.terms {
            if e[0] < d[0] || e[1] < d[1] {
                continue;
            }
            let mut t = *c;
            for axis in 0..2 {
                for j in 0..d[axis] {
                    t *= (e[axis] - j) as f64;
                }
                t *= x[axis].powi((e[axis] - d[axis]) as i32);
            }
            s += t;
        }
        s
    }
}

/// Torus-invariant Kähler metric described by its symplectic potential
/// `u = ½ Σ ℓᵢ log ℓᵢ + f` on the interior of the moment polytope.
#[derive(Debug, Clone)]
pub struct PotentialModel {
    polytope: DelzantPolytope,
    perturbation: Perturbation,
    normals: Vec<[f64; 2]>,
}

/// Geometry of the model at one interior point.
#[derive(Debug, Clone, Copy)]
pub struct PointGeometry {
    pub x: [f64; 2],
    /// Log-coordinate `ξ = ∇u(x)`.
    pub xi: [f64; 2],
    /// Kähler potential `φ(ξ) = ⟨x, ξ⟩ − u(x)`.
    pub phi: f64,
    pub hess: [[f64; 2]; 2],
    pub hess_inv: [[f64; 2]; 2],
    pub det_hess: f64,
}

impl PotentialModel {
    /// Builds the model and checks Hessian positivity on the nodes of `check`.
    pub fn new(polytope: DelzantPolytope, perturbation: Perturbation, check: &QuadratureRule) -> Result<Self> {
        let model = Self::unchecked(polytope, perturbation);
        for x in &check.points {
            model.check_point(x)?;
        }
        Ok(model)
    }

    pub fn unchecked(polytope: DelzantPolytope, perturbation: Perturbation) -> Self {
        let normals = polytope
            .facets()
            .iter()
            .map(|f| {
                let mut n = [0.0; 2];
                for (i, &c) in f.normal.iter().enumerate() {
                    n[i] = c as f64;
                }
                n
            })
            .collect();
        Self { polytope, perturbation, normals }
    }

    /// Canonical (Guillemin) model with no perturbation.
    pub fn canonical(polytope: DelzantPolytope) -> Self {
        Self::unchecked(polytope, Perturbation::zero())
    }

    pub fn polytope(&self) -> &DelzantPolytope {
        &self.polytope
    }

    pub fn perturbation(&self) -> &Perturbation {
        &self.perturbation
    }

    pub fn dim(&self) -> usize {
        self.polytope.dim()
    }

    fn check_point(&self, x: &[f64; 2]) -> Result<()> {
        let h = self.hessian(x);
        let ok = if self.dim() == 1 { h[0][0] > 0.0 } else { h[0][0] > 0.0 && h[0][0] * h[1][1] - h[0][1] * h[1][0] > 0.0 };
        if ok && h.iter().flatten().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::HessianNotPositive { node: x[..self.dim()].to_vec() })
        }
    }

    fn facet_values(&self, x: &[f64; 2]) -> Vec<f64> {
        self.polytope.facets().iter().map(|f| f.eval(x)).collect()
    }

    pub fn u(&self, x: &[f64; 2]) -> f64 {
        let g: f64 = self.facet_values(x).iter().map(|&l| if l > 0.0 { 0.5 * l * l.ln() } else { 0.0 }).sum();
        g + self.perturbation.derivative([0, 0], x)
    }

    pub fn gradient(&self, x: &[f64; 2]) -> [f64; 2] {
        let mut g = [0.0; 2];
        for (l, n) in self.facet_values(x).iter().zip(&self.normals) {
            let c = 0.5 * (l.ln() + 1.0);
            for i in 0..self.dim() {
                g[i] += c * n[i];
            }
        }
        g[0] += self.perturbation.derivative([1, 0], x);
        if self.dim() == 2 {
            g[1] += self.perturbation.derivative([0, 1], x);
        }
        g
    }

    pub fn hessian(&self, x: &[f64; 2]) -> [[f64; 2]; 2] {
        let mut h = [[0.0; 2]; 2];
        let n = self.dim();
        for (l, nv) in self.facet_values(x).iter().zip(&self.normals) {
            for i in 0..n {
                for j in 0..n {
                    h[i][j] += 0.5 * nv[i] * nv[j] / l;
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                let mut d = [0u32; 2];
                d[i] += 1;
                d[j] += 1;
                h[i][j] += self.perturbation.derivative(d, x);
            }
        }
        if n == 1 {
            h[1][1] = 1.0;
        }
        h
    }

    /// `∂_k u_ij` as `t[k][i][j]`.
    fn third(&self, x: &[f64; 2]) -> [[[f64; 2]; 2]; 2] {
        let n = self.dim();
        let mut t = [[[0.0; 2]; 2]; 2];
        for (l, nv) in self.facet_values(x).iter().zip(&self.normals) {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        t[a][b][c] -= 0.5 * nv[a] * nv[b] * nv[c] / (l * l);
                    }
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let mut d = [0u32; 2];
                    d[a] += 1;
                    d[b] += 1;
                    d[c] += 1;
                    t[a][b][c] += self.perturbation.derivative(d, x);
                }
            }
        }
        t
    }

    /// `∂_k ∂_l u_ij` as `q[k][l][i][j]`.
    fn fourth(&self, x: &[f64; 2]) -> [[[[f64; 2]; 2]; 2]; 2] {
        let n = self.dim();
        let mut q = [[[[0.0; 2]; 2]; 2]; 2];
        for (l, nv) in self.facet_values(x).iter().zip(&self.normals) {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        for e in 0..n {
                            q[a][b][c][e] += nv[a] * nv[b] * nv[c] * nv[e] / (l * l * l);
                        }
                    }
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for e in 0..n {
                        let mut d = [0u32; 2];
                        d[a] += 1;
                        d[b] += 1;
                        d[c] += 1;
                        d[e] += 1;
                        q[a][b][c][e] += self.perturbation.derivative(d, x);
                    }
                }
            }
        }
        q
    }

    pub fn geometry(&self, x: &[f64; 2]) -> PointGeometry {
        let n = self.dim();
        let xi = self.gradient(x);
        let hess = self.hessian(x);
        let (hess_inv, det_hess) = inverse2(&hess, n);
        let phi = (0..n).map(|i| x[i] * xi[i]).sum::<f64>() - self.u(x);
        PointGeometry { x: *x, xi, phi, hess, hess_inv, det_hess }
    }

    /// Kähler scalar curvature by Abreu's formula `S = −π Σ ∂_i∂_j u^{ij}`,
    /// with the derivatives of the inverse Hessian taken analytically.
    pub fn scalar_curvature(&self, x: &[f64; 2]) -> f64 {
        let n = self.dim();
        let h = self.hessian(x);
        let (g, _) = inverse2(&h, n);
        let t = self.third(x);
        let q = self.fourth(x);
        let mul = |a: &[[f64; 2]; 2], b: &[[f64; 2]; 2]| {
            let mut c = [[0.0; 2]; 2];
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        c[i][j] += a[i][k] * b[k][j];
                    }
                }
            }
            c
        };
        let mut total = 0.0;
        for i in 0..n {
            for j in 0..n {
                // ∂_i ∂_j G = G H_i G H_j G + G H_j G H_i G − G H_ij G
                let gi = mul(&mul(&g, &t[i]), &g);
                let gj = mul(&mul(&g, &t[j]), &g);
                let a = mul(&gi, &mul(&t[j], &g));
                let b = mul(&gj, &mul(&t[i], &g));
                let c = mul(&mul(&g, &q[i][j]), &g);
                total += a[i][j] + b[i][j] - c[i][j];
            }
        }
        -PI * total
    }

    /// Same quantity by fourth-order central differences of the inverse Hessian.
    pub fn scalar_curvature_fd(&self, x: &[f64; 2], step: f64) -> f64 {
        let n = self.dim();
        let ginv = |p: [f64; 2]| inverse2(&self.hessian(&p), n).0;
        let shifted = |di: f64, dj: f64, i: usize, j: usize| {
            let mut p = *x;
            p[i] += di;
            p[j] += dj;
            p
        };
        let mut total = 0.0;
        for i in 0..n {
            for j in 0..n {
                let h = step;
                let second = if i == j {
                    let f = |s: f64| ginv(shifted(s, 0.0, i, i))[i][i];
                    (-f(2.0 * h) + 16.0 * f(h) - 30.0 * f(0.0) + 16.0 * f(-h) - f(-2.0 * h)) / (12.0 * h * h)
                } else {
                    let f = |a: f64, b: f64| ginv(shifted(a, b, i, j))[i][j];
                    let d1 = |b: f64| (-f(2.0 * h, b) + 8.0 * f(h, b) - 8.0 * f(-h, b) + f(-2.0 * h, b)) / (12.0 * h);
                    (-d1(2.0 * h) + 8.0 * d1(h) - 8.0 * d1(-h) + d1(-2.0 * h)) / (12.0 * h)
                };
                total += second;
            }
        }
        -PI * total
    }

    /// Inverse Legendre map `ξ ↦ x` with `∇u(x) = ξ`, by damped Newton.
    pub fn moment_from_xi(&self, xi: &[f64; 2], start: &[f64; 2]) -> [f64; 2] {
        let n = self.dim();
        let mut x = *start;
        for _ in 0..200 {
            let g = self.gradient(&x);
            let (hi, _) = inverse2(&self.hessian(&x), n);
            let mut dx = [0.0; 2];
            for i in 0..n {
                for j in 0..n {
                    dx[i] -= hi[i][j] * (g[j] - xi[j]);
                }
            }
            let mut t = 1.0;
            loop {
                let trial = [x[0] + t * dx[0], x[1] + t * dx[1]];
                if self.polytope.min_facet_value(&trial) > 0.0 {
                    x = trial;
                    break;
                }
                t *= 0.5;
            }
            if dx.iter().map(|d| d.abs()).fold(0.0, f64::max) * t < 1e-15 {
                break;
            }
        }
        x
    }
}

/// Inverse and determinant of the leading `n × n` block.
pub(crate) fn inverse2(h: &[[f64; 2]; 2], n: usize) -> ([[f64; 2]; 2], f64) {
    if n == 1 {
        ([[1.0 / h[0][0], 0.0], [0.0, 1.0]], h[0][0])
    } else {
        let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        ([[h[1][1] / det, -h[0][1] / det], [-h[1][0] / det, h[0][0] / det]], det)
    }
}
