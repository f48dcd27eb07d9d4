use std::f64::consts::PI;

use super::DelzantPolytope;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, by Newton iteration on
/// the three-term recurrence.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1);
    let n = order;
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                let (_, d) = legendre_with_derivative(n, z);
                dp = d;
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    for j in 2..=n {
        let p2 = ((2 * j - 1) as f64 * z * p1 - (j - 1) as f64 * p0) / j as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Quadrature over `X` for torus-invariant data pushed to the moment polytope,
/// optionally tensored with a uniform angular grid for non-invariant integrands.
///
/// `Σ weights = vol(P)`; the angular weights sum to one.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub dim: usize,
    pub order: usize,
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
    pub angular: usize,
    pub angles: Vec<[f64; 2]>,
    pub angle_weights: Vec<f64>,
}

impl QuadratureRule {
    /// Moment-coordinate rule of the given Gauss–Legendre order. Intervals use
    /// the order directly; polygons are fanned from the first vertex into
    /// triangles, each integrated on a collapsed square.
    pub fn new(polytope: &DelzantPolytope, order: usize, angular: usize) -> Self {
        let (gx, gw) = gauss_legendre(order);
        let dim = polytope.dim();
        let verts = polytope.vertices_f64();
        let mut points = Vec::new();
        let mut weights = Vec::new();
        if dim == 1 {
            let (a, b) = (verts[0][0], verts[1][0]);
            let h = 0.5 * (b - a);
            for (x, w) in gx.iter().zip(&gw) {
                points.push([a + h * (x + 1.0), 0.0]);
                weights.push(h * w);
            }
        } else {
            let v0 = verts[0];
            for t in 1..verts.len() - 1 {
                let (v1, v2) = (verts[t], verts[t + 1]);
                let e1 = [v1[0] - v0[0], v1[1] - v0[1]];
                let e2 = [v2[0] - v1[0], v2[1] - v1[1]];
                let det = (e1[0] * e2[1] - e1[1] * e2[0]).abs();
                for (xs, ws) in gx.iter().zip(&gw) {
                    let s = 0.5 * (xs + 1.0);
                    for (xt, wt) in gx.iter().zip(&gw) {
                        let tt = 0.5 * (xt + 1.0);
                        points.push([v0[0] + s * (e1[0] + tt * e2[0]), v0[1] + s * (e1[1] + tt * e2[1])]);
                        weights.push(0.25 * ws * wt * s * det);
                    }
                }
            }
        }
        let angular = angular.max(1);
        let mut angles = Vec::new();
        let mut angle_weights = Vec::new();
        if dim == 1 {
            for j in 0..angular {
                angles.push([j as f64 / angular as f64, 0.0]);
                angle_weights.push(1.0 / angular as f64);
            }
        } else {
            for j in 0..angular {
                for l in 0..angular {
                    angles.push([j as f64 / angular as f64, l as f64 / angular as f64]);
                    angle_weights.push(1.0 / (angular * angular) as f64);
                }
            }
        }
        Self { dim, order, points, weights, angular, angles, angle_weights }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_invariant(&self) -> bool {
        self.angular == 1
    }

    /// `∫_P f dx`, summed in node order.
    pub fn integrate(&self, f: impl Fn(&[f64; 2]) -> f64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(p, w)| w * f(p)).sum()
    }

    /// Integral of node samples.
    pub fn integrate_samples(&self, values: &[f64]) -> f64 {
        values.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }
}
