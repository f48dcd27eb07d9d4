use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_traits::{One, Zero};

use super::expansion::{df_invariant, fit_expansions, inner_product, solve_exact};
use crate::exact::{q, Q};
use crate::toric::{DelzantPolytope, PotentialModel, QuadratureRule, TorusGenerator};
use crate::{Error, Result};

/// Exact `∫_P x^a y^b dx` for `a + b ≤ 2`, indexed by the affine basis `1, x, y`:
/// `first[i] = ∫ eᵢ`, `second[i][j] = ∫ eᵢ eⱼ`.
#[derive(Debug, Clone)]
pub struct PolytopeMoments {
    pub first: Vec<Q>,
    pub second: Vec<Vec<Q>>,
}

pub fn polytope_moments(p: &DelzantPolytope) -> PolytopeMoments {
    let n = p.dim();
    let vq: Vec<Vec<Q>> =
        p.vertices().iter().map(|v| v.iter().map(|r| Q::new((*r.numer()).into(), (*r.denom()).into())).collect()).collect();
    let m = n + 1;
    let mut first = vec![Q::zero(); m];
    let mut second = vec![vec![Q::zero(); m]; m];
    // e₀ = 1, eᵢ = x_{i-1}; ∫ eᵢeⱼ needs moments of degree ≤ 2.
    let mut mom0 = Q::zero();
    let mut mom1 = vec![Q::zero(); n];
    let mut mom2 = vec![vec![Q::zero(); n]; n];
    if n == 1 {
        let (a, b) = (&vq[0][0], &vq[1][0]);
        mom0 = b - a;
        mom1[0] = (b * b - a * a) / q(2);
        mom2[0][0] = (b * b * b - a * a * a) / q(3);
    } else {
        for t in 1..vq.len() - 1 {
            let (v0, v1, v2) = (&vq[0], &vq[t], &vq[t + 1]);
            let area = ((&v1[0] - &v0[0]) * (&v2[1] - &v0[1]) - (&v2[0] - &v0[0]) * (&v1[1] - &v0[1])) / q(2);
            mom0 += &area;
            for i in 0..2 {
                let si = &v0[i] + &v1[i] + &v2[i];
                mom1[i] += &area * &si / q(3);
                for j in 0..2 {
                    let sj = &v0[j] + &v1[j] + &v2[j];
                    let pp = &v0[i] * &v0[j] + &v1[i] * &v1[j] + &v2[i] * &v2[j];
                    mom2[i][j] += &area * (pp + &si * &sj) / q(12);
                }
            }
        }
    }
    first[0] = mom0.clone();
    second[0][0] = mom0;
    for i in 0..n {
        first[i + 1] = mom1[i].clone();
        second[0][i + 1] = mom1[i].clone();
        second[i + 1][0] = mom1[i].clone();
        for j in 0..n {
            second[i + 1][j + 1] = mom2[i][j].clone();
        }
    }
    PolytopeMoments { first, second }
}

/// Extremal data in the Abreu normalisation `S_A = S/2π` (so `S_A = 2` on the
/// round `ℙ¹` of area one).
#[derive(Debug, Clone)]
pub struct ExtremalData {
    /// `S_{A,aff} = s₀ + ⟨s, x⟩`, coefficients `[s₀, s…]`.
    pub s_aff: Vec<Q>,
    pub s_bar: Q,
    /// `χ` with weights `−(⟨s, α⟩ + k s₀)/2`, scaled so that `DF(χ) = ⟨χ, χ⟩`.
    pub chi: TorusGenerator,
    pub df_chi: Q,
    pub norm_chi: Q,
    pub is_zero: bool,
}

/// Exact extremal direction from the lattice-sum identity
/// `∫_P (⟨λ,x⟩ + c) S_A dx = 2(b₁(λ) + c a₁)`.
pub fn extremal_normalisation(p: &DelzantPolytope, k_list: &[u32]) -> Result<ExtremalData> {
    let n = p.dim();
    let moments = polytope_moments(p);
    let mut rhs = Vec::with_capacity(n + 1);
    let unit = |i: usize| {
        let mut l = vec![Q::zero(); n];
        l[i] = Q::one();
        TorusGenerator::new(l, Q::zero())
    };
    let base = fit_expansions(p, &TorusGenerator::zero(n), k_list)?;
    rhs.push(q(2) * base.a(1));
    for i in 0..n {
        rhs.push(q(2) * fit_expansions(p, &unit(i), k_list)?.b(1));
    }
    let s_aff = solve_exact(moments.second.clone(), rhs)?;
    let s_bar = q(2) * base.a(1) / base.a(0);
    let half = Q::new((-1).into(), 2.into());
    let chi = TorusGenerator::new(s_aff[1..].iter().map(|s| s * &half).collect(), &s_aff[0] * &half);
    let is_zero = chi.is_zero();
    let (df_chi, norm_chi) = if is_zero {
        (Q::zero(), Q::zero())
    } else {
        (df_invariant(&fit_expansions(p, &chi, k_list)?), inner_product(p, &chi, &chi, k_list)?)
    };
    Ok(ExtremalData { s_aff, s_bar, chi, df_chi, norm_chi, is_zero })
}

/// Quadrature side: `L²` projection of the sampled scalar curvature onto affine
/// functions, and `(1/16π²) ∫ (S_aff − S̄)²`.
#[derive(Debug, Clone)]
pub struct ExtremalQuadrature {
    pub s_aff: Vec<f64>,
    pub s_bar: f64,
    pub norm: f64,
}

pub fn extremal_quadrature(model: &PotentialModel, quad: &QuadratureRule) -> Result<ExtremalQuadrature> {
    let n = model.dim();
    let e = |x: &[f64; 2], i: usize| if i == 0 { 1.0 } else { x[i - 1] };
    let mut g = DMatrix::<f64>::zeros(n + 1, n + 1);
    let mut r = DVector::<f64>::zeros(n + 1);
    let mut vol = 0.0;
    let mut s_int = 0.0;
    for (x, w) in quad.points.iter().zip(&quad.weights) {
        let s = model.scalar_curvature(x);
        vol += w;
        s_int += w * s;
        for i in 0..=n {
            r[i] += w * e(x, i) * s;
            for j in 0..=n {
                g[(i, j)] += w * e(x, i) * e(x, j);
            }
        }
    }
    let c = g.lu().solve(&r).ok_or(Error::Degenerate("moment matrix singular".into()))?;
    let s_bar = s_int / vol;
    let norm = quad.integrate(|x| {
        let v: f64 = (0..=n).map(|i| c[i] * e(x, i)).sum::<f64>() - s_bar;
        v * v
    }) / (16.0 * PI * PI);
    Ok(ExtremalQuadrature { s_aff: c.iter().cloned().collect(), s_bar, norm })
}
