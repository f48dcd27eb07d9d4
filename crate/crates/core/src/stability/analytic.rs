use std::f64::consts::PI;

use num_traits::Zero;

use crate::exact::{q, to_f64, Q};
use crate::quantisation::LevelData;
use crate::toric::{LatticeBasis, PotentialModel, QuadratureRule, TorusGenerator};
use crate::Result;

/// How the additive constant of a Hamiltonian is fixed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HamiltonianConstant {
    /// `∫ ψ ωⁿ/n! = 0`.
    ZeroMean,
    /// `ψ = ⟨λ, x⟩ + c₀`; the matching lift to `H⁰(kL)` has weights `−2π(⟨λ, α⟩ + k c₀)`.
    Fixed(f64),
}

/// `ψ = ⟨λ, x⟩ + c₀` on the quadrature nodes, with `ι(λ∂_θ) ω = −dψ`.
pub fn hamiltonian(quad: &QuadratureRule, lambda: [f64; 2], constant: HamiltonianConstant) -> (Vec<f64>, f64) {
    let lin: Vec<f64> = quad.points.iter().map(|x| lambda[0] * x[0] + lambda[1] * x[1]).collect();
    let c0 = match constant {
        HamiltonianConstant::ZeroMean => -quad.integrate_samples(&lin) / quad.weights.iter().sum::<f64>(),
        HamiltonianConstant::Fixed(c) => c,
    };
    (lin.into_iter().map(|v| v + c0).collect(), c0)
}

/// Weights on `H⁰(kL)` of the lift whose Hamiltonian is `⟨λ, x⟩ + c₀`:
/// `−2π(⟨λ, α⟩ + k c₀)`.
pub fn hamiltonian_lift(lambda: [f64; 2], c0: f64, basis: &LatticeBasis) -> Vec<f64> {
    let kf = basis.k as f64;
    basis.points.iter().map(|a| -2.0 * PI * (lambda[0] * a[0] as f64 + lambda[1] * a[1] as f64 + kf * c0)).collect()
}

/// `sup |∂_ξ ψ + ι(v)ω|_ξ|` at `x` by central differences in `ξ`, where `v = λ∂_θ`
/// and `ψ = ⟨λ, x(ξ)⟩` through the inverse Legendre map.
pub fn hamiltonian_defect(model: &PotentialModel, lambda: [f64; 2], x: &[f64; 2], step: f64) -> f64 {
    let n = model.dim();
    let g = model.geometry(x);
    let psi = |xi: [f64; 2]| {
        let y = model.moment_from_xi(&xi, x);
        lambda[0] * y[0] + lambda[1] * y[1]
    };
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let mut p = g.xi;
        let mut m = g.xi;
        p[i] += step;
        m[i] -= step;
        let dpsi = (psi(p) - psi(m)) / (2.0 * step);
        // ι(λ∂_θ)(φ_ij dξ_i ∧ dθ_j) = −φ_ij λ_j dξ_i
        let iota: f64 = -(0..n).map(|j| g.hess_inv[i][j] * lambda[j]).sum::<f64>();
        worst = worst.max((dpsi + iota).abs());
    }
    worst
}

/// Scalar curvature on the nodes and its average `S̄`.
pub fn scalar_curvature(model: &PotentialModel, quad: &QuadratureRule) -> (Vec<f64>, f64) {
    let s: Vec<f64> = quad.points.iter().map(|x| model.scalar_curvature(x)).collect();
    let bar = quad.integrate_samples(&s) / quad.weights.iter().sum::<f64>();
    (s, bar)
}

/// `(1/4π) ∫ ψ (S − S̄) ωⁿ/n!` with `ψ = −(1/2π)(⟨λ, x⟩ + c)`, the Hamiltonian of
/// the lift with weights `⟨λ, α⟩ + ck`. Equals `DF(g)/2π`.
pub fn futaki_integral(model: &PotentialModel, quad: &QuadratureRule, g: &TorusGenerator) -> f64 {
    let (s, bar) = scalar_curvature(model, quad);
    let vals: Vec<f64> = quad.points.iter().zip(&s).map(|(x, sv)| -g.affine(x) / (2.0 * PI) * (sv - bar)).collect();
    quad.integrate_samples(&vals) / (4.0 * PI)
}

/// Both sides of the equivariant density identity
/// `(V/kN) tr(A)/2π = −∫ψρ̄ − (1/4πk)∫(dψ, dρ̄)`, and the two pointwise densities.
#[derive(Debug, Clone)]
pub struct EquivariantDensity {
    pub k: u32,
    /// `(V/kN) tr A` exactly; the left side is this divided by `2π`.
    pub lhs_exact: Q,
    pub lhs: f64,
    pub rhs: f64,
    /// `−(1/2π) Σ a_α |s'_α|²` (weighted Gram density).
    pub gram_density: Vec<f64>,
    /// `k(ψρ̄ + (1/4πk)(dψ, dρ̄))`.
    pub closed_form: Vec<f64>,
    pub pointwise_sup: f64,
}

pub fn equivariant_density(level: &LevelData, model: &PotentialModel, g: &TorusGenerator) -> Result<EquivariantDensity> {
    let k = level.k;
    let kf = k as f64;
    let hilb = level.hilb()?;
    let berg = level.bergman(&hilb)?;
    let weights = g.weights(&level.basis);
    let n_sec = level.n_sections() as i64;
    let tr = g.weights_exact(&level.basis).iter().fold(Q::zero(), |a, b| a + b);
    let lhs_exact = model.polytope().volume() * tr / (q(k as i64) * q(n_sec));
    let lambda = g.lambda_f64();
    let c = g.shift_f64();
    let mut gram_density = Vec::with_capacity(level.quad.len());
    let mut closed_form = Vec::with_capacity(level.quad.len());
    let mut rhs_vals = Vec::with_capacity(level.quad.len());
    for (i, geo) in level.geometry.iter().enumerate() {
        let x = &geo.x;
        let psi = -(lambda[0] * x[0] + lambda[1] * x[1] + c) / (2.0 * PI);
        let dpsi = [-lambda[0] / (2.0 * PI), -lambda[1] / (2.0 * PI)];
        let dr = berg.grad_rho_bar[i];
        // (df, dg)_ω = 2π u^{ij} f_i g_j in moment coordinates
        let mut pair = 0.0;
        for a in 0..level.dim {
            for b in 0..level.dim {
                pair += 2.0 * PI * geo.hess_inv[a][b] * dpsi[a] * dr[b];
            }
        }
        let rho = berg.rho_bar[i];
        gram_density.push(-berg.parts[i].iter().zip(&weights).map(|(p, w)| p * w).sum::<f64>() / (2.0 * PI));
        closed_form.push(kf * (psi * rho + pair / (4.0 * PI * kf)));
        rhs_vals.push(-psi * rho - pair / (4.0 * PI * kf));
    }
    let rhs = level.quad.integrate_samples(&rhs_vals);
    let pointwise_sup = gram_density.iter().zip(&closed_form).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(EquivariantDensity { k, lhs: to_f64(&lhs_exact) / (2.0 * PI), lhs_exact, rhs, gram_density, closed_form, pointwise_sup })
}

/// `sup |ρ̄_k − 1 − (S − S̄)/4πk|` over the nodes.
pub fn bergman_expansion_defect(level: &LevelData, model: &PotentialModel) -> Result<f64> {
    let berg = level.bergman(&level.hilb()?)?;
    let (s, bar) = scalar_curvature(model, &level.quad);
    let kf = level.k as f64;
    Ok(berg.rho_bar.iter().zip(&s).map(|(r, sv)| (r - 1.0 - (sv - bar) / (4.0 * PI * kf)).abs()).fold(0.0, f64::max))
}
