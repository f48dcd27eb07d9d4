use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use super::{BalanceProblem, BalanceReport, DescentOptions, Mode};
use crate::linalg;
use crate::quantisation::{FsData, HermitianForm, LevelData};
use crate::{Error, Result};

/// Torus generator solving the necessary conditions for a critical point of
/// `𝒵^A`: along each torus direction `e^{tB}` the energy is affine with slope
/// `(Vkⁿ/N) tr(B M_A⁻¹) − tr(B μ̄)`, and `tr(B μ̄) = k^{n+1} ∫_P ⟨β, x⟩ dx`
/// does not depend on `H`. Returns `(λ, A)` with `A = 2π(⟨λ, α⟩ − mean)`.
pub fn moment_generator(level: &LevelData) -> Result<([f64; 2], Vec<f64>)> {
    let dim = level.dim;
    let n = level.n_sections();
    let kf = level.k as f64;
    let lvl = level.volume * level.k_pow() / n as f64;
    let mut target = [0.0; 2];
    for d in 0..dim {
        target[d] = kf * level.k_pow() * level.quad.integrate(|x| x[d]);
    }
    let alphas: Vec<[f64; 2]> = (0..n).map(|i| level.alpha(i)).collect();
    let mut mean = [0.0; 2];
    for a in &alphas {
        mean[0] += a[0] / n as f64;
        mean[1] += a[1] / n as f64;
    }
    // Unknowns (s = 1 + C, λ).
    let mut s = 1.0;
    let mut lam = [0.0; 2];
    let ts = |lam: &[f64; 2]| -> Vec<f64> { alphas.iter().map(|a| (lam[0] * (a[0] - mean[0]) + lam[1] * (a[1] - mean[1])) / kf).collect() };
    let residual = |s: f64, lam: &[f64; 2]| -> Option<Vec<f64>> {
        let t = ts(lam);
        if t.iter().any(|ti| s + ti <= 0.0) {
            return None;
        }
        let mut r = vec![t.iter().map(|ti| 1.0 / (s + ti)).sum::<f64>() - n as f64];
        for d in 0..dim {
            r.push(lvl * alphas.iter().zip(&t).map(|(a, ti)| a[d] / (s + ti)).sum::<f64>() - target[d]);
        }
        Some(r)
    };
    let norm = |r: &[f64]| r.iter().map(|v| v * v).sum::<f64>().sqrt();
    let scale = n as f64 + target.iter().map(|v| v.abs()).sum::<f64>();
    let mut r = residual(s, &lam).expect("initial point admissible");
    for _ in 0..200 {
        if norm(&r) <= 1e-14 * scale {
            break;
        }
        let t = ts(&lam);
        let c2: Vec<f64> = t.iter().map(|ti| (s + ti).powi(-2)).collect();
        let mut jac = DMatrix::<f64>::zeros(dim + 1, dim + 1);
        for (i, a) in alphas.iter().enumerate() {
            let row = |r: usize| if r == 0 { 1.0 } else { lvl * a[r - 1] };
            for r in 0..=dim {
                jac[(r, 0)] -= row(r) * c2[i];
                for j in 0..dim {
                    jac[(r, j + 1)] -= row(r) * c2[i] * (a[j] - mean[j]) / kf;
                }
            }
        }
        let step = jac.lu().solve(&DVector::from_vec(r.clone())).ok_or(Error::Degenerate("moment system singular".into()))?;
        let mut damp = 1.0;
        loop {
            let s2 = s - damp * step[0];
            let mut l2 = lam;
            for d in 0..dim {
                l2[d] -= damp * step[d + 1];
            }
            if let Some(r2) = residual(s2, &l2) {
                if norm(&r2) < norm(&r) || damp < 1e-10 {
                    s = s2;
                    lam = l2;
                    r = r2;
                    break;
                }
            }
            damp *= 0.5;
            if damp < 1e-12 {
                return Err(Error::NotConverged("moment system damping failed".into()));
            }
        }
    }
    if norm(&r) > 1e-10 * scale {
        return Err(Error::NotConverged(format!("moment system residual {:e}", norm(&r))));
    }
    let a = ts(&lam).into_iter().map(|t| 2.0 * PI * kf * t).collect();
    Ok((lam, a))
}

/// Weighted least-squares fit of `ρ̄(ω_H)` by `⟨λ, μ_H⟩ + c` through gradients:
/// `[∫ W dvol] λ = ∫ ∇_ξ ρ̄ dvol`.
#[derive(Debug, Clone)]
pub struct BergmanFit {
    pub lambda: [f64; 2],
    /// `‖∇ρ̄ − Wλ‖ / ‖∇ρ̄‖` in `L²(ω_H)` with the `W⁻¹` pointwise norm.
    pub remainder: f64,
    pub grad_norm: f64,
}

pub fn fit_bergman_gradient(level: &LevelData, fs: &FsData, mu_diag: &[f64]) -> Result<BergmanFit> {
    let g = fs.bergman_gradient_xi(level, mu_diag)?;
    let dim = fs.dim;
    let mut lhs = DMatrix::<f64>::zeros(dim, dim);
    let mut rhs = DVector::<f64>::zeros(dim);
    for (s, gv) in fs.samples.iter().zip(&g) {
        for i in 0..dim {
            rhs[i] += s.dvol * gv[i];
            for j in 0..dim {
                lhs[(i, j)] += s.dvol * s.w[i][j].re;
            }
        }
    }
    let sol = lhs.lu().solve(&rhs).ok_or(Error::Degenerate("Bergman fit singular".into()))?;
    let mut lambda = [0.0; 2];
    for d in 0..dim {
        lambda[d] = sol[d];
    }
    let (mut rem, mut tot) = (0.0, 0.0);
    for (s, gv) in fs.samples.iter().zip(&g) {
        let w: Vec<[f64; 2]> = (0..2).map(|i| [s.w[i][0].re, s.w[i][1].re]).collect();
        let (winv, _) = crate::toric::inverse2(&[w[0], w[1]], dim);
        let mut e = [0.0; 2];
        for i in 0..dim {
            e[i] = gv[i] - (0..dim).map(|j| w[i][j] * lambda[j]).sum::<f64>();
        }
        for i in 0..dim {
            for j in 0..dim {
                rem += s.dvol * e[i] * winv[i][j] * e[j];
                tot += s.dvol * gv[i] * winv[i][j] * gv[j];
            }
        }
    }
    let grad_norm = tot.sqrt();
    let remainder = if grad_norm > 1e-12 { rem.sqrt() / grad_norm } else { rem.sqrt() };
    Ok(BergmanFit { lambda, remainder, grad_norm })
}

#[derive(Debug, Clone, Copy)]
pub struct SelfConsistentOptions {
    pub descent: DescentOptions,
    pub outer_tol: f64,
    pub max_outer: usize,
}

impl Default for SelfConsistentOptions {
    fn default() -> Self {
        Self { descent: DescentOptions { tol: 1e-8, max_iter: 2000, armijo: 1e-4 }, outer_tol: 1e-7, max_outer: 6 }
    }
}

#[derive(Debug, Clone)]
pub struct SelfConsistentReport {
    pub report: BalanceReport,
    pub lambda: [f64; 2],
    pub a_op_norm: f64,
    pub c_a: f64,
    pub rounds: usize,
    /// `max |A_new − A|` after each outer round.
    pub a_changes: Vec<f64>,
    pub fit: BergmanFit,
}

/// Outer fixed point `A ← 2π·centred⟨λ_fit, α⟩`, where `λ_fit` fits `∇ρ̄` of the
/// inner critical metric, started from the moment-condition generator.
pub fn self_consistent_a(level: &LevelData, h0: &HermitianForm, opts: &SelfConsistentOptions) -> Result<SelfConsistentReport> {
    let (_, mut a) = moment_generator(level)?;
    let mut h = h0.clone();
    let mut a_changes = Vec::new();
    for round in 1..=opts.max_outer {
        let mut problem = BalanceProblem::fixed_a(level.clone(), a.clone())?;
        problem.mode = Mode::SelfConsistent;
        let report = problem.descend(&h, &opts.descent)?;
        let fs = level.fs(&report.h)?;
        let mu = linalg::real_diagonal(&report.mu_bar);
        let fit = fit_bergman_gradient(level, &fs, &mu)?;
        let mean: f64 = (0..a.len()).map(|i| lin(&fit.lambda, level.alpha(i))).sum::<f64>() / a.len() as f64;
        let a_new: Vec<f64> = (0..a.len()).map(|i| 2.0 * PI * (lin(&fit.lambda, level.alpha(i)) - mean)).collect();
        let change = a_new.iter().zip(&a).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        a_changes.push(change);
        h = report.h.clone();
        if !report.converged {
            return Err(Error::NotConverged(format!("inner descent stalled at residual {:e}", report.residual)));
        }
        if change <= opts.outer_tol {
            let a_op_norm = a.iter().map(|v| v.abs()).fold(0.0, f64::max);
            return Ok(SelfConsistentReport { lambda: fit.lambda, a_op_norm, c_a: problem.c_a, rounds: round, a_changes, fit, report });
        }
        a = a_new;
    }
    Err(Error::NotConverged(format!("generator still moving after {} rounds: {:?}", opts.max_outer, a_changes)))
}

fn lin(l: &[f64; 2], a: [f64; 2]) -> f64 {
    l[0] * a[0] + l[1] * a[1]
}
