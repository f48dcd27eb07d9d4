use std::f64::consts::PI;

use crate::linalg::{self, CMat};
use crate::quantisation::{FsData, HermitianForm, LevelData};
use crate::{Error, Result};

/// Trace constant `C_A`: the unique `C` with `Σ ((1 + C) + aᵢ/2πk)⁻¹ = N`,
/// by Newton's method safeguarded with bisection.
pub fn solve_ca(a: &[f64], k: u32) -> Result<f64> {
    if a.is_empty() || a.iter().any(|v| !v.is_finite()) {
        return Err(Error::NoAdmissibleConstant("empty or non-finite generator".into()));
    }
    let n = a.len() as f64;
    let t: Vec<f64> = a.iter().map(|v| v / (2.0 * PI * k as f64)).collect();
    let tmin = t.iter().cloned().fold(f64::INFINITY, f64::min);
    // f(s) = Σ 1/(s + tᵢ) − N is strictly decreasing on (−tmin, ∞).
    let f = |s: f64| t.iter().map(|ti| 1.0 / (s + ti)).sum::<f64>() - n;
    let df = |s: f64| -t.iter().map(|ti| (s + ti).powi(-2)).sum::<f64>();
    let mut lo = -tmin;
    let mut hi = (1.0 - tmin).max(1.0);
    while f(hi) > 0.0 {
        hi = lo + 2.0 * (hi - lo);
        if !hi.is_finite() {
            return Err(Error::NoAdmissibleConstant("bracket diverged".into()));
        }
    }
    let mut s = 0.5 * (lo + hi);
    for _ in 0..200 {
        let fs = f(s);
        if fs == 0.0 {
            break;
        }
        if fs > 0.0 {
            lo = s;
        } else {
            hi = s;
        }
        let newton = s - fs / df(s);
        s = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if (hi - lo) < 1e-16 * s.abs().max(1.0) {
            break;
        }
    }
    Ok(s - 1.0)
}

/// Diagonal of `M_A = (1 + C_A) I + A/2πk`.
pub fn modified_diagonal(a: &[f64], c_a: f64, k: u32) -> Result<Vec<f64>> {
    let m: Vec<f64> = a.iter().map(|v| 1.0 + c_a + v / (2.0 * PI * k as f64)).collect();
    if let Some(bad) = m.iter().find(|v| !(**v > 0.0)) {
        return Err(Error::NotPositiveDefinite(*bad));
    }
    Ok(m)
}

/// `𝒵^A(H) = I(FS(H)) + (kⁿV/N) tr(M_A⁻¹ log H)` with `I = 2k^{n+1} E(ψ_H)`.
pub fn energy_za(level: &LevelData, fs: &FsData, h: &HermitianForm, m_diag: &[f64]) -> f64 {
    let kf = level.k as f64;
    let i_part = 2.0 * kf * level.k_pow() * fs.monge_ampere_energy(level);
    let log_h = h.log();
    let tr: f64 = m_diag.iter().enumerate().map(|(i, m)| log_h[(i, i)].re / m).sum();
    i_part + fs.balanced_level() * tr
}

/// `δ𝒵^A = −μ̄ + (Vkⁿ/N) M_A⁻¹` in the `H`-orthonormal frame.
pub fn grad_za(fs: &FsData, mu_bar: &CMat, m_diag: &[f64]) -> CMat {
    let lvl = fs.balanced_level();
    let target = linalg::from_real_diagonal(&m_diag.iter().map(|m| lvl / m).collect::<Vec<_>>());
    target - mu_bar
}
