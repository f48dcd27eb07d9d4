use super::BalanceReport;
use crate::linalg;
use crate::quantisation::LevelData;
use crate::{Error, Result};

/// Lattice points sharing one weight of `ξ`, with the centre-of-mass eigenvalues on them.
#[derive(Debug, Clone)]
pub struct WeightBlock {
    pub weight: f64,
    pub indices: Vec<usize>,
    /// `b_ν = (c + ξ_ν)⁻¹`.
    pub b: f64,
    /// Relative spread of the `μ̄` eigenvalues inside the block.
    pub spread: f64,
}

#[derive(Debug, Clone)]
pub struct WeakChowCertificate {
    pub k: u32,
    pub blocks: Vec<WeightBlock>,
    /// `max |μ̄_αα − b_ν(α)| / b_ν(α)`.
    pub eigen_mismatch: f64,
    /// `sup |Σ b_ν |s'_{ν,i}|²_{FS} / mean − 1|` over the grid.
    pub constancy_defect: f64,
    pub torus_remainder: f64,
    pub verdict: bool,
}

/// Builds the certificate from a report with a diagonal form. `tol` bounds the
/// block spread and the constancy defect; `span_tol` bounds the torus remainder.
pub fn weak_chow_certificate(report: &BalanceReport, level: &LevelData, tol: f64, span_tol: f64) -> Result<WeakChowCertificate> {
    if !report.h.is_diagonal() {
        return Err(Error::Unsupported("certificates are built for torus-invariant forms".into()));
    }
    let fit = &report.recovered;
    let mu = linalg::real_diagonal(&report.mu_bar);
    let b_fit: Vec<f64> = fit.xi.iter().map(|x| 1.0 / (fit.c + x)).collect();
    if let Some(bad) = b_fit.iter().chain(&mu).find(|b| !(**b > 0.0)) {
        return Err(Error::NegativeWeight(*bad));
    }
    let scale = fit.xi.iter().map(|x| x.abs()).fold(0.0, f64::max).max(fit.c.abs());
    let group_tol = 1e-6 * scale.max(1e-300);
    let mut order: Vec<usize> = (0..mu.len()).collect();
    order.sort_by(|&a, &b| fit.xi[a].total_cmp(&fit.xi[b]));
    let mut blocks: Vec<WeightBlock> = Vec::new();
    for i in order {
        match blocks.last_mut() {
            Some(bl) if (fit.xi[i] - bl.weight).abs() <= group_tol => bl.indices.push(i),
            _ => blocks.push(WeightBlock { weight: fit.xi[i], indices: vec![i], b: b_fit[i], spread: 0.0 }),
        }
    }
    for bl in blocks.iter_mut() {
        let vals: Vec<f64> = bl.indices.iter().map(|&i| mu[i]).collect();
        let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        bl.spread = (hi - lo) / hi;
    }
    let eigen_mismatch = mu.iter().zip(&b_fit).map(|(m, b)| ((m - b) / b).abs()).fold(0.0, f64::max);

    // |s'_α|²_FS for the Hilb(FS H)-orthonormal basis is (Vkⁿ/N) w_α / μ̄_α.
    let fs = level.fs(&report.h)?;
    let lvl = fs.balanced_level();
    let vals: Vec<f64> =
        fs.samples.iter().map(|s| lvl * s.probs.iter().zip(&mu).zip(&b_fit).map(|((w, m), b)| b * w / m).sum::<f64>()).collect();
    let mean = vals.iter().sum::<f64>() / vals.len() as f64;
    let constancy_defect = vals.iter().map(|v| (v / mean - 1.0).abs()).fold(0.0, f64::max);
    let max_spread = blocks.iter().map(|b| b.spread).fold(0.0, f64::max);
    let verdict = report.converged && max_spread <= tol && constancy_defect <= span_tol && fit.remainder <= span_tol;
    Ok(WeakChowCertificate { k: report.k, blocks, eigen_mismatch, constancy_defect, torus_remainder: fit.remainder, verdict })
}
