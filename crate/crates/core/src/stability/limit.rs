use crate::balancing::BalanceReport;
use crate::exact::to_f64;
use crate::toric::TorusGenerator;
use crate::{Error, Result};

/// Value of the polynomial through `(hᵢ, yᵢ)` at `h = 0` (Neville's scheme).
pub fn richardson(points: &[(f64, f64)]) -> f64 {
    let n = points.len();
    let mut p: Vec<f64> = points.iter().map(|p| p.1).collect();
    for m in 1..n {
        for i in 0..n - m {
            let (hi, hj) = (points[i].0, points[i + m].0);
            p[i] = (hj * p[i] - hi * p[i + 1]) / (hj - hi);
        }
    }
    p[0]
}

#[derive(Debug, Clone)]
pub struct LimitWeight {
    /// `(k, (V/N) tr(B_k M_A⁻¹))` with `B_k` the centred lift of `β`.
    pub sequence: Vec<(u32, f64)>,
    /// Extrapolation in `1/k` to `k = ∞`.
    pub limit: f64,
}

/// Sequence `(V/N) tr(B_k ((1 + C_A)I + A/2πk)⁻¹)` over converged reports and its limit.
pub fn limit_weight_check(reports: &[BalanceReport], beta: &TorusGenerator) -> Result<LimitWeight> {
    let mut sequence = Vec::with_capacity(reports.len());
    for r in reports {
        if !r.converged {
            return Err(Error::NotConverged(format!("report at k = {} has residual {:e}", r.k, r.residual)));
        }
        let b: Vec<f64> = beta.centred_exact(&r.basis).iter().map(to_f64).collect();
        let m = crate::balancing::modified_diagonal(&r.a, r.c_a, r.k)?;
        let s: f64 = b.iter().zip(&m).map(|(bv, mv)| bv / mv).sum();
        sequence.push((r.k, r.volume / r.basis.len() as f64 * s));
    }
    let pts: Vec<(f64, f64)> = sequence.iter().map(|(k, v)| (1.0 / *k as f64, *v)).collect();
    Ok(LimitWeight { limit: richardson(&pts), sequence })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn richardson_recovers_polynomial_limit() {
        let f = |k: f64| 0.25 + 1.0 / k - 3.0 / (k * k);
        let pts: Vec<(f64, f64)> = (3..=6).map(|k| (1.0 / k as f64, f(k as f64))).collect();
        assert!((richardson(&pts) - 0.25).abs() < 1e-12);
    }
}
