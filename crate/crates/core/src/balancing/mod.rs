//! Modified balancing energy, geodesic descent, trace constants and
//! weak relative Chow certificates.

mod certificate;
mod descent;
mod energy;
mod self_consistent;

pub use certificate::{weak_chow_certificate, WeakChowCertificate, WeightBlock};
pub use descent::{t_iterate, t_operator, BalanceProblem, BalanceReport, DescentOptions, Mode};
pub use energy::{energy_za, grad_za, modified_diagonal, solve_ca};
pub use self_consistent::{
    fit_bergman_gradient, moment_generator, self_consistent_a, BergmanFit, SelfConsistentOptions, SelfConsistentReport,
};

use nalgebra::{DMatrix, DVector};

use crate::linalg::CMat;
use crate::quantisation::LevelData;

/// Least-squares fit of a diagonal-in-weights matrix by `cI + ξ` with
/// `ξ = diag(⟨λ, α⟩)` trace-free.
#[derive(Debug, Clone)]
pub struct AffineFit {
    pub c: f64,
    pub lambda: [f64; 2],
    pub xi: Vec<f64>,
    /// `‖M − (cI + ξ)‖_F / ‖M‖_F`, off-diagonal entries included.
    pub remainder: f64,
}

/// Fits `m ≈ cI + diag(⟨λ, α⟩ − mean)` by minimum-norm least squares.
pub fn fit_affine_weights(m: &CMat, level: &LevelData) -> AffineFit {
    let n = m.nrows();
    let dim = level.dim;
    let design = DMatrix::from_fn(n, dim + 1, |i, j| if j == 0 { 1.0 } else { level.alpha(i)[j - 1] });
    let rhs = DVector::from_fn(n, |i, _| m[(i, i)].re);
    let coef = design.clone().svd(true, true).solve(&rhs, 1e-12).unwrap_or_else(|_| DVector::zeros(dim + 1));
    let mut lambda = [0.0; 2];
    for d in 0..dim {
        lambda[d] = coef[d + 1];
    }
    let raw: Vec<f64> = (0..n).map(|i| lambda[0] * level.alpha(i)[0] + lambda[1] * level.alpha(i)[1]).collect();
    let mean = raw.iter().sum::<f64>() / n as f64;
    let xi: Vec<f64> = raw.iter().map(|v| v - mean).collect();
    let c = coef[0] + mean;
    let mut rem = 0.0;
    for i in 0..n {
        for j in 0..n {
            let fit = if i == j { c + xi[i] } else { 0.0 };
            rem += (m[(i, j)].re - fit).powi(2) + m[(i, j)].im.powi(2);
        }
    }
    AffineFit { c, lambda, xi, remainder: rem.sqrt() / m.norm() }
}
