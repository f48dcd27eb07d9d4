use super::energy::{energy_za, grad_za, modified_diagonal, solve_ca};
use super::{fit_affine_weights, AffineFit};
use crate::linalg::{self, CMat};
use crate::quantisation::{HermitianForm, LevelData};
use crate::toric::{LatticeBasis, TorusGenerator};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Plain,
    FixedA,
    SelfConsistent,
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Plain => "plain",
            Mode::FixedA => "fixed-A",
            Mode::SelfConsistent => "self-consistent",
        }
    }
}

/// Level-`k` balancing problem with a diagonal generator `A` and its trace constant.
#[derive(Debug, Clone)]
pub struct BalanceProblem {
    pub level: LevelData,
    pub a: Vec<f64>,
    pub c_a: f64,
    pub mode: Mode,
    m_diag: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct DescentOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub armijo: f64,
}

impl Default for DescentOptions {
    fn default() -> Self {
        Self { tol: 1e-8, max_iter: 500, armijo: 1e-4 }
    }
}

#[derive(Debug, Clone)]
pub struct BalanceReport {
    pub mode: Mode,
    pub k: u32,
    pub h: HermitianForm,
    pub mu_bar: CMat,
    pub a: Vec<f64>,
    pub c_a: f64,
    pub residual: f64,
    pub converged: bool,
    pub iterations: usize,
    pub energy_trace: Vec<f64>,
    pub residual_trace: Vec<f64>,
    /// Affine fit of `μ̄⁻¹` over the weight span: `c`, `ξ` and the remainder.
    pub recovered: AffineFit,
    /// `sup |ρ̄(ω_H) − 1|` when `H` is diagonal.
    pub bergman_sup_dev: Option<f64>,
    pub basis: LatticeBasis,
    pub volume: f64,
}

impl BalanceProblem {
    pub fn plain(level: LevelData) -> Self {
        let n = level.n_sections();
        Self { level, a: vec![0.0; n], c_a: 0.0, mode: Mode::Plain, m_diag: vec![1.0; n] }
    }

    pub fn fixed_a(level: LevelData, a: Vec<f64>) -> Result<Self> {
        if a.len() != level.n_sections() {
            return Err(Error::Dimension { expected: level.n_sections(), got: a.len() });
        }
        let c_a = solve_ca(&a, level.k)?;
        let m_diag = modified_diagonal(&a, c_a, level.k)?;
        Ok(Self { level, a, c_a, mode: Mode::FixedA, m_diag })
    }

    /// `A = scale · (centred weights of g)`.
    pub fn from_generator(level: LevelData, g: &TorusGenerator, scale: f64) -> Result<Self> {
        let a = g.centred_weights(&level.basis).into_iter().map(|w| scale * w).collect();
        Self::fixed_a(level, a)
    }

    pub fn m_diag(&self) -> &[f64] {
        &self.m_diag
    }

    pub fn energy(&self, h: &HermitianForm) -> Result<f64> {
        let fs = self.level.fs(h)?;
        Ok(energy_za(&self.level, &fs, h, &self.m_diag))
    }

    pub fn gradient(&self, h: &HermitianForm) -> Result<CMat> {
        let fs = self.level.fs(h)?;
        Ok(grad_za(&fs, &fs.centre_of_mass(), &self.m_diag))
    }

    /// Target `(Vkⁿ/N) M_A⁻¹` of the centre of mass at a critical point.
    pub fn critical_target(&self) -> CMat {
        let lvl = self.level.volume * self.level.k_pow() / self.level.n_sections() as f64;
        linalg::from_real_diagonal(&self.m_diag.iter().map(|m| lvl / m).collect::<Vec<_>>())
    }

    /// Geodesic descent on `𝒵^A` with Armijo backtracking along
    /// `t ↦ H^{1/2} e^{tB} H^{1/2}`, `B = −(N/Vkⁿ) δ𝒵^A`.
    pub fn descend(&self, h0: &HermitianForm, opts: &DescentOptions) -> Result<BalanceReport> {
        let mut h = h0.det_normalised()?;
        let mut energy_trace = Vec::new();
        let mut residual_trace = Vec::new();
        let mut iterations = 0;
        let mut fs = self.level.fs(&h)?;
        let mut z = energy_za(&self.level, &fs, &h, &self.m_diag);
        loop {
            let mu = fs.centre_of_mass();
            let grad = grad_za(&fs, &mu, &self.m_diag);
            let residual = grad.norm() / mu.norm();
            energy_trace.push(z);
            residual_trace.push(residual);
            if residual <= opts.tol || iterations >= opts.max_iter {
                return Ok(self.report(h, mu, residual, residual <= opts.tol, iterations, energy_trace, residual_trace, &fs));
            }
            let b = grad.map(|v| v * (-1.0 / fs.balanced_level()));
            let slope = linalg::trace_product(&b, &grad);
            let slack = 1e-12 * z.abs().max(1.0);
            let mut t = 1.0;
            loop {
                let trial = h.geodesic(&b, t).and_then(|x| x.det_normalised());
                let accepted = match trial {
                    Ok(trial) => match self.level.fs(&trial) {
                        Ok(trial_fs) => {
                            let zt = energy_za(&self.level, &trial_fs, &trial, &self.m_diag);
                            if zt <= z + opts.armijo * t * slope + slack {
                                h = trial;
                                fs = trial_fs;
                                z = zt;
                                true
                            } else {
                                false
                            }
                        }
                        Err(Error::FsNotPositive { .. }) => false,
                        Err(e) => return Err(e),
                    },
                    Err(Error::NotPositiveDefinite(_)) => false,
                    Err(e) => return Err(e),
                };
                if accepted {
                    break;
                }
                t *= 0.5;
                if t < 1e-12 {
                    return Err(Error::LineSearch { iteration: iterations, residual });
                }
            }
            iterations += 1;
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn report(
        &self,
        h: HermitianForm,
        mu_bar: CMat,
        residual: f64,
        converged: bool,
        iterations: usize,
        energy_trace: Vec<f64>,
        residual_trace: Vec<f64>,
        fs: &crate::quantisation::FsData,
    ) -> BalanceReport {
        let inv = linalg::hermitian_fn(&mu_bar, |v| 1.0 / v);
        let recovered = fit_affine_weights(&inv, &self.level);
        let bergman_sup_dev =
            if fs.diagonal { fs.bergman(&mu_bar).ok().map(|r| r.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max)) } else { None };
        BalanceReport {
            mode: self.mode,
            k: self.level.k,
            h,
            mu_bar,
            a: self.a.clone(),
            c_a: self.c_a,
            residual,
            converged,
            iterations,
            energy_trace,
            residual_trace,
            recovered,
            bergman_sup_dev,
            basis: self.level.basis.clone(),
            volume: self.level.volume,
        }
    }
}

/// Donaldson's map `H ↦ Hilb(FS(H))`, determinant-normalised.
pub fn t_operator(level: &LevelData, h: &HermitianForm) -> Result<HermitianForm> {
    let fs = level.fs(h)?;
    fs.hilb(h, &fs.centre_of_mass())?.det_normalised()
}

/// Iterates the T-operator until `‖T(H) − H‖/‖H‖ ≤ tol`; returns the final form and the iteration count.
pub fn t_iterate(level: &LevelData, h0: &HermitianForm, tol: f64, max_iter: usize) -> Result<(HermitianForm, usize, bool)> {
    let mut h = h0.det_normalised()?;
    for it in 0..max_iter {
        let next = t_operator(level, &h)?;
        let d = next.relative_distance(&h);
        h = next;
        if d <= tol {
            return Ok((h, it + 1, true));
        }
    }
    Ok((h, max_iter, false))
}
