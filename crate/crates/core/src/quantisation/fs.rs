use std::f64::consts::PI;

use nalgebra::DVector;

use super::{HermitianForm, LevelData};
use crate::linalg::{self, CMat, Complex};
use crate::{Error, Result};

/// `FS(H)` sampled at one quadrature node and angle.
#[derive(Debug, Clone)]
pub struct FsSample {
    pub node: usize,
    pub angle: usize,
    /// `log Σ|s'_i|²_{h^k}` for an `H`-orthonormal basis; `FS(H)^k = e^{−log_q} h^k`.
    pub log_q: f64,
    /// Density of `ω_H` with respect to `dξ dθ`.
    pub det_w: f64,
    /// Quadrature weight times the density of `ω_Hⁿ/n!` with respect to `dx dθ`.
    pub dvol: f64,
    /// `∂∂̄`-Hessian of the relative potential in log coordinates, scaled to `ω_H`.
    pub w: [[Complex; 2]; 2],
    /// `|u_α|²` for the unit vector `u = f/|f|`, `f = H^{-1/2} F`.
    pub probs: Vec<f64>,
    /// `u` itself; empty when `H` is diagonal (then `u_α = √probs_α` up to phase).
    pub u: Vec<Complex>,
    /// `Σ |u_α|² α / k`, the moment map of `ω_H` for torus-invariant `H`.
    pub moment: [f64; 2],
}

/// Fubini–Study data of a Hermitian form on the quadrature grid.
#[derive(Debug, Clone)]
pub struct FsData {
    pub k: u32,
    pub dim: usize,
    pub n_sections: usize,
    pub volume: f64,
    pub diagonal: bool,
    pub samples: Vec<FsSample>,
}

impl LevelData {
    pub fn fs(&self, h: &HermitianForm) -> Result<FsData> {
        let n = self.n_sections();
        if h.dim() != n {
            return Err(Error::Dimension { expected: n, got: h.dim() });
        }
        let diagonal = h.is_diagonal();
        if !diagonal && self.quad.is_invariant() {
            return Err(Error::Unsupported("non-diagonal forms need an angular grid".into()));
        }
        let kf = self.k as f64;
        let dim = self.dim;
        let mut samples = Vec::with_capacity(self.quad.len() * self.quad.angles.len());
        let log_h: Vec<f64> = h.diagonal().iter().map(|v| v.ln()).collect();
        for (node, row) in self.half_log_norms.iter().enumerate() {
            let geo = &self.geometry[node];
            if diagonal {
                let t: Vec<f64> = row.iter().zip(&log_h).map(|(l, lh)| 2.0 * l - lh).collect();
                let m = t.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let e: Vec<f64> = t.iter().map(|v| (v - m).exp()).collect();
                let s: f64 = e.iter().sum();
                let probs: Vec<f64> = e.iter().map(|v| v / s).collect();
                let mut mean = [0.0; 2];
                let mut second = [[0.0; 2]; 2];
                for (p, a) in probs.iter().zip(&self.alphas) {
                    for i in 0..dim {
                        mean[i] += p * a[i];
                        for j in 0..dim {
                            second[i][j] += p * a[i] * a[j];
                        }
                    }
                }
                let mut w = [[Complex::new(0.0, 0.0); 2]; 2];
                for i in 0..dim {
                    for j in 0..dim {
                        w[i][j] = Complex::new(2.0 / kf * (second[i][j] - mean[i] * mean[j]), 0.0);
                    }
                }
                let det_w = det(&w, dim);
                check_density(&w, det_w, dim, &geo.x)?;
                let base = self.quad.weights[node] * det_w * geo.det_hess;
                for (angle, aw) in self.quad.angle_weights.iter().enumerate() {
                    samples.push(FsSample {
                        node,
                        angle,
                        log_q: s.ln() + m,
                        det_w,
                        dvol: base * aw,
                        w,
                        probs: probs.clone(),
                        u: Vec::new(),
                        moment: [mean[0] / kf, mean[1] / kf],
                    });
                }
            } else {
                let m = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                for (angle, theta) in self.quad.angles.iter().enumerate() {
                    let fvec = DVector::from_iterator(
                        n,
                        row.iter()
                            .zip(&self.alphas)
                            .map(|(l, a)| Complex::from_polar((l - m).exp(), 2.0 * PI * (a[0] * theta[0] + a[1] * theta[1]))),
                    );
                    let f = h.inv_sqrt() * &fvec;
                    let norm2 = f.norm_squared();
                    let u = f.map(|z| z / norm2.sqrt());
                    let mut ui = Vec::with_capacity(dim);
                    for i in 0..dim {
                        let fa = DVector::from_iterator(n, fvec.iter().zip(&self.alphas).map(|(z, a)| z * a[i]));
                        ui.push((h.inv_sqrt() * fa).map(|z| z / norm2.sqrt()));
                    }
                    let mut w = [[Complex::new(0.0, 0.0); 2]; 2];
                    for i in 0..dim {
                        for j in 0..dim {
                            let a = ui[i].dotc(&ui[j]);
                            let b = ui[i].dotc(&u) * u.dotc(&ui[j]);
                            w[i][j] = (a - b) * (2.0 / kf);
                        }
                    }
                    let det_w = det(&w, dim);
                    check_density(&w, det_w, dim, &geo.x)?;
                    let probs: Vec<f64> = u.iter().map(|z| z.norm_sqr()).collect();
                    let mut moment = [0.0; 2];
                    for (p, a) in probs.iter().zip(&self.alphas) {
                        moment[0] += p * a[0] / kf;
                        moment[1] += p * a[1] / kf;
                    }
                    samples.push(FsSample {
                        node,
                        angle,
                        log_q: norm2.ln() + 2.0 * m,
                        det_w,
                        dvol: self.quad.weights[node] * self.quad.angle_weights[angle] * det_w * geo.det_hess,
                        w,
                        probs,
                        u: u.iter().cloned().collect(),
                        moment,
                    });
                }
            }
        }
        Ok(FsData { k: self.k, dim, n_sections: n, volume: self.volume, diagonal, samples })
    }
}

impl FsData {
    pub fn k_pow(&self) -> f64 {
        (self.k as f64).powi(self.dim as i32)
    }

    /// `Vkⁿ/N`, the value of every eigenvalue of `μ̄` at a balanced form.
    pub fn balanced_level(&self) -> f64 {
        self.volume * self.k_pow() / self.n_sections as f64
    }

    /// Centre of mass `μ̄ = kⁿ ∫ uu* ω_Hⁿ/n!` in the `H`-orthonormal frame.
    pub fn centre_of_mass(&self) -> CMat {
        let n = self.n_sections;
        if self.diagonal {
            return linalg::from_real_diagonal(&self.centre_of_mass_diagonal());
        }
        let mut mu = CMat::zeros(n, n);
        for s in &self.samples {
            let c = s.dvol;
            for i in 0..n {
                let ui = s.u[i] * c;
                for j in 0..n {
                    mu[(i, j)] += ui * s.u[j].conj();
                }
            }
        }
        linalg::symmetrize(&mu.map(|z| z * self.k_pow()))
    }

    pub fn centre_of_mass_diagonal(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n_sections];
        for s in &self.samples {
            for (acc, p) in d.iter_mut().zip(&s.probs) {
                *acc += s.dvol * p;
            }
        }
        let kn = self.k_pow();
        d.iter().map(|v| v * kn).collect()
    }

    /// `Hilb(FS(H)) = (N/(Vkⁿ)) H^{1/2} μ̄ H^{1/2}`.
    pub fn hilb(&self, h: &HermitianForm, mu_bar: &CMat) -> Result<HermitianForm> {
        let c = 1.0 / self.balanced_level();
        HermitianForm::new((h.sqrt() * mu_bar * h.sqrt()).map(|z| z * c))
    }

    /// `ρ̄` of the metric `FS(H)` at each sample, `(Vkⁿ/N) u* μ̄⁻¹ u`.
    pub fn bergman(&self, mu_bar: &CMat) -> Result<Vec<f64>> {
        let lvl = self.balanced_level();
        if self.diagonal {
            let d = linalg::real_diagonal(mu_bar);
            return Ok(self.samples.iter().map(|s| lvl * s.probs.iter().zip(&d).map(|(p, m)| p / m).sum::<f64>()).collect());
        }
        let inv = linalg::hermitian_fn(mu_bar, |v| 1.0 / v);
        Ok(self
            .samples
            .iter()
            .map(|s| {
                let u = DVector::from_column_slice(&s.u);
                lvl * u.dotc(&(&inv * &u)).re
            })
            .collect())
    }

    /// `∇_ξ ρ̄` of `FS(H)` for diagonal `H`: `2ρ̄ (E_{w/μ̄}[α] − E_w[α])`.
    pub fn bergman_gradient_xi(&self, level: &LevelData, mu_diag: &[f64]) -> Result<Vec<[f64; 2]>> {
        if !self.diagonal {
            return Err(Error::Unsupported("Bergman gradient needs a diagonal form".into()));
        }
        let kf = self.k as f64;
        let lvl = self.balanced_level();
        Ok(self
            .samples
            .iter()
            .map(|s| {
                let mut tot = 0.0;
                let mut ed = [0.0; 2];
                for (i, (p, m)) in s.probs.iter().zip(mu_diag).enumerate() {
                    let d = p / m;
                    let a = level.alpha(i);
                    tot += d;
                    ed[0] += d * a[0];
                    ed[1] += d * a[1];
                }
                let rb = lvl * tot;
                [2.0 * rb * (ed[0] / tot - kf * s.moment[0]), 2.0 * rb * (ed[1] / tot - kf * s.moment[1])]
            })
            .collect())
    }

    /// Monge–Ampère energy `E(ψ) = ∫₀¹ ∫ ψ ω_{sψ}ⁿ/n! ds` of `ψ = log_q / 2k`
    /// relative to the reference metric.
    pub fn monge_ampere_energy(&self, level: &LevelData) -> f64 {
        let kf = self.k as f64;
        let mut e = 0.0;
        for s in &self.samples {
            let g = &level.geometry[s.node];
            let mut w0 = [[Complex::new(0.0, 0.0); 2]; 2];
            let mut mid = [[Complex::new(0.0, 0.0); 2]; 2];
            for i in 0..self.dim {
                for j in 0..self.dim {
                    w0[i][j] = Complex::new(g.hess_inv[i][j], 0.0);
                    mid[i][j] = (w0[i][j] + s.w[i][j]) * 0.5;
                }
            }
            // det is polynomial of degree n ≤ 2 in s, so Simpson is exact.
            let avg = if self.dim == 1 { 0.5 * (w0[0][0].re + s.w[0][0].re) } else { (det(&w0, 2) + 4.0 * det(&mid, 2) + s.det_w) / 6.0 };
            let qw = level.quad.weights[s.node] * level.quad.angle_weights[s.angle];
            e += qw * g.det_hess * s.log_q / (2.0 * kf) * avg;
        }
        e
    }

    /// `∫ ω_Hⁿ/n!`, which equals `V`.
    pub fn total_volume(&self) -> f64 {
        self.samples.iter().map(|s| s.dvol).sum()
    }
}

fn det(w: &[[Complex; 2]; 2], dim: usize) -> f64 {
    if dim == 1 {
        w[0][0].re
    } else {
        (w[0][0] * w[1][1] - w[0][1] * w[1][0]).re
    }
}

fn check_density(w: &[[Complex; 2]; 2], det_w: f64, dim: usize, x: &[f64; 2]) -> Result<()> {
    if w[0][0].re > 0.0 && det_w > 0.0 && det_w.is_finite() {
        Ok(())
    } else {
        Err(Error::FsNotPositive { node: x[..dim].to_vec(), det: det_w })
    }
}
