use super::HermitianForm;
use crate::toric::{LatticeBasis, PointGeometry, PotentialModel, QuadratureRule};
use crate::{Error, Result};

/// Everything about the reference model at level `k` that does not depend on `H`:
/// the lattice basis, quadrature, and `log |s_α|_{h^k}` at every node.
#[derive(Debug, Clone)]
pub struct LevelData {
    pub k: u32,
    pub basis: LatticeBasis,
    pub dim: usize,
    pub volume: f64,
    pub quad: QuadratureRule,
    pub geometry: Vec<PointGeometry>,
    /// `⟨α, ξ⟩ − kφ`, half the log of `|s_α|²_{h^k}`, indexed `[node][α]`.
    pub half_log_norms: Vec<Vec<f64>>,
    pub(crate) alphas: Vec<[f64; 2]>,
}

/// Bergman function of the reference metric `h` at level `k`.
#[derive(Debug, Clone)]
pub struct BergmanSample {
    pub k: u32,
    pub points: Vec<[f64; 2]>,
    /// `ρ_k`, integrating to `N`.
    pub rho: Vec<f64>,
    /// `ρ̄_k = (V/N) ρ_k`.
    pub rho_bar: Vec<f64>,
    /// Gradient of `ρ̄_k` in moment coordinates.
    pub grad_rho_bar: Vec<[f64; 2]>,
    /// `|s_α|²_{h^k} / Hilb(h)_{αα}`, summing to `ρ̄_k`; indexed `[node][α]`.
    pub parts: Vec<Vec<f64>>,
}

impl LevelData {
    pub fn new(model: &PotentialModel, quad: &QuadratureRule, k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::Unsupported("level k must be positive".into()));
        }
        let basis = model.polytope().lattice_points(k);
        let dim = model.dim();
        let alphas: Vec<[f64; 2]> = (0..basis.len()).map(|i| basis.point_f64(i)).collect();
        let mut geometry = Vec::with_capacity(quad.len());
        let mut half_log_norms = Vec::with_capacity(quad.len());
        for x in &quad.points {
            let g = model.geometry(x);
            let ok = if dim == 1 { g.hess[0][0] > 0.0 } else { g.hess[0][0] > 0.0 && g.det_hess > 0.0 };
            if !ok || !g.det_hess.is_finite() {
                return Err(Error::HessianNotPositive { node: x[..dim].to_vec() });
            }
            let kf = k as f64;
            half_log_norms.push(alphas.iter().map(|a| a[0] * g.xi[0] + a[1] * g.xi[1] - kf * g.phi).collect());
            geometry.push(g);
        }
        Ok(Self { k, basis, dim, volume: quad.weights.iter().sum(), quad: quad.clone(), geometry, half_log_norms, alphas })
    }

    pub fn n_sections(&self) -> usize {
        self.basis.len()
    }

    /// `kⁿ`.
    pub fn k_pow(&self) -> f64 {
        (self.k as f64).powi(self.dim as i32)
    }

    pub fn alpha(&self, i: usize) -> [f64; 2] {
        self.alphas[i]
    }

    /// `Hilb(h) = (N/V) ∫ h^k(s_α, s_β) ωⁿ/n!`, diagonal by torus invariance.
    pub fn hilb(&self) -> Result<HermitianForm> {
        let n = self.n_sections();
        let mut d = vec![0.0; n];
        for (row, w) in self.half_log_norms.iter().zip(&self.quad.weights) {
            for (acc, l) in d.iter_mut().zip(row) {
                *acc += w * (2.0 * l).exp();
            }
        }
        let scale = n as f64 / self.volume;
        for v in d.iter_mut() {
            *v *= scale;
        }
        HermitianForm::from_diagonal(&d)
    }

    /// Bergman function of `h` with respect to a diagonal Gram form, normally `Hilb(h)`.
    pub fn bergman(&self, hilb: &HermitianForm) -> Result<BergmanSample> {
        if !hilb.is_diagonal() {
            return Err(Error::Unsupported("Bergman function of the reference metric needs a diagonal form".into()));
        }
        let d = hilb.diagonal();
        let nf = self.n_sections() as f64;
        let kf = self.k as f64;
        let mut out = BergmanSample {
            k: self.k,
            points: self.quad.points.clone(),
            rho: Vec::new(),
            rho_bar: Vec::new(),
            grad_rho_bar: Vec::new(),
            parts: Vec::new(),
        };
        for (g, row) in self.geometry.iter().zip(&self.half_log_norms) {
            let parts: Vec<f64> = row.iter().zip(&d).map(|(l, h)| (2.0 * l).exp() / h).collect();
            let rb: f64 = parts.iter().sum();
            // ∂_x |s_α|² = 2 |s_α|² Hess u (α − kx)
            let mut grad = [0.0; 2];
            for (p, a) in parts.iter().zip(&self.alphas) {
                let v = [a[0] - kf * g.x[0], a[1] - kf * g.x[1]];
                for i in 0..self.dim {
                    for j in 0..self.dim {
                        grad[i] += 2.0 * p * g.hess[i][j] * v[j];
                    }
                }
            }
            out.rho.push(rb * nf / self.volume);
            out.rho_bar.push(rb);
            out.grad_rho_bar.push(grad);
            out.parts.push(parts);
        }
        Ok(out)
    }

    /// `sup |h^k_{FS(Hilb h)} ρ̄_k / h^k − 1|` with the two factors computed
    /// through independent code paths.
    pub fn rawnsley_check(&self) -> Result<f64> {
        let hilb = self.hilb()?;
        let berg = self.bergman(&hilb)?;
        let fs = self.fs(&hilb)?;
        Ok(fs.samples.iter().map(|s| ((-s.log_q).exp() * berg.rho_bar[s.node] - 1.0).abs()).fold(0.0, f64::max))
    }
}

impl BergmanSample {
    pub fn sup_deviation(&self, f: impl Fn(usize) -> f64) -> f64 {
        self.rho_bar.iter().enumerate().map(|(i, r)| (r - f(i)).abs()).fold(0.0, f64::max)
    }
}
