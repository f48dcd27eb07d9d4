use crate::linalg::{self, CMat, Complex};
use crate::{Error, Result};

/// Positive-definite Hermitian inner product on `H⁰(X, L^k)` in the lattice basis,
/// with its symmetric square root and inverse square root cached.
#[derive(Debug, Clone)]
pub struct HermitianForm {
    h: CMat,
    sqrt: CMat,
    inv_sqrt: CMat,
    diagonal: bool,
    eigenvalues: Vec<f64>,
}

impl HermitianForm {
    pub fn new(h: CMat) -> Result<Self> {
        let scale = h.norm().max(f64::MIN_POSITIVE);
        let defect = linalg::hermitian_defect(&h);
        if defect > 1e-12 * scale.max(1.0) {
            return Err(Error::NotHermitian(defect));
        }
        let h = linalg::symmetrize(&h);
        let diagonal = linalg::is_diagonal(&h);
        let (vals, vecs) = linalg::eigh(&h);
        if !(vals[0] > 0.0) {
            return Err(Error::NotPositiveDefinite(vals[0]));
        }
        let (sqrt, inv_sqrt) = if diagonal {
            let d = linalg::real_diagonal(&h);
            (
                linalg::from_real_diagonal(&d.iter().map(|v| v.sqrt()).collect::<Vec<_>>()),
                linalg::from_real_diagonal(&d.iter().map(|v| 1.0 / v.sqrt()).collect::<Vec<_>>()),
            )
        } else {
            let f = |g: fn(f64) -> f64| {
                let d = linalg::from_real_diagonal(&vals.iter().map(|&v| g(v)).collect::<Vec<_>>());
                linalg::symmetrize(&(&vecs * d * vecs.adjoint()))
            };
            (f(f64::sqrt), f(|v| 1.0 / v.sqrt()))
        };
        Ok(Self { h, sqrt, inv_sqrt, diagonal, eigenvalues: vals })
    }

    pub fn from_diagonal(d: &[f64]) -> Result<Self> {
        Self::new(linalg::from_real_diagonal(d))
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![1.0; n]).expect("identity is positive")
    }

    pub fn dim(&self) -> usize {
        self.h.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.h
    }

    pub fn sqrt(&self) -> &CMat {
        &self.sqrt
    }

    pub fn inv_sqrt(&self) -> &CMat {
        &self.inv_sqrt
    }

    pub fn is_diagonal(&self) -> bool {
        self.diagonal
    }

    pub fn diagonal(&self) -> Vec<f64> {
        linalg::real_diagonal(&self.h)
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn log_det(&self) -> f64 {
        self.eigenvalues.iter().map(|v| v.ln()).sum()
    }

    pub fn log(&self) -> CMat {
        linalg::hermitian_fn(&self.h, f64::ln)
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.h.map(|z| z * c))
    }

    /// Rescaled copy with `det H = 1`.
    pub fn det_normalised(&self) -> Result<Self> {
        self.scaled((-self.log_det() / self.dim() as f64).exp())
    }

    /// Point `H^{1/2} e^{tB} H^{1/2}` of the geodesic through `H` with direction `B`,
    /// where `B` is expressed in an `H`-orthonormal frame.
    pub fn geodesic(&self, b: &CMat, t: f64) -> Result<Self> {
        let e = linalg::hermitian_fn(&b.map(|z| z * t), f64::exp);
        Self::new(&self.sqrt * e * &self.sqrt)
    }

    /// `G* H G`.
    pub fn congruence(&self, g: &CMat) -> Result<Self> {
        Self::new(g.adjoint() * &self.h * g)
    }

    pub fn relative_distance(&self, other: &HermitianForm) -> f64 {
        (&self.h - &other.h).norm() / self.h.norm()
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex {
        self.h[(i, j)]
    }
}
