use num_traits::Zero;

use super::LatticeBasis;
use crate::exact::{to_f64, Q};
use crate::linalg::{from_real_diagonal, CMat};

/// Rational one-parameter subgroup of the torus, lifted to `H⁰(kL)` with
/// weights `⟨λ, α⟩ + c·k` on the monomial basis.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusGenerator {
    pub lambda: Vec<Q>,
    pub shift: Q,
}

impl TorusGenerator {
    pub fn new(lambda: Vec<Q>, shift: Q) -> Self {
        Self { lambda, shift }
    }

    pub fn from_integers(lambda: &[i64]) -> Self {
        Self::new(lambda.iter().map(|&l| Q::from_integer(l.into())).collect(), Q::zero())
    }

    pub fn zero(dim: usize) -> Self {
        Self::new(vec![Q::zero(); dim], Q::zero())
    }

    pub fn with_shift(mut self, shift: Q) -> Self {
        self.shift = shift;
        self
    }

    pub fn dim(&self) -> usize {
        self.lambda.len()
    }

    pub fn is_zero(&self) -> bool {
        self.lambda.iter().all(|l| l.is_zero())
    }

    pub fn lambda_f64(&self) -> [f64; 2] {
        let mut l = [0.0; 2];
        for (i, v) in self.lambda.iter().enumerate() {
            l[i] = to_f64(v);
        }
        l
    }

    pub fn shift_f64(&self) -> f64 {
        to_f64(&self.shift)
    }

    pub fn scaled(&self, s: &Q) -> Self {
        Self::new(self.lambda.iter().map(|l| l * s).collect(), &self.shift * s)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(self.lambda.iter().zip(&other.lambda).map(|(a, b)| a + b).collect(), &self.shift + &other.shift)
    }

    pub fn weight_exact(&self, alpha: &[i64; 2], k: u32) -> Q {
        let mut w = &self.shift * Q::from_integer((k as i64).into());
        for (i, l) in self.lambda.iter().enumerate() {
            w += l * Q::from_integer(alpha[i].into());
        }
        w
    }

    pub fn weights_exact(&self, basis: &LatticeBasis) -> Vec<Q> {
        basis.points.iter().map(|a| self.weight_exact(a, basis.k)).collect()
    }

    /// Exact weights with their mean removed: the trace-free lift `A_k`.
    pub fn centred_exact(&self, basis: &LatticeBasis) -> Vec<Q> {
        let w = self.weights_exact(basis);
        let mean = w.iter().fold(Q::zero(), |acc, v| acc + v) / Q::from_integer((w.len() as i64).into());
        w.into_iter().map(|v| v - &mean).collect()
    }

    pub fn weights(&self, basis: &LatticeBasis) -> Vec<f64> {
        let l = self.lambda_f64();
        let c = self.shift_f64() * basis.k as f64;
        basis.points.iter().map(|a| l[0] * a[0] as f64 + l[1] * a[1] as f64 + c).collect()
    }

    pub fn centred_weights(&self, basis: &LatticeBasis) -> Vec<f64> {
        let w = self.weights(basis);
        let mean = w.iter().sum::<f64>() / w.len() as f64;
        w.into_iter().map(|v| v - mean).collect()
    }

    pub fn matrix(&self, basis: &LatticeBasis) -> CMat {
        from_real_diagonal(&self.weights(basis))
    }

    /// `⟨λ, x⟩ + c` on the polytope.
    pub fn affine(&self, x: &[f64; 2]) -> f64 {
        let l = self.lambda_f64();
        l[0] * x[0] + l[1] * x[1] + self.shift_f64()
    }
}
