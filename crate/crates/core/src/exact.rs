//! Exact rational polynomial fitting for lattice-sum sequences.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Polynomial with rational coefficients, `coeffs[i]` multiplying `k^i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactPoly {
    pub coeffs: Vec<Q>,
}

impl ExactPoly {
    pub fn eval(&self, k: &Q) -> Q {
        let mut acc = Q::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * k + c;
        }
        acc
    }

    pub fn degree_bound(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Coefficient of `k^i`, zero past the end.
    pub fn coeff(&self, i: usize) -> Q {
        self.coeffs.get(i).cloned().unwrap_or_else(Q::zero)
    }

    /// Interpolates the first `degree + 1` samples and requires the remaining
    /// samples to lie on the same polynomial exactly.
    pub fn fit(samples: &[(i64, Q)], degree: usize) -> Result<Self> {
        if samples.len() < degree + 2 {
            return Err(Error::NotPolynomial(format!(
                "need at least {} samples for an exact degree-{degree} fit, got {}",
                degree + 2,
                samples.len()
            )));
        }
        let m = degree + 1;
        let xs: Vec<Q> = samples[..m].iter().map(|(k, _)| q(*k)).collect();
        // Newton divided differences.
        let mut dd: Vec<Q> = samples[..m].iter().map(|(_, y)| y.clone()).collect();
        for level in 1..m {
            for i in (level..m).rev() {
                dd[i] = (&dd[i] - &dd[i - 1]) / (&xs[i] - &xs[i - level]);
            }
        }
        // Expand the Newton form into monomial coefficients.
        let mut coeffs = vec![Q::zero(); m];
        for i in (0..m).rev() {
            // coeffs <- coeffs * (k - xs[i]) + dd[i]
            let mut next = vec![Q::zero(); m];
            for j in 0..m {
                if coeffs[j].is_zero() {
                    continue;
                }
                if j + 1 < m {
                    next[j + 1] += &coeffs[j];
                }
                next[j] -= &coeffs[j] * &xs[i];
            }
            next[0] += &dd[i];
            coeffs = next;
        }
        let poly = ExactPoly { coeffs };
        for (k, y) in &samples[m..] {
            let r = poly.eval(&q(*k)) - y;
            if !r.is_zero() {
                return Err(Error::NotPolynomial(format!("at k = {k}: {r}")));
            }
        }
        Ok(poly)
    }
}
