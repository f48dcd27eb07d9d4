//! Small dense Hermitian-matrix toolkit on top of `nalgebra`.

use nalgebra::DMatrix;
pub use num_complex::Complex64 as Complex;
use rand::Rng;

use crate::{Error, Result};

pub type CMat = DMatrix<Complex>;

pub fn from_real_diagonal(d: &[f64]) -> CMat {
    let n = d.len();
    let mut m = CMat::zeros(n, n);
    for (i, &v) in d.iter().enumerate() {
        m[(i, i)] = Complex::new(v, 0.0);
    }
    m
}

pub fn real_diagonal(m: &CMat) -> Vec<f64> {
    (0..m.nrows()).map(|i| m[(i, i)].re).collect()
}

/// True if every off-diagonal entry is exactly zero.
pub fn is_diagonal(m: &CMat) -> bool {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            if i != j && m[(i, j)] != Complex::new(0.0, 0.0) {
                return false;
            }
        }
    }
    true
}

/// `max |m - m*|` over entries.
pub fn hermitian_defect(m: &CMat) -> f64 {
    let mut d: f64 = 0.0;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            d = d.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    d
}

pub fn symmetrize(m: &CMat) -> CMat {
    (m + m.adjoint()).map(|z| z * 0.5)
}

pub fn trace_re(m: &CMat) -> f64 {
    (0..m.nrows()).map(|i| m[(i, i)].re).sum()
}

/// `Re tr(a b)`, summed in fixed index order.
pub fn trace_product(a: &CMat, b: &CMat) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += (a[(i, j)] * b[(j, i)]).re;
        }
    }
    s
}

/// Eigen-decomposition `(values ascending, vectors)` of a Hermitian matrix.
pub fn eigh(m: &CMat) -> (Vec<f64>, CMat) {
    if is_diagonal(m) {
        let d = real_diagonal(m);
        let mut idx: Vec<usize> = (0..d.len()).collect();
        idx.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
        let vecs = CMat::from_fn(d.len(), d.len(), |r, c| if r == idx[c] { Complex::new(1.0, 0.0) } else { Complex::new(0.0, 0.0) });
        return (idx.iter().map(|&i| d[i]).collect(), vecs);
    }
    let e = symmetrize(m).symmetric_eigen();
    let mut idx: Vec<usize> = (0..e.eigenvalues.len()).collect();
    idx.sort_by(|&a, &b| e.eigenvalues[a].total_cmp(&e.eigenvalues[b]));
    let vals = idx.iter().map(|&i| e.eigenvalues[i]).collect();
    let vecs = CMat::from_fn(m.nrows(), idx.len(), |r, c| e.eigenvectors[(r, idx[c])]);
    (vals, vecs)
}

pub fn eigenvalues(m: &CMat) -> Vec<f64> {
    eigh(m).0
}

/// Applies a real function through the spectral calculus. Diagonal input
/// stays exactly diagonal.
pub fn hermitian_fn(m: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    if is_diagonal(m) {
        let d: Vec<f64> = real_diagonal(m).into_iter().map(f).collect();
        return from_real_diagonal(&d);
    }
    let (vals, vecs) = eigh(m);
    let fd = from_real_diagonal(&vals.into_iter().map(f).collect::<Vec<_>>());
    &vecs * fd * vecs.adjoint()
}

pub fn check_positive(m: &CMat) -> Result<()> {
    let defect = hermitian_defect(m);
    let scale = m.norm().max(1.0);
    if defect > 1e-12 * scale {
        return Err(Error::NotHermitian(defect));
    }
    let min = eigenvalues(m).first().copied().unwrap_or(0.0);
    if !(min > 0.0) {
        return Err(Error::NotPositiveDefinite(min));
    }
    Ok(())
}

/// Random Hermitian matrix with standard normal entries, Frobenius-normalised.
pub fn random_hermitian<R: Rng>(n: usize, rng: &mut R) -> CMat {
    let mut m = CMat::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = Complex::new(normal(rng), 0.0);
        for j in (i + 1)..n {
            let z = Complex::new(normal(rng), normal(rng)) * std::f64::consts::FRAC_1_SQRT_2;
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    let f = m.norm();
    m.map(|z| z / f)
}

fn normal<R: Rng>(rng: &mut R) -> f64 {
    // Box-Muller; rand 0.8 keeps normal sampling in rand_distr.
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn spectral_calculus_roundtrip() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let b = random_hermitian(5, &mut rng);
        let e = hermitian_fn(&b, f64::exp);
        let l = hermitian_fn(&e, f64::ln);
        assert!((l - &b).norm() < 1e-12);
        assert!(hermitian_defect(&b) == 0.0);
        check_positive(&e).unwrap();
    }

    #[test]
    fn diagonal_stays_diagonal() {
        let d = from_real_diagonal(&[1.0, 4.0, 9.0]);
        let s = hermitian_fn(&d, f64::sqrt);
        assert!(is_diagonal(&s));
        assert_eq!(real_diagonal(&s), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn rejects_indefinite() {
        let d = from_real_diagonal(&[1.0, -1.0]);
        assert!(matches!(check_positive(&d), Err(Error::NotPositiveDefinite(_))));
    }
}
