use num_traits::{Signed, Zero};

use crate::exact::{q, to_f64, ExactPoly, Q};
use crate::toric::{DelzantPolytope, TorusGenerator};
use crate::{Error, Result};

/// Exact expansions `N(k) = a₀kⁿ + a₁kⁿ⁻¹ + …` and
/// `tr A_k = b₀kⁿ⁺¹ + b₁kⁿ + …` for the un-centred lift of a generator.
#[derive(Debug, Clone)]
pub struct ExpansionFit {
    pub dim: usize,
    pub dimension: ExactPoly,
    pub trace: ExactPoly,
    pub k_range: Vec<u32>,
    pub generator: TorusGenerator,
}

impl ExpansionFit {
    pub fn a(&self, i: usize) -> Q {
        self.dimension.coeff(self.dim - i)
    }

    pub fn b(&self, i: usize) -> Q {
        self.trace.coeff(self.dim + 1 - i)
    }
}

/// Trace-free diagonal `A_k`: the centred weights `⟨λ, α⟩ − mean`.
pub fn generator_at_level(p: &DelzantPolytope, g: &TorusGenerator, k: u32) -> Vec<Q> {
    g.centred_exact(&p.lattice_points(k))
}

fn sum(v: &[Q]) -> Q {
    v.iter().fold(Q::zero(), |a, b| a + b)
}

pub fn fit_expansions(p: &DelzantPolytope, g: &TorusGenerator, k_list: &[u32]) -> Result<ExpansionFit> {
    let n = p.dim();
    if k_list.len() < n + 3 {
        return Err(Error::NotPolynomial(format!("need at least {} levels, got {}", n + 3, k_list.len())));
    }
    let mut dims = Vec::new();
    let mut traces = Vec::new();
    for &k in k_list {
        let basis = p.lattice_points(k);
        dims.push((k as i64, q(basis.len() as i64)));
        traces.push((k as i64, sum(&g.weights_exact(&basis))));
    }
    Ok(ExpansionFit {
        dim: n,
        dimension: ExactPoly::fit(&dims, n)?,
        trace: ExactPoly::fit(&traces, n + 1)?,
        k_range: k_list.to_vec(),
        generator: g.clone(),
    })
}

/// `Chow_r = r b₀ − a₀ tr(A_r)/N_r` with the un-centred lift at level `r`.
pub fn chow_weight(fit: &ExpansionFit, p: &DelzantPolytope, r: u32) -> Q {
    let basis = p.lattice_points(r);
    let tr = sum(&fit.generator.weights_exact(&basis));
    q(r as i64) * fit.b(0) - fit.a(0) * tr / q(basis.len() as i64)
}

/// `DF = (a₁b₀ − a₀b₁)/a₀`.
pub fn df_invariant(fit: &ExpansionFit) -> Q {
    (fit.a(1) * fit.b(0) - fit.a(0) * fit.b(1)) / fit.a(0)
}

/// Leading `k^{n+2}` coefficient of `tr(A_k B_k)` for the centred lifts.
///
/// The centred trace `Σ w w' − (Σ w)(Σ w')/N` is not itself a polynomial in `k`;
/// its leading term is `lead(Σ w w') − b₀ b₀'/a₀`, both exact.
pub fn inner_product(p: &DelzantPolytope, g1: &TorusGenerator, g2: &TorusGenerator, k_list: &[u32]) -> Result<Q> {
    let n = p.dim();
    if k_list.len() < n + 4 {
        return Err(Error::NotPolynomial(format!("need at least {} levels, got {}", n + 4, k_list.len())));
    }
    let mut cross = Vec::new();
    for &k in k_list {
        let basis = p.lattice_points(k);
        let w1 = g1.weights_exact(&basis);
        let w2 = g2.weights_exact(&basis);
        let s: Q = w1.iter().zip(&w2).fold(Q::zero(), |a, (x, y)| a + x * y);
        cross.push((k as i64, s));
    }
    let lead = ExactPoly::fit(&cross, n + 2)?.coeff(n + 2);
    let f1 = fit_expansions(p, g1, k_list)?;
    let f2 = fit_expansions(p, g2, k_list)?;
    Ok(lead - f1.b(0) * f2.b(0) / f1.a(0))
}

/// Pairwise inner products of registered generators.
#[derive(Debug, Clone)]
pub struct InnerProductTable {
    pub names: Vec<String>,
    pub values: Vec<Vec<Q>>,
    pub k_range: Vec<u32>,
}

impl InnerProductTable {
    pub fn build(p: &DelzantPolytope, gens: &[(String, TorusGenerator)], k_list: &[u32]) -> Result<Self> {
        let mut values = vec![vec![Q::zero(); gens.len()]; gens.len()];
        for i in 0..gens.len() {
            for j in i..gens.len() {
                let v = inner_product(p, &gens[i].1, &gens[j].1, k_list)?;
                values[i][j] = v.clone();
                values[j][i] = v;
            }
        }
        Ok(Self { names: gens.iter().map(|g| g.0.clone()).collect(), values, k_range: k_list.to_vec() })
    }

    /// Largest `⟨α,β⟩² − ⟨α,α⟩⟨β,β⟩` over pairs; non-positive when Cauchy–Schwarz holds.
    pub fn cauchy_schwarz_excess(&self) -> Q {
        let mut worst: Option<Q> = None;
        for i in 0..self.values.len() {
            for j in 0..self.values.len() {
                let e = &self.values[i][j] * &self.values[i][j] - &self.values[i][i] * &self.values[j][j];
                if worst.as_ref().is_none_or(|w| e > *w) {
                    worst = Some(e);
                }
            }
        }
        worst.unwrap_or_else(Q::zero)
    }
}

/// `DF(α) − Σ_{ij} ⟨α, βᵢ⟩ G⁻¹_{ij} DF(βⱼ)` with `G` the Gram matrix of the `βᵢ`;
/// the orthogonal projection of `DF` off the span of the `βᵢ`.
pub fn relative_df(p: &DelzantPolytope, alpha: &TorusGenerator, betas: &[TorusGenerator], k_list: &[u32]) -> Result<Q> {
    let df_a = df_invariant(&fit_expansions(p, alpha, k_list)?);
    let m = betas.len();
    if m == 0 {
        return Ok(df_a);
    }
    let mut gram = vec![vec![Q::zero(); m]; m];
    let mut rhs = Vec::with_capacity(m);
    let mut cross = Vec::with_capacity(m);
    for i in 0..m {
        for j in 0..m {
            gram[i][j] = inner_product(p, &betas[i], &betas[j], k_list)?;
        }
        if gram[i][i].is_zero() {
            return Err(Error::Degenerate(format!("generator {i} has zero norm")));
        }
        rhs.push(df_invariant(&fit_expansions(p, &betas[i], k_list)?));
        cross.push(inner_product(p, alpha, &betas[i], k_list)?);
    }
    let coef = solve_exact(gram, rhs)?;
    Ok(df_a - cross.iter().zip(&coef).fold(Q::zero(), |a, (x, y)| a + x * y))
}

/// Gaussian elimination over the rationals.
pub(crate) fn solve_exact(mut a: Vec<Vec<Q>>, mut b: Vec<Q>) -> Result<Vec<Q>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero()).ok_or(Error::Degenerate("singular Gram matrix".into()))?;
        a.swap(col, piv);
        b.swap(col, piv);
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = &a[r][col] / &a[col][col];
                for c in col..n {
                    let v = &f * &a[col][c];
                    a[r][c] -= v;
                }
                let v = &f * &b[col];
                b[r] -= v;
            }
        }
    }
    Ok((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

/// `|x|` as a float, for tolerance checks on exact values.
pub fn abs_f64(x: &Q) -> f64 {
    to_f64(&x.abs())
}
