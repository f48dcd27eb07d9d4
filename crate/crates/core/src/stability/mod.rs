//! Algebraic stability data of torus actions and the analytic identities they match.

mod analytic;
mod expansion;
mod extremal;
mod limit;

pub use analytic::{
    bergman_expansion_defect, equivariant_density, futaki_integral, hamiltonian, hamiltonian_defect, hamiltonian_lift, scalar_curvature,
    EquivariantDensity, HamiltonianConstant,
};
pub use expansion::{
    abs_f64, chow_weight, df_invariant, fit_expansions, generator_at_level, inner_product, relative_df, ExpansionFit, InnerProductTable,
};
pub use extremal::{extremal_normalisation, extremal_quadrature, polytope_moments, ExtremalData, ExtremalQuadrature, PolytopeMoments};
pub use limit::{limit_weight_check, richardson, LimitWeight};

#[cfg(test)]
mod tests;
