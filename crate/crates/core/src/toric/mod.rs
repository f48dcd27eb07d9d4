//! Toric data: Delzant polytopes, symplectic potentials, torus generators and
//! quadrature on the moment polytope.

mod generator;
mod polytope;
mod potential;
mod quadrature;

pub use generator::TorusGenerator;
pub use polytope::{DelzantPolytope, Facet, LatticeBasis};
pub use potential::{Perturbation, PointGeometry, PotentialModel};
pub use quadrature::{gauss_legendre, QuadratureRule};

#[allow(unused_imports)]
pub(crate) use potential::inverse2;
