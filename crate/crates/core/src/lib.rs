//! Numerical laboratory for balanced and relatively balanced metrics on
//! polarised toric manifolds.
//!
//! The crate is organised bottom-up:
//!
//! * [`toric`] encodes the manifold through its Delzant polytope: lattice
//!   bases, symplectic potentials, Hamiltonians, scalar curvature and
//!   quadrature over the moment polytope.
//! * [`quantisation`] implements the Hilbert and Fubini–Study maps, Bergman
//!   functions and the centre of mass of the Kodaira embedding.
//! * [`balancing`] minimises the modified balancing energy by geodesic
//!   descent on positive Hermitian forms and emits weak relative Chow
//!   certificates.
//! * [`stability`] computes Chow weights, Donaldson–Futaki invariants and the
//!   equivariant Riemann–Roch density, with exact rational lattice sums as
//!   the algebraic side of every cross-check.
//!
//! Conventions: `∫_X ωⁿ/n! = vol(P)`, angles are normalised to unit period,
//! and the Kähler scalar curvature of the round `ℙ¹` of area one is `4π`.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod balancing;
pub mod error;
pub mod exact;
pub mod linalg;
pub mod quantisation;
pub mod stability;
pub mod toric;

pub use error::{Error, Result};
pub use linalg::{CMat, Complex};
pub use quantisation::{BergmanSample, FsData, HermitianForm, LevelData};
pub use toric::{DelzantPolytope, LatticeBasis, Perturbation, PotentialModel, QuadratureRule, TorusGenerator};

/// Header describing the normalisations used by every numeric output.
pub const CONVENTIONS: &str = "volume: int_X omega^n/n! = vol(P); angles: unit period; \
scalar curvature: Kaehler (S = 4*pi on round P^1 of area 1); \
centre of mass: tr = k^n V; hamiltonian: psi = -(<lambda,mu> + c/k)/(2 pi) for generator weights <lambda,alpha> + c";
