//! Fixtures shared by the benchmarks.

use qel_core::{DelzantPolytope, HermitianForm, LevelData, Perturbation, PotentialModel, QuadratureRule};

/// Perturbed round line at level `k`.
pub fn line_level(k: u32, order: usize) -> LevelData {
    let p = DelzantPolytope::projective_line();
    let quad = QuadratureRule::new(&p, order, 1);
    let m = PotentialModel::new(p, Perturbation::bump_1d(0.1), &quad).expect("convex potential");
    LevelData::new(&m, &quad, k).expect("level")
}

/// Canonical metric on the first Hirzebruch surface at level `k`.
pub fn f1_level(k: u32, order: usize) -> LevelData {
    let p = DelzantPolytope::hirzebruch_f1();
    let quad = QuadratureRule::new(&p, order, 1);
    LevelData::new(&PotentialModel::canonical(p), &quad, k).expect("level")
}

/// Deterministic diagonal start away from the balanced form.
pub fn skewed_start(n: usize) -> HermitianForm {
    let d: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * ((i as f64) * 0.7).sin()).collect();
    HermitianForm::from_diagonal(&d).expect("positive")
}
