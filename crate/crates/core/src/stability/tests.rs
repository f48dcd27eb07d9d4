use std::f64::consts::PI;

use num_traits::Zero;

use super::*;
use crate::exact::{q, q_frac, to_f64, Q};
use crate::quantisation::LevelData;
use crate::toric::{DelzantPolytope, Perturbation, PotentialModel, QuadratureRule, TorusGenerator};

fn ks(n: u32) -> Vec<u32> {
    (1..=n).collect()
}

fn tr_sq(v: &[Q]) -> Q {
    v.iter().fold(Q::zero(), |a, b| a + b * b)
}

#[test]
fn line_generators() {
    let p = DelzantPolytope::projective_line();
    let g = TorusGenerator::from_integers(&[1]);
    assert_eq!(generator_at_level(&p, &g, 3), vec![q_frac(-3, 2), q_frac(-1, 2), q_frac(1, 2), q_frac(3, 2)]);
    for k in 1..=8i64 {
        let a = generator_at_level(&p, &g, k as u32);
        assert!(a.iter().fold(Q::zero(), |x, y| x + y).is_zero());
        assert_eq!(tr_sq(&a), q(k * (k + 1) * (k + 2)) / q(12));
    }
}

#[test]
fn expansions_of_line() {
    let p = DelzantPolytope::projective_line();
    let centred = TorusGenerator::from_integers(&[1]).with_shift(q_frac(-1, 2));
    let f = fit_expansions(&p, &centred, &ks(5)).unwrap();
    assert_eq!((f.a(0), f.a(1)), (q(1), q(1)));
    assert!(f.b(0).is_zero() && f.b(1).is_zero());
    assert!(df_invariant(&f).is_zero());
    assert!(chow_weight(&f, &p, 1).is_zero());
    let trivial = fit_expansions(&p, &TorusGenerator::zero(1), &ks(4)).unwrap();
    assert!(chow_weight(&trivial, &p, 3).is_zero());
    assert!(fit_expansions(&p, &centred, &ks(3)).is_err());
}

#[test]
fn f1_trace_coefficient_is_weighted_volume() {
    let p = DelzantPolytope::hirzebruch_f1();
    let g = TorusGenerator::from_integers(&[0, 1]);
    let f = fit_expansions(&p, &g, &ks(6)).unwrap();
    let m = polytope_moments(&p);
    assert_eq!(f.a(0), m.first[0]);
    assert_eq!(f.a(0), q_frac(3, 2));
    assert_eq!(f.b(0), m.first[2]);
    // Riemann sums (1/k³) Σ α₂ → b₀, extrapolated in 1/k.
    let pts: Vec<(f64, f64)> = (20..=24)
        .map(|k| {
            let b = p.lattice_points(k);
            let s: i64 = b.points.iter().map(|a| a[1]).sum();
            (1.0 / k as f64, s as f64 / (k as f64).powi(3))
        })
        .collect();
    assert!((richardson(&pts) - to_f64(&f.b(0))).abs() < 1e-9);
}

#[test]
fn donaldson_futaki_values() {
    let line = DelzantPolytope::projective_line();
    assert!(df_invariant(&fit_expansions(&line, &TorusGenerator::from_integers(&[1]), &ks(5)).unwrap()).is_zero());
    let sq = DelzantPolytope::product_of_lines();
    for l in [[1, 0], [0, 1]] {
        assert!(df_invariant(&fit_expansions(&sq, &TorusGenerator::from_integers(&l), &ks(6)).unwrap()).is_zero());
    }
}

#[test]
fn futaki_matches_df_on_f1() {
    let p = DelzantPolytope::hirzebruch_f1();
    let g = TorusGenerator::from_integers(&[0, 1]);
    let df = to_f64(&df_invariant(&fit_expansions(&p, &g, &ks(6)).unwrap()));
    assert!(df.abs() > 1e-3);
    let q64 = QuadratureRule::new(&p, 64, 1);
    let model = PotentialModel::canonical(p);
    let fut = futaki_integral(&model, &q64, &g);
    assert!((df / (2.0 * PI) - fut).abs() < 1e-5, "{} vs {fut}", df / (2.0 * PI));
}

#[test]
fn futaki_is_metric_independent_on_line() {
    let p = DelzantPolytope::projective_line();
    let q64 = QuadratureRule::new(&p, 64, 1);
    let g = TorusGenerator::from_integers(&[1]);
    for eps in [0.0, 0.1] {
        let m = PotentialModel::new(p.clone(), Perturbation::bump_1d(eps), &q64).unwrap();
        assert!(futaki_integral(&m, &q64, &g).abs() < 1e-8);
    }
}

#[test]
fn inner_products() {
    let line = DelzantPolytope::projective_line();
    let g = TorusGenerator::from_integers(&[1]);
    assert_eq!(inner_product(&line, &g, &g, &ks(6)).unwrap(), q_frac(1, 12));
    assert!(inner_product(&line, &g, &TorusGenerator::zero(1), &ks(6)).unwrap().is_zero());
    let sq = DelzantPolytope::product_of_lines();
    let (a, b) = (TorusGenerator::from_integers(&[1, 0]), TorusGenerator::from_integers(&[0, 1]));
    assert!(inner_product(&sq, &a, &b, &ks(7)).unwrap().is_zero());
    // Shifts move only the I-direction.
    let shifted = g.clone().with_shift(q(3));
    assert_eq!(inner_product(&line, &shifted, &g, &ks(6)).unwrap(), q_frac(1, 12));
}

#[test]
fn extremal_data() {
    let line = extremal_normalisation(&DelzantPolytope::projective_line(), &ks(6)).unwrap();
    assert!(line.is_zero);
    assert_eq!(line.s_bar, q(2));
    assert!(extremal_normalisation(&DelzantPolytope::product_of_lines(), &ks(7)).unwrap().is_zero);

    let p = DelzantPolytope::hirzebruch_f1();
    let e = extremal_normalisation(&p, &ks(7)).unwrap();
    assert!(!e.is_zero);
    assert!(e.chi.lambda[0].is_zero());
    assert_eq!(e.df_chi, e.norm_chi);
    assert!(e.norm_chi > Q::zero());
    // S̄ = 4π a₁/a₀ in Kähler units.
    let q64 = QuadratureRule::new(&p, 64, 1);
    let model = PotentialModel::canonical(p.clone());
    let (_, s_bar) = scalar_curvature(&model, &q64);
    assert!((s_bar - 4.0 * PI * 5.0 / 3.0).abs() < 1e-8);
    let quad = extremal_quadrature(&model, &q64).unwrap();
    for (a, b) in quad.s_aff.iter().zip(&e.s_aff) {
        assert!((a - 2.0 * PI * to_f64(b)).abs() < 1e-6);
    }
    assert!((quad.norm - to_f64(&e.norm_chi)).abs() < 1e-6);
}

#[test]
fn relative_df_properties() {
    let p = DelzantPolytope::hirzebruch_f1();
    let k = ks(7);
    let e = extremal_normalisation(&p, &k).unwrap();
    let chi = [e.chi.clone()];
    assert!(relative_df(&p, &e.chi, &chi, &k).unwrap().is_zero());
    for (a, b) in [(1, 0), (0, 1), (1, 1), (2, -1), (-1, 3)] {
        let g = TorusGenerator::from_integers(&[a, b]);
        let d = relative_df(&p, &g, &chi, &k).unwrap();
        assert!(d.is_zero());
        let s2 = relative_df(&p, &g.scaled(&q(2)), &chi, &k).unwrap();
        assert_eq!(s2, q(2) * d);
    }
    let zero = TorusGenerator::zero(2);
    assert!(relative_df(&p, &chi[0], &[zero], &k).is_err());
}

#[test]
fn chow_weight_tends_to_df() {
    let p = DelzantPolytope::hirzebruch_f1();
    let g = TorusGenerator::from_integers(&[0, 1]);
    let f = fit_expansions(&p, &g, &ks(6)).unwrap();
    let df = df_invariant(&f);
    let errs: Vec<f64> = (2..=12).map(|r| to_f64(&(chow_weight(&f, &p, r) - &df)).abs()).collect();
    assert!(errs.windows(2).all(|w| w[1] < w[0]));
    assert!(errs[10] * 12.0 < 1.0);
}

#[test]
fn hamiltonians() {
    let p = DelzantPolytope::projective_line();
    let q64 = QuadratureRule::new(&p, 64, 1);
    let (psi, c0) = hamiltonian(&q64, [1.0, 0.0], HamiltonianConstant::ZeroMean);
    assert!((c0 + 0.5).abs() < 1e-14);
    assert!(psi.iter().zip(&q64.points).all(|(v, x)| (v - (x[0] - 0.5)).abs() < 1e-14));
    let (psi, _) = hamiltonian(&q64, [0.0, 0.0], HamiltonianConstant::Fixed(0.3));
    assert!(psi.iter().all(|v| *v == 0.3));

    let f1 = DelzantPolytope::hirzebruch_f1();
    let m = PotentialModel::unchecked(f1, Perturbation { terms: vec![([1, 1], 0.03)] });
    for x in [[0.3, 0.4], [1.2, 0.5], [0.5, 0.9]] {
        assert!(hamiltonian_defect(&m, [0.0, 1.0], &x, 1e-5) < 1e-6);
    }
    let lift = hamiltonian_lift([1.0, 0.0], -0.5, &p.lattice_points(2));
    assert!((lift[0] - 2.0 * PI).abs() < 1e-14 && lift[1].abs() < 1e-14);
}

fn line_level(eps: f64, k: u32) -> (LevelData, PotentialModel) {
    let p = DelzantPolytope::projective_line();
    let q64 = QuadratureRule::new(&p, 64, 1);
    let m = PotentialModel::new(p, Perturbation::bump_1d(eps), &q64).unwrap();
    (LevelData::new(&m, &q64, k).unwrap(), m)
}

#[test]
fn equivariant_density_line() {
    let (lv, m) = line_level(0.0, 1);
    let d = equivariant_density(&lv, &m, &TorusGenerator::from_integers(&[1]).with_shift(q_frac(-1, 2))).unwrap();
    assert!(d.lhs_exact.is_zero() && d.rhs.abs() < 1e-10);
    for k in [2, 5] {
        let (lv, m) = line_level(0.0, k);
        let d = equivariant_density(&lv, &m, &TorusGenerator::from_integers(&[1])).unwrap();
        assert!((d.lhs - 1.0 / (4.0 * PI)).abs() < 1e-14);
        assert!((d.lhs - d.rhs).abs() < 1e-8);
    }
    let (lv, m) = line_level(0.1, 4);
    let g = TorusGenerator::from_integers(&[1]);
    let d = equivariant_density(&lv, &m, &g).unwrap();
    assert!(d.pointwise_sup < 1e-8 && (d.lhs - d.rhs).abs() < 1e-8);
    // Shifting the Hamiltonian moves both sides equally.
    let d2 = equivariant_density(&lv, &m, &g.clone().with_shift(q(2))).unwrap();
    assert!(((d2.lhs - d.lhs) - (d2.rhs - d.rhs)).abs() < 1e-9);
}

#[test]
fn bergman_expansion_decays_quadratically() {
    // The local log-log slope of the defect between doublings approaches -2
    // from above; the approach is slow on the line bump.
    let p = DelzantPolytope::projective_line();
    let q = QuadratureRule::new(&p, 160, 1);
    let m = PotentialModel::new(p, Perturbation::bump_1d(0.1), &q).unwrap();
    let defect = |k: u32| bergman_expansion_defect(&LevelData::new(&m, &q, k).unwrap(), &m).unwrap();
    let ds: Vec<f64> = [16u32, 32, 64, 128, 256].iter().map(|&k| defect(k)).collect();
    let slopes: Vec<f64> = ds.windows(2).map(|w| (w[1] / w[0]).log2()).collect();
    assert!(slopes.windows(2).all(|w| w[1] < w[0]), "{slopes:?}");
    let last = *slopes.last().unwrap();
    assert!((last + 2.0).abs() < 0.15, "{slopes:?}");
}
