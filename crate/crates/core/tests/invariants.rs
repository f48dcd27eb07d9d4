use num_traits::Signed;
use proptest::prelude::*;
use qel_core::balancing::{modified_diagonal, solve_ca};
use qel_core::exact::{q, q_frac, ExactPoly, Q};
use qel_core::linalg::{self, from_real_diagonal, Complex};
use qel_core::stability::{equivariant_density, extremal_normalisation, fit_expansions, inner_product, relative_df};
use qel_core::{CMat, DelzantPolytope, HermitianForm, LevelData, Perturbation, PotentialModel, QuadratureRule, TorusGenerator};

fn polytope(which: u8) -> DelzantPolytope {
    match which % 3 {
        0 => DelzantPolytope::projective_line(),
        1 => DelzantPolytope::product_of_lines(),
        _ => DelzantPolytope::hirzebruch_f1(),
    }
}

fn generator(p: &DelzantPolytope, a: i64, b: i64, shift: i64) -> TorusGenerator {
    let lambda = if p.dim() == 1 { vec![a] } else { vec![a, b] };
    TorusGenerator::from_integers(&lambda).with_shift(q_frac(shift, 2))
}

fn ks(n: u32) -> Vec<u32> {
    (1..=n).collect()
}

fn hermitian(entries: &[f64], n: usize) -> CMat {
    let mut m = CMat::zeros(n, n);
    let mut it = entries.iter();
    for i in 0..n {
        m[(i, i)] = Complex::new(*it.next().unwrap(), 0.0);
        for j in (i + 1)..n {
            let z = Complex::new(*it.next().unwrap(), *it.next().unwrap());
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn lattice_sums_are_polynomial(which in 0u8..3, a in -3i64..=3, b in -3i64..=3, shift in -4i64..=4) {
        let p = polytope(which);
        let g = generator(&p, a, b, shift);
        let n = p.dim();
        // Fitted on the first levels, exact on the rest.
        let fit = fit_expansions(&p, &g, &ks(n as u32 + 5)).unwrap();
        let samples: Vec<(i64, Q)> = (1..=n as i64 + 4).map(|k| (k, q(p.lattice_points(k as u32).len() as i64))).collect();
        let ehrhart = ExactPoly::fit(&samples, n).unwrap();
        prop_assert_eq!(ehrhart.coeff(n), p.volume());
        prop_assert_eq!(fit.a(0), p.volume());
    }

    #[test]
    fn inner_product_bilinear_symmetric(a1 in -2i64..=2, b1 in -2i64..=2, a2 in -2i64..=2, b2 in -2i64..=2, s in -3i64..=3) {
        let p = DelzantPolytope::hirzebruch_f1();
        let k = ks(7);
        let (g1, g2) = (generator(&p, a1, b1, 0), generator(&p, a2, b2, 1));
        let g3 = TorusGenerator::from_integers(&[1, -1]);
        let ip = |x: &TorusGenerator, y: &TorusGenerator| inner_product(&p, x, y, &k).unwrap();
        prop_assert_eq!(ip(&g1, &g2), ip(&g2, &g1));
        let comb = g1.scaled(&q(s)).add(&g2);
        prop_assert_eq!(ip(&comb, &g3), q(s) * ip(&g1, &g3) + ip(&g2, &g3));
        let cs = ip(&g1, &g2) * ip(&g1, &g2) - ip(&g1, &g1) * ip(&g2, &g2);
        prop_assert!(!cs.is_positive());
    }

    #[test]
    fn relative_df_is_homogeneous(a in -3i64..=3, b in -3i64..=3, s in 2i64..=3) {
        let p = DelzantPolytope::hirzebruch_f1();
        let k = ks(7);
        let chi = extremal_normalisation(&p, &k).unwrap().chi;
        let g = TorusGenerator::from_integers(&[a, b]);
        let d = relative_df(&p, &g, std::slice::from_ref(&chi), &k).unwrap();
        let ds = relative_df(&p, &g.scaled(&q(s)), &[chi], &k).unwrap();
        prop_assert_eq!(ds, q(s) * d);
    }

    #[test]
    fn hermitian_form_roundtrips(entries in prop::collection::vec(-1.0f64..1.0, 16), t in -1.5f64..1.5) {
        let b = hermitian(&entries, 4);
        let h = HermitianForm::new(linalg::hermitian_fn(&b, f64::exp)).unwrap();
        prop_assert!((h.log() - &b).norm() < 1e-10);
        let n = h.det_normalised().unwrap();
        prop_assert!(n.log_det().abs() < 1e-10);
        // Geodesics through H with a scalar direction rescale H.
        let scalar = from_real_diagonal(&[t; 4]);
        let end = h.geodesic(&scalar, 1.0).unwrap();
        prop_assert!(end.relative_distance(&h.scaled(t.exp()).unwrap()) < 1e-10);
    }

    #[test]
    fn trace_constant_solves_trace_condition(a in prop::collection::vec(-4.0f64..4.0, 2..7), k in 1u32..6) {
        let mean = a.iter().sum::<f64>() / a.len() as f64;
        let centred: Vec<f64> = a.iter().map(|v| v - mean).collect();
        let c = solve_ca(&centred, k).unwrap();
        let tr: f64 = modified_diagonal(&centred, c, k).unwrap().iter().map(|m| 1.0 / m).sum();
        prop_assert!((tr - centred.len() as f64).abs() < 1e-10);
        prop_assert!(c >= -1e-14);
    }

    #[test]
    fn centre_of_mass_trace(which in 0u8..2, k in 1u32..5, seed in prop::collection::vec(0.3f64..3.0, 16)) {
        let p = if which == 0 { DelzantPolytope::projective_line() } else { DelzantPolytope::hirzebruch_f1() };
        let quad = QuadratureRule::new(&p, 48, 1);
        let level = LevelData::new(&PotentialModel::canonical(p.clone()), &quad, k).unwrap();
        let n = level.n_sections();
        let d: Vec<f64> = (0..n).map(|i| seed[i % seed.len()] * (1.0 + 0.1 * (i / seed.len()) as f64)).collect();
        let fs = level.fs(&HermitianForm::from_diagonal(&d).unwrap()).unwrap();
        let mu = fs.centre_of_mass();
        let target = level.k_pow() * p.volume_f64();
        prop_assert!((linalg::trace_re(&mu) - target).abs() < 1e-10 * target, "{} vs {target}", linalg::trace_re(&mu));
    }

    #[test]
    fn hamiltonian_shift_moves_both_sides_equally(k in 1u32..6, shift in -3i64..=3, eps in 0.0f64..0.15) {
        let p = DelzantPolytope::projective_line();
        let quad = QuadratureRule::new(&p, 64, 1);
        let m = PotentialModel::new(p, Perturbation::bump_1d(eps), &quad).unwrap();
        let level = LevelData::new(&m, &quad, k).unwrap();
        let g = TorusGenerator::from_integers(&[1]);
        let d0 = equivariant_density(&level, &m, &g).unwrap();
        let d1 = equivariant_density(&level, &m, &g.clone().with_shift(q(shift))).unwrap();
        prop_assert!(((d1.lhs - d0.lhs) - (d1.rhs - d0.rhs)).abs() < 1e-9);
    }
}
