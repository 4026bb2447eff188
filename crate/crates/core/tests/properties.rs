use std::f64::consts::PI;
use std::sync::Arc;

use hnse::dynamics::step_heat;
use hnse::frequency::io::{read_binary, write_binary, State};
use hnse::frequency::norms::{l2_norm_sq, l2_norm_sq_h, sobolev_norm_sq};
use hnse::frequency::{dilate, inner_product, inner_product_h, FrequencyGrid, HorizontalField, NodeParams, NormKind, SpectralField};
use hnse::ops::{apply_ladder, apply_symbol, apply_symbol_h, commutator, divergence_h, gradient_h, LadderKind, LadderSpec, Operator, SymbolSpec};
use hnse::projection::{friedrichs, friedrichs_h, leray, relative_divergence, FriedrichsKind};
use hnse::sample;
use hnse::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn grid_strategy() -> impl Strategy<Value = Arc<FrequencyGrid>> {
    let geo = (1usize..=2, 2usize..=5, 0.05f64..1.0, 1.2f64..3.0, 2usize..=7)
        .prop_map(|(d, m, lambda0, ratio, count)| FrequencyGrid::new(d, m, NodeParams::Geometric { lambda0, ratio, count }).unwrap());
    let uni = (1usize..=2, 2usize..=5, 1.0f64..10.0, 2usize..=5)
        .prop_map(|(d, m, s_period, half)| FrequencyGrid::new(d, m, NodeParams::UniformPeriodic { s_period, n_s: 2 * half }).unwrap());
    prop_oneof![geo, uni]
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn rel(a: &SpectralField, b: &SpectralField) -> f64 {
    let r = l2_norm_sq(b).sqrt();
    l2_norm_sq(&(a - b)).sqrt() / if r > 0.0 { r } else { 1.0 }
}

fn rel_h(a: &HorizontalField, b: &HorizontalField) -> f64 {
    let r = l2_norm_sq_h(b).sqrt();
    l2_norm_sq_h(&(a - b)).sqrt() / if r > 0.0 { r } else { 1.0 }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn nodes_and_weights_are_symmetric(g in grid_strategy()) {
        let n = g.n_lambda();
        prop_assert_eq!(g.q_dim(), 2 * g.d() + 2);
        for i in 0..n {
            prop_assert!(g.nodes()[i] != 0.0);
            prop_assert_eq!(g.nodes()[i], -g.nodes()[n - 1 - i]);
            prop_assert!(g.weights()[i] > 0.0);
            prop_assert_eq!(g.weights()[i], g.weights()[n - 1 - i]);
        }
    }

    #[test]
    fn inner_product_is_hermitian_and_positive(g in grid_strategy(), seed in any::<u64>()) {
        let mut r = rng(seed);
        let f = sample::scalar(&g, 0, &mut r);
        let h = sample::scalar(&g, 0, &mut r);
        let a = inner_product(&f, &h).unwrap();
        let b = inner_product(&h, &f).unwrap();
        prop_assert!((a - b.conj()).norm() <= 1e-12 * a.norm().max(1.0));
        let ff = inner_product(&f, &f).unwrap();
        prop_assert!(ff.re > 0.0 && ff.im.abs() <= 1e-12 * ff.re);
    }

    #[test]
    fn sobolev_norm_grows_with_order_above_unit_symbol(g in grid_strategy(), seed in any::<u64>()) {
        let f = sample::scalar(&g, 0, &mut rng(seed));
        let d = g.d();
        let big = f.map(|_, m, j, c| {
            if 4.0 * g.nodes()[j].abs() * (2 * g.degree(m) + d) as f64 >= 1.0 { c } else { Complex64::new(0.0, 0.0) }
        });
        prop_assume!(l2_norm_sq(&big) > 0.0);
        let a = sobolev_norm_sq(&big, NormKind::LeftHom, 0.5, None);
        let b = sobolev_norm_sq(&big, NormKind::LeftHom, 1.5, None);
        prop_assert!(b >= a * (1.0 - 1e-14));
    }

    #[test]
    fn sublaplacian_powers_invert(g in grid_strategy(), seed in any::<u64>(), l in 0.1f64..2.5) {
        let f = sample::scalar(&g, 0, &mut rng(seed));
        for (p, q) in [(SymbolSpec::LeftSublapPow(l), SymbolSpec::LeftSublapPow(-l)), (SymbolSpec::RightSublapPow(l), SymbolSpec::RightSublapPow(-l))] {
            let back = apply_symbol(&apply_symbol(&f, p).unwrap(), q).unwrap();
            prop_assert!(rel(&back, &f) < 1e-13);
        }
    }

    #[test]
    fn heat_flow_is_a_semigroup(g in grid_strategy(), seed in any::<u64>(), t1 in 0.0f64..0.3, t2 in 0.0f64..0.3) {
        let u = sample::horizontal(&g, 0, &mut rng(seed));
        let two = step_heat(&step_heat(&u, t1), t2);
        let one = step_heat(&u, t1 + t2);
        prop_assert!(rel_h(&two, &one) < 1e-13);
    }

    #[test]
    fn right_fields_are_skew_adjoint(g in grid_strategy(), seed in any::<u64>()) {
        let mut r = rng(seed);
        let f = sample::scalar(&g, 0, &mut r);
        let h = sample::scalar(&g, 0, &mut r);
        for kind in [LadderKind::X, LadderKind::Xi, LadderKind::XTilde, LadderKind::XiTilde] {
            let l = LadderSpec::new(kind, 1);
            let a = inner_product(&apply_ladder(&f, l).unwrap(), &h).unwrap();
            let b = inner_product(&f, &apply_ladder(&h, l).unwrap()).unwrap();
            prop_assert!((a + b).norm() <= 1e-10 * (a.norm() + 1.0), "{:?}", kind);
        }
    }

    #[test]
    fn gradient_and_divergence_are_adjoint(g in grid_strategy(), seed in any::<u64>()) {
        let mut r = rng(seed);
        let f = sample::scalar(&g, 0, &mut r);
        let u = sample::horizontal(&g, 0, &mut r);
        let a = inner_product_h(&gradient_h(&f), &u).unwrap();
        let b = inner_product(&f, &divergence_h(&u)).unwrap();
        prop_assert!((a + b).norm() <= 1e-10 * (a.norm() + 1.0));
    }

    #[test]
    fn commutation_relations_hold_in_the_interior(g in grid_strategy(), seed in any::<u64>()) {
        let f = sample::scalar(&g, 1, &mut rng(seed));
        let x = Operator::Ladder(LadderSpec::new(LadderKind::X, 1));
        let xi = Operator::Ladder(LadderSpec::new(LadderKind::Xi, 1));
        let xt = Operator::Ladder(LadderSpec::new(LadderKind::XTilde, 1));
        let mut c = commutator(&f, x, xi).unwrap();
        c.axpy(Complex64::new(4.0, 0.0), &apply_symbol(&f, SymbolSpec::Ds).unwrap());
        prop_assert!(l2_norm_sq(&c).sqrt() <= 1e-12 * l2_norm_sq(&f).sqrt() * g.max_abs_lambda().max(1.0));
        let z = commutator(&f, x, xt).unwrap();
        prop_assert!(l2_norm_sq(&z).sqrt() <= 1e-12 * l2_norm_sq(&f).sqrt() * g.max_abs_lambda().max(1.0));
    }

    #[test]
    fn leray_is_an_orthogonal_projector(g in grid_strategy(), seed in any::<u64>()) {
        let mut r = rng(seed);
        let u = sample::horizontal(&g, 0, &mut r);
        let v = sample::horizontal(&g, 0, &mut r);
        let pu = leray(&u);
        prop_assert!(relative_divergence(&pu) < 1e-10);
        prop_assert!(rel_h(&leray(&pu), &pu) < 1e-12);
        let a = inner_product_h(&pu, &v).unwrap();
        let b = inner_product_h(&u, &leray(&v)).unwrap();
        let scale = (l2_norm_sq_h(&u) * l2_norm_sq_h(&v)).sqrt();
        prop_assert!((a - b).norm() <= 1e-10 * scale);
    }

    #[test]
    fn leray_commutes_with_right_fields(g in grid_strategy(), seed in any::<u64>()) {
        let u = sample::horizontal(&g, 2, &mut rng(seed));
        for kind in [LadderKind::XTilde, LadderKind::XiTilde] {
            let l = LadderSpec::new(kind, 1);
            let a = leray(&u.map(|c| apply_ladder(c, l).unwrap()));
            let b = leray(&u).map(|c| apply_ladder(c, l).unwrap());
            prop_assert!(l2_norm_sq_h(&(&a - &b)).sqrt() <= 1e-10 * l2_norm_sq_h(&a).sqrt().max(1e-300) + 1e-12);
        }
        let s = SymbolSpec::RightSublapPow(1.0);
        let a = leray(&apply_symbol_h(&u, s).unwrap());
        let b = apply_symbol_h(&leray(&u), s).unwrap();
        prop_assert!(rel_h(&a, &b) < 1e-10);
    }

    #[test]
    fn friedrichs_multipliers(g in grid_strategy(), seed in any::<u64>(), k in 0u32..5, zeta in 0.0f64..1.0) {
        let mut r = rng(seed);
        let f = sample::scalar(&g, 0, &mut r);
        for kind in [FriedrichsKind::Bi, FriedrichsKind::Right] {
            let jf = friedrichs(&f, k, kind);
            let again = friedrichs(&jf, k, kind);
            prop_assert_eq!(again.coeffs(), jf.coeffs());
            let e = SymbolSpec::ExpAbsDs(zeta);
            let (x, y) = (friedrichs(&apply_symbol(&f, e).unwrap(), k, kind), apply_symbol(&jf, e).unwrap());
            prop_assert_eq!(x.coeffs(), y.coeffs());
            for l in [0.0, 1.0, 2.0] {
                prop_assert!(sobolev_norm_sq(&jf, NormKind::LeftHom, l, None) <= sobolev_norm_sq(&f, NormKind::LeftHom, l, None));
            }
        }
        let a = friedrichs_h(&gradient_h(&f), k, FriedrichsKind::Right);
        let b = gradient_h(&friedrichs(&f, k, FriedrichsKind::Right));
        prop_assert!(a.components().iter().zip(b.components()).all(|(x, y)| x.coeffs() == y.coeffs()));
    }

    #[test]
    fn real_fields_stay_real(g in grid_strategy(), seed in any::<u64>()) {
        let u = sample::real_horizontal(&g, 0, &mut rng(seed));
        prop_assert!(u.reality_defect() < 1e-14);
        prop_assert!(leray(&u).reality_defect() < 1e-12);
        prop_assert!(step_heat(&u, 0.1).reality_defect() < 1e-14);
        let f = u.component(0);
        prop_assert!(apply_ladder(f, LadderSpec::new(LadderKind::Xi, 1)).unwrap().reality_defect() < 1e-12);
    }

    #[test]
    fn dilations_invert_on_interior_bands(seed in any::<u64>(), p in 1i64..3) {
        let g = FrequencyGrid::new(1, 4, NodeParams::Geometric { lambda0: 0.3, ratio: 1.7, count: 9 }).unwrap();
        let half = g.n_positive();
        let f = sample::scalar(&g, 0, &mut rng(seed)).map(|_, _, j, c| {
            let lvl = if j >= half { j - half } else { half - 1 - j };
            if (2..half - 2).contains(&lvl) { c } else { Complex64::new(0.0, 0.0) }
        });
        let back = dilate(&dilate(&f, p).unwrap(), -p).unwrap();
        prop_assert!(rel(&back, &f) < 1e-14);
    }

    #[test]
    fn binary_state_round_trips(g in grid_strategy(), seed in any::<u64>()) {
        let u = sample::horizontal(&g, 0, &mut rng(seed));
        let mut bytes = Vec::new();
        write_binary(&State::from(&u), &mut bytes).unwrap();
        let back = read_binary(bytes.as_slice()).unwrap().into_horizontal().unwrap();
        prop_assert_eq!(back.grid().nodes(), g.nodes());
        prop_assert_eq!(back.components().iter().map(|c| c.coeffs().to_vec()).collect::<Vec<_>>(),
                        u.components().iter().map(|c| c.coeffs().to_vec()).collect::<Vec<_>>());
    }
}

#[test]
fn uniform_grid_example() {
    let g = FrequencyGrid::new(1, 2, NodeParams::UniformPeriodic { s_period: 2.0 * PI, n_s: 8 }).unwrap();
    assert_eq!(g.nodes(), &[-4.0, -3.0, -2.0, -1.0, 1.0, 2.0, 3.0, 4.0]);
    assert!((g.weights()[5] - 2.0).abs() < 1e-14);
}
