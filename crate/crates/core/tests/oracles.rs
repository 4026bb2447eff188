use std::f64::consts::PI;
use std::sync::Arc;

use hnse::frequency::norms::{l2_norm_sq, sobolev_norm_sq};
use hnse::frequency::{dilate, inner_product, plancherel_constant, FrequencyGrid, NodeParams, NormKind, SpectralField};
use hnse::ops::{apply_ladder, apply_symbol, LadderKind, LadderSpec, SymbolSpec};
use hnse::sample;
use hnse::transform::{trace_formula_at, PhysicalField, PhysicalGrid, TransformPlan};
use hnse::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn uniform(m: usize, n_s: usize) -> Arc<FrequencyGrid> {
    FrequencyGrid::new(1, m, NodeParams::UniformPeriodic { s_period: 2.0 * PI, n_s }).unwrap()
}

fn geometric(m: usize, count: usize) -> Arc<FrequencyGrid> {
    FrequencyGrid::new(1, m, NodeParams::Geometric { lambda0: 0.25, ratio: 2.0, count }).unwrap()
}

fn rel(a: &SpectralField, b: &SpectralField) -> f64 {
    (l2_norm_sq(&(a - b)) / l2_norm_sq(b)).sqrt()
}

fn wave(pg: &Arc<PhysicalGrid>, a: f64, k: f64, phi: f64) -> PhysicalField {
    PhysicalField::from_fn(pg, move |y, eta, s| {
        let r2 = y[0] * y[0] + eta[0] * eta[0];
        Complex64::new((-a * r2).exp() * (k * s + phi).cos(), 0.0)
    })
}

#[test]
fn plancherel_for_gaussian_waves() {
    let g = uniform(12, 8);
    let pg = PhysicalGrid::paired(&g, true).unwrap();
    let plan = TransformPlan::new(&g, &pg).unwrap();
    for (a, b, k, p1, p2) in [(1.0, 1.3, 1.0, 0.2, 0.9), (2.1, 1.7, 2.0, 0.0, 0.4), (2.5, 3.5, 3.0, 1.1, 0.3)] {
        let f = plan.forward(&wave(&pg, a, k, p1)).unwrap();
        let h = plan.forward(&wave(&pg, b, k, p2)).unwrap();
        let exact = PI / (a + b) * PI * (p1 - p2).cos();
        let c = inner_product(&f, &h).unwrap().re / exact;
        assert!((c / plancherel_constant(1) - 1.0).abs() < 1e-6, "{c}");
    }
}

#[test]
fn inverse_matches_trace_formula_for_single_modes() {
    let g = uniform(4, 4);
    let pg = PhysicalGrid::paired(&g, false).unwrap();
    let plan = TransformPlan::new(&g, &pg).unwrap();
    for (n, m, j) in [(0, 0, 0), (2, 1, 3), (4, 3, 1), (1, 4, 2)] {
        let f = SpectralField::unit(&g, n, m, j);
        let phys = plan.inverse(&f).unwrap();
        let ns = pg.s_points();
        let mut worst: f64 = 0.0;
        for idx in (0..pg.y_len()).step_by(97).take(8) {
            let (y, eta, _) = pg.y_point(idx);
            for l in [0, ns / 3] {
                let direct = trace_formula_at(&f, &y, &eta, pg.s_node(l)).unwrap();
                worst = worst.max((phys.samples()[idx * ns + l] - direct).norm());
            }
        }
        assert!(worst < 1e-10 * phys.max_abs().max(1e-300), "mode ({n},{m},{j}): {worst}");
    }
}

#[test]
fn inverse_is_adjoint_of_forward() {
    let g = uniform(8, 8);
    let pg = PhysicalGrid::paired(&g, false).unwrap();
    let plan = TransformPlan::new(&g, &pg).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let f = sample::scalar(&g, 0, &mut rng);
    let phi = wave(&pg, 1.2, 2.0, 0.3);
    let lhs = plan.inverse(&f).unwrap().inner(&phi) * plancherel_constant(1);
    let rhs = inner_product(&f, &plan.forward(&phi).unwrap()).unwrap();
    assert!((lhs - rhs).norm() < 1e-8 * rhs.norm().max(1.0), "{lhs} vs {rhs}");
}

#[test]
fn s_translation_is_a_phase() {
    let g = uniform(12, 8);
    let pg = PhysicalGrid::paired(&g, true).unwrap();
    let plan = TransformPlan::new(&g, &pg).unwrap();
    let c = 0.37;
    let f = plan.forward(&wave(&pg, 1.4, 2.0, 0.5)).unwrap();
    let shifted = plan.forward(&wave(&pg, 1.4, 2.0, 0.5 + 2.0 * c)).unwrap();
    let nodes = g.nodes().to_vec();
    let expect = f.map(|_, _, j, v| v * Complex64::from_polar(1.0, nodes[j] * c));
    assert!(rel(&shifted, &expect) < 1e-9);
}

#[test]
fn ladders_match_physical_derivatives() {
    let g = uniform(16, 8);
    let pg = PhysicalGrid::paired(&g, true).unwrap();
    let plan = TransformPlan::new(&g, &pg).unwrap();
    let (a, k, phi) = (1.1, 1.0, 0.4);
    let f = wave(&pg, a, k, phi);
    let amp = move |y: &[f64], eta: &[f64]| (-a * (y[0] * y[0] + eta[0] * eta[0])).exp();
    // ∂_y f, ∂_η f and ∂_s f in closed form
    let dy = move |y: &[f64], eta: &[f64], s: f64| -2.0 * a * y[0] * amp(y, eta) * (k * s + phi).cos();
    let de = move |y: &[f64], eta: &[f64], s: f64| -2.0 * a * eta[0] * amp(y, eta) * (k * s + phi).cos();
    let ds = move |y: &[f64], eta: &[f64], s: f64| -k * amp(y, eta) * (k * s + phi).sin();
    let cases: [(LadderKind, Box<dyn Fn(&[f64], &[f64], f64) -> f64 + Sync>); 4] = [
        (LadderKind::X, Box::new(move |y, e, s| dy(y, e, s) + 2.0 * e[0] * ds(y, e, s))),
        (LadderKind::Xi, Box::new(move |y, e, s| de(y, e, s) - 2.0 * y[0] * ds(y, e, s))),
        (LadderKind::XTilde, Box::new(move |y, e, s| dy(y, e, s) - 2.0 * e[0] * ds(y, e, s))),
        (LadderKind::XiTilde, Box::new(move |y, e, s| de(y, e, s) + 2.0 * y[0] * ds(y, e, s))),
    ];
    let ff = plan.forward(&f).unwrap();
    for (kind, exact) in cases {
        let phys = PhysicalField::from_fn(&pg, |y, e, s| Complex64::new(exact(y, e, s), 0.0));
        let expect = plan.forward(&phys).unwrap().cut_to_interior(2);
        let got = apply_ladder(&ff, LadderSpec::new(kind, 1)).unwrap().cut_to_interior(2);
        assert!(rel(&got, &expect) < 1e-7, "{kind:?}: {}", rel(&got, &expect));
    }
}

#[test]
fn dilation_scales_norms_and_symbols() {
    let g = geometric(6, 10);
    let q = g.q_dim() as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let half = g.n_positive();
    let f = sample::scalar(&g, 0, &mut rng).map(|_, _, j, c| {
        let lvl = if j >= half { j - half } else { half - 1 - j };
        if (2..half - 2).contains(&lvl) { c } else { Complex64::new(0.0, 0.0) }
    });
    for p in [-2i64, -1, 1, 2] {
        let mu = 2f64.powf(p as f64 / 2.0);
        let df = dilate(&f, p).unwrap();
        let l2 = l2_norm_sq(&df) / l2_norm_sq(&f);
        assert!((l2 / mu.powf(-q) - 1.0).abs() < 1e-12);
        for (s, order) in [(SymbolSpec::LeftSublapPow(1.0), 2), (SymbolSpec::RightSublapPow(1.0), 2), (SymbolSpec::Ds, 2)] {
            let lhs = apply_symbol(&df, s).unwrap();
            let rhs = dilate(&apply_symbol(&f, s).unwrap(), p).unwrap().scale(mu.powi(order).into());
            assert!(rel(&lhs, &rhs) < 1e-13, "{s:?} p={p}");
        }
        let h1 = sobolev_norm_sq(&df, NormKind::LeftHom, 1.0, None) / sobolev_norm_sq(&f, NormKind::LeftHom, 1.0, None);
        assert!((h1 / mu.powf(2.0 - q) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn dilation_leaving_the_band_is_an_error() {
    let g = geometric(2, 4);
    let f = SpectralField::unit(&g, 0, 0, g.n_lambda() - 1);
    assert!(dilate(&f, 1).is_err());
    assert!(dilate(&f, -1).is_ok());
}
