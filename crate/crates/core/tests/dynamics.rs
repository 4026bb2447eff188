use std::f64::consts::PI;
use std::sync::Arc;

use hnse::dynamics::{advect, NshStepper, ProductEngine, StepperConfig, StokesStepper};
use hnse::frequency::norms::l2_norm_sq_h;
use hnse::frequency::{FrequencyGrid, HorizontalField, NodeParams, SpectralField};
use hnse::ops::{apply_ladder, LadderSpec};
use hnse::projection::{covering_index, friedrichs_h, leray, relative_divergence, FriedrichsKind};
use hnse::transform::PhysicalField;
use hnse::Complex64;

fn uniform(m: usize, n_s: usize) -> Arc<FrequencyGrid> {
    FrequencyGrid::new(1, m, NodeParams::UniformPeriodic { s_period: 2.0 * PI, n_s }).unwrap()
}

/// Divergence-free field built from Gaussian packets `e^{-a|Y|²} e^{iks}`.
fn packet_field(engine: &ProductEngine, only_positive: bool) -> HorizontalField {
    let pg = engine.pgrid();
    let comp = |a: f64, y0: f64, k: f64| {
        let phys = PhysicalField::from_fn(pg, move |y, eta, s| {
            let r2 = (y[0] - y0).powi(2) + eta[0] * eta[0];
            let amp = (-a * r2).exp();
            if only_positive {
                Complex64::from_polar(amp, k * s)
            } else {
                Complex64::new(amp * (k * s).cos(), 0.0)
            }
        });
        engine.forward_product(&phys).unwrap()
    };
    let u = HorizontalField::from_components(vec![comp(1.6, 0.2, 1.0), comp(1.9, -0.1, 1.0)]).unwrap();
    leray(&u)
}

fn rel(a: &HorizontalField, b: &HorizontalField) -> f64 {
    (l2_norm_sq_h(&(a - b)) / l2_norm_sq_h(b)).sqrt()
}

fn cut(u: &HorizontalField, margin: usize) -> HorizontalField {
    u.map(|c| c.cut_to_interior(margin))
}

#[test]
fn advection_has_divergence_form() {
    let g = uniform(14, 8);
    let engine = ProductEngine::new(&g, true).unwrap();
    for only_positive in [true, false] {
        let u = packet_field(&engine, only_positive);
        assert!(relative_divergence(&u) < 1e-10);
        for k in [covering_index(&g), 2] {
            let w = friedrichs_h(&u, k, FriedrichsKind::Bi);
            let lhs = advect(&u, &w, &engine).unwrap();
            let rhs = HorizontalField::from_components(
                w.components()
                    .iter()
                    .map(|wi| {
                        let mut acc = SpectralField::zeros(&g);
                        for (j, uj) in u.components().iter().enumerate() {
                            let p = engine.product(wi, uj).unwrap();
                            acc += &apply_ladder(&p, LadderSpec::left(j + 1, 1)).unwrap();
                        }
                        acc
                    })
                    .collect(),
            )
            .unwrap();
            let r = rel(&cut(&lhs, 1), &cut(&rhs, 1));
            assert!(r < 1e-7, "k={k} positive-only={only_positive}: {r}");
        }
    }
}

#[test]
fn nsh_step_agrees_with_forced_stokes_to_second_order() {
    let g = uniform(6, 8);
    let k = covering_index(&g);
    let engine = ProductEngine::new(&g, true).unwrap();
    let u = packet_field(&engine, false).scale(Complex64::new(0.3, 0.0));
    let u = leray(&friedrichs_h(&u, k, FriedrichsKind::Right));
    let mut scaled = Vec::new();
    for dt in [4e-3, 2e-3, 1e-3] {
        let nsh = NshStepper::new(&g, StepperConfig::etd(dt, k)).unwrap();
        let force = nsh.convect(&u).unwrap().scale(Complex64::new(-1.0, 0.0));
        let stokes = StokesStepper::new(&g, StepperConfig::etd(dt, k)).unwrap();
        let a = nsh.step(&u).unwrap();
        let b = stokes.step(&u, Some(&force)).unwrap();
        scaled.push(l2_norm_sq_h(&(&a - &b)).sqrt() / (dt * dt));
    }
    assert!(scaled.iter().all(|x| x.is_finite() && *x > 0.0), "{scaled:?}");
    let (lo, hi) = scaled.iter().fold((f64::MAX, 0.0f64), |(l, h), &x| (l.min(x), h.max(x)));
    assert!(hi / lo < 1.5, "difference / dt² = {scaled:?}");
}
