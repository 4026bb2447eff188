//! Named invariant suites shared by the `verify` command and the acceptance
//! harness.

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::config::{Problem, SimulationConfig};
use super::run::simulate;
use super::analyticity_radius;
use crate::dynamics::{m_zeta, step_heat, ProductEngine, StepperConfig, StokesStepper};
use crate::error::{Error, Result};
use crate::frequency::norms::{l2_norm_sq, l2_norm_sq_h, sobolev_norm_sq};
use crate::frequency::{dilate, inner_product, plancherel_constant, FrequencyGrid, HorizontalField, NodeParams, NormKind, SpectralField};
use crate::hermite::{HermiteTable, QuadratureSpec, WKernel};
use crate::ops::{apply_ladder, apply_symbol, apply_symbol_h, commutator, divergence_h, gradient_h, LadderKind, LadderSpec, Operator, SymbolSpec};
use crate::projection::{covering_index, friedrichs, friedrichs_h, leray, pi_h, relative_divergence, FriedrichsKind};
use crate::sample;
use crate::transform::{PhysicalField, PhysicalGrid, TransformPlan};

/// Problem sizes: `Quick` for the command line, `Acceptance` for the full gate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scale {
    Quick,
    Acceptance,
}

impl Scale {
    fn pick<T>(self, quick: T, full: T) -> T {
        match self {
            Scale::Quick => quick,
            Scale::Acceptance => full,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: String,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteReport {
    pub name: String,
    pub checks: Vec<Check>,
    pub seconds: f64,
    pub error: Option<String>,
}

impl SuiteReport {
    pub fn new(name: &str) -> Self {
        SuiteReport { name: name.into(), checks: Vec::new(), seconds: 0.0, error: None }
    }

    pub fn passed(&self) -> bool {
        self.error.is_none() && self.checks.iter().all(|c| c.passed)
    }

    /// `value <= bound`.
    fn le(&mut self, name: &str, value: f64, bound: f64) {
        self.checks.push(Check { name: name.into(), value, bound: format!("<= {bound:e}"), passed: value <= bound });
    }

    /// `value >= bound`.
    fn ge(&mut self, name: &str, value: f64, bound: f64) {
        self.checks.push(Check { name: name.into(), value, bound: format!(">= {bound:e}"), passed: value >= bound });
    }

    fn within(&mut self, name: &str, value: f64, lo: f64, hi: f64) {
        let passed = (lo..=hi).contains(&value);
        self.checks.push(Check { name: name.into(), value, bound: format!("in [{lo}, {hi}]"), passed });
    }

    /// Reported without a bound.
    fn info(&mut self, name: &str, value: f64) {
        self.checks.push(Check { name: name.into(), value, bound: "reported".into(), passed: true });
    }

    pub fn merge(&mut self, other: SuiteReport) {
        let prefix = other.name.clone();
        for mut c in other.checks {
            c.name = format!("{prefix}.{}", c.name);
            self.checks.push(c);
        }
        if let Some(e) = other.error {
            self.error = Some(format!("{prefix}: {e}"));
        }
    }

    /// Worst failing check, or the first check.
    pub fn headline(&self) -> String {
        if let Some(e) = &self.error {
            return format!("error: {e}");
        }
        let c = self.checks.iter().find(|c| !c.passed).or(self.checks.first());
        match c {
            Some(c) => format!("{} = {:.3e} ({})", c.name, c.value, c.bound),
            None => "no checks".into(),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "suite": self.name,
            "passed": self.passed(),
            "seconds": self.seconds,
            "error": self.error,
            "checks": self.checks.iter().map(|c| json!({
                "name": c.name, "value": c.value, "bound": c.bound, "passed": c.passed,
            })).collect::<Vec<_>>(),
        })
    }
}

pub const SUITES: [&str; 16] = [
    "hermite",
    "commutators",
    "projector",
    "friedrichs",
    "key_identity",
    "transform",
    "spectral_gap",
    "scaling",
    "heat",
    "stokes",
    "nsh",
    "analytic",
    "radius",
    "m_zeta",
    "twin",
    "determinism",
];

pub fn run_suite(name: &str, scale: Scale) -> Result<SuiteReport> {
    let start = Instant::now();
    let body: fn(Scale, &mut SuiteReport) -> Result<()> = match name {
        "hermite" => hermite,
        "commutators" => commutators,
        "projector" => projector,
        "friedrichs" => friedrichs_suite,
        "key_identity" => key_identity,
        "transform" => transform,
        "spectral_gap" => spectral_gap,
        "scaling" => scaling,
        "heat" => heat,
        "stokes" => stokes,
        "nsh" => |s, r| {
            let (a, _) = nsh_pair(s);
            *r = a;
            Ok(())
        },
        "analytic" => |s, r| {
            let (_, b) = nsh_pair(s);
            *r = b;
            Ok(())
        },
        "radius" => radius,
        "m_zeta" => m_zeta_suite,
        "twin" => twin,
        "determinism" => determinism,
        other => return Err(Error::Config(format!("unknown suite {other:?}; known: {}", SUITES.join(", ")))),
    };
    let mut report = SuiteReport::new(name);
    if let Err(e) = body(scale, &mut report) {
        report.error = Some(e.to_string());
    }
    report.name = name.into();
    report.seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

pub fn run_suites(names: &[&str], scale: Scale) -> Vec<SuiteReport> {
    names
        .iter()
        .map(|n| {
            run_suite(n, scale).unwrap_or_else(|e| {
                let mut r = SuiteReport::new(n);
                r.error = Some(e.to_string());
                r
            })
        })
        .collect()
}

fn geometric(d: usize, m: usize, count: usize) -> Arc<FrequencyGrid> {
    FrequencyGrid::new(d, m, NodeParams::Geometric { lambda0: 0.25, ratio: 2.0, count }).expect("valid grid")
}

fn uniform(d: usize, m: usize, n_s: usize) -> Arc<FrequencyGrid> {
    FrequencyGrid::new(d, m, NodeParams::UniformPeriodic { s_period: 2.0 * PI, n_s }).expect("valid grid")
}

fn rel(diff: &SpectralField, reference: &SpectralField) -> f64 {
    let r = l2_norm_sq(reference).sqrt();
    if r == 0.0 {
        l2_norm_sq(diff).sqrt()
    } else {
        l2_norm_sq(diff).sqrt() / r
    }
}

fn rel_h(diff: &HorizontalField, reference: &HorizontalField) -> f64 {
    let r = l2_norm_sq_h(reference).sqrt();
    if r == 0.0 {
        l2_norm_sq_h(diff).sqrt()
    } else {
        l2_norm_sq_h(diff).sqrt() / r
    }
}

fn ladder(kind: LadderKind) -> Operator {
    Operator::Ladder(LadderSpec::new(kind, 1))
}

fn hermite(_: Scale, r: &mut SuiteReport) -> Result<()> {
    let mut worst: f64 = 0.0;
    for lam in [1.0, 4.0, -0.5] {
        let t = HermiteTable::build(lam, 1, 8, QuadratureSpec::for_cutoff(8, lam))?;
        worst = worst.max(t.orthonormality_residual());
    }
    r.le("orthonormality_residual", worst, 1e-8);
    let kern = WKernel::new(1.0, 1, 4)?;
    let mut sup: f64 = 0.0;
    let mut origin_defect: f64 = 0.0;
    for (y, eta) in [(0.3, -0.2), (1.0, 0.5), (-0.7, 1.1), (2.0, 0.0)] {
        sup = sup.max(kern.factor(0, 0, y, eta)?.norm());
    }
    for n in 0..=4 {
        for m in 0..=4 {
            let w = kern.factor(n, m, 0.0, 0.0)?;
            origin_defect = origin_defect.max((w - if n == m { 1.0 } else { 0.0 }).norm());
        }
    }
    r.le("w00_modulus_off_origin", sup, 1.0);
    r.le("w_at_origin_defect", origin_defect, 1e-10);
    Ok(())
}

fn commutators(scale: Scale, r: &mut SuiteReport) -> Result<()> {
    let g = geometric(1, scale.pick(6, 8), 6);
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst = [0f64; 4];
    for _ in 0..scale.pick(10, 100) {
        let f = sample::scalar(&g, 2, &mut rng);
        let ds4 = apply_symbol(&f, SymbolSpec::Ds)?.scale(Complex64::new(-4.0, 0.0));
        let c = commutator(&f, ladder(LadderKind::X), ladder(LadderKind::Xi))?;
        worst[0] = worst[0].max(rel(&(&c - &ds4), &ds4));
        for (slot, b) in [(1, LadderKind::XTilde), (2, LadderKind::XiTilde)] {
            let c = commutator(&f, ladder(LadderKind::X), ladder(b))?;
            let reference = apply_ladder(&apply_ladder(&f, LadderSpec::new(b, 1))?, LadderSpec::new(LadderKind::X, 1))?;
            worst[slot] = worst[slot].max(rel(&c, &reference));
        }
        let lap = apply_symbol(&f, SymbolSpec::LeftSublapPow(1.0))?;
        let dg = divergence_h(&gradient_h(&f));
        worst[3] = worst[3].max(rel(&(&dg + &lap), &lap));
    }
    r.le("[X1,Xi1] + 4 d_s", worst[0], 1e-10);
    r.le("[X1,X~1]", worst[1], 1e-10);
    r.le("[X1,Xi~1]", worst[2], 1e-10);
    r.le("Delta - div grad", worst[3], 1e-10);
    Ok(())
}

fn projector(scale: Scale, r: &mut SuiteReport) -> Result<()> {
    let g = geometric(1, scale.pick(6, 8), 6);
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut worst = [0f64; 5];
    for _ in 0..scale.pick(10, 100) {
        let u = sample::horizontal(&g, 2, &mut rng);
        let p = leray(&u);
        worst[0] = worst[0].max(rel_h(&(&leray(&p) - &p), &p));
        worst[1] = worst[1].max(relative_divergence(&p));
        let f = sample::scalar(&g, 2, &mut rng);
        let grad = gradient_h(&f);
        worst[2] = worst[2].max(rel_h(&leray(&grad), &grad));
        let xt = |v: &HorizontalField| v.map(|c| apply_ladder(c, LadderSpec::new(LadderKind::XTilde, 1)).expect("d = 1"));
        let a = leray(&xt(&u));
        worst[3] = worst[3].max(rel_h(&(&a - &xt(&p)), &a));
        let e = SymbolSpec::ExpAbsDs(0.5);
        let b = leray(&apply_symbol_h(&u, e)?);
        worst[4] = worst[4].max(rel_h(&(&b - &apply_symbol_h(&p, e)?), &b));
    }
    r.le("P^2 - P", worst[0], 1e-10);
    r.le("div P", worst[1], 1e-10);
    r.le("P grad", worst[2], 1e-10);
    r.le("[P, X~1]", worst[3], 1e-10);
    r.le("[P, exp(zeta|D_s|)]", worst[4], 1e-10);
    Ok(())
}

fn friedrichs_suite(scale: Scale, r: &mut SuiteReport) -> Result<()> {
    let g = geometric(1, scale.pick(6, 8), 6);
    let k = covering_index(&g).saturating_sub(3);
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut worst = [0f64; 3];
    let mut witness: f64 = 0.0;
    for _ in 0..scale.pick(10, 100) {
        let f = sample::scalar(&g, 0, &mut rng);
        let j = friedrichs(&f, k, FriedrichsKind::Bi);
        worst[0] = worst[0].max(l2_norm_sq(&j).sqrt() / l2_norm_sq(&f).sqrt() - 1.0);
        worst[1] = worst[1].max(rel(&(&friedrichs(&j, k, FriedrichsKind::Bi) - &j), &j));
        let jt = friedrichs(&friedrichs(&f, k, FriedrichsKind::Right), k, FriedrichsKind::Bi);
        worst[2] = worst[2].max(rel(&(&jt - &j), &j));
        let u = sample::horizontal(&g, 0, &mut rng);
        let a = leray(&friedrichs_h(&u, k, FriedrichsKind::Bi));
        let b = friedrichs_h(&leray(&u), k, FriedrichsKind::Bi);
        witness = witness.max(rel_h(&(&a - &b), &u));
    }
    r.le("J_k contraction excess", worst[0], 1e-12);
    r.le("J_k idempotence", worst[1], 1e-10);
    r.le("J_k J~_k - J_k", worst[2], 1e-10);
    r.ge("[P, J_k] witness", witness, 1e-3);
    Ok(())
}

fn key_identity(scale: Scale, r: &mut SuiteReport) -> Result<()> {
    let g = uniform(1, 8, scale.pick(8, 16));
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut worst: f64 = 0.0;
    for _ in 0..scale.pick(10, 50) {
        let v = leray(&sample::real_horizontal(&g, 4, &mut rng));
        let lap = apply_symbol_h(&v, SymbolSpec::LeftSublapPow(1.0))?;
        let lhs = &lap - &leray(&lap);
        let rhs = pi_h(&apply_symbol_h(&v, SymbolSpec::Ds)?);
        worst = worst.max(rel_h(&(&lhs - &rhs), &lhs));
    }
    r.le("(Id-P)(-Delta)v - Pi_H d_s v", worst, 1e-8);
    Ok(())
}

/// `f = e^{-a|Y|²} cos(ks + φ)` on the physical grid.
fn gaussian_wave(pg: &Arc<PhysicalGrid>, a: f64, k: f64, phi: f64) -> PhysicalField {
    PhysicalField::from_fn(pg, move |y, eta, s| {
        let r2: f64 = y.iter().chain(eta).map(|x| x * x).sum();
        Complex64::new((-a * r2).exp() * (k * s + phi).cos(), 0.0)
    })
}

fn transform(scale: Scale, r: &mut SuiteReport) -> Result<()> {
    let g = uniform(1, 12, 8);
    let pg = PhysicalGrid::paired(&g, true)?;
    let plan = TransformPlan::new(&g, &pg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let mut worst: f64 = 0.0;
    for _ in 0..scale.pick(3, 10) {
        let k = rng.gen_range(1..=3) as f64;
        let (a, b) = (k * rng.gen_range(0.6..1.6), k * rng.gen_range(0.6..1.6));
        let (p1, p2) = (rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0));
        let f = plan.forward(&gaussian_wave(&pg, a, k, p1))?;
        let h = plan.forward(&gaussian_wave(&pg, b, k, p2))?;
        // ∫ e^{-(a+b)|Y|²} dY · ∫ cos(ks+p1) cos(ks+p2) ds
        let exact = PI / (a + b) * PI * (p1 - p2).cos();
        let c = inner_product(&f, &h)?.re / exact;
        worst = worst.max((c / plancherel_constant(1) - 1.0).abs());
    }
    r.le("Plancherel constant pi^2", worst, 1e-6);

    let g2 = uniform(1, 8, 16);
    let pg2 = PhysicalGrid::paired(&g2, false)?;
    let plan2 = TransformPlan::new(&g2, &pg2)?;
    let mut rt: f64 = 0.0;
    let mut vm: f64 = 0.0;
    for _ in 0..scale.pick(2, 5) {
        let f = sample::scalar(&g2, 0, &mut rng);
        let phys = plan2.inverse(&f)?;
        rt = rt.max(rel(&(&plan2.forward(&phys)? - &f), &f));
        let zeta = 0.3;
        let spectral = plan2.inverse(&apply_symbol(&f, SymbolSpec::ExpAbsDs(zeta))?)?;
        let euclid = phys.s_multiplier(|xi| (zeta * xi.abs()).exp());
        let mut diff = spectral.clone();
        diff.axpy(Complex64::new(-1.0, 0.0), &euclid);
        vm = vm.max(diff.max_abs() / spectral.max_abs());
    }
    r.le("forward(inverse(F)) - F", rt, 1e-7);
    r.le("vertical multiplier mismatch", vm, 1e-7);
    Ok(())
}

fn spectral_gap(scale: Scale, r: &mut SuiteReport) -> Result<()> {
    let g = geometric(1, 8, 6);
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let mut excess: f64 = f64::NEG_INFINITY;
    let mut eq: f64 = 0.0;
    for _ in 0..scale.pick(10, 100) {
        let f = sample::scalar(&g, 0, &mut rng);
        for kind in [NormKind::LeftHom, NormKind::RightHom] {
            let lhs = l2_norm_sq(&apply_symbol(&f, SymbolSpec::AbsDsPow(0.5))?).sqrt();
            let rhs = sobolev_norm_sq(&f, kind, 1.0, None).sqrt();
            excess = excess.max(lhs / rhs - 0.5);
            // all mass on m = 0 (left) or n = 0 (right)
            let z = f.map(|n, m, _, c| if (kind == NormKind::LeftHom && m == 0) || (kind == NormKind::RightHom && n == 0) { c } else { Complex64::new(0.0, 0.0) });
            let lhs = l2_norm_sq(&apply_symbol(&z, SymbolSpec::AbsDsPow(0.5))?).sqrt();
            let rhs = sobolev_norm_sq(&z, kind, 1.0, None).sqrt();
            eq = eq.max((lhs / rhs - 0.5).abs());
        }
    }
    r.le("ratio - 1/2 (inequality)", excess, 1e-15);
    r.le("ratio - 1/2 on extremal mass", eq, 1e-10);
    Ok(())
}

fn scaling(scale: Scale, r: &mut SuiteReport) -> Result<()> {
    let g = geometric(1, 8, 12);
    let q = g.q_dim() as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let half = g.n_positive();
    let mut worst_norm: f64 = 0.0;
    let mut worst_ladder: f64 = 0.0;
    for _ in 0..scale.pick(5, 20) {
        // keep away from the band edges so that shifts by ±2 stay inside
        let f = sample::scalar(&g, 1, &mut rng).map(|_, _, j, c| {
            let lvl = if j >= half { j - half } else { half - 1 - j };
            if (2..half - 2).contains(&lvl) { c } else { Complex64::new(0.0, 0.0) }
        });
        for p in [-2i64, 2] {
            let mu = 2f64.powf(p as f64 / 2.0);
            let df = dilate(&f, p)?;
            for l in [0.0, 1.0, 2.0] {
                let a = sobolev_norm_sq(&df, NormKind::LeftHom, l, None).sqrt();
                let b = sobolev_norm_sq(&f, NormKind::LeftHom, l, None).sqrt();
                worst_norm = worst_norm.max((a / (mu.powf(l - q / 2.0) * b) - 1.0).abs());
            }
            for kind in [LadderKind::X, LadderKind::Xi] {
                let spec = LadderSpec::new(kind, 1);
                let lhs = apply_ladder(&df, spec)?;
                let rhs = dilate(&apply_ladder(&f, spec)?, p)?.scale(Complex64::new(mu, 0.0));
                worst_ladder = worst_ladder.max(rel(&(&lhs - &rhs), &rhs));
            }
        }
    }
    r.le("dilated Sobolev norm relation", worst_norm, 1e-10);
    r.le("ladder homogeneity", worst_ladder, 1e-12);
    Ok(())
}

fn heat(scale: Scale, r: &mut SuiteReport) -> Result<()> {
    let g = uniform(1, 8, 32);
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let u = sample::real_horizontal(&g, 0, &mut rng);
    let a = step_heat(&step_heat(&u, 0.013), 0.021);
    let b = step_heat(&u, 0.034);
    r.le("semigroup", rel_h(&(&a - &b), &b), 1e-13);
    let mut worst = f64::NEG_INFINITY;
    for sigma in [1.0, 2.0, 3.5] {
        for m in 0..g.side() {
            for &lam in g.nodes() {
                worst = worst.max(sigma * lam.abs() - g.eigenvalue(g.degree(m), lam));
            }
        }
    }
    r.le("max per-mode exponent of e^{sigma t|D_s|} decay", worst, 0.0);
    let mut cfg = SimulationConfig::new(Problem::Heat);
    cfg.stepper.dt = scale.pick(0.05, 0.01);
    cfg.stepper.sigma_list = vec![1.0, 2.0, 3.5];
    let sim = simulate(&cfg)?;
    let mut up: f64 = f64::NEG_INFINITY;
    for s in ["1.0", "2.0", "3.5"] {
        let col = sim.series.column(&format!("analytic_sigma_{s}")).expect("column");
        for w in col.windows(2) {
            up = up.max(w[1] - w[0]);
        }
    }
    r.le("analytic column increase", up, 0.0);
    let diss = sim.series.column("diss_residual").expect("column").into_iter().fold(0.0, f64::max);
    r.le("energy balance residual", diss, 1e-10);
    Ok(())
}

fn stokes(scale: Scale, r: &mut SuiteReport) -> Result<()> {
    let mut cfg = SimulationConfig::new(Problem::Stokes);
    cfg.grid.m_cut = scale.pick(4, 8);
    cfg.grid.n_s = scale.pick(8, 32);
    cfg.stepper.dt = 1e-3;
    cfg.stepper.t_final = scale.pick(0.2, 1.0);
    cfg.init.preset = "gauss_mode".into();
    let start = Instant::now();
    let sim = simulate(&cfg)?;
    r.le("energy drift", sim.summary["energy"]["diss_residual_max"].as_f64().unwrap_or(f64::NAN), 1e-4);

    let grid = cfg.build_grid()?;
    let u0 = super::initial_state(&cfg, &grid)?;
    let t = 0.1;
    let dts = [4e-3, 2e-3, 1e-3];
    let mut ends = Vec::new();
    for dt in dts {
        let stepper = StokesStepper::new(&grid, StepperConfig::etd(dt, 0))?;
        let mut u = u0.clone();
        for _ in 0..(t / dt).round() as usize {
            u = stepper.step(&u, None)?;
        }
        ends.push(u);
    }
    let e1 = l2_norm_sq_h(&(&ends[0] - &ends[1])).sqrt();
    let e2 = l2_norm_sq_h(&(&ends[1] - &ends[2])).sqrt();
    r.within("self-convergence ratio", e1 / e2, 3.5, 4.5);
    if scale == Scale::Acceptance {
        r.le("runtime seconds", start.elapsed().as_secs_f64(), 300.0);
    }
    Ok(())
}

/// Config of the small-data NSH run.
pub fn nsh_config(scale: Scale) -> SimulationConfig {
    let mut cfg = SimulationConfig::new(Problem::Nsh);
    cfg.grid.m_cut = scale.pick(4, 8);
    cfg.grid.n_s = scale.pick(8, 32);
    cfg.stepper.dt = 5e-4;
    cfg.stepper.t_final = scale.pick(0.05, 1.0);
    cfg.stepper.sigma_list = vec![2.0];
    cfg.init.amplitude = 0.05;
    cfg
}

/// Criteria on one small-data NSH run: energy laws (`nsh`) and the analytic
/// weighted bound plus radius recovery (`analytic`).
pub fn nsh_pair(scale: Scale) -> (SuiteReport, SuiteReport) {
    let mut a = SuiteReport::new("nsh");
    let mut b = SuiteReport::new("analytic");
    let start = Instant::now();
    match simulate(&nsh_config(scale)) {
        Ok(sim) => {
            let e = &sim.summary["energy"];
            let get = |v: &Value| v.as_f64().unwrap_or(f64::NAN);
            a.le("L2 relative increase per step", get(&e["l2_relative_increase_max"]), 1e-6);
            a.le("H~1 energy bound ratio", get(&e["htilde_energy_bound_ratio_max"]), 1.0 + 1e-3);
            a.le("nonlinear orthogonality", get(&sim.summary["orthogonality_max"]), 1e-8);
            a.info("dissipation residual", get(&e["diss_residual_max"]));
            a.info("constraint drift", get(&e["drift_max"]));
            let secs = start.elapsed().as_secs_f64();
            if scale == Scale::Acceptance {
                a.le("runtime seconds", secs, 900.0);
            }
            b.le("analytic H~1 ratio sigma=2", get(&e["analytic_ratio_max"]["2.0"]), 1.0 + 1e-4);
            if let Some(x) = sim.series.column("radius").and_then(|c| c.last().copied()) {
                b.info("final radius estimate", x);
            }
        }
        Err(err) => {
            a.error = Some(err.to_string());
            b.error = Some(err.to_string());
        }
    }
    let g = uniform(1, 4, 32);
    let f = SpectralField::from_fn(&g, |n, m, j| {
        let lam = g.nodes()[j].abs();
        let s = if n <= 2 && m <= 2 { 1.0 / (1.0 + (n + m) as f64) } else { 0.0 };
        Complex64::new(s * (-0.7 * lam).exp(), 0.0)
    });
    match HorizontalField::from_components(vec![f.clone(), f]).and_then(|u| analyticity_radius(&u)) {
        Ok(rhat) => b.within("synthetic radius R=0.7", rhat, 0.63, 0.77),
        Err(err) => b.error = Some(err.to_string()),
    }
    let secs = start.elapsed().as_secs_f64();
    a.seconds = secs;
    b.seconds = secs;
    (a, b)
}

fn radius(_: Scale, r: &mut SuiteReport) -> Result<()> {
    let g = uniform(1, 4, 32);
    let field = |rr: f64| {
        let f = SpectralField::from_fn(&g, |n, m, j| {
            let lam = g.nodes()[j].abs();
            let s = if n <= 2 && m <= 2 { 1.0 / (1.0 + (n + m) as f64) } else { 0.0 };
            Complex64::new(s * (-rr * lam).exp(), 0.0)
        });
        HorizontalField::from_components(vec![f.clone(), f]).expect("same grid")
    };
    r.within("synthetic R=0.7", analyticity_radius(&field(0.7))?, 0.63, 0.77);
    r.le("flat field", analyticity_radius(&field(0.0))?, 1e-12);
    let d = g.d() as f64;
    let mut worst = f64::INFINITY;
    for t in [0.002, 0.004, 0.008] {
        let rr = analyticity_radius(&step_heat(&field(0.0), t))?;
        worst = worst.min(rr / (0.9 * 4.0 * d * t));
    }
    r.ge("heat growth over 0.9*4d*t", worst, 1.0);
    Ok(())
}

fn m_zeta_suite(_: Scale, r: &mut SuiteReport) -> Result<()> {
    let g = uniform(1, 6, 8);
    let engine = ProductEngine::new(&g, true)?;
    let pg = engine.pgrid().clone();
    let plan = engine.plan();
    let wave = |a: f64, parts: &[(f64, f64, f64)]| {
        PhysicalField::from_fn(&pg, |y, eta, s| {
            let r2: f64 = y.iter().chain(eta).map(|x| x * x).sum();
            let v: f64 = parts.iter().map(|(amp, k, phi)| amp * (k * s + phi).cos()).sum();
            Complex64::new((-a * r2).exp() * v, 0.0)
        })
    };
    let a = plan.forward(&wave(1.0, &[(1.0, 1.0, 0.0), (0.4, 2.0, 0.3)]))?;
    let b = plan.forward(&wave(1.5, &[(1.0, 1.0, 0.7), (0.3, 2.0, -0.2)]))?;
    let l4 = |f: &SpectralField| -> Result<f64> { Ok(plan.inverse(f)?.lp_pow(4.0).powf(0.25)) };
    let denom = l4(&a)? * l4(&b)?;
    let mut ratios = Vec::new();
    for zeta in [0.0, 1.0, 2.0, 5.0, 10.0] {
        let p = m_zeta(&a, &b, zeta, &engine)?;
        ratios.push(plan.inverse(&p)?.lp_pow(2.0).sqrt() / denom);
    }
    let hi = ratios.iter().cloned().fold(0.0, f64::max);
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    r.info("ratio at zeta=0", ratios[0]);
    r.info("ratio at zeta=10", ratios[4]);
    r.le("max/min ratio over zeta", hi / lo, 2.0);
    let p = engine.product(&a, &b)?;
    r.le("zeta=0 equals the product", rel(&(&m_zeta(&a, &b, 0.0, &engine)? - &p), &p), 1e-13);
    Ok(())
}

/// Config of the twin-run stability check.
pub fn twin_config(scale: Scale) -> SimulationConfig {
    let mut cfg = SimulationConfig::new(Problem::NshTwin);
    cfg.grid.m_cut = scale.pick(4, 8);
    cfg.grid.n_s = scale.pick(8, 32);
    cfg.stepper.dt = 1e-3;
    cfg.stepper.t_final = scale.pick(0.05, 0.5);
    cfg.stepper.orthogonality_every = 0;
    cfg
}

fn twin(scale: Scale, r: &mut SuiteReport) -> Result<()> {
    let sim = simulate(&twin_config(scale))?;
    let t = &sim.summary["twin"];
    let get = |v: &Value| v.as_f64().unwrap_or(f64::NAN);
    r.info("fitted C", get(&t["c_hat"]));
    r.info("fit R^2", get(&t["fit_r2"]));
    r.le("divergence over Gronwall bound", get(&t["gronwall_ratio_max"]), 1.05);
    Ok(())
}

/// Config of the determinism check.
pub fn determinism_config() -> SimulationConfig {
    let mut cfg = SimulationConfig::new(Problem::Nsh);
    cfg.grid.m_cut = 4;
    cfg.grid.n_s = 8;
    cfg.stepper.dt = 1e-3;
    cfg.stepper.t_final = 0.02;
    cfg.init.seed = 42;
    cfg
}

fn determinism(_: Scale, r: &mut SuiteReport) -> Result<()> {
    let cfg = determinism_config();
    let a = simulate(&cfg)?.series.to_csv();
    let b = simulate(&cfg)?.series.to_csv();
    r.le("differing CSV bytes", a.bytes().zip(b.bytes()).filter(|(x, y)| x != y).count() as f64 + (a.len() as f64 - b.len() as f64).abs(), 0.0);
    Ok(())
}
