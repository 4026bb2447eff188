use std::path::PathBuf;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::config::{Problem, SimulationConfig};
use super::series::{Record, TimeSeries};
use super::{
    analytic_dot_hd_sq, analytic_htilde_sq, analyticity_fit, dissipation_increment, fit_through_origin, grad_l2_sq,
    htilde_sq, htilde_weight, l2_sq, verify,
};
use crate::dynamics::{step_heat, NshStepper, Scheme, StepOutcome, StokesStepper};
use crate::error::{Error, Result};
use crate::frequency::io::{save, State};
use crate::frequency::norms::{inner_product_h, l2_norm_sq_h};
use crate::frequency::{FrequencyGrid, HorizontalField, SpectralField};
use crate::projection::{friedrichs_h, leray, FriedrichsKind};
use crate::sample;

/// Initial data: the configured preset, made divergence-free (and
/// `J̃_k`-invariant for the nonlinear problems), normalized to
/// `‖u₀‖_{H̃^d} = amplitude`.
pub fn initial_state(cfg: &SimulationConfig, grid: &Arc<FrequencyGrid>) -> Result<HorizontalField> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.init.seed);
    let raw = match cfg.init.preset.as_str() {
        "leray_random" => sample::real_horizontal(grid, 1, &mut rng),
        "gauss_mode" => gauss_mode(grid)?,
        p => return Err(Error::Config(format!("unknown preset {p:?}"))),
    };
    let constrained = match cfg.problem {
        Problem::Nsh | Problem::NshTwin | Problem::DothdRamp => {
            leray(&friedrichs_h(&raw, cfg.friedrichs_index(grid), FriedrichsKind::Right))
        }
        _ => leray(&raw),
    };
    let norm = htilde_sq(&constrained).sqrt();
    if norm == 0.0 {
        return Err(Error::Config("initial data vanish after projection".into()));
    }
    Ok(constrained.scale(Complex64::new(cfg.init.amplitude / norm, 0.0)))
}

/// A few low modes on the two lowest `|λ|` levels.
fn gauss_mode(grid: &Arc<FrequencyGrid>) -> Result<HorizontalField> {
    let d = grid.d();
    if grid.m_cut() < 1 || grid.n_positive() < 2 {
        return Err(Error::Config("gauss_mode needs M >= 1 and two positive λ nodes".into()));
    }
    let half = grid.n_positive();
    let mut e1 = vec![0; d];
    e1[0] = 1;
    let one = grid.flat_index(&e1);
    let mut comps = vec![SpectralField::zeros(grid); 2 * d];
    comps[0].set(0, 0, half, Complex64::new(1.0, 0.0));
    comps[0].set(0, 0, half + 1, Complex64::new(0.5, 0.0));
    comps[d].set(0, one, half, Complex64::new(0.0, 0.7));
    comps[d].set(one, 0, half + 1, Complex64::new(0.3, 0.0));
    Ok(HorizontalField::from_components(comps)?.realify())
}

/// Multiplies one random nonzero interior mode (and its `-λ` partner) by
/// `1 + 1e-3`, then restores the constraints.
pub fn perturb(u: &HorizontalField, seed: u64, k: u32) -> HorizontalField {
    let g = u.grid().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7a11);
    let interior = u.map(|c| c.cut_to_interior(1));
    let mut candidates = Vec::new();
    for (ci, c) in interior.components().iter().enumerate() {
        for n in 0..g.side() {
            for m in 0..g.side() {
                for j in g.n_positive()..g.n_lambda() {
                    if c.get(n, m, j).norm() > 1e-3 * u.max_abs() {
                        candidates.push((ci, n, m, j));
                    }
                }
            }
        }
    }
    let mut v = u.clone();
    if candidates.is_empty() {
        return v;
    }
    let (ci, n, m, j) = candidates[rng.gen_range(0..candidates.len())];
    let c = &mut v.components_mut()[ci];
    for jj in [j, g.mirror(j)] {
        let x = c.get(n, m, jj);
        c.set(n, m, jj, x * (1.0 + 1e-3));
    }
    leray(&friedrichs_h(&v, k, FriedrichsKind::Right))
}

/// In-memory result of a run.
#[derive(Clone, Debug)]
pub struct Simulation {
    pub series: TimeSeries,
    pub final_state: HorizontalField,
    pub summary: Value,
    /// Time of a non-finite abort; `final_state` is then the last finite state.
    pub abort: Option<f64>,
}

/// Files written by [`run`].
#[derive(Clone, Debug)]
pub struct Artifacts {
    pub csv: Option<PathBuf>,
    pub summary: PathBuf,
    pub state: Option<PathBuf>,
    /// Verification outcome; always true for time-stepping problems.
    pub passed: bool,
}

/// Running energy bookkeeping along one trajectory.
struct Tracker {
    sigmas: Vec<f64>,
    l2_0: f64,
    htilde_0: f64,
    diss: f64,
    diss_htilde: f64,
    l2_prev: f64,
    l2_increase_max: f64,
    energy_ratio_max: f64,
    analytic_ratio_max: Vec<f64>,
    diss_max: f64,
    drift_max: f64,
}

impl Tracker {
    fn new(u0: &HorizontalField, sigmas: &[f64]) -> Self {
        let l2_0 = l2_sq(u0);
        Tracker {
            sigmas: sigmas.to_vec(),
            l2_0,
            htilde_0: htilde_sq(u0),
            diss: 0.0,
            diss_htilde: 0.0,
            l2_prev: l2_0,
            l2_increase_max: 0.0,
            energy_ratio_max: 0.0,
            analytic_ratio_max: vec![0.0; sigmas.len()],
            diss_max: 0.0,
            drift_max: 0.0,
        }
    }

    fn advance(&mut self, prev: &HorizontalField, next: &HorizontalField, dt: f64) {
        let d = prev.grid().d();
        self.diss += dissipation_increment(prev, next, dt, |_, _, _| 1.0);
        self.diss_htilde += dissipation_increment(prev, next, dt, |dn, _, l| htilde_weight(d, dn, l));
    }

    fn record(&mut self, t: f64, u: &HorizontalField, drift: f64, extra: Vec<f64>) -> Record {
        let l2 = l2_sq(u);
        let h = htilde_sq(u);
        let analytic: Vec<f64> = self.sigmas.iter().map(|s| analytic_htilde_sq(u, s * t)).collect();
        let scale = self.l2_0.max(f64::MIN_POSITIVE);
        let diss_residual = (l2 + 2.0 * self.diss - self.l2_0).abs() / scale;
        if self.l2_prev > 0.0 {
            self.l2_increase_max = self.l2_increase_max.max((l2 - self.l2_prev) / self.l2_prev);
        }
        self.l2_prev = l2;
        if self.htilde_0 > 0.0 {
            self.energy_ratio_max = self.energy_ratio_max.max((h + self.diss_htilde) / (2.0 * self.htilde_0));
            for (m, a) in self.analytic_ratio_max.iter_mut().zip(&analytic) {
                *m = m.max(a / self.htilde_0);
            }
        }
        self.diss_max = self.diss_max.max(diss_residual);
        self.drift_max = self.drift_max.max(drift);
        Record {
            t,
            l2_sq: l2,
            grad_l2_sq: grad_l2_sq(u),
            htilde_d_sq: h,
            analytic,
            radius: analyticity_fit(u).map(|f| f.radius).unwrap_or(f64::NAN),
            diss_residual,
            drift,
            extra,
        }
    }

    fn summary(&self) -> Value {
        let analytic: serde_json::Map<String, Value> = self
            .sigmas
            .iter()
            .zip(&self.analytic_ratio_max)
            .map(|(s, r)| (format!("{s:?}"), json!(r)))
            .collect();
        json!({
            "l2_sq_initial": self.l2_0,
            "htilde_d_sq_initial": self.htilde_0,
            "l2_relative_increase_max": self.l2_increase_max,
            "htilde_energy_bound_ratio_max": self.energy_ratio_max,
            "analytic_ratio_max": analytic,
            "diss_residual_max": self.diss_max,
            "drift_max": self.drift_max,
        })
    }
}

enum Stepper {
    Heat,
    Stokes(StokesStepper),
    Nsh(Box<NshStepper>),
}

impl Stepper {
    fn step(&self, u: &HorizontalField, dt: f64) -> Result<StepOutcome> {
        match self {
            Stepper::Heat => Ok(StepOutcome { state: step_heat(u, dt), drift: 0.0 }),
            Stepper::Stokes(s) => s.step_tracked(u, None),
            Stepper::Nsh(s) => s.step_tracked(u),
        }
    }
}

fn radius_window(u: &HorizontalField) -> Value {
    match analyticity_fit(u) {
        Ok(f) => json!({ "radius": f.radius, "slope": f.slope, "lambda_bins": f.window }),
        Err(e) => json!({ "error": e.to_string() }),
    }
}

/// Runs the configured problem without touching the filesystem.
pub fn simulate(cfg: &SimulationConfig) -> Result<Simulation> {
    cfg.validate()?;
    let grid = cfg.build_grid()?;
    let (steps, dt) = cfg.steps();
    let mut scfg = cfg.stepper_config(&grid)?;
    scfg.dt = dt;
    let stepper = match cfg.problem {
        Problem::Verify => return Err(Error::Config("verify has no trajectory".into())),
        Problem::Heat => Stepper::Heat,
        Problem::Stokes => {
            if scfg.scheme != Scheme::EtdRk2 {
                return Err(Error::Config("stokes needs scheme etd_rk2".into()));
            }
            Stepper::Stokes(StokesStepper::new(&grid, scfg)?)
        }
        _ => {
            if scfg.scheme != Scheme::EtdRk2 {
                return Err(Error::Config("nonlinear problems need scheme etd_rk2".into()));
            }
            Stepper::Nsh(Box::new(NshStepper::new(&grid, scfg)?))
        }
    };
    let u0 = initial_state(cfg, &grid)?;
    let twin = cfg.problem == Problem::NshTwin;
    let ramp = cfg.problem == Problem::DothdRamp;
    let delta = |t: f64| cfg.stepper.ramp_a + cfg.stepper.ramp_rate * t;
    let extra_names: Vec<String> = if twin {
        vec!["twin_diff_htilde_d_sq".into(), "twin_dissipation".into()]
    } else if ramp {
        vec!["ramp_dothd_sq".into()]
    } else {
        vec![]
    };
    let mut series = TimeSeries::new(cfg.stepper.sigma_list.clone(), extra_names);
    let mut tracker = Tracker::new(&u0, &cfg.stepper.sigma_list);

    let mut u = u0.clone();
    let mut v = if twin { Some(perturb(&u0, cfg.init.seed, scfg.k)) } else { None };
    let mut vtracker = v.as_ref().map(|v| Tracker::new(v, &[]));
    let diff0 = v.as_ref().map(|v| htilde_sq(&(&u - v))).unwrap_or(0.0);
    let extra_at = |u: &HorizontalField, v: Option<&HorizontalField>, t: f64, x: f64| -> Vec<f64> {
        if let Some(v) = v {
            vec![htilde_sq(&(u - v)), x]
        } else if ramp {
            vec![analytic_dot_hd_sq(u, delta(t))]
        } else {
            vec![]
        }
    };
    let ramp0 = analytic_dot_hd_sq(&u0, delta(0.0));
    let mut ramp_ratio_max: f64 = 0.0;
    let mut twin_x = 0.0;
    let mut twin_points: Vec<(f64, f64)> = Vec::new();
    let mut orth_max: f64 = 0.0;
    let e0 = extra_at(&u, v.as_ref(), 0.0, 0.0);
    series.push(tracker.record(0.0, &u, 0.0, e0))?;
    let mut abort = None;

    for i in 1..=steps {
        let t = i as f64 * dt;
        if let (Stepper::Nsh(s), every) = (&stepper, cfg.stepper.orthogonality_every) {
            if every > 0 && (i - 1) % every == 0 {
                let c = s.convect(&u)?;
                let scale = (l2_norm_sq_h(&c) * l2_norm_sq_h(&u)).sqrt();
                if scale > 0.0 {
                    orth_max = orth_max.max(inner_product_h(&c, &u)?.norm() / scale);
                }
            }
        }
        let out = match stepper.step(&u, dt) {
            Ok(o) => o,
            Err(Error::NonFinite { .. }) => {
                abort = Some(t);
                break;
            }
            Err(e) => return Err(e),
        };
        tracker.advance(&u, &out.state, dt);
        if let (Some(vv), Some(vt)) = (v.as_mut(), vtracker.as_mut()) {
            let next = match stepper.step(vv, dt) {
                Ok(o) => o.state,
                Err(Error::NonFinite { .. }) => {
                    abort = Some(t);
                    break;
                }
                Err(e) => return Err(e),
            };
            vt.advance(vv, &next, dt);
            *vv = next;
            twin_x = tracker.diss_htilde + vt.diss_htilde;
        }
        u = out.state;
        let extra = extra_at(&u, v.as_ref(), t, twin_x);
        if ramp && ramp0 > 0.0 {
            ramp_ratio_max = ramp_ratio_max.max(extra[0] / ramp0);
        }
        if twin && diff0 > 0.0 {
            twin_points.push((twin_x, (extra[0] / diff0).ln()));
        }
        series.push(tracker.record(t, &u, out.drift, extra))?;
    }

    let mut summary = json!({
        "problem": cfg.problem,
        "grid": cfg.grid,
        "friedrichs_index": scfg.k,
        "steps": series.records().len() - 1,
        "dt": dt,
        "t_final": series.last().map(|r| r.t).unwrap_or(0.0),
        "energy": tracker.summary(),
        "radius_initial": radius_window(&u0),
        "radius_final": radius_window(&u),
        "aborted_at": abort,
    });
    if let Stepper::Nsh(s) = &stepper {
        summary["pi_h_norm_proxy"] = json!(s.pi_h_proxy());
        summary["orthogonality_max"] = json!(orth_max);
    }
    if ramp {
        summary["ramp_ratio_max"] = json!(ramp_ratio_max);
    }
    if twin {
        let (x, y): (Vec<f64>, Vec<f64>) = twin_points.iter().cloned().unzip();
        let (c_hat, r2) = fit_through_origin(&x, &y);
        let c_use = c_hat.max(0.0);
        let worst = twin_points.iter().map(|(x, y)| (y - c_use * x).exp()).fold(0.0, f64::max);
        summary["twin"] = json!({
            "diff_initial": diff0,
            "c_hat": c_hat,
            "fit_r2": r2,
            "gronwall_ratio_max": worst,
            "gronwall_margin": 1.05,
            "gronwall_ok": worst <= 1.05,
        });
    }
    Ok(Simulation { series, final_state: u, summary, abort })
}

/// Runs the configured problem and writes CSV, JSON summary and final state
/// into the output directory. A non-finite abort still writes all artifacts
/// (the state is the last finite one) before returning the error.
pub fn run(cfg: &SimulationConfig) -> Result<Artifacts> {
    cfg.validate()?;
    let dir = &cfg.output.dir;
    std::fs::create_dir_all(dir)?;
    let prefix = &cfg.output.prefix;
    let summary_path = dir.join(format!("{prefix}_summary.json"));
    if cfg.problem == Problem::Verify {
        let reports = verify::run_suites(&verify::SUITES, verify::Scale::Quick);
        let passed = reports.iter().all(|r| r.passed());
        let body = json!({ "passed": passed, "suites": reports.iter().map(|r| r.to_json()).collect::<Vec<_>>() });
        std::fs::write(&summary_path, serde_json::to_string_pretty(&body)?)?;
        return Ok(Artifacts { csv: None, summary: summary_path, state: None, passed });
    }
    let sim = simulate(cfg)?;
    let csv = dir.join(format!("{prefix}.csv"));
    sim.series.write_csv(&csv)?;
    std::fs::write(&summary_path, serde_json::to_string_pretty(&sim.summary)?)?;
    let name = if sim.abort.is_some() { "abort" } else { "final" };
    let state = dir.join(format!("{prefix}_{name}.hnse"));
    save(&State::from(&sim.final_state), &state)?;
    if let Some(t) = sim.abort {
        return Err(Error::NonFinite { t });
    }
    Ok(Artifacts { csv: Some(csv), summary: summary_path, state: Some(state), passed: true })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projection::relative_divergence;

    fn small(problem: Problem) -> SimulationConfig {
        let mut cfg = SimulationConfig::new(problem);
        cfg.grid.m_cut = 4;
        cfg.grid.n_s = 8;
        cfg.stepper.dt = 2e-3;
        cfg.stepper.t_final = 0.02;
        cfg
    }

    #[test]
    fn presets_are_normalized_and_divergence_free() {
        for preset in ["leray_random", "gauss_mode"] {
            let mut cfg = small(Problem::Nsh);
            cfg.init.preset = preset.into();
            let g = cfg.build_grid().unwrap();
            let u = initial_state(&cfg, &g).unwrap();
            assert!((htilde_sq(&u).sqrt() - 0.05).abs() < 1e-14);
            assert!(relative_divergence(&u) < 1e-12);
            assert!(u.reality_defect() < 1e-14);
        }
    }

    #[test]
    fn heat_run_is_monotone() {
        let mut cfg = small(Problem::Heat);
        cfg.stepper.sigma_list = vec![1.0, 2.0, 3.5];
        let sim = simulate(&cfg).unwrap();
        for s in ["1.0", "2.0", "3.5"] {
            let col = sim.series.column(&format!("analytic_sigma_{s}")).unwrap();
            assert!(col.windows(2).all(|w| w[1] <= w[0]));
        }
        let r = sim.series.column("radius").unwrap();
        assert!(r.windows(2).all(|w| w[1] >= w[0] - 1e-12));
        assert!(sim.series.column("diss_residual").unwrap().iter().all(|x| *x < 1e-12));
    }

    #[test]
    fn twin_perturbation_is_small_and_real() {
        let cfg = small(Problem::NshTwin);
        let g = cfg.build_grid().unwrap();
        let u = initial_state(&cfg, &g).unwrap();
        let v = perturb(&u, 1, cfg.friedrichs_index(&g));
        let rel = (htilde_sq(&(&u - &v)) / htilde_sq(&u)).sqrt();
        assert!(rel > 0.0 && rel < 1e-3);
        assert!(v.reality_defect() < 1e-15);
    }
}
