//! Pseudo-spectral products, the convection term, `M_ζ`, and time steppers
//! for the heat, Stokes and Friedrichs-truncated Navier–Stokes systems.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::frequency::norms::l2_norm_sq_h;
use crate::frequency::{FrequencyGrid, GridMode, HorizontalField, SpectralField};
use crate::ops::{apply_ladder, apply_symbol, apply_symbol_h, LadderSpec, SymbolSpec};
use crate::projection::{friedrichs_h, leray, pi_h, pi_h_norm_proxy, relative_divergence, FriedrichsKind};
use crate::transform::{PhysicalField, PhysicalGrid, TransformPlan};

/// Transform plans for products on a uniform grid.
///
/// Besides the plan at cutoff `M`, a plan at `M + 1` synthesizes untruncated
/// ladder images of fields with cutoff `M`.
pub struct ProductEngine {
    grid: Arc<FrequencyGrid>,
    ext: Arc<FrequencyGrid>,
    plan: TransformPlan,
    plan_ext: TransformPlan,
}

impl ProductEngine {
    pub fn new(grid: &Arc<FrequencyGrid>, dealias: bool) -> Result<Self> {
        if grid.mode() != GridMode::UniformPeriodic {
            return Err(Error::GridMode("uniform_periodic"));
        }
        let pgrid = PhysicalGrid::paired(grid, dealias)?;
        Self::with_physical(grid, &pgrid)
    }

    pub fn with_physical(grid: &Arc<FrequencyGrid>, pgrid: &Arc<PhysicalGrid>) -> Result<Self> {
        let ext = grid.with_cutoff(grid.m_cut() + 1);
        Ok(ProductEngine {
            grid: grid.clone(),
            plan: TransformPlan::new(grid, pgrid)?,
            plan_ext: TransformPlan::new(&ext, pgrid)?,
            ext,
        })
    }

    pub fn grid(&self) -> &Arc<FrequencyGrid> {
        &self.grid
    }

    pub fn plan(&self) -> &TransformPlan {
        &self.plan
    }

    pub fn pgrid(&self) -> &Arc<PhysicalGrid> {
        self.plan.pgrid()
    }

    fn check(&self, f: &SpectralField) -> Result<()> {
        if crate::frequency::same_grid(f.grid(), &self.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub fn inverse(&self, f: &SpectralField) -> Result<PhysicalField> {
        self.plan.inverse(f)
    }

    /// Transform of a product, `s`-mean and out-of-band content dropped.
    pub fn forward_product(&self, f: &PhysicalField) -> Result<SpectralField> {
        self.plan.forward_drop_mean(f)
    }

    pub fn product(&self, f: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
        self.check(f)?;
        self.check(g)?;
        let pf = self.plan.inverse(f)?;
        let pg = self.plan.inverse(g)?;
        self.plan.forward_drop_mean(&pf.mul(&pg))
    }

    /// Physical samples of the untruncated ladder image `P f`.
    fn ladder_samples(&self, f: &SpectralField, l: LadderSpec) -> Result<PhysicalField> {
        let fe = f.recut(&self.ext);
        self.plan_ext.inverse(&apply_ladder(&fe, l)?)
    }
}

/// `forward(inverse(f) · inverse(g))` on the engine's grids.
pub fn pointwise_product(f: &SpectralField, g: &SpectralField, engine: &ProductEngine) -> Result<SpectralField> {
    engine.product(f, g)
}

/// `u · ∇_ℍ w`, componentwise `Σ_j u_j P_j w_i`, with untruncated `P_j`.
pub fn advect(u: &HorizontalField, w: &HorizontalField, engine: &ProductEngine) -> Result<HorizontalField> {
    let d = u.grid().d();
    let us: Vec<PhysicalField> = u.components().iter().map(|c| engine.inverse(c)).collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(2 * d);
    for wi in w.components() {
        let mut acc = PhysicalField::zeros(engine.pgrid());
        for (j, uj) in us.iter().enumerate() {
            let pw = engine.ladder_samples(wi, LadderSpec::left(j + 1, d))?;
            acc.axpy(Complex64::new(1.0, 0.0), &pw.mul(uj));
        }
        out.push(engine.forward_product(&acc)?);
    }
    HorizontalField::from_components(out)
}

/// `ℙ J_k (u · ∇_ℍ J_k u)`.
pub fn convect(u: &HorizontalField, k: u32, engine: &ProductEngine) -> Result<HorizontalField> {
    let rel = relative_divergence(u);
    if rel > 1e-8 {
        return Err(Error::Divergence(rel));
    }
    convect_unchecked(u, k, engine)
}

fn convect_unchecked(u: &HorizontalField, k: u32, engine: &ProductEngine) -> Result<HorizontalField> {
    let ju = friedrichs_h(u, k, FriedrichsKind::Bi);
    let b = advect(u, &ju, engine)?;
    Ok(leray(&friedrichs_h(&b, k, FriedrichsKind::Bi)))
}

/// `e^{ζ|D_s|}((e^{-ζ|D_s|} A)(e^{-ζ|D_s|} B))`.
pub fn m_zeta(a: &SpectralField, b: &SpectralField, zeta: f64, engine: &ProductEngine) -> Result<SpectralField> {
    let down = SymbolSpec::ExpAbsDs(-zeta);
    let p = engine.product(&apply_symbol(a, down)?, &apply_symbol(b, down)?)?;
    apply_symbol(&p, SymbolSpec::ExpAbsDs(zeta))
}

/// Exact heat flow: coefficients times `e^{-dt 4|λ|(2|m|+d)}`.
pub fn step_heat(u: &HorizontalField, dt: f64) -> HorizontalField {
    u.map(|c| heat_scalar(c, dt))
}

pub fn heat_scalar(f: &SpectralField, dt: f64) -> SpectralField {
    let g = f.grid().clone();
    f.map(|_, m, j, c| c * (-dt * g.eigenvalue(g.degree(m), g.nodes()[j])).exp())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    ExactDiagonal,
    EtdRk2,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepperConfig {
    pub dt: f64,
    pub scheme: Scheme,
    pub k: u32,
    pub dealias: bool,
    pub cfl_guard: f64,
}

impl StepperConfig {
    pub fn etd(dt: f64, k: u32) -> Self {
        StepperConfig { dt, scheme: Scheme::EtdRk2, k, dealias: true, cfl_guard: 0.5 }
    }
}

/// `φ₁(z) = (e^z − 1)/z` and `φ₂(z) = (e^z − 1 − z)/z²`, series near 0.
pub fn phi12(z: f64) -> (f64, f64) {
    if z.abs() < 1e-3 {
        let p1 = 1.0 + z / 2.0 + z * z / 6.0 + z * z * z / 24.0 + z.powi(4) / 120.0;
        let p2 = 0.5 + z / 6.0 + z * z / 24.0 + z * z * z / 120.0 + z.powi(4) / 720.0;
        (p1, p2)
    } else {
        let e = z.exp_m1();
        (e / z, (e - z) / (z * z))
    }
}

/// Per-mode ETD-RK2 factors for `L = Δ_ℍ`, indexed by `(m, λ)`.
struct EtdTable {
    nl: usize,
    decay: Vec<f64>,
    phi1: Vec<f64>,
    phi2: Vec<f64>,
}

impl EtdTable {
    fn new(grid: &FrequencyGrid, dt: f64) -> Self {
        let side = grid.side();
        let nl = grid.n_lambda();
        let mut t = EtdTable { nl, decay: vec![0.0; side * nl], phi1: vec![0.0; side * nl], phi2: vec![0.0; side * nl] };
        for m in 0..side {
            for j in 0..nl {
                let z = -dt * grid.eigenvalue(grid.degree(m), grid.nodes()[j]);
                let (p1, p2) = phi12(z);
                t.decay[m * nl + j] = z.exp();
                t.phi1[m * nl + j] = dt * p1;
                t.phi2[m * nl + j] = dt * p2;
            }
        }
        t
    }

    fn apply(&self, table: &[f64], u: &HorizontalField) -> HorizontalField {
        let nl = self.nl;
        u.map(|c| c.map(|_, m, j, v| v * table[m * nl + j]))
    }
}

/// Explicit remainder of the semi-discrete system.
pub trait Remainder {
    fn eval(&self, u: &HorizontalField) -> Result<HorizontalField>;
}

/// State after one step, with the relative correction made by the final
/// constraint projection.
#[derive(Clone, Debug)]
pub struct StepOutcome {
    pub state: HorizontalField,
    pub drift: f64,
}

/// One ETD-RK2 step of `∂_t u = Δ_ℍ u + N(u)`; the stage value is re-projected.
fn etd_rk2(u: &HorizontalField, tab: &EtdTable, rem: &dyn Remainder, post: &dyn Fn(&HorizontalField) -> HorizontalField) -> Result<StepOutcome> {
    let nu = rem.eval(u)?;
    let mut a = tab.apply(&tab.decay, u);
    a += &tab.apply(&tab.phi1, &nu);
    let a = post(&a);
    let na = rem.eval(&a)?;
    let mut out = a;
    out += &tab.apply(&tab.phi2, &(&na - &nu));
    if !out.is_finite() {
        return Err(Error::NonFinite { t: f64::NAN });
    }
    let state = post(&out);
    let norm = l2_norm_sq_h(&state);
    let drift = if norm > 0.0 { (l2_norm_sq_h(&(&out - &state)) / norm).sqrt() } else { 0.0 };
    Ok(StepOutcome { state, drift })
}

fn check_cfl(grid: &Arc<FrequencyGrid>, cfg: &StepperConfig) -> Result<f64> {
    if !(cfg.dt > 0.0) {
        return Err(Error::Config(format!("dt = {} must be positive", cfg.dt)));
    }
    let proxy = pi_h_norm_proxy(grid, 50, 0x5eed);
    if cfg.scheme == Scheme::EtdRk2 {
        let value = cfg.dt * grid.max_abs_lambda() * proxy;
        if value > cfg.cfl_guard {
            return Err(Error::Cfl { value, guard: cfg.cfl_guard });
        }
    }
    Ok(proxy)
}

struct StokesRemainder {
    forcing: Option<HorizontalField>,
}

impl Remainder for StokesRemainder {
    fn eval(&self, u: &HorizontalField) -> Result<HorizontalField> {
        let mut out = pi_h(&apply_symbol_h(u, SymbolSpec::Ds)?);
        if let Some(f) = &self.forcing {
            out += f;
        }
        Ok(out)
    }
}

/// ETD-RK2 integrator for `∂_t u − ℙΔ_ℍ u = ℙf`, written as
/// `∂_t u = Δ_ℍ u + Π_ℍ ∂_s u + ℙf` on divergence-free fields.
pub struct StokesStepper {
    grid: Arc<FrequencyGrid>,
    cfg: StepperConfig,
    table: EtdTable,
    proxy: f64,
}

impl StokesStepper {
    pub fn new(grid: &Arc<FrequencyGrid>, cfg: StepperConfig) -> Result<Self> {
        let proxy = check_cfl(grid, &cfg)?;
        Ok(StokesStepper { grid: grid.clone(), cfg, table: EtdTable::new(grid, cfg.dt), proxy })
    }

    pub fn pi_h_proxy(&self) -> f64 {
        self.proxy
    }

    pub fn config(&self) -> &StepperConfig {
        &self.cfg
    }

    pub fn step(&self, u: &HorizontalField, forcing: Option<&HorizontalField>) -> Result<HorizontalField> {
        Ok(self.step_tracked(u, forcing)?.state)
    }

    pub fn step_tracked(&self, u: &HorizontalField, forcing: Option<&HorizontalField>) -> Result<StepOutcome> {
        if !crate::frequency::same_grid(u.grid(), &self.grid) {
            return Err(Error::GridMismatch);
        }
        let rel = relative_divergence(u);
        if rel > 1e-8 {
            return Err(Error::Divergence(rel));
        }
        let rem = StokesRemainder { forcing: forcing.map(leray) };
        etd_rk2(u, &self.table, &rem, &leray)
    }
}

pub fn step_stokes(u: &HorizontalField, forcing: Option<&HorizontalField>, cfg: &StepperConfig) -> Result<HorizontalField> {
    StokesStepper::new(u.grid(), *cfg)?.step(u, forcing)
}

struct NshRemainder<'a> {
    engine: &'a ProductEngine,
    k: u32,
}

impl Remainder for NshRemainder<'_> {
    fn eval(&self, u: &HorizontalField) -> Result<HorizontalField> {
        let mut out = pi_h(&apply_symbol_h(u, SymbolSpec::Ds)?);
        out -= &convect_unchecked(u, self.k, self.engine)?;
        Ok(out)
    }
}

/// ETD-RK2 integrator for the Friedrichs system
/// `∂_t u = Δ_ℍ u + Π_ℍ ∂_s u − ℙ J_k (u · ∇_ℍ J_k u)`, `J̃_k u = u`.
pub struct NshStepper {
    grid: Arc<FrequencyGrid>,
    cfg: StepperConfig,
    table: EtdTable,
    engine: ProductEngine,
    proxy: f64,
}

impl NshStepper {
    pub fn new(grid: &Arc<FrequencyGrid>, cfg: StepperConfig) -> Result<Self> {
        let proxy = check_cfl(grid, &cfg)?;
        let engine = ProductEngine::new(grid, cfg.dealias)?;
        Ok(NshStepper { grid: grid.clone(), cfg, table: EtdTable::new(grid, cfg.dt), engine, proxy })
    }

    pub fn engine(&self) -> &ProductEngine {
        &self.engine
    }

    pub fn config(&self) -> &StepperConfig {
        &self.cfg
    }

    pub fn pi_h_proxy(&self) -> f64 {
        self.proxy
    }

    /// Enforces `ℙu = u` and `J̃_k u = u`.
    pub fn constrain(&self, u: &HorizontalField) -> HorizontalField {
        leray(&friedrichs_h(u, self.cfg.k, FriedrichsKind::Right))
    }

    /// Relative distance from the constraint set.
    pub fn constraint_drift(&self, u: &HorizontalField) -> f64 {
        let norm = l2_norm_sq_h(u);
        if norm == 0.0 {
            return 0.0;
        }
        (l2_norm_sq_h(&(u - &self.constrain(u))) / norm).sqrt()
    }

    pub fn convect(&self, u: &HorizontalField) -> Result<HorizontalField> {
        convect(u, self.cfg.k, &self.engine)
    }

    pub fn step(&self, u: &HorizontalField) -> Result<HorizontalField> {
        Ok(self.step_tracked(u)?.state)
    }

    pub fn step_tracked(&self, u: &HorizontalField) -> Result<StepOutcome> {
        if !crate::frequency::same_grid(u.grid(), &self.grid) {
            return Err(Error::GridMismatch);
        }
        let rel = relative_divergence(u);
        if rel > 1e-8 {
            return Err(Error::Divergence(rel));
        }
        let drift = self.constraint_drift(u);
        if drift > 1e-8 {
            return Err(Error::Constraint(format!("J̃_k u differs from u by {drift:.3e}")));
        }
        let rem = NshRemainder { engine: &self.engine, k: self.cfg.k };
        let post = |v: &HorizontalField| self.constrain(v);
        etd_rk2(u, &self.table, &rem, &post)
    }
}

pub fn step_nsh(u: &HorizontalField, cfg: &StepperConfig) -> Result<HorizontalField> {
    NshStepper::new(u.grid(), *cfg)?.step(u)
}
