use std::f64::consts::PI;
use std::path::PathBuf;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dynamics::{Scheme, StepperConfig};
use crate::error::{Error, Result};
use crate::frequency::{FrequencyGrid, NodeParams};
use crate::projection::covering_index;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Problem {
    Verify,
    Heat,
    Stokes,
    Nsh,
    NshTwin,
    DothdRamp,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub d: usize,
    pub m_cut: usize,
    /// `uniform_periodic` or `geometric`.
    pub mode: String,
    pub s_period: f64,
    pub n_s: usize,
    pub lambda0: f64,
    pub ratio: f64,
    pub count: usize,
    /// Friedrichs index; defaults to the smallest `k` covering the band.
    pub k: Option<u32>,
}

impl Default for GridSection {
    fn default() -> Self {
        GridSection {
            d: 1,
            m_cut: 8,
            mode: "uniform_periodic".into(),
            s_period: 2.0 * PI,
            n_s: 32,
            lambda0: 0.25,
            ratio: 2.0,
            count: 8,
            k: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StepperSection {
    pub dt: f64,
    pub t_final: f64,
    /// `etd_rk2` or `exact_diagonal`; the heat flow always uses the latter.
    pub scheme: String,
    pub dealias: bool,
    pub cfl_guard: f64,
    pub sigma_list: Vec<f64>,
    /// `δ(t) = ramp_a + ramp_rate · t` for `dothd_ramp`.
    pub ramp_a: f64,
    pub ramp_rate: f64,
    /// Steps between orthogonality checks of the nonlinear term; 0 disables.
    pub orthogonality_every: usize,
}

impl Default for StepperSection {
    fn default() -> Self {
        StepperSection {
            dt: 5e-4,
            t_final: 1.0,
            scheme: "etd_rk2".into(),
            dealias: true,
            cfl_guard: 0.5,
            sigma_list: vec![2.0],
            ramp_a: 0.0,
            ramp_rate: 1.0,
            orthogonality_every: 10,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitSection {
    /// `leray_random` or `gauss_mode`.
    pub preset: String,
    /// Target `‖u₀‖_{H̃^d}`.
    pub amplitude: f64,
    pub seed: u64,
}

impl Default for InitSection {
    fn default() -> Self {
        InitSection { preset: "leray_random".into(), amplitude: 0.05, seed: 1 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub prefix: String,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { dir: PathBuf::from("."), prefix: "run".into() }
    }
}

/// Run configuration; read from a `key = value` file with a top-level
/// `problem` key and `[grid] [stepper] [init] [output]` sections.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub problem: Problem,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub stepper: StepperSection,
    #[serde(default)]
    pub init: InitSection,
    #[serde(default)]
    pub output: OutputSection,
}

impl SimulationConfig {
    pub fn new(problem: Problem) -> Self {
        SimulationConfig {
            problem,
            grid: GridSection::default(),
            stepper: StepperSection::default(),
            init: InitSection::default(),
            output: OutputSection::default(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: SimulationConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_text(&self) -> String {
        toml::to_string(self).expect("plain data")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        let d = self.grid.d as f64;
        if self.grid.d == 0 {
            return bad("grid.d must be positive".into());
        }
        if let Some(s) = self.stepper.sigma_list.iter().find(|s| !(**s > 0.0 && **s < 4.0 * d)) {
            return bad(format!("sigma {s} outside (0, {})", 4.0 * d));
        }
        if !(self.init.amplitude > 0.0) {
            return bad(format!("amplitude {} must be positive", self.init.amplitude));
        }
        if !(self.stepper.t_final > 0.0) {
            return bad(format!("t_final {} must be positive", self.stepper.t_final));
        }
        if !(self.stepper.dt > 0.0) {
            return bad(format!("dt {} must be positive", self.stepper.dt));
        }
        if !(self.stepper.cfl_guard > 0.0) {
            return bad("cfl_guard must be positive".into());
        }
        if self.problem == Problem::DothdRamp && !(self.stepper.ramp_rate < 4.0 * d && self.stepper.ramp_a >= 0.0) {
            return bad(format!("ramp needs a >= 0 and rate < {}", 4.0 * d));
        }
        if !matches!(self.init.preset.as_str(), "leray_random" | "gauss_mode") {
            return bad(format!("unknown preset {:?}", self.init.preset));
        }
        self.scheme()?;
        let needs_products = matches!(self.problem, Problem::Nsh | Problem::NshTwin | Problem::DothdRamp);
        if needs_products && self.grid.mode != "uniform_periodic" {
            return bad("nonlinear problems need a uniform_periodic grid".into());
        }
        Ok(())
    }

    pub fn scheme(&self) -> Result<Scheme> {
        match self.stepper.scheme.as_str() {
            "etd_rk2" => Ok(Scheme::EtdRk2),
            "exact_diagonal" => Ok(Scheme::ExactDiagonal),
            s => Err(Error::Config(format!("unknown scheme {s:?}"))),
        }
    }

    pub fn build_grid(&self) -> Result<Arc<FrequencyGrid>> {
        let g = &self.grid;
        let params = match g.mode.as_str() {
            "uniform_periodic" => NodeParams::UniformPeriodic { s_period: g.s_period, n_s: g.n_s },
            "geometric" => NodeParams::Geometric { lambda0: g.lambda0, ratio: g.ratio, count: g.count },
            m => return Err(Error::Config(format!("unknown grid mode {m:?}"))),
        };
        FrequencyGrid::new(g.d, g.m_cut, params)
    }

    pub fn friedrichs_index(&self, grid: &FrequencyGrid) -> u32 {
        self.grid.k.unwrap_or_else(|| covering_index(grid))
    }

    pub fn stepper_config(&self, grid: &FrequencyGrid) -> Result<StepperConfig> {
        Ok(StepperConfig {
            dt: self.stepper.dt,
            scheme: self.scheme()?,
            k: self.friedrichs_index(grid),
            dealias: self.stepper.dealias,
            cfl_guard: self.stepper.cfl_guard,
        })
    }

    /// Number of steps and the step actually used (`T / steps`).
    pub fn steps(&self) -> (usize, f64) {
        let n = (self.stepper.t_final / self.stepper.dt).round().max(1.0) as usize;
        (n, self.stepper.t_final / n as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections() {
        let cfg = SimulationConfig::parse(
            "problem = \"heat\"\n[grid]\nm_cut = 4\nn_s = 8\n[stepper]\ndt = 0.01\nsigma_list = [1.0, 2.0]\n[init]\npreset = \"gauss_mode\"\n",
        )
        .unwrap();
        assert_eq!(cfg.problem, Problem::Heat);
        assert_eq!(cfg.grid.m_cut, 4);
        assert_eq!(cfg.stepper.sigma_list, vec![1.0, 2.0]);
        assert_eq!(SimulationConfig::parse(&cfg.to_text()).unwrap(), cfg);
    }

    #[test]
    fn rejects_bad_values() {
        for text in [
            "problem = \"heat\"\n[stepper]\nsigma_list = [4.0]\n",
            "problem = \"heat\"\n[init]\namplitude = 0.0\n",
            "problem = \"heat\"\n[stepper]\nt_final = -1.0\n",
            "problem = \"heat\"\n[grid]\nbogus = 1\n",
            "problem = \"nsh\"\n[grid]\nmode = \"geometric\"\n",
            "problem = \"fly\"\n",
        ] {
            assert!(matches!(SimulationConfig::parse(text), Err(Error::Config(_))), "{text}");
        }
    }
}
