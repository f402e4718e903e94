//! The experiment configuration: one JSON document, unknown keys rejected.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use foldlab::blowup::RegionWindows;
use foldlab::continuation::{FoldSearch, GrazingSearch};
use foldlab::maps::SectionPair;
use foldlab::models::{make_friction, normal_form_flat, FrictionParams, PwsModel};
use foldlab::regfn::{RegFn, RegFnId, EPS_MAX};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelConfig {
    /// Flat visible-fold normal form, `f = g = 0`.
    NormalForm,
    Friction {
        #[serde(default = "default_mu_s")]
        mu_s: f64,
        #[serde(default = "default_mu_m")]
        mu_m: f64,
        #[serde(default = "default_rho")]
        rho: f64,
        #[serde(default = "default_c_fric")]
        c_fric: f64,
    },
}

fn default_mu_s() -> f64 {
    FrictionParams::default().mu_s
}
fn default_mu_m() -> f64 {
    FrictionParams::default().mu_m
}
fn default_rho() -> f64 {
    FrictionParams::default().rho
}
fn default_c_fric() -> f64 {
    FrictionParams::default().c_fric
}

impl ModelConfig {
    pub fn friction_params(&self) -> Option<FrictionParams> {
        match *self {
            ModelConfig::Friction {
                mu_s,
                mu_m,
                rho,
                c_fric,
            } => Some(FrictionParams {
                mu_s,
                mu_m,
                rho,
                c_fric,
            }),
            ModelConfig::NormalForm => None,
        }
    }

    pub fn build(&self) -> foldlab::Result<PwsModel> {
        match self.friction_params() {
            Some(p) => make_friction(p),
            None => Ok(normal_form_flat()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Integrator tolerance of the section maps, in `[1e-13, 1e-6]`.
    pub integ: f64,
    /// Newton residual for cycles and folds, in `[1e-14, 1e-6]`.
    pub newton: f64,
    /// Integrator tolerance of the Chini runs, in `[1e-13, 1e-6]`.
    pub chini: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            integ: 1e-12,
            newton: 1e-10,
            chini: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateConfig {
    pub z0: [f64; 2],
    pub t_max: f64,
    /// Uniform output samples over `[0, t_max]`.
    pub n_samples: usize,
    /// Defaults to the first entry of `eps_list`, or 0.
    pub eps: Option<f64>,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self {
            z0: [0.0, 0.5],
            t_max: 200.0,
            n_samples: 4001,
            eps: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QmapConfig {
    /// Grid points on `I_L`.
    pub n: usize,
    pub want_d2: bool,
}

impl Default for QmapConfig {
    fn default() -> Self {
        Self {
            n: 101,
            want_d2: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChiniCli {
    pub k_list: Vec<u32>,
    pub c_list: Vec<f64>,
    pub n: usize,
    /// Largest distance below the boundary point on the grid.
    pub d_max: f64,
    /// Offsets `h` of the near-boundary check of `T'`.
    pub asymptotic_h: Vec<f64>,
    pub asymptotic_rel_tol: f64,
}

impl Default for ChiniCli {
    fn default() -> Self {
        Self {
            k_list: vec![1, 2, 3],
            c_list: vec![1.0, 2.0],
            n: 200,
            d_max: foldlab::chini::SCAN_SPAN,
            asymptotic_h: vec![1e-2, 3e-3, 1e-3],
            asymptotic_rel_tol: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChartsCli {
    /// Random points per chart family.
    pub n: usize,
    pub tol: f64,
}

impl Default for ChartsCli {
    fn default() -> Self {
        Self {
            n: 1000,
            tol: 1e-13,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BranchCli {
    /// Defaults to the first entry of `eps_list`.
    pub eps: Option<f64>,
    pub stop_at_fold: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScalingCli {
    /// Accepted slope interval; defaults to `2k/(2k+1) -+ 0.05`.
    pub slope_window: Option<[f64; 2]>,
    pub r_squared_min: f64,
    /// Points per cycle polyline written by `fold-sweep`.
    pub orbit_points: usize,
}

impl Default for ScalingCli {
    fn default() -> Self {
        Self {
            slope_window: None,
            r_squared_min: 0.99,
            orbit_points: 600,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelConfig,
    #[serde(default = "default_regfn")]
    pub regfn: RegFnId,
    #[serde(default)]
    pub eps_list: Vec<f64>,
    /// Entry/exit sections of the fold; defaults to the normal-form pair at `delta = 0.04`.
    #[serde(default)]
    pub sections: Option<SectionPair>,
    #[serde(default)]
    pub alpha: f64,
    /// Window of the Hopf search and the continuation.
    #[serde(default = "default_alpha_window")]
    pub alpha_window: [f64; 2],
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Seed of the random test grids.
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub simulate: SimulateConfig,
    #[serde(default)]
    pub qmap: QmapConfig,
    #[serde(default)]
    pub regions: RegionWindows,
    #[serde(default)]
    pub chini: ChiniCli,
    #[serde(default)]
    pub charts: ChartsCli,
    #[serde(default)]
    pub branch: BranchCli,
    #[serde(default)]
    pub fold_search: FoldSearch,
    #[serde(default)]
    pub grazing: GrazingSearch,
    #[serde(default)]
    pub scaling: ScalingCli,
}

fn default_regfn() -> RegFnId {
    RegFnId::SmoothSqrt
}

fn default_alpha_window() -> [f64; 2] {
    [0.1, 0.3]
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

fn in_range(name: &str, v: f64, lo: f64, hi: f64) -> Result<()> {
    if !(lo..=hi).contains(&v) {
        bail!("{name} = {v} outside [{lo:e}, {hi:e}]");
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).context("invalid configuration")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read {}", path.display()))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn regfn(&self) -> RegFn {
        RegFn::new(self.regfn)
    }

    pub fn sections(&self) -> SectionPair {
        self.sections
            .unwrap_or_else(|| SectionPair::normal_form(0.04))
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(p) = self.model.friction_params() {
            p.validate().context("model")?;
        }
        for &e in &self.eps_list {
            in_range("eps", e, 0.0, EPS_MAX)?;
        }
        if let Some(s) = self.sections {
            s.validate().context("sections")?;
        }
        let t = &self.tolerances;
        in_range("tolerances.integ", t.integ, 1e-13, 1e-6)?;
        in_range("tolerances.newton", t.newton, 1e-14, 1e-6)?;
        in_range("tolerances.chini", t.chini, 1e-13, 1e-6)?;
        let [a, b] = self.alpha_window;
        if !(a < b) {
            bail!("alpha_window must be increasing, got [{a}, {b}]");
        }
        if !self.alpha.is_finite() {
            bail!("alpha must be finite");
        }
        let sim = &self.simulate;
        if !(sim.t_max > 0.0) || sim.n_samples < 2 {
            bail!("simulate needs t_max > 0 and n_samples >= 2");
        }
        if let Some(e) = sim.eps {
            in_range("simulate.eps", e, 0.0, EPS_MAX)?;
        }
        if let Some(e) = self.branch.eps {
            in_range("branch.eps", e, 0.0, EPS_MAX)?;
        }
        if self.qmap.n < 2 {
            bail!("qmap.n must be at least 2");
        }
        if self.chini.k_list.iter().any(|&k| !(1..=3).contains(&k)) {
            bail!("chini.k_list entries must be 1, 2 or 3");
        }
        if self.chini.c_list.iter().any(|&c| !(c > 0.0)) {
            bail!("chini.c_list entries must be positive");
        }
        if self.chini.n < 2 || !(self.chini.d_max > 1e-4) {
            bail!("chini needs n >= 2 and d_max > 1e-4");
        }
        if self
            .chini
            .asymptotic_h
            .iter()
            .any(|&h| !(h > 0.0 && h <= 1e-2))
        {
            bail!("chini.asymptotic_h entries must lie in (0, 1e-2]");
        }
        in_range("charts.tol", self.charts.tol, 0.0, 1e-6)?;
        in_range(
            "scaling.r_squared_min",
            self.scaling.r_squared_min,
            0.0,
            1.0,
        )?;
        Ok(())
    }
}
