//! TOML scenario files and the bundled presets.
//!
//! ```toml
//! [model]
//! pressure = "power"      # p(rho) = kappa rho^gamma
//! kappa = 1.0
//! gamma = 2.0
//! velocity = "linear"     # V(h) = slope h
//! slope = 1.0
//!
//! [coefficient]
//! kind = "piecewise_constant"   # constant | piecewise_constant | piecewise_linear | ramp | periodic
//! breakpoints = [0.0]
//! values = [1.0, 0.5]
//!
//! [initial]
//! kind = "constant"             # constant | riemann | table
//! variables = "conserved"       # conserved (rho, q) | invariant (h, w)
//! state = [0.4, 0.4]
//!
//! [grid]
//! x_min = -1.0
//! x_max = 1.0
//! dx = 1e-3
//! cfl = 0.2
//! t_final = 0.5
//! bc = "outflow"                # outflow | periodic
//!
//! [output]
//! path = "out"
//! stride = 0
//! format = "csv"
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fvm::{BoundaryCondition, Grid, InitialDatum, Scenario};
use crate::model::{Affine, CoefficientProfile, ModelLaws, SampleDomain, ValidationReport};
use crate::state::{ConservedState, InvariantState};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub model: ModelConfig,
    pub coefficient: CoefficientConfig,
    pub initial: InitialConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PressureFamily {
    Power,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VelocityFamily {
    Linear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub pressure: PressureFamily,
    pub kappa: f64,
    pub gamma: f64,
    pub velocity: VelocityFamily,
    #[serde(default = "one")]
    pub slope: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientKind {
    Constant,
    PiecewiseConstant,
    PiecewiseLinear,
    /// `values[0]` below `-epsilon`, `values[0] + (x + epsilon) / epsilon` on
    /// `[-epsilon, 0)`, `values[1]` from 0 on.
    Ramp,
    Periodic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientConfig {
    pub kind: CoefficientKind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub breakpoints: Vec<f64>,
    /// Constant pieces (constant, piecewise_constant, ramp).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<f64>,
    /// Affine pieces `[intercept, slope]` (piecewise_linear, periodic).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pieces: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialKind {
    Constant,
    Riemann,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variables {
    #[default]
    Conserved,
    Invariant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    pub kind: InitialKind,
    #[serde(default)]
    pub variables: Variables,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub left: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub right: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub table: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryKind {
    #[default]
    Outflow,
    Periodic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub dx: f64,
    pub cfl: f64,
    pub t_final: f64,
    #[serde(default)]
    pub bc: BoundaryKind,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { x_min: -1.0, x_max: 1.0, dx: 1e-3, cfl: 0.2, t_final: 0.5, bc: BoundaryKind::Outflow }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub path: String,
    #[serde(default)]
    pub stride: usize,
    #[serde(default)]
    pub format: OutputFormat,
    #[serde(default)]
    pub single_file: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { path: "out".into(), stride: 0, format: OutputFormat::Csv, single_file: false }
    }
}

pub const PRESET_NAMES: [&str; 6] =
    ["scenario_A1", "scenario_A2", "scenario_B1", "scenario_B2", "scenario_C1", "scenario_C2"];

/// TOML text of a bundled preset.
pub fn preset_text(name: &str) -> Option<&'static str> {
    Some(match name {
        "scenario_A1" => include_str!("../presets/scenario_A1.toml"),
        "scenario_A2" => include_str!("../presets/scenario_A2.toml"),
        "scenario_B1" => include_str!("../presets/scenario_B1.toml"),
        "scenario_B2" => include_str!("../presets/scenario_B2.toml"),
        "scenario_C1" => include_str!("../presets/scenario_C1.toml"),
        "scenario_C2" => include_str!("../presets/scenario_C2.toml"),
        _ => return None,
    })
}

pub fn preset(name: &str) -> Result<ScenarioConfig> {
    let text = preset_text(name).ok_or_else(|| Error::Domain(format!("unknown preset {name:?}")))?;
    ScenarioConfig::parse(text)
}

fn config_error(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(config_error(format!("{name} = {v} must be positive")))
    }
}

impl ScenarioConfig {
    /// Parses and fully validates a scenario.
    pub fn parse(text: &str) -> Result<Self> {
        let config = Self::parse_unchecked(text)?;
        config.validate()?;
        Ok(config)
    }

    /// Parses without checking the structural assumptions on the laws, so
    /// that a failing validation report can still be displayed.
    pub fn parse_unchecked(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| config_error(e.to_string().trim_end().to_string()))?;
        config.profile()?;
        config.datum()?;
        config.grid()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario configs always serialize")
    }

    pub fn validate(&self) -> Result<()> {
        let report = self.validation_report()?;
        if report.passed {
            Ok(())
        } else {
            Err(config_error(format!("constitutive laws fail validation:\n{report}")))
        }
    }

    pub fn laws(&self) -> Result<ModelLaws> {
        let m = &self.model;
        positive("model.kappa", m.kappa)?;
        positive("model.gamma", m.gamma)?;
        positive("model.slope", m.slope)?;
        match (m.pressure, m.velocity) {
            (PressureFamily::Power, VelocityFamily::Linear) => ModelLaws::power_linear(m.kappa, m.gamma, m.slope),
        }
    }

    /// Validation of the laws on `(0, rho_max] x (0, h_max]`, with the
    /// bounds taken from the initial data.
    pub fn validation_report(&self) -> Result<ValidationReport> {
        let laws = self.laws()?;
        let states = self.invariant_states()?;
        let w_max = states.iter().map(|s| s.w).fold(0.0, f64::max);
        if w_max <= 0.0 {
            return Err(config_error("initial data are identically zero"));
        }
        let rho_max = laws.pressure().inverse(w_max);
        laws.validate(&SampleDomain::new(rho_max, w_max))
    }

    pub fn profile(&self) -> Result<CoefficientProfile> {
        let c = &self.coefficient;
        let pieces = || c.pieces.iter().map(|&[intercept, slope]| Affine { intercept, slope }).collect();
        let profile = match c.kind {
            CoefficientKind::Constant => match c.values.as_slice() {
                [v] => CoefficientProfile::constant(*v),
                _ => Err(config_error("coefficient.values must hold exactly one value")),
            },
            CoefficientKind::PiecewiseConstant => {
                CoefficientProfile::piecewise_constant(c.breakpoints.clone(), c.values.clone())
            }
            CoefficientKind::PiecewiseLinear => CoefficientProfile::piecewise_linear(c.breakpoints.clone(), pieces()),
            CoefficientKind::Ramp => {
                let eps = c.epsilon.ok_or_else(|| config_error("coefficient.epsilon is required for a ramp"))?;
                positive("coefficient.epsilon", eps)?;
                let [lo, hi] = c.values[..] else {
                    return Err(config_error("coefficient.values must hold [left, right] for a ramp"));
                };
                let ramp = Affine { intercept: lo + 1.0, slope: 1.0 / eps };
                CoefficientProfile::piecewise_linear(
                    vec![-eps, 0.0],
                    vec![Affine::constant(lo), ramp, Affine::constant(hi)],
                )
            }
            CoefficientKind::Periodic => {
                let period = c.period.ok_or_else(|| config_error("coefficient.period is required"))?;
                CoefficientProfile::periodic(period, c.breakpoints.clone(), pieces())
            }
        };
        profile.map_err(|e| match e {
            Error::Domain(msg) => config_error(format!("coefficient: {msg}")),
            other => other,
        })
    }

    fn to_conserved(&self, laws: &ModelLaws, pair: [f64; 2]) -> Result<ConservedState> {
        match self.initial.variables {
            Variables::Conserved => {
                let u = ConservedState::new(pair[0], pair[1]);
                if u.is_vacuum() {
                    return Ok(u);
                }
                laws.to_invariants(u).map_err(|e| config_error(format!("initial state {pair:?}: {e}")))?;
                Ok(u)
            }
            Variables::Invariant => {
                let w = InvariantState::checked(pair[0], pair[1])
                    .map_err(|e| config_error(format!("initial state {pair:?}: {e}")))?;
                Ok(laws.to_conserved(w))
            }
        }
    }

    fn raw_states(&self) -> Result<Vec<[f64; 2]>> {
        let i = &self.initial;
        let need = |v: Option<[f64; 2]>, name: &str| {
            v.ok_or_else(|| config_error(format!("initial.{name} is required for this initial kind")))
        };
        Ok(match i.kind {
            InitialKind::Constant => vec![need(i.state, "state")?],
            InitialKind::Riemann => vec![need(i.left, "left")?, need(i.right, "right")?],
            InitialKind::Table => {
                if i.table.is_empty() {
                    return Err(config_error("initial.table is empty"));
                }
                i.table.clone()
            }
        })
    }

    pub fn datum(&self) -> Result<InitialDatum> {
        let laws = self.laws()?;
        let states =
            self.raw_states()?.into_iter().map(|pair| self.to_conserved(&laws, pair)).collect::<Result<Vec<_>>>()?;
        Ok(match self.initial.kind {
            InitialKind::Constant => InitialDatum::Constant(states[0]),
            InitialKind::Riemann => {
                InitialDatum::Riemann { x0: self.initial.x0.unwrap_or(0.0), left: states[0], right: states[1] }
            }
            InitialKind::Table => InitialDatum::Table(states),
        })
    }

    /// Initial data in invariant coordinates; vacuum states map to `(0, 0)`.
    pub fn invariant_states(&self) -> Result<Vec<InvariantState>> {
        let laws = self.laws()?;
        self.raw_states()?
            .into_iter()
            .map(|pair| {
                let u = self.to_conserved(&laws, pair)?;
                Ok(match self.initial.variables {
                    Variables::Invariant => InvariantState::new(pair[0], pair[1]),
                    Variables::Conserved if u.is_vacuum() => InvariantState::default(),
                    Variables::Conserved => laws.to_invariants(u)?,
                })
            })
            .collect()
    }

    pub fn grid(&self) -> Result<Grid> {
        let g = &self.grid;
        positive("grid.cfl", g.cfl)?;
        if !(g.t_final.is_finite() && g.t_final >= 0.0) {
            return Err(config_error(format!("grid.t_final = {} must be >= 0", g.t_final)));
        }
        Grid::with_spacing(g.x_min, g.x_max, g.dx)
    }

    pub fn scenario(&self) -> Result<Scenario> {
        let grid = self.grid()?;
        if self.initial.kind == InitialKind::Table && self.initial.table.len() != grid.n_cells {
            return Err(config_error(format!(
                "initial.table has {} rows but the grid has {} cells",
                self.initial.table.len(),
                grid.n_cells
            )));
        }
        Ok(Scenario {
            laws: self.laws()?,
            profile: self.profile()?,
            datum: self.datum()?,
            grid,
            cfl: self.grid.cfl,
            t_final: self.grid.t_final,
            bc: match self.grid.bc {
                BoundaryKind::Outflow => BoundaryCondition::Outflow,
                BoundaryKind::Periodic => BoundaryCondition::Periodic,
            },
            stride: self.output.stride,
        })
    }

    /// Riemann data `(x0, W_L, W_R)` when the initial datum is constant or a
    /// single jump.
    pub fn riemann_data(&self) -> Option<(f64, InvariantState, InvariantState)> {
        let states = self.invariant_states().ok()?;
        match self.initial.kind {
            InitialKind::Constant => Some((0.0, states[0], states[0])),
            InitialKind::Riemann => Some((self.initial.x0.unwrap_or(0.0), states[0], states[1])),
            InitialKind::Table => None,
        }
    }
}
