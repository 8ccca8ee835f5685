//! Strict JSON scenario files.
//!
//! Every field of [`ScenarioConfig`] has a key; omitted keys take the
//! reference defaults. Unknown keys are rejected by name.

use std::path::Path;

use mecpath_core::controller::{ControlMode, ControllerConfig, ControllerGains};
use mecpath_core::frenet::{FrenetState, GlobalPose};
use mecpath_core::path::{CurvatureSegment, PathId, PathPoint, SegmentKind, TargetPath};
use mecpath_core::sim::{self, Comparison, Guards, InitialConditions, ScenarioConfig};
use mecpath_core::{VehicleParams, VehicleState};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioFile {
    pub path: PathSection,
    pub vehicle: VehicleSection,
    pub controller: ControllerSection,
    pub simulation: SimulationSection,
    pub output: OutputSection,
}

/// Either a builtin id or an explicit segment list. A missing section means
/// builtin path 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builtin: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub segments: Option<Vec<SegmentRecord>>,
    #[serde(default)]
    pub origin: OriginRecord,
}

impl Default for PathSection {
    fn default() -> Self {
        Self { builtin: Some(1), segments: None, origin: OriginRecord::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SegmentKindName {
    Zero,
    Constant,
    RaisedCosine,
    Sine,
}

/// `kind` selects the formula: `zero`, `constant` (`c`),
/// `raised-cosine` (`c (1 - cos(omega s + phi))`) or `sine` (`c sin(omega s + phi)`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentRecord {
    pub s_start: f64,
    pub s_end: f64,
    pub kind: SegmentKindName,
    #[serde(default)]
    pub c: f64,
    #[serde(default)]
    pub omega: f64,
    #[serde(default)]
    pub phi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OriginRecord {
    pub xi: f64,
    pub eta: f64,
    pub theta: f64,
}

impl Default for OriginRecord {
    fn default() -> Self {
        let o = TargetPath::default_origin();
        Self { xi: o.xi, eta: o.eta, theta: o.theta }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VehicleSection {
    pub a11: f64,
    pub a12: f64,
    pub a13: f64,
    pub a21: f64,
    pub a22: f64,
    pub a23: f64,
    pub v: f64,
    /// True plant resistance coefficient.
    #[serde(rename = "C")]
    pub c: f64,
    pub wheelbase: f64,
}

impl Default for VehicleSection {
    fn default() -> Self {
        let p = VehicleParams::default();
        Self {
            a11: p.a11,
            a12: p.a12,
            a13: p.a13,
            a21: p.a21,
            a22: p.a22,
            a23: p.a23,
            v: p.speed,
            c: p.resistance,
            wheelbase: p.wheelbase,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ControllerSection {
    pub alpha: [f64; 3],
    /// Compensation gains; `alpha` scaled by the default ratio when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<[f64; 3]>,
    #[serde(rename = "C_M")]
    pub c_m: f64,
    pub mode: ModeName,
    /// Pair compared by `sweep`.
    pub conventional: ModeName,
    pub proposed: ModeName,
}

impl Default for ControllerSection {
    fn default() -> Self {
        let c = ControllerConfig::default();
        let cmp = Comparison::default();
        Self {
            alpha: c.gains.alpha(),
            k: None,
            c_m: c.nominal_resistance,
            mode: ModeName(c.mode),
            conventional: ModeName(cmp.conventional),
            proposed: ModeName(cmp.proposed),
        }
    }
}

/// A [`ControlMode`] serialized by its CLI name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModeName(pub ControlMode);

impl Serialize for ModeName {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.0.as_str())
    }
}

impl<'de> Deserialize<'de> for ModeName {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map(ModeName).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationSection {
    pub dt: f64,
    /// Horizon [s]; `2 L / v` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    /// Arc length where the following-error metric starts [m].
    pub skip: f64,
    pub z_max: f64,
    #[serde(rename = "D_min")]
    pub d_min: f64,
    /// Heading-error limit [rad].
    pub theta_max: f64,
    pub initial: InitialRecord,
}

impl Default for SimulationSection {
    fn default() -> Self {
        let g = Guards::default();
        Self {
            dt: sim::DEFAULT_DT,
            t_max: None,
            skip: sim::DEFAULT_SKIP_ARCLENGTH,
            z_max: g.max_offset,
            d_min: g.existence_margin,
            theta_max: g.heading_limit,
            initial: InitialRecord::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitialRecord {
    pub beta: f64,
    pub psi_dot: f64,
    pub delta: f64,
    pub theta: f64,
    pub z: f64,
    pub s_r: f64,
    pub xi: f64,
    pub eta: f64,
    pub theta_o: f64,
}

impl Default for InitialRecord {
    fn default() -> Self {
        let i = InitialConditions::default();
        Self {
            beta: i.vehicle.beta,
            psi_dot: i.vehicle.psi_dot,
            delta: i.vehicle.delta,
            theta: i.frenet.theta,
            z: i.frenet.z,
            s_r: i.frenet.s_r,
            xi: i.pose.xi,
            eta: i.pose.eta,
            theta_o: i.pose.theta_o,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    /// Time between rows of `timeseries.csv` [s]; `0` keeps every step.
    pub interval: f64,
    pub svg: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { interval: 0.01, svg: false }
    }
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("scenario: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn target_path(&self) -> Result<TargetPath, CliError> {
        self.path.resolve()
    }

    /// Builds and validates the simulation config.
    pub fn to_config(&self) -> Result<ScenarioConfig, CliError> {
        let path = self.target_path()?;
        let v = &self.vehicle;
        let plant = VehicleParams {
            a11: v.a11,
            a12: v.a12,
            a13: v.a13,
            a21: v.a21,
            a22: v.a22,
            a23: v.a23,
            speed: v.v,
            resistance: v.c,
            wheelbase: v.wheelbase,
        };
        let c = &self.controller;
        let gains = match c.k {
            Some(k) => ControllerGains::new(c.alpha, k),
            None => ControllerGains::from_ratio(c.alpha, mecpath_core::controller::DEFAULT_COMPENSATION_RATIO),
        }?;
        let s = &self.simulation;
        let i = &s.initial;
        let t_max = match s.t_max {
            Some(t) => t,
            None if v.v > 0.0 => sim::DEFAULT_HORIZON_FACTOR * path.length() / v.v,
            None => f64::NAN,
        };
        let cfg = ScenarioConfig {
            path,
            plant,
            controller: ControllerConfig { gains, nominal_resistance: c.c_m, mode: c.mode.0 },
            initial: InitialConditions {
                vehicle: VehicleState::new(i.beta, i.psi_dot, i.delta),
                frenet: FrenetState::new(i.theta, i.s_r, i.z),
                pose: GlobalPose::new(i.xi, i.eta, i.theta_o),
            },
            dt: s.dt,
            t_max,
            guards: Guards { max_offset: s.z_max, existence_margin: s.d_min, heading_limit: s.theta_max },
            skip_arclength: s.skip,
        };
        cfg.validate()?;
        if !(self.output.interval.is_finite() && self.output.interval >= 0.0) {
            return Err(CliError::Config("output.interval must be >= 0".into()));
        }
        Ok(cfg)
    }

    pub fn comparison(&self) -> Comparison {
        Comparison { conventional: self.controller.conventional.0, proposed: self.controller.proposed.0 }
    }

    /// The same scenario with every derived default written out, so that the
    /// echo alone reproduces the run.
    pub fn resolved(&self, cfg: &ScenarioConfig) -> Self {
        let mut out = self.clone();
        out.controller.k = Some(cfg.controller.gains.k());
        out.simulation.t_max = Some(cfg.t_max);
        out
    }
}

impl PathSection {
    pub fn builtin(id: PathId) -> Self {
        let n = match id {
            PathId::Path1 => 1,
            PathId::Path2 => 2,
        };
        Self { builtin: Some(n), ..Self::default() }
    }

    pub fn resolve(&self) -> Result<TargetPath, CliError> {
        let o = self.origin;
        let origin = PathPoint { s: 0.0, xi: o.xi, eta: o.eta, theta: o.theta };
        let segments = match (self.builtin, &self.segments) {
            (Some(_), Some(_)) => return Err(CliError::Config("path: give either `builtin` or `segments`, not both".into())),
            (None, None) => return Err(CliError::Config("path: one of `builtin` or `segments` is required".into())),
            (Some(n), None) => {
                let id = match n {
                    1 => PathId::Path1,
                    2 => PathId::Path2,
                    _ => return Err(CliError::Config(format!("path: unknown builtin path {n}, expected 1 or 2"))),
                };
                TargetPath::builtin(id).segments().to_vec()
            }
            (None, Some(list)) => list.iter().map(SegmentRecord::to_segment).collect::<Result<Vec<_>, _>>()?,
        };
        Ok(TargetPath::new(segments, origin)?)
    }
}

impl SegmentRecord {
    fn to_segment(&self) -> Result<CurvatureSegment, CliError> {
        let (c, omega, phi) = (self.c, self.omega, self.phi);
        let kind = match self.kind {
            SegmentKindName::Zero => SegmentKind::Zero,
            SegmentKindName::Constant => SegmentKind::Constant { c },
            SegmentKindName::RaisedCosine => SegmentKind::RaisedCosine { c, omega, phi },
            SegmentKindName::Sine => SegmentKind::Sine { c, omega, phi },
        };
        Ok(CurvatureSegment::new(self.s_start, self.s_end, kind)?)
    }
}

/// `--path` accepts `1`, `2` or a JSON file holding a path section.
pub fn parse_path_arg(arg: &str) -> Result<PathSection, CliError> {
    match arg {
        "1" => Ok(PathSection::builtin(PathId::Path1)),
        "2" => Ok(PathSection::builtin(PathId::Path2)),
        file => {
            let p = Path::new(file);
            if !p.exists() {
                return Err(CliError::Config(format!("--path: `{file}` is neither 1, 2 nor an existing file")));
            }
            let text = std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{file}: {e}")))
        }
    }
}
