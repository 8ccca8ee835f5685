//! Feedback-linearizing path-following law and the model error compensator.
//!
//! The tracking law chooses the steering command so that the cross-track
//! offset obeys `z''' + a1 z'' + a2 z' + a3 z = 0`. The compensator runs a
//! nominal copy of the closed loop and feeds the plant-vs-model discrepancy of
//! `(z''/cos theta, v tan theta, z/cos theta)` back with gains `k1..k3`.

use core::fmt;
use core::str::FromStr;

use crate::error::invalid;
use crate::frenet::{FrenetState, DEFAULT_EXISTENCE_MARGIN};
use crate::math::{cos, sin};
use crate::vehicle::{plant_derivative, VehicleParams, VehicleState};
use crate::{Error, Result};

/// 85 degrees.
pub const DEFAULT_HEADING_LIMIT: f64 = 85.0 * core::f64::consts::PI / 180.0;

/// Error-loop gains relative to the tracking gains in the default tuning.
pub const DEFAULT_COMPENSATION_RATIO: f64 = 10.0;

/// Hurwitz coefficients of the tracking law and the compensator gains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerGains {
    alpha: [f64; 3],
    k: [f64; 3],
}

impl ControllerGains {
    /// Fails unless `s^3 + a1 s^2 + a2 s + a3` is Hurwitz.
    pub fn new(alpha: [f64; 3], k: [f64; 3]) -> Result<Self> {
        if alpha.iter().chain(&k).any(|g| !g.is_finite()) {
            return Err(invalid("gains", "must be finite"));
        }
        let [a1, a2, a3] = alpha;
        if !(a1 > 0.0 && a3 > 0.0 && a1 * a2 > a3) {
            return Err(invalid("alpha", "s^3 + a1 s^2 + a2 s + a3 must be Hurwitz (a1 > 0, a3 > 0, a1 a2 > a3)"));
        }
        Ok(Self { alpha, k })
    }

    /// Compensator gains set to `ratio` times the Hurwitz coefficients.
    pub fn from_ratio(alpha: [f64; 3], ratio: f64) -> Result<Self> {
        Self::new(alpha, alpha.map(|a| a * ratio))
    }

    pub fn alpha(&self) -> [f64; 3] {
        self.alpha
    }

    pub fn k(&self) -> [f64; 3] {
        self.k
    }
}

impl Default for ControllerGains {
    fn default() -> Self {
        Self::from_ratio([400.0, 500.0, 240.0], DEFAULT_COMPENSATION_RATIO).expect("default gains are Hurwitz")
    }
}

/// How the plant input is assembled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ControlMode {
    /// `u = u_M`: the nominal closed loop drives the plant open-loop.
    Feedforward,
    /// `u = u_M + u_c`.
    Mec,
    /// `u = u0(plant) + C_M v delta`: the tracking law on measured plant states.
    DirectFeedback,
    /// `u = u0(plant) + C_M v delta + u_c`: the compensator added on top of
    /// the plant-state tracking law.
    DirectMec,
}

impl ControlMode {
    pub const ALL: [ControlMode; 4] =
        [ControlMode::Feedforward, ControlMode::Mec, ControlMode::DirectFeedback, ControlMode::DirectMec];

    pub fn as_str(self) -> &'static str {
        match self {
            ControlMode::Feedforward => "feedforward",
            ControlMode::Mec => "mec",
            ControlMode::DirectFeedback => "direct",
            ControlMode::DirectMec => "direct-mec",
        }
    }

    pub fn uses_compensation(self) -> bool {
        matches!(self, ControlMode::Mec | ControlMode::DirectMec)
    }

    pub fn uses_plant_feedback(self) -> bool {
        matches!(self, ControlMode::DirectFeedback | ControlMode::DirectMec)
    }
}

impl fmt::Display for ControlMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ControlMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ControlMode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or(invalid("mode", "expected one of feedforward, mec, direct, direct-mec"))
    }
}

/// Where the law is allowed to be evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularityGuard {
    /// `|theta|` must stay below this [rad].
    pub heading_limit: f64,
    /// `1 - kappa_r z` must stay above this.
    pub existence_margin: f64,
}

impl Default for SingularityGuard {
    fn default() -> Self {
        Self { heading_limit: DEFAULT_HEADING_LIMIT, existence_margin: DEFAULT_EXISTENCE_MARGIN }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerConfig {
    pub gains: ControllerGains,
    /// Resistance coefficient `C_M` assumed by the controller [1/m].
    pub nominal_resistance: f64,
    pub mode: ControlMode,
}

impl Default for ControllerConfig {
    fn default() -> Self {
        Self {
            gains: ControllerGains::default(),
            nominal_resistance: 200.0,
            mode: ControlMode::DirectMec,
        }
    }
}

impl ControllerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.nominal_resistance.is_finite() && self.nominal_resistance >= 0.0) {
            return Err(invalid("C_M", "nominal resistance must be >= 0"));
        }
        Ok(())
    }

    /// The plant parameters as the controller believes them.
    pub fn nominal_params(&self, plant: &VehicleParams) -> VehicleParams {
        plant.with_resistance(self.nominal_resistance)
    }
}

/// Everything the law reads from one system (plant or nominal model).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlSnapshot {
    pub state: VehicleState,
    pub frenet: FrenetState,
    /// `kappa_r(s_r)` [1/m].
    pub kappa_r: f64,
    /// `d kappa_r / dt = kappa_r'(s_r) s_r_dot` [1/(m s)].
    pub kappa_r_dot: f64,
    pub beta_dot: f64,
    pub psi_ddot: f64,
}

impl ControlSnapshot {
    /// Builds the snapshot, evaluating `beta_dot` and `psi_ddot` from the
    /// nominal state equations and `kappa_r_dot` from the path slope.
    pub fn new(
        nominal: &VehicleParams,
        state: VehicleState,
        frenet: FrenetState,
        kappa_r: f64,
        kappa_r_slope: f64,
    ) -> Self {
        let s_r_dot = nominal.speed * cos(frenet.theta) / (1.0 - kappa_r * frenet.z);
        let d = plant_derivative(nominal, &state, 0.0);
        Self {
            state,
            frenet,
            kappa_r,
            kappa_r_dot: kappa_r_slope * s_r_dot,
            beta_dot: d.beta,
            psi_ddot: d.psi_dot,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ControlError {
    /// `|theta|` reached the heading limit; `tan` and `1/cos` blow up.
    HeadingLimit { theta: f64 },
    /// `1 - kappa_r z` reached the existence margin.
    ReferencePointLost { denominator: f64 },
}

impl fmt::Display for ControlError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ControlError::HeadingLimit { theta } => write!(f, "heading error {theta} rad reached the limit"),
            ControlError::ReferencePointLost { denominator } => {
                write!(f, "1 - kappa_r z = {denominator} reached the existence margin")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ControlError {}

/// Trigonometric and geometric factors shared by every term of the law.
struct Geometry {
    drive: f64,
    denominator: f64,
    cos: f64,
    sin: f64,
    tan: f64,
}

fn geometry(p: &VehicleParams, s: &ControlSnapshot, guard: &SingularityGuard) -> Result<Geometry, ControlError> {
    let theta = s.frenet.theta;
    if !(theta.abs() < guard.heading_limit) {
        return Err(ControlError::HeadingLimit { theta });
    }
    let denominator = 1.0 - s.kappa_r * s.frenet.z;
    if !(denominator > guard.existence_margin) {
        return Err(ControlError::ReferencePointLost { denominator });
    }
    let (sin, cos) = (sin(theta), cos(theta));
    Ok(Geometry { drive: p.lateral_drive(&s.state), denominator, cos, sin, tan: sin / cos })
}

/// Steering command that imposes the Hurwitz error dynamics when the
/// steering channel is a pure integrator (`C = 0`).
pub fn u_zero(
    g: &ControllerGains,
    p: &VehicleParams,
    s: &ControlSnapshot,
    guard: &SingularityGuard,
) -> Result<f64, ControlError> {
    let Geometry { drive: a, denominator: d, cos, sin, tan } = geometry(p, s, guard)?;
    let [a1, a2, a3] = g.alpha;
    let (v, a13) = (p.speed, p.a13);
    let (kr, krd, z) = (s.kappa_r, s.kappa_r_dot, s.frenet.z);

    let hurwitz = -a1 * (a - kr * v * v * cos / d) - a2 * v * tan - a3 * z / cos;
    let internal = -(p.a11 * s.beta_dot + p.a12 / v * s.psi_ddot);
    let heading = tan / v * a * a - 3.0 * kr * v * sin / d * a;
    let path = krd * v * v * cos / d + kr * v * v * cos * (krd * z + 3.0 * kr * v * sin) / (d * d);
    Ok((hurwitz + internal + heading + path) / a13)
}

/// `u_zero + c v delta`: the command that also cancels a resistance `c`.
pub fn u_ideal(
    g: &ControllerGains,
    p: &VehicleParams,
    s: &ControlSnapshot,
    c: f64,
    guard: &SingularityGuard,
) -> Result<f64, ControlError> {
    Ok(u_zero(g, p, s, guard)? + c * p.speed * s.state.delta)
}

/// The nominal closed loop's own command, `u_ideal` on model states with `C_M`.
pub fn model_loop_input(
    g: &ControllerGains,
    p_nominal: &VehicleParams,
    model: &ControlSnapshot,
    guard: &SingularityGuard,
) -> Result<f64, ControlError> {
    u_ideal(g, p_nominal, model, p_nominal.resistance, guard)
}

/// Compensation from the plant-vs-model mismatch of
/// `(z''/cos theta, v tan theta, z/cos theta)`.
///
/// Each side uses its own reference-point curvature. All three channels feed
/// back `model - plant` with the same sign, so the error obeys
/// `e''' + k1 e'' + k2 e' + k3 e = disturbance`.
pub fn u_compensation(
    g: &ControllerGains,
    p: &VehicleParams,
    model: &ControlSnapshot,
    plant: &ControlSnapshot,
    guard: &SingularityGuard,
) -> Result<f64, ControlError> {
    let channels = |s: &ControlSnapshot| -> Result<[f64; 3], ControlError> {
        let geo = geometry(p, s, guard)?;
        let v = p.speed;
        Ok([
            geo.drive - s.kappa_r * v * v * geo.cos / geo.denominator,
            v * geo.tan,
            s.frenet.z / geo.cos,
        ])
    };
    let m = channels(model)?;
    let q = channels(plant)?;
    let [k1, k2, k3] = g.k;
    Ok((k1 * (m[0] - q[0]) + k2 * (m[1] - q[1]) + k3 * (m[2] - q[2])) / p.a13)
}

/// Combines the command candidates according to `mode`.
pub fn total_input(mode: ControlMode, u_model: f64, u_comp: f64, u_direct: f64) -> f64 {
    match mode {
        ControlMode::Feedforward => u_model,
        ControlMode::Mec => u_model + u_comp,
        ControlMode::DirectFeedback => u_direct,
        ControlMode::DirectMec => u_direct + u_comp,
    }
}

/// Commands produced in one evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ControlOutput {
    /// Input applied to the plant.
    pub u: f64,
    /// Input of the nominal model loop.
    pub u_model: f64,
    /// Compensation (zero in modes without it).
    pub u_comp: f64,
}

/// Evaluates only the terms `cfg.mode` needs.
pub fn evaluate(
    cfg: &ControllerConfig,
    guard: &SingularityGuard,
    nominal: &VehicleParams,
    model: &ControlSnapshot,
    plant: &ControlSnapshot,
) -> Result<ControlOutput, ControlError> {
    let u_model = model_loop_input(&cfg.gains, nominal, model, guard)?;
    let u_comp = if cfg.mode.uses_compensation() {
        u_compensation(&cfg.gains, nominal, model, plant, guard)?
    } else {
        0.0
    };
    let u_direct = if cfg.mode.uses_plant_feedback() {
        u_ideal(&cfg.gains, nominal, plant, cfg.nominal_resistance, guard)?
    } else {
        0.0
    };
    Ok(ControlOutput { u: total_input(cfg.mode, u_model, u_comp, u_direct), u_model, u_comp })
}
