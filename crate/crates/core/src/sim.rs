//! Fixed-step simulation of the plant, its nominal model and their reference
//! points, plus the following-error metric and resistance sweeps.
//!
//! The coupled state has 15 components: plant `(beta, psi_dot, delta)`, plant
//! `(theta, s_r, z)`, inertial pose `(xi, eta, theta_o)`, model
//! `(beta, psi_dot, delta)` and model `(theta, s_r, z)`. Control inputs are
//! re-evaluated at every RK4 stage.

use alloc::vec::Vec;
use core::fmt;

use crate::controller::{self, ControlError, ControlMode, ControlOutput, ControlSnapshot, ControllerConfig, SingularityGuard};
use crate::error::invalid;
use crate::frenet::{self, FrenetState, GlobalPose, Singularity};
use crate::vehicle::{self, VehicleParams, VehicleState};
use crate::{ode, Error, Result, TargetPath};

/// Default integration step [s].
///
/// The compensated loops have a steering-error pole near `-(k1 + a1 + C v)`,
/// several thousand 1/s for the default gains, which rules out 1 ms RK4.
pub const DEFAULT_DT: f64 = 2.5e-4;

/// Default onset of the following-error metric [m].
pub const DEFAULT_SKIP_ARCLENGTH: f64 = 15.0;

/// `t_max = factor * L / v`. Heavily mismatched runs lag the nominal pace
/// by up to 40 %, hence the generous margin.
pub const DEFAULT_HORIZON_FACTOR: f64 = 2.0;

/// Run termination thresholds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Guards {
    /// `|z|` above this means divergence [m].
    pub max_offset: f64,
    /// Minimum of `1 - kappa_r z`.
    pub existence_margin: f64,
    /// `|theta|` limit [rad].
    pub heading_limit: f64,
}

impl Default for Guards {
    fn default() -> Self {
        let g = SingularityGuard::default();
        Self { max_offset: 50.0, existence_margin: g.existence_margin, heading_limit: g.heading_limit }
    }
}

impl Guards {
    pub fn singularity(&self) -> SingularityGuard {
        SingularityGuard { heading_limit: self.heading_limit, existence_margin: self.existence_margin }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.max_offset.is_finite() && self.max_offset > 0.0) {
            return Err(invalid("z_max", "must be positive"));
        }
        if !(self.existence_margin > 0.0 && self.existence_margin < 1.0) {
            return Err(invalid("D_min", "must lie in (0, 1)"));
        }
        if !(self.heading_limit > 0.0 && self.heading_limit < core::f64::consts::FRAC_PI_2) {
            return Err(invalid("theta_max", "must lie in (0, pi/2)"));
        }
        Ok(())
    }
}

/// Initial plant state; the model starts from the same values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialConditions {
    pub vehicle: VehicleState,
    pub frenet: FrenetState,
    pub pose: GlobalPose,
}

impl Default for InitialConditions {
    fn default() -> Self {
        Self {
            vehicle: VehicleState::default(),
            frenet: FrenetState::new(0.0, 0.0, 3.0),
            pose: GlobalPose::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub path: TargetPath,
    /// True plant parameters, including the true resistance `C`.
    pub plant: VehicleParams,
    pub controller: ControllerConfig,
    pub initial: InitialConditions,
    pub dt: f64,
    pub t_max: f64,
    pub guards: Guards,
    pub skip_arclength: f64,
}

impl ScenarioConfig {
    /// Defaults for `path`: matched resistance, horizon `2 L / v`.
    pub fn new(path: TargetPath) -> Self {
        let plant = VehicleParams::default();
        let t_max = DEFAULT_HORIZON_FACTOR * path.length() / plant.speed;
        Self {
            path,
            plant,
            controller: ControllerConfig::default(),
            initial: InitialConditions::default(),
            dt: DEFAULT_DT,
            t_max,
            guards: Guards::default(),
            skip_arclength: DEFAULT_SKIP_ARCLENGTH,
        }
    }

    pub fn with_resistance(mut self, c: f64) -> Self {
        self.plant.resistance = c;
        self
    }

    pub fn with_mode(mut self, mode: ControlMode) -> Self {
        self.controller.mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.plant.validate()?;
        self.controller.validate()?;
        self.guards.validate()?;
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(invalid("dt", "time step must be positive"));
        }
        if !(self.t_max.is_finite() && self.t_max > 0.0) {
            return Err(invalid("t_max", "horizon must be positive"));
        }
        if !(self.skip_arclength.is_finite() && (0.0..self.path.length()).contains(&self.skip_arclength)) {
            return Err(invalid("skip", "metric onset must lie in [0, L)"));
        }
        let init = &self.initial;
        if !(init.vehicle.is_finite() && init.frenet.is_finite() && init.pose.is_finite()) {
            return Err(invalid("initial", "initial state must be finite"));
        }
        if !(init.frenet.z.abs() < self.guards.max_offset) {
            return Err(invalid("initial.z", "|z(0)| must be below z_max"));
        }
        if !(init.frenet.theta.abs() < self.guards.heading_limit) {
            return Err(invalid("initial.theta", "|theta(0)| must be below theta_max"));
        }
        let s0 = init.frenet.s_r;
        if !(0.0..self.path.length()).contains(&s0) {
            return Err(invalid("initial.s_r", "must lie in [0, L)"));
        }
        let kappa_r = self.path.curvature(s0)?;
        if !frenet::check_existence(kappa_r, init.frenet.z, self.guards.existence_margin) {
            return Err(invalid("initial.z", "1 - kappa_r z must exceed D_min at the start"));
        }
        Ok(())
    }
}

/// Full simulation state.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CoupledState {
    pub plant: VehicleState,
    pub plant_frenet: FrenetState,
    pub pose: GlobalPose,
    pub model: VehicleState,
    pub model_frenet: FrenetState,
}

impl CoupledState {
    pub fn initial(init: &InitialConditions) -> Self {
        Self {
            plant: init.vehicle,
            plant_frenet: init.frenet,
            pose: init.pose,
            model: init.vehicle,
            model_frenet: init.frenet,
        }
    }

    fn to_array(self) -> [f64; 15] {
        let f = |x: FrenetState| [x.theta, x.s_r, x.z];
        let [a, b, c] = self.plant.to_array();
        let [d, e, g] = f(self.plant_frenet);
        let [h, i, j] = [self.pose.xi, self.pose.eta, self.pose.theta_o];
        let [k, l, m] = self.model.to_array();
        let [n, o, p] = f(self.model_frenet);
        [a, b, c, d, e, g, h, i, j, k, l, m, n, o, p]
    }

    fn from_array(x: &[f64; 15]) -> Self {
        Self {
            plant: VehicleState::from_slice(&x[0..3]),
            plant_frenet: FrenetState::new(x[3], x[4], x[5]),
            pose: GlobalPose::new(x[6], x[7], x[8]),
            model: VehicleState::from_slice(&x[9..12]),
            model_frenet: FrenetState::new(x[12], x[13], x[14]),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.plant.is_finite()
            && self.plant_frenet.is_finite()
            && self.pose.is_finite()
            && self.model.is_finite()
            && self.model_frenet.is_finite()
    }
}

/// Why a step could not be completed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepFault {
    Control(ControlError),
    Singular(Singularity),
}

impl From<ControlError> for StepFault {
    fn from(e: ControlError) -> Self {
        StepFault::Control(e)
    }
}

impl From<Singularity> for StepFault {
    fn from(e: Singularity) -> Self {
        StepFault::Singular(e)
    }
}

impl StepFault {
    fn status(self) -> RunStatus {
        match self {
            StepFault::Control(ControlError::HeadingLimit { .. }) => RunStatus::Diverged,
            StepFault::Control(ControlError::ReferencePointLost { .. }) | StepFault::Singular(_) => RunStatus::Singular,
        }
    }
}

struct Evaluation {
    derivative: [f64; 15],
    control: ControlOutput,
    kappa: f64,
    kappa_r: f64,
}

fn snapshot(path: &TargetPath, nominal: &VehicleParams, x: VehicleState, f: FrenetState) -> ControlSnapshot {
    let (kappa_r, slope) = path.curvature_clamped(f.s_r);
    ControlSnapshot::new(nominal, x, f, kappa_r, slope)
}

fn evaluate(cfg: &ScenarioConfig, nominal: &VehicleParams, s: &CoupledState) -> Result<Evaluation, StepFault> {
    let guard = cfg.guards.singularity();
    let model = snapshot(&cfg.path, nominal, s.model, s.model_frenet);
    let plant = snapshot(&cfg.path, nominal, s.plant, s.plant_frenet);
    let control = controller::evaluate(&cfg.controller, &guard, nominal, &model, &plant)?;

    let v = cfg.plant.speed;
    let margin = cfg.guards.existence_margin;
    let kappa = vehicle::trajectory_curvature(&cfg.plant, &s.plant);
    let kappa_m = vehicle::trajectory_curvature(nominal, &s.model);

    let plant_dot = vehicle::plant_derivative(&cfg.plant, &s.plant, control.u);
    let plant_frenet_dot = frenet::frenet_derivative(kappa, plant.kappa_r, v, &s.plant_frenet, margin)?;
    let pose_dot = frenet::pose_derivative(v, kappa, &s.pose);
    let model_dot = vehicle::plant_derivative(nominal, &s.model, control.u_model);
    let model_frenet_dot = frenet::frenet_derivative(kappa_m, model.kappa_r, v, &s.model_frenet, margin)?;

    let derivative = CoupledState {
        plant: plant_dot,
        plant_frenet: plant_frenet_dot,
        pose: pose_dot,
        model: model_dot,
        model_frenet: model_frenet_dot,
    }
    .to_array();
    Ok(Evaluation { derivative, control, kappa, kappa_r: plant.kappa_r })
}

/// One RK4 step of the coupled system.
pub fn step(cfg: &ScenarioConfig, state: &CoupledState, dt: f64) -> Result<CoupledState, StepFault> {
    let nominal = cfg.controller.nominal_params(&cfg.plant);
    let next = ode::rk4_step(0.0, &state.to_array(), dt, |_, x| {
        evaluate(cfg, &nominal, &CoupledState::from_array(x)).map(|e| e.derivative)
    })?;
    Ok(CoupledState::from_array(&next))
}

/// Post-step admissibility of both the plant and the model.
fn classify(cfg: &ScenarioConfig, s: &CoupledState) -> Option<RunStatus> {
    if !s.is_finite() {
        return Some(RunStatus::Diverged);
    }
    let g = &cfg.guards;
    for f in [s.plant_frenet, s.model_frenet] {
        if f.z.abs() > g.max_offset || f.theta.abs() >= g.heading_limit {
            return Some(RunStatus::Diverged);
        }
        let (kappa_r, _) = cfg.path.curvature_clamped(f.s_r);
        if !frenet::check_existence(kappa_r, f.z, g.existence_margin) {
            return Some(RunStatus::Singular);
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RunStatus {
    Completed,
    Diverged,
    Singular,
    TimedOut,
}

impl RunStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RunStatus::Completed => "Completed",
            RunStatus::Diverged => "Diverged",
            RunStatus::Singular => "Singular",
            RunStatus::TimedOut => "TimedOut",
        }
    }

    /// Diverged and Singular runs have no meaningful error figure.
    pub fn is_failure(self) -> bool {
        matches!(self, RunStatus::Diverged | RunStatus::Singular)
    }
}

impl fmt::Display for RunStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Maximum following error of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FollowingError {
    Value(f64),
    /// The run diverged or lost its reference point.
    Diverged,
}

impl FollowingError {
    pub fn value(self) -> Option<f64> {
        match self {
            FollowingError::Value(v) => Some(v),
            FollowingError::Diverged => None,
        }
    }
}

/// One accepted integration step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimSample {
    pub t: f64,
    pub plant: VehicleState,
    pub plant_frenet: FrenetState,
    pub pose: GlobalPose,
    pub model: VehicleState,
    pub model_frenet: FrenetState,
    pub u: f64,
    pub u_model: f64,
    pub u_comp: f64,
    pub kappa: f64,
    pub kappa_r: f64,
}

/// Outcome of a run without the time series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSummary {
    pub status: RunStatus,
    /// `None` only when a non-failed run never reached the metric onset.
    pub max_error: Option<FollowingError>,
    /// `max |z|` over the whole run [m].
    pub max_error_raw: f64,
    pub final_time: f64,
    pub final_s_r: f64,
    pub steps: usize,
    pub fault: Option<StepFault>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub status: RunStatus,
    pub samples: Vec<SimSample>,
    pub max_error: Option<FollowingError>,
    pub max_error_raw: f64,
    pub final_time: f64,
    pub final_s_r: f64,
    pub fault: Option<StepFault>,
}

/// Integrates `cfg` to termination and keeps every accepted sample.
pub fn run(cfg: &ScenarioConfig) -> Result<RunResult> {
    let mut samples = Vec::new();
    let summary = run_with(cfg, |s| samples.push(*s))?;
    Ok(RunResult {
        status: summary.status,
        samples,
        max_error: summary.max_error,
        max_error_raw: summary.max_error_raw,
        final_time: summary.final_time,
        final_s_r: summary.final_s_r,
        fault: summary.fault,
    })
}

/// Integrates `cfg`, handing each accepted sample (including `t = 0`) to
/// `observe` instead of storing it.
pub fn run_with(cfg: &ScenarioConfig, mut observe: impl FnMut(&SimSample)) -> Result<RunSummary> {
    cfg.validate()?;
    let nominal = cfg.controller.nominal_params(&cfg.plant);
    let length = cfg.path.length();

    let mut state = CoupledState::initial(&cfg.initial);
    let mut steps = 0usize;
    let mut metric = StreamingMetric::new(cfg.skip_arclength);
    let mut fault = None;

    let status = match evaluate(cfg, &nominal, &state) {
        Err(f) => {
            fault = Some(f);
            f.status()
        }
        Ok(e) => {
            let first = sample(0.0, &state, &e);
            metric.push(&first);
            observe(&first);
            loop {
                if state.plant_frenet.s_r >= length {
                    break RunStatus::Completed;
                }
                let t = steps as f64 * cfg.dt;
                if t >= cfg.t_max {
                    break RunStatus::TimedOut;
                }
                let next = match step(cfg, &state, cfg.dt) {
                    Ok(next) => next,
                    Err(f) => {
                        fault = Some(f);
                        break f.status();
                    }
                };
                if let Some(status) = classify(cfg, &next) {
                    break status;
                }
                let e = match evaluate(cfg, &nominal, &next) {
                    Ok(e) => e,
                    Err(f) => {
                        fault = Some(f);
                        break f.status();
                    }
                };
                steps += 1;
                state = next;
                let s = sample(steps as f64 * cfg.dt, &state, &e);
                metric.push(&s);
                observe(&s);
            }
        }
    };

    Ok(RunSummary {
        status,
        max_error: metric.finish(status),
        max_error_raw: metric.raw,
        final_time: steps as f64 * cfg.dt,
        final_s_r: state.plant_frenet.s_r,
        steps,
        fault,
    })
}

fn sample(t: f64, s: &CoupledState, e: &Evaluation) -> SimSample {
    SimSample {
        t,
        plant: s.plant,
        plant_frenet: s.plant_frenet,
        pose: s.pose,
        model: s.model,
        model_frenet: s.model_frenet,
        u: e.control.u,
        u_model: e.control.u_model,
        u_comp: e.control.u_comp,
        kappa: e.kappa,
        kappa_r: e.kappa_r,
    }
}

struct StreamingMetric {
    skip: f64,
    qualified: Option<f64>,
    raw: f64,
}

impl StreamingMetric {
    fn new(skip: f64) -> Self {
        Self { skip, qualified: None, raw: 0.0 }
    }

    fn push(&mut self, s: &SimSample) {
        let z = s.plant_frenet.z.abs();
        self.raw = self.raw.max(z);
        if s.plant_frenet.s_r >= self.skip {
            self.qualified = Some(self.qualified.map_or(z, |m| m.max(z)));
        }
    }

    fn finish(&self, status: RunStatus) -> Option<FollowingError> {
        if status.is_failure() {
            Some(FollowingError::Diverged)
        } else {
            self.qualified.map(FollowingError::Value)
        }
    }
}

/// `max |z|` over samples with `s_r >= skip_arclength`, or the divergence
/// marker for failed runs.
pub fn max_following_error(samples: &[SimSample], status: RunStatus, skip_arclength: f64) -> Result<FollowingError> {
    if status.is_failure() {
        return Ok(FollowingError::Diverged);
    }
    samples
        .iter()
        .filter(|s| s.plant_frenet.s_r >= skip_arclength)
        .map(|s| s.plant_frenet.z.abs())
        .reduce(f64::max)
        .map(FollowingError::Value)
        .ok_or(Error::NoQualifyingSamples { skip_arclength })
}

/// The two controllers compared in a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Comparison {
    pub conventional: ControlMode,
    pub proposed: ControlMode,
}

impl Default for Comparison {
    fn default() -> Self {
        Self { conventional: ControlMode::DirectFeedback, proposed: ControlMode::DirectMec }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub resistance: f64,
    /// `C / C_M`.
    pub ratio: f64,
    pub conventional: FollowingError,
    pub proposed: FollowingError,
    pub conventional_status: RunStatus,
    pub proposed_status: RunStatus,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// Sorts rows by resistance so the table is independent of execution order.
    pub fn from_rows(mut rows: Vec<SweepRow>) -> Self {
        rows.sort_by(|a, b| a.resistance.total_cmp(&b.resistance));
        Self { rows }
    }
}

fn metric_or_raw(summary: &RunSummary) -> FollowingError {
    summary.max_error.unwrap_or(FollowingError::Value(summary.max_error_raw))
}

impl SweepRow {
    /// Combines the two runs made at plant resistance `c`.
    pub fn from_runs(c: f64, nominal_resistance: f64, conventional: &RunSummary, proposed: &RunSummary) -> Self {
        Self {
            resistance: c,
            ratio: c / nominal_resistance,
            conventional: metric_or_raw(conventional),
            proposed: metric_or_raw(proposed),
            conventional_status: conventional.status,
            proposed_status: proposed.status,
        }
    }
}

/// Runs both controllers of `cmp` at plant resistance `c`.
pub fn sweep_row(base: &ScenarioConfig, c: f64, cmp: Comparison) -> Result<SweepRow> {
    let conv = run_with(&base.clone().with_resistance(c).with_mode(cmp.conventional), |_| {})?;
    let prop = run_with(&base.clone().with_resistance(c).with_mode(cmp.proposed), |_| {})?;
    Ok(SweepRow::from_runs(c, base.controller.nominal_resistance, &conv, &prop))
}

/// Sequential sweep over plant resistances.
pub fn sweep(base: &ScenarioConfig, c_values: &[f64], cmp: Comparison) -> Result<SweepResult> {
    validate_sweep(base, c_values)?;
    let rows = c_values.iter().map(|&c| sweep_row(base, c, cmp)).collect::<Result<Vec<_>>>()?;
    Ok(SweepResult::from_rows(rows))
}

/// Checks the inputs of a sweep up front so that no row can fail on
/// configuration grounds.
pub fn validate_sweep(base: &ScenarioConfig, c_values: &[f64]) -> Result<()> {
    if c_values.is_empty() {
        return Err(Error::EmptySweep);
    }
    if base.controller.nominal_resistance <= 0.0 {
        return Err(invalid("C_M", "must be positive for a C/C_M sweep"));
    }
    for &c in c_values {
        base.clone().with_resistance(c).validate()?;
    }
    Ok(())
}
