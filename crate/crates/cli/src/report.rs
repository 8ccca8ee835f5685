//! CSV, JSON and markdown renderers. All of them build strings; writing is
//! left to the caller.

use std::fmt::Write as _;

use mecpath_core::path::PathPoint;
use mecpath_core::sim::{FollowingError, RunSummary, SimSample, SweepResult};
use mecpath_core::TargetPath;
use serde::Serialize;

use crate::scenario::ScenarioFile;

pub const TIMESERIES_HEADER: &str =
    "t,s_r,z,theta,beta,psi_dot,delta,z_M,theta_M,u,u_M,u_c,kappa,kappa_r,xi,eta,theta_o";

pub const SWEEP_HEADER: &str = "C,C_over_CM,conventional_max_error,proposed_max_error";

pub const PATH_HEADER: &str = "s,xi_r,eta_r,theta_r,kappa_r";

/// Token used in place of a number for diverged runs.
pub const DIVERGED: &str = "Diverged";

fn sci(out: &mut String, x: f64) {
    let _ = write!(out, "{x:.16e}");
}

fn row(out: &mut String, values: &[f64]) {
    for (i, &v) in values.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        sci(out, v);
    }
    out.push('\n');
}

pub fn timeseries_csv(samples: &[SimSample]) -> String {
    let mut out = String::with_capacity(samples.len() * 17 * 24 + 128);
    out.push_str(TIMESERIES_HEADER);
    out.push('\n');
    for s in samples {
        let (p, f, m) = (s.plant, s.plant_frenet, s.model_frenet);
        row(
            &mut out,
            &[
                s.t, f.s_r, f.z, f.theta, p.beta, p.psi_dot, p.delta, m.z, m.theta, s.u, s.u_model, s.u_comp, s.kappa,
                s.kappa_r, s.pose.xi, s.pose.eta, s.pose.theta_o,
            ],
        );
    }
    out
}

pub fn path_csv(path: &TargetPath, points: &[PathPoint]) -> String {
    let mut out = String::with_capacity(points.len() * 5 * 24 + 64);
    out.push_str(PATH_HEADER);
    out.push('\n');
    for p in points {
        let (k, _) = path.curvature_clamped(p.s);
        row(&mut out, &[p.s, p.xi, p.eta, p.theta, k]);
    }
    out
}

fn error_cell(e: FollowingError) -> String {
    match e {
        FollowingError::Value(v) => format!("{v:.16e}"),
        FollowingError::Diverged => DIVERGED.to_string(),
    }
}

pub fn sweep_csv(result: &SweepResult) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for r in &result.rows {
        let _ = writeln!(out, "{},{},{},{}", r.resistance, r.ratio, error_cell(r.conventional), error_cell(r.proposed));
    }
    out
}

/// Table layout: one row per `C` with both controllers' maximum errors.
pub fn sweep_markdown(result: &SweepResult, conventional: &str, proposed: &str) -> String {
    let cell = |e: FollowingError| match e {
        FollowingError::Value(v) => format!("{v:.2}"),
        FollowingError::Diverged => DIVERGED.to_string(),
    };
    let mut out = String::new();
    let _ = writeln!(out, "| C | C/C_M | Conventional ({conventional}) [m] | Proposed ({proposed}) [m] |");
    out.push_str("|---:|---:|---:|---:|\n");
    for r in &result.rows {
        let _ = writeln!(out, "| {} | {:.2} | {} | {} |", r.resistance, r.ratio, cell(r.conventional), cell(r.proposed));
    }
    out
}

#[derive(Debug, Serialize)]
#[serde(untagged)]
pub enum ErrorValue {
    Value(f64),
    Token(&'static str),
}

impl From<FollowingError> for ErrorValue {
    fn from(e: FollowingError) -> Self {
        match e {
            FollowingError::Value(v) => ErrorValue::Value(v),
            FollowingError::Diverged => ErrorValue::Token(DIVERGED),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SummaryRecord<'a> {
    pub status: &'static str,
    /// `null` when no sample reached the metric onset.
    pub max_error: Option<ErrorValue>,
    pub max_error_raw: f64,
    pub final_s_r: f64,
    pub final_time: f64,
    pub steps: usize,
    pub wall_clock_s: f64,
    pub config: &'a ScenarioFile,
}

impl<'a> SummaryRecord<'a> {
    pub fn new(summary: &RunSummary, wall_clock_s: f64, config: &'a ScenarioFile) -> Self {
        Self {
            status: summary.status.as_str(),
            max_error: summary.max_error.map(ErrorValue::from),
            max_error_raw: summary.max_error_raw,
            final_s_r: summary.final_s_r,
            final_time: summary.final_time,
            steps: summary.steps,
            wall_clock_s,
            config,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes") + "\n"
    }
}
