//! Robust path following for a three-state vehicle model with uncertain
//! steering resistance.
//!
//! The crate is `no_std` (it needs `alloc` for paths and time series). It
//! contains the whole numerical pipeline:
//!
//! * [`path`]: curvature-parameterized target paths and their inertial-frame
//!   reconstruction.
//! * [`vehicle`]: sideslip / yaw-rate / steering-angle plant with the
//!   `u - C v delta` resistance term.
//! * [`frenet`]: reference-point error dynamics and inertial pose kinematics.
//! * [`controller`]: feedback-linearizing tracking law and the model error
//!   compensator.
//! * [`sim`]: fixed-step RK4 integration of the coupled plant/model system,
//!   divergence classification, error metric and parameter sweeps.
//!
//! Enable the `std` feature for `std::error::Error` impls.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

mod error;
mod math;

pub mod controller;
pub mod frenet;
pub mod ode;
pub mod path;
pub mod sim;
pub mod vehicle;

pub use controller::{ControlMode, ControllerConfig, ControllerGains};
pub use error::Error;
pub use frenet::{FrenetState, GlobalPose};
pub use path::{PathId, PathPoint, TargetPath};
pub use sim::{FollowingError, RunResult, RunStatus, ScenarioConfig, SweepResult};
pub use vehicle::{VehicleParams, VehicleState};

pub type Result<T, E = Error> = core::result::Result<T, E>;
