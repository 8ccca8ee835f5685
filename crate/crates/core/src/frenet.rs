//! Reference-point error dynamics and inertial pose kinematics.
//!
//! `FrenetState` follows the orthogonal projection of the vehicle onto the
//! path: heading error `theta`, projection arc length `s_r` and signed offset
//! `z` (positive on the left of the path tangent). The dynamics only exist
//! while `1 - kappa_r z > 0`.

use crate::math::{cos, sin};

/// Default margin for the existence condition `1 - kappa_r z > margin`.
pub const DEFAULT_EXISTENCE_MARGIN: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FrenetState {
    /// Heading error `theta_o - theta_r(s_r)` [rad].
    pub theta: f64,
    /// Arc length of the reference point [m].
    pub s_r: f64,
    /// Signed cross-track offset [m].
    pub z: f64,
}

impl FrenetState {
    pub const fn new(theta: f64, s_r: f64, z: f64) -> Self {
        Self { theta, s_r, z }
    }

    pub fn is_finite(&self) -> bool {
        self.theta.is_finite() && self.s_r.is_finite() && self.z.is_finite()
    }
}

/// Position and velocity-vector orientation in the inertial frame.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GlobalPose {
    pub xi: f64,
    pub eta: f64,
    pub theta_o: f64,
}

impl GlobalPose {
    pub const fn new(xi: f64, eta: f64, theta_o: f64) -> Self {
        Self { xi, eta, theta_o }
    }

    pub fn is_finite(&self) -> bool {
        self.xi.is_finite() && self.eta.is_finite() && self.theta_o.is_finite()
    }
}

/// The reference point ceased to exist: `1 - kappa_r z` fell to the margin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Singularity {
    pub denominator: f64,
}

/// `true` iff `1 - kappa_r z > margin`.
pub fn check_existence(kappa_r: f64, z: f64, margin: f64) -> bool {
    1.0 - kappa_r * z > margin
}

/// `(theta_dot, s_r_dot, z_dot)` for vehicle curvature `kappa` and path
/// curvature `kappa_r` at the reference point.
pub fn frenet_derivative(
    kappa: f64,
    kappa_r: f64,
    v: f64,
    f: &FrenetState,
    margin: f64,
) -> Result<FrenetState, Singularity> {
    let denominator = 1.0 - kappa_r * f.z;
    if denominator <= margin {
        return Err(Singularity { denominator });
    }
    let s_r_dot = v * cos(f.theta) / denominator;
    Ok(FrenetState {
        theta: kappa * v - kappa_r * s_r_dot,
        s_r: s_r_dot,
        z: v * sin(f.theta),
    })
}

/// `(xi_dot, eta_dot, theta_o_dot)`.
pub fn pose_derivative(v: f64, kappa: f64, g: &GlobalPose) -> GlobalPose {
    GlobalPose {
        xi: v * cos(g.theta_o),
        eta: v * sin(g.theta_o),
        theta_o: kappa * v,
    }
}
