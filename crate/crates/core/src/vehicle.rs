//! Three-state lateral vehicle model with first-order steering resistance.
//!
//! States are sideslip `beta`, yaw rate `psi_dot` and steering angle `delta`;
//! the input is a steering-rate command `u` opposed by `C v delta`.

use core::ops::{Add, Mul};

use crate::error::invalid;
use crate::Result;

/// Coefficients of the lateral model at constant speed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VehicleParams {
    pub a11: f64,
    pub a12: f64,
    pub a13: f64,
    pub a21: f64,
    pub a22: f64,
    pub a23: f64,
    /// Forward speed `v` [m/s].
    pub speed: f64,
    /// Steering-resistance coefficient `C` [1/m].
    pub resistance: f64,
    /// Wheelbase [m]. Carried as metadata; no equation uses it.
    pub wheelbase: f64,
}

impl Default for VehicleParams {
    /// Reference vehicle at 3 m/s with `C = 200`.
    ///
    /// `a11` is negative: with `+79.5` the zero dynamics of the tracking law
    /// have an eigenvalue near `+1.95 1/s` and no closed-loop run survives.
    fn default() -> Self {
        Self {
            a11: -79.5,
            a12: 12.4,
            a13: 30.1,
            a21: 8.48,
            a22: -88.4,
            a23: 29.4,
            speed: 3.0,
            resistance: 200.0,
            wheelbase: 2.55,
        }
    }
}

impl VehicleParams {
    pub fn with_resistance(self, resistance: f64) -> Self {
        Self { resistance, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let coeffs = [self.a11, self.a12, self.a13, self.a21, self.a22, self.a23, self.wheelbase];
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(invalid("vehicle", "coefficients must be finite"));
        }
        if !(self.speed.is_finite() && self.speed > 0.0) {
            return Err(invalid("v", "speed must be positive"));
        }
        if self.a13 == 0.0 {
            return Err(invalid("a13", "must be non-zero"));
        }
        if !(self.resistance.is_finite() && self.resistance >= 0.0) {
            return Err(invalid("C", "resistance coefficient must be >= 0"));
        }
        Ok(())
    }

    /// `a11 beta + (a12 / v) psi_dot + a13 delta`, i.e. `kappa v^2`.
    ///
    /// This combination appears in every term of the tracking law.
    #[inline]
    pub fn lateral_drive(&self, x: &VehicleState) -> f64 {
        self.a11 * x.beta + self.a12 / self.speed * x.psi_dot + self.a13 * x.delta
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct VehicleState {
    /// Sideslip angle [rad].
    pub beta: f64,
    /// Yaw rate [rad/s].
    pub psi_dot: f64,
    /// Steering angle [rad].
    pub delta: f64,
}

impl VehicleState {
    pub const fn new(beta: f64, psi_dot: f64, delta: f64) -> Self {
        Self { beta, psi_dot, delta }
    }

    pub fn is_finite(&self) -> bool {
        self.beta.is_finite() && self.psi_dot.is_finite() && self.delta.is_finite()
    }

    pub(crate) fn to_array(self) -> [f64; 3] {
        [self.beta, self.psi_dot, self.delta]
    }

    pub(crate) fn from_slice(x: &[f64]) -> Self {
        Self::new(x[0], x[1], x[2])
    }
}

impl Add for VehicleState {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.beta + o.beta, self.psi_dot + o.psi_dot, self.delta + o.delta)
    }
}

impl Mul<f64> for VehicleState {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        Self::new(self.beta * k, self.psi_dot * k, self.delta * k)
    }
}

/// Time derivative `(beta_dot, psi_ddot, delta_dot)` under steering command `u`.
pub fn plant_derivative(p: &VehicleParams, x: &VehicleState, u: f64) -> VehicleState {
    let v = p.speed;
    VehicleState {
        beta: p.a11 / v * x.beta + (-1.0 + p.a12 / (v * v)) * x.psi_dot + p.a13 / v * x.delta,
        psi_dot: p.a21 * x.beta + p.a22 / v * x.psi_dot + p.a23 * x.delta,
        delta: u - p.resistance * v * x.delta,
    }
}

/// Curvature of the path driven by the vehicle [1/m].
pub fn trajectory_curvature(p: &VehicleParams, x: &VehicleState) -> f64 {
    p.lateral_drive(x) / (p.speed * p.speed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn published() -> VehicleParams {
        VehicleParams { a11: 79.5, ..VehicleParams::default() }
    }

    #[test]
    fn origin_is_equilibrium() {
        let d = plant_derivative(&VehicleParams::default(), &VehicleState::default(), 0.0);
        assert_eq!(d, VehicleState::default());
    }

    #[test]
    fn steering_only_derivative() {
        let d = plant_derivative(&published(), &VehicleState::new(0.0, 0.0, 0.1), 0.0);
        assert!((d.beta - 30.1 / 3.0 * 0.1).abs() < 1e-12);
        assert!((d.beta - 1.003_333).abs() < 1e-6);
        assert!((d.psi_dot - 2.94).abs() < 1e-12);
        assert!((d.delta + 60.0).abs() < 1e-12);
    }

    #[test]
    fn zero_resistance_passes_command_through() {
        let p = VehicleParams::default().with_resistance(0.0);
        let d = plant_derivative(&p, &VehicleState::new(0.2, -0.4, 0.3), 1.75);
        assert_eq!(d.delta, 1.75);
    }

    #[test]
    fn curvature_examples() {
        let p = published();
        assert_eq!(trajectory_curvature(&p, &VehicleState::default()), 0.0);
        let k = trajectory_curvature(&p, &VehicleState::new(0.01, 0.1, 0.05));
        let by_hand = 79.5 / 9.0 * 0.01 + 12.4 / 27.0 * 0.1 + 30.1 / 9.0 * 0.05;
        assert!((k - by_hand).abs() < 1e-15);
        assert!((k - 0.301_48).abs() < 1e-5);
    }

    #[test]
    fn validation() {
        assert!(VehicleParams::default().validate().is_ok());
        assert!(VehicleParams { speed: 0.0, ..Default::default() }.validate().is_err());
        assert!(VehicleParams { a13: 0.0, ..Default::default() }.validate().is_err());
        assert!(VehicleParams::default().with_resistance(-1.0).validate().is_err());
        assert!(VehicleParams { a22: f64::NAN, ..Default::default() }.validate().is_err());
    }

    #[test]
    fn steering_decay_matches_exponential() {
        // u = 0 decouples delta: delta(t) = delta0 exp(-C v t), C v = 600.
        let p = VehicleParams::default();
        let dt = 1e-3;
        let mut x = VehicleState::new(0.0, 0.0, 0.1);
        for _ in 0..10 {
            x = crate::ode::rk4_step(0.0, &x.to_array(), dt, |_, y| {
                Ok::<_, core::convert::Infallible>(plant_derivative(&p, &VehicleState::from_slice(y), 0.0).to_array())
            })
            .map(|y| VehicleState::from_slice(&y))
            .unwrap();
        }
        // Per step RK4 multiplies by the degree-4 Taylor polynomial of exp(-0.6).
        let r = 0.6f64;
        let factor = 1.0 - r + r * r / 2.0 - r * r * r / 6.0 + r * r * r * r / 24.0;
        let discrete = 0.1 * libm::pow(factor, 10.0);
        assert!(((x.delta - discrete) / discrete).abs() < 1e-12, "{} vs {discrete}", x.delta);
        let exact = 0.1 * libm::exp(-6.0);
        assert!(((x.delta - exact) / exact).abs() < 2e-2);
    }

    fn state() -> impl Strategy<Value = VehicleState> {
        (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b, c)| VehicleState::new(a, b, c))
    }

    proptest! {
        #[test]
        fn derivative_is_linear(x in state(), u in -5.0f64..5.0, lambda in -3.0f64..3.0) {
            let p = VehicleParams::default();
            let lhs = plant_derivative(&p, &(x * lambda), lambda * u);
            let rhs = plant_derivative(&p, &x, u) * lambda;
            for (a, b) in lhs.to_array().iter().zip(rhs.to_array()) {
                prop_assert!((a - b).abs() <= 1e-9 * (1.0 + b.abs()));
            }
            let k = trajectory_curvature(&p, &(x * lambda));
            prop_assert!((k - lambda * trajectory_curvature(&p, &x)).abs() < 1e-9);
        }

        #[test]
        fn known_resistance_is_cancelled(x in state(), u0 in -5.0f64..5.0, c1 in 0.0f64..500.0, c2 in 0.0f64..500.0) {
            let base = VehicleParams::default();
            let v = base.speed;
            let a = plant_derivative(&base.with_resistance(c1), &x, u0 + c1 * v * x.delta);
            let b = plant_derivative(&base.with_resistance(c2), &x, u0 + c2 * v * x.delta);
            prop_assert_eq!(a.beta, b.beta);
            prop_assert_eq!(a.psi_dot, b.psi_dot);
            prop_assert!((a.delta - b.delta).abs() < 1e-9);
        }
    }
}
