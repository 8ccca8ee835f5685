//! Classical fixed-step Runge–Kutta integration over fixed-size state arrays.

/// Advances `x` from `t` to `t + h` with the classical four-stage RK4 scheme.
///
/// The derivative callback may fail; the first failing stage aborts the step
/// and its error is returned unchanged.
pub fn rk4_step<const N: usize, E, F>(t: f64, x: &[f64; N], h: f64, mut f: F) -> Result<[f64; N], E>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N], E>,
{
    let k1 = f(t, x)?;
    let k2 = f(t + 0.5 * h, &axpy(x, 0.5 * h, &k1))?;
    let k3 = f(t + 0.5 * h, &axpy(x, 0.5 * h, &k2))?;
    let k4 = f(t + h, &axpy(x, h, &k3))?;

    let mut next = *x;
    for i in 0..N {
        next[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    Ok(next)
}

#[inline]
fn axpy<const N: usize>(x: &[f64; N], a: f64, y: &[f64; N]) -> [f64; N] {
    let mut out = *x;
    for i in 0..N {
        out[i] += a * y[i];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::convert::Infallible;

    fn decay(rate: f64) -> impl FnMut(f64, &[f64; 1]) -> Result<[f64; 1], Infallible> {
        move |_, x| Ok([-rate * x[0]])
    }

    /// RK4 applied to `x' = -r x` multiplies by the degree-4 Taylor
    /// polynomial of `exp(-r h)` every step.
    fn taylor4(rho: f64) -> f64 {
        1.0 - rho + rho * rho / 2.0 - rho * rho * rho / 6.0 + rho * rho * rho * rho / 24.0
    }

    #[test]
    fn single_step_matches_exponential_to_fifth_order() {
        // C v = 600 at dt = 1 ms; alternating series bounds the local error.
        let rate = 600.0;
        let dt = 1e-3;
        let x = rk4_step(0.0, &[1.0], dt, decay(rate)).unwrap();
        let err = (x[0] - libm::exp(-rate * dt)).abs();
        let bound = libm::pow(rate * dt, 5.0) / 120.0;
        assert!(err < bound, "err {err} bound {bound}");
        assert!((x[0] - taylor4(rate * dt)).abs() < 1e-15);
    }

    #[test]
    fn decay_over_many_steps_is_accurate() {
        let rate = 600.0;
        let dt = 1e-4;
        let mut x = [0.1];
        let n = 1000;
        for i in 0..n {
            x = rk4_step(i as f64 * dt, &x, dt, decay(rate)).unwrap();
        }
        let discrete = 0.1 * libm::pow(taylor4(rate * dt), n as f64);
        assert!(((x[0] - discrete) / discrete).abs() < 1e-12);
        let exact = 0.1 * libm::exp(-rate * dt * n as f64);
        assert!(((x[0] - exact) / exact).abs() < 1e-5);
    }

    #[test]
    fn stage_error_aborts_step() {
        let mut calls = 0;
        let r: Result<[f64; 1], &str> = rk4_step(0.0, &[1.0], 0.1, |_, _| {
            calls += 1;
            if calls == 2 { Err("boom") } else { Ok([1.0]) }
        });
        assert_eq!(r, Err("boom"));
        assert_eq!(calls, 2);
    }

    #[test]
    fn integrates_polynomial_in_time_exactly() {
        // x' = t^3 is integrated exactly by Simpson weights.
        let x = rk4_step(1.0, &[0.0], 0.5, |t, _| Ok::<_, Infallible>([t * t * t])).unwrap();
        let exact = (1.5f64.powi(4) - 1.0) / 4.0;
        assert!((x[0] - exact).abs() < 1e-14);
    }
}
