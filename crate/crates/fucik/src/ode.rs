//! Adaptive Dormand–Prince 5(4) integration with rising-threshold events.
//!
//! The embedded pair gives a fifth-order solution with a fourth-order error
//! estimate at six derivative evaluations per step (FSAL: the seventh stage
//! is the first stage of the next step). Step size is governed by PI control.
//! An optional event stops integration where component 0 rises through a
//! level; the crossing is located by a safeguarded secant iteration on
//! single-RK-substep evaluations from the accepted step's left endpoint.

use core::fmt;

use crate::math;

/// Integration failure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OdeError {
    /// Step size shrank below the floor near `x` without meeting tolerances.
    StepSizeUnderflow { x: f64 },
    /// State or derivative became non-finite near `x`.
    NonFiniteState { x: f64 },
    /// Accepted-step budget exhausted before reaching the end.
    StepLimit { x: f64 },
}

impl fmt::Display for OdeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OdeError::StepSizeUnderflow { x } => write!(f, "step size underflow at x = {}", x),
            OdeError::NonFiniteState { x } => write!(f, "non-finite state at x = {}", x),
            OdeError::StepLimit { x } => write!(f, "step limit exceeded at x = {}", x),
        }
    }
}

impl core::error::Error for OdeError {}

/// What ended the integration.
#[derive(Debug, Clone, Copy)]
pub enum Outcome<const N: usize> {
    /// Reached the right endpoint with this state.
    Completed { y: [f64; N] },
    /// Component 0 rose through the event level at `x`; `y[0]` sits at the
    /// located crossing (callers may snap it exactly).
    Event { x: f64, y: [f64; N] },
}

/// Dormand–Prince 5(4) driver.
#[derive(Debug, Clone, Copy)]
pub struct Integrator {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Absolute x-tolerance for event location.
    pub event_x_tol: f64,
    /// Cap on the step size (used to force dense path sampling).
    pub max_step: f64,
    pub max_steps: usize,
}

impl Default for Integrator {
    fn default() -> Self {
        Integrator {
            rel_tol: 1e-10,
            abs_tol: 1e-10,
            event_x_tol: 1e-12,
            max_step: f64::INFINITY,
            max_steps: 10_000_000,
        }
    }
}

// Butcher tableau.
const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
// Fifth-order weights (also the seventh stage row).
const B: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];
// b5 - b4: error estimator weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

#[inline]
fn axpy<const N: usize>(y: &[f64; N], h: f64, coeffs: &[f64], ks: &[[f64; N]]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in coeffs.iter().zip(ks.iter()) {
        if *c != 0.0 {
            for i in 0..N {
                out[i] += h * c * k[i];
            }
        }
    }
    out
}

/// One trial step: fifth-order solution, FSAL stage, and error vector.
struct Trial<const N: usize> {
    y5: [f64; N],
    k7: [f64; N],
    err: [f64; N],
}

impl Integrator {
    fn trial_step<const N: usize, F>(
        &self,
        f: &F,
        x: f64,
        y: &[f64; N],
        k1: &[f64; N],
        h: f64,
    ) -> Trial<N>
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
    {
        let k2 = f(x + C[0] * h, &axpy(y, h, &A2, &[*k1]));
        let k3 = f(x + C[1] * h, &axpy(y, h, &A3, &[*k1, k2]));
        let k4 = f(x + C[2] * h, &axpy(y, h, &A4, &[*k1, k2, k3]));
        let k5 = f(x + C[3] * h, &axpy(y, h, &A5, &[*k1, k2, k3, k4]));
        let k6 = f(x + C[4] * h, &axpy(y, h, &A6, &[*k1, k2, k3, k4, k5]));
        let y5 = axpy(y, h, &B, &[*k1, k2, k3, k4, k5, k6]);
        let k7 = f(x + h, &y5);
        let all = [*k1, k2, k3, k4, k5, k6, k7];
        let mut err = [0.0; N];
        for (c, k) in E.iter().zip(all.iter()) {
            for i in 0..N {
                err[i] += h * c * k[i];
            }
        }
        Trial { y5, k7, err }
    }

    /// Fifth-order state after a sub-step of size `s` from the same origin.
    fn substate<const N: usize, F>(
        &self,
        f: &F,
        x: f64,
        y: &[f64; N],
        k1: &[f64; N],
        s: f64,
    ) -> [f64; N]
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
    {
        let k2 = f(x + C[0] * s, &axpy(y, s, &A2, &[*k1]));
        let k3 = f(x + C[1] * s, &axpy(y, s, &A3, &[*k1, k2]));
        let k4 = f(x + C[2] * s, &axpy(y, s, &A4, &[*k1, k2, k3]));
        let k5 = f(x + C[3] * s, &axpy(y, s, &A5, &[*k1, k2, k3, k4]));
        let k6 = f(x + C[4] * s, &axpy(y, s, &A6, &[*k1, k2, k3, k4, k5]));
        axpy(y, s, &B, &[*k1, k2, k3, k4, k5, k6])
    }

    fn error_norm<const N: usize>(&self, y: &[f64; N], y5: &[f64; N], err: &[f64; N]) -> f64 {
        let mut sum = 0.0;
        for i in 0..N {
            let scale = self.abs_tol + self.rel_tol * math::abs(y[i]).max(math::abs(y5[i]));
            let r = err[i] / scale;
            sum += r * r;
        }
        math::sqrt(sum / N as f64)
    }

    /// Locates the rising crossing of `level` by component 0 inside an
    /// accepted step of size `h` (the step end is already at or above the
    /// level). Returns the crossing x and the state there.
    fn locate_event<const N: usize, F>(
        &self,
        f: &F,
        x: f64,
        y: &[f64; N],
        k1: &[f64; N],
        h: f64,
        level: f64,
        y_end: &[f64; N],
    ) -> (f64, [f64; N])
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
    {
        let mut a = 0.0;
        let mut fa = y[0] - level;
        let mut b = h;
        let mut fb = y_end[0] - level;
        let mut yb = *y_end;
        if fa >= 0.0 {
            // already at the level when the segment started; degenerate
            return (x, *y);
        }
        while b - a > self.event_x_tol {
            // secant proposal, safeguarded into the middle 96% of the bracket
            let mut s = if fb != fa {
                b - fb * (b - a) / (fb - fa)
            } else {
                0.5 * (a + b)
            };
            let lo = a + 0.02 * (b - a);
            let hi = b - 0.02 * (b - a);
            if !(s > lo && s < hi) {
                s = 0.5 * (a + b);
            }
            let ys = self.substate(f, x, y, k1, s);
            let fs = ys[0] - level;
            if fs < 0.0 {
                a = s;
                fa = fs;
            } else {
                b = s;
                fb = fs;
                yb = ys;
            }
        }
        (x + b, yb)
    }

    /// Integrates y' = f(x, y) from (x0, y0) to x1. If `event_level` is set,
    /// stops where y[0] rises through it. `record` sees every accepted step
    /// strictly before the event.
    pub fn run<const N: usize, F, R>(
        &self,
        f: F,
        x0: f64,
        y0: [f64; N],
        x1: f64,
        event_level: Option<f64>,
        mut record: R,
    ) -> Result<Outcome<N>, OdeError>
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
        R: FnMut(f64, &[f64; N]),
    {
        let mut x = x0;
        let mut y = y0;
        let mut k1 = f(x, &y);
        if !finite(&y) || !finite(&k1) {
            return Err(OdeError::NonFiniteState { x });
        }

        // first step: a small fraction of the leading component's own scale
        let scale0 = (1.0 + math::abs(y[0])) / (math::abs(k1[0]) + 1e-12);
        let mut h = (0.01 * scale0).min(x1 - x0).min(self.max_step);
        let mut err_prev: f64 = 1.0;
        let mut just_rejected = false;
        let mut steps = 0usize;

        loop {
            if x >= x1 {
                return Ok(Outcome::Completed { y });
            }
            let floor = 1e-14 * (1.0 + math::abs(x));
            if x1 - x <= floor {
                return Ok(Outcome::Completed { y });
            }
            h = h.min(x1 - x).min(self.max_step);
            if h < floor {
                return Err(OdeError::StepSizeUnderflow { x });
            }

            let trial = self.trial_step(&f, x, &y, &k1, h);
            if !finite(&trial.y5) || !finite(&trial.k7) {
                return Err(OdeError::NonFiniteState { x });
            }
            let err = self.error_norm(&y, &trial.y5, &trial.err).max(1e-12);

            if err > 1.0 {
                h *= (0.9 * math::powf(err, -0.2)).max(0.2);
                just_rejected = true;
                continue;
            }

            if let Some(level) = event_level {
                if trial.y5[0] >= level {
                    let (xe, ye) = self.locate_event(&f, x, &y, &k1, h, level, &trial.y5);
                    return Ok(Outcome::Event { x: xe, y: ye });
                }
            }

            x += h;
            y = trial.y5;
            k1 = trial.k7;
            record(x, &y);

            steps += 1;
            if steps >= self.max_steps {
                return Err(OdeError::StepLimit { x });
            }

            let facmax = if just_rejected { 1.0 } else { 5.0 };
            just_rejected = false;
            let fac = 0.9 * math::powf(err, -0.14) * math::powf(err_prev, 0.08);
            h *= fac.clamp(0.2, facmax);
            err_prev = err;
        }
    }
}

#[inline]
fn finite<const N: usize>(v: &[f64; N]) -> bool {
    v.iter().all(|c| c.is_finite())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let ig = Integrator::default();
        let out = ig
            .run(|_, y: &[f64; 1]| [-y[0]], 0.0, [1.0], 1.0, None, |_, _| {})
            .unwrap();
        match out {
            Outcome::Completed { y } => {
                assert!((y[0] - f64::exp(-1.0)).abs() < 1e-9, "{}", y[0]);
            }
            _ => panic!("unexpected event"),
        }
    }

    #[test]
    fn two_components() {
        // y0' = y1, y1' = -y0: a circle; after 2π back to the start
        let ig = Integrator {
            rel_tol: 1e-12,
            abs_tol: 1e-12,
            ..Integrator::default()
        };
        let tau = 2.0 * core::f64::consts::PI;
        let out = ig
            .run(
                |_, y: &[f64; 2]| [y[1], -y[0]],
                0.0,
                [1.0, 0.0],
                tau,
                None,
                |_, _| {},
            )
            .unwrap();
        match out {
            Outcome::Completed { y } => {
                assert!((y[0] - 1.0).abs() < 1e-8);
                assert!(y[1].abs() < 1e-8);
            }
            _ => panic!("unexpected event"),
        }
    }

    #[test]
    fn event_location_is_tight() {
        // y' = 1 + 0.3 sin(8x); crossing of level 1 solves x + 0.3(1-cos 8x)/8 = 1
        let ig = Integrator::default();
        let f = |x: f64, _y: &[f64; 1]| [1.0 + 0.3 * f64::sin(8.0 * x)];
        let out = ig.run(f, 0.0, [0.0], 2.0, Some(1.0), |_, _| {}).unwrap();
        match out {
            Outcome::Event { x, y } => {
                let residual = x + 0.3 * (1.0 - f64::cos(8.0 * x)) / 8.0 - 1.0;
                assert!(residual.abs() < 1e-10, "residual {}", residual);
                assert!((y[0] - 1.0).abs() < 1e-10);
            }
            _ => panic!("event missed"),
        }
    }

    #[test]
    fn max_step_forces_dense_sampling() {
        let ig = Integrator {
            max_step: 0.01,
            ..Integrator::default()
        };
        let mut count = 0;
        ig.run(
            |_, _: &[f64; 1]| [1.0],
            0.0,
            [0.0],
            1.0,
            None,
            |_, _| count += 1,
        )
        .unwrap();
        assert!(count >= 100, "{count}");
    }

    #[test]
    fn non_finite_rhs_is_reported() {
        let ig = Integrator::default();
        let res = ig.run(
            |x: f64, _: &[f64; 1]| [(0.25 - x).sqrt()],
            0.0,
            [0.0],
            1.0,
            None,
            |_, _| {},
        );
        assert!(matches!(res, Err(OdeError::NonFiniteState { .. })));
    }
}
