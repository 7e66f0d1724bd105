//! Simpson quadrature: an adaptive rule with Richardson error control and a
//! fixed-panel composite rule for short subintervals.

use core::fmt;

use crate::math;

/// Quadrature failure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QuadError {
    /// Recursion depth exhausted; `achieved` is the local error estimate
    /// that could not be pushed below tolerance.
    ToleranceNotMet { achieved: f64 },
    /// Integrand returned a non-finite value at `x`.
    NonFinite { x: f64 },
}

impl fmt::Display for QuadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuadError::ToleranceNotMet { achieved } => {
                write!(
                    f,
                    "quadrature tolerance not met (error estimate {})",
                    achieved
                )
            }
            QuadError::NonFinite { x } => write!(f, "integrand non-finite at x = {}", x),
        }
    }
}

impl core::error::Error for QuadError {}

#[inline]
fn simpson(fa: f64, fm: f64, fb: f64, width: f64) -> f64 {
    width * (fa + 4.0 * fm + fb) / 6.0
}

fn eval<F: Fn(f64) -> f64>(f: &F, x: f64) -> Result<f64, QuadError> {
    let v = f(x);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(QuadError::NonFinite { x })
    }
}

struct Split {
    value: f64,
    error: f64,
}

fn refine<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<Split, QuadError> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = eval(f, lm)?;
    let frm = eval(f, rm)?;
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let delta = left + right - whole;
    // the two-panel rule gains a factor 16; delta/15 estimates its error
    if math::abs(delta) <= 15.0 * tol || b - a < 1e-14 * (1.0 + math::abs(a)) {
        return Ok(Split {
            value: left + right + delta / 15.0,
            error: math::abs(delta) / 15.0,
        });
    }
    if depth == 0 {
        return Err(QuadError::ToleranceNotMet {
            achieved: math::abs(delta) / 15.0,
        });
    }
    let l = refine(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?;
    let r = refine(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?;
    Ok(Split {
        value: l.value + r.value,
        error: l.error + r.error,
    })
}

/// Adaptive Simpson integration of `f` over `[a, b]` to absolute tolerance
/// `tol`. Returns the value and an accumulated error estimate.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
    max_depth: u32,
) -> Result<(f64, f64), QuadError> {
    if a == b {
        return Ok((0.0, 0.0));
    }
    let fa = eval(&f, a)?;
    let fb = eval(&f, b)?;
    let m = 0.5 * (a + b);
    let fm = eval(&f, m)?;
    let whole = simpson(fa, fm, fb, b - a);
    let split = refine(&f, a, b, fa, fm, fb, whole, tol, max_depth)?;
    Ok((split.value, split.error))
}

/// Composite Simpson rule with `panels` equal panels (midpoint form), no
/// adaptivity. Exact for cubics on each panel.
pub fn composite_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: u32) -> f64 {
    debug_assert!(panels >= 1);
    let h = (b - a) / panels as f64;
    let mut sum = 0.0;
    let mut right = f(a);
    for i in 0..panels {
        let left = right;
        let x0 = a + i as f64 * h;
        let mid = f(x0 + 0.5 * h);
        right = f(x0 + h);
        sum += simpson(left, mid, right, h);
    }
    sum
}
