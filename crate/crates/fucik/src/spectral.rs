//! Spectral counting, curve tracing, Weyl asymptotics, and regularity
//! diagnostics built on the angle integration.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::eigen::{eigenvalue, SolveError};
use crate::expr::WeightExpr;
use crate::math;
use crate::prufer::{advance_angle, start_angle, Bc, Problem, Sign, ToleranceConfig};
use crate::quad::{adaptive_simpson, composite_simpson};

/// Eigenvalue counts at or below a fixed λ on the ray β = tα.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountResult {
    pub lambda: f64,
    pub t: f64,
    pub n_plus: u32,
    pub n_minus: u32,
    pub total: u32,
}

fn floor_nudged(v: f64) -> i64 {
    math::floor(v + 1e-9 * (1.0 + math::abs(v))) as i64
}

fn check_lambda_t(lambda: f64, t: f64) -> Result<(), SolveError> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(SolveError::InvalidArgument(
            "lambda must be positive and finite",
        ));
    }
    if !(t.is_finite() && t > 0.0) {
        return Err(SolveError::InvalidArgument("t must be positive and finite"));
    }
    Ok(())
}

/// Counts each family's eigenvalues at or below λ on a subinterval of the
/// problem's domain, with the given endpoint conditions, from the angle swept
/// by a single shot. The weights are still evaluated at the original
/// coordinates, so cutting the interval does not reparametrise them.
pub fn count_on(
    problem: &Problem,
    lambda: f64,
    t: f64,
    x0: f64,
    x1: f64,
    bc_left: Bc,
    bc_right: Bc,
    tol: &ToleranceConfig,
) -> Result<CountResult, SolveError> {
    check_lambda_t(lambda, t)?;
    tol.validate().map_err(SolveError::InvalidArgument)?;
    let off = match bc_right {
        Bc::Dirichlet => 0.0,
        Bc::Neumann => 0.5,
    };
    let mut counts = [0u32; 2];
    for (slot, sign) in [Sign::Plus, Sign::Minus].into_iter().enumerate() {
        let phi0 = start_angle(bc_left, sign);
        let adv = advance_angle(problem, lambda, t, phi0, x0, x1, tol, None)?;
        let n = floor_nudged(adv.terminal / PI + off) - floor_nudged(phi0 / PI + off);
        counts[slot] = n.max(0) as u32;
    }
    Ok(CountResult {
        lambda,
        t,
        n_plus: counts[0],
        n_minus: counts[1],
        total: counts[0] + counts[1],
    })
}

/// Number of half-eigenvalues of each family at or below λ on the ray β = tα,
/// using the problem's own boundary conditions.
pub fn count(
    problem: &Problem,
    lambda: f64,
    t: f64,
    tol: &ToleranceConfig,
) -> Result<CountResult, SolveError> {
    count_on(
        problem,
        lambda,
        t,
        0.0,
        problem.length(),
        problem.bc_left(),
        problem.bc_right(),
        tol,
    )
}

/// Whole-interval count minus the two half-interval counts when the interval
/// is cut at `c` with a Neumann condition on the new endpoint. Dirichlet–
/// Neumann bracketing keeps this defect within fixed bounds independent of λ.
pub fn bracketing_defect(
    problem: &Problem,
    lambda: f64,
    t: f64,
    c: f64,
    tol: &ToleranceConfig,
) -> Result<i64, SolveError> {
    check_lambda_t(lambda, t)?;
    tol.validate().map_err(SolveError::InvalidArgument)?;
    if !(c > 0.0 && c < problem.length()) {
        return Err(SolveError::InvalidArgument(
            "cut point must lie inside the interval",
        ));
    }
    let whole = count(problem, lambda, t, tol)?;
    let left = count_on(
        problem,
        lambda,
        t,
        0.0,
        c,
        problem.bc_left(),
        Bc::Neumann,
        tol,
    )?;
    let right = count_on(
        problem,
        lambda,
        t,
        c,
        problem.length(),
        Bc::Neumann,
        problem.bc_right(),
        tol,
    )?;
    Ok(whole.total as i64 - left.total as i64 - right.total as i64)
}

/// One spectrum point in the (α, β) plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub t: f64,
    pub alpha: f64,
    pub beta: f64,
}

/// The k-th curve of one family, sampled along rays.
#[derive(Debug, Clone)]
pub struct SpectrumCurve {
    pub k: u32,
    pub sign: Sign,
    pub points: Vec<CurvePoint>,
}

/// Trace result: the curve plus any rays where the solve failed.
#[derive(Debug, Clone)]
pub struct CurveTrace {
    pub curve: SpectrumCurve,
    pub failures: Vec<(f64, SolveError)>,
}

/// Samples the k-th curve at each ray slope in `t_values` (ascending).
/// Failed rays are reported alongside the curve rather than aborting it.
pub fn trace_curve(
    problem: &Problem,
    k: u32,
    sign: Sign,
    t_values: &[f64],
    tol: &ToleranceConfig,
) -> CurveTrace {
    let mut points = Vec::with_capacity(t_values.len());
    let mut failures = Vec::new();
    for &t in t_values {
        match eigenvalue(problem, k, t, sign, tol) {
            Ok(h) => points.push(CurvePoint {
                t,
                alpha: h.alpha,
                beta: h.beta,
            }),
            Err(e) => failures.push((t, e)),
        }
    }
    CurveTrace {
        curve: SpectrumCurve { k, sign, points },
        failures,
    }
}

/// Weyl-type integral on a ray, with its quadrature error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeylEstimate {
    pub t: f64,
    pub integral: f64,
    pub quadrature_error: f64,
}

/// I(t) = ∫ (m^{-1/2} + (t n)^{-1/2})^{-1} dx over [0, L]: the density
/// governing the large-k spacing of both families on the ray.
pub fn weyl_integral(problem: &Problem, t: f64, quad_tol: f64) -> Result<WeylEstimate, SolveError> {
    if !(t.is_finite() && t > 0.0) {
        return Err(SolveError::InvalidArgument("t must be positive and finite"));
    }
    if !(quad_tol.is_finite() && quad_tol > 0.0) {
        return Err(SolveError::InvalidArgument("quad_tol must be positive"));
    }
    let f = |x: f64| {
        let m = problem.m().eval_raw(x);
        let n = problem.n().eval_raw(x);
        1.0 / (1.0 / math::sqrt(m) + 1.0 / math::sqrt(t * n))
    };
    let (integral, quadrature_error) = adaptive_simpson(f, 0.0, problem.length(), quad_tol, 60)?;
    Ok(WeylEstimate {
        t,
        integral,
        quadrature_error,
    })
}

/// Large-k estimate of the k-th half-eigenvalue on the ray: (πk / 2I)².
pub fn asymptotic_eigenvalue(problem: &Problem, k: u32, t: f64) -> Result<f64, SolveError> {
    if k < 1 {
        return Err(SolveError::InvalidArgument("k must be >= 1"));
    }
    let est = weyl_integral(problem, t, 1e-12)?;
    let r = PI * k as f64 / (2.0 * est.integral);
    Ok(r * r)
}

/// Large-λ estimate of the total count at or below λ: 4√λ I / π
/// (both families together).
pub fn asymptotic_count(problem: &Problem, lambda: f64, t: f64) -> Result<f64, SolveError> {
    check_lambda_t(lambda, t)?;
    let est = weyl_integral(problem, t, 1e-12)?;
    Ok(4.0 * math::sqrt(lambda) * est.integral / PI)
}

/// Campanato-type seminorm of a weight over [0, length]: the sup over all
/// dyadic subintervals up to `depth` of the mean oscillation scaled by
/// interval length to the power γ,
/// sup |I|^{-γ} ∫_I |w - mean_I w|.
///
/// Panics if γ is not positive or depth is zero.
pub fn campanato_seminorm(w: &WeightExpr, length: f64, gamma: f64, depth: u32) -> f64 {
    assert!(gamma > 0.0, "gamma must be positive");
    assert!(depth >= 1, "depth must be at least 1");
    const PANELS: u32 = 64;
    let mut sup = 0.0f64;
    for level in 0..=depth {
        let pieces = 1u64 << level;
        let width = length / pieces as f64;
        for i in 0..pieces {
            let a = length * i as f64 / pieces as f64;
            let b = a + width;
            let mean = composite_simpson(|x| w.eval_raw(x), a, b, PANELS) / width;
            let dev = composite_simpson(|x| math::abs(w.eval_raw(x) - mean), a, b, PANELS);
            sup = sup.max(dev / math::powf(width, gamma));
        }
    }
    sup
}

/// Relative remainders r_k = |1 - asymptotic/numeric| and their log-log
/// decay slope. `slope` is None when every remainder sits below solver
/// resolution (a few bisection widths plus the shooting tie slack): the
/// asymptotic form is exact to solver accuracy and no rate is identifiable.
#[derive(Debug, Clone)]
pub struct RemainderRate {
    pub slope: Option<f64>,
    pub points: Vec<(u32, f64)>,
}

/// Measures the asymptotic remainder decay for the Plus family along a ray.
pub fn remainder_rate(
    problem: &Problem,
    t: f64,
    k_values: &[u32],
    tol: &ToleranceConfig,
) -> Result<RemainderRate, SolveError> {
    remainder_rate_signed(problem, t, k_values, Sign::Plus, tol)
}

/// As [`remainder_rate`] for either family.
pub fn remainder_rate_signed(
    problem: &Problem,
    t: f64,
    k_values: &[u32],
    sign: Sign,
    tol: &ToleranceConfig,
) -> Result<RemainderRate, SolveError> {
    if k_values.len() < 4 {
        return Err(SolveError::InvalidArgument("need at least four k values"));
    }
    if k_values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(SolveError::InvalidArgument(
            "k values must be strictly ascending",
        ));
    }
    let mut points = Vec::with_capacity(k_values.len());
    let mut floors = Vec::with_capacity(k_values.len());
    for &k in k_values {
        let h = eigenvalue(problem, k, t, sign, tol)?;
        let asym = asymptotic_eigenvalue(problem, k, t)?;
        points.push((k, math::abs(1.0 - asym / h.lambda)));
        // below this, r is indistinguishable from zero: bisection width plus
        // the tie slack of the shooting predicate
        floors.push(4.0 * (h.achieved_eps / h.lambda + 1e-9));
    }
    let slope = fit_log_slope(&points, &floors);
    Ok(RemainderRate { slope, points })
}

fn fit_log_slope(points: &[(u32, f64)], floors: &[f64]) -> Option<f64> {
    // remainders at numerical zero carry no rate information
    let usable: Vec<(f64, f64)> = points
        .iter()
        .zip(floors.iter())
        .filter(|&(&(_, r), &fl)| r >= fl)
        .map(|(&(k, r), _)| (math::ln(k as f64), math::ln(r)))
        .collect();
    if usable.len() < 2 {
        return None;
    }
    let nf = usable.len() as f64;
    let mx = usable.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = usable.iter().map(|p| p.1).sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for &(x, y) in &usable {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 {
        return None;
    }
    Some(sxy / sxx)
}
