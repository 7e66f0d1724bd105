//! Half-eigenvalue solver: bisection on λ with the Prüfer terminal angle as
//! the shooting criterion, seeded by closed-form constant-weight brackets.

use core::f64::consts::PI;
use core::fmt;

use crate::expr::WeightExpr;
use crate::math;
use crate::prufer::{
    advance_angle, start_angle, terminal_angle, Bc, Problem, ProblemError, PruferError, Sign,
    ToleranceConfig,
};
use crate::quad::QuadError;

/// Solver failure.
#[derive(Debug, Clone)]
pub enum SolveError {
    InvalidArgument(&'static str),
    Problem(ProblemError),
    /// Bracket expansion hit its cap without enclosing the target.
    Bracket {
        lo: f64,
        hi: f64,
    },
    /// Bisection hit the iteration cap before the bracket closed.
    IterationLimit {
        lo: f64,
        hi: f64,
    },
    Prufer(PruferError),
    Quadrature(QuadError),
}

impl fmt::Display for SolveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolveError::InvalidArgument(msg) => f.write_str(msg),
            SolveError::Problem(e) => write!(f, "{}", e),
            SolveError::Bracket { lo, hi } => {
                write!(
                    f,
                    "could not bracket the eigenvalue (reached [{}, {}])",
                    lo, hi
                )
            }
            SolveError::IterationLimit { lo, hi } => write!(
                f,
                "bisection iteration cap reached with bracket [{}, {}]",
                lo, hi
            ),
            SolveError::Prufer(e) => write!(f, "{}", e),
            SolveError::Quadrature(e) => write!(f, "{}", e),
        }
    }
}

impl core::error::Error for SolveError {}

impl From<ProblemError> for SolveError {
    fn from(e: ProblemError) -> Self {
        SolveError::Problem(e)
    }
}

impl From<PruferError> for SolveError {
    fn from(e: PruferError) -> Self {
        SolveError::Prufer(e)
    }
}

impl From<QuadError> for SolveError {
    fn from(e: QuadError) -> Self {
        SolveError::Quadrature(e)
    }
}

/// One point of the spectrum: the k-th half-eigenvalue on the ray β = tα.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfEigenvalue {
    pub k: u32,
    pub t: f64,
    pub sign: Sign,
    /// λ solving the shooting problem; α on the ray.
    pub lambda: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Final bracket width of the bisection.
    pub achieved_eps: f64,
}

/// λ-interval known to contain the target eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
}

/// Exact k-th half-eigenvalue for constant weights m0, n0 on [0, length].
///
/// A solution alternates sine arcs of frequency √(λ m0) (positive) and
/// √(λ n0 t) (negative). Summing arc widths and solving for λ:
/// even k uses k/2 arcs of each kind; odd k has one extra arc of the
/// starting kind.
pub fn const_eigenvalue(m0: f64, n0: f64, length: f64, k: u32, t: f64, sign: Sign) -> f64 {
    let a = 1.0 / math::sqrt(m0);
    let b = 1.0 / math::sqrt(n0 * t);
    let kf = k as f64;
    let s = if k % 2 == 0 {
        kf * (a + b)
    } else {
        match sign {
            Sign::Plus => (kf + 1.0) * a + (kf - 1.0) * b,
            Sign::Minus => (kf - 1.0) * a + (kf + 1.0) * b,
        }
    };
    let root = PI * s / (2.0 * length);
    root * root
}

const SCAN_POINTS: usize = 4097;

/// Extremes of both weights over a dense grid, widened outward by a relative
/// 1e-3 so constant-weight comparison problems strictly enclose the true one.
/// Returns (m_inf, m_sup, n_inf, n_sup).
pub fn weight_bounds(problem: &Problem) -> (f64, f64, f64, f64) {
    let scan = |w: &WeightExpr| {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..SCAN_POINTS {
            let x = problem.length() * i as f64 / (SCAN_POINTS - 1) as f64;
            let v = w.eval_raw(x);
            lo = lo.min(v);
            hi = hi.max(v);
        }
        (lo, hi)
    };
    let (m_lo, m_hi) = scan(problem.m());
    let (n_lo, n_hi) = scan(problem.n());
    (
        m_lo * (1.0 - 1e-3),
        m_hi * (1.0 + 1e-3),
        n_lo * (1.0 - 1e-3),
        n_hi * (1.0 + 1e-3),
    )
}

/// Tie-tolerant test that a terminal angle has reached the shooting target.
#[inline]
pub(crate) fn reached(angle: f64, target: f64) -> bool {
    angle >= target - 1e-9 * (1.0 + target)
}

fn validate_inputs(
    problem: &Problem,
    k: u32,
    t: f64,
    tol: &ToleranceConfig,
) -> Result<(), SolveError> {
    if k < 1 {
        return Err(SolveError::InvalidArgument("k must be >= 1"));
    }
    if !(t.is_finite() && t > 0.0) {
        return Err(SolveError::InvalidArgument("t must be positive and finite"));
    }
    tol.validate().map_err(SolveError::InvalidArgument)?;
    if problem.bc_left() != Bc::Dirichlet || problem.bc_right() != Bc::Dirichlet {
        return Err(SolveError::InvalidArgument(
            "eigenvalue solver requires Dirichlet boundary conditions",
        ));
    }
    Ok(())
}

fn shooting_target(k: u32, sign: Sign) -> f64 {
    start_angle(Bc::Dirichlet, sign) + k as f64 * PI
}

/// Seeds a λ-bracket from the constant-weight comparison problems (sup
/// weights give a lower λ, inf weights an upper λ), then verifies by
/// shooting and expands geometrically if a nudge-tie invalidated an end.
pub fn initial_bracket(
    problem: &Problem,
    k: u32,
    t: f64,
    sign: Sign,
    tol: &ToleranceConfig,
) -> Result<Bracket, SolveError> {
    validate_inputs(problem, k, t, tol)?;
    let (m_inf, m_sup, n_inf, n_sup) = weight_bounds(problem);
    let mut lo = const_eigenvalue(m_sup, n_sup, problem.length(), k, t, sign);
    let mut hi = const_eigenvalue(m_inf, n_inf, problem.length(), k, t, sign);
    let target = shooting_target(k, sign);

    let mut tries = 0u32;
    while reached(terminal_angle(problem, lo, t, sign, tol)?, target) {
        lo *= 0.5;
        tries += 1;
        if tries > 60 {
            return Err(SolveError::Bracket { lo, hi });
        }
    }
    tries = 0;
    while !reached(terminal_angle(problem, hi, t, sign, tol)?, target) {
        hi *= 2.0;
        tries += 1;
        if tries > 60 {
            return Err(SolveError::Bracket { lo, hi });
        }
    }
    Ok(Bracket { lo, hi })
}

fn bisect<P>(
    bracket: Bracket,
    tol: &ToleranceConfig,
    mut above: P,
) -> Result<(f64, f64), SolveError>
where
    P: FnMut(f64) -> Result<bool, SolveError>,
{
    let (mut lo, mut hi) = (bracket.lo, bracket.hi);
    let mut iters = 0u32;
    while hi - lo >= tol.bisection_eps {
        if iters >= tol.max_bisection_iters {
            return Err(SolveError::IterationLimit { lo, hi });
        }
        let mid = 0.5 * (lo + hi);
        if above(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
        iters += 1;
    }
    Ok((0.5 * (lo + hi), hi - lo))
}

fn assemble(k: u32, t: f64, sign: Sign, lambda: f64, width: f64) -> HalfEigenvalue {
    HalfEigenvalue {
        k,
        t,
        sign,
        lambda,
        alpha: lambda,
        beta: t * lambda,
        achieved_eps: width,
    }
}

/// The k-th half-eigenvalue of the given family on the ray β = tα, by
/// bisection on the terminal angle.
pub fn eigenvalue(
    problem: &Problem,
    k: u32,
    t: f64,
    sign: Sign,
    tol: &ToleranceConfig,
) -> Result<HalfEigenvalue, SolveError> {
    let bracket = initial_bracket(problem, k, t, sign, tol)?;
    let target = shooting_target(k, sign);
    let (lambda, width) = bisect(bracket, tol, |mid| {
        Ok(reached(terminal_angle(problem, mid, t, sign, tol)?, target))
    })?;
    Ok(assemble(k, t, sign, lambda, width))
}

/// Same eigenvalue by a different criterion: march the angle and count branch
/// switches, accepting λ once k switches occur inside the interval. Exists as
/// an independent cross-check of the terminal-angle test.
pub fn eigenvalue_marching(
    problem: &Problem,
    k: u32,
    t: f64,
    sign: Sign,
    tol: &ToleranceConfig,
) -> Result<HalfEigenvalue, SolveError> {
    let bracket = initial_bracket(problem, k, t, sign, tol)?;
    let phi0 = start_angle(Bc::Dirichlet, sign);
    let (lambda, width) = bisect(bracket, tol, |mid| {
        let adv = advance_angle(problem, mid, t, phi0, 0.0, problem.length(), tol, Some(k))?;
        Ok(adv.crossings >= k)
    })?;
    Ok(assemble(k, t, sign, lambda, width))
}

/// k-th eigenvalue of the ordinary weighted problem -u'' = λ w u: the
/// degenerate ray m = n = w, t = 1 where both families coincide.
pub fn linear_eigenvalue(
    weight: &WeightExpr,
    length: f64,
    k: u32,
    tol: &ToleranceConfig,
) -> Result<f64, SolveError> {
    let problem = Problem::new(length, weight.clone(), weight.clone())?;
    eigenvalue(&problem, k, 1.0, Sign::Plus, tol).map(|h| h.lambda)
}
