//! Prüfer angle formulation of the piecewise-weighted problem
//! -u'' = λ (m u⁺ - t n u⁻).
//!
//! With ω = √(λf), the substitution u' = ρ cos φ, u = ρ sin φ / ω turns the
//! equation into first-order form:
//!
//!   φ' = ω + (f'/f) sin φ cos φ / 2
//!   (ln ρ)' = (f'/f) sin²φ / 2
//!
//! where the effective weight f is m while u > 0 (angle in an even π-interval)
//! and t·n while u < 0 (odd π-interval). The angle is strictly increasing at
//! every multiple of π/2, so integration proceeds segment by segment: run
//! until φ rises through the next multiple of π, snap it there exactly, swap
//! the weight, continue. Crossings of multiples of π are the interior zeros
//! of u, which makes the terminal angle both a shooting target and a counting
//! device.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use crate::expr::{PositivityError, WeightExpr};
use crate::math;
use crate::ode::{Integrator, OdeError, Outcome};

/// Boundary condition at one endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bc {
    Dirichlet,
    Neumann,
}

/// Which half-eigenvalue family: `Plus` solutions start increasing from the
/// left endpoint, `Minus` solutions start decreasing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn as_str(self) -> &'static str {
        match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Sign region of the solution, selecting the effective weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// u > 0: weight m.
    Positive,
    /// u < 0: weight t·n.
    Negative,
}

/// Invalid problem data.
#[derive(Debug, Clone)]
pub enum ProblemError {
    /// The interval length must be finite and positive.
    BadLength(f64),
    /// A weight fails the positivity scan.
    Weight(PositivityError),
}

impl fmt::Display for ProblemError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProblemError::BadLength(l) => write!(f, "interval length must be positive, got {}", l),
            ProblemError::Weight(e) => write!(f, "{}", e),
        }
    }
}

impl core::error::Error for ProblemError {}

impl From<PositivityError> for ProblemError {
    fn from(e: PositivityError) -> Self {
        ProblemError::Weight(e)
    }
}

/// The weighted problem on [0, L].
#[derive(Debug, Clone)]
pub struct Problem {
    length: f64,
    m: WeightExpr,
    n: WeightExpr,
    bc_left: Bc,
    bc_right: Bc,
}

impl Problem {
    /// Builds a Dirichlet–Dirichlet problem, checking that both weights stay
    /// positive on a dense grid over [0, length].
    pub fn new(length: f64, m: WeightExpr, n: WeightExpr) -> Result<Self, ProblemError> {
        if !(length.is_finite() && length > 0.0) {
            return Err(ProblemError::BadLength(length));
        }
        m.require_positive(length)?;
        n.require_positive(length)?;
        Ok(Problem {
            length,
            m,
            n,
            bc_left: Bc::Dirichlet,
            bc_right: Bc::Dirichlet,
        })
    }

    pub fn with_boundary(mut self, left: Bc, right: Bc) -> Self {
        self.bc_left = left;
        self.bc_right = right;
        self
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn m(&self) -> &WeightExpr {
        &self.m
    }

    pub fn n(&self) -> &WeightExpr {
        &self.n
    }

    pub fn bc_left(&self) -> Bc {
        self.bc_left
    }

    pub fn bc_right(&self) -> Bc {
        self.bc_right
    }
}

/// Numerical knobs shared by the solvers. All fields must be positive.
#[derive(Debug, Clone, Copy)]
pub struct ToleranceConfig {
    /// Relative tolerance of the angle integration.
    pub ode_rel_tol: f64,
    /// Absolute tolerance of the angle integration.
    pub ode_abs_tol: f64,
    /// Absolute x-tolerance when locating a branch switch.
    pub event_x_tol: f64,
    /// Bisection stops when the bracket width falls below this.
    pub bisection_eps: f64,
    /// Iteration cap for the eigenvalue bisection.
    pub max_bisection_iters: u32,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            ode_rel_tol: 1e-10,
            ode_abs_tol: 1e-10,
            event_x_tol: 1e-12,
            bisection_eps: 1e-4,
            max_bisection_iters: 200,
        }
    }
}

impl ToleranceConfig {
    pub(crate) fn validate(&self) -> Result<(), &'static str> {
        let positive = self.ode_rel_tol > 0.0
            && self.ode_abs_tol > 0.0
            && self.event_x_tol > 0.0
            && self.bisection_eps > 0.0
            && self.max_bisection_iters > 0;
        if positive {
            Ok(())
        } else {
            Err("all tolerance fields must be positive")
        }
    }
}

/// Failure during angle integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PruferError {
    Ode(OdeError),
    /// Requires 0 <= x0 < x1 <= length.
    BadSpan {
        x0: f64,
        x1: f64,
    },
    /// The path was integrated without amplitude recording.
    MissingAmplitude,
}

impl fmt::Display for PruferError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PruferError::Ode(e) => write!(f, "{}", e),
            PruferError::BadSpan { x0, x1 } => {
                write!(f, "invalid integration span [{}, {}]", x0, x1)
            }
            PruferError::MissingAmplitude => {
                f.write_str("path lacks amplitude samples; integrate with record_path")
            }
        }
    }
}

impl core::error::Error for PruferError {}

impl From<OdeError> for PruferError {
    fn from(e: OdeError) -> Self {
        PruferError::Ode(e)
    }
}

/// Right-hand side of the angle equation on the given branch.
pub fn prufer_rhs(lambda: f64, t: f64, branch: Branch, x: f64, phi: f64, problem: &Problem) -> f64 {
    let (f, df) = effective_weight(problem, t, branch, x);
    math::sqrt(lambda * f) + 0.5 * (df / f) * math::sin(phi) * math::cos(phi)
}

#[inline]
fn effective_weight(problem: &Problem, t: f64, branch: Branch, x: f64) -> (f64, f64) {
    match branch {
        Branch::Positive => (problem.m.eval_raw(x), problem.m.eval_derivative_raw(x)),
        Branch::Negative => (
            t * problem.n.eval_raw(x),
            t * problem.n.eval_derivative_raw(x),
        ),
    }
}

/// Nodal index of an angle: the j with φ in [jπ, (j+1)π), treating angles
/// within a relative 1e-9 of a multiple as exactly on it.
pub(crate) fn nodal_index(phi: f64) -> i64 {
    let r = phi / PI;
    math::floor(r + 1e-9 * (1.0 + math::abs(r))) as i64
}

#[inline]
fn branch_of(j: i64) -> Branch {
    if j.rem_euclid(2) == 0 {
        Branch::Positive
    } else {
        Branch::Negative
    }
}

pub(crate) struct Advance {
    pub terminal: f64,
    pub crossings: u32,
}

/// Segment-wise angle integration without path recording. If `stop_after`
/// is set, returns as soon as that many branch switches have occurred.
pub(crate) fn advance_angle(
    problem: &Problem,
    lambda: f64,
    t: f64,
    phi0: f64,
    x0: f64,
    x1: f64,
    tol: &ToleranceConfig,
    stop_after: Option<u32>,
) -> Result<Advance, PruferError> {
    check_span(problem, x0, x1)?;
    let integrator = Integrator {
        rel_tol: tol.ode_rel_tol,
        abs_tol: tol.ode_abs_tol,
        event_x_tol: tol.event_x_tol,
        ..Integrator::default()
    };
    let mut x = x0;
    let mut phi = phi0;
    let mut j = nodal_index(phi0);
    let mut crossings = 0u32;
    loop {
        if x >= x1 {
            return Ok(Advance {
                terminal: phi,
                crossings,
            });
        }
        let branch = branch_of(j);
        let level = (j + 1) as f64 * PI;
        let out = integrator.run(
            |xx, y: &[f64; 1]| [prufer_rhs(lambda, t, branch, xx, y[0], problem)],
            x,
            [phi],
            x1,
            Some(level),
            |_, _| {},
        )?;
        match out {
            Outcome::Completed { y } => {
                return Ok(Advance {
                    terminal: y[0],
                    crossings,
                })
            }
            Outcome::Event { x: xe, .. } => {
                crossings += 1;
                j += 1;
                x = xe;
                phi = level;
                if stop_after == Some(crossings) {
                    return Ok(Advance {
                        terminal: phi,
                        crossings,
                    });
                }
            }
        }
    }
}

fn check_span(problem: &Problem, x0: f64, x1: f64) -> Result<(), PruferError> {
    if x0 >= 0.0 && x0 < x1 && x1 <= problem.length * (1.0 + 1e-12) {
        Ok(())
    } else {
        Err(PruferError::BadSpan { x0, x1 })
    }
}

/// Angle trajectory of one integration, optionally with amplitude.
#[derive(Debug, Clone)]
pub struct PruferPath {
    pub lambda: f64,
    pub t: f64,
    /// (x, φ) at every accepted step, including branch switches where φ sits
    /// exactly on a multiple of π.
    pub samples: Vec<(f64, f64)>,
    /// ρ at the same x values, present when recorded.
    pub amplitude: Option<Vec<f64>>,
    pub terminal_angle: f64,
    /// Branch switches encountered: interior zeros of the solution.
    pub crossings: u32,
}

/// Integrates the angle from (x0, φ0) to x1. With `record_path` the returned
/// path carries dense (x, φ) samples plus the amplitude ρ needed to rebuild
/// the solution; without it only the endpoints are kept.
pub fn integrate_angle(
    problem: &Problem,
    lambda: f64,
    t: f64,
    phi0: f64,
    x0: f64,
    x1: f64,
    tol: &ToleranceConfig,
    record_path: bool,
) -> Result<PruferPath, PruferError> {
    if !record_path {
        let adv = advance_angle(problem, lambda, t, phi0, x0, x1, tol, None)?;
        return Ok(PruferPath {
            lambda,
            t,
            samples: vec![(x0, phi0), (x1, adv.terminal)],
            amplitude: None,
            terminal_angle: adv.terminal,
            crossings: adv.crossings,
        });
    }

    check_span(problem, x0, x1)?;
    let integrator = Integrator {
        rel_tol: tol.ode_rel_tol,
        abs_tol: tol.ode_abs_tol,
        event_x_tol: tol.event_x_tol,
        // dense output for plotting and reconstruction
        max_step: (x1 - x0) / 128.0,
        ..Integrator::default()
    };
    let mut samples = vec![(x0, phi0)];
    let mut rho = vec![1.0];
    let mut x = x0;
    let mut state = [phi0, 0.0]; // [φ, ln ρ]
    let mut j = nodal_index(phi0);
    let mut crossings = 0u32;
    let terminal;
    loop {
        if x >= x1 {
            terminal = state[0];
            break;
        }
        let branch = branch_of(j);
        let level = (j + 1) as f64 * PI;
        let rhs = |xx: f64, y: &[f64; 2]| {
            let (f, df) = effective_weight(problem, t, branch, xx);
            let s = math::sin(y[0]);
            let c = math::cos(y[0]);
            [
                math::sqrt(lambda * f) + 0.5 * (df / f) * s * c,
                0.5 * (df / f) * s * s,
            ]
        };
        let out = integrator.run(rhs, x, state, x1, Some(level), |xs, ys: &[f64; 2]| {
            samples.push((xs, ys[0]));
            rho.push(math::exp(ys[1]));
        })?;
        match out {
            Outcome::Completed { y } => {
                // final accepted step already recorded at x1
                terminal = y[0];
                break;
            }
            Outcome::Event { x: xe, y } => {
                crossings += 1;
                j += 1;
                x = xe;
                state = [level, y[1]];
                samples.push((xe, level));
                rho.push(math::exp(y[1]));
            }
        }
    }
    Ok(PruferPath {
        lambda,
        t,
        samples,
        amplitude: Some(rho),
        terminal_angle: terminal,
        crossings,
    })
}

/// Starting angle at the left endpoint for the given family.
pub(crate) fn start_angle(bc_left: Bc, sign: Sign) -> f64 {
    match (bc_left, sign) {
        (Bc::Dirichlet, Sign::Plus) => 0.0,
        (Bc::Dirichlet, Sign::Minus) => PI,
        (Bc::Neumann, Sign::Plus) => 0.5 * PI,
        (Bc::Neumann, Sign::Minus) => 1.5 * PI,
    }
}

/// Terminal angle φ(L) of the shot started from the left boundary condition.
pub fn terminal_angle(
    problem: &Problem,
    lambda: f64,
    t: f64,
    sign: Sign,
    tol: &ToleranceConfig,
) -> Result<f64, PruferError> {
    let phi0 = start_angle(problem.bc_left, sign);
    advance_angle(problem, lambda, t, phi0, 0.0, problem.length, tol, None).map(|a| a.terminal)
}

/// Rebuilds the solution u from a recorded path via u = ρ sin φ / √(λf),
/// normalized to max |u| = 1. Angles on a multiple of π give exact zeros.
pub fn reconstruct_eigenfunction(
    path: &PruferPath,
    problem: &Problem,
) -> Result<Vec<(f64, f64)>, PruferError> {
    let rho = path
        .amplitude
        .as_ref()
        .ok_or(PruferError::MissingAmplitude)?;
    let mut out = Vec::with_capacity(path.samples.len());
    for (&(x, phi), &r) in path.samples.iter().zip(rho.iter()) {
        let jr = phi / PI;
        let nearest = math::floor(jr + 0.5);
        let u = if math::abs(jr - nearest) < 1e-9 * (1.0 + math::abs(jr)) {
            0.0
        } else {
            let j = nodal_index(phi);
            let (f, _) = effective_weight(problem, path.t, branch_of(j), x);
            r * math::sin(phi) / math::sqrt(path.lambda * f)
        };
        out.push((x, u));
    }
    let peak = out
        .iter()
        .fold(0.0f64, |acc, &(_, u)| acc.max(math::abs(u)));
    if peak > 0.0 {
        for v in out.iter_mut() {
            v.1 /= peak;
        }
    }
    Ok(out)
}
