//! Fučík spectrum of `-u'' = α m(x) u⁺ - β n(x) u⁻` on an interval with
//! Dirichlet (or mixed Neumann) boundary conditions.
//!
//! The spectrum is the union of curves `C_k^±` in the (α, β) plane. Along a
//! ray β = t·α each curve meets the ray in a half-eigenvalue `λ_{k,t}^±`,
//! which this crate computes by shooting: the Prüfer angle of a solution is
//! integrated across the interval and λ is bisected until the terminal angle
//! hits its target multiple of π. On top of the solver sit spectral counting
//! functions, curve tracing, Weyl-type asymptotic estimates via quadrature,
//! a Campanato seminorm estimator, and an empirical remainder-rate fit.
//!
//! Weights are supplied as closed-form expression text (e.g. `"1+1/(x+1)"`)
//! and differentiated symbolically, so the angle ODE uses exact derivatives.
//!
//! The crate is `no_std`-compatible (with `alloc`); disable the default
//! `std` feature and enable `libm` instead.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]
// several operation signatures are fixed by the solver's interface and
// naturally take problem + ray + span + tolerances
#![allow(clippy::too_many_arguments)]

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("fucik requires either the `std` or the `libm` feature");

extern crate alloc;

mod math;

pub mod eigen;
pub mod expr;
pub mod ode;
pub mod prufer;
pub mod quad;
pub mod spectral;

pub use eigen::{
    const_eigenvalue, eigenvalue, eigenvalue_marching, initial_bracket, linear_eigenvalue,
    weight_bounds, Bracket, HalfEigenvalue, SolveError,
};
pub use expr::{Expr, ParseError, PositivityError, WeightExpr};
pub use prufer::{
    integrate_angle, prufer_rhs, reconstruct_eigenfunction, terminal_angle, Bc, Branch, Problem,
    ProblemError, PruferError, PruferPath, Sign, ToleranceConfig,
};
pub use spectral::{
    asymptotic_count, asymptotic_eigenvalue, bracketing_defect, campanato_seminorm, count,
    count_on, remainder_rate, remainder_rate_signed, trace_curve, weyl_integral, CountResult,
    CurvePoint, CurveTrace, RemainderRate, SpectrumCurve, WeylEstimate,
};
