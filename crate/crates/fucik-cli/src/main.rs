//! Command-line front end for the fucik crate.
//!
//! Exit codes: 0 success, 2 bad arguments, 3 numerical failure. Every failure
//! writes a single JSON line to stderr. Output is byte-identical across runs
//! and thread counts; FUCIK_THREADS caps the worker pool (0 means automatic).

mod output;
mod svg;

use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use fucik::{
    asymptotic_count, asymptotic_eigenvalue, count, count_on, eigenvalue, eigenvalue_marching,
    linear_eigenvalue, Bc, HalfEigenvalue, Problem, Sign, SolveError, ToleranceConfig, WeightExpr,
};
use output::{
    emit, error_line, render, BracketRow, CountRecord, CurveRecord, EigenRecord, Failure, Format,
    OrderRow, RayRow, SlopeRow,
};
use svg::{PlotCurve, PlotFrame};

/// Weight pair used by the built-in tables when none is given.
const M_DEFAULT: &str = "1 + 1/(x+1)";
const N_DEFAULT: &str = "1 + cos(2*x)^2";

/// Ray slopes outside this window make one branch numerically invisible next
/// to the other, so they are rejected up front.
const T_MIN_ALLOWED: f64 = 1e-6;
const T_MAX_ALLOWED: f64 = 1e6;

#[derive(Parser)]
#[command(
    name = "fucik",
    version,
    about = "Fucik spectrum of -u'' = alpha m(x)u+ - beta n(x)u- : curves, counts, tables, plots"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve a single half-eigenvalue on the ray beta = t * alpha
    Eigen(EigenArgs),
    /// Sample one spectrum curve over a range of ray slopes
    Curve(CurveArgs),
    /// Count half-eigenvalues at or below lambda on a ray, with the Weyl estimate
    Count(CountArgs),
    /// Print one of the built-in reference tables
    Table(TableArgs),
    /// Render spectrum curves to a standalone SVG
    Plot(PlotArgs),
    /// Tabulate the interval-splitting count defect over a lambda grid
    Bracket(BracketArgs),
}

#[derive(Args)]
struct WeightArgs {
    /// Weight m(x) in front of the positive part
    #[arg(long)]
    m: String,
    /// Weight n(x) in front of the negative part
    #[arg(long)]
    n: String,
    /// Interval length
    #[arg(long = "L", default_value_t = 1.0)]
    length: f64,
}

#[derive(Args)]
struct SolveArgs {
    /// Bisection tolerance on lambda
    #[arg(long, default_value_t = 1e-4)]
    eps: f64,
}

#[derive(Args)]
struct OutArgs {
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write to this file instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct EigenArgs {
    /// Eigenvalue index (number of interior arcs)
    #[arg(long)]
    k: u32,
    /// Ray slope beta / alpha
    #[arg(long)]
    t: f64,
    /// Family: + starts positive, - starts negative
    #[arg(long, value_parser = parse_sign, allow_hyphen_values = true)]
    sign: Sign,
    /// Acceptance test for the shot: terminal angle or switch counting
    #[arg(long, value_enum, default_value_t = Method::Angle)]
    method: Method,
    #[command(flatten)]
    weights: WeightArgs,
    #[command(flatten)]
    solve: SolveArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct CurveArgs {
    /// Curve index
    #[arg(long)]
    k: u32,
    /// Family: + or -
    #[arg(long, value_parser = parse_sign, allow_hyphen_values = true)]
    sign: Sign,
    /// First ray slope
    #[arg(long)]
    t_min: f64,
    /// Last ray slope
    #[arg(long)]
    t_max: f64,
    /// Number of grid points
    #[arg(long)]
    points: u32,
    /// Space the slopes logarithmically
    #[arg(long)]
    log: bool,
    #[command(flatten)]
    weights: WeightArgs,
    #[command(flatten)]
    solve: SolveArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct CountArgs {
    /// Threshold value of alpha
    #[arg(long)]
    lambda: f64,
    /// Ray slope beta / alpha
    #[arg(long)]
    t: f64,
    #[command(flatten)]
    weights: WeightArgs,
    #[command(flatten)]
    solve: SolveArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct TableArgs {
    /// Which table: 1 (ray sweep), 2 (order sweep), 3 (slope sweep)
    #[arg(long)]
    which: u8,
    /// Extend table 2 to k = 500 and k = 1000
    #[arg(long)]
    full: bool,
    /// Weight m(x); defaults to the built-in study pair
    #[arg(long)]
    m: Option<String>,
    /// Weight n(x); defaults to the built-in study pair
    #[arg(long)]
    n: Option<String>,
    /// Interval length
    #[arg(long = "L", default_value_t = 1.0)]
    length: f64,
    #[command(flatten)]
    solve: SolveArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct PlotArgs {
    /// Draw curves k = 1 ..= k-max
    #[arg(long, default_value_t = 4)]
    k_max: u32,
    /// Which families to draw
    #[arg(long, value_enum, default_value_t = SignsArg::Both)]
    signs: SignsArg,
    /// First ray slope
    #[arg(long, default_value_t = 0.01)]
    t_min: f64,
    /// Last ray slope
    #[arg(long, default_value_t = 100.0)]
    t_max: f64,
    /// Number of slopes per curve
    #[arg(long, default_value_t = 25)]
    points: u32,
    /// Space the slopes linearly instead of logarithmically
    #[arg(long)]
    linear: bool,
    /// Right edge of the alpha axis
    #[arg(long, default_value_t = 300.0)]
    alpha_max: f64,
    /// Top edge of the beta axis
    #[arg(long, default_value_t = 300.0)]
    beta_max: f64,
    /// Image width in pixels
    #[arg(long, default_value_t = 800)]
    width: u32,
    /// Image height in pixels
    #[arg(long, default_value_t = 800)]
    height: u32,
    #[command(flatten)]
    weights: WeightArgs,
    #[command(flatten)]
    solve: SolveArgs,
    /// Write the SVG to this file instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BracketArgs {
    /// Interior cut point
    #[arg(long)]
    c: f64,
    /// Ray slope beta / alpha
    #[arg(long)]
    t: f64,
    /// Smallest lambda on the grid
    #[arg(long, default_value_t = 1.0)]
    lambda_min: f64,
    /// Largest lambda on the grid
    #[arg(long)]
    lambda_max: f64,
    /// Number of grid points, spaced logarithmically
    #[arg(long, default_value_t = 40)]
    steps: u32,
    #[command(flatten)]
    weights: WeightArgs,
    #[command(flatten)]
    solve: SolveArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Angle,
    March,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SignsArg {
    Both,
    Plus,
    Minus,
}

fn parse_sign(s: &str) -> Result<Sign, String> {
    match s {
        "+" | "plus" | "p" => Ok(Sign::Plus),
        "-" | "minus" | "m" => Ok(Sign::Minus),
        other => Err(format!("sign must be + or - (got {other})")),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            std::process::exit(0);
        }
        Err(e) => {
            let msg = e
                .to_string()
                .lines()
                .find(|l| !l.trim().is_empty())
                .unwrap_or("invalid command line")
                .trim()
                .trim_start_matches("error: ")
                .to_string();
            report(&Failure::Usage(msg));
        }
    };
    if let Err(f) = configure_threads().and_then(|()| run(cli)) {
        report(&f);
    }
}

fn report(f: &Failure) -> ! {
    eprintln!("{}", f.line());
    std::process::exit(f.code());
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("FUCIK_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .map_err(|_| Failure::usage("FUCIK_THREADS must be a non-negative integer"))?;
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Failure::Io(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.cmd {
        Cmd::Eigen(a) => cmd_eigen(a),
        Cmd::Curve(a) => cmd_curve(a),
        Cmd::Count(a) => cmd_count(a),
        Cmd::Table(a) => cmd_table(a),
        Cmd::Plot(a) => cmd_plot(a),
        Cmd::Bracket(a) => cmd_bracket(a),
    }
}

fn require_k(k: u32, flag: &str) -> Result<(), Failure> {
    if k == 0 {
        Err(Failure::Usage(format!("{flag} must be ≥ 1")))
    } else {
        Ok(())
    }
}

fn check_t(t: f64, flag: &str) -> Result<(), Failure> {
    if t.is_finite() && (T_MIN_ALLOWED..=T_MAX_ALLOWED).contains(&t) {
        Ok(())
    } else {
        Err(Failure::Usage(format!(
            "{flag} must lie in [{T_MIN_ALLOWED:e}, {T_MAX_ALLOWED:e}]"
        )))
    }
}

fn build_problem(m_text: &str, n_text: &str, length: f64) -> Result<Problem, Failure> {
    let m = WeightExpr::parse(m_text).map_err(|e| Failure::Usage(format!("invalid m: {e}")))?;
    let n = WeightExpr::parse(n_text).map_err(|e| Failure::Usage(format!("invalid n: {e}")))?;
    Problem::new(length, m, n).map_err(|e| Failure::Usage(e.to_string()))
}

fn tol_config(eps: f64) -> Result<ToleranceConfig, Failure> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Failure::usage("eps must be positive"));
    }
    Ok(ToleranceConfig {
        bisection_eps: eps,
        ..ToleranceConfig::default()
    })
}

/// Grid of ray slopes, linear or logarithmic, with exact endpoints. A single
/// point sits at t_min.
fn ray_grid(t_min: f64, t_max: f64, points: u32, log: bool) -> Result<Vec<f64>, Failure> {
    check_t(t_min, "t-min")?;
    check_t(t_max, "t-max")?;
    if t_max < t_min {
        return Err(Failure::usage("t-max must be at least t-min"));
    }
    if points == 0 {
        return Err(Failure::usage("t grid is empty: points must be at least 1"));
    }
    if points == 1 {
        return Ok(vec![t_min]);
    }
    let n = points as usize;
    let mut grid = Vec::with_capacity(n);
    for i in 0..n {
        let f = i as f64 / (n - 1) as f64;
        grid.push(if log {
            (t_min.ln() + f * (t_max.ln() - t_min.ln())).exp()
        } else {
            t_min + f * (t_max - t_min)
        });
    }
    grid[0] = t_min;
    grid[n - 1] = t_max;
    Ok(grid)
}

fn sign_str(sign: Sign) -> &'static str {
    match sign {
        Sign::Plus => "+",
        Sign::Minus => "-",
    }
}

fn cmd_eigen(a: EigenArgs) -> Result<(), Failure> {
    require_k(a.k, "k")?;
    check_t(a.t, "t")?;
    let problem = build_problem(&a.weights.m, &a.weights.n, a.weights.length)?;
    let tol = tol_config(a.solve.eps)?;
    let he = match a.method {
        Method::Angle => eigenvalue(&problem, a.k, a.t, a.sign, &tol),
        Method::March => eigenvalue_marching(&problem, a.k, a.t, a.sign, &tol),
    }?;
    let row = EigenRecord {
        k: he.k,
        t: he.t,
        sign: sign_str(he.sign),
        alpha: he.alpha,
        beta: he.beta,
        achieved_eps: he.achieved_eps,
    };
    emit(a.out.output.as_deref(), &render(a.out.format, &[row]))
}

fn cmd_curve(a: CurveArgs) -> Result<(), Failure> {
    require_k(a.k, "k")?;
    let grid = ray_grid(a.t_min, a.t_max, a.points, a.log)?;
    let problem = build_problem(&a.weights.m, &a.weights.n, a.weights.length)?;
    let tol = tol_config(a.solve.eps)?;
    let solved: Vec<(f64, Result<HalfEigenvalue, SolveError>)> = grid
        .par_iter()
        .map(|&t| (t, eigenvalue(&problem, a.k, t, a.sign, &tol)))
        .collect();
    let mut rows = Vec::with_capacity(solved.len());
    let mut failures = 0usize;
    for (t, outcome) in solved {
        match outcome {
            Ok(he) => rows.push(CurveRecord {
                t: he.t,
                alpha: he.alpha,
                beta: he.beta,
                k: a.k,
                sign: sign_str(a.sign),
            }),
            Err(e) => {
                failures += 1;
                eprintln!("{}", error_line("solver", &e.to_string(), Some(t)));
            }
        }
    }
    if rows.is_empty() && failures > 0 {
        return Err(Failure::Solver("no curve point could be solved".into()));
    }
    emit(a.out.output.as_deref(), &render(a.out.format, &rows))
}

fn cmd_count(a: CountArgs) -> Result<(), Failure> {
    check_t(a.t, "t")?;
    let problem = build_problem(&a.weights.m, &a.weights.n, a.weights.length)?;
    let tol = tol_config(a.solve.eps)?;
    let counted = count(&problem, a.lambda, a.t, &tol)?;
    let estimate = asymptotic_count(&problem, a.lambda, a.t)?;
    let row = CountRecord {
        lambda: counted.lambda,
        t: counted.t,
        n_plus: counted.n_plus,
        n_minus: counted.n_minus,
        total: counted.total,
        asymptotic_count: estimate,
    };
    emit(a.out.output.as_deref(), &render(a.out.format, &[row]))
}

/// Ray slopes of the first built-in table, large to small; the fourth curve
/// of the + family is followed along them.
const TABLE1_SLOPES: [f64; 11] = [1e5, 1e4, 1e3, 1e2, 10.0, 1.0, 0.1, 0.01, 1e-3, 1e-4, 1e-5];
const TABLE1_K: u32 = 4;

/// Orders of the second table, at fixed slope 30; --full appends 500 and 1000.
const TABLE2_KS: [u32; 4] = [10, 50, 100, 200];
const TABLE2_KS_FULL: [u32; 2] = [500, 1000];
const TABLE2_T: f64 = 30.0;

/// Slopes of the third table, at fixed order 28.
const TABLE3_SLOPES: [f64; 7] = [0.1, 0.5, 1.0, 5.0, 10.0, 1000.0, 1e5];
const TABLE3_K: u32 = 28;

fn cmd_table(a: TableArgs) -> Result<(), Failure> {
    let m_text = a.m.as_deref().unwrap_or(M_DEFAULT);
    let n_text = a.n.as_deref().unwrap_or(N_DEFAULT);
    let problem = build_problem(m_text, n_text, a.length)?;
    let tol = tol_config(a.solve.eps)?;
    let content = match a.which {
        1 => {
            let rows = TABLE1_SLOPES
                .par_iter()
                .map(|&t| {
                    eigenvalue(&problem, TABLE1_K, t, Sign::Plus, &tol).map(|he| RayRow {
                        t: he.t,
                        alpha: he.alpha,
                        beta: he.beta,
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            render(a.out.format, &rows)
        }
        2 => {
            let mut ks = TABLE2_KS.to_vec();
            if a.full {
                ks.extend_from_slice(&TABLE2_KS_FULL);
            }
            let rows = ks
                .par_iter()
                .map(|&k| order_row(&problem, k, TABLE2_T, &tol))
                .collect::<Result<Vec<_>, _>>()?;
            render(a.out.format, &rows)
        }
        3 => {
            let rows = TABLE3_SLOPES
                .par_iter()
                .map(|&t| {
                    order_row(&problem, TABLE3_K, t, &tol).map(|r| SlopeRow {
                        t,
                        numeric: r.numeric,
                        asymptotic: r.asymptotic,
                        rel_err: r.rel_err,
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            render(a.out.format, &rows)
        }
        _ => return Err(Failure::usage("which must be 1, 2, or 3")),
    };
    emit(a.out.output.as_deref(), &content)
}

fn order_row(
    problem: &Problem,
    k: u32,
    t: f64,
    tol: &ToleranceConfig,
) -> Result<OrderRow, SolveError> {
    let numeric = eigenvalue(problem, k, t, Sign::Plus, tol)?.lambda;
    let asymptotic = asymptotic_eigenvalue(problem, k, t)?;
    Ok(OrderRow {
        k,
        numeric,
        asymptotic,
        rel_err: (numeric - asymptotic).abs() / numeric,
    })
}

fn cmd_plot(a: PlotArgs) -> Result<(), Failure> {
    require_k(a.k_max, "k-max")?;
    let grid = ray_grid(a.t_min, a.t_max, a.points, !a.linear)?;
    if !(a.alpha_max.is_finite() && a.alpha_max > 0.0) {
        return Err(Failure::usage("alpha-max must be positive"));
    }
    if !(a.beta_max.is_finite() && a.beta_max > 0.0) {
        return Err(Failure::usage("beta-max must be positive"));
    }
    if a.width < 100 || a.height < 100 {
        return Err(Failure::usage(
            "image size must be at least 100 x 100 pixels",
        ));
    }
    let problem = build_problem(&a.weights.m, &a.weights.n, a.weights.length)?;
    let tol = tol_config(a.solve.eps)?;
    let signs: &[Sign] = match a.signs {
        SignsArg::Both => &[Sign::Plus, Sign::Minus],
        SignsArg::Plus => &[Sign::Plus],
        SignsArg::Minus => &[Sign::Minus],
    };
    let tasks: Vec<(u32, Sign)> = (1..=a.k_max)
        .flat_map(|k| signs.iter().map(move |&s| (k, s)))
        .collect();
    let curves: Vec<PlotCurve> = tasks
        .par_iter()
        .map(|&(k, sign)| {
            let points = grid
                .iter()
                .filter_map(|&t| {
                    eigenvalue(&problem, k, t, sign, &tol)
                        .ok()
                        .map(|he| (he.alpha, he.beta))
                })
                .collect();
            PlotCurve { k, sign, points }
        })
        .collect();
    let alpha_ref = linear_eigenvalue(problem.m(), a.weights.length, 1, &tol)?;
    let beta_ref = linear_eigenvalue(problem.n(), a.weights.length, 1, &tol)?;
    let frame = PlotFrame {
        width: a.width,
        height: a.height,
        alpha_max: a.alpha_max,
        beta_max: a.beta_max,
    };
    let doc = svg::render(&frame, &curves, alpha_ref, beta_ref);
    emit(a.output.as_deref(), &doc)
}

fn cmd_bracket(a: BracketArgs) -> Result<(), Failure> {
    check_t(a.t, "t")?;
    let problem = build_problem(&a.weights.m, &a.weights.n, a.weights.length)?;
    if !(a.c > 0.0 && a.c < problem.length()) {
        return Err(Failure::usage("c must lie strictly inside the interval"));
    }
    if !(a.lambda_min.is_finite() && a.lambda_min > 0.0) {
        return Err(Failure::usage("lambda-min must be positive"));
    }
    if !(a.lambda_max.is_finite() && a.lambda_max >= a.lambda_min) {
        return Err(Failure::usage("lambda-max must be at least lambda-min"));
    }
    if a.steps == 0 {
        return Err(Failure::usage("steps must be at least 1"));
    }
    let tol = tol_config(a.solve.eps)?;
    let n = a.steps as usize;
    let mut grid = Vec::with_capacity(n);
    for i in 0..n {
        let f = if n == 1 {
            0.0
        } else {
            i as f64 / (n - 1) as f64
        };
        grid.push((a.lambda_min.ln() + f * (a.lambda_max.ln() - a.lambda_min.ln())).exp());
    }
    let length = problem.length();
    let rows = grid
        .par_iter()
        .map(|&lambda| -> Result<BracketRow, SolveError> {
            let whole = count(&problem, lambda, a.t, &tol)?;
            let left = count_on(
                &problem,
                lambda,
                a.t,
                0.0,
                a.c,
                problem.bc_left(),
                Bc::Neumann,
                &tol,
            )?;
            let right = count_on(
                &problem,
                lambda,
                a.t,
                a.c,
                length,
                Bc::Neumann,
                problem.bc_right(),
                &tol,
            )?;
            Ok(BracketRow {
                lambda,
                n_whole: whole.total,
                n_left: left.total,
                n_right: right.total,
                defect: i64::from(whole.total) - i64::from(left.total) - i64::from(right.total),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    emit(a.out.output.as_deref(), &render(a.out.format, &rows))
}
