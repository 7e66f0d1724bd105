//! Output records, number formatting, and the error protocol shared by all
//! subcommands.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use fucik::SolveError;
use serde::Serialize;

/// A command failure. `code` is the process exit status; the message goes to
/// stderr as a single JSON line so scripts can parse it.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Solver(String),
    Io(String),
}

impl Failure {
    pub fn usage(msg: impl Into<String>) -> Failure {
        Failure::Usage(msg.into())
    }

    pub fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Solver(_) => 3,
            Failure::Io(_) => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Failure::Usage(_) => "usage",
            Failure::Solver(_) => "solver",
            Failure::Io(_) => "io",
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Solver(m) | Failure::Io(m) => m,
        }
    }

    /// The single-line stderr form.
    pub fn line(&self) -> String {
        error_line(self.kind(), self.message(), None)
    }
}

/// Renders one machine-readable error line. `t` tags per-row failures in
/// curve output.
pub fn error_line(kind: &str, message: &str, t: Option<f64>) -> String {
    #[derive(Serialize)]
    struct Line<'a> {
        error: &'a str,
        kind: &'a str,
        #[serde(skip_serializing_if = "Option::is_none")]
        t: Option<f64>,
    }
    serde_json::to_string(&Line {
        error: message,
        kind,
        t,
    })
    .expect("error serialization cannot fail")
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Failure {
        match e {
            // Argument and problem construction errors are the caller's
            // fault; everything else is a numerical failure.
            SolveError::InvalidArgument(_) | SolveError::Problem(_) => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Solver(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Failure {
        Failure::Io(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Formats a float with full round-trip precision and at least six
/// significant digits, always with a decimal point, never in scientific
/// notation. Rust's shortest round-trip form is padded with zeros when it is
/// shorter than six digits; padding does not change the parsed value.
pub fn fmt_f64(x: f64) -> String {
    let mut s = format!("{x}");
    if !s.contains('.') {
        // Display never emits exponents for f64, so this is an integer value.
        s.push('.');
        s.push('0');
    }
    let significant = s
        .chars()
        .filter(|c| c.is_ascii_digit())
        .collect::<String>()
        .trim_start_matches('0')
        .len();
    for _ in significant..6 {
        s.push('0');
    }
    s
}

/// One output row: a CSV line and a JSON object.
pub trait Record: Serialize {
    fn csv_header() -> &'static str;
    fn csv_row(&self) -> String;
}

#[derive(Serialize)]
pub struct EigenRecord {
    pub k: u32,
    pub t: f64,
    pub sign: &'static str,
    pub alpha: f64,
    pub beta: f64,
    pub achieved_eps: f64,
}

impl Record for EigenRecord {
    fn csv_header() -> &'static str {
        "k,t,sign,alpha,beta,achieved_eps"
    }

    fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.k,
            fmt_f64(self.t),
            self.sign,
            fmt_f64(self.alpha),
            fmt_f64(self.beta),
            fmt_f64(self.achieved_eps)
        )
    }
}

#[derive(Serialize)]
pub struct CurveRecord {
    pub t: f64,
    pub alpha: f64,
    pub beta: f64,
    pub k: u32,
    pub sign: &'static str,
}

impl Record for CurveRecord {
    fn csv_header() -> &'static str {
        "t,alpha,beta,k,sign"
    }

    fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            fmt_f64(self.t),
            fmt_f64(self.alpha),
            fmt_f64(self.beta),
            self.k,
            self.sign
        )
    }
}

#[derive(Serialize)]
pub struct CountRecord {
    pub lambda: f64,
    pub t: f64,
    pub n_plus: u32,
    pub n_minus: u32,
    pub total: u32,
    pub asymptotic_count: f64,
}

impl Record for CountRecord {
    fn csv_header() -> &'static str {
        "lambda,t,n_plus,n_minus,total,asymptotic_count"
    }

    fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            fmt_f64(self.lambda),
            fmt_f64(self.t),
            self.n_plus,
            self.n_minus,
            self.total,
            fmt_f64(self.asymptotic_count)
        )
    }
}

#[derive(Serialize)]
pub struct RayRow {
    pub t: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl Record for RayRow {
    fn csv_header() -> &'static str {
        "t,alpha,beta"
    }

    fn csv_row(&self) -> String {
        format!(
            "{},{},{}",
            fmt_f64(self.t),
            fmt_f64(self.alpha),
            fmt_f64(self.beta)
        )
    }
}

#[derive(Serialize)]
pub struct OrderRow {
    pub k: u32,
    pub numeric: f64,
    pub asymptotic: f64,
    pub rel_err: f64,
}

impl Record for OrderRow {
    fn csv_header() -> &'static str {
        "k,numeric,asymptotic,rel_err"
    }

    fn csv_row(&self) -> String {
        format!(
            "{},{},{},{}",
            self.k,
            fmt_f64(self.numeric),
            fmt_f64(self.asymptotic),
            fmt_f64(self.rel_err)
        )
    }
}

#[derive(Serialize)]
pub struct SlopeRow {
    pub t: f64,
    pub numeric: f64,
    pub asymptotic: f64,
    pub rel_err: f64,
}

impl Record for SlopeRow {
    fn csv_header() -> &'static str {
        "t,numeric,asymptotic,rel_err"
    }

    fn csv_row(&self) -> String {
        format!(
            "{},{},{},{}",
            fmt_f64(self.t),
            fmt_f64(self.numeric),
            fmt_f64(self.asymptotic),
            fmt_f64(self.rel_err)
        )
    }
}

#[derive(Serialize)]
pub struct BracketRow {
    pub lambda: f64,
    pub n_whole: u32,
    pub n_left: u32,
    pub n_right: u32,
    pub defect: i64,
}

impl Record for BracketRow {
    fn csv_header() -> &'static str {
        "lambda,n_whole,n_left,n_right,defect"
    }

    fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            fmt_f64(self.lambda),
            self.n_whole,
            self.n_left,
            self.n_right,
            self.defect
        )
    }
}

/// Renders records in the chosen format: CSV with a header row, or one JSON
/// object per line.
pub fn render<R: Record>(format: Format, rows: &[R]) -> String {
    let mut out = String::new();
    match format {
        Format::Csv => {
            out.push_str(R::csv_header());
            out.push('\n');
            for row in rows {
                out.push_str(&row.csv_row());
                out.push('\n');
            }
        }
        Format::Json => {
            for row in rows {
                let line = serde_json::to_string(row).expect("record serialization cannot fail");
                let _ = writeln!(out, "{line}");
            }
        }
    }
    out
}

/// Writes the finished output to the requested destination in one shot.
pub fn emit(path: Option<&Path>, content: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, content)
            .map_err(|e| Failure::Io(format!("cannot write {}: {e}", p.display()))),
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(content.as_bytes())?;
            lock.flush()?;
            Ok(())
        }
    }
}
