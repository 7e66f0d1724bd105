//! Standalone SVG rendering of spectrum curves in the (α, β) plane.
//!
//! Output is assembled in a fixed element order with fixed-precision
//! coordinates, so identical inputs produce byte-identical files.

use std::fmt::Write;

use fucik::Sign;

pub struct PlotFrame {
    pub width: u32,
    pub height: u32,
    pub alpha_max: f64,
    pub beta_max: f64,
}

pub struct PlotCurve {
    pub k: u32,
    pub sign: Sign,
    /// (α, β) samples ordered along the curve.
    pub points: Vec<(f64, f64)>,
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
];

const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 20.0;
const MARGIN_BOTTOM: f64 = 55.0;

fn fmt_px(v: f64) -> String {
    format!("{v:.2}")
}

/// Tick labels drop the fractional part when it is zero so round axis limits
/// stay short.
fn fmt_tick(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e15 {
        format!("{}", v.trunc() as i64)
    } else {
        format!("{v}")
    }
}

/// Renders the curves plus the two reference lines α = λ₁(m) and β = λ₁(n)
/// into a complete SVG document.
pub fn render(frame: &PlotFrame, curves: &[PlotCurve], alpha_ref: f64, beta_ref: f64) -> String {
    let w = frame.width as f64;
    let h = frame.height as f64;
    let plot_w = w - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = h - MARGIN_TOP - MARGIN_BOTTOM;
    let to_x = |alpha: f64| MARGIN_LEFT + alpha / frame.alpha_max * plot_w;
    let to_y = |beta: f64| MARGIN_TOP + plot_h - beta / frame.beta_max * plot_h;

    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">",
        frame.width, frame.height, frame.width, frame.height
    );
    let _ = writeln!(
        s,
        "<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"#ffffff\"/>",
        frame.width, frame.height
    );
    let _ = writeln!(
        s,
        "<clipPath id=\"plot\"><rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\"/></clipPath>",
        fmt_px(MARGIN_LEFT),
        fmt_px(MARGIN_TOP),
        fmt_px(plot_w),
        fmt_px(plot_h)
    );

    // Axes with six ticks each.
    let _ = writeln!(
        s,
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#000000\"/>",
        fmt_px(MARGIN_LEFT),
        fmt_px(MARGIN_TOP),
        fmt_px(plot_w),
        fmt_px(plot_h)
    );
    for i in 0..=5u32 {
        let frac = f64::from(i) / 5.0;
        let alpha = frame.alpha_max * frac;
        let beta = frame.beta_max * frac;
        let x = to_x(alpha);
        let y = to_y(beta);
        let base = MARGIN_TOP + plot_h;
        let _ = writeln!(
            s,
            "<line x1=\"{x}\" y1=\"{y1}\" x2=\"{x}\" y2=\"{y2}\" stroke=\"#000000\"/>",
            x = fmt_px(x),
            y1 = fmt_px(base),
            y2 = fmt_px(base + 5.0)
        );
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">{}</text>",
            fmt_px(x),
            fmt_px(base + 20.0),
            fmt_tick(alpha)
        );
        let _ = writeln!(
            s,
            "<line x1=\"{x1}\" y1=\"{y}\" x2=\"{x2}\" y2=\"{y}\" stroke=\"#000000\"/>",
            x1 = fmt_px(MARGIN_LEFT - 5.0),
            x2 = fmt_px(MARGIN_LEFT),
            y = fmt_px(y)
        );
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"end\">{}</text>",
            fmt_px(MARGIN_LEFT - 8.0),
            fmt_px(y + 4.0),
            fmt_tick(beta)
        );
    }
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"{}\" font-size=\"14\" text-anchor=\"middle\">α</text>",
        fmt_px(MARGIN_LEFT + plot_w / 2.0),
        fmt_px(h - 12.0)
    );
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"{}\" font-size=\"14\" text-anchor=\"middle\">β</text>",
        fmt_px(18.0),
        fmt_px(MARGIN_TOP + plot_h / 2.0)
    );

    // Reference lines of the trivial part of the spectrum.
    if alpha_ref > 0.0 && alpha_ref <= frame.alpha_max {
        let x = fmt_px(to_x(alpha_ref));
        let _ = writeln!(
            s,
            "<line x1=\"{x}\" y1=\"{}\" x2=\"{x}\" y2=\"{}\" stroke=\"#888888\" stroke-dasharray=\"4 4\"><title>alpha = {}</title></line>",
            fmt_px(MARGIN_TOP),
            fmt_px(MARGIN_TOP + plot_h),
            alpha_ref
        );
    }
    if beta_ref > 0.0 && beta_ref <= frame.beta_max {
        let y = fmt_px(to_y(beta_ref));
        let _ = writeln!(
            s,
            "<line x1=\"{}\" y1=\"{y}\" x2=\"{}\" y2=\"{y}\" stroke=\"#888888\" stroke-dasharray=\"4 4\"><title>beta = {}</title></line>",
            fmt_px(MARGIN_LEFT),
            fmt_px(MARGIN_LEFT + plot_w),
            beta_ref
        );
    }

    let _ = writeln!(s, "<g clip-path=\"url(#plot)\">");
    for curve in curves {
        if curve.points.len() < 2 {
            continue;
        }
        let color = PALETTE[(curve.k as usize - 1) % PALETTE.len()];
        let dash = match curve.sign {
            Sign::Plus => "",
            Sign::Minus => " stroke-dasharray=\"6 3\"",
        };
        let mut pts = String::new();
        for (i, &(alpha, beta)) in curve.points.iter().enumerate() {
            if i > 0 {
                pts.push(' ');
            }
            let _ = write!(pts, "{},{}", fmt_px(to_x(alpha)), fmt_px(to_y(beta)));
        }
        let _ = writeln!(
            s,
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"{dash} points=\"{pts}\"><title>k={} {}</title></polyline>",
            curve.k, curve.sign
        );
    }
    let _ = writeln!(s, "</g>");
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> (PlotFrame, Vec<PlotCurve>) {
        let frame = PlotFrame {
            width: 400,
            height: 300,
            alpha_max: 100.0,
            beta_max: 100.0,
        };
        let curves = vec![
            PlotCurve {
                k: 1,
                sign: Sign::Plus,
                points: vec![(10.0, 90.0), (20.0, 40.0), (50.0, 20.0)],
            },
            PlotCurve {
                k: 1,
                sign: Sign::Minus,
                points: vec![(12.0, 95.0), (22.0, 45.0)],
            },
            PlotCurve {
                k: 2,
                sign: Sign::Plus,
                points: vec![(60.0, 80.0)],
            },
        ];
        (frame, curves)
    }

    #[test]
    fn renders_one_polyline_per_drawable_curve() {
        let (frame, curves) = sample();
        let doc = render(&frame, &curves, 15.0, 25.0);
        assert_eq!(doc.matches("<polyline").count(), 2);
        assert!(doc.contains("<title>k=1 +</title>"));
        assert!(doc.contains("<title>k=1 -</title>"));
        assert!(doc.contains("stroke-dasharray=\"6 3\""));
        assert!(doc.starts_with("<?xml version=\"1.0\""));
        assert!(doc.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn reference_lines_appear_only_inside_range() {
        let (frame, curves) = sample();
        let doc = render(&frame, &curves, 15.0, 250.0);
        assert!(doc.contains("<title>alpha = 15</title>"));
        assert!(!doc.contains("<title>beta ="));
    }

    #[test]
    fn output_is_reproducible() {
        let (frame, curves) = sample();
        let a = render(&frame, &curves, 15.0, 25.0);
        let b = render(&frame, &curves, 15.0, 25.0);
        assert_eq!(a, b);
    }
}
