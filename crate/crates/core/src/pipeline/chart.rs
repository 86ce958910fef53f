//! Deterministic SVG line charts of momentum series.
//!
//! All coordinates are printed with two decimals and the element order is
//! fixed, so identical series give identical bytes.

use std::fmt::Write;

use serde::Serialize;

use crate::ingest::{format_elapsed, Side};
use crate::topsis::MomentumSeries;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 48.0;
const BOTTOM: f64 = 56.0;
const COLORS: [&str; 2] = ["#1f77b4", "#d62728"];
const X_TICKS: usize = 6;
const Y_TICKS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ChartSlice {
    Whole,
    Set(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum ChartMode {
    /// Relative closeness in `[0, 1]`.
    #[default]
    Closeness,
    /// Cumulative points won.
    RawPoints,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Render one slice of `series`. Returns `None` when the slice is empty.
pub fn emit_chart(series: &MomentumSeries, slice: ChartSlice, mode: ChartMode) -> Option<String> {
    let view = match slice {
        ChartSlice::Whole => series.clone(),
        ChartSlice::Set(n) => series.set(n),
    };
    if view.is_empty() {
        return None;
    }
    let values = |side: Side| -> Vec<f64> {
        view.points
            .iter()
            .map(|p| match mode {
                ChartMode::Closeness => p.closeness[side.index()],
                ChartMode::RawPoints => f64::from(p.points_won[side.index()]),
            })
            .collect()
    };
    let ys = [values(Side::One), values(Side::Two)];
    let xs: Vec<f64> = view
        .points
        .iter()
        .map(|p| f64::from(p.elapsed_seconds))
        .collect();

    let (x_min, x_max) = (xs[0], xs[xs.len() - 1]);
    let x_span = if x_max > x_min { x_max - x_min } else { 1.0 };
    let y_max = match mode {
        ChartMode::Closeness => 1.0,
        ChartMode::RawPoints => ys.iter().flatten().copied().fold(1.0, f64::max),
    };
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let px = |x: f64| {
        if x_max > x_min {
            LEFT + (x - x_min) / x_span * plot_w
        } else {
            LEFT + plot_w / 2.0
        }
    };
    let py = |y: f64| TOP + plot_h - y / y_max * plot_h;

    let title = match slice {
        ChartSlice::Whole => format!("{}: whole match", view.match_id),
        ChartSlice::Set(n) => format!("{}: set {n}", view.match_id),
    };
    let y_label = match mode {
        ChartMode::Closeness => "closeness",
        ChartMode::RawPoints => "points won",
    };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH:.0}" height="{HEIGHT:.0}" viewBox="0 0 {WIDTH:.0} {HEIGHT:.0}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        s,
        r#"<rect width="{WIDTH:.0}" height="{HEIGHT:.0}" fill="white"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="24.00" text-anchor="middle" font-size="15">{}</text>"#,
        WIDTH / 2.0,
        escape(&title)
    );

    let _ = writeln!(s, r##"<g class="axes" stroke="#444" stroke-width="1">"##);
    let _ = writeln!(
        s,
        r#"<line x1="{LEFT:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/>"#,
        TOP + plot_h,
        LEFT + plot_w,
        TOP + plot_h
    );
    let _ = writeln!(
        s,
        r#"<line x1="{LEFT:.2}" y1="{TOP:.2}" x2="{LEFT:.2}" y2="{:.2}"/>"#,
        TOP + plot_h
    );
    let _ = writeln!(s, "</g>");

    let _ = writeln!(s, r##"<g class="ticks" fill="#444">"##);
    let x_ticks = if x_max > x_min { X_TICKS } else { 1 };
    for k in 0..x_ticks {
        let t = if x_ticks == 1 {
            x_min
        } else {
            x_min + x_span * k as f64 / (x_ticks - 1) as f64
        };
        let x = px(t);
        let _ = writeln!(
            s,
            r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#444"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"##,
            TOP + plot_h,
            TOP + plot_h + 5.0,
            TOP + plot_h + 19.0,
            format_elapsed(t.round() as u32)
        );
    }
    for k in 0..Y_TICKS {
        let v = y_max * k as f64 / (Y_TICKS - 1) as f64;
        let y = py(v);
        let label = match mode {
            ChartMode::Closeness => format!("{v:.2}"),
            ChartMode::RawPoints => format!("{v:.0}"),
        };
        let _ = writeln!(
            s,
            r##"<line x1="{:.2}" y1="{y:.2}" x2="{LEFT:.2}" y2="{y:.2}" stroke="#444"/><text x="{:.2}" y="{:.2}" text-anchor="end">{label}</text>"##,
            LEFT - 5.0,
            LEFT - 8.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">elapsed time</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16.00" y="{:.2}" text-anchor="middle" transform="rotate(-90 16.00 {:.2})">{y_label}</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );
    let _ = writeln!(s, "</g>");

    for side in Side::BOTH {
        let color = COLORS[side.index()];
        let pts: Vec<String> = xs
            .iter()
            .zip(&ys[side.index()])
            .map(|(x, y)| format!("{:.2},{:.2}", px(*x), py(*y)))
            .collect();
        let _ = writeln!(s, r#"<g class="series" data-player="{}">"#, side.number());
        if pts.len() == 1 {
            let (x, y) = pts[0].split_once(',').expect("coordinate pair");
            let _ = writeln!(s, r#"<circle cx="{x}" cy="{y}" r="4" fill="{color}"/>"#);
        } else {
            let _ = writeln!(
                s,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                pts.join(" ")
            );
        }
        let _ = writeln!(s, "</g>");
    }

    let _ = writeln!(s, r#"<g class="legend">"#);
    for side in Side::BOTH {
        let y = TOP + 14.0 + 18.0 * side.index() as f64;
        let x = LEFT + 12.0;
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{}" stroke-width="3"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            x + 20.0,
            COLORS[side.index()],
            x + 26.0,
            y + 4.0,
            escape(&view.players[side.index()])
        );
    }
    let _ = writeln!(s, "</g>");
    s.push_str("</svg>\n");
    Some(s)
}
