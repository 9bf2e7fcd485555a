//! Convergence plots as standalone SVG documents.

use std::fmt::Write as _;

use super::config::Algorithm;
use super::log::{smooth_trailing, RunLog};

const WIDTH: f64 = 820.0;
const HEIGHT: f64 = 520.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 170.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 60.0;
const LOG_FLOOR: f64 = 1e-4;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

#[derive(Debug, Clone, PartialEq)]
pub struct PlotOptions {
    pub log_scale: bool,
    /// Trailing smoothing window in episodes; `None` plots raw values.
    pub smoothing_window: Option<u64>,
    pub title: String,
}

/// Per-episode median and extremes across seeds.
#[derive(Debug, Clone, PartialEq)]
pub struct Band {
    pub algorithm: Algorithm,
    /// `(episode, median, min, max)`, only at episodes every seed logged.
    pub points: Vec<(u64, f64, f64, f64)>,
}

pub fn bands(log: &RunLog, smoothing_window: Option<u64>) -> Vec<Band> {
    log.algorithms()
        .into_iter()
        .map(|algorithm| {
            let runs: Vec<Vec<(u64, f64)>> = log
                .seeds(algorithm)
                .into_iter()
                .map(|seed| {
                    let raw = log.series(algorithm, seed);
                    match smoothing_window {
                        Some(w) => smooth_trailing(&raw, w),
                        None => raw,
                    }
                })
                .collect();
            let points = runs[0]
                .iter()
                .filter_map(|&(e, _)| {
                    let mut values: Vec<f64> = runs
                        .iter()
                        .map(|r| r.iter().find(|(x, _)| *x == e).map(|&(_, v)| v))
                        .collect::<Option<_>>()?;
                    values.sort_by(f64::total_cmp);
                    let n = values.len();
                    let median = if n % 2 == 1 {
                        values[n / 2]
                    } else {
                        0.5 * (values[n / 2 - 1] + values[n / 2])
                    };
                    Some((e, median, values[0], values[n - 1]))
                })
                .collect();
            Band { algorithm, points }
        })
        .collect()
}

/// Median over seeds of the first episode reaching `threshold`; runs that
/// never reach it count as infinitely late.
pub fn median_episodes_to_reach(log: &RunLog, algorithm: Algorithm, threshold: f64) -> f64 {
    let mut hits: Vec<f64> = log
        .seeds(algorithm)
        .into_iter()
        .map(|seed| log.episodes_to_reach(algorithm, seed, threshold).map_or(f64::INFINITY, |e| e as f64))
        .collect();
    if hits.is_empty() {
        return f64::INFINITY;
    }
    hits.sort_by(f64::total_cmp);
    let n = hits.len();
    if n % 2 == 1 {
        hits[n / 2]
    } else {
        0.5 * (hits[n / 2 - 1] + hits[n / 2])
    }
}

pub fn render_svg(log: &RunLog, opts: &PlotOptions) -> String {
    let bands = bands(log, opts.smoothing_window);
    let transform = |v: f64| transform_clamped(v, opts.log_scale);
    let all = bands.iter().flat_map(|b| &b.points);
    let x_max = all.clone().map(|p| p.0).max().unwrap_or(0).max(1) as f64;
    let (mut y_lo, mut y_hi) = all
        .flat_map(|p| [transform(p.2), transform(p.3)])
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !y_lo.is_finite() {
        (y_lo, y_hi) = (0.0, 1.0);
    }
    if opts.log_scale {
        y_lo = y_lo.floor();
        y_hi = y_hi.ceil();
    } else {
        y_lo = y_lo.min(0.0);
    }
    if y_hi - y_lo < 1e-12 {
        y_hi = y_lo + 1.0;
    }
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let px = |e: f64| MARGIN_LEFT + e / x_max * plot_w;
    let py = |v: f64| MARGIN_TOP + (y_hi - transform(v)) / (y_hi - y_lo) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(svg, r#"<text x="{}" y="18" text-anchor="middle" font-size="14">{}</text>"#, MARGIN_LEFT + plot_w / 2.0, escape(&opts.title));
    let _ = writeln!(
        svg,
        r#"<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    for i in 0..=5 {
        let e = x_max * i as f64 / 5.0;
        let x = px(e);
        let _ = writeln!(
            svg,
            r##"<line x1="{x:.2}" y1="{}" x2="{x:.2}" y2="{}" stroke="#ccc"/><text x="{x:.2}" y="{}" text-anchor="middle">{}</text>"##,
            MARGIN_TOP,
            MARGIN_TOP + plot_h,
            MARGIN_TOP + plot_h + 18.0,
            e.round()
        );
    }
    let y_ticks: Vec<f64> = if opts.log_scale {
        (y_lo as i32..=y_hi as i32).map(f64::from).collect()
    } else {
        (0..=5).map(|i| y_lo + (y_hi - y_lo) * i as f64 / 5.0).collect()
    };
    for t in y_ticks {
        let y = MARGIN_TOP + (y_hi - t) / (y_hi - y_lo) * plot_h;
        let label = if opts.log_scale { format!("1e{t}") } else { format!("{t:.2}") };
        let _ = writeln!(
            svg,
            r##"<line x1="{MARGIN_LEFT}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="#ccc"/><text x="{}" y="{:.2}" text-anchor="end">{label}</text>"##,
            MARGIN_LEFT + plot_w,
            MARGIN_LEFT - 6.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">episodes</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="20" y="{}" text-anchor="middle" transform="rotate(-90 20 {})">exploitability</text>"#,
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0
    );
    for (i, band) in bands.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let upper = band.points.iter().map(|p| format!("{:.2},{:.2}", px(p.0 as f64), py(p.3)));
        let lower = band.points.iter().rev().map(|p| format!("{:.2},{:.2}", px(p.0 as f64), py(p.2)));
        let outline: Vec<String> = upper.chain(lower).collect();
        let _ = writeln!(
            svg,
            r#"<polygon class="band" data-algorithm="{}" points="{}" fill="{color}" fill-opacity="0.2" stroke="none"/>"#,
            band.algorithm,
            outline.join(" ")
        );
        let median: Vec<String> = band.points.iter().map(|p| format!("{:.2},{:.2}", px(p.0 as f64), py(p.1))).collect();
        let _ = writeln!(
            svg,
            r#"<polyline class="median" data-algorithm="{}" points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            band.algorithm,
            median.join(" ")
        );
        let ly = MARGIN_TOP + 20.0 + 20.0 * i as f64;
        let lx = MARGIN_LEFT + plot_w + 15.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="3"/><text x="{}" y="{}">{}</text>"#,
            lx + 25.0,
            lx + 32.0,
            ly + 4.0,
            band.algorithm
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn transform_clamped(v: f64, log_scale: bool) -> f64 {
    if log_scale {
        v.max(LOG_FLOOR).log10()
    } else {
        v
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
