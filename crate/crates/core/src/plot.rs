//! Dependency-free SVG learning curves.

use std::fmt::Write;

use crate::orchestrator::AggregateRow;
use crate::strategies::StrategyKind;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const MARGIN_L: f64 = 60.0;
const MARGIN_R: f64 = 120.0;
const MARGIN_T: f64 = 20.0;
const MARGIN_B: f64 = 50.0;

fn color(s: StrategyKind) -> &'static str {
    match s {
        StrategyKind::Random => "#1f77b4",
        StrategyKind::Fps => "#ff7f0e",
        StrategyKind::Osal => "#2ca02c",
        StrategyKind::Mcfps => "#d62728",
    }
}

/// Accuracy against mean cumulative labels: one mean polyline per strategy,
/// a shaded min/max band, a horizontal line at `target`, and a dashed
/// vertical line per `(strategy, mean labels-to-target)` marker.
pub fn learning_curves(rows: &[AggregateRow], target: f64, markers: &[(StrategyKind, f64)]) -> String {
    let max_x = rows
        .iter()
        .map(|r| r.mean_labels)
        .chain(markers.iter().map(|m| m.1))
        .fold(1.0f64, f64::max);
    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
    let sx = |x: f64| MARGIN_L + x / max_x * plot_w;
    let sy = |y: f64| MARGIN_T + (1.0 - y.clamp(0.0, 1.0)) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let (x0, y0, x1, y1) = (sx(0.0), sy(0.0), sx(max_x), sy(1.0));
    let _ = writeln!(
        svg,
        r#"<path d="M{x0:.2} {y1:.2} L{x0:.2} {y0:.2} L{x1:.2} {y0:.2}" stroke="black" fill="none"/>"#
    );
    for tick in 0..=5 {
        let v = tick as f64 / 5.0;
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{v:.1}</text>"#,
            x0 - 6.0,
            sy(v) + 4.0
        );
        let lx = max_x * v;
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{lx:.0}</text>"#,
            sx(lx),
            y0 + 18.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">labels</text>"#,
        sx(max_x / 2.0),
        HEIGHT - 8.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="14" y="{:.2}" transform="rotate(-90 14 {:.2})" text-anchor="middle">test accuracy</text>"#,
        sy(0.5),
        sy(0.5)
    );
    let _ = writeln!(
        svg,
        r##"<line class="target" x1="{x0:.2}" y1="{ty:.2}" x2="{x1:.2}" y2="{ty:.2}" stroke="#555555" stroke-width="1"/>"##,
        ty = sy(target)
    );

    let mut order: Vec<StrategyKind> = Vec::new();
    for r in rows {
        if !order.contains(&r.strategy) {
            order.push(r.strategy);
        }
    }
    for (n, &s) in order.iter().enumerate() {
        let pts: Vec<&AggregateRow> = rows.iter().filter(|r| r.strategy == s).collect();
        let c = color(s);
        let mut band = String::new();
        for r in &pts {
            let _ = write!(band, "{:.2},{:.2} ", sx(r.mean_labels), sy(r.max_acc));
        }
        for r in pts.iter().rev() {
            let _ = write!(band, "{:.2},{:.2} ", sx(r.mean_labels), sy(r.min_acc));
        }
        let _ = writeln!(
            svg,
            r#"<polygon class="band" data-strategy="{s}" points="{}" fill="{c}" fill-opacity="0.15" stroke="none"/>"#,
            band.trim_end()
        );
        let line: Vec<String> = pts
            .iter()
            .map(|r| format!("{:.2},{:.2}", sx(r.mean_labels), sy(r.mean_acc)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline class="mean" data-strategy="{s}" points="{}" fill="none" stroke="{c}" stroke-width="2"/>"#,
            line.join(" ")
        );
        let ly = MARGIN_T + 16.0 * n as f64 + 10.0;
        let lx = WIDTH - MARGIN_R + 12.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{c}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{s}</text>"#,
            lx + 18.0,
            lx + 24.0,
            ly + 4.0
        );
    }
    for &(s, m) in markers {
        let _ = writeln!(
            svg,
            r#"<line class="target-crossing" data-strategy="{s}" x1="{x:.2}" y1="{y1:.2}" x2="{x:.2}" y2="{y0:.2}" stroke="{}" stroke-dasharray="6 4"/>"#,
            color(s),
            x = sx(m)
        );
    }
    svg.push_str("</svg>\n");
    svg
}
