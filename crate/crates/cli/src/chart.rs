use std::fmt::Write;

use edutree::evaluation::EvaluationReport;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 60.0;

const SERIES: [(&str, &str); 3] = [
    ("Correct", "#3b7dd8"),
    ("Incorrect", "#d8573b"),
    ("Unclassified", "#9a9a9a"),
];

/// Grouped bar chart of the correct, incorrect and unclassified percentages
/// per learner.
pub fn render(reports: &[EvaluationReport]) -> String {
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let y = |pct: f64| TOP + plot_h * (1.0 - pct / 100.0);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="28" text-anchor="middle" font-size="16">Comparison of classifiers</text>"#,
        LEFT + plot_w / 2.0
    );
    for tick in (0..=100).step_by(20) {
        let ty = y(tick as f64);
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT}" y1="{ty:.1}" x2="{:.1}" y2="{ty:.1}" stroke="#dddddd"/>"##,
            LEFT + plot_w
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{tick}</text>"#,
            LEFT - 8.0,
            ty + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.1}" text-anchor="middle" transform="rotate(-90 18 {:.1})">Percent of instances</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );

    let group_w = plot_w / reports.len().max(1) as f64;
    let bar_w = group_w * 0.8 / SERIES.len() as f64;
    for (g, report) in reports.iter().enumerate() {
        let x0 = LEFT + g as f64 * group_w + group_w * 0.1;
        let values = [report.correct_pct, report.incorrect_pct, report.unclassified_pct];
        for (i, ((name, color), value)) in SERIES.iter().zip(values).enumerate() {
            let x = x0 + i as f64 * bar_w;
            let top = y(value);
            let _ = writeln!(
                s,
                r#"<rect x="{x:.1}" y="{top:.1}" width="{:.1}" height="{:.1}" fill="{color}"><title>{} {name}: {value:.4}%</title></rect>"#,
                bar_w - 2.0,
                TOP + plot_h - top,
                report.algorithm
            );
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="10">{value:.1}</text>"#,
                x + (bar_w - 2.0) / 2.0,
                top - 4.0
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            LEFT + (g as f64 + 0.5) * group_w,
            TOP + plot_h + 22.0,
            report.algorithm
        );
    }
    let _ = writeln!(
        s,
        r##"<line x1="{LEFT}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="#333333"/>"##,
        TOP + plot_h,
        LEFT + plot_w,
        TOP + plot_h
    );
    for (i, (name, color)) in SERIES.iter().enumerate() {
        let ly = TOP + 10.0 + i as f64 * 22.0;
        let lx = WIDTH - RIGHT + 20.0;
        let _ = writeln!(
            s,
            r#"<rect x="{lx:.1}" y="{:.1}" width="14" height="14" fill="{color}"/>"#,
            ly - 11.0
        );
        let _ = writeln!(s, r#"<text x="{:.1}" y="{ly:.1}">{name}</text>"#, lx + 20.0);
    }
    s.push_str("</svg>\n");
    s
}
